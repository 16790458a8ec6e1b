#pragma once

// Minimal CSV emission with a metadata preamble: every file starts with a
// '# schema: <name>' line, followed by '# key = value' annotation lines,
// one header row, then data rows. Doubles are printed with 17 significant
// digits so files round-trip bit-exactly.

#include <cstdint>
#include <cstdio>
#include <initializer_list>
#include <ostream>
#include <string>
#include <vector>

namespace mdicv {

inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::string& schema) : out_(out) {
    out_ << "# schema: " << schema << "\n";
  }

  void note(const std::string& key, const std::string& value) {
    out_ << "# " << key << " = " << value << "\n";
  }
  void note(const std::string& key, double value) {
    note(key, format_g17(value));
  }
  void note(const std::string& key, std::int64_t value) {
    note(key, std::to_string(value));
  }

  void header(std::initializer_list<const char*> columns) {
    bool first = true;
    for (const char* c : columns) {
      if (!first) out_ << ',';
      out_ << c;
      first = false;
    }
    out_ << '\n';
  }

  void header(const std::vector<std::string>& columns) { row(columns); }

  void row(const std::vector<std::string>& cells) {
    bool first = true;
    for (const auto& c : cells) {
      if (!first) out_ << ',';
      out_ << c;
      first = false;
    }
    out_ << '\n';
  }

  static std::string cell(double v) { return format_g17(v); }
  static std::string cell(std::int64_t v) { return std::to_string(v); }
  static std::string cell(const char* v) { return v; }
  static std::string cell(const std::string& v) { return v; }

 private:
  std::ostream& out_;
};

}  // namespace mdicv
