#include <algorithm>
#include <climits>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include <mdicv/errors.hpp>

#include "commands.hpp"

namespace {

namespace fs = std::filesystem;
using namespace mdicv::cli;

std::string default_out_dir() {
  const char* env = std::getenv("MDICV_OUT_DIR");
  return (env != nullptr && *env != '\0') ? env : ".";
}

std::ofstream open_output(const std::string& dir, const std::string& name) {
  fs::create_directories(dir);
  const fs::path path = fs::path(dir) / name;
  std::ofstream file(path);
  if (!file)
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  std::cout << "writing " << path.string() << "\n";
  return file;
}

// ---- config-file layer ----------------------------------------------------
// CLI11's built-in config reader only fires for the root application, never
// for subcommands, so the file layer is explicit: every subcommand takes
// --config <path>, and its options are bound to config keys below. File
// values fill in only where the command line left the option untouched, so
// flags always win.

std::string trim_copy(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t");
  return s.substr(begin, end - begin + 1);
}

double parse_double_value(const std::string& key, const std::string& text) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "': cannot parse '" +
                                text + "' as a number");
  }
}

std::int64_t parse_int_value(const std::string& key, const std::string& text) {
  try {
    std::size_t pos = 0;
    const std::int64_t v = std::stoll(text, &pos);
    if (pos != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "': cannot parse '" +
                                text + "' as an integer");
  }
}

std::uint64_t parse_uint_value(const std::string& key,
                               const std::string& text) {
  try {
    if (!text.empty() && text.front() == '-')
      throw std::invalid_argument("negative");
    std::size_t pos = 0;
    const std::uint64_t v = std::stoull(text, &pos);
    if (pos != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "': cannot parse '" +
                                text + "' as a non-negative integer");
  }
}

bool parse_bool_value(const std::string& key, const std::string& text) {
  if (text == "1" || text == "true") return true;
  if (text == "0" || text == "false") return false;
  throw std::invalid_argument("config key '" + key +
                              "': expected 1/0/true/false, got '" + text + "'");
}

std::vector<std::int64_t> parse_int_list(const std::string& key,
                                         const std::string& text) {
  std::vector<std::int64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    out.push_back(parse_int_value(key, trim_copy(item)));
  if (out.empty())
    throw std::invalid_argument("config key '" + key + "': empty list");
  return out;
}

class ConfigMerge {
 public:
  using Apply = std::function<void(const std::string&, const std::string&)>;

  std::string* path() { return &path_; }

  void bind(CLI::Option* opt, std::vector<std::string> keys, Apply apply) {
    bindings_.push_back({std::move(keys), opt, std::move(apply)});
  }

  void run() const {
    if (path_.empty()) return;
    std::ifstream in(path_);
    if (!in)
      throw std::invalid_argument("cannot read config file '" + path_ + "'");
    for (const auto& [key, value] : parse_config_text(in)) {
      const Binding* hit = nullptr;
      for (const auto& b : bindings_) {
        if (std::find(b.keys.begin(), b.keys.end(), key) != b.keys.end()) {
          hit = &b;
          break;
        }
      }
      if (hit == nullptr)
        throw std::invalid_argument("unknown config key '" + key + "'");
      if (hit->opt->count() == 0) hit->apply(key, value);
    }
  }

 private:
  struct Binding {
    std::vector<std::string> keys;
    CLI::Option* opt;
    Apply apply;
  };
  std::string path_;
  std::vector<Binding> bindings_;
};

ConfigMerge::Apply set_double(double* target) {
  return [target](const std::string& k, const std::string& v) {
    *target = parse_double_value(k, v);
  };
}
ConfigMerge::Apply set_int64(std::int64_t* target) {
  return [target](const std::string& k, const std::string& v) {
    *target = parse_int_value(k, v);
  };
}
ConfigMerge::Apply set_uint64(std::uint64_t* target) {
  return [target](const std::string& k, const std::string& v) {
    *target = parse_uint_value(k, v);
  };
}
ConfigMerge::Apply set_int(int* target) {
  return [target](const std::string& k, const std::string& v) {
    const std::int64_t x = parse_int_value(k, v);
    if (x < INT_MIN || x > INT_MAX)
      throw std::invalid_argument("config key '" + k + "': out of range");
    *target = static_cast<int>(x);
  };
}
ConfigMerge::Apply set_bool(bool* target) {
  return [target](const std::string& k, const std::string& v) {
    *target = parse_bool_value(k, v);
  };
}
ConfigMerge::Apply set_string(std::string* target) {
  return [target](const std::string&, const std::string& v) { *target = v; };
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Key-rate analysis and pulse-level simulation of a dual-arm "
      "continuous-variable QKD protocol with an untrusted middle node"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  std::string out_dir = default_out_dir();
  bool no_timestamp = false;
  int status = kExitOk;

  const auto add_common = [&](CLI::App* sub, ConfigMerge& merge) {
    auto* out = sub->add_option("--out", out_dir,
                                "Output directory (default: $MDICV_OUT_DIR "
                                "or .)")
                    ->capture_default_str();
    merge.bind(out, {"out"}, set_string(&out_dir));
    auto* ts = sub->add_flag("--no-timestamp", no_timestamp,
                             "Omit the timestamp comment so output files are "
                             "byte-reproducible");
    merge.bind(ts, {"no-timestamp"}, set_bool(&no_timestamp));
    sub->add_option("--config", *merge.path(),
                    "Read options from a key=value file; explicit "
                    "command-line flags take precedence");
  };

  const auto add_channel = [](CLI::App* sub, ConfigMerge& merge,
                              double* variance, double* beta,
                              double* excess_noise, double* attenuation) {
    auto* v = sub->add_option("--v,--variance", *variance,
                              "Source variance, shot-noise units")
                  ->capture_default_str();
    merge.bind(v, {"v", "variance"}, set_double(variance));
    auto* b = sub->add_option("--beta", *beta, "Reconciliation efficiency")
                  ->check(CLI::Range(1e-9, 1.0))
                  ->capture_default_str();
    merge.bind(b, {"beta"}, set_double(beta));
    if (excess_noise != nullptr) {
      auto* e = sub->add_option("--eps,--excess-noise", *excess_noise,
                                "Input-referred excess noise, "
                                "shot-noise units")
                    ->check(CLI::NonNegativeNumber)
                    ->capture_default_str();
      merge.bind(e, {"eps", "excess-noise"}, set_double(excess_noise));
    }
    auto* a = sub->add_option("--alpha-db-km,--attenuation", *attenuation,
                              "Fibre loss, dB/km")
                  ->check(CLI::NonNegativeNumber)
                  ->capture_default_str();
    merge.bind(a, {"alpha-db-km", "attenuation"}, set_double(attenuation));
  };

  const auto add_grid = [](CLI::App* sub, ConfigMerge& merge, double* dmin,
                           double* dmax, double* dstep) {
    auto* lo = sub->add_option("--dmin", *dmin, "First distance, km")
                   ->check(CLI::NonNegativeNumber)
                   ->capture_default_str();
    merge.bind(lo, {"dmin"}, set_double(dmin));
    auto* hi = sub->add_option("--dmax", *dmax, "Last distance, km")
                   ->check(CLI::NonNegativeNumber)
                   ->capture_default_str();
    merge.bind(hi, {"dmax"}, set_double(dmax));
    auto* st = sub->add_option("--dstep", *dstep, "Grid spacing, km")
                   ->check(CLI::PositiveNumber)
                   ->capture_default_str();
    merge.bind(st, {"dstep"}, set_double(dstep));
  };

  {
    auto opt = std::make_shared<AsymptoticSweepOptions>();
    auto merge = std::make_shared<ConfigMerge>();
    auto* sub = app.add_subcommand(
        "asymptotic-sweep", "Asymptotic key rate over a distance grid");
    add_channel(sub, *merge, &opt->variance, &opt->beta, &opt->excess_noise,
                &opt->attenuation);
    add_grid(sub, *merge, &opt->dmin_km, &opt->dmax_km, &opt->dstep_km);
    add_common(sub, *merge);
    sub->callback([&, opt, merge]() {
      merge->run();
      const OutputOptions io{!no_timestamp};
      auto csv = open_output(out_dir, "asymptotic_sweep.csv");
      status = run_asymptotic_sweep(*opt, io, csv, std::cout);
    });
  }

  {
    auto opt = std::make_shared<TolerableNoiseOptions>();
    auto merge = std::make_shared<ConfigMerge>();
    auto* sub = app.add_subcommand(
        "tolerable-noise",
        "Largest excess noise with a positive rate, per distance");
    add_channel(sub, *merge, &opt->variance, &opt->beta, nullptr,
                &opt->attenuation);
    add_grid(sub, *merge, &opt->dmin_km, &opt->dmax_km, &opt->dstep_km);
    auto* res = sub->add_flag("--emit-residuals", opt->emit_residuals,
                              "Add the key-rate residual at each noise "
                              "ceiling");
    merge->bind(res, {"emit-residuals"}, set_bool(&opt->emit_residuals));
    add_common(sub, *merge);
    sub->callback([&, opt, merge]() {
      merge->run();
      const OutputOptions io{!no_timestamp};
      auto csv = open_output(out_dir, "tolerable_noise.csv");
      status = run_tolerable_noise(*opt, io, csv, std::cout, std::cerr);
    });
  }

  {
    auto opt = std::make_shared<FiniteSizeSweepOptions>();
    auto merge = std::make_shared<ConfigMerge>();
    auto* sub = app.add_subcommand(
        "finite-size-sweep",
        "Finite-block key rate for both estimation modes");
    add_channel(sub, *merge, &opt->variance, &opt->beta, &opt->excess_noise,
                &opt->attenuation);
    auto* blocks = sub->add_option("--blocks", opt->block_sizes,
                                   "Block sizes to evaluate")
                       ->check(CLI::PositiveNumber)
                       ->capture_default_str();
    merge->bind(blocks, {"blocks"},
                [opt](const std::string& k, const std::string& v) {
                  opt->block_sizes = parse_int_list(k, v);
                });
    add_grid(sub, *merge, &opt->dmin_km, &opt->dmax_km, &opt->dstep_km);
    auto* check = sub->add_flag("--self-check", opt->self_check,
                                "Verify mode/block-size ordering; exit 3 on "
                                "violation");
    merge->bind(check, {"self-check"}, set_bool(&opt->self_check));
    add_common(sub, *merge);
    sub->callback([&, opt, merge]() {
      merge->run();
      const OutputOptions io{!no_timestamp};
      auto csv = open_output(out_dir, "finite_size_sweep.csv");
      status = run_finite_size_sweep(*opt, io, csv, std::cout);
    });
  }

  {
    auto opt = std::make_shared<SimulateOptions>();
    auto gain = std::make_shared<double>(0.0);
    auto emit_records = std::make_shared<bool>(false);
    auto merge = std::make_shared<ConfigMerge>();
    auto* sub = app.add_subcommand(
        "simulate", "Pulse-level Monte-Carlo of the full protocol");
    add_channel(sub, *merge, &opt->variance, &opt->beta, &opt->excess_noise,
                &opt->attenuation);
    auto* dist = sub->add_option("--d,--distance", opt->distance_km,
                                 "End-to-end distance, km")
                     ->check(CLI::NonNegativeNumber)
                     ->capture_default_str();
    merge->bind(dist, {"d", "distance"}, set_double(&opt->distance_km));
    auto* gain_opt = sub->add_option(
        "--gain", *gain, "Fixed displacement gain (default: optimize)");
    merge->bind(gain_opt, {"gain"},
                [opt](const std::string& k, const std::string& v) {
                  opt->gain = parse_double_value(k, v);
                });
    auto* pulses = sub->add_option("--pulses", opt->pulses, "Number of pulses")
                       ->check(CLI::PositiveNumber)
                       ->capture_default_str();
    merge->bind(pulses, {"pulses"}, set_int64(&opt->pulses));
    auto* seed = sub->add_option("--seed", opt->seed, "Random seed")
                     ->capture_default_str();
    merge->bind(seed, {"seed"}, set_uint64(&opt->seed));
    auto* threads = sub->add_option("--threads", opt->threads,
                                    "Worker threads")
                        ->check(CLI::Range(1, 1024))
                        ->capture_default_str();
    merge->bind(threads, {"threads"}, set_int(&opt->threads));
    auto* rec = sub->add_flag("--emit-records", *emit_records,
                              "Also write every per-pulse record");
    merge->bind(rec, {"emit-records"}, set_bool(emit_records.get()));
    add_common(sub, *merge);
    sub->callback([&, opt, gain, gain_opt, emit_records, merge]() {
      if (gain_opt->count() > 0) opt->gain = *gain;
      merge->run();
      const OutputOptions io{!no_timestamp};
      auto summary = open_output(out_dir, "simulate_summary.csv");
      std::optional<std::ofstream> records;
      if (*emit_records)
        records.emplace(open_output(out_dir, "simulate_records.csv"));
      status = run_simulate(*opt, io, summary,
                            records ? &records.value() : nullptr, std::cout);
    });
  }

  {
    auto opt = std::make_shared<DpmVerifyOptions>();
    auto merge = std::make_shared<ConfigMerge>();
    auto* sub = app.add_subcommand(
        "dpm-verify",
        "Numerical checks of the phase-modulation optics equivalences");
    auto* trials = sub->add_option("--trials", opt->trials,
                                   "Random draws per identity check")
                       ->check(CLI::PositiveNumber)
                       ->capture_default_str();
    merge->bind(trials, {"trials"}, set_int64(&opt->trials));
    auto* samples = sub->add_option("--samples", opt->samples,
                                    "Samples for the modulation-variance "
                                    "check")
                        ->check(CLI::PositiveNumber)
                        ->capture_default_str();
    merge->bind(samples, {"samples"}, set_int64(&opt->samples));
    auto* mod = sub->add_option("--modulation-variance",
                                opt->modulation_variance,
                                "Target per-quadrature variance")
                    ->check(CLI::PositiveNumber)
                    ->capture_default_str();
    merge->bind(mod, {"modulation-variance"},
                set_double(&opt->modulation_variance));
    auto* seed = sub->add_option("--seed", opt->seed, "Random seed")
                     ->capture_default_str();
    merge->bind(seed, {"seed"}, set_uint64(&opt->seed));
    auto* inj = sub->add_flag("--inject-error", opt->inject_error,
                              "Tilt the mirror so the cancellation check "
                              "must fail");
    merge->bind(inj, {"inject-error"}, set_bool(&opt->inject_error));
    add_common(sub, *merge);
    sub->callback([&, opt, merge]() {
      merge->run();
      const OutputOptions io{!no_timestamp};
      auto csv = open_output(out_dir, "dpm_verify.csv");
      status = run_dpm_verify(*opt, io, csv, std::cout);
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const mdicv::convention_violation_error& e) {
    std::cerr << "self-check failure: " << e.what() << "\n";
    return kExitSelfCheck;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return status;
}
