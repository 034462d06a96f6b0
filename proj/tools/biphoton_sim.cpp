// biphoton-sim: runs biphoton cross-correlation scenarios and parameter
// scans, writing plot-ready CSV/JSON artifacts.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "biphoton/analysis.hpp"
#include "biphoton/config.hpp"
#include "biphoton/csv.hpp"
#include "biphoton/threading.hpp"

namespace fs = std::filesystem;
using namespace biphoton;

namespace {

constexpr const char* kToolVersion = "0.1.0";
constexpr std::pair<double, double> kSpectrumWindowNs{0.0, 256.0};

enum ExitCode { kOk = 0, kUnknownScenario = 2, kInvalidConfig = 3, kNumericFailure = 4 };

struct CommonOptions {
  std::string out_dir = "results";
  std::vector<std::string> overrides;
  int grid_points = 0;
  double span_mhz = 0.0;
  std::string format = "csv";
};

int resolve_scenario(const std::string& ref, Scenario& out) {
  if (fs::exists(ref)) {
    try {
      out = load_scenario_file(ref);
      return kOk;
    } catch (const std::exception& e) {
      std::cerr << "error: invalid config '" << ref << "': " << e.what() << "\n";
      return kInvalidConfig;
    }
  }
  if (find_builtin(ref, out)) return kOk;
  std::cerr << "error: unknown scenario '" << ref << "'. Available builtins:\n";
  for (const auto& name : builtin_names()) std::cerr << "  " << name << "\n";
  return kUnknownScenario;
}

int apply_options(Scenario& s, const CommonOptions& opt) {
  try {
    if (opt.grid_points > 0) s.grid.n_points = opt.grid_points;
    if (opt.span_mhz > 0.0) s.grid.span_mhz = opt.span_mhz;
    for (const auto& o : opt.overrides) apply_override(s, o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalidConfig;
  }
  const auto violations = validate_scenario(s);
  if (!violations.empty()) {
    std::cerr << "error: scenario is invalid:\n";
    for (const auto& v : violations) std::cerr << "  " << v.path << ": " << v.message << "\n";
    return kInvalidConfig;
  }
  return kOk;
}

json trace_to_json(const CorrelationTrace& t) {
  return json{{"bin_ns", t.bin_ns}, {"delays_ns", t.delays_ns}, {"values", t.values}};
}

json fit_to_json(const FitResult& f) {
  return json{{"y0", f.y0},
              {"a1", f.a1},
              {"a2", f.a2},
              {"f_mhz", f.f_mhz},
              {"phi_rad", f.phi_rad},
              {"tau_ns", f.tau_ns},
              {"param_uncertainties", f.param_uncertainties},
              {"reduced_chi2", f.reduced_chi2},
              {"converged", f.converged},
              {"n_iterations", f.n_iterations}};
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
}

void write_manifest(const std::string& path, const Scenario& s,
                    const std::vector<std::string>& artifacts, double seconds) {
  json m{{"format_version", 1},
         {"tool_version", kToolVersion},
         {"scenario", scenario_to_json(s)},
         {"artifacts", artifacts},
         {"duration_seconds", seconds}};
  write_json_file(path, m);
}

double natural_tau_ns(const BiphotonSpec& source) {
  double lw = source.paths.empty() ? 6.05 : source.paths.front().linewidth_mhz;
  return 1e3 / (two_pi * lw);
}

int cmd_run(const std::string& scenario_ref, const CommonOptions& opt) {
  Scenario s;
  if (int rc = resolve_scenario(scenario_ref, s)) return rc;
  if (int rc = apply_options(s, opt)) return rc;

  const auto start = std::chrono::steady_clock::now();
  fs::create_directories(opt.out_dir);
  const std::string echo = scenario_to_json(s).dump();
  std::vector<std::string> artifacts;

  try {
    FilterTransmission t = build_transmission(s.filter, s.grid);
    if (t.gain_detected)
      std::cerr << "note: filter shows gain (max |t| = " << t.max_abs_t << "), not clamped\n";
    const ArrayXcd psi = pair_amplitude(s.source, t);
    const CorrelationTrace trace = ccf(psi, s.grid, s.motional, s.detector_bin_ns);
    const BeatSpectrum spectrum = beat_spectrum(trace, kSpectrumWindowNs);
    const FitResult fit = fit_decaying_beat(trace, s.fit_window_ns);
    const MotionalFitResult mfit =
        fit_motional(trace, s.fit_window_ns, natural_tau_ns(s.source), s.motional.wavelength_nm);

    const std::vector<std::string> meta{"scenario " + echo};
    auto out_path = [&](const std::string& base) { return (fs::path(opt.out_dir) / base).string(); };

    if (opt.format == "json") {
      json jt = trace_to_json(trace);
      jt["scenario"] = scenario_to_json(s);
      write_json_file(out_path("trace.json"), jt);
      artifacts.push_back(out_path("trace.json"));

      json tr{{"detuning_mhz", json::array()},
              {"re_t", json::array()},
              {"im_t", json::array()},
              {"intensity_transmission", json::array()},
              {"scenario", scenario_to_json(s)}};
      for (int i : s.grid.ascending_order()) {
        tr["detuning_mhz"].push_back(s.grid.detuning_mhz(i));
        tr["re_t"].push_back(t.t_values[i].real());
        tr["im_t"].push_back(t.t_values[i].imag());
        tr["intensity_transmission"].push_back(std::norm(t.t_values[i]));
      }
      write_json_file(out_path("transmission.json"), tr);
      artifacts.push_back(out_path("transmission.json"));

      write_json_file(out_path("spectrum.json"),
                      json{{"freqs_mhz", spectrum.freqs_mhz},
                           {"power", spectrum.power},
                           {"peak_freq_mhz", spectrum.peak_freq_mhz},
                           {"peak_power", spectrum.peak_power},
                           {"scenario", scenario_to_json(s)}});
      artifacts.push_back(out_path("spectrum.json"));
    } else {
      write_trace_csv(out_path("trace.csv"), trace, meta);
      artifacts.push_back(out_path("trace.csv"));
      write_transmission_csv(out_path("transmission.csv"), t, meta);
      artifacts.push_back(out_path("transmission.csv"));
      write_spectrum_csv(out_path("spectrum.csv"), spectrum.freqs_mhz, spectrum.power, meta);
      artifacts.push_back(out_path("spectrum.csv"));
    }

    json jfit = fit_to_json(fit);
    jfit["motional_fit"] = json{{"v_t_mps", mfit.v_t_mps},
                                {"reduced_chi2", mfit.reduced_chi2},
                                {"converged", mfit.converged},
                                {"natural_tau_ns", natural_tau_ns(s.source)}};
    jfit["beat_peak_mhz"] = spectrum.peak_freq_mhz;
    jfit["scenario"] = scenario_to_json(s);
    write_json_file(out_path("fit.json"), jfit);
    artifacts.push_back(out_path("fit.json"));

    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(out_path("manifest.json"), s, artifacts, seconds);

    std::cout << "scenario        " << s.name << "\n";
    std::cout << "filter width    " << format_double(t.bandwidth_50pct_mhz) << " MHz\n";
    std::cout << "zero-delay bin  "
              << format_double(trace.values[trace.index_of_delay(0.0)]) << "\n";
    std::cout << "beat peak       " << format_double(spectrum.peak_freq_mhz) << " MHz\n";
    std::cout << "fit tau         " << format_double(fit.tau_ns)
              << " ns (converged=" << (fit.converged ? "yes" : "no") << ")\n";
    std::cout << "motional v_t    " << format_double(mfit.v_t_mps) << " m/s\n";
    std::cout << "artifacts in    " << opt.out_dir << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: numeric failure while running '" << s.name << "': " << e.what() << "\n";
    return kNumericFailure;
  }
  return kOk;
}

int cmd_scan(const std::string& kind, const std::string& scenario_ref,
             const std::string& values_csv, const CommonOptions& opt, double od_cap) {
  if (kind != "od" && kind != "filter_width") {
    std::cerr << "error: scan kind must be od or filter_width\n";
    return kInvalidConfig;
  }
  std::vector<double> values;
  std::stringstream ss(values_csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      values.push_back(std::stod(item));
    } catch (const std::exception&) {
      std::cerr << "error: bad scan value '" << item << "'\n";
      return kInvalidConfig;
    }
  }
  if (values.empty()) {
    std::cerr << "error: scan needs a non-empty comma-separated value list\n";
    return kInvalidConfig;
  }

  Scenario s;
  if (int rc = resolve_scenario(scenario_ref, s)) return rc;
  if (int rc = apply_options(s, opt)) return rc;

  const auto start = std::chrono::steady_clock::now();
  fs::create_directories(opt.out_dir);
  const std::string echo = scenario_to_json(s).dump();
  const std::vector<std::string> meta{"scenario " + echo};
  std::vector<std::string> artifacts;
  auto out_path = [&](const std::string& base) { return (fs::path(opt.out_dir) / base).string(); };

  try {
    std::ofstream summary(out_path("summary.csv"));
    summary << "# scenario " << echo << "\n";
    std::vector<std::pair<double, CorrelationTrace>> traces;

    if (kind == "od") {
      summary << "od,equivalent_width_ns\n";
      for (const auto& pt : scan_od(s, values)) {
        summary << format_double(pt.od) << "," << format_double(pt.equivalent_width_ns) << "\n";
        traces.push_back({pt.od, pt.trace});
      }
    } else {
      summary << "width_mhz,zero_delay,od,reachable\n";
      for (const auto& pt : scan_filter_width(s, values, od_cap)) {
        summary << format_double(pt.width_mhz) << "," << format_double(pt.zero_delay) << ","
                << format_double(pt.od) << "," << (pt.reachable ? 1 : 0) << "\n";
        if (pt.reachable) traces.push_back({pt.width_mhz, pt.trace});
      }
    }
    summary.close();
    artifacts.push_back(out_path("summary.csv"));

    for (std::size_t i = 0; i < traces.size(); ++i) {
      const std::string name = "trace_" + std::to_string(i) + ".csv";
      write_trace_csv(out_path(name), traces[i].second,
                      {"scan point value " + format_double(traces[i].first), "scenario " + echo});
      artifacts.push_back(out_path(name));
    }

    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(out_path("manifest.json"), s, artifacts, seconds);
    std::cout << "scan " << kind << " over " << values.size() << " points; artifacts in "
              << opt.out_dir << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: numeric failure during scan: " << e.what() << "\n";
    return kNumericFailure;
  }
  return kOk;
}

int cmd_validate(const std::string& scenario_ref, const CommonOptions& opt) {
  Scenario s;
  if (int rc = resolve_scenario(scenario_ref, s)) return rc;
  try {
    for (const auto& o : opt.overrides) apply_override(s, o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalidConfig;
  }
  const auto violations = validate_scenario(s);
  if (violations.empty()) {
    std::cout << "ok: scenario '" << s.name << "' is valid\n";
    return kOk;
  }
  std::cout << violations.size() << " violation(s):\n";
  for (const auto& v : violations) std::cout << "  " << v.path << ": " << v.message << "\n";
  return kInvalidConfig;
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* env = std::getenv("BIPHOTON_SIM_THREADS")) {
    try {
      set_max_threads(std::stoi(env));
    } catch (const std::exception&) {
      std::cerr << "warning: ignoring invalid BIPHOTON_SIM_THREADS\n";
    }
  }

  CLI::App app{"biphoton cross-correlation simulator"};
  app.require_subcommand(1);

  CommonOptions opt;
  std::string scenario_ref, scan_kind, scan_values;
  double od_cap = 50.0;

  auto add_common = [&](CLI::App* cmd, bool with_output) {
    cmd->add_option("--set", opt.overrides, "dotted-path override key=value")->take_all();
    if (with_output) {
      cmd->add_option("--out", opt.out_dir, "output directory");
      cmd->add_option("--grid-points", opt.grid_points, "override grid n_points");
      cmd->add_option("--span-mhz", opt.span_mhz, "override grid span");
      cmd->add_option("--format", opt.format, "csv|json")
          ->check(CLI::IsMember({"csv", "json"}));
    }
  };

  auto* run = app.add_subcommand("run", "run a scenario end to end");
  run->add_option("scenario", scenario_ref, "builtin name or config file")->required();
  add_common(run, true);

  auto* scan = app.add_subcommand("scan", "parameter scan around a base scenario");
  scan->add_option("kind", scan_kind, "od | filter_width")->required();
  scan->add_option("scenario", scenario_ref, "builtin name or config file")->required();
  scan->add_option("values", scan_values, "comma-separated scan values")->required();
  scan->add_option("--od-cap", od_cap, "optical-depth cap for width bisection");
  add_common(scan, true);

  auto* validate = app.add_subcommand("validate", "check a scenario against its invariants");
  validate->add_option("scenario", scenario_ref, "builtin name or config file")->required();
  add_common(validate, false);

  auto* list = app.add_subcommand("list-scenarios", "list builtin scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? kInvalidConfig : kOk;
  }

  if (run->parsed()) return cmd_run(scenario_ref, opt);
  if (scan->parsed()) return cmd_scan(scan_kind, scenario_ref, scan_values, opt, od_cap);
  if (validate->parsed()) return cmd_validate(scenario_ref, opt);
  if (list->parsed()) {
    for (const auto& name : builtin_names()) std::cout << name << "\n";
    return kOk;
  }
  return kOk;
}
