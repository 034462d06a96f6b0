#include "biphoton/scenario.hpp"

#include <cmath>

namespace biphoton {

namespace {

void check_finite(double x, const std::string& path, std::vector<Violation>& out) {
  if (!std::isfinite(x)) out.push_back({path, "value is not finite"});
}

void validate_level_scheme(const LevelScheme& s, const std::string& path,
                           std::vector<Violation>& out) {
  if (s.transitions.empty()) out.push_back({path + ".transitions", "at least one transition required"});
  for (std::size_t i = 0; i < s.levels.size(); ++i) {
    const auto& lv = s.levels[i];
    const std::string p = path + ".levels[" + std::to_string(i) + "]";
    check_finite(lv.energy_offset_mhz, p + ".energy_offset_mhz", out);
    if (!(lv.population_decay_rate_mhz >= 0.0))
      out.push_back({p + ".population_decay_rate_mhz", "must be >= 0"});
  }
  for (std::size_t i = 0; i < s.transitions.size(); ++i) {
    const auto& tr = s.transitions[i];
    const std::string p = path + ".transitions[" + std::to_string(i) + "]";
    if (s.index_of(tr.upper) < 0) out.push_back({p + ".upper", "unknown level '" + tr.upper + "'"});
    if (s.index_of(tr.lower) < 0) out.push_back({p + ".lower", "unknown level '" + tr.lower + "'"});
    if (!std::isfinite(tr.amplitude.real()) || !std::isfinite(tr.amplitude.imag()))
      out.push_back({p + ".amplitude", "amplitude is not finite"});
  }
}

void validate_pump(const PumpField& p, const std::string& path, std::vector<Violation>& out) {
  if (!(p.rabi_mhz >= 0.0)) out.push_back({path + ".rabi_mhz", "must be >= 0"});
  check_finite(p.detuning_mhz, path + ".detuning_mhz", out);
  if (!(p.wavelength_nm > 0.0)) out.push_back({path + ".wavelength_nm", "must be > 0"});
  if (std::abs(p.direction.norm() - 1.0) > 1e-12)
    out.push_back({path + ".direction", "must be a unit vector within 1e-12"});
}

void validate_driven(const DrivenSystemSpec& d, const std::string& path,
                     std::vector<Violation>& out) {
  validate_level_scheme(d.scheme, path + ".scheme", out);
  validate_pump(d.pump, path + ".pump", out);
  auto has_transition = [&](const TransitionRef& r) {
    for (const auto& tr : d.scheme.transitions)
      if (tr.upper == r.upper && tr.lower == r.lower) return true;
    return false;
  };
  if (!has_transition(d.probe_transition))
    out.push_back({path + ".probe_transition", "not a transition of the scheme"});
  if (!has_transition(d.pump_transition))
    out.push_back({path + ".pump_transition", "not a transition of the scheme"});
  if (d.pump_transition == d.probe_transition)
    out.push_back({path + ".pump_transition", "must differ from the probe transition"});
  if (!(d.pump_k_over_probe_k > 0.0)) out.push_back({path + ".pump_k_over_probe_k", "must be > 0"});
  if (!(d.probe_wavelength_nm > 0.0)) out.push_back({path + ".probe_wavelength_nm", "must be > 0"});
  if (!(d.ground_relaxation_mhz >= 0.0))
    out.push_back({path + ".ground_relaxation_mhz", "must be >= 0"});
}

}  // namespace

std::vector<Violation> validate_scenario(const Scenario& s) {
  std::vector<Violation> out;

  if (!is_power_of_two(s.grid.n_points) || s.grid.n_points < (1 << 14))
    out.push_back({"grid.n_points", "must be a power of two and >= 16384"});
  if (!(s.grid.span_mhz > 0.0)) out.push_back({"grid.span_mhz", "must be > 0"});

  if (s.source.paths.empty()) out.push_back({"source.paths", "at least one decay path required"});
  for (std::size_t i = 0; i < s.source.paths.size(); ++i) {
    const auto& p = s.source.paths[i];
    const std::string path = "source.paths[" + std::to_string(i) + "]";
    if (!(p.linewidth_mhz > 0.0)) out.push_back({path + ".linewidth_mhz", "must be > 0"});
    check_finite(p.center_detuning_mhz, path + ".center_detuning_mhz", out);
    if (!std::isfinite(p.amplitude.real()) || !std::isfinite(p.amplitude.imag()))
      out.push_back({path + ".amplitude", "amplitude is not finite"});
  }
  if (!(s.source.upper_linewidth_mhz > 0.0))
    out.push_back({"source.upper_linewidth_mhz", "must be > 0"});
  check_finite(s.source.two_photon_detuning_mhz, "source.two_photon_detuning_mhz", out);

  for (std::size_t i = 0; i < s.pumps.size(); ++i)
    validate_pump(s.pumps[i], "pumps[" + std::to_string(i) + "]", out);

  auto angle_ok = [](double a) { return a >= 0.0 && a < 90.0; };
  if (!angle_ok(s.geometry.theta1_deg)) out.push_back({"geometry.theta1_deg", "must be in [0, 90)"});
  if (!angle_ok(s.geometry.theta2_deg)) out.push_back({"geometry.theta2_deg", "must be in [0, 90)"});
  if (!angle_ok(s.geometry.theta3_deg)) out.push_back({"geometry.theta3_deg", "must be in [0, 90)"});
  for (int i = 0; i < 4; ++i)
    if (!(s.geometry.wavelengths_nm[i] > 0.0))
      out.push_back({"geometry.wavelengths_nm[" + std::to_string(i) + "]", "must be > 0"});

  if (!(s.filter.od >= 0.0)) out.push_back({"filter.od", "must be >= 0"});
  if (s.filter.model != FilterModel::none && !(s.filter.linewidth_mhz > 0.0))
    out.push_back({"filter.linewidth_mhz", "must be > 0"});
  if (!(s.filter.v_t_mps >= 0.0)) out.push_back({"filter.v_t_mps", "must be >= 0"});
  if (!(s.filter.wavelength_nm > 0.0)) out.push_back({"filter.wavelength_nm", "must be > 0"});
  check_finite(s.filter.center_detuning_mhz, "filter.center_detuning_mhz", out);
  if (s.filter.model == FilterModel::driven_multilevel && !s.filter.driven)
    out.push_back({"filter.driven", "required for the driven_multilevel model"});
  if (s.filter.model != FilterModel::driven_multilevel && s.filter.driven)
    out.push_back({"filter.driven", "only allowed for the driven_multilevel model"});
  if (s.filter.driven) validate_driven(*s.filter.driven, "filter.driven", out);

  if (!(s.motional.v_t_mps >= 0.0)) out.push_back({"motional.v_t_mps", "must be >= 0"});
  if (!(s.motional.wavelength_nm > 0.0)) out.push_back({"motional.wavelength_nm", "must be > 0"});

  if (!(s.detector_bin_ns > 0.0)) out.push_back({"detector_bin_ns", "must be > 0"});
  if (!(s.fit_window_ns.first < s.fit_window_ns.second))
    out.push_back({"fit_window_ns", "window start must precede end"});

  return out;
}

namespace {

// Operating point shared by the builtins: 100 C cell (most-probable speed
// 270 m/s), 6.05-MHz intermediate lines, 1-ns detector bins.
constexpr double kSourceLinewidth = 6.05;
constexpr double kCellVt = 270.0;
constexpr double kHyperfineSplit = 120.6;
constexpr double kGroundSplit = 3035.7;  // config value, not asserted physics

Vector3d beam_dir(double theta_deg) {
  const double th = theta_deg * pi / 180.0;
  return Vector3d{std::sin(th), 0.0, std::cos(th)};
}

Scenario off_resonant_base() {
  Scenario s;
  s.name = "off_resonant";
  s.grid = FrequencyGrid{16384.0, 1 << 17};
  s.source.paths = {DecayPath{0.0, cplx(1.0, 0.0), kSourceLinewidth}};
  s.source.upper_linewidth_mhz = 8.0;
  s.source.two_photon_detuning_mhz = 0.0;
  s.pumps = {PumpField{-1500.0, 0.0, 795.0, beam_dir(2.0)},
             PumpField{1500.0, 0.0, 1324.0, beam_dir(0.7)}};
  s.geometry = BeamGeometry{};
  s.filter.model = FilterModel::two_level_doppler;
  s.filter.od = 10.0;
  s.filter.linewidth_mhz = kSourceLinewidth;
  s.filter.v_t_mps = kCellVt;
  s.filter.center_detuning_mhz = 0.0;
  s.filter.wavelength_nm = 780.0;
  s.motional = MotionalParams{6.6, 780.0};
  s.detector_bin_ns = 1.0;
  s.fit_window_ns = {3.0, 45.0};
  return s;
}

DrivenSystemSpec driven_vee() {
  DrivenSystemSpec d;
  d.scheme.label = "driven_vee_85";
  d.scheme.levels = {Level{"g1", 0.0, 0.0},
                     Level{"g2", -kGroundSplit, 0.0},
                     Level{"p", 0.0, 5.75},
                     Level{"e1", -kHyperfineSplit / 2.0, kSourceLinewidth},
                     Level{"e2", kHyperfineSplit / 2.0, kSourceLinewidth}};
  d.scheme.transitions = {Transition{"e1", "g1", 1.0}, Transition{"e2", "g1", 1.0},
                          Transition{"e1", "g2", 1.0}, Transition{"e2", "g2", 1.0},
                          Transition{"p", "g1", 1.0},  Transition{"p", "g2", 1.0}};
  d.pump = PumpField{0.0, 110.0, 795.0, beam_dir(2.0)};
  d.pump_transition = TransitionRef{"p", "g1"};
  d.probe_transition = TransitionRef{"e1", "g1"};
  d.pump_k_over_probe_k = 780.0 / 795.0;
  d.probe_wavelength_nm = 780.0;
  d.ground_relaxation_mhz = 0.1;
  return d;
}

Scenario on_resonant_base() {
  Scenario s = off_resonant_base();
  s.name = "on_resonant";
  s.source.paths = {DecayPath{-kHyperfineSplit / 2.0, cplx(1.0, 0.0), kSourceLinewidth},
                    DecayPath{kHyperfineSplit / 2.0, cplx(1.0, 0.0), kSourceLinewidth}};
  s.source.two_photon_detuning_mhz = 100.0;
  s.pumps[0] = PumpField{0.0, 110.0, 795.0, beam_dir(2.0)};
  s.pumps[1] = PumpField{100.0, 0.0, 1324.0, beam_dir(0.7)};
  s.filter.model = FilterModel::driven_multilevel;
  s.filter.od = 10.0;
  s.filter.driven = driven_vee();
  return s;
}

}  // namespace

std::vector<Scenario> builtin_scenarios() {
  std::vector<Scenario> out;
  out.push_back(off_resonant_base());
  out.push_back(on_resonant_base());

  Scenario s776 = on_resonant_base();
  s776.name = "on_resonant_776";
  s776.source.paths[1].amplitude = 0.0;  // coupling laser removes this path
  out.push_back(s776);

  Scenario fw = off_resonant_base();
  fw.name = "filter_width_scan";
  out.push_back(fw);

  Scenario od = off_resonant_base();
  od.name = "od_scan";
  od.motional.v_t_mps = 0.0;  // isolate the filter effect on the trace width
  out.push_back(od);
  return out;
}

bool find_builtin(const std::string& name, Scenario& out) {
  for (auto& s : builtin_scenarios())
    if (s.name == name) {
      out = s;
      return true;
    }
  return false;
}

std::vector<std::string> builtin_names() {
  std::vector<std::string> names;
  for (const auto& s : builtin_scenarios()) names.push_back(s.name);
  return names;
}

}  // namespace biphoton
