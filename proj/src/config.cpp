#include "biphoton/config.hpp"

#include <fstream>

namespace biphoton {

namespace {

constexpr int kFormatVersion = 1;

json complex_to_json(const cplx& c) { return json::array({c.real(), c.imag()}); }

cplx complex_from_json(const json& j) {
  if (j.is_number()) return cplx(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2) return cplx(j[0].get<double>(), j[1].get<double>());
  throw std::invalid_argument("expected a number or [re, im] pair");
}

json pump_to_json(const PumpField& p) {
  return json{{"detuning_mhz", p.detuning_mhz},
              {"rabi_mhz", p.rabi_mhz},
              {"wavelength_nm", p.wavelength_nm},
              {"direction", {p.direction.x(), p.direction.y(), p.direction.z()}}};
}

PumpField pump_from_json(const json& j) {
  PumpField p;
  p.detuning_mhz = j.at("detuning_mhz").get<double>();
  p.rabi_mhz = j.at("rabi_mhz").get<double>();
  p.wavelength_nm = j.at("wavelength_nm").get<double>();
  const auto& d = j.at("direction");
  p.direction = Vector3d{d.at(0).get<double>(), d.at(1).get<double>(), d.at(2).get<double>()};
  return p;
}

json scheme_to_json(const LevelScheme& s) {
  json levels = json::array();
  for (const auto& lv : s.levels)
    levels.push_back(json{{"label", lv.label},
                          {"energy_offset_mhz", lv.energy_offset_mhz},
                          {"population_decay_rate_mhz", lv.population_decay_rate_mhz}});
  json transitions = json::array();
  for (const auto& tr : s.transitions)
    transitions.push_back(
        json{{"upper", tr.upper}, {"lower", tr.lower}, {"amplitude", complex_to_json(tr.amplitude)}});
  return json{{"label", s.label}, {"levels", levels}, {"transitions", transitions}};
}

LevelScheme scheme_from_json(const json& j) {
  LevelScheme s;
  s.label = j.at("label").get<std::string>();
  for (const auto& lv : j.at("levels"))
    s.levels.push_back(Level{lv.at("label").get<std::string>(),
                             lv.at("energy_offset_mhz").get<double>(),
                             lv.at("population_decay_rate_mhz").get<double>()});
  for (const auto& tr : j.at("transitions"))
    s.transitions.push_back(Transition{tr.at("upper").get<std::string>(),
                                       tr.at("lower").get<std::string>(),
                                       complex_from_json(tr.at("amplitude"))});
  return s;
}

json driven_to_json(const DrivenSystemSpec& d) {
  return json{{"scheme", scheme_to_json(d.scheme)},
              {"pump", pump_to_json(d.pump)},
              {"pump_transition", {{"upper", d.pump_transition.upper}, {"lower", d.pump_transition.lower}}},
              {"probe_transition", {{"upper", d.probe_transition.upper}, {"lower", d.probe_transition.lower}}},
              {"pump_k_over_probe_k", d.pump_k_over_probe_k},
              {"probe_wavelength_nm", d.probe_wavelength_nm},
              {"ground_relaxation_mhz", d.ground_relaxation_mhz}};
}

DrivenSystemSpec driven_from_json(const json& j) {
  DrivenSystemSpec d;
  d.scheme = scheme_from_json(j.at("scheme"));
  d.pump = pump_from_json(j.at("pump"));
  d.pump_transition = {j.at("pump_transition").at("upper").get<std::string>(),
                       j.at("pump_transition").at("lower").get<std::string>()};
  d.probe_transition = {j.at("probe_transition").at("upper").get<std::string>(),
                        j.at("probe_transition").at("lower").get<std::string>()};
  d.pump_k_over_probe_k = j.at("pump_k_over_probe_k").get<double>();
  d.probe_wavelength_nm = j.at("probe_wavelength_nm").get<double>();
  d.ground_relaxation_mhz = j.at("ground_relaxation_mhz").get<double>();
  return d;
}

}  // namespace

json scenario_to_json(const Scenario& s) {
  json paths = json::array();
  for (const auto& p : s.source.paths)
    paths.push_back(json{{"center_detuning_mhz", p.center_detuning_mhz},
                         {"amplitude", complex_to_json(p.amplitude)},
                         {"linewidth_mhz", p.linewidth_mhz}});
  json pumps = json::array();
  for (const auto& p : s.pumps) pumps.push_back(pump_to_json(p));

  json filter = json{{"model", to_string(s.filter.model)},
                     {"od", s.filter.od},
                     {"linewidth_mhz", s.filter.linewidth_mhz},
                     {"v_t_mps", s.filter.v_t_mps},
                     {"center_detuning_mhz", s.filter.center_detuning_mhz},
                     {"wavelength_nm", s.filter.wavelength_nm}};
  if (s.filter.driven) filter["driven"] = driven_to_json(*s.filter.driven);

  return json{{"format_version", kFormatVersion},
              {"name", s.name},
              {"grid", {{"span_mhz", s.grid.span_mhz}, {"n_points", s.grid.n_points}}},
              {"source",
               {{"paths", paths},
                {"upper_linewidth_mhz", s.source.upper_linewidth_mhz},
                {"two_photon_detuning_mhz", s.source.two_photon_detuning_mhz}}},
              {"pumps", pumps},
              {"geometry",
               {{"theta1_deg", s.geometry.theta1_deg},
                {"theta2_deg", s.geometry.theta2_deg},
                {"theta3_deg", s.geometry.theta3_deg},
                {"wavelengths_nm", s.geometry.wavelengths_nm}}},
              {"filter", filter},
              {"motional",
               {{"v_t_mps", s.motional.v_t_mps}, {"wavelength_nm", s.motional.wavelength_nm}}},
              {"detector_bin_ns", s.detector_bin_ns},
              {"fit_window_ns", {s.fit_window_ns.first, s.fit_window_ns.second}}};
}

Scenario scenario_from_json(const json& j) {
  if (!j.contains("format_version"))
    throw std::invalid_argument("config: missing mandatory format_version");
  if (j.at("format_version").get<int>() != kFormatVersion)
    throw std::invalid_argument("config: unsupported format_version");

  Scenario s;
  s.name = j.at("name").get<std::string>();
  s.grid.span_mhz = j.at("grid").at("span_mhz").get<double>();
  s.grid.n_points = j.at("grid").at("n_points").get<int>();

  const auto& src = j.at("source");
  for (const auto& p : src.at("paths"))
    s.source.paths.push_back(DecayPath{p.at("center_detuning_mhz").get<double>(),
                                       complex_from_json(p.at("amplitude")),
                                       p.at("linewidth_mhz").get<double>()});
  s.source.upper_linewidth_mhz = src.at("upper_linewidth_mhz").get<double>();
  s.source.two_photon_detuning_mhz = src.at("two_photon_detuning_mhz").get<double>();

  for (const auto& p : j.at("pumps")) s.pumps.push_back(pump_from_json(p));

  const auto& g = j.at("geometry");
  s.geometry.theta1_deg = g.at("theta1_deg").get<double>();
  s.geometry.theta2_deg = g.at("theta2_deg").get<double>();
  s.geometry.theta3_deg = g.at("theta3_deg").get<double>();
  for (int i = 0; i < 4; ++i) s.geometry.wavelengths_nm[i] = g.at("wavelengths_nm").at(i).get<double>();

  const auto& f = j.at("filter");
  const auto model = filter_model_from_string(f.at("model").get<std::string>());
  if (!model) throw std::invalid_argument("config: unknown filter model");
  s.filter.model = *model;
  s.filter.od = f.at("od").get<double>();
  s.filter.linewidth_mhz = f.at("linewidth_mhz").get<double>();
  s.filter.v_t_mps = f.at("v_t_mps").get<double>();
  s.filter.center_detuning_mhz = f.at("center_detuning_mhz").get<double>();
  s.filter.wavelength_nm = f.at("wavelength_nm").get<double>();
  if (f.contains("driven")) s.filter.driven = driven_from_json(f.at("driven"));

  s.motional.v_t_mps = j.at("motional").at("v_t_mps").get<double>();
  s.motional.wavelength_nm = j.at("motional").at("wavelength_nm").get<double>();
  s.detector_bin_ns = j.at("detector_bin_ns").get<double>();
  s.fit_window_ns = {j.at("fit_window_ns").at(0).get<double>(),
                     j.at("fit_window_ns").at(1).get<double>()};
  return s;
}

void save_scenario(const Scenario& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << scenario_to_json(s).dump(2) << "\n";
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  json j;
  in >> j;
  return scenario_from_json(j);
}

void apply_override(Scenario& s, const std::string& expression) {
  const auto eq = expression.find('=');
  if (eq == std::string::npos || eq == 0)
    throw std::invalid_argument("override must look like path.to.field=value: " + expression);
  std::string path = expression.substr(0, eq);
  const std::string raw = expression.substr(eq + 1);

  // dotted path with optional [i] indices -> JSON pointer
  std::string norm = "/";
  for (char c : path) {
    if (c == '.' || c == '[') norm += '/';
    else if (c == ']') continue;
    else norm += c;
  }

  json tree = scenario_to_json(s);
  const json::json_pointer ptr(norm);
  if (!tree.contains(ptr)) throw std::invalid_argument("unknown override path: " + path);

  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;  // plain string
  }
  tree[ptr] = value;
  s = scenario_from_json(tree);
}

}  // namespace biphoton
