#pragma once

#include <string>
#include <vector>

#include "biphoton/pair.hpp"

namespace biphoton {

/// One named configuration of the full pipeline. All fields are mirrored
/// one-to-one by the config file format (format_version 1).
struct Scenario {
  std::string name;
  FrequencyGrid grid;
  BiphotonSpec source;
  std::vector<PumpField> pumps;  ///< drive fields, (795-nm, 1324-nm) order
  BeamGeometry geometry;
  FilterSpec filter;
  MotionalParams motional;
  double detector_bin_ns = 1.0;
  std::pair<double, double> fit_window_ns{3.0, 45.0};

  bool operator==(const Scenario&) const = default;
};

struct Violation {
  std::string path;     ///< dotted path to the offending field
  std::string message;
};

/// Empty iff every type invariant holds; violations are data, not faults.
std::vector<Violation> validate_scenario(const Scenario& s);

/// The named builtin scenarios:
///   off_resonant      red-detuned pump, two-level Doppler filter
///   on_resonant       resonant pump, driven multilevel filter, two paths
///   on_resonant_776   one decay path removed by the coupling laser
///   filter_width_scan off-resonant base for the extra-cell width scan
///   od_scan           off-resonant base for the optical-depth scan
std::vector<Scenario> builtin_scenarios();

/// Builtin by name, or nullopt-like failure via the bool.
bool find_builtin(const std::string& name, Scenario& out);
std::vector<std::string> builtin_names();

}  // namespace biphoton
