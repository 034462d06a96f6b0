#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "biphoton/common.hpp"

namespace biphoton {

/// Atomic level: detuning from its manifold reference and total population
/// decay rate, both as ordinary frequencies in MHz (FWHM convention).
struct Level {
  std::string label;
  double energy_offset_mhz = 0.0;
  double population_decay_rate_mhz = 0.0;

  bool operator==(const Level&) const = default;
};

/// Radiative link (upper -> lower) with a relative dipole amplitude.
/// Amplitudes set decay branching ratios (|amp|^2) and probe coupling weights.
struct Transition {
  std::string upper;
  std::string lower;
  cplx amplitude = 1.0;

  bool operator==(const Transition&) const = default;
};

struct TransitionRef {
  std::string upper;
  std::string lower;

  bool operator==(const TransitionRef&) const = default;
};

struct LevelScheme {
  std::string label;
  std::vector<Level> levels;
  std::vector<Transition> transitions;

  int index_of(const std::string& level_label) const {
    for (std::size_t i = 0; i < levels.size(); ++i)
      if (levels[i].label == level_label) return static_cast<int>(i);
    return -1;
  }
  const Level* find(const std::string& level_label) const {
    const int i = index_of(level_label);
    return i < 0 ? nullptr : &levels[i];
  }

  bool operator==(const LevelScheme&) const = default;
};

struct PumpField {
  double detuning_mhz = 0.0;
  double rabi_mhz = 0.0;
  double wavelength_nm = 795.0;
  Vector3d direction{0.0, 0.0, 1.0};

  bool operator==(const PumpField& o) const {
    return detuning_mhz == o.detuning_mhz && rabi_mhz == o.rabi_mhz &&
           wavelength_nm == o.wavelength_nm && direction.x() == o.direction.x() &&
           direction.y() == o.direction.y() && direction.z() == o.direction.z();
  }
};

/// Coplanar beam angles (degrees) and the four wavelengths, ordered as
/// (pump1, pump2, first photon, second photon).
struct BeamGeometry {
  double theta1_deg = 2.0;
  double theta2_deg = 0.7;
  double theta3_deg = 2.7;
  std::array<double, 4> wavelengths_nm{795.0, 1324.0, 1367.0, 780.0};

  bool operator==(const BeamGeometry&) const = default;
};

}  // namespace biphoton
