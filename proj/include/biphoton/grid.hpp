#pragma once

#include <vector>

#include "biphoton/common.hpp"

namespace biphoton {

/// Symmetric detuning grid, stored in DFT order.
///
/// Index i maps to detuning (i <= n/2 ? i : i - n) * resolution, so the array
/// layout is directly usable by the discrete Fourier transform. The matching
/// time axis has the same layout with step 1/span (microseconds).
struct FrequencyGrid {
  double span_mhz = 16384.0;
  int n_points = 1 << 17;

  double resolution_mhz() const { return span_mhz / n_points; }
  double dt_us() const { return 1.0 / span_mhz; }
  double time_window_us() const { return n_points / span_mhz; }

  double detuning_mhz(int i) const {
    const int k = i <= n_points / 2 ? i : i - n_points;
    return k * resolution_mhz();
  }
  double time_us(int i) const {
    const int k = i <= n_points / 2 ? i : i - n_points;
    return k * dt_us();
  }

  /// Detuning axis as an Eigen array (DFT order).
  ArrayXd detunings() const;

  /// Index permutation that walks the grid in ascending detuning order.
  std::vector<int> ascending_order() const;

  /// Nearest grid index for a detuning (DFT order).
  int index_of(double detuning_mhz) const;

  bool operator==(const FrequencyGrid&) const = default;
};

inline bool is_power_of_two(long n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace biphoton
