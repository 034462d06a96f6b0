#include "biphoton/grid.hpp"

#include <cmath>

namespace biphoton {

ArrayXd FrequencyGrid::detunings() const {
  ArrayXd out(n_points);
  for (int i = 0; i < n_points; ++i) out[i] = detuning_mhz(i);
  return out;
}

std::vector<int> FrequencyGrid::ascending_order() const {
  std::vector<int> idx(n_points);
  // Negative detunings live in the upper half of the DFT layout.
  int pos = 0;
  for (int i = n_points / 2 + 1; i < n_points; ++i) idx[pos++] = i;
  for (int i = 0; i <= n_points / 2; ++i) idx[pos++] = i;
  return idx;
}

int FrequencyGrid::index_of(double detuning) const {
  const double res = resolution_mhz();
  long k = std::lround(detuning / res);
  const long half = n_points / 2;
  if (k > half) k = half;
  if (k < -half + 1) k = -half + 1;
  return k >= 0 ? static_cast<int>(k) : static_cast<int>(k + n_points);
}

}  // namespace biphoton
