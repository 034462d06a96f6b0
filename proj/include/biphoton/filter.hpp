#pragma once

#include <optional>
#include <string>

#include "biphoton/response.hpp"

namespace biphoton {

enum class FilterModel { none, two_level_doppler, driven_multilevel };

std::string to_string(FilterModel m);
std::optional<FilterModel> filter_model_from_string(const std::string& s);

/// Frequency-dependent beamsplitter acting on the second photon.
///
/// od is the intensity optical depth at the undriven line center:
/// on-resonance intensity transmission is exactly exp(-od).
struct FilterSpec {
  FilterModel model = FilterModel::none;
  double od = 0.0;
  double linewidth_mhz = 6.05;
  double v_t_mps = 0.0;
  double center_detuning_mhz = 0.0;
  double wavelength_nm = 780.0;
  std::optional<DrivenSystemSpec> driven;

  bool operator==(const FilterSpec&) const;
};

/// Amplitude transmission t(nu) on the grid plus its time-domain kernel.
struct FilterTransmission {
  FrequencyGrid grid;
  FilterModel model = FilterModel::none;
  ArrayXcd t_values;
  ArrayXcd kernel;  ///< filled by time_kernel()
  double bandwidth_50pct_mhz = 0.0;
  double max_abs_t = 1.0;
  bool gain_detected = false;  ///< |t| > 1 somewhere; reported, never clamped
};

/// t(nu) = exp((od/2) * chi(nu)/s) with s = max(-Re chi) of the undriven
/// profile, so the undriven line center transmits exactly exp(-od) in
/// intensity. Both absorption and the dispersive phase are included.
FilterTransmission build_transmission(const FilterSpec& spec, const FrequencyGrid& grid);

/// Fills the time-domain kernel (inverse DFT with 1/N scaling; a discrete
/// unit impulse for the pass-through model).
FilterTransmission& time_kernel(FilterTransmission& t);

/// Full width (MHz) of the interval where intensity transmission < 50%;
/// 0 when it never drops below. For multi-lobed profiles this is the
/// envelope between the outermost crossings.
double filter_width_mhz(const FilterSpec& spec, const FrequencyGrid& grid);

/// Width for a cached normalized absorption shape a(nu) = -Re chi / s,
/// where |t|^2 = exp(-od * a). Lets optical-depth scans reuse one profile.
double width_from_absorption_shape(const ArrayXd& shape, const FrequencyGrid& grid, double od);

/// Normalized absorption shape of a spec (od-independent).
ArrayXd absorption_shape(const FilterSpec& spec, const FrequencyGrid& grid);

/// Pointwise composition of two filters in series.
FilterTransmission compose(const FilterTransmission& a, const FilterTransmission& b);

}  // namespace biphoton
