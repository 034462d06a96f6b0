#include "biphoton/filter.hpp"

#include <cmath>

#include "biphoton/fft.hpp"
#include "biphoton/threading.hpp"

namespace biphoton {

std::string to_string(FilterModel m) {
  switch (m) {
    case FilterModel::none: return "none";
    case FilterModel::two_level_doppler: return "two_level_doppler";
    case FilterModel::driven_multilevel: return "driven_multilevel";
  }
  return "none";
}

std::optional<FilterModel> filter_model_from_string(const std::string& s) {
  if (s == "none") return FilterModel::none;
  if (s == "two_level_doppler") return FilterModel::two_level_doppler;
  if (s == "driven_multilevel") return FilterModel::driven_multilevel;
  return std::nullopt;
}

bool FilterSpec::operator==(const FilterSpec& o) const {
  return model == o.model && od == o.od && linewidth_mhz == o.linewidth_mhz &&
         v_t_mps == o.v_t_mps && center_detuning_mhz == o.center_detuning_mhz &&
         wavelength_nm == o.wavelength_nm && driven == o.driven;
}

namespace {

constexpr int kDrivenVelocityClasses = 1501;

DrivenSystemSpec with_center_shift(const DrivenSystemSpec& spec, double center_mhz,
                                   double fallback_wavelength_nm) {
  DrivenSystemSpec shifted = spec;
  if (shifted.probe_wavelength_nm <= 0.0) shifted.probe_wavelength_nm = fallback_wavelength_nm;
  if (center_mhz != 0.0) {
    for (auto& lv : shifted.scheme.levels)
      if (lv.label != spec.pump_transition.upper && lv.population_decay_rate_mhz > 0.0)
        lv.energy_offset_mhz += center_mhz;
  }
  return shifted;
}

/// Causal-absorber response chi(nu)/s, poles in the upper half plane so the
/// resulting kernel is supported at nonnegative delays; s = max Re chi of
/// the undriven profile, so exp(-(od/2) chihat) transmits exactly exp(-od)
/// in intensity at the undriven line center. The probe-response values use
/// the emission-side convention and enter through -conj.
ArrayXcd normalized_chi(const FilterSpec& spec, const FrequencyGrid& grid) {
  if (spec.model == FilterModel::none) return ArrayXcd::Zero(grid.n_points);

  if (spec.model == FilterModel::two_level_doppler) {
    const double gamma = amplitude_halfwidth_mhz(spec.linewidth_mhz);
    ArrayXcd chi(grid.n_points);
    for (int i = 0; i < grid.n_points; ++i)
      chi[i] = pole_sum(grid.detuning_mhz(i), spec.center_detuning_mhz, gamma, grid.span_mhz);
    if (spec.v_t_mps > 0.0)
      chi = convolve_profile(chi, doppler_shift_kernel(spec.v_t_mps, spec.wavelength_nm, grid));
    const double s = chi.real().maxCoeff();
    return chi / s;
  }

  // driven_multilevel
  const DrivenSystemSpec driven =
      with_center_shift(*spec.driven, spec.center_detuning_mhz, spec.wavelength_nm);
  const ThermalDistribution dist{spec.v_t_mps, spec.v_t_mps > 0.0 ? kDrivenVelocityClasses : 1};
  const SusceptibilityProfile chi = probe_response(driven, dist, grid);
  const SusceptibilityProfile ref = undriven_reference(driven, spec.v_t_mps, grid);
  const double s = (-ref.values.real()).maxCoeff();
  return -chi.values.conjugate() / s;
}

}  // namespace

ArrayXd absorption_shape(const FilterSpec& spec, const FrequencyGrid& grid) {
  return normalized_chi(spec, grid).real();
}

FilterTransmission build_transmission(const FilterSpec& spec, const FrequencyGrid& grid) {
  FilterTransmission out;
  out.grid = grid;
  out.model = spec.model;
  if (spec.model == FilterModel::none || spec.od == 0.0) {
    out.t_values = ArrayXcd::Ones(grid.n_points);
    out.bandwidth_50pct_mhz = 0.0;
    out.max_abs_t = 1.0;
    return out;
  }

  const ArrayXcd chihat = normalized_chi(spec, grid);
  out.t_values = (-0.5 * spec.od * chihat).exp();
  out.max_abs_t = out.t_values.abs().maxCoeff();
  out.gain_detected = out.max_abs_t > 1.0 + 1e-9;
  out.bandwidth_50pct_mhz = width_from_absorption_shape(chihat.real(), grid, spec.od);
  return out;
}

FilterTransmission& time_kernel(FilterTransmission& t) {
  if (t.model == FilterModel::none) {
    t.kernel = ArrayXcd::Zero(t.grid.n_points);
    t.kernel[0] = 1.0;
    return t;
  }
  t.kernel = ifft(t.t_values);
  return t;
}

double width_from_absorption_shape(const ArrayXd& shape, const FrequencyGrid& grid, double od) {
  if (od <= 0.0) return 0.0;
  const double threshold = std::log(2.0) / od;  // below 50% transmission where shape > threshold
  const auto order = grid.ascending_order();
  const int n = grid.n_points;

  int first = -1;
  int last = -1;
  for (int p = 0; p < n; ++p) {
    if (shape[order[p]] > threshold) {
      if (first < 0) first = p;
      last = p;
    }
  }
  if (first < 0) return 0.0;

  auto crossing = [&](int inside, int outside) {
    const double xi = grid.detuning_mhz(order[inside]);
    const double xo = grid.detuning_mhz(order[outside]);
    const double yi = shape[order[inside]];
    const double yo = shape[order[outside]];
    if (yi == yo) return xi;
    const double t = (threshold - yo) / (yi - yo);
    return xo + t * (xi - xo);
  };

  const double left = first > 0 ? crossing(first, first - 1) : grid.detuning_mhz(order[0]);
  const double right = last < n - 1 ? crossing(last, last + 1) : grid.detuning_mhz(order[n - 1]);
  return right - left;
}

double filter_width_mhz(const FilterSpec& spec, const FrequencyGrid& grid) {
  if (spec.model == FilterModel::none || spec.od <= 0.0) return 0.0;
  return width_from_absorption_shape(absorption_shape(spec, grid), grid, spec.od);
}

FilterTransmission compose(const FilterTransmission& a, const FilterTransmission& b) {
  if (!(a.grid == b.grid)) throw GridMismatchError("compose: filter grids differ");
  FilterTransmission out;
  out.grid = a.grid;
  out.model = a.model;
  out.t_values = a.t_values * b.t_values;
  out.max_abs_t = out.t_values.abs().maxCoeff();
  out.gain_detected = out.max_abs_t > 1.0 + 1e-9;

  const ArrayXd intensity = out.t_values.abs2();
  // 50% width of the composed profile, directly from |t|^2.
  ArrayXd shape = ArrayXd::Zero(out.grid.n_points);
  for (int i = 0; i < out.grid.n_points; ++i)
    shape[i] = intensity[i] > 0.0 ? -std::log(intensity[i]) : 1e300;
  out.bandwidth_50pct_mhz = width_from_absorption_shape(shape, out.grid, 1.0);
  return out;
}

}  // namespace biphoton
