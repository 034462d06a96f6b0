#include "biphoton/pair.hpp"

#include <algorithm>
#include <cmath>

#include "biphoton/fft.hpp"

namespace biphoton {

double CorrelationTrace::total() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s;
}

double CorrelationTrace::peak() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, v);
  return m;
}

int CorrelationTrace::index_of_delay(double delay_ns) const {
  int best = 0;
  double dist = std::abs(delays_ns.empty() ? 0.0 : delays_ns[0] - delay_ns);
  for (std::size_t i = 1; i < delays_ns.size(); ++i) {
    const double d = std::abs(delays_ns[i] - delay_ns);
    if (d < dist) {
      dist = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

ArrayXcd source_spectrum(const BiphotonSpec& spec, const FrequencyGrid& grid) {
  ArrayXcd phi = ArrayXcd::Zero(grid.n_points);
  for (const auto& path : spec.paths) {
    if (path.amplitude == cplx(0.0, 0.0)) continue;
    const double gamma = amplitude_halfwidth_mhz(path.linewidth_mhz);
    for (int i = 0; i < grid.n_points; ++i)
      phi[i] += path.amplitude *
                pole_sum(grid.detuning_mhz(i), path.center_detuning_mhz, gamma, grid.span_mhz);
  }
  return phi;
}

ArrayXcd pair_amplitude(const ArrayXcd& source, const FilterTransmission& filt,
                        const FrequencyGrid& source_grid) {
  if (!(source_grid == filt.grid) || source.size() != filt.t_values.size())
    throw GridMismatchError("pair_amplitude: source and filter grids differ");
  return source_grid.span_mhz * ifft(source * filt.t_values);
}

ArrayXcd pair_amplitude(const BiphotonSpec& spec, const FilterTransmission& filt) {
  return pair_amplitude(source_spectrum(spec, filt.grid), filt, filt.grid);
}

cplx joint_amplitude(const BiphotonSpec& spec, const ArrayXcd& psi, const FrequencyGrid& grid,
                     double t1_ns, double t2_ns) {
  if (t1_ns < 0.0) return 0.0;
  const double t1_us = t1_ns * 1e-3;
  const cplx upper_factor =
      std::exp(cplx(-amplitude_rate_per_us(spec.upper_linewidth_mhz) * t1_us,
                    -two_pi * spec.two_photon_detuning_mhz * t1_us));

  // linear interpolation of psi at tau = t2 - t1 on the wrapped time axis
  const double tau_us = (t2_ns - t1_ns) * 1e-3;
  const int n = grid.n_points;
  double pos = tau_us / grid.dt_us();
  pos -= std::floor(pos / n) * n;  // wrap into [0, n)
  const int i0 = static_cast<int>(pos) % n;
  const int i1 = (i0 + 1) % n;
  const double frac = pos - std::floor(pos);
  const cplx psi_tau = (1.0 - frac) * psi[i0] + frac * psi[i1];
  return upper_factor * psi_tau;
}

cplx joint_amplitude(const BiphotonSpec& spec, const FilterTransmission& filt, double t1_ns,
                     double t2_ns) {
  const ArrayXcd psi = pair_amplitude(spec, filt);
  return joint_amplitude(spec, psi, filt.grid, t1_ns, t2_ns);
}

double motional_suppression(const MotionalParams& motional, double tau_ns) {
  if (motional.v_t_mps <= 0.0) return 1.0;
  const double k = two_pi / (motional.wavelength_nm * 1e-9);  // rad/m
  const double arg = k * motional.v_t_mps * tau_ns * 1e-9;
  return std::exp(-0.5 * arg * arg);
}

CorrelationTrace ccf(const ArrayXcd& psi, const FrequencyGrid& grid,
                     const MotionalParams& motional, double bin_ns) {
  if (!(bin_ns > 0.0)) throw std::invalid_argument("ccf: bin_ns must be > 0");
  CorrelationTrace trace;
  trace.bin_ns = bin_ns;
  const long k_min = std::lround(std::ceil(kTraceStartNs / bin_ns));
  const long k_max = std::lround(std::floor(kTraceEndNs / bin_ns));
  const long n_bins = k_max - k_min + 1;
  trace.delays_ns.resize(n_bins);
  trace.values.assign(n_bins, 0.0);
  for (long k = 0; k < n_bins; ++k) trace.delays_ns[k] = (k_min + k) * bin_ns;

  // Each sample carries the density over [tau - dt/2, tau + dt/2); mass is
  // split across a bin boundary to keep bin integrals free of sample-count
  // quantization ripple.
  const double lo = (k_min - 0.5) * bin_ns;
  const double dt_ns = grid.dt_us() * 1e3;
  auto deposit = [&](long k, double mass) {
    if (k >= 0 && k < n_bins) trace.values[k] += mass;
  };
  for (int i = 0; i < grid.n_points; ++i) {
    const double tau_ns = grid.time_us(i) * 1e3;
    const double density = std::norm(psi[i]) * motional_suppression(motional, tau_ns);
    const double a = tau_ns - 0.5 * dt_ns - lo;
    const double b = tau_ns + 0.5 * dt_ns - lo;
    const long ka = static_cast<long>(std::floor(a / bin_ns));
    const long kb = static_cast<long>(std::floor(b / bin_ns));
    if (ka == kb) {
      deposit(ka, density * dt_ns);
    } else {
      const double split = kb * bin_ns;
      deposit(ka, density * (split - a));
      deposit(kb, density * (b - split));
    }
  }
  return trace;
}

CorrelationTrace ccf(const BiphotonSpec& spec, const FilterTransmission& filt,
                     const MotionalParams& motional, double bin_ns) {
  return ccf(pair_amplitude(spec, filt), filt.grid, motional, bin_ns);
}

PhaseMatch phase_match(const BeamGeometry& geom) {
  auto wavevector = [](double lambda_nm, double theta_deg, double side) -> Vector3d {
    const double th = theta_deg * pi / 180.0;
    return Vector3d{side * std::sin(th), 0.0, std::cos(th)} * (two_pi / (lambda_nm * 1e-9));
  };
  // Pumps on one side of the axis, the first photon on the other; the pair
  // emerges on opposite sides of the emission cones.
  const Vector3d k1 = wavevector(geom.wavelengths_nm[0], geom.theta1_deg, +1.0);
  const Vector3d k2 = wavevector(geom.wavelengths_nm[1], geom.theta2_deg, +1.0);
  const Vector3d k3 = wavevector(geom.wavelengths_nm[2], geom.theta3_deg, -1.0);
  const Vector3d k4 = k1 + k2 - k3;

  PhaseMatch out;
  out.k4_direction = k4.normalized();
  out.mismatch_rad_per_m = std::abs(k4.norm() - two_pi / (geom.wavelengths_nm[3] * 1e-9));
  out.k4_angle_deg = std::atan2(k4.x(), k4.z()) * 180.0 / pi;
  return out;
}

double grating_intensity(long n_atoms, double k_radpm, double v_t_mps, double t_ns) {
  if (n_atoms < 1) throw std::domain_error("grating_intensity: n_atoms must be >= 1");
  const double n = static_cast<double>(n_atoms);
  const double arg = k_radpm * v_t_mps * t_ns * 1e-9;
  return n + (n * n - n) * std::exp(-0.5 * arg * arg);
}

double velocity_class_width(double two_photon_linewidth_mhz, double two_photon_wavelength_nm) {
  if (!(two_photon_linewidth_mhz > 0.0) || !(two_photon_wavelength_nm > 0.0))
    throw std::domain_error("velocity_class_width: inputs must be > 0");
  return two_photon_linewidth_mhz * 1e6 * two_photon_wavelength_nm * 1e-9;
}

}  // namespace biphoton
