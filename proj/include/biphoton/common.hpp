#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace biphoton {

using cplx = std::complex<double>;
using Eigen::ArrayXcd;
using Eigen::ArrayXd;
using Eigen::MatrixXcd;
using Eigen::Vector3d;
using Eigen::VectorXcd;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Unit conventions, used throughout:
//   - interface frequencies and linewidths are ordinary frequencies in MHz
//     (linewidths are FWHM population-decay linewidths),
//   - internal time axes are in microseconds so that nu * t is dimensionless,
//   - delays and detector bins at the interface are in nanoseconds,
//   - angular quantities inside numeric kernels carry an explicit 2*pi.
//
// A population linewidth G (MHz) corresponds to an amplitude half-width of
// G/2 in frequency-domain Lorentzians 1/(i(nu - nu0) + G/2), and to an
// amplitude decay rate pi*G per microsecond in the time domain; both describe
// the same intensity lifetime 1/(2*pi*G).
inline double amplitude_halfwidth_mhz(double linewidth_mhz) { return 0.5 * linewidth_mhz; }
inline double amplitude_rate_per_us(double linewidth_mhz) { return pi * linewidth_mhz; }

struct GridMismatchError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct SteadyStateError : std::runtime_error {
  explicit SteadyStateError(const std::string& scheme_label, const std::string& what)
      : std::runtime_error("steady state of scheme '" + scheme_label + "': " + what),
        scheme(scheme_label) {}
  std::string scheme;
};

struct WindowError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace biphoton
