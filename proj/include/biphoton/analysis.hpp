#pragma once

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "biphoton/scenario.hpp"

namespace biphoton {

/// Parameters of y0 + (A1 + A2 sin^2(pi f t + phi)) exp(-t/tau) with
/// 1-sigma uncertainties from the local quadratic approximation.
struct FitResult {
  double y0 = 0.0;
  double a1 = 0.0;
  double a2 = 0.0;
  double f_mhz = 0.0;
  double phi_rad = 0.0;
  double tau_ns = 0.0;
  std::array<double, 6> param_uncertainties{};  // same order as above
  double reduced_chi2 = 0.0;
  bool converged = false;
  int n_iterations = 0;
};

struct BeatSpectrum {
  std::vector<double> freqs_mhz;
  std::vector<double> power;
  double peak_freq_mhz = 0.0;
  double peak_power = 0.0;
};

enum class FitWeights { uniform, poisson };

/// Power spectrum of the mean-subtracted trace inside [start, end) ns.
/// Normalized so the total spectral power equals the windowed variance;
/// the peak excludes the zero-frequency bin. Requires >= 16 bins.
BeatSpectrum beat_spectrum(const CorrelationTrace& trace, std::pair<double, double> window_ns);

/// Damped Gauss-Newton least squares of the decaying-beat model over the
/// window. Non-convergence is reported through the flag, not thrown; a
/// window with fewer than 8 bins per free parameter is an error.
FitResult fit_decaying_beat(const CorrelationTrace& trace, std::pair<double, double> window_ns,
                            const std::optional<FitResult>& initial_guess = std::nullopt,
                            FitWeights weights = FitWeights::uniform);

struct MotionalFitResult {
  double v_t_mps = 0.0;
  double reduced_chi2 = 0.0;
  bool converged = false;
  FitResult params;  ///< tau_ns pinned to the natural value
};

/// Same trial function with tau pinned to natural_tau_ns and the envelope
/// multiplied by exp(-(k v_t t)^2 / 2); v_t is the free decay parameter.
MotionalFitResult fit_motional(const CorrelationTrace& trace, std::pair<double, double> window_ns,
                               double natural_tau_ns, double wavelength_nm = 780.0,
                               FitWeights weights = FitWeights::uniform);

/// integral / peak, in ns; robust width for non-exponential binned traces.
double equivalent_width_ns(const CorrelationTrace& trace);

struct FilterWidthPoint {
  double width_mhz = 0.0;      ///< requested 50% width of the extra cell
  double od = 0.0;             ///< optical depth realizing it
  double zero_delay = 0.0;     ///< zero-delay bin of the composed CCF
  bool reachable = true;       ///< false when the width needs od beyond the cap
  CorrelationTrace trace;
};

/// Zero-delay coincidences vs the 50% width of an extra filter cell composed
/// with the source-cell filter (extra-cell od found by bisection).
std::vector<FilterWidthPoint> scan_filter_width(const Scenario& base,
                                                const std::vector<double>& widths_mhz,
                                                double od_cap = 50.0);

struct OdScanPoint {
  double od = 0.0;
  double equivalent_width_ns = 0.0;
  CorrelationTrace trace;
};

/// CCF equivalent width vs filter optical depth.
std::vector<OdScanPoint> scan_od(const Scenario& base, const std::vector<double>& ods);

}  // namespace biphoton
