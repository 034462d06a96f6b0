#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "biphoton/grid.hpp"
#include "biphoton/scheme.hpp"

namespace biphoton {

/// Complex linear response sampled on a detuning grid (DFT order),
/// in units of 1/MHz: the on-resonance zero-velocity two-level value has
/// modulus 1/Gamma with Gamma the amplitude half-width in MHz.
struct SusceptibilityProfile {
  FrequencyGrid grid;
  ArrayXcd values;
};

/// 1D Maxwell-Boltzmann velocity classes; v_t is the most-probable speed.
struct ThermalDistribution {
  double v_t_mps = 0.0;
  int n_classes = 3001;
};

/// Strongly pumped multilevel medium probed in linear response.
///
/// The pump couples exactly pump_transition and is treated to all orders;
/// the probe couples every transition whose upper level differs from the
/// pump's upper level, to first order. ground_relaxation_mhz is the
/// transit-time rate restoring stable-level populations toward an equal
/// mixture; without it a multi-ground scheme has no unique steady state.
struct DrivenSystemSpec {
  LevelScheme scheme;
  PumpField pump;
  TransitionRef pump_transition;
  TransitionRef probe_transition;
  double pump_k_over_probe_k = 780.0 / 795.0;
  double probe_wavelength_nm = 780.0;
  double ground_relaxation_mhz = 0.0;

  bool operator==(const DrivenSystemSpec&) const = default;
};

/// chi(delta) = 1/(i*delta - gamma_mhz/2): single velocity-class two-level
/// response with the line at zero detuning. gamma_mhz is the population
/// linewidth (FWHM); the amplitude half-width is gamma_mhz/2.
cplx lorentzian_chi(double detuning_mhz, double gamma_mhz);

/// Sum over all grid images of 1/(i*(nu - center + m*span) + g).
/// Re g > 0 puts the pole in the upper half plane (causal emission lines);
/// Re g < 0 in the lower half (causal absorbers). Sampling profiles in this
/// grid-periodized form removes band-truncation error from DFT round trips.
cplx pole_sum(double nu_mhz, double center_mhz, cplx g, double span_mhz);

/// Gaussian-shift frequency kernel exp(-(s/(v_t/lambda))^2), normalized to
/// unit sum on the grid; convolving with it performs an exact Doppler
/// average of any pure-shift single-class profile.
ArrayXd doppler_shift_kernel(double v_t_mps, double wavelength_nm, const FrequencyGrid& grid);

/// Circular convolution of a grid profile with a normalized shift kernel.
ArrayXcd convolve_profile(const ArrayXcd& profile, const ArrayXd& kernel);

/// Velocity nodes and normalized Gaussian weights for class averaging.
std::vector<std::pair<double, double>> velocity_nodes(const ThermalDistribution& dist);

using ChiSingle = std::function<cplx(double detuning_mhz, double velocity_mps)>;

/// Averages chi_single over velocity classes; each class is evaluated at the
/// detuning shifted by k*v/2pi (in MHz). Uniform nodes with Gaussian weights
/// converge geometrically for Lorentzian kernels once the node spacing
/// resolves the natural width (n_classes default 3001 over +-5 v_t).
SusceptibilityProfile doppler_average(const ChiSingle& chi_single, const ThermalDistribution& dist,
                                      double k_radpm, const FrequencyGrid& grid);

/// Steady state of the pump-only Lindblad evolution for one velocity class
/// (pump detuning Doppler-shifted). Throws SteadyStateError when the
/// kernel of the Liouvillian is not one-dimensional.
MatrixXcd driven_steady_state(const DrivenSystemSpec& spec, double velocity_mps);

/// First-order probe susceptibility on the grid, Doppler-averaged with
/// two-color shifts. Reduces to the weighted sum of lorentzian_chi over
/// probe-coupled lines when the pump is off.
SusceptibilityProfile probe_response(const DrivenSystemSpec& spec, const ThermalDistribution& dist,
                                     const FrequencyGrid& grid);

/// Pump-off reference of the same medium via exact shift-kernel convolution;
/// fixes the optical-depth normalization of driven transmissions.
SusceptibilityProfile undriven_reference(const DrivenSystemSpec& spec, double v_t_mps,
                                         const FrequencyGrid& grid);

}  // namespace biphoton
