#pragma once

#include <utility>
#include <vector>

#include "biphoton/filter.hpp"

namespace biphoton {

/// One intermediate decay path of the cascade: line offset, complex weight
/// (product of the path's couplings) and population linewidth.
struct DecayPath {
  double center_detuning_mhz = 0.0;
  cplx amplitude = 1.0;
  double linewidth_mhz = 6.05;

  bool operator==(const DecayPath&) const = default;
};

/// Two-photon source amplitude: set of decay paths plus the doubly-excited
/// state linewidth and the two-photon detuning of the drive.
struct BiphotonSpec {
  std::vector<DecayPath> paths;
  double upper_linewidth_mhz = 8.0;
  double two_photon_detuning_mhz = 0.0;

  bool operator==(const BiphotonSpec&) const = default;
};

/// Thermal dephasing of the collective emission grating.
struct MotionalParams {
  double v_t_mps = 0.0;
  double wavelength_nm = 780.0;

  bool operator==(const MotionalParams&) const = default;
};

/// Binned |psi(tau)|^2 with uniformly spaced bin centers (delays in ns,
/// negative delays allowed). Values are bin-integrated coincidence density.
struct CorrelationTrace {
  double bin_ns = 1.0;
  std::vector<double> delays_ns;
  std::vector<double> values;

  double total() const;
  double peak() const;
  int index_of_delay(double delay_ns) const;
};

/// Conditional lower-photon spectrum Phi0(nu) = sum_j A_j / (i(nu - d_j) + G_j/2)
/// sampled on the grid in grid-periodized form (alias-consistent sampling,
/// exact under the DFT round trip).
ArrayXcd source_spectrum(const BiphotonSpec& spec, const FrequencyGrid& grid);

/// Filtered conditional amplitude psi(tau) on the DFT time axis:
/// inverse transform of Phi0(nu) * t(nu), scaled by the span so values match
/// the continuum transform of the closed-form path sum.
ArrayXcd pair_amplitude(const BiphotonSpec& spec, const FilterTransmission& filt);
ArrayXcd pair_amplitude(const ArrayXcd& source, const FilterTransmission& filt,
                        const FrequencyGrid& source_grid);

/// Full two-time amplitude theta(t1) exp(-(i 2 pi d2 + pi G_a) t1) psi(t2-t1).
cplx joint_amplitude(const BiphotonSpec& spec, const FilterTransmission& filt, double t1_ns,
                     double t2_ns);
cplx joint_amplitude(const BiphotonSpec& spec, const ArrayXcd& psi, const FrequencyGrid& grid,
                     double t1_ns, double t2_ns);

/// Binned cross-correlation: |psi(tau)|^2 times the motional suppression
/// exp(-(k v_t tau)^2 / 2), integrated over detector bins. Bin k is centered
/// at k*bin_ns. The default window spans [-64, 448) ns.
CorrelationTrace ccf(const BiphotonSpec& spec, const FilterTransmission& filt,
                     const MotionalParams& motional, double bin_ns);
CorrelationTrace ccf(const ArrayXcd& psi, const FrequencyGrid& grid,
                     const MotionalParams& motional, double bin_ns);

inline constexpr double kTraceStartNs = -64.0;
inline constexpr double kTraceEndNs = 448.0;

/// Motional suppression factor exp(-(k v_t tau)^2 / 2).
double motional_suppression(const MotionalParams& motional, double tau_ns);

struct PhaseMatch {
  Vector3d k4_direction;        ///< unit vector
  double mismatch_rad_per_m;    ///< | |k1+k2-k3| - 2 pi/lambda4 |
  double k4_angle_deg;          ///< angle to the principal axis, in plane
};

/// k4 = k1 + k2 - k3 from the coplanar beam geometry.
PhaseMatch phase_match(const BeamGeometry& geom);

/// Forward-scattered intensity of N spatially phased thermal dipoles:
/// N + (N^2 - N) exp(-(k v_t t)^2 / 2).
double grating_intensity(long n_atoms, double k_radpm, double v_t_mps, double t_ns);

/// Velocity-class spread selected by a two-photon line: linewidth (Hz) times
/// wavelength (m), returned in m/s.
double velocity_class_width(double two_photon_linewidth_mhz, double two_photon_wavelength_nm);

}  // namespace biphoton
