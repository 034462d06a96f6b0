#include "biphoton/response.hpp"

#include <algorithm>
#include <cmath>

#include "biphoton/fft.hpp"
#include "biphoton/threading.hpp"

namespace biphoton {

cplx lorentzian_chi(double detuning_mhz, double gamma_mhz) {
  if (!(gamma_mhz > 0.0)) throw std::domain_error("lorentzian_chi: gamma_mhz must be > 0");
  return 1.0 / cplx(-amplitude_halfwidth_mhz(gamma_mhz), detuning_mhz);
}

cplx pole_sum(double nu_mhz, double center_mhz, cplx g, double span_mhz) {
  const cplx z = pi * (cplx(nu_mhz - center_mhz, 0.0) - cplx(0.0, 1.0) * g) / span_mhz;
  return pi / (cplx(0.0, 1.0) * span_mhz) * std::cos(z) / std::sin(z);
}

double doppler_width_mhz(double v_t_mps, double wavelength_nm) {
  return 1000.0 * v_t_mps / wavelength_nm;
}

ArrayXd doppler_shift_kernel(double v_t_mps, double wavelength_nm, const FrequencyGrid& grid) {
  ArrayXd kernel = ArrayXd::Zero(grid.n_points);
  const double width = doppler_width_mhz(v_t_mps, wavelength_nm);
  if (width <= 0.0) {
    kernel[0] = 1.0;
    return kernel;
  }
  for (int i = 0; i < grid.n_points; ++i) {
    const double s = grid.detuning_mhz(i) / width;
    kernel[i] = std::exp(-s * s);
  }
  kernel /= kernel.sum();
  return kernel;
}

ArrayXcd convolve_profile(const ArrayXcd& profile, const ArrayXd& kernel) {
  return ifft(fft_forward(profile) * fft_forward(kernel.cast<cplx>()));
}

std::vector<std::pair<double, double>> velocity_nodes(const ThermalDistribution& dist) {
  if (dist.n_classes < 1 || dist.n_classes % 2 == 0)
    throw std::invalid_argument("ThermalDistribution: n_classes must be odd and >= 1");
  if (!(dist.v_t_mps >= 0.0))
    throw std::invalid_argument("ThermalDistribution: v_t_mps must be >= 0");
  if (dist.v_t_mps == 0.0 || dist.n_classes == 1) return {{0.0, 1.0}};

  const int n = dist.n_classes;
  const double vmax = 5.0 * dist.v_t_mps;
  std::vector<std::pair<double, double>> nodes(n);
  double wsum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = -vmax + 2.0 * vmax * i / (n - 1);
    const double u = v / dist.v_t_mps;
    nodes[i] = {v, std::exp(-u * u)};
    wsum += nodes[i].second;
  }
  for (auto& nw : nodes) nw.second /= wsum;
  return nodes;
}

SusceptibilityProfile doppler_average(const ChiSingle& chi_single, const ThermalDistribution& dist,
                                      double k_radpm, const FrequencyGrid& grid) {
  const auto nodes = velocity_nodes(dist);
  // class shift in MHz: k*v/(2 pi), k in rad/m
  std::vector<std::pair<double, double>> shift_weight(nodes.size());
  for (std::size_t c = 0; c < nodes.size(); ++c)
    shift_weight[c] = {k_radpm * nodes[c].first / two_pi * 1e-6, nodes[c].second};

  SusceptibilityProfile prof{grid, ArrayXcd::Zero(grid.n_points)};
  parallel_for_blocks(grid.n_points, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const double nu = grid.detuning_mhz(static_cast<int>(i));
      cplx acc = 0.0;
      for (std::size_t c = 0; c < nodes.size(); ++c)
        acc += shift_weight[c].second * chi_single(nu - shift_weight[c].first, nodes[c].first);
      prof.values[i] = acc;
    }
  });
  return prof;
}

// ---------------------------------------------------------------------------
// Driven multilevel medium
// ---------------------------------------------------------------------------

namespace {

struct LiouvilleSystem {
  int n = 0;
  MatrixXcd hamiltonian;                         // rad/us, pump frame
  std::vector<std::pair<int, int>> jump_levels;  // (upper, lower)
  std::vector<double> jump_rates;                // rad/us
  double transit_rate = 0.0;                     // rad/us
  MatrixXcd rho_eq;
};

int require_level(const LevelScheme& scheme, const std::string& label) {
  const int i = scheme.index_of(label);
  if (i < 0) throw SteadyStateError(scheme.label, "unknown level '" + label + "'");
  return i;
}

/// Hamiltonian + dissipation data for one velocity class. The frame keeps
/// every level's energy offset on the diagonal so each (upper, lower)
/// coherence rotates at its line position on the probe detuning axis; only
/// the pump's upper level is replaced by the shifted pump detuning.
LiouvilleSystem build_system(const DrivenSystemSpec& spec, double velocity_mps) {
  LiouvilleSystem sys;
  const auto& sc = spec.scheme;
  sys.n = static_cast<int>(sc.levels.size());

  const int pump_upper = require_level(sc, spec.pump_transition.upper);
  const int pump_lower = require_level(sc, spec.pump_transition.lower);

  const double probe_shift = 1000.0 * velocity_mps / spec.probe_wavelength_nm;  // MHz
  const double pump_shift = spec.pump_k_over_probe_k * probe_shift;
  const double pump_detuning = spec.pump.detuning_mhz - pump_shift;

  sys.hamiltonian = MatrixXcd::Zero(sys.n, sys.n);
  for (int i = 0; i < sys.n; ++i)
    sys.hamiltonian(i, i) = two_pi * sc.levels[i].energy_offset_mhz;
  sys.hamiltonian(pump_upper, pump_upper) =
      two_pi * (sc.levels[pump_lower].energy_offset_mhz - pump_detuning);
  const double half_rabi = two_pi * spec.pump.rabi_mhz / 2.0;
  sys.hamiltonian(pump_upper, pump_lower) += half_rabi;
  sys.hamiltonian(pump_lower, pump_upper) += half_rabi;

  // Branching: |amplitude|^2 shares of each upper level's population rate.
  std::vector<double> weight_sum(sys.n, 0.0);
  for (const auto& tr : sc.transitions)
    weight_sum[require_level(sc, tr.upper)] += std::norm(tr.amplitude);
  for (const auto& tr : sc.transitions) {
    const int u = require_level(sc, tr.upper);
    const int l = require_level(sc, tr.lower);
    const double gamma = sc.levels[u].population_decay_rate_mhz;
    if (gamma <= 0.0 || weight_sum[u] <= 0.0) continue;
    sys.jump_levels.emplace_back(u, l);
    sys.jump_rates.push_back(two_pi * gamma * std::norm(tr.amplitude) / weight_sum[u]);
  }

  sys.transit_rate = two_pi * spec.ground_relaxation_mhz;
  sys.rho_eq = MatrixXcd::Zero(sys.n, sys.n);
  int n_stable = 0;
  for (int i = 0; i < sys.n; ++i)
    if (sc.levels[i].population_decay_rate_mhz == 0.0) ++n_stable;
  if (n_stable == 0) {
    sys.rho_eq = MatrixXcd::Identity(sys.n, sys.n) / static_cast<double>(sys.n);
  } else {
    for (int i = 0; i < sys.n; ++i)
      if (sc.levels[i].population_decay_rate_mhz == 0.0)
        sys.rho_eq(i, i) = 1.0 / static_cast<double>(n_stable);
  }
  return sys;
}

MatrixXcd apply_superop(const LiouvilleSystem& sys, const MatrixXcd& rho) {
  const cplx im(0.0, 1.0);
  MatrixXcd out = -im * (sys.hamiltonian * rho - rho * sys.hamiltonian);
  for (std::size_t t = 0; t < sys.jump_levels.size(); ++t) {
    const auto [u, l] = sys.jump_levels[t];
    const double g = sys.jump_rates[t];
    out(l, l) += g * rho(u, u);
    out.row(u) -= 0.5 * g * rho.row(u);
    out.col(u) -= 0.5 * g * rho.col(u);
  }
  if (sys.transit_rate > 0.0)
    out += sys.transit_rate * (rho.trace() * sys.rho_eq - rho);
  return out;
}

MatrixXcd liouvillian_matrix(const LiouvilleSystem& sys) {
  const int n = sys.n;
  MatrixXcd L(n * n, n * n);
  MatrixXcd basis = MatrixXcd::Zero(n, n);
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k) {
      basis(k, l) = 1.0;
      const MatrixXcd img = apply_superop(sys, basis);
      basis(k, l) = 0.0;
      L.col(k + n * l) = img.reshaped();
    }
  return L;
}

MatrixXcd steady_state_of(const LiouvilleSystem& sys, const MatrixXcd& L,
                          const std::string& label) {
  const int n = sys.n;

  Eigen::ColPivHouseholderQR<MatrixXcd> rank_qr(L);
  if (rank_qr.rank() < n * n - 1)
    throw SteadyStateError(label, "Liouvillian kernel is not one-dimensional");

  const double scale = std::max(1.0, L.cwiseAbs().maxCoeff());
  MatrixXcd stacked(n * n + 1, n * n);
  stacked.topRows(n * n) = L;
  stacked.row(n * n).setZero();
  for (int i = 0; i < n; ++i) stacked(n * n, i + n * i) = scale;
  VectorXcd rhs = VectorXcd::Zero(n * n + 1);
  rhs[n * n] = scale;

  const VectorXcd x = stacked.colPivHouseholderQr().solve(rhs);
  return x.reshaped(n, n);
}

std::vector<Transition> probe_transitions(const DrivenSystemSpec& spec) {
  std::vector<Transition> out;
  for (const auto& tr : spec.scheme.transitions)
    if (tr.upper != spec.pump_transition.upper) out.push_back(tr);
  return out;
}

MatrixXcd probe_operator(const DrivenSystemSpec& spec) {
  const int n = static_cast<int>(spec.scheme.levels.size());
  MatrixXcd P = MatrixXcd::Zero(n, n);
  for (const auto& tr : probe_transitions(spec))
    P(require_level(spec.scheme, tr.upper), require_level(spec.scheme, tr.lower)) += tr.amplitude;
  return P;
}

struct PoleTerm {
  cplx weight;  // includes 2 pi and the class weight
  cplx offset;  // lambda - i*2*pi*shift, rad/us
};

/// Rational-form first-order response of one velocity class:
/// chi(delta) = sum_k weight_k / (offset_k + i*2*pi*delta).
void class_pole_terms(const DrivenSystemSpec& spec, double velocity, double class_weight,
                      std::vector<PoleTerm>& out) {
  const LiouvilleSystem sys = build_system(spec, velocity);
  const MatrixXcd L = liouvillian_matrix(sys);
  const MatrixXcd rho0 = steady_state_of(sys, L, spec.scheme.label);
  const MatrixXcd P = probe_operator(spec);
  const int n = sys.n;

  const VectorXcd b = (P * rho0 - rho0 * P).reshaped();
  const VectorXcd w = P.reshaped();

  // Invariant subspace reached from b under L.
  const double tiny = 1e-14 * std::max(1.0, L.cwiseAbs().maxCoeff());
  std::vector<int> members;
  std::vector<char> in_set(n * n, 0);
  for (int i = 0; i < n * n; ++i)
    if (std::abs(b[i]) > 0.0) {
      in_set[i] = 1;
      members.push_back(i);
    }
  for (std::size_t head = 0; head < members.size(); ++head) {
    const int j = members[head];
    for (int i = 0; i < n * n; ++i)
      if (!in_set[i] && std::abs(L(i, j)) > tiny) {
        in_set[i] = 1;
        members.push_back(i);
      }
  }
  std::sort(members.begin(), members.end());

  const int m = static_cast<int>(members.size());
  if (m == 0) return;  // probe couples nothing; no response
  MatrixXcd Ls(m, m);
  VectorXcd bs(m), ws(m);
  for (int r = 0; r < m; ++r) {
    bs[r] = b[members[r]];
    ws[r] = w[members[r]];
    for (int c = 0; c < m; ++c) Ls(r, c) = L(members[r], members[c]);
  }

  Eigen::ComplexEigenSolver<MatrixXcd> eig(Ls);
  if (eig.info() != Eigen::Success)
    throw SteadyStateError(spec.scheme.label, "probe response eigensolver failed");
  const VectorXcd coeffs = eig.eigenvectors().partialPivLu().solve(bs);
  const VectorXcd proj = eig.eigenvectors().adjoint() * ws;  // conj(w)^T V

  const double probe_shift = 1000.0 * velocity / spec.probe_wavelength_nm;  // MHz
  const double weight_scale = two_pi * class_weight;
  for (int k = 0; k < m; ++k) {
    const cplx a = std::conj(proj[k]) * coeffs[k] * weight_scale;
    if (std::abs(a) == 0.0) continue;
    out.push_back({a, eig.eigenvalues()[k] - cplx(0.0, two_pi * probe_shift)});
  }
}

}  // namespace

MatrixXcd driven_steady_state(const DrivenSystemSpec& spec, double velocity_mps) {
  const LiouvilleSystem sys = build_system(spec, velocity_mps);
  return steady_state_of(sys, liouvillian_matrix(sys), spec.scheme.label);
}

SusceptibilityProfile probe_response(const DrivenSystemSpec& spec, const ThermalDistribution& dist,
                                     const FrequencyGrid& grid) {
  std::vector<PoleTerm> terms;
  for (const auto& [v, weight] : velocity_nodes(dist)) class_pole_terms(spec, v, weight, terms);

  const int n = grid.n_points;
  ArrayXd omega(n);
  for (int i = 0; i < n; ++i) omega[i] = two_pi * grid.detuning_mhz(i);

  SusceptibilityProfile prof{grid, ArrayXcd::Zero(n)};
  parallel_for_blocks(n, [&](std::size_t lo, std::size_t hi) {
    const std::size_t len = hi - lo;
    std::vector<double> acc_re(len, 0.0), acc_im(len, 0.0);
    const double* __restrict w = omega.data() + lo;
    // per-term sweep in plain real arithmetic so the loop vectorizes
    for (const auto& t : terms) {
      const double ar = t.weight.real(), ai = t.weight.imag();
      const double or_ = t.offset.real(), oi = t.offset.imag();
      const double or2 = or_ * or_;
      double* __restrict re = acc_re.data();
      double* __restrict im = acc_im.data();
      for (std::size_t i = 0; i < len; ++i) {
        const double y = oi + w[i];
        const double inv = 1.0 / (or2 + y * y);
        re[i] += (ar * or_ + ai * y) * inv;
        im[i] += (ai * or_ - ar * y) * inv;
      }
    }
    for (std::size_t i = 0; i < len; ++i) prof.values[lo + i] = cplx(acc_re[i], acc_im[i]);
  });
  return prof;
}

SusceptibilityProfile undriven_reference(const DrivenSystemSpec& spec, double v_t_mps,
                                         const FrequencyGrid& grid) {
  const auto& sc = spec.scheme;
  int n_stable = 0;
  for (const auto& lv : sc.levels)
    if (lv.population_decay_rate_mhz == 0.0) ++n_stable;

  ArrayXcd chi0 = ArrayXcd::Zero(grid.n_points);
  for (const auto& tr : probe_transitions(spec)) {
    const auto& upper = sc.levels[require_level(sc, tr.upper)];
    const auto& lower = sc.levels[require_level(sc, tr.lower)];
    if (lower.population_decay_rate_mhz != 0.0 || n_stable == 0) continue;
    const double pop = 1.0 / n_stable;
    const double line = upper.energy_offset_mhz - lower.energy_offset_mhz;
    const double gamma = 0.5 * upper.population_decay_rate_mhz + spec.ground_relaxation_mhz;
    const cplx strength = std::norm(tr.amplitude) * pop;
    for (int i = 0; i < grid.n_points; ++i)
      chi0[i] += strength * pole_sum(grid.detuning_mhz(i), line, -gamma, grid.span_mhz);
  }

  SusceptibilityProfile prof{grid, chi0};
  if (v_t_mps > 0.0)
    prof.values = convolve_profile(chi0, doppler_shift_kernel(v_t_mps, spec.probe_wavelength_nm, grid));
  return prof;
}

}  // namespace biphoton
