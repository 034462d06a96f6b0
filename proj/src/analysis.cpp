#include "biphoton/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "biphoton/fft.hpp"

namespace biphoton {

namespace {

std::vector<int> window_indices(const CorrelationTrace& trace, std::pair<double, double> w) {
  std::vector<int> idx;
  for (std::size_t i = 0; i < trace.delays_ns.size(); ++i)
    if (trace.delays_ns[i] >= w.first && trace.delays_ns[i] < w.second)
      idx.push_back(static_cast<int>(i));
  return idx;
}

}  // namespace

BeatSpectrum beat_spectrum(const CorrelationTrace& trace, std::pair<double, double> window_ns) {
  const auto idx = window_indices(trace, window_ns);
  const int n = static_cast<int>(idx.size());
  if (n < 16) throw WindowError("beat_spectrum: window must contain at least 16 bins");

  // mean-subtracted, Hann-windowed slice; the taper keeps the edge jump of
  // a decaying trace from leaking a 1/k^2 floor across the whole axis
  double mean = 0.0;
  for (int i = 0; i < n; ++i) mean += trace.values[idx[i]];
  mean /= n;
  ArrayXcd x(n);
  double wsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double w = 0.5 * (1.0 - std::cos(two_pi * i / (n - 1)));
    x[i] = (trace.values[idx[i]] - mean) * w;
    wsq += w * w;
  }

  const ArrayXcd spec = fft_forward(x);
  const int n_half = n / 2;
  BeatSpectrum out;
  out.freqs_mhz.resize(n_half + 1);
  out.power.resize(n_half + 1);
  const double df_mhz = 1e3 / (n * trace.bin_ns);
  const double norm = 1.0 / (static_cast<double>(n) * wsq);
  for (int k = 0; k <= n_half; ++k) {
    out.freqs_mhz[k] = k * df_mhz;
    double p = std::norm(spec[k]) * norm;
    if (k != 0 && k != n - k) p += std::norm(spec[n - k]) * norm;
    out.power[k] = p;
  }
  // The peak search skips the zero-frequency bin and the rest of the
  // envelope's DC lobe (monotone descent), otherwise broadband decay
  // leakage can outweigh a genuine beat line.
  int k_start = 1;
  while (k_start + 1 <= n_half && out.power[k_start + 1] < out.power[k_start]) ++k_start;
  int peak = k_start;
  for (int k = k_start; k <= n_half; ++k)
    if (out.power[k] > out.power[peak]) peak = k;
  out.peak_freq_mhz = out.freqs_mhz[peak];
  out.peak_power = out.power[peak];
  return out;
}

// ---------------------------------------------------------------------------
// Decaying-beat fits
// ---------------------------------------------------------------------------

namespace {

constexpr int kMaxIterations = 200;
constexpr double kStepTolerance = 1e-8;
// Eight bins per shape parameter beyond the offset; admits the canonical
// 3-45 ns window at 1-ns bins while rejecting degenerate windows.
constexpr int kMinFitBins = 40;

struct FitData {
  std::vector<double> t;  // ns
  std::vector<double> y;
  std::vector<double> w;  // weights
};

FitData gather(const CorrelationTrace& trace, std::pair<double, double> window, FitWeights mode,
               int min_bins) {
  const auto idx = window_indices(trace, window);
  if (static_cast<int>(idx.size()) < min_bins)
    throw WindowError("fit window too short: " + std::to_string(idx.size()) + " bins, need " +
                      std::to_string(min_bins));
  FitData d;
  for (int i : idx) {
    d.t.push_back(trace.delays_ns[i]);
    d.y.push_back(trace.values[i]);
    d.w.push_back(mode == FitWeights::uniform ? 1.0 : 1.0 / std::max(trace.values[i], 1.0));
  }
  return d;
}

/// model(t) and its 6-column Jacobian; decay(t) and decay_deriv are supplied
/// by the caller so the free-tau and pinned-tau (motional) variants share
/// the machinery. Parameter order: y0, a1, a2, f, phi, d (decay parameter).
struct TrialModel {
  // decay envelope E(t; d) and dE/dd
  std::function<double(double, double)> envelope;
  std::function<double(double, double)> envelope_deriv;

  double eval(const std::array<double, 6>& p, double t) const {
    const double phase = pi * p[3] * 1e-3 * t + p[4];
    const double s = std::sin(phase);
    return p[0] + (p[1] + p[2] * s * s) * envelope(t, p[5]);
  }

  void jacobian_row(const std::array<double, 6>& p, double t, double* row) const {
    const double phase = pi * p[3] * 1e-3 * t + p[4];
    const double s = std::sin(phase);
    const double s2 = std::sin(2.0 * phase);
    const double env = envelope(t, p[5]);
    row[0] = 1.0;
    row[1] = env;
    row[2] = s * s * env;
    row[3] = p[2] * s2 * pi * 1e-3 * t * env;
    row[4] = p[2] * s2 * env;
    row[5] = (p[1] + p[2] * s * s) * envelope_deriv(t, p[5]);
  }
};

struct GaussNewtonResult {
  std::array<double, 6> params{};
  std::array<double, 6> sigma{};
  double reduced_chi2 = 0.0;
  bool converged = false;
  int n_iterations = 0;
};

double weighted_ssr(const TrialModel& m, const FitData& d, const std::array<double, 6>& p) {
  double ssr = 0.0;
  for (std::size_t i = 0; i < d.t.size(); ++i) {
    const double r = d.y[i] - m.eval(p, d.t[i]);
    ssr += d.w[i] * r * r;
  }
  return ssr;
}

GaussNewtonResult gauss_newton(const TrialModel& m, const FitData& d, std::array<double, 6> p,
                               bool positive_decay,
                               const std::function<bool(const std::array<double, 6>&)>& in_box) {
  using Eigen::MatrixXd;
  using Eigen::VectorXd;
  const int n = static_cast<int>(d.t.size());

  GaussNewtonResult out;
  double lambda = 1e-3;
  double ssr = weighted_ssr(m, d, p);
  MatrixXd jac(n, 6);
  VectorXd resid(n);

  int iter = 0;
  for (; iter < kMaxIterations; ++iter) {
    for (int i = 0; i < n; ++i) {
      double row[6];
      m.jacobian_row(p, d.t[i], row);
      const double sw = std::sqrt(d.w[i]);
      for (int c = 0; c < 6; ++c) jac(i, c) = sw * row[c];
      resid[i] = sw * (d.y[i] - m.eval(p, d.t[i]));
    }
    const MatrixXd jtj = jac.transpose() * jac;
    const VectorXd jtr = jac.transpose() * resid;

    bool stepped = false;
    bool small_step = false;
    for (int attempt = 0; attempt < 40 && lambda < 1e15; ++attempt) {
      MatrixXd damped = jtj;
      for (int c = 0; c < 6; ++c)
        damped(c, c) += lambda * std::max(jtj(c, c), 1e-30);
      const VectorXd step = damped.ldlt().solve(jtr);
      std::array<double, 6> trial = p;
      double rel_step = 0.0;
      for (int c = 0; c < 6; ++c) {
        trial[c] += step[c];
        rel_step = std::max(rel_step, std::abs(step[c]) / (std::abs(p[c]) + 1e-12));
      }
      if ((positive_decay && !(trial[5] > 0.0)) || !in_box(trial)) {
        lambda *= 10.0;
        continue;
      }
      const double trial_ssr = weighted_ssr(m, d, trial);
      small_step = rel_step < kStepTolerance;
      // only meaningful decreases count as progress; micro-steps in a flat
      // valley are accepted exactly when they satisfy the step criterion
      const bool meaningful = trial_ssr <= ssr * (1.0 - 1e-9);
      if (std::isfinite(trial_ssr) && trial_ssr <= ssr && (meaningful || small_step)) {
        p = trial;
        ssr = trial_ssr;
        lambda = std::max(lambda / 10.0, 1e-14);
        stepped = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!stepped) break;
    if (small_step) {
      out.converged = true;
      ++iter;
      break;
    }
  }

  out.n_iterations = iter;
  out.params = p;

  // covariance from the quadratic model at the optimum
  for (int i = 0; i < n; ++i) {
    double row[6];
    m.jacobian_row(p, d.t[i], row);
    const double sw = std::sqrt(d.w[i]);
    for (int c = 0; c < 6; ++c) jac(i, c) = sw * row[c];
  }
  const MatrixXd jtj = jac.transpose() * jac;
  const int dof = std::max(1, n - 6);
  out.reduced_chi2 = ssr / dof;

  // scale-normalized inverse with an eigenvalue floor: near-degenerate
  // directions report huge, never spuriously tiny, uncertainties
  VectorXd dscale(6);
  for (int c = 0; c < 6; ++c) dscale[c] = 1.0 / std::sqrt(std::max(jtj(c, c), 1e-300));
  const MatrixXd corr = dscale.asDiagonal() * jtj * dscale.asDiagonal();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(corr);
  const double floor = 1e-12 * std::max(es.eigenvalues().maxCoeff(), 1e-300);
  MatrixXd corr_inv = MatrixXd::Zero(6, 6);
  for (int k = 0; k < 6; ++k) {
    const double ev = std::max(es.eigenvalues()[k], floor);
    corr_inv += es.eigenvectors().col(k) * es.eigenvectors().col(k).transpose() / ev;
  }
  const MatrixXd cov = dscale.asDiagonal() * corr_inv * dscale.asDiagonal() * (ssr / dof);
  for (int c = 0; c < 6; ++c) out.sigma[c] = std::sqrt(std::max(0.0, cov(c, c)));
  return out;
}

/// Linear least squares for (y0, amplitudes, phase) at fixed (f, tau) via
/// A1 + A2 sin^2(pi f t + phi) = (A1 + A2/2) - (A2/2)cos(2 pi f t + 2 phi).
std::pair<std::array<double, 6>, double> linear_completion(const FitData& d, double f_mhz,
                                                           double tau_ns, bool with_beat) {
  const int n = static_cast<int>(d.t.size());
  const int cols = with_beat ? 4 : 2;
  Eigen::MatrixXd design(n, cols);
  Eigen::VectorXd rhs(n);
  for (int i = 0; i < n; ++i) {
    const double sw = std::sqrt(d.w[i]);
    const double e = std::exp(-d.t[i] / tau_ns);
    design(i, 0) = sw;
    design(i, 1) = sw * e;
    if (with_beat) {
      const double ang = two_pi * f_mhz * 1e-3 * d.t[i];
      design(i, 2) = sw * e * std::cos(ang);
      design(i, 3) = sw * e * std::sin(ang);
    }
    rhs[i] = sw * d.y[i];
  }
  const Eigen::VectorXd beta = design.colPivHouseholderQr().solve(rhs);
  const double ssr = (design * beta - rhs).squaredNorm();

  std::array<double, 6> p{beta[0], beta[1], 0.0, f_mhz, 0.0, tau_ns};
  if (with_beat) {
    const double a2 = 2.0 * std::hypot(beta[2], beta[3]);
    p[2] = a2;
    p[4] = 0.5 * std::atan2(beta[3], -beta[2]);
    p[1] = beta[1] - 0.5 * a2;
  }
  return {p, ssr};
}

/// Deterministic start candidates: beat frequency from the spectrum peak
/// refined on the detrended residual, decay candidates from log-linear
/// envelope fits and local maxima, amplitudes by linear least squares.
std::vector<std::array<double, 6>> initial_guess_from_data(const CorrelationTrace& trace,
                                                           std::pair<double, double> window,
                                                           const FitData& d) {
  const int n = static_cast<int>(d.t.size());

  double f0 = 0.0;
  try {
    f0 = beat_spectrum(trace, window).peak_freq_mhz;
  } catch (const WindowError&) {
  }
  if (f0 <= 0.0) f0 = 1e3 / (window.second - window.first);

  const double y_min = *std::min_element(d.y.begin(), d.y.end());
  const double y_max = *std::max_element(d.y.begin(), d.y.end());

  std::vector<double> tau_candidates{(window.second - window.first) / 3.0};

  // log-linear regressions of the decaying part, with and without an
  // offset estimate (the offset-free variant is exact for a plain decay)
  for (const double offset : {y_min, 0.0}) {
    double st = 0, sy = 0, stt = 0, sty = 0;
    int m = 0;
    for (int i = 0; i < n; ++i) {
      const double v = d.y[i] - offset;
      if (v <= 0.02 * (y_max - y_min)) continue;
      const double ly = std::log(v);
      st += d.t[i];
      sy += ly;
      stt += d.t[i] * d.t[i];
      sty += d.t[i] * ly;
      ++m;
    }
    const double denom = m * stt - st * st;
    if (m >= 4 && denom > 0) {
      const double slope = (m * sty - st * sy) / denom;
      if (slope < -1e-9)
        tau_candidates.push_back(
            std::clamp(-1.0 / slope, 0.5, 10.0 * (window.second - window.first)));
    }
  }

  // envelope decay through local maxima
  {
    std::vector<std::pair<double, double>> peaks;
    for (int i = 1; i + 1 < n; ++i)
      if (d.y[i] >= d.y[i - 1] && d.y[i] >= d.y[i + 1] && d.y[i] > y_min)
        peaks.push_back({d.t[i], d.y[i] - y_min});
    if (peaks.size() >= 3) {
      double st = 0, sy = 0, stt = 0, sty = 0;
      for (auto [t, v] : peaks) {
        const double ly = std::log(std::max(v, 1e-300));
        st += t;
        sy += ly;
        stt += t * t;
        sty += t * ly;
      }
      const double m = static_cast<double>(peaks.size());
      const double denom = m * stt - st * st;
      if (denom > 0) {
        const double slope = (m * sty - st * sy) / denom;
        if (slope < -1e-9)
          tau_candidates.push_back(
              std::clamp(-1.0 / slope, 0.5, 10.0 * (window.second - window.first)));
      }
    }
  }

  std::array<double, 6> best_plain{};
  double ssr_plain = std::numeric_limits<double>::infinity();
  for (double tau : tau_candidates) {
    const auto [pp, sp] = linear_completion(d, f0, tau, false);
    if (sp < ssr_plain) {
      ssr_plain = sp;
      best_plain = pp;
    }
  }

  // Refine the beat frequency on the envelope-detrended residual, where the
  // oscillation is not buried under the decay's low-frequency lobe.
  {
    ArrayXcd resid(n);
    for (int i = 0; i < n; ++i)
      resid[i] = d.y[i] - best_plain[0] - best_plain[1] * std::exp(-d.t[i] / best_plain[5]);
    resid -= resid.mean();
    const ArrayXcd spec = fft_forward(resid);
    int peak = 1;
    for (int k = 2; k <= n / 2; ++k)
      if (std::norm(spec[k]) > std::norm(spec[peak])) peak = k;
    const double f_resid = 1e3 * peak / (n * (d.t[1] - d.t[0]));
    if (f_resid > 0.0) f0 = f_resid;
  }

  std::array<double, 6> best_beat{};
  double ssr_beat = std::numeric_limits<double>::infinity();
  for (double tau : tau_candidates) {
    const auto [pb, sb] = linear_completion(d, f0, tau, true);
    if (sb < ssr_beat) {
      ssr_beat = sb;
      best_beat = pb;
    }
  }
  // A genuine beat beats the plain envelope by orders of magnitude; without
  // that margin the oscillation terms only chase envelope curvature and the
  // beatless start keeps the decay parameter identifiable. Both starts are
  // offered to the optimizer, best final residual wins.
  if (ssr_beat < 0.25 * ssr_plain) return {best_beat, best_plain};
  return {best_plain, best_beat};
}

void canonicalize(FitResult& r) {
  if (r.f_mhz < 0.0) {  // sin^2(-x) = sin^2(x)
    r.f_mhz = -r.f_mhz;
    r.phi_rad = -r.phi_rad;
  }
  if (r.a2 < 0.0) {
    r.a1 += r.a2;
    r.a2 = -r.a2;
    r.phi_rad += pi / 2.0;
  }
  r.phi_rad = std::remainder(r.phi_rad, pi);
}

}  // namespace

FitResult fit_decaying_beat(const CorrelationTrace& trace, std::pair<double, double> window_ns,
                            const std::optional<FitResult>& initial_guess, FitWeights weights) {
  const FitData d = gather(trace, window_ns, weights, kMinFitBins);

  TrialModel model;
  model.envelope = [](double t, double tau) { return std::exp(-t / tau); };
  model.envelope_deriv = [](double t, double tau) { return std::exp(-t / tau) * t / (tau * tau); };

  std::vector<std::array<double, 6>> starts;
  if (initial_guess) {
    starts.push_back({initial_guess->y0, initial_guess->a1, initial_guess->a2,
                      initial_guess->f_mhz, initial_guess->phi_rad, initial_guess->tau_ns});
  } else {
    starts = initial_guess_from_data(trace, window_ns, d);
  }

  // keep the oscillation below the data's Nyquist frequency
  const double f_max = 1e3 / (2.0 * trace.bin_ns);
  auto in_box = [f_max](const std::array<double, 6>& p) {
    return std::abs(p[3]) <= f_max;
  };
  GaussNewtonResult g;
  double best_ssr = std::numeric_limits<double>::infinity();
  for (const auto& p0 : starts) {
    const GaussNewtonResult cand = gauss_newton(model, d, p0, true, in_box);
    const double ssr = weighted_ssr(model, d, cand.params);
    if (ssr < best_ssr) {
      best_ssr = ssr;
      g = cand;
    }
  }
  FitResult out;
  out.y0 = g.params[0];
  out.a1 = g.params[1];
  out.a2 = g.params[2];
  out.f_mhz = g.params[3];
  out.phi_rad = g.params[4];
  out.tau_ns = g.params[5];
  out.param_uncertainties = g.sigma;
  out.reduced_chi2 = g.reduced_chi2;
  out.converged = g.converged;
  out.n_iterations = g.n_iterations;
  canonicalize(out);
  return out;
}

MotionalFitResult fit_motional(const CorrelationTrace& trace, std::pair<double, double> window_ns,
                               double natural_tau_ns, double wavelength_nm, FitWeights weights) {
  const FitData d = gather(trace, window_ns, weights, kMinFitBins);
  const double k_per_ns = two_pi / (wavelength_nm * 1e-9) * 1e-9;  // rad/m * s/ns

  TrialModel model;
  model.envelope = [natural_tau_ns, k_per_ns](double t, double v) {
    const double arg = k_per_ns * v * t;
    return std::exp(-t / natural_tau_ns - 0.5 * arg * arg);
  };
  model.envelope_deriv = [natural_tau_ns, k_per_ns](double t, double v) {
    const double arg = k_per_ns * v * t;
    return std::exp(-t / natural_tau_ns - 0.5 * arg * arg) * (-k_per_ns * k_per_ns * v * t * t);
  };

  // seed the oscillation parameters from the free-tau fit
  FitResult seed;
  try {
    seed = fit_decaying_beat(trace, window_ns, std::nullopt, weights);
  } catch (const WindowError&) {
    throw;
  }

  // coarse deterministic scan for the motional velocity
  double best_v = 0.0;
  double best_ssr = std::numeric_limits<double>::infinity();
  for (double v = 0.0; v <= 20.0; v += 0.5) {
    std::array<double, 6> trial{seed.y0, seed.a1, seed.a2, seed.f_mhz, seed.phi_rad, v};
    const double ssr = weighted_ssr(model, d, trial);
    if (ssr < best_ssr) {
      best_ssr = ssr;
      best_v = v;
    }
  }

  std::array<double, 6> p0{seed.y0, seed.a1, seed.a2, seed.f_mhz, seed.phi_rad, best_v};
  const double f_max = 1e3 / (2.0 * trace.bin_ns);
  auto in_box = [f_max](const std::array<double, 6>& p) {
    return std::abs(p[3]) <= f_max && std::abs(p[5]) < 1e4;
  };
  const GaussNewtonResult g = gauss_newton(model, d, p0, false, in_box);

  MotionalFitResult out;
  out.v_t_mps = std::abs(g.params[5]);
  out.reduced_chi2 = g.reduced_chi2;
  out.converged = g.converged;
  out.params.y0 = g.params[0];
  out.params.a1 = g.params[1];
  out.params.a2 = g.params[2];
  out.params.f_mhz = g.params[3];
  out.params.phi_rad = g.params[4];
  out.params.tau_ns = natural_tau_ns;
  out.params.param_uncertainties = g.sigma;
  out.params.reduced_chi2 = g.reduced_chi2;
  out.params.converged = g.converged;
  out.params.n_iterations = g.n_iterations;
  canonicalize(out.params);
  return out;
}

double equivalent_width_ns(const CorrelationTrace& trace) {
  const double peak = trace.peak();
  if (peak <= 0.0) return 0.0;
  return trace.total() * trace.bin_ns / peak;
}

// ---------------------------------------------------------------------------
// Scans
// ---------------------------------------------------------------------------

std::vector<FilterWidthPoint> scan_filter_width(const Scenario& base,
                                                const std::vector<double>& widths_mhz,
                                                double od_cap) {
  if (base.filter.model != FilterModel::two_level_doppler)
    throw std::invalid_argument("scan_filter_width: base must use the two_level_doppler filter");

  const FilterTransmission t_src = build_transmission(base.filter, base.grid);
  FilterSpec extra = base.filter;  // same cell species and temperature
  const ArrayXd shape = absorption_shape(extra, base.grid);

  auto composed_trace = [&](double od_extra) {
    FilterTransmission t_total = t_src;
    if (od_extra > 0.0) {
      extra.od = od_extra;
      t_total = compose(build_transmission(extra, base.grid), t_src);
    }
    return ccf(base.source, t_total, base.motional, base.detector_bin_ns);
  };

  std::vector<FilterWidthPoint> out;
  for (double w : widths_mhz) {
    FilterWidthPoint pt;
    pt.width_mhz = w;
    if (w <= 0.0) {
      pt.od = 0.0;
    } else if (width_from_absorption_shape(shape, base.grid, od_cap) < w) {
      pt.reachable = false;
      pt.od = od_cap;
      out.push_back(pt);
      continue;
    } else {
      double lo = 0.0, hi = od_cap;
      for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        (width_from_absorption_shape(shape, base.grid, mid) < w ? lo : hi) = mid;
      }
      pt.od = 0.5 * (lo + hi);
    }
    pt.trace = composed_trace(pt.od);
    pt.zero_delay = pt.trace.values[pt.trace.index_of_delay(0.0)];
    out.push_back(pt);
  }
  return out;
}

std::vector<OdScanPoint> scan_od(const Scenario& base, const std::vector<double>& ods) {
  std::vector<OdScanPoint> out;
  for (double od : ods) {
    FilterSpec spec = base.filter;
    spec.od = od;
    const FilterTransmission t = build_transmission(spec, base.grid);
    OdScanPoint pt;
    pt.od = od;
    pt.trace = ccf(base.source, t, base.motional, base.detector_bin_ns);
    pt.equivalent_width_ns = equivalent_width_ns(pt.trace);
    out.push_back(pt);
  }
  return out;
}

}  // namespace biphoton
