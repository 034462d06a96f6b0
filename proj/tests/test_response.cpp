#include <doctest.h>

#include <random>

#include "biphoton/filter.hpp"
#include "biphoton/response.hpp"
#include "biphoton/scenario.hpp"
#include "oracles.hpp"

using namespace biphoton;

namespace {

const FrequencyGrid kSmallGrid{16384.0, 1 << 14};

// Probe line (e, g) plus a far-manifold pump transition (p, g); with the
// pump off this is the plain two-level probe problem.
DrivenSystemSpec two_level_spec(double linewidth = 6.05, double rabi = 0.0, double detuning = 0.0) {
  DrivenSystemSpec d;
  d.scheme.label = "two_level";
  d.scheme.levels = {Level{"g", 0.0, 0.0}, Level{"e", 0.0, linewidth}, Level{"p", 0.0, 5.75}};
  d.scheme.transitions = {Transition{"e", "g", 1.0}, Transition{"p", "g", 1.0}};
  d.pump = PumpField{detuning, rabi, 795.0, Vector3d{0, 0, 1}};
  d.pump_transition = {"p", "g"};
  d.probe_transition = {"e", "g"};
  d.ground_relaxation_mhz = 0.0;
  return d;
}

DrivenSystemSpec builtin_driven() {
  Scenario s;
  REQUIRE(find_builtin("on_resonant", s));
  REQUIRE(s.filter.driven.has_value());
  return *s.filter.driven;
}

}  // namespace

TEST_SUITE_BEGIN("response");

TEST_CASE("lorentzian_chi matches the defining formula") {
  CHECK(lorentzian_chi(0.0, 6.0).real() == doctest::Approx(-1.0 / 3.0).epsilon(1e-14));
  CHECK(lorentzian_chi(0.0, 6.0).imag() == doctest::Approx(0.0));
  const cplx v = lorentzian_chi(3.0, 6.0);  // 1/(3i - 3) = (-1 - i)/6
  CHECK(v.real() == doctest::Approx(-1.0 / 6.0).epsilon(1e-14));
  CHECK(v.imag() == doctest::Approx(-1.0 / 6.0).epsilon(1e-14));
  CHECK_THROWS_AS(lorentzian_chi(0.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(lorentzian_chi(0.0, -2.0), std::domain_error);
}

TEST_CASE("lorentzian_chi conjugate symmetry") {
  for (double d : {0.1, 1.0, 5.5, 80.0, 1234.5}) {
    const cplx a = lorentzian_chi(d, 6.05);
    const cplx b = lorentzian_chi(-d, 6.05);
    CHECK(std::abs(b - std::conj(a)) < 1e-15);
  }
}

TEST_CASE("pole_sum equals the direct image sum") {
  const double span = 16384.0;
  for (double nu : {0.0, 1.7, -300.0, 8000.0}) {
    for (const cplx g : {cplx(3.025, 0.0), cplx(-3.025, 0.0), cplx(-2.0, 40.0)}) {
      cplx direct = 0.0;
      for (int m = -4000; m <= 4000; ++m) direct += 1.0 / (cplx(0.0, 1.0) * (nu + m * span) + g);
      const cplx periodized = pole_sum(nu, 0.0, g, span);
      // the truncated direct sum converges ~ 1/M
      CHECK(std::abs(periodized - direct) < 2e-8);
    }
  }
}

TEST_CASE("pole_sum keeps conjugate symmetry for a centered line") {
  const double span = 16384.0;
  for (double nu : {0.5, 12.0, 700.0}) {
    const cplx a = pole_sum(nu, 0.0, cplx(-3.0, 0.0), span);
    const cplx b = pole_sum(-nu, 0.0, cplx(-3.0, 0.0), span);
    CHECK(std::abs(b - std::conj(a)) < 1e-15);
  }
}

TEST_CASE("doppler_average with v_t = 0 reduces to the single class") {
  const ThermalDistribution dist{0.0, 3001};
  auto chi = [](double d, double) { return lorentzian_chi(d, 6.0); };
  const auto prof = doppler_average(chi, dist, two_pi / 780e-9, kSmallGrid);
  for (int i = 0; i < kSmallGrid.n_points; i += 997) {
    const cplx expect = lorentzian_chi(kSmallGrid.detuning_mhz(i), 6.0);
    CHECK(std::abs(prof.values[i] - expect) == 0.0);
  }
}

TEST_CASE("doppler_average 50% width agrees with adaptive quadrature") {
  // 100 C cell: most-probable speed 270 m/s at 780 nm, 6-MHz line
  const double v_t = 270.0;
  const double k = two_pi / 780e-9;
  const ThermalDistribution dist{v_t, 3001};
  auto chi = [](double d, double) { return lorentzian_chi(d, 6.0); };

  auto trapezoid_at = [&](double delta) {
    cplx acc = 0.0;
    for (const auto& [v, w] : velocity_nodes(dist))
      acc += w * chi(delta - k * v / two_pi * 1e-6, v);
    return acc;
  };
  auto oracle_at = [&](double delta) { return oracle::doppler_chi(chi, delta, v_t, k, 1e-9); };

  auto full_width = [](const std::function<cplx(double)>& eval) {
    const double peak = -eval(0.0).real();
    double lo = 0.0, hi = 4000.0;
    for (int i = 0; i < 60; ++i) {
      const double mid = 0.5 * (lo + hi);
      (-eval(mid).real() > 0.5 * peak ? lo : hi) = mid;
    }
    return lo + hi;  // full width = 2 * half width
  };

  const double w_trap = full_width(trapezoid_at);
  const double w_oracle = full_width(oracle_at);
  CHECK(w_trap == doctest::Approx(w_oracle).epsilon(0.02));
  CHECK(w_oracle > 450.0);  // Doppler-dominated
  CHECK(w_oracle < 700.0);
}

TEST_CASE("doppler_average converges: doubling classes changes nothing above 1e-6") {
  auto chi = [](double d, double) { return lorentzian_chi(d, 6.05); };
  const double k = two_pi / 780e-9;
  const auto a = doppler_average(chi, ThermalDistribution{270.0, 3001}, k, kSmallGrid);
  const auto b = doppler_average(chi, ThermalDistribution{270.0, 6001}, k, kSmallGrid);
  double worst = 0.0;
  for (int i = 0; i < kSmallGrid.n_points; ++i)
    worst = std::max(worst, std::abs(a.values[i] - b.values[i]) / std::abs(b.values[i]));
  CHECK(worst < 1e-6);
}

TEST_CASE("doppler_average keeps conjugate symmetry about line center") {
  auto chi = [](double d, double) { return lorentzian_chi(d, 6.0); };
  const auto prof =
      doppler_average(chi, ThermalDistribution{150.0, 501}, two_pi / 780e-9, kSmallGrid);
  for (int i = 1; i < kSmallGrid.n_points / 2; i += 397) {
    const cplx a = prof.values[i];
    const cplx b = prof.values[kSmallGrid.n_points - i];
    CHECK(std::abs(b - std::conj(a)) < 1e-12);
  }
}

TEST_CASE("driven_steady_state: no light leaves everything in the ground state") {
  const auto rho = driven_steady_state(two_level_spec(6.05, 0.0), 0.0);
  CHECK(std::abs(rho(0, 0) - cplx(1.0, 0.0)) < 1e-12);
  CHECK(std::abs(rho(1, 1)) < 1e-12);
}

TEST_CASE("driven_steady_state: strong resonant pump saturates to 1/2") {
  // rabi = 20x the pumped linewidth
  const auto rho = driven_steady_state(two_level_spec(6.05, 115.0, 0.0), 0.0);
  CHECK(std::abs(rho(2, 2).real() - 0.5) < 0.005);
}

TEST_CASE("driven_steady_state: randomized schemes stay physical") {
  std::mt19937 rng(20260809);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    const int n_excited = 1 + static_cast<int>(unif(rng) * 3.0);
    DrivenSystemSpec d;
    d.scheme.label = "random_" + std::to_string(trial);
    d.scheme.levels.push_back(Level{"g0", 0.0, 0.0});
    d.scheme.levels.push_back(Level{"g1", -3035.7 * unif(rng), 0.0});
    for (int e = 0; e < n_excited; ++e)
      d.scheme.levels.push_back(
          Level{"e" + std::to_string(e), 400.0 * (unif(rng) - 0.5), 1.0 + 10.0 * unif(rng)});
    for (int e = 0; e < n_excited; ++e) {
      d.scheme.transitions.push_back(
          Transition{"e" + std::to_string(e), "g0", cplx(0.2 + unif(rng), 0.0)});
      d.scheme.transitions.push_back(
          Transition{"e" + std::to_string(e), "g1", cplx(0.2 + unif(rng), 0.0)});
    }
    d.pump = PumpField{200.0 * (unif(rng) - 0.5), 60.0 * unif(rng), 795.0, Vector3d{0, 0, 1}};
    d.pump_transition = {"e0", "g0"};
    d.probe_transition = {n_excited > 1 ? "e1" : "e0", "g0"};
    d.ground_relaxation_mhz = 0.05 + unif(rng);

    const auto rho = driven_steady_state(d, 300.0 * (unif(rng) - 0.5));
    CHECK(std::abs(rho.trace() - cplx(1.0, 0.0)) < 1e-12);
    CHECK((rho - rho.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (rho + rho.adjoint()));
    CHECK(es.eigenvalues().minCoeff() > -1e-9);
  }
}

TEST_CASE("driven_steady_state: two dark grounds without transit is singular") {
  DrivenSystemSpec d = two_level_spec();
  d.scheme.levels.push_back(Level{"g2", -3035.7, 0.0});
  d.scheme.transitions.push_back(Transition{"e", "g2", 1.0});
  d.ground_relaxation_mhz = 0.0;
  CHECK_THROWS_AS(driven_steady_state(d, 0.0), SteadyStateError);
}

TEST_CASE("probe_response reduction: pump off, single class equals lorentzian_chi") {
  const auto prof = probe_response(two_level_spec(6.05), ThermalDistribution{0.0, 1}, kSmallGrid);
  for (int i = 0; i < kSmallGrid.n_points; i += 131) {
    const cplx expect = lorentzian_chi(kSmallGrid.detuning_mhz(i), 6.05);
    CHECK(std::abs(prof.values[i] - expect) < 1e-10);
  }
}

TEST_CASE("probe_response reduction: pump off equals doppler_average of lorentzian_chi") {
  const ThermalDistribution dist{270.0, 201};
  const auto a = probe_response(two_level_spec(6.05), dist, kSmallGrid);
  auto chi = [](double d, double) { return lorentzian_chi(d, 6.05); };
  const auto b = doppler_average(chi, dist, two_pi / 780e-9, kSmallGrid);
  double worst = 0.0;
  for (int i = 0; i < kSmallGrid.n_points; ++i)
    worst = std::max(worst, std::abs(a.values[i] - b.values[i]) / std::abs(b.values[i]));
  CHECK(worst < 1e-9);
}

TEST_CASE("probe_response stays finite for strong driving") {
  for (double rabi : {6.05, 30.0, 60.5}) {
    const auto prof =
        probe_response(two_level_spec(6.05, rabi, 0.0), ThermalDistribution{0.0, 1}, kSmallGrid);
    CHECK(prof.values.allFinite());
  }
}

TEST_CASE("driven pump opens a transparency window at equal optical depth") {
  FilterSpec fs;
  fs.model = FilterModel::driven_multilevel;
  fs.od = 10.0;
  fs.linewidth_mhz = 6.05;
  fs.v_t_mps = 270.0;
  fs.wavelength_nm = 780.0;
  fs.driven = builtin_driven();
  const FilterTransmission t_driven = build_transmission(fs, kSmallGrid);

  FilterSpec fs0 = fs;
  fs0.driven->pump.rabi_mhz = 0.0;
  const FilterTransmission t_undriven = build_transmission(fs0, kSmallGrid);

  for (double line : {-60.3, 60.3}) {
    const int i = kSmallGrid.index_of(line);
    CHECK(std::norm(t_driven.t_values[i]) > std::norm(t_undriven.t_values[i]));
  }
}

TEST_CASE("undriven_reference matches the velocity-class average of its lines") {
  // dual route: FFT shift-kernel convolution vs direct trapezoid summation
  // of the same grid-periodized line profile
  // 1-MHz resolution so the shift-kernel convolution resolves the 3-MHz
  // half-width; the g2 lines are dropped to keep the span compact
  const FrequencyGrid grid{4096.0, 1 << 12};
  DrivenSystemSpec d = builtin_driven();
  d.pump.rabi_mhz = 0.0;
  std::erase_if(d.scheme.transitions, [](const Transition& tr) { return tr.lower == "g2"; });
  const auto conv = undriven_reference(d, 270.0, grid);

  // lines seen by the probe: (e1|e2, g1), weight 1/2 each, width G/2 + gt
  const double gamma = 0.5 * 6.05 + d.ground_relaxation_mhz;
  std::vector<double> lines;
  for (const auto& tr : d.scheme.transitions) {
    if (tr.upper == d.pump_transition.upper) continue;
    const double up = d.scheme.find(tr.upper)->energy_offset_mhz;
    const double lo = d.scheme.find(tr.lower)->energy_offset_mhz;
    lines.push_back(up - lo);
  }
  REQUIRE(lines.size() == 2);
  auto chi = [&](double delta, double) {
    cplx acc = 0.0;
    for (double line : lines)
      acc += 0.5 * pole_sum(delta, line, cplx(-gamma, 0.0), grid.span_mhz);
    return acc;
  };
  const auto trap =
      doppler_average(chi, ThermalDistribution{270.0, 3001}, two_pi / 780e-9, grid);

  const double scale = conv.values.abs().maxCoeff();
  double worst = 0.0;
  for (int i = 0; i < grid.n_points; ++i)
    worst = std::max(worst, std::abs(conv.values[i] - trap.values[i]) / scale);
  CHECK(worst < 1e-5);
}

TEST_SUITE_END();
