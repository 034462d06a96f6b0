#include <doctest.h>

#include "biphoton/pair.hpp"
#include "biphoton/scenario.hpp"
#include "oracles.hpp"

using namespace biphoton;

namespace {

const FrequencyGrid kGrid{16384.0, 1 << 17};

BiphotonSpec single_path() {
  BiphotonSpec s;
  s.paths = {DecayPath{0.0, cplx(1.0, 0.0), 6.05}};
  s.upper_linewidth_mhz = 8.0;
  return s;
}

BiphotonSpec two_paths() {
  BiphotonSpec s;
  s.paths = {DecayPath{-60.3, cplx(1.0, 0.0), 6.05}, DecayPath{60.3, cplx(1.0, 0.0), 6.05}};
  s.upper_linewidth_mhz = 8.0;
  return s;
}

FilterTransmission no_filter(const FrequencyGrid& grid = kGrid) {
  FilterSpec f;
  f.model = FilterModel::none;
  return build_transmission(f, grid);
}

FilterTransmission doppler_filter(double od, const FrequencyGrid& grid = kGrid) {
  FilterSpec f;
  f.model = FilterModel::two_level_doppler;
  f.od = od;
  f.linewidth_mhz = 6.05;
  f.v_t_mps = 270.0;
  f.wavelength_nm = 780.0;
  return build_transmission(f, grid);
}

double relative_l2_against_oracle(const BiphotonSpec& spec, double t_max_ns) {
  const ArrayXcd psi = pair_amplitude(spec, no_filter());
  double num = 0.0, den = 0.0;
  for (int i = 0; i < kGrid.n_points; ++i) {
    const double tau_us = kGrid.time_us(i);
    if (tau_us < 0.0 || tau_us > t_max_ns * 1e-3) continue;
    const cplx ref = oracle::closed_form_psi(spec, tau_us);
    num += std::norm(psi[i] - ref);
    den += std::norm(ref);
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST_SUITE_BEGIN("pair");

TEST_CASE("single-path source spectrum is a Lorentzian of the stated width") {
  const BiphotonSpec spec = single_path();
  const ArrayXcd phi = source_spectrum(spec, kGrid);
  const double peak = std::norm(phi[kGrid.index_of(0.0)]);
  // |phi|^2 falls to half at +-linewidth/2
  const double at_half = std::norm(phi[kGrid.index_of(6.05 / 2.0)]);
  CHECK(at_half == doctest::Approx(0.5 * peak).epsilon(0.03));
  const double inner = std::norm(phi[kGrid.index_of(6.05 / 2.0 - 0.5)]);
  const double outer = std::norm(phi[kGrid.index_of(6.05 / 2.0 + 0.5)]);
  CHECK(inner > 0.5 * peak);
  CHECK(outer < 0.5 * peak);
}

TEST_CASE("two equal paths make a doublet split by the path separation") {
  const ArrayXcd phi = source_spectrum(two_paths(), kGrid);
  for (double center : {-60.3, 60.3}) {
    const double at_center = std::abs(phi[kGrid.index_of(center)]);
    CHECK(at_center > 0.9 * phi.abs().maxCoeff());
  }
  CHECK(std::abs(phi[kGrid.index_of(0.0)]) < 0.2 * phi.abs().maxCoeff());
}

TEST_CASE("a zero-amplitude path drops out exactly") {
  BiphotonSpec both = two_paths();
  both.paths[1].amplitude = 0.0;
  BiphotonSpec only;
  only.paths = {both.paths[0]};
  only.upper_linewidth_mhz = both.upper_linewidth_mhz;
  const ArrayXcd a = source_spectrum(both, kGrid);
  const ArrayXcd b = source_spectrum(only, kGrid);
  CHECK((a - b).abs().maxCoeff() == 0.0);
}

TEST_CASE("FFT amplitude matches the closed-form path sum to 1e-6") {
  CHECK(relative_l2_against_oracle(single_path(), 200.0) < 1e-6);
  CHECK(relative_l2_against_oracle(two_paths(), 200.0) < 1e-6);

  BiphotonSpec mixed;
  mixed.paths = {DecayPath{-31.0, cplx(0.8, 0.2), 5.0}, DecayPath{12.0, cplx(-0.4, 0.9), 7.5},
                 DecayPath{88.0, cplx(0.1, -0.3), 6.05}};
  mixed.upper_linewidth_mhz = 8.0;
  CHECK(relative_l2_against_oracle(mixed, 200.0) < 1e-6);
}

TEST_CASE("unfiltered single-path intensity decays with the natural lifetime") {
  const ArrayXcd psi = pair_amplitude(single_path(), no_filter());
  const double tau_nat_us = 1.0 / (two_pi * 6.05);
  for (double t_ns : {5.0, 20.0, 50.0, 100.0}) {
    const int i = static_cast<int>(std::lround(t_ns * 1e-3 / kGrid.dt_us()));
    const double expect = std::norm(psi[kGrid.index_of(0.0) + 1]) *
                          std::exp(-(t_ns * 1e-3 - kGrid.dt_us()) / tau_nat_us);
    CHECK(std::norm(psi[i]) == doctest::Approx(expect).epsilon(0.01));
  }
}

TEST_CASE("two unfiltered paths beat at exactly the splitting") {
  const ArrayXcd psi = pair_amplitude(two_paths(), no_filter());
  const double beat_period_ns = 1e3 / 120.6;
  for (int k = 1; k <= 4; ++k) {
    const double t_max = k * beat_period_ns;
    const double t_min = (k - 0.5) * beat_period_ns;
    const auto at = [&](double t_ns) {
      return std::norm(psi[static_cast<int>(std::lround(t_ns * 1e-3 / kGrid.dt_us()))]);
    };
    CHECK(at(t_min) < 1e-3 * at(t_max));
  }
}

TEST_CASE("strong filtering concentrates the trace below a nanosecond") {
  const ArrayXcd psi = pair_amplitude(single_path(), doppler_filter(10.0));
  double inside = 0.0, total = 0.0;
  for (int i = 0; i < kGrid.n_points; ++i) {
    const double e = std::norm(psi[i]);
    total += e;
    if (std::abs(kGrid.time_us(i)) < 1e-3) inside += e;
  }
  CHECK(inside / total > 0.8);
}

TEST_CASE("pair_amplitude rejects mismatched grids") {
  const FrequencyGrid other{16384.0, 1 << 14};
  const ArrayXcd src = source_spectrum(single_path(), other);
  CHECK_THROWS_AS(pair_amplitude(src, no_filter(), other), GridMismatchError);
}

TEST_CASE("joint amplitude is causal in the first detection") {
  const ArrayXcd psi = pair_amplitude(single_path(), no_filter());
  CHECK(joint_amplitude(single_path(), psi, kGrid, -0.5, 10.0) == cplx(0.0, 0.0));
  CHECK(joint_amplitude(single_path(), psi, kGrid, -100.0, -90.0) == cplx(0.0, 0.0));
}

TEST_CASE("joint amplitude factorizes into upper decay and conditional delay") {
  const BiphotonSpec spec = single_path();
  const ArrayXcd psi = pair_amplitude(spec, no_filter());
  const double rate = amplitude_rate_per_us(spec.upper_linewidth_mhz);
  for (double t1 : {0.5, 3.0, 11.0}) {
    for (double dt : {1.0, 7.5, 40.0}) {
      const double lhs = std::abs(joint_amplitude(spec, psi, kGrid, t1, t1 + dt));
      const double rhs =
          std::abs(joint_amplitude(spec, psi, kGrid, 0.0, dt)) * std::exp(-rate * t1 * 1e-3);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
  }
}

TEST_CASE("a fast upper state collapses the first detection into one bin") {
  BiphotonSpec spec = single_path();
  spec.upper_linewidth_mhz *= 100.0;  // 100x the default
  const ArrayXcd psi = pair_amplitude(spec, no_filter());
  const double tau0 = 5.0;  // fixed conditional delay, ns
  double first_bin = 0.0, total = 0.0;
  for (double t1 = 0.0; t1 < 20.0; t1 += 0.01) {
    const double w = std::norm(joint_amplitude(spec, psi, kGrid, t1, t1 + tau0));
    total += w;
    if (t1 < 1.0) first_bin += w;
  }
  CHECK(first_bin / total > 0.99);
}

TEST_CASE("motional suppression factor hits exp(-1/2) at 1/(k v_t)") {
  const MotionalParams m{6.6, 780.0};
  const double k = two_pi / 780e-9;
  const double tau_ns = 1e9 / (k * 6.6);
  CHECK(tau_ns == doctest::Approx(18.81).epsilon(1e-3));
  CHECK(motional_suppression(m, tau_ns) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
}

TEST_CASE("zero thermal velocity leaves the binned trace untouched") {
  const ArrayXcd psi = pair_amplitude(single_path(), no_filter());
  const auto a = ccf(psi, kGrid, MotionalParams{0.0, 780.0}, 1.0);
  const auto b = ccf(psi, kGrid, MotionalParams{6.6, 780.0}, 1.0);
  const int i0 = a.index_of_delay(0.0);
  CHECK(a.values[i0] == doctest::Approx(b.values[i0]).epsilon(1e-3));
  const int i40 = a.index_of_delay(40.0);
  const double expected = motional_suppression(MotionalParams{6.6, 780.0}, 40.0);
  CHECK(b.values[i40] / a.values[i40] == doctest::Approx(expected).epsilon(2e-3));
}

TEST_CASE("traces are nonnegative with causal support") {
  for (bool filtered : {false, true}) {
    const auto t = filtered ? doppler_filter(10.0) : no_filter();
    const auto trace = ccf(single_path(), t, MotionalParams{6.6, 780.0}, 1.0);
    REQUIRE(!trace.values.empty());
    double total = 0.0, precursor = 0.0;
    for (std::size_t i = 0; i < trace.values.size(); ++i) {
      CHECK(trace.values[i] >= 0.0);
      total += trace.values[i];
      if (trace.delays_ns[i] < -2.0 * trace.bin_ns) precursor += trace.values[i];
    }
    CHECK(precursor < 1e-4 * total);
  }
}

TEST_CASE("trace scales by |c|^2 when amplitudes scale by c") {
  BiphotonSpec scaled = two_paths();
  const cplx c(0.3, -0.7);
  for (auto& p : scaled.paths) p.amplitude *= c;
  const auto base = ccf(two_paths(), no_filter(), MotionalParams{}, 1.0);
  const auto big = ccf(scaled, no_filter(), MotionalParams{}, 1.0);
  for (std::size_t i = 0; i < base.values.size(); ++i)
    if (base.values[i] > 1e-12 * base.peak())
      CHECK(big.values[i] / base.values[i] == doctest::Approx(std::norm(c)).epsilon(1e-11));
}

TEST_CASE("resonant pumping yields a zero-delay peak plus a beating tail") {
  Scenario s;
  REQUIRE(find_builtin("on_resonant", s));
  s.grid.n_points = 1 << 15;  // 0.5-MHz resolution is plenty for morphology
  const auto t = build_transmission(s.filter, s.grid);
  const auto trace = ccf(s.source, t, s.motional, s.detector_bin_ns);

  const int zero = trace.index_of_delay(0.0);
  int maxima = 0;
  for (std::size_t i = zero + 2; i + 1 < trace.values.size(); ++i)
    if (trace.values[i] > trace.values[i - 1] && trace.values[i] >= trace.values[i + 1] &&
        trace.values[i] > 0.01 * trace.peak())
      ++maxima;
  CHECK(maxima >= 3);
  // the sharp feature turns on at zero delay
  double before = 0.0;
  for (int i = 0; i < zero - 1; ++i) before = std::max(before, trace.values[i]);
  CHECK(trace.values[zero] > 1e3 * before);
}

TEST_CASE("collinear beams close the wavevector sum arithmetically") {
  BeamGeometry geom;
  geom.theta1_deg = geom.theta2_deg = geom.theta3_deg = 0.0;
  const auto pm = phase_match(geom);
  const double expected =
      std::abs(two_pi * (1.0 / 795.0 + 1.0 / 1324.0 - 1.0 / 1367.0 - 1.0 / 780.0)) * 1e9;
  CHECK(pm.mismatch_rad_per_m == doctest::Approx(expected).epsilon(1e-12));
  CHECK(pm.k4_angle_deg == doctest::Approx(0.0));
}

TEST_CASE("default geometry emits in plane with a small reported angle") {
  const auto pm = phase_match(BeamGeometry{});
  CHECK(pm.k4_direction.y() == 0.0);
  CHECK(std::abs(pm.k4_angle_deg) < 10.0);
  CHECK(pm.k4_direction.norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("flipping the third beam mirrors the emission direction") {
  BeamGeometry geom;
  geom.theta1_deg = geom.theta2_deg = 0.0;
  geom.theta3_deg = 2.7;
  BeamGeometry flipped = geom;
  flipped.theta3_deg = -2.7;  // sign flip, reflection about the pump axis
  const auto a = phase_match(geom);
  const auto b = phase_match(flipped);
  CHECK(a.k4_direction.x() == doctest::Approx(-b.k4_direction.x()).epsilon(1e-14));
  CHECK(a.k4_direction.z() == doctest::Approx(b.k4_direction.z()).epsilon(1e-14));
  CHECK(a.k4_angle_deg == doctest::Approx(-b.k4_angle_deg).epsilon(1e-12));
  CHECK(a.mismatch_rad_per_m == doctest::Approx(b.mismatch_rad_per_m).epsilon(1e-12));
}

TEST_CASE("grating intensity interpolates between N^2 and N") {
  CHECK(grating_intensity(50, two_pi / 780e-9, 6.6, 0.0) == doctest::Approx(2500.0));
  CHECK(grating_intensity(50, two_pi / 780e-9, 6.6, 1e6) == doctest::Approx(50.0));
  for (double t : {0.0, 3.0, 1e5}) CHECK(grating_intensity(1, two_pi / 780e-9, 6.6, t) == 1.0);
  CHECK_THROWS_AS(grating_intensity(0, 1.0, 1.0, 1.0), std::domain_error);
}

TEST_CASE("velocity class width is linewidth times wavelength") {
  CHECK(velocity_class_width(5.0, 500.0) == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(velocity_class_width(10.0, 500.0) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(velocity_class_width(5.0, 1000.0) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK_THROWS_AS(velocity_class_width(0.0, 500.0), std::domain_error);
}

TEST_SUITE_END();
