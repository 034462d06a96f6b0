#include <doctest.h>

#include "biphoton/scenario.hpp"

using namespace biphoton;

TEST_SUITE_BEGIN("scheme");

TEST_CASE("default grid resolves narrow lines inside a wide span") {
  const FrequencyGrid grid;
  CHECK(grid.n_points == (1 << 17));
  CHECK(grid.span_mhz == 16384.0);
  CHECK(grid.resolution_mhz() <= 1.0);
  CHECK(grid.time_window_us() == doctest::Approx(8.0));
}

TEST_CASE("grid axes are symmetric and DFT-ordered") {
  const FrequencyGrid grid{1024.0, 1 << 14};
  CHECK(grid.detuning_mhz(0) == 0.0);
  CHECK(grid.detuning_mhz(1) == doctest::Approx(grid.resolution_mhz()));
  CHECK(grid.detuning_mhz(grid.n_points - 1) == doctest::Approx(-grid.resolution_mhz()));
  double lo = 1e300, hi = -1e300;
  for (int i = 0; i < grid.n_points; ++i) {
    lo = std::min(lo, grid.detuning_mhz(i));
    hi = std::max(hi, grid.detuning_mhz(i));
  }
  CHECK(std::abs(lo + hi) <= grid.resolution_mhz());

  const auto order = grid.ascending_order();
  for (std::size_t i = 1; i < order.size(); ++i)
    CHECK(grid.detuning_mhz(order[i]) > grid.detuning_mhz(order[i - 1]));
  CHECK(grid.index_of(100.0) == 1600);
  CHECK(grid.detuning_mhz(grid.index_of(-321.5)) == doctest::Approx(-321.5).epsilon(1e-3));
}

TEST_CASE("builtin scenarios validate cleanly") {
  const auto all = builtin_scenarios();
  REQUIRE(all.size() >= 5);
  for (const auto& s : all) {
    CAPTURE(s.name);
    const auto violations = validate_scenario(s);
    for (const auto& v : violations) {
      CAPTURE(v.path);
      CAPTURE(v.message);
    }
    CHECK(violations.empty());
  }
}

TEST_CASE("builtin names cover both pumping regimes and the scan bases") {
  const auto names = builtin_names();
  for (const char* expected :
       {"off_resonant", "on_resonant", "on_resonant_776", "filter_width_scan", "od_scan"})
    CHECK(std::find(names.begin(), names.end(), expected) != names.end());
}

TEST_CASE("off-resonant pumping sits 1.5 GHz below the intermediate line") {
  Scenario s;
  REQUIRE(find_builtin("off_resonant", s));
  REQUIRE(!s.pumps.empty());
  CHECK(s.pumps[0].detuning_mhz == -1500.0);
  CHECK(s.filter.model == FilterModel::two_level_doppler);
}

TEST_CASE("on-resonant source carries two decay paths split by 120.6 MHz") {
  Scenario s;
  REQUIRE(find_builtin("on_resonant", s));
  REQUIRE(s.source.paths.size() == 2);
  CHECK(std::abs(s.source.paths[1].center_detuning_mhz - s.source.paths[0].center_detuning_mhz) ==
        doctest::Approx(120.6));
  CHECK(s.filter.model == FilterModel::driven_multilevel);
  CHECK(s.source.two_photon_detuning_mhz == 100.0);
}

TEST_CASE("the coupling-laser variant keeps exactly one live path") {
  Scenario s;
  REQUIRE(find_builtin("on_resonant_776", s));
  int live = 0;
  for (const auto& p : s.source.paths)
    if (p.amplitude != cplx(0.0, 0.0)) ++live;
  CHECK(live == 1);
}

TEST_CASE("validation flags a non-power-of-two grid") {
  Scenario s;
  REQUIRE(find_builtin("off_resonant", s));
  s.grid.n_points = 1000;
  const auto violations = validate_scenario(s);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].path == "grid.n_points");
}

TEST_CASE("validation flags a negative detector bin") {
  Scenario s;
  REQUIRE(find_builtin("off_resonant", s));
  s.detector_bin_ns = -1.0;
  const auto violations = validate_scenario(s);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].path == "detector_bin_ns");
}

TEST_CASE("validation walks nested structures") {
  Scenario s;
  REQUIRE(find_builtin("on_resonant", s));

  Scenario bad = s;
  bad.pumps[0].direction = Vector3d{0.0, 0.0, 2.0};
  auto v = validate_scenario(bad);
  REQUIRE(v.size() == 1);
  CHECK(v[0].path == "pumps[0].direction");

  bad = s;
  bad.filter.driven->scheme.transitions.push_back(Transition{"nowhere", "g1", 1.0});
  v = validate_scenario(bad);
  REQUIRE(v.size() == 1);
  CHECK(v[0].path.find("filter.driven.scheme.transitions") == 0);

  bad = s;
  bad.filter.model = FilterModel::two_level_doppler;  // driven payload now stray
  v = validate_scenario(bad);
  REQUIRE(v.size() == 1);
  CHECK(v[0].path == "filter.driven");

  bad = s;
  bad.source.paths.clear();
  v = validate_scenario(bad);
  REQUIRE(v.size() == 1);
  CHECK(v[0].path == "source.paths");

  bad = s;
  bad.fit_window_ns = {45.0, 3.0};
  v = validate_scenario(bad);
  REQUIRE(v.size() == 1);
  CHECK(v[0].path == "fit_window_ns");

  bad = s;
  bad.geometry.theta3_deg = 95.0;
  v = validate_scenario(bad);
  REQUIRE(v.size() == 1);
  CHECK(v[0].path == "geometry.theta3_deg");
}

TEST_SUITE_END();
