#include <catch2/catch_amalgamated.hpp>

#include <dirac1d/matcher.hpp>
#include <dirac1d/resonance.hpp>

#include "support/configs.hpp"

using namespace dirac1d;
using Catch::Approx;

namespace {

std::vector<double> energies(const ResonanceSet &set) {
  std::vector<double> out;
  for (const auto &r : set)
    out.push_back(r.energy);
  return out;
}

void check_energies(const ResonanceSet &set, const std::vector<double> &expected) {
  const auto got = energies(set);
  REQUIRE(got.size() == expected.size());
  for (std::size_t i = 0; i < got.size(); ++i)
    CHECK(got[i] == Approx(expected[i]).margin(1e-6));
}

} // namespace

TEST_CASE("analytic_resonances", "[resonance]") {
  SECTION("pseudo-spin symmetric barrier") {
    const auto set = analytic_resonances(testcfg::pseudo_spin, 10.0);
    check_energies(set, {1.0000000, 5.5431086, 6.7241918, 8.1192392, 9.5938166});
    CHECK(set[0].zero_momentum);
    CHECK(set[0].mu_zero);
    CHECK(set[0].kind() == "mu_zero+zero_momentum");
    CHECK(set[1].oscillation);
    CHECK(set[1].n == 1);
    CHECK(set[1].branch == +1);
  }
  SECTION("wide Klein band configuration") {
    const auto set = analytic_resonances(testcfg::klein_wide, 10.0);
    check_energies(set, {1.7030917, 2.5000000, 3.1379041, 6.8620959, 8.2969083, 9.8173239});
    CHECK(set[1].mu_zero);
    CHECK_FALSE(set[1].oscillation);
    CHECK(set[0].n == 2);
    CHECK(set[0].branch == -1);
  }
  SECTION("null barrier keeps only the upper branch") {
    const auto set = analytic_resonances({0.0, 0.0, 1.0, 1.0}, 5.0);
    std::vector<double> expected;
    for (int n = 1; std::hypot(1.0, n * testcfg::pi) <= 5.0; ++n)
      expected.push_back(std::hypot(1.0, n * testcfg::pi));
    check_energies(set, expected);
  }
  SECTION("simultaneous resonance at 2V - m for the supercritical strengths") {
    check_energies(analytic_resonances(testcfg::super_upper, 10.0), {1.0, 5.0, 6.3767149, 7.8722899, 9.4039844});
    check_energies(analytic_resonances(testcfg::super_lower, 10.0), {1.0, 1.3404935, 5.0, 6.3767149, 7.8722899, 9.4039844});
    CHECK(analytic_resonances(testcfg::super_upper, 10.0)[0].zero_momentum);
    CHECK(analytic_resonances(testcfg::super_upper, 10.0)[0].oscillation);
  }
  SECTION("mu-zero resonance only for 0 > S >= -V") {
    for (const BarrierConfig &cfg : testcfg::random_configs(100, 41)) {
      bool has = false;
      for (const auto &r : analytic_resonances(cfg, 10.0))
        has = has || r.mu_zero;
      const double e0 = -(cfg.V / cfg.S) * cfg.m;
      const bool expected = cfg.S < 0.0 && cfg.S >= -cfg.V && e0 >= cfg.m && e0 <= 10.0;
      CHECK(has == expected);
    }
  }
}

TEST_CASE("analytic oscillation resonances have |R| = 0", "[resonance][property]") {
  for (const BarrierConfig &cfg : testcfg::random_configs(40, 43)) {
    const auto profile = PotentialProfile::single_barrier(cfg);
    for (const auto &r : analytic_resonances(cfg, 10.0)) {
      if (r.zero_momentum || classify_regime(cfg, r.energy).mode == Mode::band_edge)
        continue;
      if (r.oscillation)
        CHECK(r.energy == Approx(oscillation_energy(cfg, r.n, r.branch)).margin(1e-9));
      CHECK(coefficients(cfg, r.energy).R2 <= 1e-10);
      CHECK(std::norm(solve_profile(profile, r.energy).R) <= 1e-10);
    }
  }
}

TEST_CASE("refine_resonance", "[resonance]") {
  CHECK(refine_resonance(testcfg::pseudo_spin, {5.4, 5.7}) == Approx(5.5431086).margin(1e-6));
  CHECK(refine_resonance(testcfg::klein_narrow, {1.5, 1.7}) == Approx(1.6).margin(1e-6));
  CHECK_THROWS_AS(refine_resonance(testcfg::klein_narrow, {3.0, 4.0}), no_resonance);

  // located to 1e-9 against the analytic energy
  const double exact = oscillation_energy(testcfg::klein_wide, 1, -1);
  CHECK(std::abs(refine_resonance(testcfg::klein_wide, {exact - 0.05, exact + 0.03}) - exact) <= 1e-9);
}

TEST_CASE("supercritical_scalar_strengths", "[resonance]") {
  SECTION("V = 3, a = 2") {
    const auto sols = supercritical_scalar_strengths(3.0, 2.0, 1.0);
    REQUIRE(sols.size() == 2);
    CHECK(sols[0].n == 0);
    CHECK(sols[0].S_values == std::vector<double>{-3.0});
    CHECK(sols[1].n == 1);
    REQUIRE(sols[1].S_values.size() == 2);
    CHECK(sols[1].S_values[0] == Approx(0.2379817848933240).epsilon(1e-14));
    CHECK(sols[1].S_values[1] == Approx(-2.2379817848933240).epsilon(1e-14));
  }
  SECTION("V = m leaves only the pseudo-spin solution") {
    const auto sols = supercritical_scalar_strengths(1.0, 2.0, 1.0);
    REQUIRE(sols.size() == 1);
    CHECK(sols[0].S_values == std::vector<double>{-1.0});
  }
  SECTION("zero radicand gives a double root") {
    const auto sols = supercritical_scalar_strengths(1.0 + testcfg::pi / 2.0, 2.0, 1.0);
    REQUIRE(sols.size() == 2);
    CHECK(sols[1].double_root);
    CHECK(sols[1].S_values == std::vector<double>{-1.0});
  }
  SECTION("V < m") {
    CHECK_THROWS_AS(supercritical_scalar_strengths(0.5, 2.0, 1.0), no_supercriticality);
  }
  SECTION("every strength puts resonances at m and 2V - m") {
    for (double V : {2.0, 3.0, 4.5, 6.0}) {
      for (const auto &sol : supercritical_scalar_strengths(V, 2.0, 1.0)) {
        for (double S : sol.S_values) {
          const auto set = analytic_resonances({V, S, 2.0, 1.0}, 2.0 * V);
          CHECK(set.front().zero_momentum);
          if (sol.n >= 1) {
            bool found = false;
            for (const auto &r : set)
              found = found || std::abs(r.energy - (2.0 * V - 1.0)) <= 1e-9;
            CHECK(found);
          }
        }
      }
    }
  }
}

TEST_CASE("is_supercritical", "[resonance]") {
  for (const auto &cfg : {testcfg::pseudo_spin, testcfg::super_upper, testcfg::super_lower}) {
    const auto check = is_supercritical(cfg);
    CHECK(check.supercritical);
    CHECK(check.T2.back() >= 0.99);
  }
  CHECK(is_supercritical({3.0, -2.2379818, 2.0, 1.0}).supercritical);
  const auto no = is_supercritical(testcfg::klein_narrow);
  CHECK_FALSE(no.supercritical);
  CHECK(no.T2.back() <= 0.01);
  // frozen from the mpmath reference
  const auto seq = is_supercritical(testcfg::pseudo_spin).T2;
  CHECK(seq[0] == Approx(0.841157551477).epsilon(1e-10));
  CHECK(seq[3] == Approx(0.99999982).epsilon(1e-10));
}

TEST_CASE("is_supercritical is false when the spectrum misses m", "[resonance][property]") {
  for (const BarrierConfig &cfg : testcfg::random_configs(60, 47)) {
    const auto set = analytic_resonances(cfg, 10.0);
    bool at_m = false;
    for (const auto &r : set)
      at_m = at_m || std::abs(r.energy - cfg.m) <= 1e-4;
    if (!at_m)
      CHECK_FALSE(is_supercritical(cfg).supercritical);
  }
}

TEST_CASE("transmission_bands", "[resonance]") {
  SECTION("Klein band of the V = 4, S = -2.5 barrier") {
    const auto bands = transmission_bands(testcfg::klein_narrow, {1.0, 10.0, 9000}, 0.9);
    REQUIRE_FALSE(bands.empty());
    const TransmissionBand &klein = bands.front();
    CHECK(klein.overlaps_klein_zone);
    CHECK(klein.inside_klein_zone);
    CHECK(klein.interval.contains(1.6));
    CHECK(klein.interval.contains(1.8280421));
    CHECK(klein.min_T2 >= 0.9);
    for (std::size_t i = 1; i < bands.size(); ++i)
      CHECK_FALSE(bands[i].overlaps_klein_zone);
  }
  SECTION("null barrier is one band") {
    const EnergyGrid grid{1.0, 10.0, 500};
    const auto bands = transmission_bands({0.0, 0.0, 2.0, 1.0}, grid, 0.99);
    REQUIRE(bands.size() == 1);
    CHECK(bands[0].interval.lo == grid.at(0));
    CHECK(bands[0].interval.hi == grid.at(grid.points - 1));
  }
  SECTION("no wide sub-barrier band without an impedance match") {
    const auto bands = transmission_bands({3.0, 0.0, 2.0, 1.0}, {1.0, 2.0, 1000}, 0.999);
    for (const auto &b : bands)
      CHECK(b.interval.width() < 0.05);
  }
  SECTION("edges are refined between grid points") {
    const EnergyGrid grid{1.0, 10.0, 900};
    const auto bands = transmission_bands(testcfg::klein_wide, grid, 0.9);
    REQUIRE_FALSE(bands.empty());
    const double lo = bands[0].interval.lo;
    CHECK(coefficients(testcfg::klein_wide, lo).T2 >= 0.9);
    CHECK(coefficients(testcfg::klein_wide, lo - grid.step() / 64.0).T2 < 0.9);
  }
  SECTION("bad threshold") {
    CHECK_THROWS_AS(transmission_bands(testcfg::klein_narrow, {1.0, 10.0, 10}, 1.5), invalid_config);
  }
}
