#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "sdp/dynamics.hpp"
#include "sdp/stats.hpp"

using namespace sdp;

TEST_CASE("clock sampling basics") {
  const Window w(16, 16);
  const ClockField a = sample_clocks(w, 2.5, 31, 4);
  const ClockField b = sample_clocks(w, 2.5, 31, 4);
  CHECK(a.arrivals == b.arrivals);
  CHECK(a.offsets == b.offsets);
  for (std::int64_t i = 0; i < w.site_count(); ++i) {
    const auto arr = a.arrivals_at(i);
    double prev = 0.0;
    for (double t : arr) {
      CHECK(t > prev);
      CHECK(t <= a.horizon);
      prev = t;
    }
  }
  CHECK_THROWS_AS(sample_clocks(w, 0.0, 1), std::invalid_argument);
}

TEST_CASE("arrival counts have the Poisson mean") {
  const Window w(64, 64);
  const double t_max = 2.0;
  const ClockField c = sample_clocks(w, t_max, 99);
  const double total = static_cast<double>(c.arrivals.size());
  const double mean = static_cast<double>(w.site_count()) * t_max;
  CHECK(std::abs(total - mean) <= 4.0 * std::sqrt(mean));
}

TEST_CASE("short horizon leaves most sites without arrivals") {
  const Window w(64, 64);
  const ClockField c = sample_clocks(w, 0.01, 5);
  std::int64_t without = 0;
  for (std::int64_t i = 0; i < w.site_count(); ++i) {
    without += c.arrivals_at(i).empty();
  }
  const double frac = static_cast<double>(without) / 4096.0;
  const double expect = std::exp(-0.01);
  CHECK(std::abs(frac - expect) <= 4.0 * binomial_se(expect, 4096));
}

TEST_CASE("config_at") {
  const Window w(32, 32);
  const ClockField c = sample_clocks(w, 3.0, 123);
  CHECK(config_at(c, 0.0).count() == 0);
  const SiteField f1 = config_at(c, 0.7);
  const SiteField f2 = config_at(c, 1.9);
  CHECK(f1.le(f2));
  const double density =
      static_cast<double>(f2.count()) / static_cast<double>(w.site_count());
  const double expect = 1.0 - std::exp(-1.9);
  CHECK(std::abs(density - expect) <= 4.0 * binomial_se(expect, 1024));
  CHECK_THROWS_AS(config_at(c, 3.5), std::invalid_argument);
}

TEST_CASE("evolve_destruct with tau = 0 is the plain evolution") {
  const Window w(12, 12);
  const ClockField c = sample_clocks(w, 2.0, 8);
  CHECK(evolve_destruct(c, DynParams(0.0, 1.3),
                        DestructionRule::window_boundary()) ==
        config_at(c, 1.3));
}

TEST_CASE("full destruction at t = tau") {
  const Window w(3, 3);
  // At tau = 25 every site has rung almost surely; verify, then destroy.
  const ClockField c = sample_clocks(w, 25.0, 77);
  const SiteField at_tau = config_at(c, 25.0);
  REQUIRE(at_tau.count() == 9);
  const SiteField z = evolve_destruct(c, DynParams(25.0, 25.0),
                                      DestructionRule::window_boundary());
  CHECK(z.count() == 0);
}

TEST_CASE("destruction only removes: z(tau,t) <= z(t) pointwise") {
  const Window w(24, 24);
  for (int rep = 0; rep < 100; ++rep) {
    const ClockField c = sample_clocks(w, 2.2, 1212, rep);
    const DynParams d(0.9, 1.6);
    const SiteField evolved =
        evolve_destruct(c, d, DestructionRule::window_boundary());
    CHECK(evolved.le(config_at(c, d.t)));
  }
}

TEST_CASE("parameter map") {
  const SdpParams p = params_from_times(DynParams(std::log(2.0), 2.0 * std::log(2.0)));
  CHECK(p.p == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(p.delta == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(params_from_times(DynParams(0.0, 1.0)).p == 0.0);
  CHECK_THROWS_AS(times_from_params(SdpParams(1.0, 0.2)), std::invalid_argument);
  CHECK_THROWS_AS(times_from_params(SdpParams(0.2, 1.0)), std::invalid_argument);
  CHECK_THROWS_AS(DynParams(1.0, 0.5), std::invalid_argument);
}

TEST_CASE("parameter map round trip under 1e-12") {
  for (int rep = 0; rep < 10000; ++rep) {
    const double p = uniform01(6, Stream::generic, rep, 0);
    const double d = uniform01(6, Stream::generic, rep, 1);
    const DynParams times = times_from_params(SdpParams(p, d));
    const SdpParams back = params_from_times(times);
    CHECK(std::abs(back.p - p) + std::abs(back.delta - d) < 1e-12);
  }
}

TEST_CASE("quadrant comparisons") {
  const Window w(16, 16);
  const ClockField c = sample_clocks(w, 3.0, 2020);
  const auto rule = DestructionRule::window_boundary();

  SUBCASE("equal parameters give identical fields") {
    const auto r = quadrant_monotonicity_check(c, DynParams(0.8, 1.5),
                                               DynParams(0.8, 1.5), rule);
    CHECK(r.pointwise_asserted);
    CHECK(r.violations == 0);
    CHECK(r.density1 == r.density2);
  }
  SUBCASE("monotone in t at fixed tau, pointwise") {
    for (int rep = 0; rep < 50; ++rep) {
      const ClockField cc = sample_clocks(w, 3.0, 555, rep);
      const auto r = quadrant_monotonicity_check(cc, DynParams(0.8, 1.2),
                                                 DynParams(0.8, 2.4), rule);
      CHECK(r.pointwise_asserted);
      CHECK(r.violations == 0);
    }
  }
  SUBCASE("different tau is statistical only") {
    const auto r = quadrant_monotonicity_check(c, DynParams(0.6, 1.5),
                                               DynParams(1.0, 1.5), rule);
    CHECK_FALSE(r.pointwise_asserted);
    CHECK(r.violations == 0);
  }
}

TEST_CASE("evolved density matches the occupancy identity (finite range)") {
  // p = 1-exp(-tau), delta = 1-exp(-(t-tau)); pi_1 = p(1-(1-p)^4).
  const DynParams d(0.9, 1.4);
  const SdpParams mapped = params_from_times(d);
  const double pi1 = mapped.p * (1.0 - std::pow(1.0 - mapped.p, 4));
  const double expect = occupancy_identity(mapped, pi1);
  const Window w(9, 9, Site{-4, -4});
  const Site origin{0, 0};
  const std::uint64_t samples = 20000;
  std::uint64_t hits = 0;
  for (std::uint64_t rep = 0; rep < samples; ++rep) {
    const ClockField c = sample_clocks(w, d.t, 31337, rep);
    hits += evolve_destruct(c, d, DestructionRule::finite_range(1)).get(origin);
  }
  const double density = static_cast<double>(hits) / static_cast<double>(samples);
  CHECK(std::abs(density - expect) <= 4.0 * binomial_se(expect, samples));
}
