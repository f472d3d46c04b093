#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "sdp/estimators.hpp"
#include "sdp/parallel.hpp"
#include "sdp/rng.hpp"

using namespace sdp;

namespace {
const DestructionRule kWB = DestructionRule::window_boundary();
}

TEST_CASE("estimate_theta degenerate parameters") {
  const EstimateResult one =
      estimate_theta(SdpParams(0.5, 1.0), 6, kWB, 200, 1);
  CHECK(one.point == 1.0);
  const EstimateResult zero =
      estimate_theta(SdpParams(0.0, 0.0), 6, kWB, 200, 1);
  CHECK(zero.point == 0.0);
  CHECK(zero.ci_low <= zero.point);
  CHECK(one.ci_high >= one.point);
}

TEST_CASE("theta at p=0 matches an independent ordinary one-arm run") {
  // With p = 0 the final field is Bernoulli(delta); compare against the
  // ordinary model at density delta drawn from a different stream.
  const int n = 8;
  const std::uint64_t samples = 20000;
  const EstimateResult sdp =
      estimate_theta(SdpParams(0.0, 0.7), n, kWB, samples, 21);
  const EstimateResult ordinary = estimate_theta(
      SdpParams(0.7, 0.0), n, DestructionRule::none(), samples, 22);
  const double se = std::sqrt(std::pow(binomial_se(sdp.point, samples), 2) +
                              std::pow(binomial_se(ordinary.point, samples), 2));
  CHECK(std::abs(sdp.point - ordinary.point) <= 4.0 * se);
}

TEST_CASE("estimate_crossing: duality and the h = 1 - f convention") {
  const CrossingEstimate ce =
      estimate_crossing(SdpParams(0.55, 0.25), 3.0, 8, kWB, 3000, 7);
  CHECK(ce.duality_violations == 0);
  CHECK(ce.h_dual.point == doctest::Approx(1.0 - ce.f.point).epsilon(1e-12));
  const EstimateResult h =
      estimate_h(SdpParams(0.55, 0.25), 3.0, 8, kWB, 3000, 7);
  CHECK(h.point == ce.h_dual.point);

  const CrossingEstimate full =
      estimate_crossing(SdpParams(0.3, 1.0), 3.0, 8, kWB, 100, 7);
  CHECK(full.f.point == 1.0);
}

TEST_CASE("crossing probability decreases in rho") {
  const SdpParams params(0.62, 0.1);
  double prev = 2.0;
  double prev_se = 0.0;
  for (double rho : {1.0, 2.0, 3.0}) {
    const CrossingEstimate ce =
        estimate_crossing(params, rho, 12, kWB, 4000, 99);
    const double se = binomial_se(ce.f.point, 4000);
    CHECK(ce.f.point <= prev + 4.0 * std::sqrt(se * se + prev_se * prev_se));
    prev = ce.f.point;
    prev_se = se;
  }
}

TEST_CASE("estimate_pc brackets the square-crossing threshold") {
  const std::vector<int> scales{16, 32};
  const PcEstimate pc = estimate_pc(scales, 2000, 4242, 0, 6);
  CHECK(pc.point > 0.5);
  CHECK(pc.point < 0.7);
  CHECK(pc.bracket_high - pc.bracket_low <=
        (0.8 - 0.4) / std::pow(2.0, 6) + 1e-12);
  REQUIRE(pc.per_scale.size() == 2);
  CHECK(std::abs(pc.per_scale[0].second - pc.per_scale[1].second) <= 0.05);
}

TEST_CASE("abc events nest") {
  const AbcReport r = abc_event_check(SdpParams(0.65, 0.3), 4, kWB, 2000, 11);
  CHECK(r.inclusion_violations == 0);
  CHECK(r.a.point <= r.b.point);
  CHECK(r.a.point <= r.c.point);
}

TEST_CASE("subadditivity witness and statistical bounds") {
  const SubadditivityReport r =
      subadditivity_check(SdpParams(0.7, 0.2), 4, kWB, 2000, 13);
  CHECK(r.witness_violations == 0);
  CHECK(r.holds_4_3);
  CHECK(r.holds_7);
}

TEST_CASE("recursion audit at delta = 1 is identically zero") {
  const RecursionReport r =
      recursion_audit(SdpParams(0.4, 1.0), 4, kWB, 500, 3);
  CHECK(r.h3_3n.point == 0.0);
  CHECK(r.h3_n.point == 0.0);
  CHECK(r.residual == 0.0);
  CHECK(r.h3_3n.point <= 1.0);
}

TEST_CASE("estimate_phi decay fits") {
  const std::vector<int> ks{1, 2, 3, 4};
  double prev_phi = 0.0;
  for (double p : {0.62, 0.66, 0.70}) {
    const PhiEstimate est = estimate_phi(p, ks, 20000, 5150);
    CHECK_FALSE(est.lower_bound_only);
    CHECK(est.phi_hat > prev_phi);  // increasing in p
    prev_phi = est.phi_hat;
    for (std::size_t i = 1; i < est.q.size(); ++i) {
      CHECK(est.q[i].point <= est.q[i - 1].point);  // nested events
    }
  }
}

TEST_CASE("estimate_phi falls back to a lower bound when nothing is seen") {
  // Deep in the supercritical regime even the smallest cutoff sees no
  // blocked clusters at this sample count.
  const std::vector<int> ks{1, 2};
  const PhiEstimate est = estimate_phi(0.95, ks, 2000, 8);
  CHECK(est.lower_bound_only);
  CHECK(est.phi_hat > 0.0);
}

TEST_CASE("n_hat satisfies the defining inequality") {
  for (double phi : {0.05, 0.2, 1.0, 5.0}) {
    const int n = n_hat_from_phi(0.005, phi);
    CHECK(std::exp(-n * phi) < 0.005 / 4.0);
    if (n > 1) CHECK(std::exp(-(n - 1) * phi) >= 0.005 / 4.0);
  }
}

TEST_CASE("criterion config enforces the alpha constraint") {
  CHECK_THROWS_AS(CriterionConfig(0.01, 16, 1), std::invalid_argument);
  CHECK_NOTHROW(CriterionConfig(0.005, 16, 1));
  CHECK_THROWS_AS(CriterionConfig(0.005, 0, 1), std::invalid_argument);
}

TEST_CASE("finite-size criterion holds deep in the supercritical regime") {
  // Bernoulli(0.9) dominates: f(3,8) is essentially 1.
  const CriterionVerdict v = finite_size_criterion(
      SdpParams(0.0, 0.9), CriterionConfig(0.005, 8, 1), kWB, 5000, 17);
  CHECK(v.holds);
  CHECK(v.full_samples);
  CHECK(v.margin > 0.0);
  CHECK(v.f3n.n_samples == 5000);
}

TEST_CASE("finite-size criterion stops early when it cannot qualify") {
  const CriterionVerdict v = finite_size_criterion(
      SdpParams(0.0, 0.1), CriterionConfig(0.005, 8, 1), kWB, 50000, 17);
  CHECK_FALSE(v.holds);
  CHECK_FALSE(v.full_samples);
  CHECK(v.f3n.n_samples < 50000);
  CHECK(v.f3n.n_samples >= 1024);
}

TEST_CASE("criterion verdict is monotone in delta on coupled draws") {
  const CriterionVerdict low = finite_size_criterion(
      SdpParams(0.2, 0.05), CriterionConfig(0.005, 8, 1), kWB, 4000, 23);
  const CriterionVerdict high = finite_size_criterion(
      SdpParams(0.2, 0.92), CriterionConfig(0.005, 8, 1), kWB, 4000, 23);
  CHECK_FALSE(low.holds);
  CHECK(high.holds);
  CHECK(low.holds <= high.holds);
}

TEST_CASE("criterion scale chain reports h(3, 3^j n)") {
  const CriterionVerdict v = finite_size_criterion(
      SdpParams(0.0, 0.85), CriterionConfig(0.005, 4, 1), kWB, 2000, 29, 0,
      /*chain_samples=*/500);
  REQUIRE(v.scale_chain.size() == 3);
  CHECK(v.scale_chain[0].n_samples == 500);
  for (const EstimateResult& h : v.scale_chain) {
    CHECK(h.point >= 0.0);
    CHECK(h.point <= 1.0);
  }
}

TEST_CASE("scale search skips scales below n_hat") {
  const std::vector<int> scales{4, 8, 16};
  const ScaleSearchResult r = criterion_scale_search(
      SdpParams(0.0, 0.9), 0.005, scales, kWB, 4000, 55, 8);
  CHECK(r.skipped_scales == std::vector<int>{4});
  REQUIRE(r.qualifying_n.has_value());
  CHECK(*r.qualifying_n == 8);
  CHECK(r.verdicts.size() == 1);
}

TEST_CASE("fkg monte carlo check") {
  const Window region(3, 3);
  const auto catalog = fkg_catalog_3x3(region);
  for (const auto& [p, d] : std::vector<std::pair<double, double>>{
           {0.6, 0.2}, {0.3, 0.7}}) {
    const FkgReport r = fkg_check(SdpParams(p, d),
                                  DestructionRule::finite_range(1), region,
                                  catalog, 5000, 37);
    CHECK(r.all_ok);
  }
}

TEST_CASE("fkg: identical events satisfy the inequality exactly") {
  const Window region(3, 3);
  const IncreasingEvent h = crossing_event(region, Direction::horizontal);
  const std::vector<std::pair<IncreasingEvent, IncreasingEvent>> pairs{{h, h}};
  const FkgReport r =
      fkg_check(SdpParams(0.5, 0.3), kWB, region, pairs, 2000, 3);
  CHECK(r.all_ok);
  CHECK(r.pairs[0].p_ab == doctest::Approx(r.pairs[0].p_a));
  CHECK(r.pairs[0].gap >= 0.0);
}

TEST_CASE("uniqueness diagnostic histograms") {
  const UniquenessReport one =
      uniqueness_diagnostic(SdpParams(0.2, 1.0), 12, kWB, 300, 5);
  CHECK(one.histogram[1] == 300);
  CHECK(one.fraction_ge2 == 0.0);
  const UniquenessReport zero =
      uniqueness_diagnostic(SdpParams(0.0, 0.0), 12, kWB, 300, 5);
  CHECK(zero.histogram[0] == 300);
}

TEST_CASE("subcritical reduction") {
  SUBCASE("p = 0 is bit-identical to the coupled direct field") {
    const SubcriticalReport r =
        subcritical_reduction_check(16, SdpParams(0.0, 0.4), 2000, 77);
    CHECK(r.bit_identical);
    CHECK(r.misfire.point == 0.0);
    CHECK(r.within_4se);
  }
  SUBCASE("mild subcritical p") {
    const SubcriticalReport r =
        subcritical_reduction_check(32, SdpParams(0.3, 0.2), 2000, 78);
    CHECK(r.within_4se);
    CHECK(r.misfire.point <= 1.0);
  }
}

TEST_CASE("monotone domination of crossing estimates") {
  // p2 >= p1 with p2 + (1-p2) d2 <= p1 + (1-p1) d1 puts the (p1,d1) model
  // on top: its crossing estimate may trail the other by at most 4 SE.
  const SdpParams top(0.5, 0.4);     // effective density 0.70
  const SdpParams bottom(0.6, 0.25); // effective density 0.70, larger p
  const std::uint64_t samples = 4000;
  const CrossingEstimate f_top =
      estimate_crossing(top, 3.0, 8, kWB, samples, 61);
  const CrossingEstimate f_bottom =
      estimate_crossing(bottom, 3.0, 8, kWB, samples, 62);
  const double se =
      std::sqrt(std::pow(binomial_se(f_top.f.point, samples), 2) +
                std::pow(binomial_se(f_bottom.f.point, samples), 2));
  CHECK(f_top.f.point >= f_bottom.f.point - 4.0 * se);
}

TEST_CASE("report-only estimators produce sane interior-parameter reports") {
  const RecursionReport rec =
      recursion_audit(SdpParams(0.7, 0.5), 8, kWB, 2000, 41);
  CHECK(rec.h3_3n.point >= 0.0);
  CHECK(rec.h3_3n.point <= 1.0);
  CHECK(rec.residual == doctest::Approx(rec.h3_3n.point -
                                        49.0 * rec.h3_n.point * rec.h3_n.point));
  CHECK(rec.residual_se >= 0.0);

  const UniquenessReport uniq =
      uniqueness_diagnostic(SdpParams(0.65, 0.75), 32, kWB, 2000, 42);
  std::uint64_t total = 0;
  for (std::uint64_t c : uniq.histogram) total += c;
  CHECK(total == 2000);
  CHECK(uniq.fraction_ge2 >= 0.0);
  CHECK(uniq.fraction_ge2 <= 1.0);

  const SubcriticalReport sub =
      subcritical_reduction_check(32, SdpParams(0.5, 0.1), 2000, 43);
  CHECK(sub.misfire.point >= 0.0);
  CHECK(sub.misfire.point <= 1.0);
  CHECK(sub.gap_se >= 0.0);
}

TEST_CASE("monte carlo frequencies match the oracle for all catalog events") {
  const Window region(3, 3);
  const auto catalog = fkg_catalog_3x3(region);
  const SdpParams params(0.6, 0.2);
  const ExactFiniteRangeModel model(region, 1, params.p);
  const std::uint64_t samples = 20000;
  std::vector<std::uint64_t> hits(catalog.size(), 0);
  for (std::uint64_t rep = 0; rep < samples; ++rep) {
    const SdpSample s =
        sample_sdp(region, params, DestructionRule::finite_range(1), 71, rep);
    for (std::size_t i = 0; i < catalog.size(); ++i) {
      hits[i] += catalog[i].first.pred(s.z);
    }
  }
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    const double exact =
        model.event_probability(params.delta, catalog[i].first.pred);
    const double mc = static_cast<double>(hits[i]) / static_cast<double>(samples);
    CHECK(std::abs(mc - exact) <= 4.0 * binomial_se(exact, samples) + 1e-9);
  }
}

TEST_CASE("dynamics matches the mapped SDP draw in distribution") {
  const DynamicsComparison r = dynamics_crossing_comparison(
      DynParams(0.9, 1.6), 2.0, 8, kWB, 2000, 91);
  CHECK(r.within_4se);
  CHECK(r.mapped.p == doctest::Approx(1.0 - std::exp(-0.9)));
}

TEST_CASE("wilson coverage over synthetic problems") {
  // 200 known-q binomial problems; the 95% interval should cover q for
  // roughly 92-98% of them.
  int covered = 0;
  const int problems = 200;
  const std::uint64_t trials = 400;
  for (int i = 0; i < problems; ++i) {
    const double q = 0.02 + 0.96 * uniform01(909, Stream::generic, i, 0);
    std::uint64_t hits = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
      hits += uniform01(909, Stream::generic, i,
                        static_cast<std::uint64_t>(t) + 1) < q;
    }
    const double lo = wilson_lower(hits, trials);
    const double hi = wilson_upper(hits, trials);
    covered += (lo <= q && q <= hi);
  }
  const double coverage = static_cast<double>(covered) / problems;
  CHECK(coverage >= 0.92);
  CHECK(coverage <= 0.98);
}

TEST_CASE("replicate runner is worker-count independent") {
  struct Acc {
    std::uint64_t sum = 0;
    Acc& operator+=(const Acc& o) {
      sum += o.sum;
      return *this;
    }
  };
  auto body = [](std::uint64_t rep, Acc& a) {
    a.sum += derive_seed(9, rep) % 1000;
  };
  const Acc a1 = run_replicates<Acc>(5000, 1, body);
  const Acc a4 = run_replicates<Acc>(5000, 4, body);
  CHECK(a1.sum == a4.sum);

  auto fail_body = [](std::uint64_t rep, Acc& a) { a.sum += (rep % 7 == 0); };
  auto fails = [](const Acc& a) { return a.sum; };
  const auto [c1, n1] = run_replicates_capped<Acc>(100000, 1, 50, fail_body, fails);
  const auto [c4, n4] = run_replicates_capped<Acc>(100000, 4, 50, fail_body, fails);
  CHECK(c1.sum == c4.sum);
  CHECK(n1 == n4);
  CHECK(n1 < 100000);
}
