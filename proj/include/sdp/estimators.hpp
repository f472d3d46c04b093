#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sdp/dynamics.hpp"
#include "sdp/enumerate.hpp"
#include "sdp/model.hpp"
#include "sdp/stats.hpp"

namespace sdp {

/// One-arm surrogate for the order parameter: fraction of draws in which
/// the origin's occupied cluster in z reaches the L1 sphere of radius n.
/// The region is the (2n+1)-square centered at the origin.
EstimateResult estimate_theta(SdpParams params, int n, DestructionRule rule,
                              std::uint64_t samples, std::uint64_t seed,
                              int threads = 0);

/// Crossing estimate on the floor(rho*s) x s rectangle: f is the occupied
/// horizontal 4-crossing, h_dual the vacant vertical 8-crossing recorded on
/// the same draws. Exactly one of the two holds per draw; violations are
/// counted (and must be zero).
struct CrossingEstimate {
  EstimateResult f;
  EstimateResult h_dual;
  std::uint64_t duality_violations = 0;
};
CrossingEstimate estimate_crossing(SdpParams params, double rho, int s,
                                   DestructionRule rule, std::uint64_t samples,
                                   std::uint64_t seed, int threads = 0);

/// Vacant vertical *-crossing probability h(rho, n) of the floor(rho*n) x n
/// box, estimated on its own window.
EstimateResult estimate_h(SdpParams params, double rho, int n,
                          DestructionRule rule, std::uint64_t samples,
                          std::uint64_t seed, int threads = 0);

/// Critical-density estimate: per scale, bisection of the ordinary
/// (Bernoulli) square-crossing probability against 1/2. The headline value
/// comes from the largest scale; never asserted against literature values.
struct PcEstimate {
  double point = 0.0;
  double bracket_low = 0.0;
  double bracket_high = 1.0;
  std::vector<std::pair<int, double>> per_scale;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  int steps = 0;
};
PcEstimate estimate_pc(std::span<const int> s_list, std::uint64_t samples,
                       std::uint64_t seed, int threads = 0, int steps = 7,
                       double bracket_low = 0.4, double bracket_high = 0.8);

/// The three strip events on one 9n x 3n field: A (full-height vacant
/// vertical *-crossing), B (bottom n-strip), C (top n-strip). A implies
/// B and C per draw; violations are counted.
struct AbcReport {
  EstimateResult a, b, c;
  std::uint64_t inclusion_violations = 0;
};
AbcReport abc_event_check(SdpParams params, int n, DestructionRule rule,
                          std::uint64_t samples, std::uint64_t seed,
                          int threads = 0);

/// h(9,n) against 4 h(3,n) + 3 h(1,n) and 7 h(3,n). The union-bound
/// witness: whenever the 9n x n strip has a vacant vertical *-crossing,
/// one of the four 3n-wide bands has one, or one of the three separating
/// n-squares has a vacant horizontal *-crossing.
struct SubadditivityReport {
  EstimateResult h9, h3, h1;
  std::uint64_t witness_violations = 0;
  double rhs_4_3 = 0.0, se_4_3 = 0.0;
  double rhs_7 = 0.0, se_7 = 0.0;
  bool holds_4_3 = false, holds_7 = false;
};
SubadditivityReport subadditivity_check(SdpParams params, int n,
                                        DestructionRule rule,
                                        std::uint64_t samples,
                                        std::uint64_t seed, int threads = 0);

/// Residual of h(3,3n) <= 49 h(3,n)^2 + exp(-n phi): reported, not
/// asserted, since phi is unknown.
struct RecursionReport {
  EstimateResult h3_3n, h3_n;
  double residual = 0.0;   // h(3,3n) - 49 h(3,n)^2
  double residual_se = 0.0;
};
RecursionReport recursion_audit(SdpParams params, int n, DestructionRule rule,
                                std::uint64_t samples, std::uint64_t seed,
                                int threads = 0);

/// Decay rate of q_k = P(blocked cluster at cutoff k) under ordinary
/// Bernoulli(p), fitted as log q_k ~ -phi k. All-zero counts fall back to
/// a rule-of-three lower bound on phi.
struct PhiEstimate {
  double phi_hat = 0.0;
  double intercept = 0.0;
  bool lower_bound_only = false;
  std::vector<int> k_list;
  std::vector<EstimateResult> q;
  double max_abs_residual = 0.0;  // of the log-space fit
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
};
PhiEstimate estimate_phi(double p, std::span<const int> k_list,
                         std::uint64_t samples, std::uint64_t seed,
                         int threads = 0);

/// Smallest N with exp(-N phi) < alpha/4.
int n_hat_from_phi(double alpha, double phi);

/// Finite-size criterion configuration; requires 49 alpha^2 < alpha/4,
/// i.e. alpha < 1/196.
struct CriterionConfig {
  double alpha;
  int n;
  int n_hat;
  std::optional<double> phi_estimate;

  CriterionConfig(double alpha_, int n_, int n_hat_,
                  std::optional<double> phi = std::nullopt);
};

/// Verdict at one scale: holds iff the Wilson lower bound of f(3,n)
/// exceeds 1 - alpha and n >= n_hat. Draws stop early once enough failures
/// have accrued that the full-sample bound could no longer clear the bar;
/// full_samples records whether the estimate ran to the requested count.
struct CriterionVerdict {
  bool holds = false;
  EstimateResult f3n;
  double margin = 0.0;  // f3n.ci_low - (1 - alpha)
  int n = 0;
  int n_hat = 0;
  bool full_samples = false;
  std::vector<EstimateResult> scale_chain;  // h(3, 3^j n), j = 0,1,2
};
CriterionVerdict finite_size_criterion(SdpParams params,
                                       const CriterionConfig& cfg,
                                       DestructionRule rule,
                                       std::uint64_t samples,
                                       std::uint64_t seed, int threads = 0,
                                       std::uint64_t chain_samples = 0);

/// Ascending scale search; stops at the first qualifying scale. Scales
/// below n_hat are skipped without sampling (they cannot qualify).
struct ScaleSearchResult {
  std::vector<CriterionVerdict> verdicts;
  std::vector<int> skipped_scales;
  std::optional<int> qualifying_n;
};
ScaleSearchResult criterion_scale_search(SdpParams params, double alpha,
                                         std::span<const int> scales,
                                         DestructionRule rule,
                                         std::uint64_t samples,
                                         std::uint64_t seed, int n_hat,
                                         int threads = 0);

/// An increasing event on a fixed region, for the FKG checks. The
/// constructors below only build events that are increasing by
/// construction.
struct IncreasingEvent {
  std::string name;
  std::function<bool(const SiteField&)> pred;
};
IncreasingEvent crossing_event(const Window& sub, Direction dir);
IncreasingEvent one_arm_event(Site center, int radius);
IncreasingEvent site_event(Site s);
IncreasingEvent min_count_event(std::int64_t m);

/// The fixed catalog of ten increasing event pairs on a 3x3 region.
std::vector<std::pair<IncreasingEvent, IncreasingEvent>> fkg_catalog_3x3(
    const Window& region);

struct FkgPairResult {
  std::string a, b;
  double p_a = 0.0, p_b = 0.0, p_ab = 0.0;
  double gap = 0.0;     // p_ab - p_a * p_b
  double se_gap = 0.0;  // 0 for exact checks
  bool ok = false;
};
struct FkgReport {
  std::vector<FkgPairResult> pairs;
  std::uint64_t samples = 0;
  bool all_ok = false;
};

/// Monte Carlo FKG check on shared draws: gap >= -4 * SE(gap), with the SE
/// from the delta method on the three indicator means.
FkgReport fkg_check(SdpParams params, DestructionRule rule,
                    const Window& region,
                    std::span<const std::pair<IncreasingEvent, IncreasingEvent>>
                        pairs,
                    std::uint64_t samples, std::uint64_t seed,
                    int threads = 0);

/// Exact FKG check against the enumeration oracle: gap >= -1e-12.
FkgReport fkg_check_exact(
    const ExactFiniteRangeModel& model, double delta,
    std::span<const std::pair<IncreasingEvent, IncreasingEvent>> pairs);

/// Distribution of the number of distinct occupied clusters spanning an
/// n x n window left to right. Reported, never asserted.
struct UniquenessReport {
  std::vector<std::uint64_t> histogram;  // index = spanning-cluster count
  std::uint64_t samples = 0;
  double fraction_ge2 = 0.0;
};
UniquenessReport uniqueness_diagnostic(SdpParams params, int n,
                                       DestructionRule rule,
                                       std::uint64_t samples,
                                       std::uint64_t seed, int threads = 0);

/// Subcritical reduction: SDP with the window-boundary rule against the
/// plain Bernoulli(p + (1-p) delta) field, on square-crossing estimates.
/// Also reports the coupled misfire fraction: draws in which destruction
/// removed at least one site (at p < p_c these are exactly the
/// finite-volume proxy errors) — and whether z was bit-identical to the
/// coupled direct field on every draw (always the case at p = 0).
struct SubcriticalReport {
  EstimateResult sdp_crossing;
  EstimateResult direct_crossing;
  double gap = 0.0;
  double gap_se = 0.0;
  bool within_4se = false;
  EstimateResult misfire;
  bool bit_identical = false;
};
SubcriticalReport subcritical_reduction_check(int side, SdpParams params,
                                              std::uint64_t samples,
                                              std::uint64_t seed,
                                              int threads = 0);

/// Crossing estimate from the clock dynamics at (tau, t) next to the SDP
/// estimate at the mapped (p, delta): the two agree in distribution.
struct DynamicsComparison {
  EstimateResult dynamics_f;
  EstimateResult sdp_f;
  SdpParams mapped;
  double gap = 0.0;
  double gap_se = 0.0;
  bool within_4se = false;
};
DynamicsComparison dynamics_crossing_comparison(DynParams d, double rho, int s,
                                                DestructionRule rule,
                                                std::uint64_t samples,
                                                std::uint64_t seed,
                                                int threads = 0);

}  // namespace sdp
