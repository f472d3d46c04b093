#include "sdp/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "sdp/cluster.hpp"
#include "sdp/parallel.hpp"
#include "sdp/rng.hpp"

namespace sdp {

namespace {

std::string describe(const char* what, SdpParams params, DestructionRule rule,
                     const std::string& extra) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%s[p=%g,delta=%g,rule=%s%s%s]", what,
                params.p, params.delta, rule.to_string().c_str(),
                extra.empty() ? "" : ",", extra.c_str());
  return buf;
}

struct Count {
  std::uint64_t hits = 0;
  Count& operator+=(const Count& o) {
    hits += o.hits;
    return *this;
  }
};

struct CrossingCount {
  std::uint64_t f_hits = 0;
  std::uint64_t dual_hits = 0;
  std::uint64_t violations = 0;
  std::uint64_t failures = 0;  // !f
  CrossingCount& operator+=(const CrossingCount& o) {
    f_hits += o.f_hits;
    dual_hits += o.dual_hits;
    violations += o.violations;
    failures += o.failures;
    return *this;
  }
};

CrossingCount crossing_loop(const Window& w, SdpParams params,
                            DestructionRule rule, std::uint64_t samples,
                            std::uint64_t seed, int threads) {
  return run_replicates<CrossingCount>(
      samples, threads, [&](std::uint64_t rep, CrossingCount& acc) {
        const SdpSample s = sample_sdp(w, params, rule, seed, rep);
        const bool occ =
            has_crossing(s.z, true, Connectivity::four, Direction::horizontal);
        const bool vac =
            has_crossing(s.z, false, Connectivity::eight, Direction::vertical);
        acc.f_hits += occ;
        acc.dual_hits += vac;
        acc.violations += (occ == vac);
        acc.failures += !occ;
      });
}

}  // namespace

EstimateResult estimate_theta(SdpParams params, int n, DestructionRule rule,
                              std::uint64_t samples, std::uint64_t seed,
                              int threads) {
  if (n < 1) throw std::invalid_argument("estimate_theta: n must be >= 1");
  if (samples < 1) throw std::invalid_argument("estimate_theta: samples >= 1");
  const Window region(2 * n + 1, 2 * n + 1, Site{-n, -n});
  const Site origin{0, 0};
  const auto acc = run_replicates<Count>(
      samples, threads, [&](std::uint64_t rep, Count& a) {
        const SdpSample s = sample_sdp(region, params, rule, seed, rep);
        if (!s.z.get(origin)) return;
        ClusterLabeling l(s.z, true, Connectivity::four);
        if (l.max_l1_reach(origin) >= n) ++a.hits;
      });
  return wilson_estimate(acc.hits, samples, seed,
                         describe("theta", params, rule, "n=" + std::to_string(n)));
}

CrossingEstimate estimate_crossing(SdpParams params, double rho, int s,
                                   DestructionRule rule, std::uint64_t samples,
                                   std::uint64_t seed, int threads) {
  if (samples < 1) throw std::invalid_argument("estimate_crossing: samples >= 1");
  const Window w = rectangle_window(rho, s);
  const auto acc = crossing_loop(w, params, rule, samples, seed, threads);
  char extra[64];
  std::snprintf(extra, sizeof(extra), "rho=%g,s=%d", rho, s);
  CrossingEstimate out;
  out.f = wilson_estimate(acc.f_hits, samples, seed,
                          describe("crossing", params, rule, extra));
  out.h_dual = wilson_estimate(acc.dual_hits, samples, seed,
                               describe("dual-crossing", params, rule, extra));
  out.duality_violations = acc.violations;
  return out;
}

EstimateResult estimate_h(SdpParams params, double rho, int n,
                          DestructionRule rule, std::uint64_t samples,
                          std::uint64_t seed, int threads) {
  const Window w = rectangle_window(rho, n);
  const auto acc = run_replicates<Count>(
      samples, threads, [&](std::uint64_t rep, Count& a) {
        const SdpSample s = sample_sdp(w, params, rule, seed, rep);
        if (has_crossing(s.z, false, Connectivity::eight, Direction::vertical)) {
          ++a.hits;
        }
      });
  char extra[64];
  std::snprintf(extra, sizeof(extra), "rho=%g,n=%d", rho, n);
  return wilson_estimate(acc.hits, samples, seed,
                         describe("h", params, rule, extra));
}

PcEstimate estimate_pc(std::span<const int> s_list, std::uint64_t samples,
                       std::uint64_t seed, int threads, int steps,
                       double bracket_low, double bracket_high) {
  if (s_list.empty()) throw std::invalid_argument("estimate_pc: empty scales");
  auto square_crossing = [&](int s, double density) {
    const Window w(s, s);
    const auto acc = run_replicates<Count>(
        samples, threads, [&](std::uint64_t rep, Count& a) {
          const SiteField f =
              sample_field(w, density, seed, Stream::direct, rep);
          if (has_crossing(f, true, Connectivity::four, Direction::horizontal)) {
            ++a.hits;
          }
        });
    return static_cast<double>(acc.hits) / static_cast<double>(samples);
  };
  PcEstimate out;
  out.samples = samples;
  out.seed = seed;
  out.steps = steps;
  int largest = 0;
  for (int s : s_list) largest = std::max(largest, s);
  for (int s : s_list) {
    double lo = bracket_low, hi = bracket_high;
    if (!(square_crossing(s, lo) < 0.5 && square_crossing(s, hi) > 0.5)) {
      throw std::runtime_error(
          "estimate_pc: initial bracket does not straddle 1/2");
    }
    for (int i = 0; i < steps; ++i) {
      const double mid = 0.5 * (lo + hi);
      (square_crossing(s, mid) > 0.5 ? hi : lo) = mid;
    }
    out.per_scale.emplace_back(s, 0.5 * (lo + hi));
    if (s == largest) {
      out.point = 0.5 * (lo + hi);
      out.bracket_low = lo;
      out.bracket_high = hi;
    }
  }
  return out;
}

AbcReport abc_event_check(SdpParams params, int n, DestructionRule rule,
                          std::uint64_t samples, std::uint64_t seed,
                          int threads) {
  const Window w(9 * n, 3 * n);
  const Window bottom(9 * n, n, Site{0, 0});
  const Window top(9 * n, n, Site{0, 2 * n});
  struct Acc {
    std::uint64_t a = 0, b = 0, c = 0, viol = 0;
    Acc& operator+=(const Acc& o) {
      a += o.a;
      b += o.b;
      c += o.c;
      viol += o.viol;
      return *this;
    }
  };
  const auto acc = run_replicates<Acc>(
      samples, threads, [&](std::uint64_t rep, Acc& out) {
        const SdpSample s = sample_sdp(w, params, rule, seed, rep);
        const bool a =
            has_crossing(s.z, false, Connectivity::eight, Direction::vertical);
        const bool b = has_crossing(s.z.crop(bottom), false,
                                    Connectivity::eight, Direction::vertical);
        const bool c = has_crossing(s.z.crop(top), false, Connectivity::eight,
                                    Direction::vertical);
        out.a += a;
        out.b += b;
        out.c += c;
        out.viol += (a && !(b && c));
      });
  AbcReport r;
  const std::string tag = "n=" + std::to_string(n);
  r.a = wilson_estimate(acc.a, samples, seed, describe("A", params, rule, tag));
  r.b = wilson_estimate(acc.b, samples, seed, describe("B", params, rule, tag));
  r.c = wilson_estimate(acc.c, samples, seed, describe("C", params, rule, tag));
  r.inclusion_violations = acc.viol;
  return r;
}

SubadditivityReport subadditivity_check(SdpParams params, int n,
                                        DestructionRule rule,
                                        std::uint64_t samples,
                                        std::uint64_t seed, int threads) {
  const Window strip(9 * n, n);
  struct Acc {
    std::uint64_t b = 0, viol = 0;
    Acc& operator+=(const Acc& o) {
      b += o.b;
      viol += o.viol;
      return *this;
    }
  };
  const auto acc = run_replicates<Acc>(
      samples, threads, [&](std::uint64_t rep, Acc& out) {
        const SdpSample s = sample_sdp(strip, params, rule, seed, rep);
        const bool b =
            has_crossing(s.z, false, Connectivity::eight, Direction::vertical);
        out.b += b;
        if (!b) return;
        bool witness = false;
        for (int j = 0; j < 4 && !witness; ++j) {
          const Window band(3 * n, n, Site{2 * n * j, 0});
          witness = has_crossing(s.z.crop(band), false, Connectivity::eight,
                                 Direction::vertical);
        }
        for (int j = 0; j < 3 && !witness; ++j) {
          const Window square(n, n, Site{(2 * j + 2) * n, 0});
          witness = has_crossing(s.z.crop(square), false, Connectivity::eight,
                                 Direction::horizontal);
        }
        out.viol += !witness;
      });
  SubadditivityReport r;
  const std::string tag = "n=" + std::to_string(n);
  r.h9 = wilson_estimate(acc.b, samples, seed, describe("h9", params, rule, tag));
  r.h3 = estimate_h(params, 3.0, n, rule, samples, derive_seed(seed, 2), threads);
  r.h1 = estimate_h(params, 1.0, n, rule, samples, derive_seed(seed, 3), threads);
  r.witness_violations = acc.viol;
  const double se9 = binomial_se(r.h9.point, samples);
  const double se3 = binomial_se(r.h3.point, samples);
  const double se1 = binomial_se(r.h1.point, samples);
  r.rhs_4_3 = 4.0 * r.h3.point + 3.0 * r.h1.point;
  r.se_4_3 = std::sqrt(se9 * se9 + 16.0 * se3 * se3 + 9.0 * se1 * se1);
  r.holds_4_3 = r.h9.point <= r.rhs_4_3 + 4.0 * r.se_4_3;
  r.rhs_7 = 7.0 * r.h3.point;
  r.se_7 = std::sqrt(se9 * se9 + 49.0 * se3 * se3);
  r.holds_7 = r.h9.point <= r.rhs_7 + 4.0 * r.se_7;
  return r;
}

RecursionReport recursion_audit(SdpParams params, int n, DestructionRule rule,
                                std::uint64_t samples, std::uint64_t seed,
                                int threads) {
  RecursionReport r;
  r.h3_3n = estimate_h(params, 3.0, 3 * n, rule, samples, seed, threads);
  r.h3_n = estimate_h(params, 3.0, n, rule, samples, derive_seed(seed, 2), threads);
  r.residual = r.h3_3n.point - 49.0 * r.h3_n.point * r.h3_n.point;
  const double se33 = binomial_se(r.h3_3n.point, samples);
  const double se3 = binomial_se(r.h3_n.point, samples);
  r.residual_se =
      std::sqrt(se33 * se33 + std::pow(98.0 * r.h3_n.point * se3, 2));
  return r;
}

PhiEstimate estimate_phi(double p, std::span<const int> k_list,
                         std::uint64_t samples, std::uint64_t seed,
                         int threads) {
  if (k_list.empty()) throw std::invalid_argument("estimate_phi: empty k list");
  std::vector<int> ks(k_list.begin(), k_list.end());
  std::sort(ks.begin(), ks.end());
  if (ks.front() < 1) throw std::invalid_argument("estimate_phi: k must be >= 1");
  const int k_max = ks.back();
  // Window proxy for "finite": margin of max(8, k_max/2) beyond the largest
  // cutoff keeps boundary-touching clusters from contaminating the counts.
  const int R = k_max + std::max(8, k_max / 2);
  const Window w(2 * R + 1, 2 * R + 1, Site{-R, -R});
  const Site origin{0, 0};
  struct Acc {
    std::vector<std::uint64_t> hits;
    Acc& operator+=(const Acc& o) {
      if (hits.size() < o.hits.size()) hits.resize(o.hits.size(), 0);
      for (std::size_t i = 0; i < o.hits.size(); ++i) hits[i] += o.hits[i];
      return *this;
    }
  };
  const auto acc = run_replicates<Acc>(
      samples, threads, [&](std::uint64_t rep, Acc& a) {
        if (a.hits.empty()) a.hits.assign(ks.size(), 0);
        const SiteField f = sample_field(w, p, seed, Stream::x_field, rep);
        if (!f.get(origin)) return;
        ClusterLabeling l(f, true, Connectivity::four);
        if (l.touches_window_boundary(l.label_at(origin))) return;
        const int reach = l.max_l1_reach(origin);
        for (std::size_t i = 0; i < ks.size(); ++i) {
          if (reach >= ks[i]) ++a.hits[i];
        }
      });
  PhiEstimate out;
  out.k_list = ks;
  out.samples = samples;
  out.seed = seed;
  std::vector<std::pair<double, double>> pts;  // (k, log q)
  for (std::size_t i = 0; i < ks.size(); ++i) {
    char tag[48];
    std::snprintf(tag, sizeof(tag), "q[k=%d,p=%g]", ks[i], p);
    out.q.push_back(wilson_estimate(acc.hits.empty() ? 0 : acc.hits[i],
                                    samples, seed, tag));
    if (out.q.back().point > 0.0) {
      pts.emplace_back(ks[i], std::log(out.q.back().point));
    }
  }
  if (pts.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [x, y] : pts) {
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double m = static_cast<double>(pts.size());
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    out.phi_hat = -slope;
    out.intercept = (sy - slope * sx) / m;
    for (auto [x, y] : pts) {
      out.max_abs_residual =
          std::max(out.max_abs_residual, std::abs(y - (slope * x + out.intercept)));
    }
    if (!(out.phi_hat > 0.0)) {
      throw std::runtime_error(
          "estimate_phi: no exponential decay detected; is p supercritical?");
    }
  } else if (pts.size() == 1) {
    out.lower_bound_only = true;
    out.phi_hat = -pts[0].second / pts[0].first;
  } else {
    // Rule of three: every q_k is below ~3/samples at 95% confidence; the
    // smallest cutoff gives the strongest rate bound.
    out.lower_bound_only = true;
    out.phi_hat =
        std::log(static_cast<double>(samples) / 3.0) / ks.front();
  }
  return out;
}

int n_hat_from_phi(double alpha, double phi) {
  if (!(alpha > 0.0 && alpha < 1.0) || !(phi > 0.0)) {
    throw std::invalid_argument("n_hat_from_phi: need alpha in (0,1), phi > 0");
  }
  int n = std::max(1, static_cast<int>(std::floor(std::log(4.0 / alpha) / phi)) + 1);
  while (std::exp(-static_cast<double>(n) * phi) >= alpha / 4.0) ++n;
  return n;
}

CriterionConfig::CriterionConfig(double alpha_, int n_, int n_hat_,
                                 std::optional<double> phi)
    : alpha(alpha_), n(n_), n_hat(n_hat_), phi_estimate(phi) {
  if (!(49.0 * alpha * alpha < alpha / 4.0)) {
    throw std::invalid_argument(
        "CriterionConfig: alpha must satisfy 49 alpha^2 < alpha/4 "
        "(alpha < 1/196)");
  }
  if (n < 1 || n_hat < 1) {
    throw std::invalid_argument("CriterionConfig: n and n_hat must be >= 1");
  }
}

CriterionVerdict finite_size_criterion(SdpParams params,
                                       const CriterionConfig& cfg,
                                       DestructionRule rule,
                                       std::uint64_t samples,
                                       std::uint64_t seed, int threads,
                                       std::uint64_t chain_samples) {
  if (samples < 1) throw std::invalid_argument("finite_size_criterion: samples");
  const double bar = 1.0 - cfg.alpha;
  // Largest failure count that could still clear the bar at the full sample
  // count; once exceeded, finishing the run cannot change the verdict.
  std::uint64_t lo = 0, hi = samples;
  while (lo < hi) {
    const std::uint64_t mid = lo + (hi - lo + 1) / 2;
    if (wilson_lower(samples - mid, samples) > bar) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  const std::uint64_t cap = lo;
  const Window w = rectangle_window(3.0, cfg.n);
  auto [acc, n_eff] = run_replicates_capped<CrossingCount>(
      samples, threads, cap,
      [&](std::uint64_t rep, CrossingCount& a) {
        const SdpSample s = sample_sdp(w, params, rule, seed, rep);
        const bool occ =
            has_crossing(s.z, true, Connectivity::four, Direction::horizontal);
        const bool vac =
            has_crossing(s.z, false, Connectivity::eight, Direction::vertical);
        a.f_hits += occ;
        a.dual_hits += vac;
        a.violations += (occ == vac);
        a.failures += !occ;
      },
      [](const CrossingCount& a) { return a.failures; });
  CriterionVerdict v;
  v.n = cfg.n;
  v.n_hat = cfg.n_hat;
  v.full_samples = n_eff == samples;
  char extra[48];
  std::snprintf(extra, sizeof(extra), "rho=3,n=%d", cfg.n);
  v.f3n = wilson_estimate(acc.f_hits, n_eff, seed,
                          describe("f3n", params, rule, extra));
  v.margin = v.f3n.ci_low - bar;
  v.holds = v.full_samples && cfg.n >= cfg.n_hat && v.f3n.ci_low > bar;
  if (chain_samples > 0) {
    for (int j = 0, scale = cfg.n; j < 3; ++j, scale *= 3) {
      v.scale_chain.push_back(estimate_h(params, 3.0, scale, rule,
                                         chain_samples,
                                         derive_seed(seed, 100 + j), threads));
    }
  }
  return v;
}

ScaleSearchResult criterion_scale_search(SdpParams params, double alpha,
                                         std::span<const int> scales,
                                         DestructionRule rule,
                                         std::uint64_t samples,
                                         std::uint64_t seed, int n_hat,
                                         int threads) {
  std::vector<int> ns(scales.begin(), scales.end());
  std::sort(ns.begin(), ns.end());
  ScaleSearchResult out;
  for (int n : ns) {
    if (n < n_hat) {
      out.skipped_scales.push_back(n);
      continue;
    }
    const CriterionConfig cfg(alpha, n, n_hat);
    out.verdicts.push_back(finite_size_criterion(
        params, cfg, rule, samples, derive_seed(seed, static_cast<std::uint64_t>(n)),
        threads));
    if (out.verdicts.back().holds) {
      out.qualifying_n = n;
      break;
    }
  }
  return out;
}

IncreasingEvent crossing_event(const Window& sub, Direction dir) {
  char name[64];
  std::snprintf(name, sizeof(name), "%ccross[%d..%d)x[%d..%d)",
                dir == Direction::horizontal ? 'H' : 'V', sub.origin.x,
                sub.origin.x + sub.width, sub.origin.y, sub.origin.y + sub.height);
  return {name, [sub, dir](const SiteField& z) {
            return has_crossing(z.crop(sub), true, Connectivity::four, dir);
          }};
}

IncreasingEvent one_arm_event(Site center, int radius) {
  char name[48];
  std::snprintf(name, sizeof(name), "arm[(%d,%d),r=%d]", center.x, center.y,
                radius);
  return {name, [center, radius](const SiteField& z) {
            if (!z.get(center)) return false;
            ClusterLabeling l(z, true, Connectivity::four);
            return l.max_l1_reach(center) >= radius;
          }};
}

IncreasingEvent site_event(Site s) {
  char name[32];
  std::snprintf(name, sizeof(name), "site(%d,%d)", s.x, s.y);
  return {name, [s](const SiteField& z) { return z.get(s); }};
}

IncreasingEvent min_count_event(std::int64_t m) {
  return {"count>=" + std::to_string(m),
          [m](const SiteField& z) { return z.count() >= m; }};
}

namespace {

IncreasingEvent connection_event(Site a, Site b) {
  char name[48];
  std::snprintf(name, sizeof(name), "conn[(%d,%d)-(%d,%d)]", a.x, a.y, b.x, b.y);
  return {name, [a, b](const SiteField& z) {
            if (!z.get(a) || !z.get(b)) return false;
            ClusterLabeling l(z, true, Connectivity::four);
            return l.same_cluster(a, b);
          }};
}

}  // namespace

std::vector<std::pair<IncreasingEvent, IncreasingEvent>> fkg_catalog_3x3(
    const Window& region) {
  if (region.width != 3 || region.height != 3) {
    throw std::invalid_argument("fkg_catalog_3x3: region must be 3x3");
  }
  const int ox = region.origin.x, oy = region.origin.y;
  const IncreasingEvent H = crossing_event(region, Direction::horizontal);
  const IncreasingEvent V = crossing_event(region, Direction::vertical);
  const IncreasingEvent Htop =
      crossing_event(Window(3, 1, Site{ox, oy + 2}), Direction::horizontal);
  const IncreasingEvent Hbot2 =
      crossing_event(Window(3, 2, Site{ox, oy}), Direction::horizontal);
  const IncreasingEvent Vleft =
      crossing_event(Window(1, 3, Site{ox, oy}), Direction::vertical);
  const IncreasingEvent arm = one_arm_event(Site{ox + 1, oy + 1}, 1);
  const IncreasingEvent center = site_event(Site{ox + 1, oy + 1});
  const IncreasingEvent corner = site_event(Site{ox, oy});
  const IncreasingEvent majority = min_count_event(5);
  const IncreasingEvent diag =
      connection_event(Site{ox, oy}, Site{ox + 2, oy + 2});
  return {
      {H, V},          {H, Htop},        {Htop, Hbot2}, {H, arm},
      {Vleft, Htop},   {arm, center},    {center, corner},
      {H, majority},   {diag, V},        {Hbot2, Vleft},
  };
}

namespace {

double fkg_gap_se(double pa, double pb, double pab, std::uint64_t n) {
  // Delta method for pab - pa*pb from the three indicator means.
  const double var_ab = pab * (1 - pab);
  const double var_a = pa * (1 - pa);
  const double var_b = pb * (1 - pb);
  const double cov_ab_a = pab * (1 - pa);
  const double cov_ab_b = pab * (1 - pb);
  const double cov_a_b = pab - pa * pb;
  const double v = var_ab + pb * pb * var_a + pa * pa * var_b -
                   2 * pb * cov_ab_a - 2 * pa * cov_ab_b +
                   2 * pa * pb * cov_a_b;
  return std::sqrt(std::max(0.0, v) / static_cast<double>(n));
}

}  // namespace

FkgReport fkg_check(SdpParams params, DestructionRule rule,
                    const Window& region,
                    std::span<const std::pair<IncreasingEvent, IncreasingEvent>>
                        pairs,
                    std::uint64_t samples, std::uint64_t seed, int threads) {
  struct Acc {
    std::vector<std::uint64_t> counts;  // 3 per pair: a, b, ab
    Acc& operator+=(const Acc& o) {
      if (counts.size() < o.counts.size()) counts.resize(o.counts.size(), 0);
      for (std::size_t i = 0; i < o.counts.size(); ++i) counts[i] += o.counts[i];
      return *this;
    }
  };
  const std::size_t np = pairs.size();
  const auto acc = run_replicates<Acc>(
      samples, threads, [&](std::uint64_t rep, Acc& a) {
        if (a.counts.empty()) a.counts.assign(3 * np, 0);
        const SdpSample s = sample_sdp(region, params, rule, seed, rep);
        for (std::size_t i = 0; i < np; ++i) {
          const bool ea = pairs[i].first.pred(s.z);
          const bool eb = pairs[i].second.pred(s.z);
          a.counts[3 * i] += ea;
          a.counts[3 * i + 1] += eb;
          a.counts[3 * i + 2] += (ea && eb);
        }
      });
  FkgReport r;
  r.samples = samples;
  r.all_ok = true;
  const double nn = static_cast<double>(samples);
  for (std::size_t i = 0; i < np; ++i) {
    FkgPairResult pr;
    pr.a = pairs[i].first.name;
    pr.b = pairs[i].second.name;
    pr.p_a = acc.counts[3 * i] / nn;
    pr.p_b = acc.counts[3 * i + 1] / nn;
    pr.p_ab = acc.counts[3 * i + 2] / nn;
    pr.gap = pr.p_ab - pr.p_a * pr.p_b;
    pr.se_gap = fkg_gap_se(pr.p_a, pr.p_b, pr.p_ab, samples);
    pr.ok = pr.gap >= -4.0 * pr.se_gap;
    r.all_ok = r.all_ok && pr.ok;
    r.pairs.push_back(std::move(pr));
  }
  return r;
}

FkgReport fkg_check_exact(
    const ExactFiniteRangeModel& model, double delta,
    std::span<const std::pair<IncreasingEvent, IncreasingEvent>> pairs) {
  FkgReport r;
  r.all_ok = true;
  for (const auto& [ea, eb] : pairs) {
    FkgPairResult pr;
    pr.a = ea.name;
    pr.b = eb.name;
    pr.p_a = model.event_probability(delta, ea.pred);
    pr.p_b = model.event_probability(delta, eb.pred);
    pr.p_ab = model.event_probability(delta, [&](const SiteField& z) {
      return ea.pred(z) && eb.pred(z);
    });
    pr.gap = pr.p_ab - pr.p_a * pr.p_b;
    pr.ok = pr.gap >= -1e-12;
    r.all_ok = r.all_ok && pr.ok;
    r.pairs.push_back(std::move(pr));
  }
  return r;
}

UniquenessReport uniqueness_diagnostic(SdpParams params, int n,
                                       DestructionRule rule,
                                       std::uint64_t samples,
                                       std::uint64_t seed, int threads) {
  constexpr std::size_t kMaxBucket = 16;
  struct Acc {
    std::vector<std::uint64_t> hist;
    Acc& operator+=(const Acc& o) {
      if (hist.size() < o.hist.size()) hist.resize(o.hist.size(), 0);
      for (std::size_t i = 0; i < o.hist.size(); ++i) hist[i] += o.hist[i];
      return *this;
    }
  };
  const Window w(n, n);
  const auto acc = run_replicates<Acc>(
      samples, threads, [&](std::uint64_t rep, Acc& a) {
        if (a.hist.empty()) a.hist.assign(kMaxBucket + 1, 0);
        const SdpSample s = sample_sdp(w, params, rule, seed, rep);
        const int c = count_spanning_clusters(s.z, true, Connectivity::four,
                                              Direction::horizontal);
        ++a.hist[std::min<std::size_t>(static_cast<std::size_t>(c), kMaxBucket)];
      });
  UniquenessReport r;
  r.histogram = acc.hist.empty()
                    ? std::vector<std::uint64_t>(kMaxBucket + 1, 0)
                    : acc.hist;
  r.samples = samples;
  std::uint64_t ge2 = 0;
  for (std::size_t i = 2; i < r.histogram.size(); ++i) ge2 += r.histogram[i];
  r.fraction_ge2 = static_cast<double>(ge2) / static_cast<double>(samples);
  return r;
}

SubcriticalReport subcritical_reduction_check(int side, SdpParams params,
                                              std::uint64_t samples,
                                              std::uint64_t seed,
                                              int threads) {
  const Window w(side, side);
  const double effective = params.p + (1.0 - params.p) * params.delta;
  struct Acc {
    std::uint64_t sdp_hits = 0, direct_hits = 0, misfires = 0;
    Acc& operator+=(const Acc& o) {
      sdp_hits += o.sdp_hits;
      direct_hits += o.direct_hits;
      misfires += o.misfires;
      return *this;
    }
  };
  const auto acc = run_replicates<Acc>(
      samples, threads, [&](std::uint64_t rep, Acc& a) {
        const SdpSample s =
            sample_sdp(w, params, DestructionRule::window_boundary(), seed, rep);
        a.sdp_hits +=
            has_crossing(s.z, true, Connectivity::four, Direction::horizontal);
        // Skipping destruction on the same draw gives the coupled
        // Bernoulli(p + (1-p) delta) field; a difference means the boundary
        // proxy destroyed something.
        const SiteField coupled = s.x | s.y;
        a.misfires += !(s.z == coupled);
        const SiteField direct =
            sample_field(w, effective, seed, Stream::direct, rep);
        a.direct_hits +=
            has_crossing(direct, true, Connectivity::four, Direction::horizontal);
      });
  SubcriticalReport r;
  r.sdp_crossing =
      wilson_estimate(acc.sdp_hits, samples, seed,
                      describe("sdp-crossing", params,
                               DestructionRule::window_boundary(),
                               "s=" + std::to_string(side)));
  char tag[64];
  std::snprintf(tag, sizeof(tag), "direct-crossing[q=%g,s=%d]", effective, side);
  r.direct_crossing = wilson_estimate(acc.direct_hits, samples, seed, tag);
  r.gap = r.sdp_crossing.point - r.direct_crossing.point;
  r.gap_se = std::sqrt(std::pow(binomial_se(r.sdp_crossing.point, samples), 2) +
                       std::pow(binomial_se(r.direct_crossing.point, samples), 2));
  r.within_4se = std::abs(r.gap) <= 4.0 * r.gap_se;
  r.misfire = wilson_estimate(acc.misfires, samples, seed, "misfire-fraction");
  r.bit_identical = acc.misfires == 0;
  return r;
}

DynamicsComparison dynamics_crossing_comparison(DynParams d, double rho, int s,
                                                DestructionRule rule,
                                                std::uint64_t samples,
                                                std::uint64_t seed,
                                                int threads) {
  const Window rect = rectangle_window(rho, s);
  const Window clock_window = rect.expanded(rule.margin());
  const auto acc = run_replicates<Count>(
      samples, threads, [&](std::uint64_t rep, Count& a) {
        const ClockField c = sample_clocks(clock_window, d.t, seed, rep);
        const SiteField z = evolve_destruct(c, d, rule).crop(rect);
        a.hits +=
            has_crossing(z, true, Connectivity::four, Direction::horizontal);
      });
  DynamicsComparison r;
  char tag[96];
  std::snprintf(tag, sizeof(tag), "dynamics-crossing[tau=%g,t=%g,rho=%g,s=%d]",
                d.tau, d.t, rho, s);
  r.dynamics_f = wilson_estimate(acc.hits, samples, seed, tag);
  r.mapped = params_from_times(d);
  r.sdp_f = estimate_crossing(r.mapped, rho, s, rule, samples,
                              derive_seed(seed, 0xD11A), threads)
                .f;
  r.gap = r.dynamics_f.point - r.sdp_f.point;
  r.gap_se = std::sqrt(std::pow(binomial_se(r.dynamics_f.point, samples), 2) +
                       std::pow(binomial_se(r.sdp_f.point, samples), 2));
  r.within_4se = std::abs(r.gap) <= 4.0 * r.gap_se;
  return r;
}

}  // namespace sdp
