#include "sdp/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sdp {

DynParams::DynParams(double tau_, double t_) : tau(tau_), t(t_) {
  if (!(tau >= 0.0 && t >= tau)) {
    throw std::invalid_argument("DynParams: need 0 <= tau <= t");
  }
}

ClockField sample_clocks(const Window& w, double t_max, std::uint64_t seed,
                         std::uint64_t replicate) {
  if (!(t_max > 0.0)) {
    throw std::invalid_argument("sample_clocks: t_max must be positive");
  }
  ClockField c;
  c.window = w;
  c.horizon = t_max;
  const std::int64_t n = w.site_count();
  c.offsets.assign(static_cast<std::size_t>(n) + 1, 0);
  c.arrivals.reserve(static_cast<std::size_t>(
      static_cast<double>(n) * t_max * 1.25 + 16.0));
  std::int64_t idx = 0;
  for (int y = w.origin.y; y < w.origin.y + w.height; ++y) {
    for (int x = w.origin.x; x < w.origin.x + w.width; ++x, ++idx) {
      const std::uint64_t key = site_key(x, y);
      double t = 0.0;
      for (std::uint32_t draw = 0;; ++draw) {
        double u = uniform01(seed, Stream::clocks, replicate, key, draw);
        if (u == 0.0) u = 0x1.0p-53;  // keep inter-arrival gaps strictly positive
        t += -std::log1p(-u);
        if (t > t_max) break;
        c.arrivals.push_back(t);
      }
      c.offsets[static_cast<std::size_t>(idx) + 1] =
          static_cast<std::uint32_t>(c.arrivals.size());
    }
  }
  return c;
}

SiteField config_at(const ClockField& c, double t) {
  if (!(t >= 0.0 && t <= c.horizon)) {
    throw std::invalid_argument("config_at: t must be in [0, horizon]");
  }
  SiteField f(c.window);
  const std::int64_t n = c.window.site_count();
  for (std::int64_t i = 0; i < n; ++i) {
    const auto a = c.arrivals_at(i);
    if (!a.empty() && a.front() <= t) f.set_index(i, true);
  }
  return f;
}

SiteField evolve_destruct(const ClockField& c, DynParams d,
                          DestructionRule rule) {
  if (d.t > c.horizon) {
    throw std::invalid_argument("evolve_destruct: t beyond the clock horizon");
  }
  const Window& w = c.window;
  const int m = rule.margin();
  const Window region =
      m == 0 ? w
             : Window(w.width - 2 * m, w.height - 2 * m,
                      Site{w.origin.x + m, w.origin.y + m});
  const SiteField at_tau = config_at(c, d.tau);
  const SiteField survivors = destroy(at_tau, rule, region);
  SiteField out = survivors;
  const std::int64_t n = w.site_count();
  for (std::int64_t i = 0; i < n; ++i) {
    if (out.get_index(i)) continue;
    const auto a = c.arrivals_at(i);
    // Any ring in (tau, t] re-occupies the site.
    const auto it = std::upper_bound(a.begin(), a.end(), d.tau);
    if (it != a.end() && *it <= d.t) out.set_index(i, true);
  }
  return out;
}

SdpParams params_from_times(DynParams d) {
  return SdpParams(-std::expm1(-d.tau), -std::expm1(-(d.t - d.tau)));
}

DynParams times_from_params(SdpParams s) {
  if (s.p >= 1.0 || s.delta >= 1.0) {
    throw std::invalid_argument(
        "times_from_params: p = 1 or delta = 1 has no finite preimage");
  }
  const double tau = -std::log1p(-s.p);
  return DynParams(tau, tau - std::log1p(-s.delta));
}

QuadrantComparison quadrant_monotonicity_check(const ClockField& c,
                                               DynParams d1, DynParams d2,
                                               DestructionRule rule) {
  QuadrantComparison r;
  const SiteField f1 = evolve_destruct(c, d1, rule);
  const SiteField f2 = evolve_destruct(c, d2, rule);
  r.sites = c.window.site_count();
  r.density1 = static_cast<double>(f1.count()) / static_cast<double>(r.sites);
  r.density2 = static_cast<double>(f2.count()) / static_cast<double>(r.sites);
  if (d1.tau == d2.tau) {
    r.pointwise_asserted = true;
    const SiteField& low = d1.t <= d2.t ? f1 : f2;
    const SiteField& high = d1.t <= d2.t ? f2 : f1;
    for (std::int64_t i = 0; i < r.sites; ++i) {
      if (low.get_index(i) && !high.get_index(i)) ++r.violations;
    }
    r.note = "equal tau: ordering in t asserted pointwise";
  } else {
    r.note = "different tau: densities reported, ordering is stochastic only";
  }
  return r;
}

}  // namespace sdp
