#include "sdp/model.hpp"

#include <stdexcept>

namespace sdp {

SdpParams::SdpParams(double p_, double delta_) : p(p_), delta(delta_) {
  if (!(p >= 0.0 && p <= 1.0 && delta >= 0.0 && delta <= 1.0)) {
    throw std::invalid_argument("SdpParams: p and delta must be in [0,1]");
  }
}

DestructionRule DestructionRule::finite_range(int k) {
  if (k < 1) {
    throw std::invalid_argument("DestructionRule: finite range k must be >= 1");
  }
  return {Kind::finite_range, k};
}

std::string DestructionRule::to_string() const {
  switch (kind) {
    case Kind::none:
      return "none";
    case Kind::window_boundary:
      return "window-boundary";
    case Kind::finite_range:
      return "finite-range(" + std::to_string(range) + ")";
  }
  return "?";
}

DestructionRule DestructionRule::parse(const std::string& text) {
  if (text == "none") return none();
  if (text == "window-boundary") return window_boundary();
  if (text == "finite-range") return finite_range(1);
  const std::string prefix = "finite-range(";
  if (text.rfind(prefix, 0) == 0 && text.back() == ')') {
    return finite_range(
        std::stoi(text.substr(prefix.size(), text.size() - prefix.size() - 1)));
  }
  throw std::invalid_argument("DestructionRule: cannot parse '" + text + "'");
}

SiteField destroy(const SiteField& x, DestructionRule rule,
                  const Window& region) {
  const Window& w = x.window();
  if (!w.contains_window(region)) {
    throw std::invalid_argument("destroy: region not inside field window");
  }
  if (rule.kind == DestructionRule::Kind::none) return x;
  if (rule.kind == DestructionRule::Kind::finite_range &&
      !w.contains_window(region.expanded(rule.range))) {
    throw std::invalid_argument(
        "destroy: finite-range rule needs margin " +
        std::to_string(rule.range) + " around the region");
  }
  ClusterLabeling labels(x, true, Connectivity::four);
  SiteField out = x;
  const std::int64_t n = w.site_count();
  if (rule.kind == DestructionRule::Kind::window_boundary) {
    for (std::int64_t i = 0; i < n; ++i) {
      const std::int32_t r = labels.label_at_index(i);
      if (r >= 0 && labels.touches_window_boundary(r)) out.set_index(i, false);
    }
  } else {
    for (std::int64_t i = 0; i < n; ++i) {
      if (labels.label_at_index(i) < 0) continue;
      if (labels.max_l1_reach(w.site_at(i)) >= rule.range) {
        out.set_index(i, false);
      }
    }
  }
  return out;
}

SdpSample sample_sdp(const Window& region, SdpParams params,
                     DestructionRule rule, std::uint64_t seed,
                     std::uint64_t replicate) {
  const Window sample_window = region.expanded(rule.margin());
  SiteField x =
      sample_field(sample_window, params.p, seed, Stream::x_field, replicate);
  SiteField x_star = destroy(x, rule, region);
  SiteField y =
      sample_field(region, params.delta, seed, Stream::y_field, replicate);
  SiteField z = x_star.crop(region) | y;
  return SdpSample{std::move(x), std::move(x_star), std::move(y), std::move(z),
                   rule, params};
}

double occupancy_identity(SdpParams params, double pi_k) {
  if (!(pi_k >= 0.0 && pi_k <= 1.0)) {
    throw std::invalid_argument("occupancy_identity: pi_k must be in [0,1]");
  }
  if (pi_k > params.p) {
    throw std::invalid_argument(
        "occupancy_identity: connection probability cannot exceed density");
  }
  return params.delta + (1.0 - params.delta) * (params.p - pi_k);
}

}  // namespace sdp
