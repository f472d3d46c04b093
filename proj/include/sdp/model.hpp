#pragma once

#include <cstdint>
#include <string>

#include "sdp/cluster.hpp"
#include "sdp/field.hpp"
#include "sdp/lattice.hpp"

namespace sdp {

struct SdpParams {
  double p = 0.0;      // initial density
  double delta = 0.0;  // enhancement density

  SdpParams() = default;
  SdpParams(double p_, double delta_);
};

/// How "infinite" clusters are identified at finite volume.
///   window_boundary — a cluster is destroyed iff it touches the window
///     frame (the conventional finite-volume proxy).
///   finite_range(k) — a site is destroyed iff its occupied cluster reaches
///     L1 distance k from it. This is an exact model in its own right:
///     restrictions at distance > 2k are exactly independent.
///   none — ordinary percolation, no destruction.
struct DestructionRule {
  enum class Kind { none, window_boundary, finite_range };

  Kind kind = Kind::none;
  int range = 0;  // k, finite_range only

  static DestructionRule none() { return {Kind::none, 0}; }
  static DestructionRule window_boundary() { return {Kind::window_boundary, 0}; }
  static DestructionRule finite_range(int k);

  /// Margin the sampled window needs around the region of interest.
  int margin() const { return kind == Kind::finite_range ? range : 0; }

  std::string to_string() const;
  static DestructionRule parse(const std::string& text);
};

/// One SDP draw: x on the (possibly enlarged) sample window; x_star on the
/// same window, exact on `region`; y and z = x_star | y on `region`.
struct SdpSample {
  SiteField x;
  SiteField x_star;
  SiteField y;
  SiteField z;
  DestructionRule rule;
  SdpParams params;
};

/// Zero every occupied site whose cluster the rule classifies as infinite.
/// For finite_range the result is exact on `region` (which must have margin
/// k inside x.window) and defined best-effort elsewhere.
SiteField destroy(const SiteField& x, DestructionRule rule,
                  const Window& region);

/// The three-step draw: x ~ Bernoulli(p) on region grown by the rule's
/// margin, destruction, independent enhancement y ~ Bernoulli(delta), and
/// z = x_star | y on region. Deterministic in (seed, replicate).
SdpSample sample_sdp(const Window& region, SdpParams params,
                     DestructionRule rule, std::uint64_t seed,
                     std::uint64_t replicate = 0);

/// delta + (1-delta) * (p - pi_k): the exact occupancy probability of a
/// site whose destruction probability (occupied and connected to the
/// sphere of radius k) is pi_k. Throws if pi_k > p.
double occupancy_identity(SdpParams params, double pi_k);

}  // namespace sdp
