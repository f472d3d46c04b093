#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "sdp/model.hpp"

namespace sdp {

/// Exact finite-range model on a small region: enumerates every initial
/// configuration on the L1-dilation of the region by k and aggregates the
/// exact distribution of the surviving pattern. Probabilities derived from
/// it are exact up to compensated-summation error (<= 1e-12).
///
/// The enumeration footprint is the dilation, not a bounding box: the
/// survival of a region site is determined by the configuration within
/// distance k of it, so corner sites of the bounding box are irrelevant.
class ExactFiniteRangeModel {
 public:
  static constexpr int kMaxSupportSites = 24;  // 2^24 configurations
  static constexpr int kMaxRegionSites = 16;

  /// Throws std::invalid_argument when the enumeration budget is exceeded.
  ExactFiniteRangeModel(const Window& region, int k, double p);

  const Window& region() const { return region_; }
  int range() const { return k_; }
  double p() const { return p_; }
  int support_sites() const { return static_cast<int>(support_.size()); }

  /// The law of the surviving-pattern bitmask on the region: entry s is
  /// P(pattern = s), with s in the region's row-major bit order.
  const std::vector<double>& pattern_distribution() const { return pattern_prob_; }

  /// Exact P(pred(z)) for the final field z on the region, with enhancement
  /// density delta. pred must be a pure function of the field. The cost is
  /// 4^r in the region size r, so r is capped at 12.
  double event_probability(
      double delta, const std::function<bool(const SiteField&)>& pred) const;

  /// Exact joint law of (z_a, z_b): entry [2*za + zb].
  std::array<double, 4> site_pair_law(double delta, Site a, Site b) const;

  /// Exact P(z_i = 1).
  double site_occupancy(double delta, Site i) const;

 private:
  Window region_;
  int k_;
  double p_;
  std::vector<Site> support_;           // dilated footprint, deterministic order
  std::vector<std::int8_t> region_bit_; // support index -> region bit or -1
  std::vector<double> pattern_prob_;    // 2^r entries

  void enumerate();
};

/// Kahan-compensated accumulator.
struct Kahan {
  double sum = 0.0;
  double c = 0.0;
  void add(double x) {
    const double y = x - c;
    const double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
};

}  // namespace sdp
