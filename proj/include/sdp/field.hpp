#pragma once

#include <cstdint>
#include <vector>

#include "sdp/lattice.hpp"
#include "sdp/rng.hpp"

namespace sdp {

/// Bit-per-site occupancy state on a rectangular window
/// (true = occupied/black, false = vacant/white).
class SiteField {
 public:
  explicit SiteField(const Window& w, bool fill = false);

  const Window& window() const { return win_; }
  std::int64_t site_count() const { return win_.site_count(); }

  bool get(Site s) const { return get_index(win_.index_of(s)); }
  void set(Site s, bool v) { set_index(win_.index_of(s), v); }
  bool get_index(std::int64_t i) const {
    return (words_[static_cast<std::size_t>(i >> 6)] >> (i & 63)) & 1u;
  }
  void set_index(std::int64_t i, bool v) {
    const std::uint64_t m = std::uint64_t{1} << (i & 63);
    auto& w = words_[static_cast<std::size_t>(i >> 6)];
    w = v ? (w | m) : (w & ~m);
  }

  /// Number of occupied sites.
  std::int64_t count() const;

  /// Pointwise comparison; both operands must share a window.
  bool le(const SiteField& other) const;
  SiteField operator|(const SiteField& other) const;
  friend bool operator==(const SiteField& a, const SiteField& b);

  /// Restriction to a sub-window.
  SiteField crop(const Window& sub) const;

 private:
  Window win_;
  std::vector<std::uint64_t> words_;

  void check_same_window(const SiteField& other) const;
};

/// Independent Bernoulli(prob) occupancy, coupled through shared per-site
/// uniforms: for a fixed (seed, stream, replicate) key, raising prob can
/// only add occupied sites. Site keys are absolute coordinates, so a field
/// sampled on an enlarged window restricts to the smaller-window field.
SiteField sample_field(const Window& w, double prob, std::uint64_t seed,
                       Stream stream = Stream::generic,
                       std::uint64_t replicate = 0);

}  // namespace sdp
