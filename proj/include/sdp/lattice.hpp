#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace sdp {

/// A lattice site in absolute coordinates.
struct Site {
  int x = 0;
  int y = 0;

  friend bool operator==(Site a, Site b) { return a.x == b.x && a.y == b.y; }
  friend bool operator!=(Site a, Site b) { return !(a == b); }
};

/// L1 (graph) distance |v1-w1| + |v2-w2|.
int l1_distance(Site a, Site b);

/// Axis-aligned rectangular window of sites. origin is the lower-left
/// corner; the window covers [origin.x, origin.x+width) x [origin.y,
/// origin.y+height). Sites map to row-major flat indices.
struct Window {
  int width = 1;
  int height = 1;
  Site origin{0, 0};

  Window() = default;
  Window(int w, int h, Site o = Site{0, 0});

  bool contains(Site s) const {
    return s.x >= origin.x && s.x < origin.x + width && s.y >= origin.y &&
           s.y < origin.y + height;
  }
  bool contains_window(const Window& inner) const;

  std::int64_t site_count() const {
    return static_cast<std::int64_t>(width) * height;
  }
  std::int64_t index_of(Site s) const {
    return static_cast<std::int64_t>(s.y - origin.y) * width + (s.x - origin.x);
  }
  Site site_at(std::int64_t idx) const {
    return Site{origin.x + static_cast<int>(idx % width),
                origin.y + static_cast<int>(idx / width)};
  }
  /// True iff s lies on the window frame (first/last row or column).
  bool on_boundary(Site s) const {
    return s.x == origin.x || s.x == origin.x + width - 1 || s.y == origin.y ||
           s.y == origin.y + height - 1;
  }
  /// Window grown by `margin` sites on every side.
  Window expanded(int margin) const;

  friend bool operator==(const Window& a, const Window& b) {
    return a.width == b.width && a.height == b.height && a.origin == b.origin;
  }
};

/// L1 ball B(center, radius); boundary is the set at distance exactly radius.
struct Ball {
  Site center;
  int radius = 0;

  Ball(Site c, int r);

  bool contains(Site s) const { return l1_distance(center, s) <= radius; }
  bool on_boundary(Site s) const { return l1_distance(center, s) == radius; }
  /// The 4*radius sites at distance exactly radius (just the center for
  /// radius 0), in a fixed deterministic order.
  std::vector<Site> boundary_sites() const;
};

enum class Connectivity { four, eight };
enum class Direction { horizontal, vertical };

/// Axis neighbors of s inside w, in E, N, W, S order. Returns the count,
/// filling `out`. Throws std::invalid_argument if s is outside w.
int neighbors4(Site s, const Window& w, std::array<Site, 4>& out);
std::vector<Site> neighbors4(Site s, const Window& w);

/// Matching-lattice neighbors (4 axis + 4 diagonal) inside w, in
/// E, NE, N, NW, W, SW, S, SE order.
int neighbors8(Site s, const Window& w, std::array<Site, 8>& out);
std::vector<Site> neighbors8(Site s, const Window& w);

/// min{|v-w| : v in a, w in b}. Throws std::invalid_argument on empty input.
int set_distance(std::span<const Site> a, std::span<const Site> b);

/// The floor(rho*s) x s window at the origin. Throws
/// std::invalid_argument if the rounded width is zero.
Window rectangle_window(double rho, int s);

}  // namespace sdp
