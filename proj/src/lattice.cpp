#include "sdp/lattice.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>

namespace sdp {

int l1_distance(Site a, Site b) {
  return std::abs(a.x - b.x) + std::abs(a.y - b.y);
}

Window::Window(int w, int h, Site o) : width(w), height(h), origin(o) {
  if (w < 1 || h < 1) {
    throw std::invalid_argument("Window: width and height must be >= 1");
  }
}

bool Window::contains_window(const Window& inner) const {
  return inner.origin.x >= origin.x && inner.origin.y >= origin.y &&
         inner.origin.x + inner.width <= origin.x + width &&
         inner.origin.y + inner.height <= origin.y + height;
}

Window Window::expanded(int margin) const {
  return Window(width + 2 * margin, height + 2 * margin,
                Site{origin.x - margin, origin.y - margin});
}

Ball::Ball(Site c, int r) : center(c), radius(r) {
  if (r < 0) throw std::invalid_argument("Ball: radius must be >= 0");
}

std::vector<Site> Ball::boundary_sites() const {
  if (radius == 0) return {center};
  std::vector<Site> out;
  out.reserve(static_cast<std::size_t>(4) * radius);
  // Walk the diamond starting at the east tip, counterclockwise.
  Site v{center.x + radius, center.y};
  const std::array<Site, 4> step = {Site{-1, 1}, Site{-1, -1}, Site{1, -1},
                                    Site{1, 1}};
  for (const Site& d : step) {
    for (int i = 0; i < radius; ++i) {
      out.push_back(v);
      v.x += d.x;
      v.y += d.y;
    }
  }
  return out;
}

namespace {

void require_inside(Site s, const Window& w, const char* what) {
  if (!w.contains(s)) {
    throw std::invalid_argument(std::string(what) + ": site outside window");
  }
}

}  // namespace

int neighbors4(Site s, const Window& w, std::array<Site, 4>& out) {
  require_inside(s, w, "neighbors4");
  const std::array<Site, 4> cand = {Site{s.x + 1, s.y}, Site{s.x, s.y + 1},
                                    Site{s.x - 1, s.y}, Site{s.x, s.y - 1}};
  int n = 0;
  for (const Site& c : cand) {
    if (w.contains(c)) out[n++] = c;
  }
  return n;
}

std::vector<Site> neighbors4(Site s, const Window& w) {
  std::array<Site, 4> buf;
  int n = neighbors4(s, w, buf);
  return std::vector<Site>(buf.begin(), buf.begin() + n);
}

int neighbors8(Site s, const Window& w, std::array<Site, 8>& out) {
  require_inside(s, w, "neighbors8");
  const std::array<Site, 8> cand = {
      Site{s.x + 1, s.y},     Site{s.x + 1, s.y + 1}, Site{s.x, s.y + 1},
      Site{s.x - 1, s.y + 1}, Site{s.x - 1, s.y},     Site{s.x - 1, s.y - 1},
      Site{s.x, s.y - 1},     Site{s.x + 1, s.y - 1}};
  int n = 0;
  for (const Site& c : cand) {
    if (w.contains(c)) out[n++] = c;
  }
  return n;
}

std::vector<Site> neighbors8(Site s, const Window& w) {
  std::array<Site, 8> buf;
  int n = neighbors8(s, w, buf);
  return std::vector<Site>(buf.begin(), buf.begin() + n);
}

int set_distance(std::span<const Site> a, std::span<const Site> b) {
  if (a.empty() || b.empty()) {
    throw std::invalid_argument("set_distance: empty site set");
  }
  int best = std::numeric_limits<int>::max();
  for (const Site& v : a) {
    for (const Site& w : b) {
      best = std::min(best, l1_distance(v, w));
    }
  }
  return best;
}

Window rectangle_window(double rho, int s) {
  if (!(rho > 0.0) || s < 1) {
    throw std::invalid_argument("rectangle_window: need rho > 0 and s >= 1");
  }
  // Floor rule, with a tiny nudge so decimal inputs like 0.3 that are not
  // exactly representable in binary still round the intended way.
  const int w = static_cast<int>(std::floor(rho * s + 1e-9));
  if (w < 1) {
    throw std::invalid_argument("rectangle_window: degenerate rectangle");
  }
  return Window(w, s);
}

}  // namespace sdp
