#include "sdp/cluster.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace sdp {

namespace {

inline std::int32_t uf_find(std::vector<std::int32_t>& parent, std::int32_t i) {
  while (parent[i] != i) {
    parent[i] = parent[parent[i]];  // path halving
    i = parent[i];
  }
  return i;
}

inline void uf_union(std::vector<std::int32_t>& parent, std::int32_t a,
                     std::int32_t b) {
  a = uf_find(parent, a);
  b = uf_find(parent, b);
  if (a == b) return;
  // Smaller root wins, so the final root of a set is its minimum element.
  if (a < b) {
    parent[b] = a;
  } else {
    parent[a] = b;
  }
}

// Raster-scan union-find. parent[idx] == -1 marks sites not in `state`;
// afterwards every state site holds its canonical (minimum-index) root.
void build_labels(const SiteField& f, bool state, Connectivity conn,
                  std::vector<std::int32_t>& parent) {
  const Window& w = f.window();
  const int width = w.width;
  const std::int64_t n = w.site_count();
  parent.resize(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    parent[static_cast<std::size_t>(i)] =
        f.get_index(i) == state ? static_cast<std::int32_t>(i) : -1;
  }
  const bool eight = conn == Connectivity::eight;
  for (std::int64_t i = 0; i < n; ++i) {
    if (parent[static_cast<std::size_t>(i)] < 0) continue;
    const std::int32_t idx = static_cast<std::int32_t>(i);
    const int x = static_cast<int>(i % width);
    const bool has_south = i >= width;
    if (x > 0 && parent[static_cast<std::size_t>(i - 1)] >= 0) {
      uf_union(parent, idx, idx - 1);
    }
    if (has_south) {
      if (parent[static_cast<std::size_t>(i - width)] >= 0) {
        uf_union(parent, idx, idx - width);
      }
      if (eight) {
        if (x > 0 && parent[static_cast<std::size_t>(i - width - 1)] >= 0) {
          uf_union(parent, idx, idx - width - 1);
        }
        if (x < width - 1 &&
            parent[static_cast<std::size_t>(i - width + 1)] >= 0) {
          uf_union(parent, idx, idx - width + 1);
        }
      }
    }
  }
  for (std::int64_t i = 0; i < n; ++i) {
    if (parent[static_cast<std::size_t>(i)] >= 0) {
      parent[static_cast<std::size_t>(i)] =
          uf_find(parent, static_cast<std::int32_t>(i));
    }
  }
}

}  // namespace

ClusterLabeling::ClusterLabeling(const SiteField& f, bool state,
                                 Connectivity conn)
    : win_(f.window()), state_(state), conn_(conn) {
  build_labels(f, state, conn, label_);
  const std::int64_t n = win_.site_count();
  const int width = win_.width;
  min_u_.assign(label_.size(), std::numeric_limits<std::int32_t>::max());
  max_u_.assign(label_.size(), std::numeric_limits<std::int32_t>::min());
  min_v_.assign(label_.size(), std::numeric_limits<std::int32_t>::max());
  max_v_.assign(label_.size(), std::numeric_limits<std::int32_t>::min());
  touches_boundary_.assign(label_.size(), 0);
  for (std::int64_t i = 0; i < n; ++i) {
    const std::int32_t r = label_[static_cast<std::size_t>(i)];
    if (r < 0) continue;
    const int x = static_cast<int>(i % width);
    const int y = static_cast<int>(i / width);
    // Rotated coordinates: |a-b|_1 is a max of differences in u = x+y and
    // v = x-y, so per-cluster extremes answer L1 reach queries in O(1).
    const std::int32_t u = x + y;
    const std::int32_t v = x - y;
    auto ri = static_cast<std::size_t>(r);
    min_u_[ri] = std::min(min_u_[ri], u);
    max_u_[ri] = std::max(max_u_[ri], u);
    min_v_[ri] = std::min(min_v_[ri], v);
    max_v_[ri] = std::max(max_v_[ri], v);
    if (x == 0 || x == width - 1 || y == 0 || y == win_.height - 1) {
      touches_boundary_[ri] = 1;
    }
  }
}

bool ClusterLabeling::same_cluster(Site a, Site b) const {
  const std::int32_t la = label_at(a);
  return la >= 0 && la == label_at(b);
}

std::int64_t ClusterLabeling::cluster_count() const {
  std::int64_t c = 0;
  for (std::size_t i = 0; i < label_.size(); ++i) {
    if (label_[i] == static_cast<std::int32_t>(i)) ++c;
  }
  return c;
}

const std::unordered_map<std::int32_t, std::int64_t>&
ClusterLabeling::cluster_sizes() const {
  if (!sizes_built_) {
    for (std::int32_t r : label_) {
      if (r >= 0) ++sizes_[r];
    }
    sizes_built_ = true;
  }
  return sizes_;
}

bool ClusterLabeling::touches_window_boundary(std::int32_t label) const {
  if (label < 0 || static_cast<std::size_t>(label) >= label_.size() ||
      label_[static_cast<std::size_t>(label)] != label) {
    throw std::invalid_argument("touches_window_boundary: not a label");
  }
  return touches_boundary_[static_cast<std::size_t>(label)] != 0;
}

int ClusterLabeling::max_l1_reach(Site s) const {
  const std::int32_t r = label_at(s);
  if (r < 0) return -1;
  const auto ri = static_cast<std::size_t>(r);
  const int x = s.x - win_.origin.x;
  const int y = s.y - win_.origin.y;
  const int u = x + y;
  const int v = x - y;
  return std::max({u - min_u_[ri], max_u_[ri] - u, v - min_v_[ri],
                   max_v_[ri] - v});
}

namespace {

// Distinct roots along the start edge, then membership test along the goal
// edge. Returns the spanning-cluster roots.
std::vector<std::int32_t> spanning_roots(const SiteField& f, bool state,
                                         Connectivity conn, Direction dir) {
  const Window& w = f.window();
  std::vector<std::int32_t> parent;
  build_labels(f, state, conn, parent);
  const int width = w.width;
  const std::int64_t n = w.site_count();
  std::vector<std::int32_t> start;
  if (dir == Direction::horizontal) {
    for (std::int64_t i = 0; i < n; i += width) {
      if (parent[static_cast<std::size_t>(i)] >= 0)
        start.push_back(parent[static_cast<std::size_t>(i)]);
    }
  } else {
    for (std::int64_t i = 0; i < width; ++i) {
      if (parent[static_cast<std::size_t>(i)] >= 0)
        start.push_back(parent[static_cast<std::size_t>(i)]);
    }
  }
  std::sort(start.begin(), start.end());
  start.erase(std::unique(start.begin(), start.end()), start.end());
  std::vector<std::int32_t> out;
  if (start.empty()) return out;
  auto check = [&](std::int64_t i) {
    const std::int32_t r = parent[static_cast<std::size_t>(i)];
    if (r >= 0 && std::binary_search(start.begin(), start.end(), r)) {
      out.push_back(r);
    }
  };
  if (dir == Direction::horizontal) {
    for (std::int64_t i = width - 1; i < n; i += width) check(i);
  } else {
    for (std::int64_t i = n - width; i < n; ++i) check(i);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

bool has_crossing(const SiteField& f, bool state, Connectivity conn,
                  Direction dir) {
  return !spanning_roots(f, state, conn, dir).empty();
}

int count_spanning_clusters(const SiteField& f, bool state, Connectivity conn,
                            Direction dir) {
  return static_cast<int>(spanning_roots(f, state, conn, dir).size());
}

bool cluster_reaches(const ClusterLabeling& l, Site s,
                     std::span<const Site> target) {
  if (!l.window().contains(s)) {
    throw std::invalid_argument("cluster_reaches: site outside window");
  }
  const std::int32_t r = l.label_at(s);
  if (r < 0) return false;
  for (const Site& t : target) {
    if (!l.window().contains(t)) {
      throw std::invalid_argument("cluster_reaches: target outside window");
    }
    if (l.label_at(t) == r) return true;
  }
  return false;
}

bool blocked_cluster_event(const SiteField& f, Site i, int k) {
  const Window& w = f.window();
  const Ball ball(i, k);
  for (const Site& tip : {Site{i.x + k, i.y}, Site{i.x - k, i.y},
                          Site{i.x, i.y + k}, Site{i.x, i.y - k}}) {
    if (!w.contains(tip)) {
      throw std::invalid_argument("blocked_cluster_event: ball not interior");
    }
  }
  const std::int64_t ball_sites = 2LL * k * (k + 1) + 1;
  if (w.site_count() <= ball_sites) {
    throw std::invalid_argument(
        "blocked_cluster_event: window must be strictly larger than the ball");
  }
  if (!f.get(i)) return false;
  ClusterLabeling l(f, true, Connectivity::four);
  return l.max_l1_reach(i) >= k &&
         !l.touches_window_boundary(l.label_at(i));
}

}  // namespace sdp
