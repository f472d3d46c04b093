#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "sdp/field.hpp"
#include "sdp/lattice.hpp"

namespace sdp {

/// Connected-component labeling of the sites of one state (occupied or
/// vacant) under 4- or 8-connectivity. Built by union-find over a single
/// raster scan; labels are canonical: the smallest flat index in a cluster.
class ClusterLabeling {
 public:
  ClusterLabeling(const SiteField& f, bool state, Connectivity conn);

  const Window& window() const { return win_; }
  bool state() const { return state_; }
  Connectivity connectivity() const { return conn_; }

  /// Canonical label, or -1 if the site is not in the designated state.
  std::int32_t label_at_index(std::int64_t idx) const {
    return label_[static_cast<std::size_t>(idx)];
  }
  std::int32_t label_at(Site s) const { return label_at_index(win_.index_of(s)); }
  bool same_cluster(Site a, Site b) const;

  std::int64_t cluster_count() const;
  const std::unordered_map<std::int32_t, std::int64_t>& cluster_sizes() const;

  /// Whether the cluster touches the window frame (the finite-volume proxy
  /// for an infinite cluster).
  bool touches_window_boundary(std::int32_t label) const;

  /// Largest L1 distance from s to any site of its cluster; -1 if s is not
  /// in the designated state. A 4-path changes L1 distance to s by one per
  /// step, so the cluster meets the sphere of radius k iff this is >= k.
  int max_l1_reach(Site s) const;

 private:
  Window win_;
  bool state_;
  Connectivity conn_;
  std::vector<std::int32_t> label_;
  // Per-root data, valid only at root indices.
  std::vector<std::int32_t> min_u_, max_u_, min_v_, max_v_;
  std::vector<char> touches_boundary_;
  // Lazy caches.
  mutable std::unordered_map<std::int32_t, std::int64_t> sizes_;
  mutable bool sizes_built_ = false;
};

/// True iff some state-path under conn connects the first to the last
/// column (horizontal) or the first to the last row (vertical). The model's
/// convention is occupied crossings with four-connectivity and vacant
/// crossings with eight-connectivity (matching lattice).
bool has_crossing(const SiteField& f, bool state, Connectivity conn,
                  Direction dir);

/// Number of distinct clusters that span the window in the given direction.
int count_spanning_clusters(const SiteField& f, bool state, Connectivity conn,
                            Direction dir);

/// True iff s is in the labeling's designated state and its cluster
/// contains a site of `target`.
bool cluster_reaches(const ClusterLabeling& l, Site s,
                     std::span<const Site> target);

/// The event that i's occupied 4-cluster reaches the L1 sphere of radius k
/// around i but does not touch the window frame. Throws if B(i,k) is not
/// fully inside the (strictly larger) window.
bool blocked_cluster_event(const SiteField& f, Site i, int k);

}  // namespace sdp
