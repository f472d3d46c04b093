#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <queue>
#include <vector>

#include "sdp/cluster.hpp"
#include "sdp/rng.hpp"

using namespace sdp;

namespace {

// Independent flood-fill labeling: canonical label = smallest flat index.
std::vector<std::int32_t> flood_fill_labels(const SiteField& f, bool state,
                                            Connectivity conn) {
  const Window& w = f.window();
  const std::int64_t n = w.site_count();
  std::vector<std::int32_t> label(static_cast<std::size_t>(n), -1);
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (std::int64_t start = 0; start < n; ++start) {
    if (seen[start] || f.get_index(start) != state) continue;
    std::vector<std::int64_t> comp;
    std::queue<std::int64_t> q;
    q.push(start);
    seen[start] = 1;
    while (!q.empty()) {
      const std::int64_t i = q.front();
      q.pop();
      comp.push_back(i);
      const Site s = w.site_at(i);
      std::array<Site, 4> buf4;
      std::array<Site, 8> buf8;
      const Site* nb = buf8.data();
      int cnt;
      if (conn == Connectivity::four) {
        cnt = neighbors4(s, w, buf4);
        nb = buf4.data();
      } else {
        cnt = neighbors8(s, w, buf8);
      }
      for (int j = 0; j < cnt; ++j) {
        const std::int64_t t = w.index_of(nb[j]);
        if (!seen[t] && f.get_index(t) == state) {
          seen[t] = 1;
          q.push(t);
        }
      }
    }
    const std::int32_t canon =
        static_cast<std::int32_t>(*std::min_element(comp.begin(), comp.end()));
    for (std::int64_t i : comp) label[static_cast<std::size_t>(i)] = canon;
  }
  return label;
}

SiteField field_from_mask(const Window& w, std::uint32_t mask) {
  SiteField f(w);
  for (std::int64_t i = 0; i < w.site_count(); ++i) {
    f.set_index(i, (mask >> i) & 1u);
  }
  return f;
}

bool crossing_oracle(const SiteField& f, bool state, Connectivity conn,
                     Direction dir) {
  const auto label = flood_fill_labels(f, state, conn);
  const Window& w = f.window();
  for (std::int64_t i = 0; i < w.site_count(); ++i) {
    if (label[static_cast<std::size_t>(i)] < 0) continue;
    const Site a = w.site_at(i);
    const bool at_start = dir == Direction::horizontal ? a.x == w.origin.x
                                                       : a.y == w.origin.y;
    if (!at_start) continue;
    for (std::int64_t j = 0; j < w.site_count(); ++j) {
      if (label[static_cast<std::size_t>(j)] != label[static_cast<std::size_t>(i)]) continue;
      const Site b = w.site_at(j);
      const bool at_goal = dir == Direction::horizontal
                               ? b.x == w.origin.x + w.width - 1
                               : b.y == w.origin.y + w.height - 1;
      if (at_goal) return true;
    }
  }
  return false;
}

}  // namespace

TEST_CASE("labeling matches flood fill on every 3x3 field") {
  const Window w(3, 3);
  for (std::uint32_t mask = 0; mask < 512; ++mask) {
    const SiteField f = field_from_mask(w, mask);
    for (Connectivity conn : {Connectivity::four, Connectivity::eight}) {
      for (bool state : {true, false}) {
        const auto oracle = flood_fill_labels(f, state, conn);
        const ClusterLabeling l(f, state, conn);
        for (std::int64_t i = 0; i < 9; ++i) {
          CHECK(l.label_at_index(i) == oracle[static_cast<std::size_t>(i)]);
        }
      }
    }
  }
}

TEST_CASE("labeling matches flood fill on every 4x4 field") {
  const Window w(4, 4);
  for (std::uint32_t mask = 0; mask < (1u << 16); ++mask) {
    const SiteField f = field_from_mask(w, mask);
    for (Connectivity conn : {Connectivity::four, Connectivity::eight}) {
      const auto oracle = flood_fill_labels(f, true, conn);
      const ClusterLabeling l(f, true, conn);
      for (std::int64_t i = 0; i < 16; ++i) {
        REQUIRE(l.label_at_index(i) == oracle[static_cast<std::size_t>(i)]);
      }
    }
  }
}

TEST_CASE("labeling examples") {
  const Window w(3, 3);
  const SiteField full(w, true);
  const ClusterLabeling lf(full, true, Connectivity::four);
  CHECK(lf.cluster_count() == 1);
  CHECK(lf.cluster_sizes().at(0) == 9);

  // Checkerboard with occupied corners and center.
  SiteField cb(w);
  for (std::int64_t i = 0; i < 9; ++i) cb.set_index(i, i % 2 == 0);
  const ClusterLabeling l4(cb, true, Connectivity::four);
  CHECK(l4.cluster_count() == 5);
  for (const auto& [lab, sz] : l4.cluster_sizes()) CHECK(sz == 1);
  const ClusterLabeling l8(cb, true, Connectivity::eight);
  CHECK(l8.cluster_count() == 1);
  CHECK(l8.cluster_sizes().at(0) == 5);

  const SiteField empty(w);
  CHECK(ClusterLabeling(empty, true, Connectivity::four).cluster_count() == 0);
}

TEST_CASE("crossing basics") {
  const Window w(5, 3);
  SiteField f(w);
  for (int x = 0; x < 5; ++x) f.set(Site{x, 1}, true);
  CHECK(has_crossing(f, true, Connectivity::four, Direction::horizontal));
  CHECK_FALSE(has_crossing(f, true, Connectivity::four, Direction::vertical));
  const SiteField empty(w);
  CHECK_FALSE(has_crossing(empty, true, Connectivity::four, Direction::horizontal));
  CHECK(has_crossing(empty, false, Connectivity::eight, Direction::vertical));
}

TEST_CASE("duality: exactly one of the crossings holds, all 3x3 fields") {
  const Window w(3, 3);
  for (std::uint32_t mask = 0; mask < 512; ++mask) {
    const SiteField f = field_from_mask(w, mask);
    const bool occ = has_crossing(f, true, Connectivity::four, Direction::horizontal);
    const bool vac = has_crossing(f, false, Connectivity::eight, Direction::vertical);
    REQUIRE(occ != vac);
  }
}

TEST_CASE("crossing agrees with the flood-fill oracle on random fields") {
  const Window w(8, 5);
  for (int rep = 0; rep < 400; ++rep) {
    const double dens = uniform01(11, Stream::generic, rep, 0);
    const SiteField f = sample_field(w, dens, 99, Stream::x_field, rep);
    for (Connectivity conn : {Connectivity::four, Connectivity::eight}) {
      for (Direction dir : {Direction::horizontal, Direction::vertical}) {
        CHECK(has_crossing(f, true, conn, dir) ==
              crossing_oracle(f, true, conn, dir));
      }
    }
  }
}

TEST_CASE("cluster_reaches agrees with the oracle on random 4x4 fields") {
  const Window w(4, 4);
  for (int rep = 0; rep < 10000; ++rep) {
    const std::uint32_t mask = static_cast<std::uint32_t>(
        uniform01(5, Stream::generic, rep, 0) * 65536.0);
    const SiteField f = field_from_mask(w, mask);
    const ClusterLabeling l(f, true, Connectivity::four);
    const auto oracle = flood_fill_labels(f, true, Connectivity::four);
    const Site s = w.site_at(static_cast<std::int64_t>(
        uniform01(5, Stream::generic, rep, 1) * 16.0));
    std::vector<Site> target;
    for (std::int64_t i = 0; i < 16; ++i) {
      if (uniform01(5, Stream::generic, rep, static_cast<std::uint32_t>(2 + i)) < 0.2) {
        target.push_back(w.site_at(i));
      }
    }
    bool expect = false;
    if (oracle[static_cast<std::size_t>(w.index_of(s))] >= 0) {
      for (const Site& t : target) {
        expect = expect || (oracle[static_cast<std::size_t>(w.index_of(t))] ==
                            oracle[static_cast<std::size_t>(w.index_of(s))]);
      }
    }
    CHECK(cluster_reaches(l, s, target) == expect);
  }
}

TEST_CASE("max_l1_reach matches brute force") {
  const Window w(6, 6, Site{-2, -2});
  for (int rep = 0; rep < 300; ++rep) {
    const SiteField f = sample_field(w, 0.55, 31, Stream::x_field, rep);
    const ClusterLabeling l(f, true, Connectivity::four);
    const auto oracle = flood_fill_labels(f, true, Connectivity::four);
    for (std::int64_t i = 0; i < w.site_count(); ++i) {
      const Site s = w.site_at(i);
      if (!f.get(s)) {
        CHECK(l.max_l1_reach(s) == -1);
        continue;
      }
      int expect = 0;
      for (std::int64_t j = 0; j < w.site_count(); ++j) {
        if (oracle[static_cast<std::size_t>(j)] ==
            oracle[static_cast<std::size_t>(i)]) {
          expect = std::max(expect, l1_distance(s, w.site_at(j)));
        }
      }
      CHECK(l.max_l1_reach(s) == expect);
    }
  }
}

TEST_CASE("blocked_cluster_event: exhaustive 5x5 check at k=1") {
  const Window w(5, 5);
  const Site center{2, 2};
  int blocked_count = 0;
  for (std::uint32_t mask = 0; mask < (1u << 25); mask += 37) {  // strided subset
    const SiteField f = field_from_mask(w, mask);
    const auto label = flood_fill_labels(f, true, Connectivity::four);
    bool expect = false;
    if (f.get(center)) {
      const std::int32_t lc = label[static_cast<std::size_t>(w.index_of(center))];
      bool reaches = false, touches = false;
      for (std::int64_t i = 0; i < 25; ++i) {
        if (label[static_cast<std::size_t>(i)] != lc) continue;
        const Site s = w.site_at(i);
        reaches = reaches || l1_distance(s, center) == 1;
        touches = touches || w.on_boundary(s);
      }
      expect = reaches && !touches;
    }
    CHECK(blocked_cluster_event(f, center, 1) == expect);
    blocked_count += expect;
  }
  CHECK(blocked_count > 0);  // the strided sweep exercises both outcomes

  // Trivial cases and contract errors.
  SiteField lone(w);
  lone.set(center, true);
  CHECK_FALSE(blocked_cluster_event(lone, center, 1));
  CHECK_FALSE(blocked_cluster_event(SiteField(w), center, 1));
  CHECK_THROWS_AS(blocked_cluster_event(lone, center, 3), std::invalid_argument);
  CHECK_THROWS_AS(blocked_cluster_event(lone, Site{0, 0}, 1), std::invalid_argument);
}

TEST_CASE("blocked_cluster_event: exhaustive 5x5 at k=2, full enumeration") {
  // All 2^25 fields is too slow here; enumerate the 2^13 fields supported on
  // B(center,2) instead (sites outside the ball cannot affect reach at k=2,
  // but can affect finiteness, so keep them vacant).
  const Window w(5, 5);
  const Site center{2, 2};
  std::vector<std::int64_t> ball_sites;
  for (std::int64_t i = 0; i < 25; ++i) {
    if (l1_distance(w.site_at(i), center) <= 2) ball_sites.push_back(i);
  }
  REQUIRE(ball_sites.size() == 13);
  for (std::uint32_t m = 0; m < (1u << 13); ++m) {
    SiteField f(w);
    for (std::size_t b = 0; b < 13; ++b) {
      f.set_index(ball_sites[b], (m >> b) & 1u);
    }
    const auto label = flood_fill_labels(f, true, Connectivity::four);
    bool expect = false;
    if (f.get(center)) {
      const std::int32_t lc = label[static_cast<std::size_t>(w.index_of(center))];
      bool reaches = false, touches = false;
      for (std::int64_t i = 0; i < 25; ++i) {
        if (label[static_cast<std::size_t>(i)] != lc) continue;
        const Site s = w.site_at(i);
        reaches = reaches || l1_distance(s, center) == 2;
        touches = touches || w.on_boundary(s);
      }
      expect = reaches && !touches;
    }
    REQUIRE(blocked_cluster_event(f, center, 2) == expect);
  }
}

TEST_CASE("count_spanning_clusters") {
  const Window w(6, 5);
  SiteField f(w);
  for (int x = 0; x < 6; ++x) {
    f.set(Site{x, 0}, true);
    f.set(Site{x, 3}, true);
  }
  CHECK(count_spanning_clusters(f, true, Connectivity::four,
                                Direction::horizontal) == 2);
  CHECK(count_spanning_clusters(f, true, Connectivity::four,
                                Direction::vertical) == 0);
}
