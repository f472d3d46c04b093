#include "sdp/enumerate.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace sdp {

namespace {

int distance_to_window(Site s, const Window& w) {
  const int dx = std::max({0, w.origin.x - s.x, s.x - (w.origin.x + w.width - 1)});
  const int dy = std::max({0, w.origin.y - s.y, s.y - (w.origin.y + w.height - 1)});
  return dx + dy;
}

}  // namespace

ExactFiniteRangeModel::ExactFiniteRangeModel(const Window& region, int k,
                                             double p)
    : region_(region), k_(k), p_(p) {
  if (k < 1) throw std::invalid_argument("ExactFiniteRangeModel: k must be >= 1");
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("ExactFiniteRangeModel: p must be in [0,1]");
  }
  if (region.site_count() > kMaxRegionSites) {
    throw std::invalid_argument(
        "ExactFiniteRangeModel: region exceeds the enumeration budget");
  }
  const Window box = region.expanded(k);
  for (std::int64_t i = 0; i < box.site_count(); ++i) {
    const Site s = box.site_at(i);
    if (distance_to_window(s, region_) <= k) support_.push_back(s);
  }
  if (static_cast<int>(support_.size()) > kMaxSupportSites) {
    throw std::invalid_argument(
        "ExactFiniteRangeModel: support of " +
        std::to_string(support_.size()) +
        " sites exceeds the enumeration budget of " +
        std::to_string(kMaxSupportSites));
  }
  region_bit_.assign(support_.size(), -1);
  for (std::size_t i = 0; i < support_.size(); ++i) {
    if (region_.contains(support_[i])) {
      region_bit_[i] = static_cast<std::int8_t>(region_.index_of(support_[i]));
    }
  }
  enumerate();
}

void ExactFiniteRangeModel::enumerate() {
  const int S = static_cast<int>(support_.size());
  const int r = static_cast<int>(region_.site_count());

  // Adjacency over support indices; every path of length <= k from a region
  // site stays inside the dilation, so this graph is exact for the test.
  std::vector<std::array<std::int8_t, 4>> nbr(support_.size(), {-1, -1, -1, -1});
  for (int i = 0; i < S; ++i) {
    int n = 0;
    for (int j = 0; j < S; ++j) {
      if (l1_distance(support_[i], support_[j]) == 1) {
        nbr[i][n++] = static_cast<std::int8_t>(j);
      }
    }
  }

  std::vector<double> pow_p(S + 1, 1.0), pow_q(S + 1, 1.0);
  for (int i = 1; i <= S; ++i) {
    pow_p[i] = pow_p[i - 1] * p_;
    pow_q[i] = pow_q[i - 1] * (1.0 - p_);
  }

  std::vector<Kahan> acc(std::size_t{1} << r);
  std::array<std::int8_t, kMaxSupportSites> queue;
  const std::uint32_t n_cfg_hi = std::uint32_t{1} << S;

  for (std::uint32_t cfg = 0; cfg < n_cfg_hi; ++cfg) {
    std::uint32_t pattern = 0;
    for (int i = 0; i < S; ++i) {
      const std::int8_t bit = region_bit_[static_cast<std::size_t>(i)];
      if (bit < 0 || !((cfg >> i) & 1u)) continue;
      // Occupied cluster of support_[i], explored within B(site, k): the
      // site survives iff the cluster never reaches distance k.
      const Site origin = support_[static_cast<std::size_t>(i)];
      std::uint32_t visited = std::uint32_t{1} << i;
      int head = 0, tail = 0;
      queue[tail++] = static_cast<std::int8_t>(i);
      bool reached = false;
      while (head < tail && !reached) {
        const int u = queue[head++];
        for (std::int8_t v : nbr[static_cast<std::size_t>(u)]) {
          if (v < 0) break;
          if (!((cfg >> v) & 1u) || ((visited >> v) & 1u)) continue;
          const int d = l1_distance(support_[static_cast<std::size_t>(v)], origin);
          if (d >= k_) {
            reached = true;
            break;
          }
          visited |= std::uint32_t{1} << v;
          queue[tail++] = v;
        }
      }
      if (!reached) pattern |= std::uint32_t{1} << bit;
    }
    const int pop = std::popcount(cfg);
    acc[pattern].add(pow_p[pop] * pow_q[S - pop]);
  }

  pattern_prob_.resize(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) pattern_prob_[i] = acc[i].sum;
}

double ExactFiniteRangeModel::event_probability(
    double delta, const std::function<bool(const SiteField&)>& pred) const {
  const int r = static_cast<int>(region_.site_count());
  if (r > 12) {
    throw std::invalid_argument(
        "event_probability: region too large for full final-field enumeration");
  }
  const std::uint32_t nz = std::uint32_t{1} << r;
  std::vector<char> tab(nz);
  SiteField z(region_);
  for (std::uint32_t m = 0; m < nz; ++m) {
    for (int i = 0; i < r; ++i) z.set_index(i, (m >> i) & 1u);
    tab[m] = pred(z) ? 1 : 0;
  }
  std::vector<double> yw(nz);
  std::vector<double> pow_d(r + 1, 1.0), pow_e(r + 1, 1.0);
  for (int i = 1; i <= r; ++i) {
    pow_d[i] = pow_d[i - 1] * delta;
    pow_e[i] = pow_e[i - 1] * (1.0 - delta);
  }
  for (std::uint32_t m = 0; m < nz; ++m) {
    const int pop = std::popcount(m);
    yw[m] = pow_d[pop] * pow_e[r - pop];
  }
  Kahan total;
  for (std::uint32_t s = 0; s < nz; ++s) {
    if (pattern_prob_[s] == 0.0) continue;
    Kahan inner;
    for (std::uint32_t y = 0; y < nz; ++y) {
      if (tab[s | y]) inner.add(yw[y]);
    }
    total.add(pattern_prob_[s] * inner.sum);
  }
  return total.sum;
}

std::array<double, 4> ExactFiniteRangeModel::site_pair_law(double delta,
                                                           Site a,
                                                           Site b) const {
  if (!region_.contains(a) || !region_.contains(b)) {
    throw std::invalid_argument("site_pair_law: sites must lie in the region");
  }
  const int ia = static_cast<int>(region_.index_of(a));
  const int ib = static_cast<int>(region_.index_of(b));
  std::array<Kahan, 4> acc;
  for (std::uint32_t s = 0; s < pattern_prob_.size(); ++s) {
    const double w = pattern_prob_[s];
    if (w == 0.0) continue;
    const double qa = ((s >> ia) & 1u) ? 1.0 : delta;
    const double qb = ((s >> ib) & 1u) ? 1.0 : delta;
    acc[3].add(w * qa * qb);
    acc[2].add(w * qa * (1.0 - qb));
    acc[1].add(w * (1.0 - qa) * qb);
    acc[0].add(w * (1.0 - qa) * (1.0 - qb));
  }
  return {acc[0].sum, acc[1].sum, acc[2].sum, acc[3].sum};
}

double ExactFiniteRangeModel::site_occupancy(double delta, Site i) const {
  if (!region_.contains(i)) {
    throw std::invalid_argument("site_occupancy: site must lie in the region");
  }
  const int bit = static_cast<int>(region_.index_of(i));
  Kahan acc;
  for (std::uint32_t s = 0; s < pattern_prob_.size(); ++s) {
    const double w = pattern_prob_[s];
    if (w == 0.0) continue;
    acc.add(w * (((s >> bit) & 1u) ? 1.0 : delta));
  }
  return acc.sum;
}

}  // namespace sdp
