#include "sdp/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace sdp {

namespace {

constexpr double kZ95 = 1.959963984540054;

double wilson_bound(std::uint64_t successes, std::uint64_t n, bool upper) {
  if (n == 0) throw std::invalid_argument("wilson: n must be >= 1");
  if (successes > n) throw std::invalid_argument("wilson: successes > n");
  if (successes == 0 && !upper) return 0.0;
  if (successes == n && upper) return 1.0;
  const double nn = static_cast<double>(n);
  const double phat = static_cast<double>(successes) / nn;
  const double z2 = kZ95 * kZ95;
  const double denom = 1.0 + z2 / nn;
  const double center = (phat + z2 / (2.0 * nn)) / denom;
  const double half =
      (kZ95 / denom) *
      std::sqrt(phat * (1.0 - phat) / nn + z2 / (4.0 * nn * nn));
  const double b = upper ? center + half : center - half;
  return std::min(1.0, std::max(0.0, b));
}

}  // namespace

double wilson_lower(std::uint64_t successes, std::uint64_t n) {
  return wilson_bound(successes, n, false);
}

double wilson_upper(std::uint64_t successes, std::uint64_t n) {
  return wilson_bound(successes, n, true);
}

EstimateResult wilson_estimate(std::uint64_t successes, std::uint64_t n,
                               std::uint64_t seed, std::string quantity) {
  EstimateResult r;
  r.point = static_cast<double>(successes) / static_cast<double>(n);
  r.ci_low = wilson_lower(successes, n);
  r.ci_high = wilson_upper(successes, n);
  r.n_samples = n;
  r.seed = seed;
  r.quantity = std::move(quantity);
  return r;
}

double binomial_se(double phat, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("binomial_se: n must be >= 1");
  return std::sqrt(phat * (1.0 - phat) / static_cast<double>(n));
}

}  // namespace sdp
