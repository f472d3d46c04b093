#pragma once

#include <cstdint>
#include <string>

namespace sdp {

/// Point estimate with a 95% Wilson score interval. Wilson rather than Wald
/// because the estimated probabilities routinely sit at or near 0 and 1.
struct EstimateResult {
  double point = 0.0;
  double ci_low = 0.0;
  double ci_high = 1.0;
  std::uint64_t n_samples = 0;
  std::uint64_t seed = 0;
  std::string quantity;
};

double wilson_lower(std::uint64_t successes, std::uint64_t n);
double wilson_upper(std::uint64_t successes, std::uint64_t n);

EstimateResult wilson_estimate(std::uint64_t successes, std::uint64_t n,
                               std::uint64_t seed, std::string quantity);

/// Plain binomial standard error sqrt(phat(1-phat)/n).
double binomial_se(double phat, std::uint64_t n);

}  // namespace sdp
