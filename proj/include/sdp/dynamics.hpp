#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sdp/model.hpp"

namespace sdp {

/// Unit-rate Poisson arrival times per site, up to a fixed horizon. One
/// realization serves every (tau, t) pair with tau <= t <= horizon, which is
/// exactly the coupling the time-evolution arguments use. Ties between
/// sites are a probability-zero event; where an order would matter it is
/// the site flat index.
struct ClockField {
  Window window;
  double horizon = 0.0;
  std::vector<std::uint32_t> offsets;  // CSR: site i owns [offsets[i], offsets[i+1])
  std::vector<double> arrivals;        // ascending per site, all <= horizon

  std::span<const double> arrivals_at(std::int64_t idx) const {
    return {arrivals.data() + offsets[static_cast<std::size_t>(idx)],
            arrivals.data() + offsets[static_cast<std::size_t>(idx) + 1]};
  }
};

/// Destruction time tau and observation time t, 0 <= tau <= t.
struct DynParams {
  double tau = 0.0;
  double t = 0.0;

  DynParams() = default;
  DynParams(double tau_, double t_);
};

ClockField sample_clocks(const Window& w, double t_max, std::uint64_t seed,
                         std::uint64_t replicate = 0);

/// The no-destruction configuration at time t: a site is occupied iff it
/// has an arrival <= t. Throws if t exceeds the horizon.
SiteField config_at(const ClockField& c, double t);

/// The destruction evolution: start from the configuration at tau, destroy
/// per the rule, then a site is occupied at t iff it survived or its clock
/// rings in (tau, t]. Equal in distribution to the SDP draw at
/// p = 1-exp(-tau), delta = 1-exp(-(t-tau)). For a finite-range rule the
/// result is exact on the window shrunk by the rule margin.
SiteField evolve_destruct(const ClockField& c, DynParams d,
                          DestructionRule rule);

/// p = 1-exp(-tau), delta = 1-exp(-(t-tau)) and its inverse. The inverse
/// rejects p = 1 or delta = 1 (no finite preimage).
SdpParams params_from_times(DynParams d);
DynParams times_from_params(SdpParams s);

struct QuadrantComparison {
  bool pointwise_asserted = false;  // equal tau: ordering in t holds per site
  std::int64_t violations = 0;      // pointwise violations where asserted
  std::int64_t sites = 0;
  double density1 = 0.0;  // occupied fraction under d1
  double density2 = 0.0;  // occupied fraction under d2
  std::string note;
};

/// Compare the evolutions under d1 and d2 on one shared clock realization.
/// With equal tau the ordering in t is pointwise; across different tau only
/// the densities are reported (the ordering is stochastic, not pointwise).
QuadrantComparison quadrant_monotonicity_check(const ClockField& c,
                                               DynParams d1, DynParams d2,
                                               DestructionRule rule);

}  // namespace sdp
