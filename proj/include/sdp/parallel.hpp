#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <thread>
#include <utility>
#include <vector>

namespace sdp {

/// Worker count: explicit request, else the SDP_THREADS environment
/// variable, else hardware concurrency.
int resolve_threads(int requested);

/// Replicate-parallel reduction. The result is the fold, in block index
/// order, of per-block accumulators (blocks of 1024 replicates), so it is
/// bit-identical for every worker count. Acc needs a default constructor
/// and operator+=.
template <class Acc, class Body>
Acc run_replicates(std::uint64_t samples, int threads, Body&& body) {
  constexpr std::uint64_t kBlock = 1024;
  const std::uint64_t nblocks = (samples + kBlock - 1) / kBlock;
  const int workers =
      static_cast<int>(std::min<std::uint64_t>(resolve_threads(threads), nblocks));
  std::vector<Acc> block_acc(static_cast<std::size_t>(nblocks));
  auto run_block = [&](std::uint64_t b) {
    Acc acc{};
    const std::uint64_t lo = b * kBlock;
    const std::uint64_t hi = std::min(samples, lo + kBlock);
    for (std::uint64_t r = lo; r < hi; ++r) body(r, acc);
    block_acc[static_cast<std::size_t>(b)] = std::move(acc);
  };
  if (workers <= 1) {
    for (std::uint64_t b = 0; b < nblocks; ++b) run_block(b);
  } else {
    std::atomic<std::uint64_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int i = 0; i < workers; ++i) {
      pool.emplace_back([&] {
        for (;;) {
          const std::uint64_t b = next.fetch_add(1);
          if (b >= nblocks) return;
          run_block(b);
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  Acc total{};
  for (auto& a : block_acc) total += a;
  return total;
}

/// Like run_replicates, but stops once the cumulative failure count (in
/// block index order) exceeds max_failures: used where only a run that
/// could still clear a near-1 acceptance bar is worth finishing. Returns
/// the accumulator over the completed prefix and the number of replicates
/// it covers; both are independent of the worker count.
template <class Acc, class Body, class FailuresOf>
std::pair<Acc, std::uint64_t> run_replicates_capped(std::uint64_t samples,
                                                    int threads,
                                                    std::uint64_t max_failures,
                                                    Body&& body,
                                                    FailuresOf&& failures_of) {
  constexpr std::uint64_t kBlock = 1024;
  const std::uint64_t nblocks = (samples + kBlock - 1) / kBlock;
  const int workers =
      static_cast<int>(std::min<std::uint64_t>(resolve_threads(threads), nblocks));
  auto run_block = [&](std::uint64_t b) {
    Acc acc{};
    const std::uint64_t lo = b * kBlock;
    const std::uint64_t hi = std::min(samples, lo + kBlock);
    for (std::uint64_t r = lo; r < hi; ++r) body(r, acc);
    return acc;
  };
  Acc total{};
  std::uint64_t done = 0;
  std::uint64_t b = 0;
  std::vector<Acc> wave(static_cast<std::size_t>(workers));
  while (b < nblocks) {
    const std::uint64_t wave_n =
        std::min<std::uint64_t>(workers, nblocks - b);
    if (wave_n == 1) {
      wave[0] = run_block(b);
    } else {
      std::vector<std::thread> pool;
      pool.reserve(static_cast<std::size_t>(wave_n));
      for (std::uint64_t i = 0; i < wave_n; ++i) {
        pool.emplace_back([&, i] { wave[static_cast<std::size_t>(i)] = run_block(b + i); });
      }
      for (auto& t : pool) t.join();
    }
    for (std::uint64_t i = 0; i < wave_n; ++i) {
      total += wave[static_cast<std::size_t>(i)];
      done = std::min(samples, (b + i + 1) * kBlock);
      if (failures_of(total) > max_failures) return {std::move(total), done};
    }
    b += wave_n;
  }
  return {std::move(total), done};
}

}  // namespace sdp
