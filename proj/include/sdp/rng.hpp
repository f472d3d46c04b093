#pragma once

#include <array>
#include <cstdint>

namespace sdp {

/// Substream tags. Distinct streams over the same (seed, replicate, site)
/// key are independent; the X and Y fields of one SDP draw use x_field and
/// y_field respectively.
enum class Stream : std::uint32_t {
  generic = 0,
  x_field = 1,
  y_field = 2,
  clocks = 3,
  direct = 4,  // standalone Bernoulli comparison fields
};

/// Counter-based generator (Philox4x32-10). A draw is a pure function of
/// (seed, stream, replicate, site, draw): bit-identical on every platform
/// and for any thread count, and random access over sites is free, which
/// is what makes the shared-uniform couplings exact.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 2> key,
                                        std::array<std::uint32_t, 4> counter);

/// Uniform double in [0,1) with 53 random bits.
/// replicate must be < 2^32 and draw < 2^24 (checked).
double uniform01(std::uint64_t seed, Stream stream, std::uint64_t replicate,
                 std::uint64_t site, std::uint32_t draw = 0);

/// Site key for field sampling: absolute coordinates, so enlarging a window
/// never changes the uniforms of the sites it already contained.
inline std::uint64_t site_key(int x, int y) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(y)) << 32) |
         static_cast<std::uint32_t>(x);
}

/// Stable 64-bit key derivation for per-cell seeds and similar; a pure
/// function of its inputs.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                          std::uint64_t b = 0, std::uint64_t c = 0);

}  // namespace sdp
