#include "sdp/rng.hpp"

#include <stdexcept>

namespace sdp {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;  // golden ratio
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;  // sqrt(3) - 1

inline void philox_round(std::array<std::uint32_t, 4>& x,
                         const std::array<std::uint32_t, 2>& k) {
  const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * x[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * x[2];
  const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
  const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
  x = {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 2> key,
                                        std::array<std::uint32_t, 4> counter) {
  for (int round = 0; round < 10; ++round) {
    philox_round(counter, key);
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return counter;
}

double uniform01(std::uint64_t seed, Stream stream, std::uint64_t replicate,
                 std::uint64_t site, std::uint32_t draw) {
  if (replicate >> 32) {
    throw std::invalid_argument("uniform01: replicate index must be < 2^32");
  }
  if (draw >> 24) {
    throw std::invalid_argument("uniform01: draw index must be < 2^24");
  }
  const std::array<std::uint32_t, 2> key = {
      static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  const std::array<std::uint32_t, 4> ctr = {
      static_cast<std::uint32_t>(site), static_cast<std::uint32_t>(site >> 32),
      static_cast<std::uint32_t>(replicate),
      (static_cast<std::uint32_t>(stream) << 24) | draw};
  const auto out = philox4x32(key, ctr);
  const std::uint64_t v =
      (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
  return static_cast<double>(v >> 11) * 0x1.0p-53;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                          std::uint64_t b, std::uint64_t c) {
  const std::array<std::uint32_t, 2> key = {
      static_cast<std::uint32_t>(master),
      static_cast<std::uint32_t>(master >> 32)};
  const std::array<std::uint32_t, 4> ctr = {
      static_cast<std::uint32_t>(a),
      static_cast<std::uint32_t>(a >> 32) ^ static_cast<std::uint32_t>(c),
      static_cast<std::uint32_t>(b),
      static_cast<std::uint32_t>(b >> 32) ^
          static_cast<std::uint32_t>(c >> 32)};
  const auto out = philox4x32(key, ctr);
  return (static_cast<std::uint64_t>(out[2]) << 32) | out[3];
}

}  // namespace sdp
