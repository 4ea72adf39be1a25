#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace ihho {

/// Deterministic random stream: xoshiro256** seeded through splitmix64 from
/// the pair (seed, stream_id). Only integer arithmetic feeds the state, so the
/// raw 64-bit sequence is identical on every platform. Real-valued draws are
/// derived here rather than through <random> distributions, whose output is
/// implementation-defined.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed = 0, std::uint64_t stream_id = 0)
      : seed_(seed), stream_id_(stream_id) {
    std::uint64_t x = seed ^ mix(stream_id + 0x632be59bd9b4e019ULL);
    for (auto& s : state_) s = splitmix(x);
  }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  /// Independent stream keyed by `id`; depends only on (seed, stream_id, id).
  RngStream child(std::uint64_t id) const {
    return RngStream(seed_, mix(stream_id_ ^ mix(id + 0x9e3779b97f4a7c15ULL)));
  }

  RngStream child(std::uint64_t a, std::uint64_t b) const { return child(a).child(b); }

  std::uint64_t next_u64() noexcept {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n); n must be positive. Rejection keeps it unbiased.
  std::uint64_t below(std::uint64_t n) noexcept {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

  /// Standard normal via Box-Muller (one variate per call, no cached pair).
  double normal() noexcept {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  static std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

  static std::uint64_t splitmix(std::uint64_t& x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    return mix(x);
  }

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t state_[4];
};

/// Stable 64-bit key for a string, used to derive per-dataset streams.
inline std::uint64_t fnv1a(std::string_view text) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace ihho
