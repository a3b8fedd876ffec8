#pragma once

#include <cmath>
#include <cstdint>

namespace lwsgcn {

namespace detail {

// splitmix64 finalizer
inline std::uint64_t avalanche(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

inline std::uint64_t mix2(std::uint64_t a, std::uint64_t b) {
  return avalanche(avalanche(a + 0x9E3779B97F4A7C15ull) ^
                   (b + 0x6A09E667F3BCC909ull));
}

}  // namespace detail

/// Keyed counter-based random stream (splitmix64 family).
///
/// A stream is identified by a 64-bit key. Draws can be made either
/// sequentially (next_*) or by index (uniform_at), and both views agree:
/// the i-th sequential draw equals the draw at index i. Index access is
/// what makes lazy column-wise sparsification bit-identical to sampling
/// the whole matrix at once.
///
/// substream(salt) derives an independent child stream without consuming
/// entropy from the parent, so (seed, iteration, layer) hierarchies are
/// reproducible regardless of evaluation order.
class RngStream {
 public:
  explicit RngStream(std::uint64_t key) : key_(key) {}

  std::uint64_t key() const { return key_; }

  RngStream substream(std::uint64_t salt) const {
    return RngStream(detail::mix2(key_ ^ 0x8BB84B93962EACC9ull, salt));
  }

  std::uint64_t u64_at(std::uint64_t index) const {
    return detail::avalanche(key_ + 0x9E3779B97F4A7C15ull * (index + 1));
  }

  /// Uniform in [0, 1) from the draw at `index`.
  double uniform_at(std::uint64_t index) const {
    return static_cast<double>(u64_at(index) >> 11) * 0x1.0p-53;
  }

  std::uint64_t next_u64() { return u64_at(counter_++); }

  double next_uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

  /// Standard normal via Box-Muller; consumes two draws per call.
  double next_gaussian() {
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double r = std::sqrt(-2.0 * std::log1p(-u1));
    return r * std::cos(6.283185307179586476925286766559 * u2);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace lwsgcn
