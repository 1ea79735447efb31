#ifndef PRVA_RANDOM_HPP
#define PRVA_RANDOM_HPP

#include <bit>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <utility>

namespace prva {

/// SplitMix64 finalizer, used to spread user seeds over the PCG state.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Derive an independent child seed from a parent seed and a list of tags.
/// Used to give every worker, backend and repeat its own stream.
constexpr std::uint64_t derive_seed(std::uint64_t parent,
                                    std::initializer_list<std::uint64_t> tags) noexcept {
  std::uint64_t s = splitmix64(parent);
  for (auto t : tags) s = splitmix64(s ^ splitmix64(t + 0x632BE59BD9B4E019ULL));
  return s;
}

/// 64-bit permuted congruential generator (128-bit LCG state, XSL-RR output).
/// The output sequence is fully determined by (seed, stream).
class UniformStream {
 public:
  using result_type = std::uint64_t;

  explicit UniformStream(std::uint64_t seed, std::uint64_t stream = 0) noexcept
      : seed_(seed) {
    const unsigned __int128 s =
        (static_cast<unsigned __int128>(splitmix64(seed)) << 64) | splitmix64(seed ^ 0xA5A5A5A5ULL);
    const unsigned __int128 st =
        (static_cast<unsigned __int128>(splitmix64(stream + 1)) << 64) | stream;
    inc_ = (st << 1) | 1u;
    state_ = 0;
    step();
    state_ += s;
    step();
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  result_type operator()() noexcept { return next_u64(); }

  std::uint64_t next_u64() noexcept {
    step();
    const auto hi = static_cast<std::uint64_t>(state_ >> 64);
    const auto lo = static_cast<std::uint64_t>(state_);
    const int rot = static_cast<int>(state_ >> 122);
    return std::rotr(hi ^ lo, rot);
  }

  /// Uniform on [0, 1) with 53-bit resolution.
  double next_unit() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform on the open interval (0, 1); never returns 0 or 1.
  double next_open_unit() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  std::uint64_t seed() const noexcept { return seed_; }

 private:
  void step() noexcept { state_ = state_ * kMultiplier + inc_; }

  static constexpr unsigned __int128 kMultiplier =
      (static_cast<unsigned __int128>(2549297995355413924ULL) << 64) | 4865540595714422341ULL;

  unsigned __int128 state_{};
  unsigned __int128 inc_{};
  std::uint64_t seed_;
};

/// Box-Muller transform of one (u1, u2) pair, u1 in (0, 1].
inline std::pair<double, double> box_muller_pair(double u1, double u2) noexcept {
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(theta), r * std::sin(theta)};
}

/// Standard-normal generator on top of a UniformStream. Caches the second
/// value of each Box-Muller pair.
class BoxMullerNormal {
 public:
  double operator()(UniformStream& u) noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1;
    do {
      u1 = u.next_unit();
    } while (u1 == 0.0);
    const double u2 = u.next_unit();
    auto [z0, z1] = box_muller_pair(u1, u2);
    spare_ = z1;
    has_spare_ = true;
    return z0;
  }

  void reset() noexcept { has_spare_ = false; }

 private:
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace prva

#endif  // PRVA_RANDOM_HPP
