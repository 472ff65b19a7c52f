#pragma once

#include <array>
#include <complex>
#include <cstdint>

namespace hetnet {

/// Philox4x32-10 counter-based block function (Salmon et al.): maps a
/// 128-bit counter and 64-bit key to 128 pseudo-random bits.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter counter, Key key) noexcept;
};

/// Identifies independent substreams within one Monte Carlo drop.
enum class StreamId : std::uint32_t {
  placement = 1,
  fading = 2,
  marks = 3,
  channel = 4,
  events = 5,
  positions = 6,
  aux_channel = 7,
  ring_base = 1024,  ///< ring j of a Poisson process uses ring_base + j
};

constexpr std::uint32_t ring_stream(std::uint32_t process, std::uint32_t ring) noexcept {
  return static_cast<std::uint32_t>(StreamId::ring_base) + process * 4096u + ring;
}

/// A reproducible random stream addressed by (seed, drop, stream). Two
/// streams with the same address produce the same sequence no matter which
/// thread draws from them or in what order other streams are used.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t drop, std::uint32_t stream) noexcept;
  RandomStream(std::uint64_t seed, std::uint64_t drop, StreamId stream) noexcept
      : RandomStream(seed, drop, static_cast<std::uint32_t>(stream)) {}

  std::uint32_t next_u32() noexcept;
  std::uint64_t next_u64() noexcept;

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Uniform on (0, 1].
  double uniform_positive() noexcept { return 1.0 - uniform(); }
  bool bernoulli(double p) noexcept { return uniform() < p; }

  /// Exp(1) by inversion.
  double exponential() noexcept;
  /// N(0, 1) by Box-Muller; the second variate of each pair is cached.
  double normal() noexcept;
  /// CN(0, 1): independent real and imaginary parts with variance 1/2.
  std::complex<double> complex_normal() noexcept;
  /// Gamma(shape, 1) via Marsaglia-Tsang.
  double gamma(double shape) noexcept;
  /// Poisson(mean): multiplication method below 10, PTRS (Hoermann) above.
  std::uint64_t poisson(double mean) noexcept;

 private:
  void refill() noexcept;

  Philox4x32::Key key_{};
  Philox4x32::Counter counter_{};
  Philox4x32::Counter block_{};
  int used_ = 4;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace hetnet
