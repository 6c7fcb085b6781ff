#pragma once

// Seeded random substreams, Rayleigh flat-fading draws and AWGN.

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <vector>

#include "mimo/matcore.hpp"

namespace mimo {

/// 64-bit avalanche mixer (splitmix64 finalizer).
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Folds a list of coordinates (cell indices, worker id, ...) into one stream id.
std::uint64_t derive_stream_id(std::initializer_list<std::uint64_t> coords) noexcept;

/// Independent pseudo-random substream identified by (seed, stream_id).
/// Owned by a single worker; copying forks an identical sequence.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  double gaussian() { return normal_(engine_); }
  /// CN(0, variance): real and imaginary parts each N(0, variance / 2).
  cplx complex_gaussian(double variance);
  std::uint64_t next_u64() { return engine_(); }

  std::uint64_t channel_draws() const noexcept { return channel_draws_; }
  void count_channel_draw() noexcept { ++channel_draws_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uint64_t channel_draws_ = 0;
};

struct ChannelRealization {
  ComplexMatrix h;  // n_rx x m_tx, iid CN(0, 1)
  std::uint64_t draw_index = 0;
};

ChannelRealization draw_channel(RandomStream& rng, std::size_t n_rx, std::size_t m_tx);

/// y + n with n iid CN(0, sigma2). sigma2 == 0 returns y unchanged.
std::vector<cplx> add_noise(std::span<const cplx> y, double sigma2, RandomStream& rng);

}  // namespace mimo
