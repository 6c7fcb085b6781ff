#include "mimo/channel.hpp"

#include <cmath>

#include "mimo/errors.hpp"

namespace mimo {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_stream_id(std::initializer_list<std::uint64_t> coords) noexcept {
  std::uint64_t h = 0x6a09e667f3bcc908ULL;
  for (std::uint64_t c : coords) h = mix64(h ^ mix64(c));
  return h;
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), engine_(mix64(seed ^ mix64(stream_id))) {}

cplx RandomStream::complex_gaussian(double variance) {
  const double sd = std::sqrt(0.5 * variance);
  const double re = normal_(engine_);
  const double im = normal_(engine_);
  return {sd * re, sd * im};
}

ChannelRealization draw_channel(RandomStream& rng, std::size_t n_rx, std::size_t m_tx) {
  if (n_rx == 0 || m_tx == 0) throw InvalidInput("draw_channel: dimensions must be >= 1");
  std::vector<cplx> entries(n_rx * m_tx);
  for (cplx& e : entries) e = rng.complex_gaussian(1.0);
  ChannelRealization out{ComplexMatrix(n_rx, m_tx, std::move(entries)), rng.channel_draws()};
  rng.count_channel_draw();
  return out;
}

std::vector<cplx> add_noise(std::span<const cplx> y, double sigma2, RandomStream& rng) {
  if (!(sigma2 >= 0.0)) throw InvalidInput("add_noise: noise variance must be >= 0");
  std::vector<cplx> out(y.begin(), y.end());
  if (sigma2 == 0.0) return out;
  for (cplx& v : out) v += rng.complex_gaussian(sigma2);
  return out;
}

}  // namespace mimo
