#include "mimo/modem.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "mimo/errors.hpp"

namespace mimo {

namespace {

constexpr std::uint32_t gray(std::uint32_t x) noexcept { return x ^ (x >> 1); }

// Nearest level index of a uniform 2L-spaced grid centred on zero; ties go low.
inline unsigned slice_axis(double x, double scale, unsigned levels) noexcept {
  const double v = (x / scale + static_cast<double>(levels) - 1.0) * 0.5;
  double l = std::ceil(v - 0.5);
  l = std::clamp(l, 0.0, static_cast<double>(levels - 1));
  return static_cast<unsigned>(l);
}

Constellation make(ConstellationId id, unsigned i_bits, unsigned q_bits) {
  Constellation c;
  c.id = id;
  c.name = std::string(to_string(id));
  c.i_bits = i_bits;
  c.q_bits = q_bits;
  c.bits_per_symbol = i_bits + q_bits;
  const unsigned li = 1u << i_bits;
  const unsigned lq = 1u << q_bits;

  // Mean of (2l - L + 1)^2 over a uniform L-level axis is (L^2 - 1) / 3.
  const double energy = (li * li - 1.0) / 3.0 + (lq * lq - 1.0) / 3.0;
  c.scale = 1.0 / std::sqrt(energy);

  const std::size_t m = std::size_t{li} * lq;
  c.points.resize(m);
  c.labels.resize(m);
  c.index_of_label.resize(m);
  for (unsigned a = 0; a < li; ++a) {
    for (unsigned b = 0; b < lq; ++b) {
      const std::size_t p = std::size_t{a} * lq + b;
      c.points[p] = cplx(2.0 * a - li + 1.0, 2.0 * b - lq + 1.0) * c.scale;
      c.labels[p] = (gray(a) << q_bits) | gray(b);
      c.index_of_label[c.labels[p]] = static_cast<std::uint32_t>(p);
    }
  }
  return c;
}

const std::array<Constellation, 4>& table() {
  static const std::array<Constellation, 4> t = {
      make(ConstellationId::Qpsk, 1, 1),
      make(ConstellationId::Qam8, 2, 1),
      make(ConstellationId::Qam16, 2, 2),
      make(ConstellationId::Qam64, 3, 3),
  };
  return t;
}

ModulationSet make_set(std::initializer_list<ConstellationId> ids) {
  ModulationSet s;
  for (ConstellationId id : ids) {
    if (!s.name.empty()) s.name += '-';
    s.name += to_string(id);
    s.per_stream.push_back(id);
    s.total_bits += constellation(id).bits_per_symbol;
  }
  return s;
}

}  // namespace

std::string_view to_string(ConstellationId id) noexcept {
  switch (id) {
    case ConstellationId::Qpsk: return "QPSK";
    case ConstellationId::Qam8: return "QAM8";
    case ConstellationId::Qam16: return "QAM16";
    case ConstellationId::Qam64: return "QAM64";
  }
  return "?";
}

std::string_view to_string(Scheme s) noexcept { return s == Scheme::Svd ? "svd" : "qrs"; }

ConstellationId parse_constellation(std::string_view name) {
  for (ConstellationId id : {ConstellationId::Qpsk, ConstellationId::Qam8,
                             ConstellationId::Qam16, ConstellationId::Qam64}) {
    if (name == to_string(id)) return id;
  }
  throw InvalidInput("unknown constellation '" + std::string(name) +
                     "' (expected QPSK, QAM8, QAM16 or QAM64)");
}

Scheme parse_scheme(std::string_view name) {
  if (name == "svd" || name == "SVD") return Scheme::Svd;
  if (name == "qrs" || name == "QRS") return Scheme::Qrs;
  throw InvalidInput("unknown scheme '" + std::string(name) + "' (expected svd or qrs)");
}

const Constellation& constellation(ConstellationId id) {
  return table()[static_cast<std::size_t>(id)];
}

Constellation build_constellation(std::string_view name) {
  return constellation(parse_constellation(name));
}

cplx modulate_label(std::uint32_t label, const Constellation& c) {
  if (label >= c.size()) throw InvalidInput("modulate: label out of range");
  return c.points[c.index_of_label[label]];
}

cplx modulate(std::span<const std::uint8_t> bits, const Constellation& c) {
  if (bits.size() != c.bits_per_symbol) {
    throw InvalidInput("modulate: " + c.name + " takes " +
                       std::to_string(c.bits_per_symbol) + " bits, got " +
                       std::to_string(bits.size()));
  }
  std::uint32_t label = 0;
  for (std::uint8_t b : bits) label = (label << 1) | (b & 1u);
  return modulate_label(label, c);
}

std::vector<std::uint8_t> label_bits(std::uint32_t label, unsigned width) {
  std::vector<std::uint8_t> bits(width);
  for (unsigned k = 0; k < width; ++k) bits[k] = (label >> (width - 1 - k)) & 1u;
  return bits;
}

std::size_t nearest_point(cplx z, const Constellation& c) noexcept {
  const unsigned li = 1u << c.i_bits;
  const unsigned lq = 1u << c.q_bits;
  const unsigned a = slice_axis(z.real(), c.scale, li);
  const unsigned b = slice_axis(z.imag(), c.scale, lq);
  return std::size_t{a} * lq + b;
}

namespace {

// Q(t) = P(N(0,1) > t).
inline double gauss_tail(double t) noexcept { return 0.5 * std::erfc(t / std::sqrt(2.0)); }

double axis_expected_errors(unsigned bits, double scale, double sd) {
  const unsigned levels = 1u << bits;
  double total = 0.0;
  for (unsigned a = 0; a < levels; ++a) {
    const double x = scale * (2.0 * a - levels + 1.0);
    for (unsigned b = 0; b < levels; ++b) {
      if (a == b) continue;
      const double lo = scale * (2.0 * b - levels);  // lower boundary of region b
      const double hi = scale * (2.0 * b - levels + 2.0);
      double p;
      if (b > a) {
        p = gauss_tail((lo - x) / sd) - (b + 1 < levels ? gauss_tail((hi - x) / sd) : 0.0);
      } else {
        p = gauss_tail((x - hi) / sd) - (b > 0 ? gauss_tail((x - lo) / sd) : 0.0);
      }
      total += p * std::popcount(gray(a) ^ gray(b));
    }
  }
  return total / levels;
}

}  // namespace

double expected_bit_errors(const Constellation& c, double axis_sd) {
  if (!(axis_sd > 0.0)) return 0.0;
  return axis_expected_errors(c.i_bits, c.scale, axis_sd) +
         axis_expected_errors(c.q_bits, c.scale, axis_sd);
}

ModulationSet parse_modulation_set(std::string_view name) {
  ModulationSet s;
  s.name = std::string(name);
  std::size_t start = 0;
  while (start <= name.size()) {
    const std::size_t dash = name.find('-', start);
    const std::string_view part =
        name.substr(start, dash == std::string_view::npos ? std::string_view::npos : dash - start);
    const ConstellationId id = parse_constellation(part);
    s.per_stream.push_back(id);
    s.total_bits += constellation(id).bits_per_symbol;
    if (dash == std::string_view::npos) break;
    start = dash + 1;
  }
  return s;
}

const std::vector<ModulationSet>& catalog(Scheme scheme) {
  using enum ConstellationId;
  static const std::vector<ModulationSet> svd_sets = {
      make_set({Qam64, Qpsk}),
      make_set({Qam16, Qam16}),
      make_set({Qam16, Qpsk, Qpsk}),
      make_set({Qam8, Qam8, Qpsk}),
  };
  static const std::vector<ModulationSet> qrs_sets = {
      make_set({Qam16, Qam16}),
      make_set({Qam16, Qpsk, Qpsk}),
      make_set({Qam8, Qam8, Qpsk}),
      make_set({Qpsk, Qpsk, Qpsk, Qpsk}),
  };
  return scheme == Scheme::Svd ? svd_sets : qrs_sets;
}

bool in_catalog(Scheme scheme, std::string_view set_name) {
  const auto& sets = catalog(scheme);
  return std::any_of(sets.begin(), sets.end(),
                     [&](const ModulationSet& s) { return s.name == set_name; });
}

std::string catalog_listing(Scheme scheme) {
  std::string out;
  for (const auto& s : catalog(scheme)) {
    if (!out.empty()) out += ", ";
    out += s.name;
  }
  return out;
}

}  // namespace mimo
