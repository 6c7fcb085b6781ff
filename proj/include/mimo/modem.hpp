#pragma once

// Gray-labelled QAM alphabets and the 8 bit/s/Hz modulation-set catalog.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mimo/matcore.hpp"

namespace mimo {

enum class ConstellationId : std::uint8_t { Qpsk, Qam8, Qam16, Qam64 };
enum class Scheme : std::uint8_t { Svd, Qrs };

std::string_view to_string(ConstellationId id) noexcept;
std::string_view to_string(Scheme s) noexcept;  // "svd" / "qrs"
ConstellationId parse_constellation(std::string_view name);
Scheme parse_scheme(std::string_view name);

/// Rectangular QAM grid with independent reflected-Gray labels on each axis.
/// Point index p = i_level * q_levels + q_level; the label is the I-axis Gray
/// code in the high bits followed by the Q-axis Gray code.
struct Constellation {
  ConstellationId id;
  std::string name;
  unsigned bits_per_symbol;
  unsigned i_bits;
  unsigned q_bits;
  double scale;                       // grid unit after energy normalization
  std::vector<cplx> points;           // indexed by point index
  std::vector<std::uint32_t> labels;  // label of each point
  std::vector<std::uint32_t> index_of_label;

  std::size_t size() const noexcept { return points.size(); }
};

/// Shared immutable instance for each alphabet.
const Constellation& constellation(ConstellationId id);
Constellation build_constellation(std::string_view name);

/// bits[0] is the most significant label bit.
cplx modulate(std::span<const std::uint8_t> bits, const Constellation& c);
cplx modulate_label(std::uint32_t label, const Constellation& c);
std::vector<std::uint8_t> label_bits(std::uint32_t label, unsigned width);

/// Index of the point closest to z (lowest index on ties), by per-axis slicing.
std::size_t nearest_point(cplx z, const Constellation& c) noexcept;

/// Expected number of bit errors per symbol when z = point + CN noise with
/// standard deviation `axis_sd` on each real axis is sliced by nearest_point.
/// Exact for the rectangular grids (the axes decouple).
double expected_bit_errors(const Constellation& c, double axis_sd);

/// Per-stream constellation assignment; stream 1 first.
struct ModulationSet {
  std::string name;  // canonical "QAM16-QPSK-QPSK"
  std::vector<ConstellationId> per_stream;
  unsigned total_bits = 0;

  std::size_t streams() const noexcept { return per_stream.size(); }
  bool operator==(const ModulationSet&) const = default;
};

/// Parses a hyphen-separated list of alphabet names. Any non-empty list is
/// accepted; catalog membership is a separate check.
ModulationSet parse_modulation_set(std::string_view name);

inline constexpr unsigned kBitsPerChannelUse = 8;

/// The four sets available to a scheme at 8 bit/s/Hz, in catalog order.
const std::vector<ModulationSet>& catalog(Scheme scheme);
bool in_catalog(Scheme scheme, std::string_view set_name);
/// "A, B, C" listing for diagnostics.
std::string catalog_listing(Scheme scheme);

}  // namespace mimo
