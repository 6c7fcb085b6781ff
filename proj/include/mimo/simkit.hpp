#pragma once

// Monte Carlo BER engine for the closed-loop SVD / QRS links.
//
// A cell is one (modulation set, SNR) pair. Cells are estimated by either the
// serial reference runner or the OpenMP runner, which partitions channel uses
// across workers with one RandomStream each and merges counts by addition.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mimo/channel.hpp"
#include "mimo/matcore.hpp"
#include "mimo/modem.hpp"

namespace mimo {

struct StoppingRule {
  std::uint64_t min_bit_errors = 200;
  std::uint64_t max_channel_uses = 2'000'000;
};

enum class Budget : std::uint8_t { Fast, Paper };
StoppingRule stopping_rule(Budget b) noexcept;
Budget parse_budget(std::string_view name);
std::string_view to_string(Budget b) noexcept;

struct SimConfig {
  std::size_t m_tx = 4;
  std::size_t n_rx = 4;
  Scheme scheme = Scheme::Svd;
  std::string set = "ALL";  // set name or ALL (the scheme's catalog)
  std::vector<double> snr_grid;
  std::uint64_t seed = 1;
  StoppingRule stop;
  unsigned workers = 1;
  // Channel uses each worker runs between stopping-rule checks.
  std::uint64_t chunk = 1024;
};

/// Throws InvalidInput describing the first violated constraint.
void validate(const SimConfig& cfg);

/// One transmit/receive chain: antennas, scheme and modulation set.
struct Link {
  std::size_t n_rx = 4;
  std::size_t m_tx = 4;
  Scheme scheme = Scheme::Svd;
  ModulationSet set;
};

struct UseOutcome {
  std::uint64_t bit_errors = 0;
  std::vector<std::uint64_t> per_stream_errors;
  double tx_energy = 0.0;  // ||x||^2 of the precoded vector
  std::size_t selected_set = 0;  // candidate index, per-realization selection only
};

struct BerPoint {
  double snr_db = 0.0;
  std::uint64_t channel_uses = 0;
  std::uint64_t bits_sent = 0;
  std::uint64_t bit_errors = 0;
  double ber = 0.0;
  std::vector<std::uint64_t> per_stream_errors;
  std::vector<std::uint64_t> set_selections;  // uses per candidate, selection curves only

  bool operator==(const BerPoint&) const = default;
};

struct BerCurve {
  Scheme scheme = Scheme::Svd;
  std::string set_name;
  std::vector<BerPoint> points;
  std::vector<std::string> selected_sets;  // envelopes only: winner per point

  bool operator==(const BerCurve&) const = default;
};

/// Noise variance per receive antenna for unit total transmit power.
double snr_to_sigma2(double snr_db) noexcept;

/// Inclusive grid start, start + step, ... <= stop (with rounding slack).
std::vector<double> snr_range(double start, double stop, double step);

/// One channel use: fresh channel, precoder, information bits, noise, detection.
/// Consumes the same number of variates from rng for every scheme and set of a
/// given antenna configuration when sigma2 > 0.
UseOutcome run_channel_use(const Link& link, double sigma2, RandomStream& rng);

/// Transmit/receive chain on a given channel whose full SVD is already known.
UseOutcome transmit(const ComplexMatrix& h, const SvdResult& full, Scheme scheme,
                    const ModulationSet& set, double sigma2, RandomStream& rng);

/// How a per-realization selector picks a set.
///   Oracle:         every candidate is run on the same channel, bits and noise;
///                   the one with the fewest bit errors is kept (offline bound).
///   ExpectedErrors: the candidate with the lowest expected bit errors given
///                   the realized channel only.
enum class SelectionRule : std::uint8_t { Oracle, ExpectedErrors };
SelectionRule parse_selection_rule(std::string_view name);
std::string_view to_string(SelectionRule r) noexcept;

struct SelectionLink {
  std::size_t n_rx = 4;
  std::size_t m_tx = 4;
  Scheme scheme = Scheme::Svd;
  std::vector<ModulationSet> candidates;
  SelectionRule rule = SelectionRule::Oracle;
};

/// Expected bit errors of one channel use with `set` on the channel described
/// by its singular values. SVD streams see gain * delta_k; QRS streams see
/// gain * r for the top-n singular values (SIC error propagation not modelled).
double expected_set_errors(std::span<const double> deltas, Scheme scheme,
                           const ModulationSet& set, double sigma2);
/// Lowest expected_set_errors, lowest index on ties.
std::size_t select_for_channel(std::span<const double> deltas, Scheme scheme,
                               std::span<const ModulationSet> candidates, double sigma2);

UseOutcome run_selection_use(const SelectionLink& link, double sigma2, RandomStream& rng);

/// Stream of worker w for SNR grid index i.
RandomStream cell_stream(std::uint64_t seed, std::size_t snr_index, unsigned worker);

/// Serial reference: one stream (worker 0), stopping rule checked after every use.
BerPoint run_cell_serial(const Link& link, double snr_db, std::size_t snr_index,
                         std::uint64_t seed, const StoppingRule& stop);

/// OpenMP runner. Every round each worker runs up to `chunk` uses on its own
/// stream; the stopping rule is checked between rounds. With workers == 1 and
/// chunk == 1 it reproduces run_cell_serial exactly.
BerPoint run_cell(const Link& link, double snr_db, std::size_t snr_index, std::uint64_t seed,
                  const StoppingRule& stop, unsigned workers, std::uint64_t chunk);

/// Sets selected by cfg.set for cfg.scheme.
std::vector<ModulationSet> resolve_sets(const SimConfig& cfg);

std::vector<BerCurve> sweep(const SimConfig& cfg);

BerPoint run_selection_cell(const SelectionLink& link, double snr_db, std::size_t snr_index,
                            std::uint64_t seed, const StoppingRule& stop, unsigned workers,
                            std::uint64_t chunk);
/// Per-realization selection over the sets chosen by cfg.set (normally ALL).
/// bits_sent counts 8 bits per use; the set name is "SELECTION".
BerCurve sweep_selection(const SimConfig& cfg, SelectionRule rule = SelectionRule::Oracle);

/// Pointwise minimum BER across curves on a shared SNR grid (best fixed set
/// per SNR point).
BerCurve select_envelope(std::span<const BerCurve> curves);

/// SNR (dB) where log10(BER) crosses target, interpolated linearly in dB.
/// Throws OutOfRange when no adjacent pair of points brackets the target.
double snr_at_ber(const BerCurve& curve, double target_ber);
std::optional<double> try_snr_at_ber(const BerCurve& curve, double target_ber);

}  // namespace mimo
