#include "mimo/simkit.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "mimo/decomp.hpp"
#include "mimo/detect.hpp"
#include "mimo/errors.hpp"

namespace mimo {

StoppingRule stopping_rule(Budget b) noexcept {
  if (b == Budget::Fast) return StoppingRule{50, 100'000};
  return StoppingRule{200, 2'000'000};
}

Budget parse_budget(std::string_view name) {
  if (name == "fast") return Budget::Fast;
  if (name == "paper") return Budget::Paper;
  throw InvalidInput("unknown budget '" + std::string(name) + "' (expected fast or paper)");
}

std::string_view to_string(Budget b) noexcept { return b == Budget::Fast ? "fast" : "paper"; }

double snr_to_sigma2(double snr_db) noexcept { return std::pow(10.0, -snr_db / 10.0); }

std::vector<double> snr_range(double start, double stop, double step) {
  if (!(step > 0.0)) throw InvalidInput("snr_range: step must be positive");
  if (stop < start) throw InvalidInput("snr_range: stop must not be below start");
  std::vector<double> grid;
  const double slack = step * 1e-9;
  for (std::size_t i = 0;; ++i) {
    const double v = start + static_cast<double>(i) * step;
    if (v > stop + slack) break;
    grid.push_back(v);
  }
  return grid;
}

void validate(const SimConfig& cfg) {
  if (cfg.m_tx == 0 || cfg.n_rx == 0) throw InvalidInput("antenna counts must be >= 1");
  if (cfg.snr_grid.empty()) throw InvalidInput("SNR grid is empty");
  for (std::size_t i = 1; i < cfg.snr_grid.size(); ++i) {
    if (!(cfg.snr_grid[i] > cfg.snr_grid[i - 1])) {
      throw InvalidInput("SNR grid must be strictly increasing");
    }
  }
  if (cfg.stop.min_bit_errors < 1) throw InvalidInput("min_bit_errors must be >= 1");
  if (cfg.stop.max_channel_uses < 1) throw InvalidInput("max_channel_uses must be >= 1");
  if (cfg.workers < 1) throw InvalidInput("workers must be >= 1");
  if (cfg.chunk < 1) throw InvalidInput("chunk must be >= 1");
  const std::size_t d = std::min(cfg.m_tx, cfg.n_rx);
  for (const ModulationSet& s : resolve_sets(cfg)) {
    if (s.streams() > d) {
      throw InvalidInput("set " + s.name + " needs " + std::to_string(s.streams()) +
                         " streams but min(M, N) = " + std::to_string(d));
    }
    if (s.total_bits > 64) throw InvalidInput("set " + s.name + " carries more than 64 bits");
  }
}

std::vector<ModulationSet> resolve_sets(const SimConfig& cfg) {
  if (cfg.set == "ALL") return catalog(cfg.scheme);
  return {parse_modulation_set(cfg.set)};
}

namespace {

// Randomness a channel use consumes after the channel draw.
struct UseDraws {
  std::uint64_t word = 0;
  std::vector<cplx> noise;
};

UseDraws draw_use(RandomStream& rng, std::size_t n_rx, double sigma2) {
  UseDraws d;
  d.word = rng.next_u64();
  d.noise = add_noise(std::vector<cplx>(n_rx), sigma2, rng);
  return d;
}

UseOutcome transmit_with(const ComplexMatrix& h, const SvdResult& full, Scheme scheme,
                         const ModulationSet& set, const UseDraws& draws) {
  const std::size_t n = set.streams();
  const double gain = 1.0 / std::sqrt(static_cast<double>(n));

  // Information bits fill the streams in order, first bit as label MSB.
  std::vector<std::uint32_t> tx_labels(n);
  std::vector<cplx> symbols(n);
  unsigned consumed = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const Constellation& c = constellation(set.per_stream[k]);
    consumed += c.bits_per_symbol;
    const std::uint64_t mask = (std::uint64_t{1} << c.bits_per_symbol) - 1;
    tx_labels[k] = static_cast<std::uint32_t>((draws.word >> (set.total_bits - consumed)) & mask);
    symbols[k] = gain * modulate_label(tx_labels[k], c);
  }

  auto receive = [&](const ComplexMatrix& precoder, double& energy) {
    const std::vector<cplx> x = matvec(precoder, symbols);
    for (const cplx& xi : x) energy += std::norm(xi);
    std::vector<cplx> y = matvec(h, x);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += draws.noise[i];
    return y;
  };

  DetectionResult decided;
  double energy = 0.0;
  const SvdFactors sf = svd_beamformer(full, n);
  if (scheme == Scheme::Svd) {
    const std::vector<cplx> y = receive(sf.v_n, energy);
    decided = svd_detect(adjoint_matvec(sf.u_n, y), sf.deltas, set, gain);
  } else {
    const QrsFactors f = equalize_diagonal(sf);
    const std::vector<cplx> y = receive(f.s, energy);
    decided = sic_detect(adjoint_matvec(f.q, y), f.r_mat, set, gain);
  }

  UseOutcome out{0, std::vector<std::uint64_t>(n), energy, 0};
  for (std::size_t k = 0; k < n; ++k) {
    const auto e = static_cast<std::uint64_t>(
        std::popcount(tx_labels[k] ^ decided.per_stream_labels[k]));
    out.per_stream_errors[k] = e;
    out.bit_errors += e;
  }
  return out;
}

}  // namespace

UseOutcome transmit(const ComplexMatrix& h, const SvdResult& full, Scheme scheme,
                    const ModulationSet& set, double sigma2, RandomStream& rng) {
  return transmit_with(h, full, scheme, set, draw_use(rng, h.rows(), sigma2));
}

UseOutcome run_channel_use(const Link& link, double sigma2, RandomStream& rng) {
  const ChannelRealization ch = draw_channel(rng, link.n_rx, link.m_tx);
  return transmit(ch.h, svd(ch.h), link.scheme, link.set, sigma2, rng);
}

double expected_set_errors(std::span<const double> deltas, Scheme scheme,
                           const ModulationSet& set, double sigma2) {
  const std::size_t n = set.streams();
  if (n > deltas.size()) throw InvalidInput("expected_set_errors: too many streams");
  const double gain = 1.0 / std::sqrt(static_cast<double>(n));
  const double noise_sd = std::sqrt(0.5 * sigma2);
  const double r = scheme == Scheme::Qrs ? geometric_mean(deltas.first(n)) : 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double amplitude = gain * (scheme == Scheme::Svd ? deltas[k] : r);
    total += expected_bit_errors(constellation(set.per_stream[k]), noise_sd / amplitude);
  }
  return total;
}

std::size_t select_for_channel(std::span<const double> deltas, Scheme scheme,
                               std::span<const ModulationSet> candidates, double sigma2) {
  if (candidates.empty()) throw InvalidInput("select_for_channel: no candidates");
  std::size_t best = 0;
  double best_errors = expected_set_errors(deltas, scheme, candidates[0], sigma2);
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const double e = expected_set_errors(deltas, scheme, candidates[i], sigma2);
    if (e < best_errors) {
      best = i;
      best_errors = e;
    }
  }
  return best;
}

SelectionRule parse_selection_rule(std::string_view name) {
  if (name == "oracle") return SelectionRule::Oracle;
  if (name == "expected") return SelectionRule::ExpectedErrors;
  throw InvalidInput("unknown selection rule '" + std::string(name) +
                     "' (expected oracle or expected)");
}

std::string_view to_string(SelectionRule r) noexcept {
  return r == SelectionRule::Oracle ? "oracle" : "expected";
}

UseOutcome run_selection_use(const SelectionLink& link, double sigma2, RandomStream& rng) {
  if (link.candidates.empty()) throw InvalidInput("run_selection_use: no candidates");
  const ChannelRealization ch = draw_channel(rng, link.n_rx, link.m_tx);
  const SvdResult full = svd(ch.h);
  const UseDraws draws = draw_use(rng, link.n_rx, sigma2);

  if (link.rule == SelectionRule::ExpectedErrors) {
    const std::size_t pick = select_for_channel(full.deltas, link.scheme, link.candidates, sigma2);
    UseOutcome out = transmit_with(ch.h, full, link.scheme, link.candidates[pick], draws);
    out.selected_set = pick;
    return out;
  }
  UseOutcome best = transmit_with(ch.h, full, link.scheme, link.candidates[0], draws);
  for (std::size_t i = 1; i < link.candidates.size() && best.bit_errors > 0; ++i) {
    UseOutcome o = transmit_with(ch.h, full, link.scheme, link.candidates[i], draws);
    if (o.bit_errors < best.bit_errors) {
      best = std::move(o);
      best.selected_set = i;
    }
  }
  return best;
}

RandomStream cell_stream(std::uint64_t seed, std::size_t snr_index, unsigned worker) {
  return RandomStream(seed, derive_stream_id({snr_index, worker}));
}

namespace {

struct Tally {
  std::uint64_t uses = 0;
  std::uint64_t errors = 0;
  std::vector<std::uint64_t> per_stream;
  std::vector<std::uint64_t> selections;

  Tally(std::size_t streams, std::size_t candidates)
      : per_stream(streams), selections(candidates) {}

  void add(const UseOutcome& o) {
    ++uses;
    errors += o.bit_errors;
    for (std::size_t k = 0; k < o.per_stream_errors.size(); ++k) per_stream[k] += o.per_stream_errors[k];
    if (!selections.empty()) ++selections[o.selected_set];
  }
  void merge(const Tally& t) {
    uses += t.uses;
    errors += t.errors;
    for (std::size_t k = 0; k < per_stream.size(); ++k) per_stream[k] += t.per_stream[k];
    for (std::size_t k = 0; k < selections.size(); ++k) selections[k] += t.selections[k];
  }
};

BerPoint to_point(double snr_db, unsigned bits_per_use, const Tally& t) {
  BerPoint p;
  p.snr_db = snr_db;
  p.channel_uses = t.uses;
  p.bits_sent = t.uses * bits_per_use;
  p.bit_errors = t.errors;
  p.ber = p.bits_sent ? static_cast<double>(p.bit_errors) / static_cast<double>(p.bits_sent)
                      : 0.0;
  p.per_stream_errors = t.per_stream;
  p.set_selections = t.selections;
  return p;
}

// Round-based OpenMP driver shared by the fixed-set and selection kernels.
template <typename UseFn>
Tally run_rounds(UseFn&& use, std::size_t streams, std::size_t candidates, std::size_t snr_index,
                 std::uint64_t seed, const StoppingRule& stop, unsigned workers,
                 std::uint64_t chunk) {
  if (workers < 1 || chunk < 1) throw InvalidInput("run_cell: workers and chunk must be >= 1");
  std::vector<RandomStream> rngs;
  rngs.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) rngs.push_back(cell_stream(seed, snr_index, w));
  std::vector<Tally> local(workers, Tally(streams, candidates));

  Tally total(streams, candidates);
  while (total.errors < stop.min_bit_errors && total.uses < stop.max_channel_uses) {
    const std::uint64_t remaining = stop.max_channel_uses - total.uses;
    const std::uint64_t round = std::min<std::uint64_t>(remaining, chunk * workers);
    const std::uint64_t base = round / workers;
    const std::uint64_t extra = round % workers;

    for (Tally& l : local) l = Tally(streams, candidates);

    const auto nw = static_cast<long long>(workers);
#pragma omp parallel for num_threads(workers) schedule(static, 1)
    for (long long w = 0; w < nw; ++w) {
      const std::uint64_t quota = base + (static_cast<std::uint64_t>(w) < extra ? 1 : 0);
      for (std::uint64_t u = 0; u < quota; ++u) local[w].add(use(rngs[w]));
    }
    for (const Tally& l : local) total.merge(l);
  }
  return total;
}

std::size_t max_streams(std::span<const ModulationSet> sets) {
  std::size_t n = 0;
  for (const ModulationSet& s : sets) n = std::max(n, s.streams());
  return n;
}

}  // namespace

BerPoint run_cell_serial(const Link& link, double snr_db, std::size_t snr_index,
                         std::uint64_t seed, const StoppingRule& stop) {
  const double sigma2 = snr_to_sigma2(snr_db);
  RandomStream rng = cell_stream(seed, snr_index, 0);
  Tally t(link.set.streams(), 0);
  while (t.errors < stop.min_bit_errors && t.uses < stop.max_channel_uses) {
    t.add(run_channel_use(link, sigma2, rng));
  }
  return to_point(snr_db, link.set.total_bits, t);
}

BerPoint run_cell(const Link& link, double snr_db, std::size_t snr_index, std::uint64_t seed,
                  const StoppingRule& stop, unsigned workers, std::uint64_t chunk) {
  const double sigma2 = snr_to_sigma2(snr_db);
  const Tally t = run_rounds(
      [&](RandomStream& rng) { return run_channel_use(link, sigma2, rng); },
      link.set.streams(), 0, snr_index, seed, stop, workers, chunk);
  return to_point(snr_db, link.set.total_bits, t);
}

BerPoint run_selection_cell(const SelectionLink& link, double snr_db, std::size_t snr_index,
                            std::uint64_t seed, const StoppingRule& stop, unsigned workers,
                            std::uint64_t chunk) {
  if (link.candidates.empty()) throw InvalidInput("run_selection_cell: no candidates");
  const unsigned bits = link.candidates.front().total_bits;
  for (const ModulationSet& s : link.candidates) {
    if (s.total_bits != bits) throw InvalidInput("run_selection_cell: candidates differ in rate");
  }
  const double sigma2 = snr_to_sigma2(snr_db);
  const Tally t = run_rounds(
      [&](RandomStream& rng) { return run_selection_use(link, sigma2, rng); },
      max_streams(link.candidates), link.candidates.size(), snr_index, seed, stop, workers, chunk);
  return to_point(snr_db, bits, t);
}

std::vector<BerCurve> sweep(const SimConfig& cfg) {
  validate(cfg);
  std::vector<BerCurve> curves;
  for (const ModulationSet& set : resolve_sets(cfg)) {
    const Link link{cfg.n_rx, cfg.m_tx, cfg.scheme, set};
    BerCurve curve{cfg.scheme, set.name, {}, {}};
    for (std::size_t i = 0; i < cfg.snr_grid.size(); ++i) {
      curve.points.push_back(
          run_cell(link, cfg.snr_grid[i], i, cfg.seed, cfg.stop, cfg.workers, cfg.chunk));
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

BerCurve sweep_selection(const SimConfig& cfg, SelectionRule rule) {
  validate(cfg);
  const SelectionLink link{cfg.n_rx, cfg.m_tx, cfg.scheme, resolve_sets(cfg), rule};
  BerCurve curve{cfg.scheme, "SELECTION", {}, {}};
  for (std::size_t i = 0; i < cfg.snr_grid.size(); ++i) {
    curve.points.push_back(run_selection_cell(link, cfg.snr_grid[i], i, cfg.seed, cfg.stop,
                                              cfg.workers, cfg.chunk));
  }
  return curve;
}

BerCurve select_envelope(std::span<const BerCurve> curves) {
  if (curves.empty()) throw InvalidInput("select_envelope: no curves");
  const std::size_t npts = curves.front().points.size();
  for (const BerCurve& c : curves) {
    if (c.points.size() != npts) throw InvalidInput("select_envelope: mismatched SNR grids");
    for (std::size_t i = 0; i < npts; ++i) {
      if (c.points[i].snr_db != curves.front().points[i].snr_db) {
        throw InvalidInput("select_envelope: mismatched SNR grids");
      }
    }
  }
  if (curves.size() == 1) return curves.front();

  BerCurve env{curves.front().scheme, "ENVELOPE", {}, {}};
  for (std::size_t i = 0; i < npts; ++i) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < curves.size(); ++c) {
      if (curves[c].points[i].ber < curves[best].points[i].ber) best = c;
    }
    env.points.push_back(curves[best].points[i]);
    env.selected_sets.push_back(curves[best].set_name);
  }
  return env;
}

std::optional<double> try_snr_at_ber(const BerCurve& curve, double target_ber) {
  const auto& pts = curve.points;
  if (!(target_ber > 0.0)) return std::nullopt;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i].ber == target_ber) return pts[i].snr_db;
    if (i + 1 == pts.size()) break;
    const double b0 = pts[i].ber;
    const double b1 = pts[i + 1].ber;
    if (b0 > target_ber && target_ber > b1 && b1 > 0.0) {
      const double l0 = std::log10(b0);
      const double l1 = std::log10(b1);
      const double frac = (std::log10(target_ber) - l0) / (l1 - l0);
      return pts[i].snr_db + frac * (pts[i + 1].snr_db - pts[i].snr_db);
    }
  }
  return std::nullopt;
}

double snr_at_ber(const BerCurve& curve, double target_ber) {
  if (auto v = try_snr_at_ber(curve, target_ber)) return *v;
  throw OutOfRange("snr_at_ber: curve " + curve.set_name + " does not bracket BER " +
                   std::to_string(target_ber));
}

}  // namespace mimo
