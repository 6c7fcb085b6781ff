#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "mimo/errors.hpp"
#include "mimo/selftest.hpp"
#include "mimo/simkit.hpp"

using namespace mimo;

namespace {

BerCurve synthetic(std::string name, std::vector<std::pair<double, double>> pts) {
  BerCurve c;
  c.set_name = std::move(name);
  for (auto [snr, ber] : pts) {
    BerPoint p;
    p.snr_db = snr;
    p.bits_sent = 8'000'000;
    p.bit_errors = static_cast<std::uint64_t>(std::llround(ber * 8'000'000));
    p.channel_uses = 1'000'000;
    p.ber = ber;
    c.points.push_back(p);
  }
  return c;
}

Link qrs16() { return Link{4, 4, Scheme::Qrs, parse_modulation_set("QAM16-QAM16")}; }

}  // namespace

TEST(SnrToSigma2, Examples) {
  EXPECT_DOUBLE_EQ(snr_to_sigma2(0.0), 1.0);
  EXPECT_NEAR(snr_to_sigma2(10.0), 0.1, 1e-15);
  EXPECT_NEAR(snr_to_sigma2(20.0), 0.01, 1e-16);
}

TEST(SnrRange, InclusiveAndValidated) {
  EXPECT_EQ(snr_range(0, 24, 1).size(), 25u);
  EXPECT_EQ(snr_range(0, 1, 0.1).size(), 11u);
  EXPECT_DOUBLE_EQ(snr_range(0, 1, 0.1).back(), 1.0);
  EXPECT_THROW(snr_range(0, 1, 0), InvalidInput);
  EXPECT_THROW(snr_range(2, 1, 1), InvalidInput);
}

TEST(Validate, RejectsBadConfigs) {
  SimConfig ok;
  ok.snr_grid = {0.0};
  EXPECT_NO_THROW(validate(ok));
  SimConfig c = ok;
  c.snr_grid = {};
  EXPECT_THROW(validate(c), InvalidInput);
  c = ok;
  c.snr_grid = {3.0, 1.0};
  EXPECT_THROW(validate(c), InvalidInput);
  c = ok;
  c.workers = 0;
  EXPECT_THROW(validate(c), InvalidInput);
  c = ok;
  c.m_tx = 2;  // QPSK x4 needs four streams
  c.scheme = Scheme::Qrs;
  EXPECT_THROW(validate(c), InvalidInput);
}

TEST(ChannelUse, ZeroNoiseEveryCombination) {
  for (Scheme sc : {Scheme::Svd, Scheme::Qrs})
    for (const ModulationSet& set : catalog(sc)) {
      RandomStream rng(5, derive_stream_id({static_cast<std::uint64_t>(sc), set.streams()}));
      for (int t = 0; t < 200; ++t) {
        EXPECT_EQ(run_channel_use(Link{4, 4, sc, set}, 0.0, rng).bit_errors, 0u) << set.name;
      }
    }
}

TEST(ChannelUse, DeterministicAndConsistentAccounting) {
  RandomStream a(9, 1), b(9, 1);
  for (int t = 0; t < 100; ++t) {
    const UseOutcome x = run_channel_use(qrs16(), 0.3, a);
    const UseOutcome y = run_channel_use(qrs16(), 0.3, b);
    EXPECT_EQ(x.bit_errors, y.bit_errors);
    EXPECT_EQ(x.per_stream_errors, y.per_stream_errors);
    EXPECT_EQ(std::accumulate(x.per_stream_errors.begin(), x.per_stream_errors.end(), 0ull), x.bit_errors);
  }
}

TEST(ChannelUse, SameVariatesForEverySetAndScheme) {
  // Common random numbers: after one use, every link leaves the stream in the same state.
  std::vector<double> next;
  for (Scheme sc : {Scheme::Svd, Scheme::Qrs})
    for (const ModulationSet& set : catalog(sc)) {
      RandomStream rng(4, 4);
      run_channel_use(Link{4, 4, sc, set}, 0.1, rng);
      next.push_back(rng.gaussian());
    }
  for (double v : next) EXPECT_EQ(v, next.front());
}

TEST(ChannelUse, UnitTransmitEnergy) {
  for (Scheme sc : {Scheme::Svd, Scheme::Qrs})
    for (const ModulationSet& set : catalog(sc)) {
      RandomStream rng(6, 6);
      double e = 0.0;
      const int n = 10000;
      for (int t = 0; t < n; ++t) e += run_channel_use(Link{4, 4, sc, set}, 0.1, rng).tx_energy;
      EXPECT_NEAR(e / n, 1.0, 0.01) << set.name;
    }
}

TEST(Cell, AccountingIdentity) {
  const BerPoint p = run_cell(qrs16(), 6.0, 0, 1, StoppingRule{10, 500}, 1, 16);
  EXPECT_EQ(p.bits_sent, 8 * p.channel_uses);
  EXPECT_EQ(std::accumulate(p.per_stream_errors.begin(), p.per_stream_errors.end(), 0ull), p.bit_errors);
  EXPECT_DOUBLE_EQ(p.ber, static_cast<double>(p.bit_errors) / static_cast<double>(p.bits_sent));
  EXPECT_GE(p.bit_errors, 10u);
}

TEST(Cell, StopsAtUseCap) {
  const BerPoint p = run_cell(qrs16(), 40.0, 0, 1, StoppingRule{1'000'000, 777}, 3, 100);
  EXPECT_EQ(p.channel_uses, 777u);
}

TEST(Cell, SerialReferenceEqualsOneWorkerChunkOne) {
  for (double snr : {0.0, 8.0}) {
    const StoppingRule stop{60, 5000};
    for (Scheme sc : {Scheme::Svd, Scheme::Qrs}) {
      const Link link{4, 4, sc, parse_modulation_set("QAM16-QPSK-QPSK")};
      EXPECT_EQ(run_cell_serial(link, snr, 3, 42, stop), run_cell(link, snr, 3, 42, stop, 1, 1));
    }
  }
}

TEST(Cell, WorkerCountsMergeByAddition) {
  const Link link = qrs16();
  const double sigma2 = snr_to_sigma2(6.0);
  const StoppingRule stop{std::numeric_limits<std::uint64_t>::max(), 100000};
  const BerPoint merged = run_cell(link, 6.0, 2, 13, stop, 4, 25000);

  std::uint64_t errors = 0;
  for (unsigned w = 0; w < 4; ++w) {
    RandomStream rng = cell_stream(13, 2, w);
    for (int u = 0; u < 25000; ++u) errors += run_channel_use(link, sigma2, rng).bit_errors;
  }
  EXPECT_EQ(merged.channel_uses, 100000u);
  EXPECT_EQ(merged.bits_sent, 800000u);
  EXPECT_EQ(merged.bit_errors, errors);
}

TEST(Cell, DeterministicForFixedWorkers) {
  const StoppingRule stop{100, 20000};
  for (unsigned w : {1u, 2u, 3u}) {
    EXPECT_EQ(run_cell(qrs16(), 10.0, 1, 5, stop, w, 64), run_cell(qrs16(), 10.0, 1, 5, stop, w, 64));
  }
}

TEST(Sweep, SingleSetSinglePoint) {
  SimConfig cfg;
  cfg.scheme = Scheme::Svd;
  cfg.set = "QAM64-QPSK";
  cfg.snr_grid = {5.0};
  cfg.stop = StoppingRule{5, 50};
  const auto curves = sweep(cfg);
  ASSERT_EQ(curves.size(), 1u);
  ASSERT_EQ(curves[0].points.size(), 1u);
  EXPECT_EQ(curves[0].set_name, "QAM64-QPSK");
  EXPECT_EQ(curves[0].points[0].bits_sent, 8 * curves[0].points[0].channel_uses);
}

TEST(Sweep, AllExpandsCatalogAndIsDeterministic) {
  SimConfig cfg;
  cfg.scheme = Scheme::Qrs;
  cfg.snr_grid = {0.0, 10.0};
  cfg.stop = StoppingRule{20, 2000};
  cfg.workers = 2;
  cfg.chunk = 128;
  const auto a = sweep(cfg);
  ASSERT_EQ(a.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(a[i].set_name, catalog(Scheme::Qrs)[i].name);
  EXPECT_EQ(a, sweep(cfg));
}

TEST(Sweep, BerDecreasesWithSnrWithinConfidence) {
  SimConfig cfg;
  cfg.scheme = Scheme::Svd;
  cfg.snr_grid = snr_range(0, 20, 5);
  cfg.stop = StoppingRule{100, 20000};
  for (const BerCurve& c : sweep(cfg)) {
    for (std::size_t i = 0; i + 1 < c.points.size(); ++i) {
      const BerPoint& lo = c.points[i];
      const BerPoint& hi = c.points[i + 1];
      // Upper 95% limit of the lower-SNR BER vs lower limit of the next one.
      auto half = [](const BerPoint& p) {
        return 1.96 * std::sqrt(std::max<double>(p.bit_errors, 1.0)) / static_cast<double>(p.bits_sent);
      };
      EXPECT_LE(hi.ber - half(hi), lo.ber + half(lo)) << c.set_name << " at " << hi.snr_db;
    }
  }
}

TEST(Sweep, QrsSixteenBeatsFourQpskAtHighSnr) {
  SimConfig cfg;
  cfg.scheme = Scheme::Qrs;
  cfg.snr_grid = {20.0};
  cfg.stop = StoppingRule{200, 200000};
  cfg.set = "QAM16-QAM16";
  const double qam16 = sweep(cfg)[0].points[0].ber;
  cfg.set = "QPSK-QPSK-QPSK-QPSK";
  const double qpsk4 = sweep(cfg)[0].points[0].ber;
  EXPECT_LT(qam16, qpsk4);
}

TEST(Selection, OracleNeverWorseThanAnyCandidateUseByUse) {
  // Fixed use count and shared streams: each selection use sees the same
  // channel, bits and noise as the fixed-set uses.
  const StoppingRule stop{std::numeric_limits<std::uint64_t>::max(), 3000};
  for (Scheme sc : {Scheme::Svd, Scheme::Qrs}) {
    const SelectionLink link{4, 4, sc, catalog(sc), SelectionRule::Oracle};
    const BerPoint sel = run_selection_cell(link, 8.0, 0, 3, stop, 1, 1024);
    std::uint64_t uses = 0;
    for (std::uint64_t n : sel.set_selections) uses += n;
    EXPECT_EQ(uses, sel.channel_uses);
    for (const ModulationSet& set : catalog(sc)) {
      const BerPoint fixed = run_cell(Link{4, 4, sc, set}, 8.0, 0, 3, stop, 1, 1024);
      EXPECT_LE(sel.bit_errors, fixed.bit_errors) << set.name;
    }
  }
}

TEST(Selection, OracleUseMatchesMinimumOverCandidates) {
  const double sigma2 = snr_to_sigma2(6.0);
  const SelectionLink link{4, 4, Scheme::Svd, catalog(Scheme::Svd), SelectionRule::Oracle};
  RandomStream rng(21, 21);
  for (int t = 0; t < 200; ++t) {
    std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < link.candidates.size(); ++i) {
      RandomStream fork = rng;
      const auto e = run_channel_use(Link{4, 4, Scheme::Svd, link.candidates[i]}, sigma2, fork).bit_errors;
      if (e < best) {
        best = e;
        best_i = i;
      }
    }
    const UseOutcome o = run_selection_use(link, sigma2, rng);
    EXPECT_EQ(o.bit_errors, best);
    EXPECT_EQ(o.selected_set, best_i);
  }
}

TEST(Selection, ExpectedErrorsRulePicksArgmin) {
  const double sigma2 = snr_to_sigma2(10.0);
  std::vector<double> deltas{2.5, 1.2, 0.6, 0.1};
  const auto& cands = catalog(Scheme::Svd);
  const std::size_t pick = select_for_channel(deltas, Scheme::Svd, cands, sigma2);
  for (const ModulationSet& s : cands) {
    EXPECT_LE(expected_set_errors(deltas, Scheme::Svd, cands[pick], sigma2),
              expected_set_errors(deltas, Scheme::Svd, s, sigma2));
  }
  // A channel with one dominant eigenmode favours the two-stream QAM64 set.
  deltas = {3.0, 0.3, 0.05, 0.01};
  EXPECT_EQ(cands[select_for_channel(deltas, Scheme::Svd, cands, sigma2)].name, "QAM64-QPSK");
}

TEST(Selection, RuleNames) {
  EXPECT_EQ(parse_selection_rule("oracle"), SelectionRule::Oracle);
  EXPECT_EQ(parse_selection_rule("expected"), SelectionRule::ExpectedErrors);
  EXPECT_THROW(parse_selection_rule("genie"), InvalidInput);
}

TEST(Envelope, Examples) {
  const BerCurve a = synthetic("A", {{0, 0.1}, {5, 0.01}, {10, 0.001}});
  const BerCurve b = synthetic("B", {{0, 0.2}, {5, 0.02}, {10, 0.002}});
  const BerCurve c = synthetic("C", {{0, 0.05}, {5, 0.03}, {10, 0.0005}});

  const BerCurve one[] = {a};
  EXPECT_EQ(select_envelope(one).points, a.points);

  const BerCurve two[] = {b, a};
  const BerCurve ab = select_envelope(two);
  EXPECT_EQ(ab.points, a.points);
  EXPECT_EQ(ab.selected_sets, (std::vector<std::string>{"A", "A", "A"}));

  const BerCurve three[] = {a, b, c};
  const BerCurve env = select_envelope(three);
  EXPECT_EQ(env.selected_sets, (std::vector<std::string>{"C", "A", "C"}));
  for (std::size_t i = 0; i < 3; ++i)
    for (const BerCurve& x : three) EXPECT_LE(env.points[i].ber, x.points[i].ber);
  EXPECT_EQ(env.points[1].bit_errors, a.points[1].bit_errors);
}

TEST(Envelope, MismatchedGrids) {
  const BerCurve a = synthetic("A", {{0, 0.1}, {5, 0.01}});
  const BerCurve b = synthetic("B", {{0, 0.1}, {6, 0.01}});
  const BerCurve c = synthetic("C", {{0, 0.1}});
  const BerCurve ab[] = {a, b};
  const BerCurve ac[] = {a, c};
  EXPECT_THROW(select_envelope(ab), InvalidInput);
  EXPECT_THROW(select_envelope(ac), InvalidInput);
}

TEST(SnrAtBer, Examples) {
  EXPECT_NEAR(snr_at_ber(synthetic("x", {{8, 1e-2}, {10, 1e-3}, {12, 1e-4}}), 1e-3), 10.0, 1e-12);
  EXPECT_NEAR(snr_at_ber(synthetic("x", {{10, 1e-2}, {12, 1e-4}}), 1e-3), 11.0, 1e-12);
  const double s = snr_at_ber(synthetic("x", {{0, 0.2}, {4, 3e-2}, {8, 5e-4}}), 1e-3);
  EXPECT_GT(s, 4.0);
  EXPECT_LT(s, 8.0);
}

TEST(SnrAtBer, NotBracketed) {
  EXPECT_THROW(snr_at_ber(synthetic("x", {{0, 0.1}, {5, 0.01}}), 1e-3), OutOfRange);
  EXPECT_THROW(snr_at_ber(synthetic("x", {{0, 1e-4}, {5, 1e-5}}), 1e-3), OutOfRange);
  EXPECT_FALSE(try_snr_at_ber(synthetic("x", {{0, 0.1}}), 1e-3).has_value());
}

TEST(SnrAtBer, ZeroBerPointsAreSkipped) {
  // 0 errors cannot be placed on a log axis; the last nonzero pair brackets instead.
  const BerCurve c = synthetic("x", {{0, 1e-1}, {10, 1e-4}, {20, 0.0}});
  EXPECT_NEAR(snr_at_ber(c, 1e-3), 10.0 * 2.0 / 3.0, 1e-12);
}

TEST(ScalarOracle, ClosedFormValues) {
  EXPECT_NEAR(rayleigh_qpsk_ber(1.0), 0.5 * (1.0 - std::sqrt(0.5)), 1e-15);
  EXPECT_NEAR(rayleigh_qpsk_ber(1000.0), 1.0 / 4000.0, 1e-6);
}

TEST(ScalarOracle, MonteCarloMatchesClosedForm) {
  const SuiteResult r = scalar_oracle_suite({0.0, 5.0, 10.0}, StoppingRule{3000, 2'000'000}, 1, 0.05);
  EXPECT_TRUE(r.passed) << r.details;
}
