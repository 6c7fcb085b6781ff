#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <random>
#include <set>

#include "mimo/errors.hpp"
#include "mimo/modem.hpp"

using namespace mimo;

namespace {

const ConstellationId kAll[] = {ConstellationId::Qpsk, ConstellationId::Qam8,
                                ConstellationId::Qam16, ConstellationId::Qam64};

std::size_t brute_force_nearest(cplx z, const Constellation& c) {
  std::size_t best = 0;
  for (std::size_t p = 1; p < c.size(); ++p) {
    if (std::norm(z - c.points[p]) < std::norm(z - c.points[best])) best = p;
  }
  return best;
}

}  // namespace

TEST(Constellation, QpskPoints) {
  const Constellation c = build_constellation("QPSK");
  ASSERT_EQ(c.size(), 4u);
  const double a = 1.0 / std::sqrt(2.0);
  for (const cplx& p : c.points) {
    EXPECT_NEAR(std::abs(p.real()), a, 1e-15);
    EXPECT_NEAR(std::abs(p.imag()), a, 1e-15);
  }
}

TEST(Constellation, GridScales) {
  EXPECT_NEAR(build_constellation("QAM16").scale, 1.0 / std::sqrt(10.0), 1e-15);
  EXPECT_NEAR(build_constellation("QAM64").scale, 1.0 / std::sqrt(42.0), 1e-15);
  const Constellation q8 = build_constellation("QAM8");
  EXPECT_NEAR(q8.scale, 1.0 / std::sqrt(6.0), 1e-15);
  // 4 x 2 grid: four I levels, two Q levels.
  std::set<double> re, im;
  for (const cplx& p : q8.points) {
    re.insert(std::round(p.real() / q8.scale));
    im.insert(std::round(p.imag() / q8.scale));
  }
  EXPECT_EQ(re, (std::set<double>{-3, -1, 1, 3}));
  EXPECT_EQ(im, (std::set<double>{-1, 1}));
}

TEST(Constellation, UnknownName) {
  EXPECT_THROW(build_constellation("QAM32"), InvalidInput);
  EXPECT_THROW(build_constellation("qpsk"), InvalidInput);
}

TEST(Constellation, UnitEnergyZeroMeanAndLabelBijection) {
  for (ConstellationId id : kAll) {
    const Constellation& c = constellation(id);
    ASSERT_EQ(c.size(), std::size_t{1} << c.bits_per_symbol);
    double energy = 0.0;
    cplx mean = 0.0;
    std::vector<bool> seen(c.size());
    for (std::size_t p = 0; p < c.size(); ++p) {
      energy += std::norm(c.points[p]);
      mean += c.points[p];
      ASSERT_LT(c.labels[p], c.size());
      EXPECT_FALSE(seen[c.labels[p]]);
      seen[c.labels[p]] = true;
      EXPECT_EQ(c.index_of_label[c.labels[p]], p);
    }
    EXPECT_NEAR(energy / static_cast<double>(c.size()), 1.0, 1e-12) << c.name;
    EXPECT_NEAR(std::abs(mean), 0.0, 1e-12) << c.name;
  }
}

TEST(Constellation, GrayAdjacency) {
  // Points at minimum distance differ in exactly one label bit.
  for (ConstellationId id : kAll) {
    const Constellation& c = constellation(id);
    const double dmin = 2.0 * c.scale;
    for (std::size_t p = 0; p < c.size(); ++p)
      for (std::size_t q = p + 1; q < c.size(); ++q) {
        if (std::abs(std::abs(c.points[p] - c.points[q]) - dmin) < 1e-12) {
          EXPECT_EQ(std::popcount(c.labels[p] ^ c.labels[q]), 1) << c.name << " " << p << "," << q;
        }
      }
  }
}

TEST(Modulate, QpskLookup) {
  const Constellation& c = constellation(ConstellationId::Qpsk);
  const cplx target = cplx(1.0, 1.0) / std::sqrt(2.0);
  const std::size_t idx = brute_force_nearest(target, c);
  const auto bits = label_bits(c.labels[idx], 2);
  EXPECT_NEAR(std::abs(modulate(bits, c) - target), 0.0, 1e-15);
}

TEST(Modulate, RoundTripAllPatterns) {
  for (ConstellationId id : kAll) {
    const Constellation& c = constellation(id);
    for (std::uint32_t label = 0; label < c.size(); ++label) {
      const auto bits = label_bits(label, c.bits_per_symbol);
      const std::size_t idx = nearest_point(modulate(bits, c), c);
      EXPECT_EQ(c.labels[idx], label);
      EXPECT_EQ(label_bits(c.labels[idx], c.bits_per_symbol), bits);
    }
  }
}

TEST(Modulate, LengthMismatch) {
  const std::vector<std::uint8_t> three(3);
  EXPECT_THROW(modulate(three, constellation(ConstellationId::Qam16)), InvalidInput);
  EXPECT_THROW(modulate_label(16, constellation(ConstellationId::Qam16)), InvalidInput);
}

TEST(NearestPoint, Examples) {
  const Constellation& q = constellation(ConstellationId::Qpsk);
  EXPECT_EQ(nearest_point(cplx(100.0, 100.0), q), brute_force_nearest(cplx(1.0, 1.0), q));
  for (ConstellationId id : kAll) {
    const Constellation& c = constellation(id);
    for (std::size_t p = 0; p < c.size(); ++p) EXPECT_EQ(nearest_point(c.points[p], c), p);
  }
}

TEST(NearestPoint, MatchesBruteForceScan) {
  std::mt19937_64 gen(99);
  std::normal_distribution<double> nd(0.0, 0.9);
  for (ConstellationId id : kAll) {
    const Constellation& c = constellation(id);
    for (int t = 0; t < 10000; ++t) {
      const cplx z(nd(gen), nd(gen));
      ASSERT_EQ(nearest_point(z, c), brute_force_nearest(z, c)) << c.name << " z=" << z;
    }
  }
}

TEST(NearestPoint, TiesGoToLowestIndex) {
  const Constellation& c = constellation(ConstellationId::Qam16);
  // Midway between the two lowest I levels, exactly on a Q level.
  const cplx z(-2.0 * c.scale, -3.0 * c.scale);
  EXPECT_EQ(nearest_point(z, c), 0u);
  EXPECT_EQ(nearest_point(cplx(0.0, 0.0), c), brute_force_nearest(cplx(0.0, 0.0), c));
}

TEST(ExpectedBitErrors, MatchesMonteCarlo) {
  std::mt19937_64 gen(3);
  for (ConstellationId id : kAll) {
    const Constellation& c = constellation(id);
    const double sd = 0.6 * c.scale;
    std::normal_distribution<double> nd(0.0, sd);
    std::uniform_int_distribution<std::size_t> pick(0, c.size() - 1);
    const int trials = 200000;
    double errors = 0.0;
    for (int t = 0; t < trials; ++t) {
      const std::size_t p = pick(gen);
      const std::size_t d = nearest_point(c.points[p] + cplx(nd(gen), nd(gen)), c);
      errors += std::popcount(c.labels[p] ^ c.labels[d]);
    }
    const double mc = errors / trials;
    const double exact = expected_bit_errors(c, sd);
    EXPECT_NEAR(mc, exact, 5.0 * std::sqrt(exact / trials) + 1e-4) << c.name;
  }
  EXPECT_EQ(expected_bit_errors(constellation(ConstellationId::Qpsk), 0.0), 0.0);
}

TEST(ModulationSet, Parse) {
  const ModulationSet s = parse_modulation_set("QAM16-QPSK-QPSK");
  EXPECT_EQ(s.streams(), 3u);
  EXPECT_EQ(s.total_bits, 8u);
  EXPECT_EQ(s.per_stream[0], ConstellationId::Qam16);
  EXPECT_EQ(parse_modulation_set("QPSK").total_bits, 2u);
  EXPECT_THROW(parse_modulation_set("QAM16--QPSK"), InvalidInput);
  EXPECT_THROW(parse_modulation_set(""), InvalidInput);
}

TEST(Catalog, ContentsAndOrder) {
  auto names = [](Scheme s) {
    std::vector<std::string> out;
    for (const ModulationSet& m : catalog(s)) out.push_back(m.name);
    return out;
  };
  EXPECT_EQ(names(Scheme::Svd), (std::vector<std::string>{"QAM64-QPSK", "QAM16-QAM16",
                                                           "QAM16-QPSK-QPSK", "QAM8-QAM8-QPSK"}));
  EXPECT_EQ(names(Scheme::Qrs), (std::vector<std::string>{"QAM16-QAM16", "QAM16-QPSK-QPSK",
                                                           "QAM8-QAM8-QPSK", "QPSK-QPSK-QPSK-QPSK"}));
  EXPECT_TRUE(in_catalog(Scheme::Svd, "QAM64-QPSK"));
  EXPECT_FALSE(in_catalog(Scheme::Svd, "QPSK-QPSK-QPSK-QPSK"));
  EXPECT_TRUE(in_catalog(Scheme::Qrs, "QPSK-QPSK-QPSK-QPSK"));
  EXPECT_FALSE(in_catalog(Scheme::Qrs, "QAM64-QPSK"));
  for (Scheme s : {Scheme::Svd, Scheme::Qrs})
    for (const ModulationSet& m : catalog(s)) EXPECT_EQ(m.total_bits, kBitsPerChannelUse);
}

TEST(Names, ParseAndPrint) {
  EXPECT_EQ(parse_scheme("svd"), Scheme::Svd);
  EXPECT_EQ(parse_scheme("qrs"), Scheme::Qrs);
  EXPECT_EQ(parse_scheme("QRS"), Scheme::Qrs);
  EXPECT_THROW(parse_scheme("mmse"), InvalidInput);
  for (ConstellationId id : kAll) EXPECT_EQ(parse_constellation(to_string(id)), id);
}
