#include "mimo/selftest.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <set>

#include "mimo/channel.hpp"
#include "mimo/tolerances.hpp"

namespace mimo {

namespace {

std::string fmt(const char* key, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s=%.3e", key, v);
  return buf;
}

double relative(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

double rayleigh_qpsk_ber(double snr_per_bit) noexcept {
  return 0.5 * (1.0 - std::sqrt(snr_per_bit / (1.0 + snr_per_bit)));
}

void DecompositionDefects::absorb(const DecompositionDefects& o) {
  reconstruction = std::max(reconstruction, o.reconstruction);
  effective_channel = std::max(effective_channel, o.effective_channel);
  unitarity = std::max(unitarity, o.unitarity);
  lower_triangle = std::max(lower_triangle, o.lower_triangle);
  equal_diagonal = std::max(equal_diagonal, o.equal_diagonal);
  geometric_mean = std::max(geometric_mean, o.geometric_mean);
  conservation = std::max(conservation, o.conservation);
}

bool DecompositionDefects::within_tolerance() const {
  return reconstruction <= tol::kEffectiveChannel && effective_channel <= tol::kEffectiveChannel &&
         unitarity <= tol::kUnitarity && lower_triangle <= tol::kLowerTriangle &&
         equal_diagonal <= tol::kEqualDiagonal && geometric_mean <= tol::kEqualDiagonal &&
         conservation <= tol::kProductConservation;
}

DecompositionDefects measure_decomposition(const ComplexMatrix& h, std::size_t n,
                                           const QrsFunction& qrs) {
  DecompositionDefects d;
  const double scale = std::max(1.0, frobenius_norm(h));

  const SvdResult full = svd(h);
  const ComplexMatrix rebuilt = matmul(
      matmul(full.u, ComplexMatrix::diagonal(full.deltas, h.rows(), h.cols())),
      conj_transpose(full.v));
  d.reconstruction = frobenius_norm(subtract(rebuilt, h)) / scale;
  d.unitarity = std::max(unitarity_defect(full.u), unitarity_defect(full.v));

  const SvdFactors sf = svd_beamformer(h, n);
  const ComplexMatrix svd_eff = matmul(matmul(conj_transpose(sf.u_n), h), sf.v_n);
  d.effective_channel =
      frobenius_norm(subtract(svd_eff, ComplexMatrix::diagonal(sf.deltas, n, n)));
  d.unitarity = std::max({d.unitarity, orthonormality_defect(sf.u_n),
                          orthonormality_defect(sf.v_n)});

  const QrsFactors qf = qrs ? qrs(h, n) : qrs_beamformer(h, n);
  const ComplexMatrix qrs_eff = matmul(matmul(conj_transpose(qf.q), h), qf.s);
  d.effective_channel = std::max(d.effective_channel, frobenius_norm(subtract(qrs_eff, qf.r_mat)));
  d.unitarity = std::max({d.unitarity, orthonormality_defect(qf.q), orthonormality_defect(qf.s)});
  if (n == std::min(h.rows(), h.cols())) {
    const ComplexMatrix qrs_rebuilt = matmul(matmul(qf.q, qf.r_mat), conj_transpose(qf.s));
    d.reconstruction = std::max(d.reconstruction, frobenius_norm(subtract(qrs_rebuilt, h)) / scale);
  }

  double prod_diag = 1.0;
  double prod_delta = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      d.lower_triangle = std::max(d.lower_triangle, std::abs(qf.r_mat(i, j)));
    }
    const cplx dii = qf.r_mat(i, i);
    d.equal_diagonal = std::max(d.equal_diagonal, std::abs(dii - qf.r_diag) / qf.r_diag);
    prod_diag *= dii.real();
    prod_delta *= sf.deltas[i];
  }
  d.geometric_mean = relative(qf.r_diag, geometric_mean(sf.deltas));
  d.conservation = relative(prod_diag, prod_delta);
  return d;
}

SuiteResult decomposition_suite(std::size_t channels, std::uint64_t seed, const QrsFunction& qrs) {
  DecompositionDefects worst;
  RandomStream rng(seed, derive_stream_id({0xdec0}));
  for (std::size_t t = 0; t < channels; ++t) {
    const ComplexMatrix h = draw_channel(rng, 4, 4).h;
    for (std::size_t n = 2; n <= 4; ++n) worst.absorb(measure_decomposition(h, n, qrs));
  }
  SuiteResult r{"decomposition", worst.within_tolerance(), ""};
  r.details = fmt("max_reconstruction", worst.reconstruction) + " " +
              fmt("max_effective_channel", worst.effective_channel) + " " +
              fmt("max_unitarity_defect", worst.unitarity) + " " +
              fmt("max_lower_triangle", worst.lower_triangle) + " " +
              fmt("max_equal_diagonal", worst.equal_diagonal) + " " +
              fmt("max_geometric_mean", worst.geometric_mean) + " " +
              fmt("max_conservation", worst.conservation);
  return r;
}

SuiteResult modem_suite() {
  bool ok = true;
  double worst_energy = 0.0;
  std::size_t adjacency_violations = 0;
  std::size_t roundtrip_failures = 0;
  for (ConstellationId id : {ConstellationId::Qpsk, ConstellationId::Qam8, ConstellationId::Qam16,
                             ConstellationId::Qam64}) {
    const Constellation& c = constellation(id);
    double energy = 0.0;
    for (const cplx& p : c.points) energy += std::norm(p);
    worst_energy = std::max(worst_energy, std::abs(energy / c.size() - 1.0));

    std::set<std::uint32_t> seen(c.labels.begin(), c.labels.end());
    ok = ok && seen.size() == c.size() && *seen.rbegin() == c.size() - 1;

    // Nearest neighbours on the grid lie 2 * scale apart.
    const double step = 2.0 * c.scale;
    for (std::size_t a = 0; a < c.size(); ++a) {
      for (std::size_t b = a + 1; b < c.size(); ++b) {
        if (std::abs(std::abs(c.points[a] - c.points[b]) - step) < 1e-9 &&
            std::popcount(c.labels[a] ^ c.labels[b]) != 1) {
          ++adjacency_violations;
        }
      }
    }
    for (std::uint32_t label = 0; label < c.size(); ++label) {
      const cplx z = modulate(label_bits(label, c.bits_per_symbol), c);
      if (c.labels[nearest_point(z, c)] != label) ++roundtrip_failures;
    }
  }
  bool catalog_ok = catalog(Scheme::Svd).size() == 4 && catalog(Scheme::Qrs).size() == 4;
  for (Scheme s : {Scheme::Svd, Scheme::Qrs}) {
    for (const ModulationSet& m : catalog(s)) catalog_ok = catalog_ok && m.total_bits == 8;
  }
  ok = ok && worst_energy <= tol::kUnitEnergy && adjacency_violations == 0 &&
       roundtrip_failures == 0 && catalog_ok;
  return SuiteResult{"modem", ok,
                     fmt("max_energy_error", worst_energy) +
                         " gray_violations=" + std::to_string(adjacency_violations) +
                         " roundtrip_failures=" + std::to_string(roundtrip_failures) +
                         " catalog=" + (catalog_ok ? "ok" : "mismatch")};
}

SuiteResult zero_noise_suite(std::size_t channels, std::uint64_t seed) {
  std::uint64_t errors = 0;
  std::uint64_t uses = 0;
  for (Scheme s : {Scheme::Svd, Scheme::Qrs}) {
    for (const ModulationSet& set : catalog(s)) {
      const Link link{4, 4, s, set};
      RandomStream rng(seed, derive_stream_id({0x2e60, static_cast<std::uint64_t>(s)}));
      for (std::size_t t = 0; t < channels; ++t) {
        errors += run_channel_use(link, 0.0, rng).bit_errors;
        ++uses;
      }
    }
  }
  return SuiteResult{"zero_noise", errors == 0,
                     "channel_uses=" + std::to_string(uses) +
                         " bit_errors=" + std::to_string(errors)};
}

SuiteResult scalar_oracle_suite(const std::vector<double>& snr_db, const StoppingRule& stop,
                                std::uint64_t seed, double rel_tolerance) {
  const Link link{1, 1, Scheme::Svd, parse_modulation_set("QPSK")};
  double worst = 0.0;
  bool ok = true;
  std::string details;
  for (std::size_t i = 0; i < snr_db.size(); ++i) {
    const BerPoint p = run_cell(link, snr_db[i], i, seed, stop, 1, 1024);
    // Unit symbol energy over two bits: SNR per bit is half the symbol SNR.
    const double expected = rayleigh_qpsk_ber(0.5 / snr_to_sigma2(snr_db[i]));
    const double rel = std::abs(p.ber - expected) / expected;
    worst = std::max(worst, rel);
    if (expected >= 1e-3 && rel > rel_tolerance) ok = false;
  }
  details = fmt("max_relative_error", worst) + " points=" + std::to_string(snr_db.size());
  return SuiteResult{"scalar_rayleigh_oracle", ok, details};
}

std::vector<SuiteResult> run_selftest(std::uint64_t seed) {
  std::vector<SuiteResult> out;
  out.push_back(decomposition_suite(200, seed));
  out.push_back(modem_suite());
  out.push_back(zero_noise_suite(200, seed));
  out.push_back(scalar_oracle_suite({0.0, 4.0, 8.0}, StoppingRule{4000, 2'000'000}, seed, 0.05));
  return out;
}

}  // namespace mimo
