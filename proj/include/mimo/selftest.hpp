#pragma once

// Fast invariant suites shared by the `selftest` command and the test suites.
// An empty QrsFunction means qrs_beamformer; tests inject doubles through it.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mimo/decomp.hpp"
#include "mimo/simkit.hpp"

namespace mimo {

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string details;  // measured values, "key=value" separated by spaces
};

/// Closed-form bit error probability of Gray QPSK over scalar Rayleigh fading
/// with average SNR per bit `snr_per_bit` (linear).
double rayleigh_qpsk_ber(double snr_per_bit) noexcept;

struct DecompositionDefects {
  double reconstruction = 0.0;     // full SVD and, for n = min(M,N), q r s^H vs h
  double effective_channel = 0.0;  // u_n^H h v_n vs diag, q^H h s vs r_mat
  double unitarity = 0.0;          // u, v, and column orthonormality of u_n, v_n, q, s
  double lower_triangle = 0.0;     // max |r_mat(i, j)|, i > j
  double equal_diagonal = 0.0;     // max relative deviation of diag(r_mat) from r_diag
  double geometric_mean = 0.0;     // relative |r_diag - gm(top-n deltas)|
  double conservation = 0.0;       // relative |prod diag(r_mat) - prod deltas|

  void absorb(const DecompositionDefects& o);
  bool within_tolerance() const;
};

using QrsFunction = std::function<QrsFactors(const ComplexMatrix&, std::size_t)>;

DecompositionDefects measure_decomposition(const ComplexMatrix& h, std::size_t n,
                                           const QrsFunction& qrs = {});

SuiteResult decomposition_suite(std::size_t channels, std::uint64_t seed,
                                const QrsFunction& qrs = {});
SuiteResult modem_suite();
SuiteResult zero_noise_suite(std::size_t channels, std::uint64_t seed);
/// 1x1 QPSK Monte Carlo against rayleigh_qpsk_ber at each grid point.
SuiteResult scalar_oracle_suite(const std::vector<double>& snr_db, const StoppingRule& stop,
                                std::uint64_t seed, double rel_tolerance);

std::vector<SuiteResult> run_selftest(std::uint64_t seed);

}  // namespace mimo
