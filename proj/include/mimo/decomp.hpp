#pragma once

// Beamforming factorizations of a channel matrix: truncated SVD and the
// equal-diagonal QR (geometric mean) decomposition, both for n <= min(M, N)
// streams.

#include <cstddef>
#include <span>
#include <vector>

#include "mimo/matcore.hpp"
#include "mimo/tolerances.hpp"

namespace mimo {

/// Rank-n SVD factors: h * v_n = u_n * diag(deltas).
struct SvdFactors {
  ComplexMatrix u_n;           // N x n
  std::vector<double> deltas;  // n subchannel gains, non-increasing
  ComplexMatrix v_n;           // M x n transmit precoder
  std::size_t rank_used = 0;
};

/// Equal-diagonal factors: q^H * h * s = r_mat, upper triangular, every
/// diagonal entry real and equal to r_diag.
struct QrsFactors {
  ComplexMatrix q;      // N x n
  ComplexMatrix r_mat;  // n x n
  ComplexMatrix s;      // M x n transmit precoder
  double r_diag = 0.0;
};

/// (prod deltas)^(1/len), evaluated in the log domain.
/// Throws RankDeficiency when an entry is not strictly positive.
double geometric_mean(std::span<const double> deltas);

SvdFactors svd_beamformer(const ComplexMatrix& h, std::size_t n,
                          double rank_tolerance = tol::kRank);
/// Truncation of an SVD that is already available.
SvdFactors svd_beamformer(const SvdResult& full, std::size_t n,
                          double rank_tolerance = tol::kRank);

/// Starts from the rank-n SVD (so the reduced-stream channel h * v_n is used
/// when n < min(M, N)) and equalizes the diagonal with n - 1 paired Givens steps.
QrsFactors qrs_beamformer(const ComplexMatrix& h, std::size_t n,
                          double rank_tolerance = tol::kRank);

/// The Givens equalization step on its own, applied to existing SVD factors.
QrsFactors equalize_diagonal(const SvdFactors& f);

}  // namespace mimo
