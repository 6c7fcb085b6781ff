#include "mimo/decomp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mimo/errors.hpp"

namespace mimo {

double geometric_mean(std::span<const double> deltas) {
  if (deltas.empty()) throw InvalidInput("geometric_mean: empty input");
  double log_sum = 0.0;
  for (double d : deltas) {
    if (!(d > 0.0)) throw RankDeficiency("geometric_mean: non-positive singular value");
    log_sum += std::log(d);
  }
  return std::exp(log_sum / static_cast<double>(deltas.size()));
}

SvdFactors svd_beamformer(const ComplexMatrix& h, std::size_t n, double rank_tolerance) {
  const std::size_t d = std::min(h.rows(), h.cols());
  if (n == 0 || n > d) {
    throw InvalidInput("svd_beamformer: stream count " + std::to_string(n) +
                       " outside [1, " + std::to_string(d) + "]");
  }
  return svd_beamformer(svd(h), n, rank_tolerance);
}

SvdFactors svd_beamformer(const SvdResult& full, std::size_t n, double rank_tolerance) {
  if (n == 0 || n > full.deltas.size()) {
    throw InvalidInput("svd_beamformer: stream count " + std::to_string(n) +
                       " outside [1, " + std::to_string(full.deltas.size()) + "]");
  }
  if (!(full.deltas[n - 1] > rank_tolerance)) {
    throw RankDeficiency("svd_beamformer: singular value " + std::to_string(n) +
                         " is below the rank tolerance");
  }
  return SvdFactors{full.u.leading_columns(n),
                    std::vector<double>(full.deltas.begin(), full.deltas.begin() + n),
                    full.v.leading_columns(n), n};
}

namespace {

// Symmetric permutation of index a and b in the trailing (diagonal) block.
void swap_streams(QrsFactors& f, std::size_t a, std::size_t b) {
  if (a == b) return;
  f.r_mat.swap_cols(a, b);
  f.r_mat.swap_rows(a, b);
  f.q.swap_cols(a, b);
  f.s.swap_cols(a, b);
}

}  // namespace

QrsFactors equalize_diagonal(const SvdFactors& svd_f) {
  const std::size_t n = svd_f.deltas.size();
  const double r = geometric_mean(svd_f.deltas);
  QrsFactors f{svd_f.u_n, ComplexMatrix::diagonal(svd_f.deltas, n, n), svd_f.v_n, r};

  // Invariant at step k: rows < k are final, the block from (k, k) down is diagonal
  // and its entries have geometric mean r.
  for (std::size_t k = 0; k + 1 < n; ++k) {
    std::size_t hi = k;
    std::size_t lo = k;
    for (std::size_t i = k; i < n; ++i) {
      const double di = f.r_mat(i, i).real();
      if (di > f.r_mat(hi, hi).real()) hi = i;
      if (di < f.r_mat(lo, lo).real()) lo = i;
    }
    const double spread = f.r_mat(hi, hi).real() - f.r_mat(lo, lo).real();
    if (spread <= r * 1e-15) break;  // remaining diagonal already equals r

    swap_streams(f, k, hi);
    if (lo == k) lo = hi;
    swap_streams(f, k + 1, lo);

    const double d1 = f.r_mat(k, k).real();
    const double d2 = f.r_mat(k + 1, k + 1).real();
    const double c2 = std::clamp((r * r - d2 * d2) / (d1 * d1 - d2 * d2), 0.0, 1.0);
    const double c = std::sqrt(c2);
    const double s = std::sqrt(1.0 - c2);

    // Right rotation mixes columns k, k+1 so column k has norm r.
    const GivensRotation right{k, k + 1, c, s};
    rotate_cols_adjoint(f.r_mat, right);
    rotate_cols_adjoint(f.s, right);

    // Left rotation restores upper-triangular form: R <- G R, Q <- Q G^H.
    const GivensRotation left = givens_zeroing(f.r_mat(k, k), f.r_mat(k + 1, k), k, k + 1);
    rotate_rows(f.r_mat, left);
    rotate_cols_adjoint(f.q, left);
    f.r_mat(k + 1, k) = 0.0;
  }

  // Real non-negative diagonal; phases go into q.
  for (std::size_t i = 0; i < n; ++i) {
    const cplx dii = f.r_mat(i, i);
    const double mag = std::abs(dii);
    if (mag == 0.0) continue;
    const cplx phase = dii / mag;
    for (std::size_t j = i; j < n; ++j) f.r_mat(i, j) *= std::conj(phase);
    f.r_mat(i, i) = mag;
    for (std::size_t row = 0; row < f.q.rows(); ++row) f.q(row, i) *= phase;
  }
  return f;
}

QrsFactors qrs_beamformer(const ComplexMatrix& h, std::size_t n, double rank_tolerance) {
  // h * v_n = u_n * diag(deltas) is already the SVD of the reduced channel h * v_n,
  // so equalizing it directly yields the composite precoder v_n * (inner unitary).
  return equalize_diagonal(svd_beamformer(h, n, rank_tolerance));
}

}  // namespace mimo
