#include "mimo/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "mimo/errors.hpp"
#include "mimo/tolerances.hpp"

namespace mimo {

namespace {

bool all_finite(std::span<const cplx> v) {
  return std::all_of(v.begin(), v.end(), [](const cplx& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

std::string dims(const ComplexMatrix& a) {
  return std::to_string(a.rows()) + "x" + std::to_string(a.cols());
}

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols) {
  if (rows == 0 || cols == 0) throw InvalidInput("ComplexMatrix: dimensions must be >= 1");
}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (rows == 0 || cols == 0) throw InvalidInput("ComplexMatrix: dimensions must be >= 1");
  if (data_.size() != rows * cols) {
    throw InvalidInput("ComplexMatrix: expected " + std::to_string(rows * cols) +
                       " entries, got " + std::to_string(data_.size()));
  }
  if (!all_finite(data_)) throw InvalidInput("ComplexMatrix: non-finite entry");
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> diag, std::size_t rows,
                                      std::size_t cols) {
  ComplexMatrix m(rows, cols);
  if (diag.size() > std::min(rows, cols)) throw InvalidInput("diagonal: too many entries");
  for (std::size_t i = 0; i < diag.size(); ++i) {
    if (!std::isfinite(diag[i])) throw InvalidInput("diagonal: non-finite entry");
    m(i, i) = diag[i];
  }
  return m;
}

ComplexMatrix ComplexMatrix::from_rows(
    std::initializer_list<std::initializer_list<cplx>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r ? rows.begin()->size() : 0;
  std::vector<cplx> entries;
  entries.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw InvalidInput("from_rows: ragged rows");
    entries.insert(entries.end(), row.begin(), row.end());
  }
  return ComplexMatrix(r, c, std::move(entries));
}

ComplexMatrix ComplexMatrix::column_vector(std::span<const cplx> v) {
  return ComplexMatrix(v.size(), 1, std::vector<cplx>(v.begin(), v.end()));
}

ComplexMatrix ComplexMatrix::leading_columns(std::size_t n) const {
  if (n == 0 || n > cols_) throw InvalidInput("leading_columns: bad column count");
  ComplexMatrix out(rows_, n);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < n; ++j) out(i, j) = (*this)(i, j);
  return out;
}

std::vector<cplx> ComplexMatrix::column(std::size_t j) const {
  std::vector<cplx> out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
  return out;
}

void ComplexMatrix::swap_rows(std::size_t a, std::size_t b) noexcept {
  if (a == b) return;
  std::swap_ranges(data_.begin() + a * cols_, data_.begin() + (a + 1) * cols_,
                   data_.begin() + b * cols_);
}

void ComplexMatrix::swap_cols(std::size_t a, std::size_t b) noexcept {
  if (a == b) return;
  for (std::size_t i = 0; i < rows_; ++i) std::swap((*this)(i, a), (*this)(i, b));
}

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) {
    throw InvalidInput("matmul: dimension mismatch " + dims(a) + " * " + dims(b));
  }
  ComplexMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const cplx aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

std::vector<cplx> matvec(const ComplexMatrix& a, std::span<const cplx> x) {
  if (a.cols() != x.size()) throw InvalidInput("matvec: dimension mismatch");
  std::vector<cplx> y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    cplx acc = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) acc += a(i, j) * x[j];
    y[i] = acc;
  }
  return y;
}

std::vector<cplx> adjoint_matvec(const ComplexMatrix& a, std::span<const cplx> x) {
  if (a.rows() != x.size()) throw InvalidInput("adjoint_matvec: dimension mismatch");
  std::vector<cplx> y(a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) y[j] += std::conj(a(i, j)) * x[i];
  return y;
}

ComplexMatrix conj_transpose(const ComplexMatrix& a) {
  ComplexMatrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = std::conj(a(i, j));
  return out;
}

ComplexMatrix subtract(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw InvalidInput("subtract: dimension mismatch " + dims(a) + " - " + dims(b));
  }
  ComplexMatrix out = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) -= b(i, j);
  return out;
}

double frobenius_norm(const ComplexMatrix& a) {
  double acc = 0.0;
  for (const cplx& z : a.entries()) acc += std::norm(z);
  return std::sqrt(acc);
}

double orthonormality_defect(const ComplexMatrix& a) {
  double acc = 0.0;
  for (std::size_t p = 0; p < a.cols(); ++p) {
    for (std::size_t q = 0; q < a.cols(); ++q) {
      cplx g = 0.0;
      for (std::size_t i = 0; i < a.rows(); ++i) g += std::conj(a(i, p)) * a(i, q);
      if (p == q) g -= 1.0;
      acc += std::norm(g);
    }
  }
  return std::sqrt(acc);
}

double unitarity_defect(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) throw InvalidInput("unitarity_defect: matrix must be square");
  return orthonormality_defect(a);
}

GivensRotation givens_zeroing(cplx a, cplx b, std::size_t i, std::size_t j) {
  GivensRotation g{i, j, 1.0, 0.0};
  const double abs_a = std::abs(a);
  const double abs_b = std::abs(b);
  if (abs_b == 0.0) return g;
  const double rho = std::hypot(abs_a, abs_b);
  if (abs_a == 0.0) {
    g.c = 0.0;
    g.s = std::conj(b) / abs_b;
    return g;
  }
  g.c = abs_a / rho;
  g.s = (a / abs_a) * std::conj(b) / rho;
  return g;
}

void rotate_rows(ComplexMatrix& a, const GivensRotation& g) noexcept {
  for (std::size_t k = 0; k < a.cols(); ++k) {
    const cplx xi = a(g.i, k);
    const cplx xj = a(g.j, k);
    a(g.i, k) = g.c * xi + g.s * xj;
    a(g.j, k) = -std::conj(g.s) * xi + g.c * xj;
  }
}

void rotate_cols_adjoint(ComplexMatrix& a, const GivensRotation& g) noexcept {
  // (a G^H)[:, i] = c a_i + conj(s) a_j ; (a G^H)[:, j] = -s a_i + c a_j
  for (std::size_t k = 0; k < a.rows(); ++k) {
    const cplx xi = a(k, g.i);
    const cplx xj = a(k, g.j);
    a(k, g.i) = g.c * xi + std::conj(g.s) * xj;
    a(k, g.j) = -g.s * xi + g.c * xj;
  }
}

namespace {

// Column-major scratch for the Jacobi sweeps.
struct Columns {
  std::size_t rows;
  std::size_t cols;
  std::vector<cplx> data;

  cplx* col(std::size_t j) { return data.data() + j * rows; }
  const cplx* col(std::size_t j) const { return data.data() + j * rows; }
};

// Extends the first `have` orthonormal columns of u (rows x rows) to a unitary
// basis, filling columns whose index is flagged in `missing`.
void complete_basis(ComplexMatrix& u, const std::vector<bool>& missing) {
  const std::size_t m = u.rows();
  std::vector<bool> filled(m);
  for (std::size_t j = 0; j < m; ++j) filled[j] = !missing[j];

  for (std::size_t target = 0; target < m; ++target) {
    if (filled[target]) continue;
    std::vector<cplx> best;
    double best_norm = -1.0;
    for (std::size_t e = 0; e < m; ++e) {
      std::vector<cplx> cand(m, 0.0);
      cand[e] = 1.0;
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t j = 0; j < m; ++j) {
          if (!filled[j]) continue;
          cplx proj = 0.0;
          for (std::size_t i = 0; i < m; ++i) proj += std::conj(u(i, j)) * cand[i];
          for (std::size_t i = 0; i < m; ++i) cand[i] -= proj * u(i, j);
        }
      }
      double nrm = 0.0;
      for (const cplx& z : cand) nrm += std::norm(z);
      nrm = std::sqrt(nrm);
      if (nrm > best_norm * (1.0 + 1e-12)) {
        best_norm = nrm;
        best = std::move(cand);
      }
    }
    for (std::size_t i = 0; i < m; ++i) u(i, target) = best[i] / best_norm;
    filled[target] = true;
  }
}

SvdResult svd_tall(const ComplexMatrix& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();

  Columns w{m, n, std::vector<cplx>(m * n)};
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < m; ++i) w.col(j)[i] = a(i, j);
  Columns v{n, n, std::vector<cplx>(n * n)};
  for (std::size_t j = 0; j < n; ++j) v.col(j)[j] = 1.0;

  bool converged = false;
  for (int sweep = 0; sweep < tol::kJacobiMaxSweeps && !converged; ++sweep) {
    converged = true;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        cplx* wp = w.col(p);
        cplx* wq = w.col(q);
        double alpha = 0.0;
        double beta = 0.0;
        cplx gamma = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          alpha += std::norm(wp[i]);
          beta += std::norm(wq[i]);
          gamma += std::conj(wp[i]) * wq[i];
        }
        const double g = std::abs(gamma);
        if (g == 0.0 || g <= tol::kJacobiOrthogonality * std::sqrt(alpha * beta)) continue;
        converged = false;

        // Phase-align column q so the 2x2 Gram block is real, then rotate.
        const cplx phase = std::conj(gamma / g);
        const double zeta = (beta - alpha) / (2.0 * g);
        // sqrt(1 + zeta^2) may overflow to inf, which still gives the right t = 0.
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < m; ++i) {
          const cplx xp = wp[i];
          const cplx xq = wq[i] * phase;
          wp[i] = c * xp - s * xq;
          wq[i] = s * xp + c * xq;
        }
        cplx* vp = v.col(p);
        cplx* vq = v.col(q);
        for (std::size_t i = 0; i < n; ++i) {
          const cplx xp = vp[i];
          const cplx xq = vq[i] * phase;
          vp[i] = c * xp - s * xq;
          vq[i] = s * xp + c * xq;
        }
      }
    }
  }
  if (!converged) {
    throw NumericalFailure("svd: one-sided Jacobi did not converge in " +
                           std::to_string(tol::kJacobiMaxSweeps) + " sweeps");
  }

  std::vector<double> sigma(n);
  for (std::size_t j = 0; j < n; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) acc += std::norm(w.col(j)[i]);
    sigma[j] = std::sqrt(acc);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

  SvdResult out{ComplexMatrix(m, m), std::vector<double>(n), ComplexMatrix(n, n)};
  const double sigma_max = sigma[order[0]];
  const double negligible = sigma_max * static_cast<double>(m) * 1e-15;
  std::vector<bool> missing(m, true);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = order[k];
    out.deltas[k] = sigma[j];
    for (std::size_t i = 0; i < n; ++i) out.v(i, k) = v.col(j)[i];
    if (sigma[j] > negligible && sigma[j] > 0.0) {
      for (std::size_t i = 0; i < m; ++i) out.u(i, k) = w.col(j)[i] / sigma[j];
      missing[k] = false;
    }
  }
  complete_basis(out.u, missing);
  return out;
}

}  // namespace

SvdResult svd(const ComplexMatrix& a) {
  if (a.rows() >= a.cols()) return svd_tall(a);
  // a^H = U' S V'^H  =>  a = V' S U'^H
  SvdResult t = svd_tall(conj_transpose(a));
  return SvdResult{std::move(t.v), std::move(t.deltas), std::move(t.u)};
}

}  // namespace mimo
