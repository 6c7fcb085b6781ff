#pragma once

// Dense complex linear algebra used by the beamforming chain.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace mimo {

using cplx = std::complex<double>;

/// Dense row-major complex matrix. Always at least 1x1 and always finite.
class ComplexMatrix {
 public:
  /// Zero matrix.
  ComplexMatrix(std::size_t rows, std::size_t cols);
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries);

  static ComplexMatrix identity(std::size_t n);
  /// rows x cols matrix with `diag` on the main diagonal (extra entries zero).
  static ComplexMatrix diagonal(std::span<const double> diag, std::size_t rows,
                                std::size_t cols);
  static ComplexMatrix from_rows(std::initializer_list<std::initializer_list<cplx>> rows);
  static ComplexMatrix column_vector(std::span<const cplx> v);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  cplx& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const noexcept {
    return data_[i * cols_ + j];
  }

  std::span<const cplx> entries() const noexcept { return data_; }

  /// First `n` columns as a rows x n matrix.
  ComplexMatrix leading_columns(std::size_t n) const;
  std::vector<cplx> column(std::size_t j) const;

  void swap_rows(std::size_t a, std::size_t b) noexcept;
  void swap_cols(std::size_t a, std::size_t b) noexcept;

  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<cplx> data_;
};

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);
/// a * x for a column vector x.
std::vector<cplx> matvec(const ComplexMatrix& a, std::span<const cplx> x);
/// a^H * x without forming a^H.
std::vector<cplx> adjoint_matvec(const ComplexMatrix& a, std::span<const cplx> x);
ComplexMatrix conj_transpose(const ComplexMatrix& a);
ComplexMatrix subtract(const ComplexMatrix& a, const ComplexMatrix& b);
double frobenius_norm(const ComplexMatrix& a);

/// ||a^H a - I||_F for square a.
double unitarity_defect(const ComplexMatrix& a);
/// ||a^H a - I_cols||_F for any shape; zero iff the columns are orthonormal.
double orthonormality_defect(const ComplexMatrix& a);

/// Rotation acting on coordinates (i, j):
///   x_i' =  c x_i + s x_j
///   x_j' = -conj(s) x_i + c x_j
/// with real c, so that c^2 + |s|^2 = 1 makes it unitary with determinant one.
struct GivensRotation {
  std::size_t i = 0;
  std::size_t j = 1;
  double c = 1.0;
  cplx s = 0.0;
};

/// Rotation parameters mapping (a, b) to (rho * a/|a|, 0) with rho = hypot(|a|, |b|).
/// When a is zero the image is (|b|, 0); when both are zero the identity is returned.
GivensRotation givens_zeroing(cplx a, cplx b, std::size_t i = 0, std::size_t j = 1);

/// Rows i, j of `a` are replaced by G applied to them (a <- G a).
void rotate_rows(ComplexMatrix& a, const GivensRotation& g) noexcept;
/// Columns i, j of `a` are replaced so that a <- a G^H.
void rotate_cols_adjoint(ComplexMatrix& a, const GivensRotation& g) noexcept;

struct SvdResult {
  ComplexMatrix u;             // rows x rows, unitary
  std::vector<double> deltas;  // min(rows, cols), non-increasing, non-negative
  ComplexMatrix v;             // cols x cols, unitary
};

/// Full singular value decomposition a = u * diag(deltas) * v^H by one-sided
/// (Hestenes) Jacobi. Throws NumericalFailure if the sweep budget runs out.
SvdResult svd(const ComplexMatrix& a);

}  // namespace mimo
