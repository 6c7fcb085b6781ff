#pragma once

// Reference computations written independently of the library, used as test
// oracles. They favour obviousness over speed.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "mimo/matcore.hpp"

namespace oracle {

using mimo::ComplexMatrix;
using mimo::cplx;

// iid CN(0, 1) entries from a generator unrelated to the library's streams.
inline ComplexMatrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937 gen(static_cast<std::uint32_t>(seed * 2654435761u + 12345u));
  std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
  std::vector<cplx> e(rows * cols);
  for (cplx& z : e) z = cplx(nd(gen), nd(gen));
  return ComplexMatrix(rows, cols, std::move(e));
}

// Naive triple loop.
inline ComplexMatrix product(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      cplx s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      c(i, j) = s;
    }
  return c;
}

inline ComplexMatrix adjoint(const ComplexMatrix& a) {
  ComplexMatrix c(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(j, i) = std::conj(a(i, j));
  return c;
}

inline double frob_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) s += std::norm(a(i, j) - b(i, j));
  return std::sqrt(s);
}

// Eigenvalues of a real symmetric matrix by the classical cyclic Jacobi method,
// sorted descending.
inline std::vector<double> symmetric_eigenvalues(std::vector<std::vector<double>> a) {
  const std::size_t n = a.size();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {  // A <- A J
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {  // A <- J^T A
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a[i][i];
  std::sort(ev.begin(), ev.end(), std::greater<>());
  return ev;
}

// Eigenvalues of A^H A through the real embedding [[Re, -Im], [Im, Re]] of the
// Hermitian product; every eigenvalue appears twice there.
inline std::vector<double> gram_eigenvalues(const ComplexMatrix& a) {
  const ComplexMatrix g = product(adjoint(a), a);
  const std::size_t n = g.rows();
  std::vector<std::vector<double>> r(2 * n, std::vector<double>(2 * n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      r[i][j] = r[i + n][j + n] = g(i, j).real();
      r[i][j + n] = -g(i, j).imag();
      r[i + n][j] = g(i, j).imag();
    }
  const std::vector<double> doubled = symmetric_eigenvalues(r);
  std::vector<double> ev;
  for (std::size_t i = 0; i < doubled.size(); i += 2) ev.push_back(doubled[i]);
  return ev;
}

// |det(a)| by Gaussian elimination with partial pivoting.
inline double abs_det(ComplexMatrix a) {
  const std::size_t n = a.rows();
  double det = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
    if (piv != k) a.swap_rows(piv, k);
    const cplx d = a(k, k);
    if (d == cplx(0.0)) return 0.0;
    det *= std::abs(d);
    for (std::size_t i = k + 1; i < n; ++i) {
      const cplx f = a(i, k) / d;
      for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
    }
  }
  return det;
}

}  // namespace oracle
