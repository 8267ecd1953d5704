// Copyright 2026 The cpcalc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Dense complex-matrix kernel shared by every other module.
//
// Conventions:
//  - Kronecker index convention: (a ⊗ b)[(i,k),(j,l)] = a[i,j] b[k,l] with the
//    composite index (i,k) -> i * b.rows() + k.
//  - vec is row-major stacking: vec(X)[i * cols + j] = X[i,j], so that
//    vec(A X B) = (A ⊗ Bᵀ) vec(X).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "cpcalc/errors.hpp"

namespace cpcalc {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

namespace tol {
inline constexpr double psd = 1e-9;
inline constexpr double herm = 1e-8;
inline constexpr double recon = 1e-9;
inline constexpr double rank = 1e-10;
inline constexpr double phase = 1e-8;
// Eigenvalues closer than this (relative to the spectral radius) are treated
// as one degenerate cluster when choosing a canonical eigenbasis.
inline constexpr double cluster = 1e-11;
}  // namespace tol

inline constexpr Index kDefaultMaxDim = Index{1} << 14;

/// Reconstruction tolerance scaled by the magnitude of the reference value.
inline double recon_tol(double norm) { return tol::recon * std::max(1.0, norm); }

inline bool all_finite(const CMatrix& m) {
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i)
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
  return true;
}

inline void require_finite(const CMatrix& m, const char* what) {
  if (!all_finite(m)) throw Error(ErrorKind::NotFinite, std::string(what) + " has non-finite entries");
}

inline void require_square(const CMatrix& m, const char* what) {
  if (m.rows() != m.cols())
    throw Error(ErrorKind::ShapeMismatch, std::string(what) + " must be square, got " +
                                              std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
}

/// Builds a matrix from row-major entries, rejecting NaN/Inf.
inline CMatrix make_matrix(Index rows, Index cols, std::span<const Complex> row_major) {
  if (rows <= 0 || cols <= 0) throw Error(ErrorKind::ShapeMismatch, "matrix dimensions must be positive");
  if (static_cast<Index>(row_major.size()) != rows * cols)
    throw Error(ErrorKind::ShapeMismatch, "expected " + std::to_string(rows * cols) + " entries, got " +
                                              std::to_string(row_major.size()));
  CMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = row_major[static_cast<std::size_t>(i * cols + j)];
  require_finite(m, "matrix");
  return m;
}

inline CMatrix identity(Index d) { return CMatrix::Identity(d, d); }

inline CMatrix diag(std::initializer_list<Complex> entries) {
  CMatrix m = CMatrix::Zero(static_cast<Index>(entries.size()), static_cast<Index>(entries.size()));
  Index k = 0;
  for (const auto& e : entries) {
    m(k, k) = e;
    ++k;
  }
  return m;
}

inline CMatrix tensor(const CMatrix& a, const CMatrix& b, Index max_dim = kDefaultMaxDim) {
  const Index rows = a.rows() * b.rows();
  const Index cols = a.cols() * b.cols();
  if (rows > max_dim || cols > max_dim)
    throw Error(ErrorKind::DimensionLimit, "tensor product of shape " + std::to_string(rows) + "x" +
                                               std::to_string(cols) + " exceeds limit " +
                                               std::to_string(max_dim));
  CMatrix out(rows, cols);
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

enum class Factor { First, Second };

/// Partial trace of an operator on C^d1 ⊗ C^d2 over the named factor.
inline CMatrix partial_trace(const CMatrix& m, Factor over, Index d1, Index d2) {
  if (d1 <= 0 || d2 <= 0 || m.rows() != d1 * d2 || m.cols() != d1 * d2)
    throw Error(ErrorKind::ShapeMismatch, "partial_trace: operator side " + std::to_string(m.rows()) +
                                              "x" + std::to_string(m.cols()) + " does not match " +
                                              std::to_string(d1) + "*" + std::to_string(d2));
  if (over == Factor::Second) {
    CMatrix out = CMatrix::Zero(d1, d1);
    for (Index i = 0; i < d1; ++i)
      for (Index j = 0; j < d1; ++j) out(i, j) = m.block(i * d2, j * d2, d2, d2).trace();
    return out;
  }
  CMatrix out = CMatrix::Zero(d2, d2);
  for (Index a = 0; a < d1; ++a) out += m.block(a * d2, a * d2, d2, d2);
  return out;
}

inline CVector vec(const CMatrix& x) {
  CVector v(x.size());
  for (Index i = 0; i < x.rows(); ++i)
    for (Index j = 0; j < x.cols(); ++j) v(i * x.cols() + j) = x(i, j);
  return v;
}

inline CMatrix unvec(const CVector& v, Index rows, Index cols) {
  if (v.size() != rows * cols)
    throw Error(ErrorKind::ShapeMismatch, "unvec: vector length " + std::to_string(v.size()) +
                                              " != " + std::to_string(rows) + "*" + std::to_string(cols));
  CMatrix x(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) x(i, j) = v(i * cols + j);
  return x;
}

inline RVector singular_values(const CMatrix& m) {
  if (m.size() == 0) return RVector();
  return Eigen::JacobiSVD<CMatrix>(m).singularValues();
}

inline double op_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  return singular_values(m)(0);
}

inline double trace_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  return singular_values(m).sum();
}

inline CMatrix hermitian_part(const CMatrix& m) { return (m + m.adjoint()) / 2.0; }

/// Spectral decomposition of a Hermitian matrix with a deterministic basis.
///
/// Eigenvalues are descending. Within a degenerate cluster the basis is built
/// by Gram-Schmidt over the columns of the cluster projector (largest residual
/// first, lowest column index on ties), so the result does not depend on which
/// eigenbasis the solver happened to return. Each eigenvector is then
/// phase-fixed: its first component of modulus above tol::phase is real and
/// positive.
struct HermEig {
  RVector values;
  CMatrix vectors;
};

namespace detail {

inline void fix_phase(Eigen::Ref<CVector> v) {
  for (Index k = 0; k < v.size(); ++k) {
    const double mod = std::abs(v(k));
    if (mod > tol::phase) {
      v *= std::conj(v(k)) / mod;
      v(k) = Complex(mod, 0.0);
      return;
    }
  }
}

// Orthonormal basis of the range of a projector, deterministic in P only.
inline CMatrix projector_basis(const CMatrix& p, Index count) {
  const Index d = p.rows();
  CMatrix basis(d, count);
  CMatrix residual = p;
  for (Index k = 0; k < count; ++k) {
    RVector norms = residual.colwise().norm().transpose();
    const double best = norms.maxCoeff();
    Index pick = 0;
    for (Index j = 0; j < d; ++j) {
      if (norms(j) >= best * (1.0 - 1e-9)) {
        pick = j;
        break;
      }
    }
    CVector u = residual.col(pick) / norms(pick);
    // One re-orthogonalization pass against earlier vectors.
    for (Index q = 0; q < k; ++q) u -= basis.col(q) * basis.col(q).dot(u);
    u.normalize();
    basis.col(k) = u;
    residual -= u * (u.adjoint() * residual);
  }
  return basis;
}

}  // namespace detail

inline HermEig herm_eig(const CMatrix& m) {
  require_square(m, "herm_eig input");
  require_finite(m, "herm_eig input");
  const Index d = m.rows();
  if (d == 0) return {RVector(), CMatrix(0, 0)};
  const double scale = op_norm(m);
  if (op_norm(m - m.adjoint()) > tol::herm * scale)
    throw Error(ErrorKind::NotHermitian, "matrix deviates from Hermitian beyond tolerance");
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian_part(m));
  RVector values = solver.eigenvalues().reverse();
  CMatrix vectors = solver.eigenvectors().rowwise().reverse();

  const double gap = tol::cluster * std::max(1.0, std::abs(values(0)) + std::abs(values(d - 1)));
  Index start = 0;
  while (start < d) {
    Index end = start + 1;
    while (end < d && values(end - 1) - values(end) <= gap) ++end;
    const Index count = end - start;
    if (count > 1) {
      const CMatrix block = vectors.middleCols(start, count);
      vectors.middleCols(start, count) = detail::projector_basis(block * block.adjoint(), count);
    }
    start = end;
  }
  for (Index k = 0; k < d; ++k) detail::fix_phase(vectors.col(k));
  return {std::move(values), std::move(vectors)};
}

inline double min_eigenvalue(const CMatrix& h) {
  if (h.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian_part(h), Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

inline double max_eigenvalue(const CMatrix& h) {
  if (h.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian_part(h), Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(h.rows() - 1);
}

/// a ≤ b in the Loewner order, up to tol relative to max(1, ‖b − a‖).
inline bool psd_leq(const CMatrix& a, const CMatrix& b, double tolerance = tol::psd) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error(ErrorKind::ShapeMismatch, "psd_leq operands differ in shape");
  require_square(a, "psd_leq operand");
  const CMatrix diff = hermitian_part(b - a);
  return min_eigenvalue(diff) >= -tolerance * std::max(1.0, op_norm(diff));
}

inline bool is_psd(const CMatrix& m, double tolerance = tol::psd) {
  return psd_leq(CMatrix::Zero(m.rows(), m.cols()), m, tolerance);
}

/// Moore-Penrose pseudo-inverse; singular values below rank_tol·σ_max are
/// treated as zero.
inline CMatrix pinv(const CMatrix& m, double rank_tol = tol::rank) {
  if (m.size() == 0) return CMatrix::Zero(m.cols(), m.rows());
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVector& s = svd.singularValues();
  const double cutoff = rank_tol * s(0);
  RVector inv = RVector::Zero(s.size());
  for (Index k = 0; k < s.size(); ++k)
    if (s(k) > cutoff && s(k) > 0.0) inv(k) = 1.0 / s(k);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

/// Hermitizes m and zeroes eigenvalues in [−threshold, 0); anything more
/// negative is NotPsd.
inline CMatrix psd_clip(const CMatrix& m, double threshold) {
  require_square(m, "psd_clip input");
  if (m.rows() == 0) return m;
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian_part(m));
  RVector values = solver.eigenvalues();
  if (values(0) < -threshold)
    throw Error(ErrorKind::NotPsd, "eigenvalue " + std::to_string(values(0)) + " below -" +
                                       std::to_string(threshold));
  values = values.cwiseMax(0.0);
  return solver.eigenvectors() * values.asDiagonal() * solver.eigenvectors().adjoint();
}

inline CMatrix psd_sqrt(const CMatrix& m) {
  require_square(m, "psd_sqrt input");
  if (m.rows() == 0) return m;
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian_part(m));
  RVector values = solver.eigenvalues();
  const double scale = std::max(std::abs(values(0)), std::abs(values(values.size() - 1)));
  if (values(0) < -tol::psd * scale)
    throw Error(ErrorKind::NotPsd, "psd_sqrt: eigenvalue " + std::to_string(values(0)));
  values = values.cwiseMax(0.0).cwiseSqrt();
  return solver.eigenvectors() * values.asDiagonal() * solver.eigenvectors().adjoint();
}

/// Number of eigenvalues ≥ rank_tol·λ_max of a PSD matrix.
inline Index psd_rank(const CMatrix& m, double rank_tol = tol::rank) {
  if (m.rows() == 0) return 0;
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian_part(m), Eigen::EigenvaluesOnly);
  const RVector& values = solver.eigenvalues();
  const double top = values(values.size() - 1);
  if (!(top > std::numeric_limits<double>::min())) return 0;
  return static_cast<Index>((values.array() >= rank_tol * top).count());
}

inline CMatrix transpose(const CMatrix& m) { return m.transpose(); }

namespace pauli {
inline CMatrix x() { return (CMatrix(2, 2) << 0, 1, 1, 0).finished(); }
inline CMatrix y() {
  return (CMatrix(2, 2) << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0)).finished();
}
inline CMatrix z() { return (CMatrix(2, 2) << 1, 0, 0, -1).finished(); }
}  // namespace pauli

}  // namespace cpcalc
