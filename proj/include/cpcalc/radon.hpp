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

// Complete domination and Radon-Nikodym derivatives.
//
// S ≤ T (T − S is CP) is decided by the Choi order. When S ≤ T, there is a
// unique positive contraction F on the environment E of the canonical
// dilation V of T with S(A) = V*(A ⊗ F)V. With the canonical Kraus set
// {V_x} of T as the basis of E this reads S(A) = Σ_xy F[x,y] V_x* A V_y,
// so F doubles as the kernel K(x,y) and its spectral decomposition gives a
// rescaled Kraus form of S inside a Kraus decomposition of T.
//
// Algorithm: with W the matrix whose columns are vec(V_x*), the unnormalized
// Choi matrices satisfy C_T = W W* and C_S = W F W*, hence F = W⁺ C_S (W⁺)*.
// If C_S has weight outside the range of W, the reconstruction residual
// exposes it and S is reported as not dominated.

#include <string>
#include <vector>

#include "cpcalc/cpmap.hpp"

namespace cpcalc {

struct RnDerivative {
  CMatrix f;
  Index env_dim = 0;
  Index dim_in = 0;
  Index dim_out = 0;
};

struct KernelMatrix {
  CMatrix k;
};

struct RescaledKraus {
  std::vector<CMatrix> w;
  std::vector<double> lambda;
};

struct PovmDecomposition {
  std::vector<CMatrix> elements;
};

/// Canonical Kraus data of a dominating map, reused across derivatives.
class Dominator {
 public:
  explicit Dominator(const CpMap& t) : dim_in_(t.dim_in()), dim_out_(t.dim_out()) {
    kraus_ = canonical_kraus(to_choi(t));
    const Index d = static_cast<Index>(kraus_.size());
    w_ = CMatrix::Zero(dim_in_ * dim_out_, d);
    for (Index x = 0; x < d; ++x) w_.col(x) = vec(kraus_[static_cast<std::size_t>(x)].adjoint());
    w_pinv_ = pinv(w_);
  }

  Index dim_in() const noexcept { return dim_in_; }
  Index dim_out() const noexcept { return dim_out_; }
  Index env_dim() const noexcept { return static_cast<Index>(kraus_.size()); }
  const std::vector<CMatrix>& kraus() const noexcept { return kraus_; }
  const CMatrix& w() const noexcept { return w_; }

  StinespringDilation dilation() const { return stack_kraus(dim_in_, dim_out_, kraus_, true); }

  /// 0 ≤ F ≤ c with S(A) = V*(A ⊗ F)V, or NotDominated.
  RnDerivative derivative(const CpMap& s, double c = 1.0) const {
    if (s.dim_in() != dim_in_ || s.dim_out() != dim_out_)
      throw Error(ErrorKind::DimMismatch, "rn_derivative: maps act between different algebras");
    const CMatrix cs = choi_unnormalized(s);
    const double scale = op_norm(cs);
    const Index d = env_dim();
    if (d == 0) {
      if (scale > recon_tol(0.0)) throw Error(ErrorKind::NotDominated, "dominating map is zero");
      return {CMatrix(0, 0), 0, dim_in_, dim_out_};
    }
    CMatrix f = hermitian_part(w_pinv_ * cs * w_pinv_.adjoint());
    const double residual = op_norm(w_ * f * w_.adjoint() - cs);
    if (residual > recon_tol(scale))
      throw Error(ErrorKind::NotDominated,
                  "Choi support of S escapes that of T (residual " + std::to_string(residual) + ")");
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(f, Eigen::EigenvaluesOnly);
    const double lo = solver.eigenvalues()(0);
    const double hi = solver.eigenvalues()(d - 1);
    if (lo < -tol::psd || hi > c + tol::psd * std::max(1.0, c))
      throw Error(ErrorKind::NotDominated, "derivative spectrum [" + std::to_string(lo) + ", " +
                                               std::to_string(hi) + "] escapes [0, " + std::to_string(c) + "]");
    return {std::move(f), d, dim_in_, dim_out_};
  }

  /// V*(A ⊗ F)V returned in canonical Kraus form.
  CpMap reconstruct(const CMatrix& f) const {
    const Index d = env_dim();
    if (f.rows() != d || f.cols() != d)
      throw Error(ErrorKind::ShapeMismatch, "derivative must be " + std::to_string(d) + "x" + std::to_string(d));
    if (d == 0) return zero_map(dim_in_, dim_out_);
    require_finite(f, "derivative");
    if (!is_psd(f)) throw Error(ErrorKind::NotPsd, "derivative is not positive semidefinite");
    const CMatrix choi = static_cast<double>(dim_in_) * (w_ * hermitian_part(f) * w_.adjoint());
    return from_choi(ChoiOperator(choi, dim_in_, dim_out_));
  }

 private:
  Index dim_in_;
  Index dim_out_;
  std::vector<CMatrix> kraus_;
  CMatrix w_;
  CMatrix w_pinv_;
};

inline bool dominates(const CpMap& s, const CpMap& t, double tolerance = tol::psd) {
  require_same_dims(s, t);
  return psd_leq(to_choi(s).matrix(), to_choi(t).matrix(), tolerance);
}

/// Derivative of s with respect to t. With c > 1 the result is the
/// derivative for S ≤ cT expressed on T's environment, so 0 ≤ F ≤ c.
inline RnDerivative rn_derivative(const CpMap& s, const CpMap& t, double c = 1.0) {
  require_same_dims(s, t);
  return Dominator(t).derivative(s, c);
}

inline CpMap rn_reconstruct(const CpMap& t, const RnDerivative& f) {
  if (f.dim_in != 0 && (f.dim_in != t.dim_in() || f.dim_out != t.dim_out()))
    throw Error(ErrorKind::ShapeMismatch, "derivative belongs to a map between other algebras");
  return Dominator(t).reconstruct(f.f);
}

inline CpMap rn_reconstruct(const CpMap& t, const CMatrix& f) { return Dominator(t).reconstruct(f); }

inline KernelMatrix kernel_form(const CpMap& s, const CpMap& t) { return {rn_derivative(s, t).f}; }

/// Σ_xy K(x,y) V_x* A V_y over t's canonical Kraus set.
inline CMatrix apply_kernel(const CpMap& t, const KernelMatrix& k, const CMatrix& a) {
  const auto kraus = canonical_kraus(to_choi(t));
  const Index d = static_cast<Index>(kraus.size());
  if (k.k.rows() != d || k.k.cols() != d) throw Error(ErrorKind::ShapeMismatch, "kernel size mismatch");
  CMatrix out = CMatrix::Zero(t.dim_out(), t.dim_out());
  for (Index x = 0; x < d; ++x)
    for (Index y = 0; y < d; ++y)
      out.noalias() += k.k(x, y) * (kraus[static_cast<std::size_t>(x)].adjoint() * a * kraus[static_cast<std::size_t>(y)]);
  return out;
}

/// T = Σ W_x* · W_x and S = Σ λ_x W_x* · W_x, λ descending in [0, 1].
inline RescaledKraus rescaled_kraus(const CpMap& s, const CpMap& t) {
  const Dominator dom(t);
  const RnDerivative f = dom.derivative(s);
  const Index d = f.env_dim;
  RescaledKraus out;
  if (d == 0) {
    out.w.push_back(CMatrix::Zero(t.dim_in(), t.dim_out()));
    out.lambda.push_back(0.0);
    return out;
  }
  const HermEig eig = herm_eig(f.f);
  for (Index x = 0; x < d; ++x) {
    double lam = eig.values(x);
    if (lam < -tol::psd || lam > 1.0 + tol::psd)
      throw Error(ErrorKind::NotDominated, "rescaling factor " + std::to_string(lam) + " outside [0, 1]");
    lam = std::clamp(lam, 0.0, 1.0);
    CMatrix w = CMatrix::Zero(t.dim_in(), t.dim_out());
    for (Index z = 0; z < d; ++z) w += std::conj(eig.vectors(z, x)) * dom.kraus()[static_cast<std::size_t>(z)];
    out.w.push_back(std::move(w));
    out.lambda.push_back(lam);
  }
  return out;
}

/// Derivatives of the summands of a decomposition t = Σ_i parts_i. They form
/// a resolution of the identity on t's environment.
inline PovmDecomposition instrument_rn(const CpMap& t, const std::vector<CpMap>& parts) {
  if (parts.empty()) throw Error(ErrorKind::NotADecomposition, "no parts given");
  const CMatrix target = to_choi(t).matrix();
  CMatrix total = CMatrix::Zero(target.rows(), target.cols());
  for (const auto& p : parts) {
    require_same_dims(p, t);
    total += to_choi(p).matrix();
  }
  const double mismatch = op_norm(total - target);
  if (mismatch > recon_tol(op_norm(target)))
    throw Error(ErrorKind::NotADecomposition, "parts do not sum to the map (deviation " +
                                                  std::to_string(mismatch) + ")");
  const Dominator dom(t);
  PovmDecomposition out;
  for (const auto& p : parts) out.elements.push_back(dom.derivative(p).f);
  return out;
}

}  // namespace cpcalc
