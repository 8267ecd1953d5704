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

// Jamiolkowski correspondence relative to the reference channel
// Φ_{m,n}(A) = (tr A / m) 1_n, whose canonical dilation has environment
// K ⊗ H. Every CP map T: M_m -> M_n satisfies T ≤ m²Φ and its derivative
// with respect to Φ is F_T itself, so F_T determines T through
//     T(A) = (1/m) tr_H[(1_K ⊗ Aᵀ) F_T],
// with the transpose taken in the standard basis.
//
// A faithful state ω(A) = Σ p_i ⟨e_i|A e_i⟩ replaces the trace by
// Φ_ω(A) = ω(A) 1_n; the corresponding operator F_{T,ω} has entries
// ⟨f_μ⊗e_i|F|f_ν⊗e_j⟩ = ⟨f_μ|T(|e_i⟩⟨e_j|)f_ν⟩ / sqrt(p_i p_j).

#include <cmath>
#include <string>
#include <vector>

#include "cpcalc/radon.hpp"

namespace cpcalc {

struct ReferenceChannel {
  Index m = 0;
  Index n = 0;
  CpMap map;
};

/// Kraus operators V_{iμ} = m^{-1/2} |e_i⟩⟨f_μ| ordered by (μ, i) -> μ*m + i,
/// matching the K ⊗ H layout of Choi operators.
inline ReferenceChannel reference_channel(Index m, Index n, Index max_dim = kDefaultMaxDim) {
  if (m < 1 || n < 1) throw Error(ErrorKind::InvalidArgument, "reference channel needs m, n >= 1");
  if (m * n > max_dim) throw Error(ErrorKind::DimensionLimit, "m*n exceeds the dimension limit");
  std::vector<CMatrix> kraus;
  kraus.reserve(static_cast<std::size_t>(m * n));
  const double amp = 1.0 / std::sqrt(static_cast<double>(m));
  for (Index mu = 0; mu < n; ++mu)
    for (Index i = 0; i < m; ++i) {
      CMatrix k = CMatrix::Zero(m, n);
      k(i, mu) = amp;
      kraus.push_back(std::move(k));
    }
  return {m, n, CpMap(m, n, std::move(kraus))};
}

/// Throws Inconsistent unless T ≤ m²Φ and D_{m²Φ} T = F_T / m² on the
/// environment K ⊗ H.
inline void jam_consistency_check(const CpMap& t, const ChoiOperator& f) {
  const Index m = t.dim_in();
  const double m2 = static_cast<double>(m * m);
  const CpMap phi = reference_channel(m, t.dim_out()).map;
  // Operations sit below m^2 Phi; every CP map sits below ‖F_T‖ Phi.
  if (is_quantum_operation(t) && !dominates(t, scaled(phi, m2)))
    throw Error(ErrorKind::Inconsistent, "operation is not m^2-dominated by the reference channel");
  const double scale = std::max(1.0, op_norm(f.matrix()));
  const RnDerivative d = rn_derivative(t, phi, std::max(m2, scale * (1 + 1e-9)));
  const double gap = op_norm(d.f - f.matrix());
  if (gap > 1e-9 * scale)
    throw Error(ErrorKind::Inconsistent, "derivative against Phi differs from F_T by " + std::to_string(gap));
}

inline ChoiOperator jam_forward(const CpMap& t) {
  ChoiOperator f = to_choi(t);
#ifndef NDEBUG
  jam_consistency_check(t, f);
#endif
  return f;
}

inline ChoiOperator jam_forward_checked(const CpMap& t) {
  ChoiOperator f = to_choi(t);
  jam_consistency_check(t, f);
  return f;
}

inline CMatrix jam_apply(const ChoiOperator& f, const CMatrix& a) {
  const Index m = f.dim_in();
  const Index n = f.dim_out();
  if (a.rows() != m || a.cols() != m)
    throw Error(ErrorKind::ShapeMismatch, "jam_apply: operand must be " + std::to_string(m) + "x" + std::to_string(m));
  const CMatrix lifted = tensor(identity(n), a.transpose()) * f.matrix();
  return partial_trace(lifted, Factor::Second, n, m) / static_cast<double>(m);
}

/// tr_H F ≤ m·1_K.
inline bool jam_is_operation(const ChoiOperator& f, double tolerance = tol::psd) {
  require_choi_psd(f);
  const Index m = f.dim_in();
  const Index n = f.dim_out();
  return psd_leq(partial_trace(f.matrix(), Factor::Second, n, m), static_cast<double>(m) * identity(n), tolerance);
}

/// F_{21} = M_Ω(F_2 ⊗ F_1) for T_1: M_m -> M_n and T_2: M_n -> M_d, i.e.
/// ⟨φ_x⊗e_i|F21|φ_y⊗e_j⟩ = (1/n) Σ_μν ⟨φ_x⊗f_μ|F2|φ_y⊗f_ν⟩⟨f_μ⊗e_i|F1|f_ν⊗e_j⟩.
inline ChoiOperator jam_compose(const ChoiOperator& f2, const ChoiOperator& f1) {
  const Index m = f1.dim_in();
  const Index n = f1.dim_out();
  if (f2.dim_in() != n) throw Error(ErrorKind::DimMismatch, "jam_compose: inner dimensions differ");
  const Index d = f2.dim_out();
  const CMatrix& a = f2.matrix();
  const CMatrix& b = f1.matrix();
  CMatrix out = CMatrix::Zero(d * m, d * m);
  for (Index x = 0; x < d; ++x)
    for (Index y = 0; y < d; ++y)
      for (Index mu = 0; mu < n; ++mu)
        for (Index nu = 0; nu < n; ++nu) {
          const Complex coeff = a(x * n + mu, y * n + nu);
          if (coeff == Complex(0.0, 0.0)) continue;
          out.block(x * m, y * m, m, m) += coeff * b.block(mu * m, nu * m, m, m);
        }
  out /= static_cast<double>(n);
  return ChoiOperator(std::move(out), m, d);
}

/// ω(A) = Σ p_i ⟨e_i|A e_i⟩ with all p_i > 0; basis columns are the e_i.
class FaithfulState {
 public:
  explicit FaithfulState(RVector p) : FaithfulState(p, identity(p.size())) {}

  FaithfulState(RVector p, CMatrix basis) : p_(std::move(p)), basis_(std::move(basis)) {
    if (p_.size() == 0) throw Error(ErrorKind::InvalidArgument, "faithful state needs at least one weight");
    for (Index i = 0; i < p_.size(); ++i)
      if (!(p_(i) > 0.0) || !std::isfinite(p_(i)))
        throw Error(ErrorKind::InvalidArgument, "faithful state weights must be strictly positive");
    if (std::abs(p_.sum() - 1.0) > 1e-12)
      throw Error(ErrorKind::InvalidArgument, "faithful state weights must sum to 1");
    if (basis_.rows() != p_.size() || basis_.cols() != p_.size())
      throw Error(ErrorKind::ShapeMismatch, "basis must be square of the state's dimension");
    require_finite(basis_, "basis");
    if (op_norm(basis_.adjoint() * basis_ - identity(p_.size())) > 1e-10)
      throw Error(ErrorKind::InvalidArgument, "basis is not orthonormal");
  }

  Index dim() const noexcept { return p_.size(); }
  const RVector& p() const noexcept { return p_; }
  const CMatrix& basis() const noexcept { return basis_; }

  CMatrix density() const { return basis_ * p_.cast<Complex>().asDiagonal() * basis_.adjoint(); }

  /// ‖D_ω⁻¹‖ = 1 / min p_i.
  double inverse_density_norm() const { return 1.0 / p_.minCoeff(); }

 private:
  RVector p_;
  CMatrix basis_;
};

inline CpMap faithful_channel(const FaithfulState& w, Index n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "output dimension must be positive");
  const Index m = w.dim();
  std::vector<CMatrix> kraus;
  for (Index mu = 0; mu < n; ++mu)
    for (Index i = 0; i < m; ++i) {
      CMatrix f_mu = CMatrix::Zero(1, n);
      f_mu(0, mu) = 1.0;
      kraus.push_back(std::sqrt(w.p()(i)) * (w.basis().col(i) * f_mu));
    }
  return CpMap(m, n, std::move(kraus));
}

struct FaithfulDerivative {
  CMatrix f;
  double c = 0.0;      // ‖F_{T,ω}‖
  double bound = 0.0;  // ‖D_ω⁻¹‖² · ‖T‖_cb
};

/// F_{T,ω} and its norm; asserts T ≤ c·Φ_ω and c ≤ ‖D_ω⁻¹‖²‖T‖_cb.
inline FaithfulDerivative faithful_rn(const CpMap& t, const FaithfulState& w) {
  const Index m = t.dim_in();
  const Index n = t.dim_out();
  if (w.dim() != m) throw Error(ErrorKind::DimMismatch, "state dimension differs from the map's input dimension");
  CMatrix f = CMatrix::Zero(n * m, n * m);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j) {
      const CMatrix unit = w.basis().col(i) * w.basis().col(j).adjoint();
      const CMatrix image = apply(t, unit) / std::sqrt(w.p()(i) * w.p()(j));
      for (Index mu = 0; mu < n; ++mu)
        for (Index nu = 0; nu < n; ++nu) f(mu * m + i, nu * m + j) = image(mu, nu);
    }
  FaithfulDerivative out;
  out.c = op_norm(f);
  // ‖T‖_cb = ‖T(1)‖ for CP maps.
  const double cb = op_norm(apply(t, identity(m)));
  out.bound = w.inverse_density_norm() * w.inverse_density_norm() * cb;
  out.f = std::move(f);
  if (out.c > out.bound * (1.0 + 1e-9))
    throw Error(ErrorKind::Inconsistent, "faithful-state derivative exceeds its norm bound");
  if (!dominates(t, scaled(faithful_channel(w, n), out.c)))
    throw Error(ErrorKind::Inconsistent, "map is not dominated by c * Phi_omega");
  return out;
}

}  // namespace cpcalc
