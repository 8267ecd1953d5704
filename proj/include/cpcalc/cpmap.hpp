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

// Completely positive maps T: B(H1) -> B(H2), dim H1 = m, dim H2 = n, in the
// Heisenberg picture: T(A) = Σ_x V_x* A V_x with each Kraus operator
// V_x : H2 -> H1 stored as an m×n matrix.
//
// Choi operator. F_T lives on K ⊗ H (output factor first, index (μ,i) ->
// μ*m + i) and carries the m² scaling
//     F_T = m² (T ⊗ id)(|Ψ⟩⟨Ψ|),   Ψ = m^{-1/2} Σ_i e_i ⊗ e_i,
// i.e. ⟨f_μ⊗e_i|F_T|f_ν⊗e_j⟩ = m ⟨f_μ|T(|e_i⟩⟨e_j|)|f_ν⟩. The unnormalized
// convention C = (T ⊗ id)(Σ_ij |e_i e_i⟩⟨e_j e_j|) is F_T / m; see
// choi_unnormalized(). In Kraus terms F_T = m Σ_x vec(V_x*) vec(V_x*)*.
//
// Canonical form. A canonical Kraus set is read off the phase-fixed
// eigendecomposition of F_T, keeping eigenvalues ≥ tol::rank·λ_max. It is
// linearly independent and its size is the rank of F_T. Two Kraus sets of
// the same map agree only up to the unitary freedom of the representation;
// the canonical set picks one representative deterministically.

#include <string>
#include <utility>
#include <vector>

#include "cpcalc/numerics.hpp"

namespace cpcalc {

class CpMap {
 public:
  CpMap(Index dim_in, Index dim_out, std::vector<CMatrix> kraus)
      : dim_in_(dim_in), dim_out_(dim_out), kraus_(std::move(kraus)) {
    if (dim_in_ <= 0 || dim_out_ <= 0) throw Error(ErrorKind::ShapeMismatch, "CpMap dimensions must be positive");
    if (kraus_.empty()) throw Error(ErrorKind::ShapeMismatch, "CpMap needs at least one Kraus operator");
    for (std::size_t x = 0; x < kraus_.size(); ++x) {
      if (kraus_[x].rows() != dim_in_ || kraus_[x].cols() != dim_out_)
        throw Error(ErrorKind::ShapeMismatch,
                    "kraus[" + std::to_string(x) + "] has shape " + std::to_string(kraus_[x].rows()) + "x" +
                        std::to_string(kraus_[x].cols()) + ", expected " + std::to_string(dim_in_) + "x" +
                        std::to_string(dim_out_));
      require_finite(kraus_[x], "Kraus operator");
    }
  }

  /// Dimensions are taken from the first operator.
  explicit CpMap(std::vector<CMatrix> kraus)
      : CpMap(kraus.empty() ? 1 : kraus.front().rows(), kraus.empty() ? 1 : kraus.front().cols(),
              std::move(kraus)) {}

  Index dim_in() const noexcept { return dim_in_; }
  Index dim_out() const noexcept { return dim_out_; }
  const std::vector<CMatrix>& kraus() const noexcept { return kraus_; }

 private:
  Index dim_in_;
  Index dim_out_;
  std::vector<CMatrix> kraus_;
};

/// V: H2 -> H1 ⊗ E with rows indexed (i, x) -> i * env_dim + x.
struct StinespringDilation {
  CMatrix v;
  Index dim_in = 0;
  Index env_dim = 0;
  bool minimal = false;
};

class ChoiOperator {
 public:
  ChoiOperator(CMatrix f, Index dim_in, Index dim_out) : f_(std::move(f)), dim_in_(dim_in), dim_out_(dim_out) {
    if (dim_in_ <= 0 || dim_out_ <= 0) throw Error(ErrorKind::ShapeMismatch, "Choi dimensions must be positive");
    if (f_.rows() != dim_in_ * dim_out_ || f_.cols() != dim_in_ * dim_out_)
      throw Error(ErrorKind::ShapeMismatch, "Choi operator must be " + std::to_string(dim_in_ * dim_out_) +
                                                "x" + std::to_string(dim_in_ * dim_out_));
    require_finite(f_, "Choi operator");
  }

  const CMatrix& matrix() const noexcept { return f_; }
  Index dim_in() const noexcept { return dim_in_; }
  Index dim_out() const noexcept { return dim_out_; }

 private:
  CMatrix f_;
  Index dim_in_;
  Index dim_out_;
};

// ---------------------------------------------------------------------------
// Constructors for common maps.

inline CpMap zero_map(Index dim_in, Index dim_out) {
  return CpMap(dim_in, dim_out, {CMatrix::Zero(dim_in, dim_out)});
}

inline CpMap identity_map(Index d) { return CpMap(d, d, {identity(d)}); }

/// A ↦ X* A X.
inline CpMap pure_map(const CMatrix& x) { return CpMap(x.rows(), x.cols(), {x}); }

/// A ↦ U* A U.
inline CpMap unitary_conjugation(const CMatrix& u) { return pure_map(u); }

inline CpMap scaled(const CpMap& t, double c) {
  if (c < 0.0) throw Error(ErrorKind::InvalidArgument, "CP maps can only be scaled by c >= 0");
  std::vector<CMatrix> kraus;
  kraus.reserve(t.kraus().size());
  for (const auto& k : t.kraus()) kraus.push_back(std::sqrt(c) * k);
  return CpMap(t.dim_in(), t.dim_out(), std::move(kraus));
}

inline void require_same_dims(const CpMap& a, const CpMap& b) {
  if (a.dim_in() != b.dim_in() || a.dim_out() != b.dim_out())
    throw Error(ErrorKind::DimMismatch, "maps act between different matrix algebras (" +
                                            std::to_string(a.dim_in()) + "->" + std::to_string(a.dim_out()) +
                                            " vs " + std::to_string(b.dim_in()) + "->" +
                                            std::to_string(b.dim_out()) + ")");
}

/// S + T, as the union of Kraus sets.
inline CpMap sum(const CpMap& a, const CpMap& b) {
  require_same_dims(a, b);
  std::vector<CMatrix> kraus = a.kraus();
  kraus.insert(kraus.end(), b.kraus().begin(), b.kraus().end());
  return CpMap(a.dim_in(), a.dim_out(), std::move(kraus));
}

/// second ∘ first in the Heisenberg picture: A ↦ second(first(A)), where
/// first: M_m -> M_n and second: M_n -> M_d.
inline CpMap compose(const CpMap& second, const CpMap& first) {
  if (first.dim_out() != second.dim_in())
    throw Error(ErrorKind::DimMismatch, "compose: inner dimensions differ");
  std::vector<CMatrix> kraus;
  kraus.reserve(first.kraus().size() * second.kraus().size());
  for (const auto& v : first.kraus())
    for (const auto& u : second.kraus()) kraus.push_back(v * u);
  return CpMap(first.dim_in(), second.dim_out(), std::move(kraus));
}

// ---------------------------------------------------------------------------
// Actions.

/// Schrödinger-picture action ρ ↦ Σ_x V_x ρ V_x*.
inline CMatrix apply_dual(const CpMap& t, const CMatrix& rho) {
  if (rho.rows() != t.dim_out() || rho.cols() != t.dim_out())
    throw Error(ErrorKind::ShapeMismatch, "apply_dual: state must be " + std::to_string(t.dim_out()) + "x" +
                                              std::to_string(t.dim_out()));
  CMatrix out = CMatrix::Zero(t.dim_in(), t.dim_in());
  for (const auto& k : t.kraus()) out.noalias() += k * rho * k.adjoint();
  return out;
}

// `apply` is a function object rather than a function so that unqualified
// calls never reach std::apply through argument-dependent lookup (Eigen's
// complex matrices drag namespace std along).
struct ApplyFn {
  /// Heisenberg-picture action A ↦ Σ_x V_x* A V_x.
  CMatrix operator()(const CpMap& t, const CMatrix& a) const {
    if (a.rows() != t.dim_in() || a.cols() != t.dim_in())
      throw Error(ErrorKind::ShapeMismatch, "apply: operand must be " + std::to_string(t.dim_in()) + "x" +
                                                std::to_string(t.dim_in()));
    CMatrix out = CMatrix::Zero(t.dim_out(), t.dim_out());
    for (const auto& k : t.kraus()) out.noalias() += k.adjoint() * a * k;
    return out;
  }

  /// V*(A ⊗ 1)V.
  CMatrix operator()(const StinespringDilation& s, const CMatrix& a) const {
    if (a.rows() != s.dim_in || a.cols() != s.dim_in)
      throw Error(ErrorKind::ShapeMismatch, "apply: operand does not match dilation input dimension");
    if (s.env_dim == 0) return CMatrix::Zero(s.v.cols(), s.v.cols());
    return s.v.adjoint() * tensor(a, identity(s.env_dim)) * s.v;
  }
};

inline constexpr ApplyFn apply{};

// ---------------------------------------------------------------------------
// Choi operator.

inline ChoiOperator to_choi(const CpMap& t) {
  const Index m = t.dim_in();
  const Index n = t.dim_out();
  CMatrix f = CMatrix::Zero(m * n, m * n);
  for (const auto& k : t.kraus()) {
    const CVector v = vec(k.adjoint());
    f.noalias() += v * v.adjoint();
  }
  f *= static_cast<double>(m);
  return ChoiOperator(std::move(f), m, n);
}

/// C = F_T / m, the Choi matrix without the m² scaling.
inline CMatrix choi_unnormalized(const CpMap& t) {
  return to_choi(t).matrix() / static_cast<double>(t.dim_in());
}

inline void require_choi_psd(const ChoiOperator& c) {
  const CMatrix& f = c.matrix();
  const double lo = min_eigenvalue(f);
  if (lo < -tol::psd * std::max(1.0, op_norm(f)))
    throw Error(ErrorKind::NotPsd, "Choi operator has eigenvalue " + std::to_string(lo));
}

/// Linearly independent Kraus operators read off F_T; empty for the zero map.
inline std::vector<CMatrix> canonical_kraus(const ChoiOperator& c) {
  require_choi_psd(c);
  const Index m = c.dim_in();
  const Index n = c.dim_out();
  const HermEig eig = herm_eig(hermitian_part(c.matrix()));
  std::vector<CMatrix> kraus;
  const double top = eig.values.size() ? eig.values(0) : 0.0;
  if (!(top > std::numeric_limits<double>::min())) return kraus;
  for (Index k = 0; k < eig.values.size(); ++k) {
    if (eig.values(k) < tol::rank * top) break;
    const CVector col = std::sqrt(eig.values(k) / static_cast<double>(m)) * eig.vectors.col(k);
    kraus.push_back(unvec(col, n, m).adjoint());
  }
  return kraus;
}

inline CpMap from_choi(const ChoiOperator& c) {
  auto kraus = canonical_kraus(c);
  if (kraus.empty()) return zero_map(c.dim_in(), c.dim_out());
  return CpMap(c.dim_in(), c.dim_out(), std::move(kraus));
}

inline CpMap canonicalize(const CpMap& t) { return from_choi(to_choi(t)); }

inline Index choi_rank(const CpMap& t) { return psd_rank(to_choi(t).matrix()); }

// ---------------------------------------------------------------------------
// Stinespring.

/// Stacks Kraus operators as V ψ = Σ_x V_x ψ ⊗ e_x.
inline StinespringDilation stack_kraus(Index dim_in, Index dim_out, const std::vector<CMatrix>& kraus,
                                       bool minimal) {
  const Index d = static_cast<Index>(kraus.size());
  CMatrix v = CMatrix::Zero(dim_in * d, dim_out);
  for (Index x = 0; x < d; ++x)
    for (Index i = 0; i < dim_in; ++i) v.row(i * d + x) = kraus[static_cast<std::size_t>(x)].row(i);
  return {std::move(v), dim_in, d, minimal};
}

/// Canonical (minimal) dilation; env_dim equals the rank of F_T.
inline StinespringDilation to_stinespring(const CpMap& t) {
  return stack_kraus(t.dim_in(), t.dim_out(), canonical_kraus(to_choi(t)), true);
}

/// Kraus operators V_x = (1 ⊗ ⟨e_x|) V.
inline CpMap from_stinespring(const StinespringDilation& s) {
  const Index n = s.v.cols();
  if (s.v.rows() != s.dim_in * s.env_dim)
    throw Error(ErrorKind::ShapeMismatch, "dilation rows must equal dim_in * env_dim");
  if (s.env_dim == 0) return zero_map(s.dim_in, n);
  std::vector<CMatrix> kraus(static_cast<std::size_t>(s.env_dim), CMatrix(s.dim_in, n));
  for (Index x = 0; x < s.env_dim; ++x)
    for (Index i = 0; i < s.dim_in; ++i) kraus[static_cast<std::size_t>(x)].row(i) = s.v.row(i * s.env_dim + x);
  return CpMap(s.dim_in, n, std::move(kraus));
}

/// The map A ↦ V*(A ⊗ F)V for a dilation V: C^n -> C^m ⊗ C^d and F ≥ 0 on C^d.
inline CpMap from_dilation(const CMatrix& v, Index dim_in, const CMatrix& env_op) {
  require_square(env_op, "environment operator");
  const Index d = env_op.rows();
  if (v.rows() != dim_in * d) throw Error(ErrorKind::ShapeMismatch, "from_dilation: shapes do not compose");
  const CMatrix root = psd_sqrt(env_op);
  return from_stinespring({tensor(identity(dim_in), root) * v, dim_in, d, false});
}

// ---------------------------------------------------------------------------
// Classification.

inline bool is_quantum_operation(const CpMap& t, double tolerance = tol::psd) {
  return psd_leq(apply(t, identity(t.dim_in())), identity(t.dim_out()), tolerance);
}

inline bool is_channel(const CpMap& t, double tolerance = tol::recon) {
  return op_norm(apply(t, identity(t.dim_in())) - identity(t.dim_out())) <= tolerance;
}

/// Rank-one Choi operator. The zero map is not pure.
inline bool is_pure(const CpMap& t) { return choi_rank(t) == 1; }

/// Largest deviation between the actions of a and b over all matrix units.
inline double action_distance(const CpMap& a, const CpMap& b) {
  require_same_dims(a, b);
  double worst = 0.0;
  CMatrix unit = CMatrix::Zero(a.dim_in(), a.dim_in());
  for (Index i = 0; i < a.dim_in(); ++i)
    for (Index j = 0; j < a.dim_in(); ++j) {
      unit(i, j) = 1.0;
      worst = std::max(worst, op_norm(apply(a, unit) - apply(b, unit)));
      unit(i, j) = 0.0;
    }
  return worst;
}

}  // namespace cpcalc
