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

// Order structure of quantum operations: rigidity of channel differences,
// domination constants, and the dilation of a monotone chain
// T_1 ≤ ... ≤ T_k of operations to a monotone chain of projections
// Π_1 ≤ ... ≤ Π_k with T_i(A) = V*(A ⊗ Π_i)V for a single isometry V.

#include <limits>
#include <string>
#include <vector>

#include "cpcalc/radon.hpp"

namespace cpcalc {

enum class ChannelDifference { Equal, NotCp };

/// For channels s, t: t − s is CP only when s = t.
inline ChannelDifference channel_difference_is_cp(const CpMap& s, const CpMap& t) {
  require_same_dims(s, t);
  if (!is_channel(s) || !is_channel(t)) throw Error(ErrorKind::NotAChannel, "both maps must be channels");
  const CMatrix cs = to_choi(s).matrix();
  const CMatrix ct = to_choi(t).matrix();
  if (op_norm(cs - ct) <= recon_tol(op_norm(ct))) return ChannelDifference::Equal;
  if (dominates(s, t))
    throw Error(ErrorKind::Inconsistent, "distinct channels reported as ordered; tolerance too coarse");
  return ChannelDifference::NotCp;
}

struct DominationConstant {
  double c_min = 0.0;
  bool attained = false;
};

/// Smallest c with s ≤ c·t; +∞ (attained = false) when the Choi support of s
/// is not contained in that of t.
inline DominationConstant c_min(const CpMap& s, const CpMap& t) {
  require_same_dims(s, t);
  const CMatrix cs = choi_unnormalized(s);
  const CMatrix ct = choi_unnormalized(t);
  const HermEig eig = herm_eig(ct);
  const Index dim = ct.rows();
  const double top = eig.values(0);
  CMatrix inv_root = CMatrix::Zero(dim, dim);
  CMatrix support = CMatrix::Zero(dim, dim);
  if (top > std::numeric_limits<double>::min()) {
    for (Index k = 0; k < dim; ++k) {
      if (eig.values(k) < tol::rank * top) break;
      const CVector& u = eig.vectors.col(k);
      inv_root += (u * u.adjoint()) / std::sqrt(eig.values(k));
      support += u * u.adjoint();
    }
  }
  const CMatrix outside = (identity(dim) - support) * cs;
  const double scale = op_norm(cs);
  if (op_norm(outside) > tol::psd * std::max(1.0, scale))
    return {std::numeric_limits<double>::infinity(), false};
  if (scale == 0.0) return {0.0, true};
  return {std::max(0.0, max_eigenvalue(inv_root * cs * inv_root)), true};
}

/// T ≡_u T': mutual domination with finite constants.
inline bool uniformly_equivalent(const CpMap& s, const CpMap& t) {
  return c_min(s, t).attained && c_min(t, s).attained;
}

/// lam·s1 + (1 − lam)·s2.
inline CpMap mix_channels(const CpMap& s1, const CpMap& s2, double lam) {
  require_same_dims(s1, s2);
  if (!(lam >= 0.0 && lam <= 1.0)) throw Error(ErrorKind::InvalidArgument, "mixing weight must lie in [0, 1]");
  return sum(scaled(s1, lam), scaled(s2, 1.0 - lam));
}

/// Kraus operators M_k: H2 -> H1 with Σ_k M_k* M_k = 1 − T(1), built from the
/// PSD root R of the defect. For m ≥ n this is the single operator R
/// embedded in the first n coordinates of H1; for m < n the rows of R are
/// distributed over ⌈n/m⌉ operators.
inline std::vector<CMatrix> defect_operators(const CpMap& t) {
  const Index m = t.dim_in();
  const Index n = t.dim_out();
  const CMatrix defect = identity(n) - apply(t, identity(m));
  if (min_eigenvalue(defect) < -tol::psd * std::max(1.0, op_norm(defect)))
    throw Error(ErrorKind::NotAnOperation, "T(1) is not below the identity");
  const CMatrix root = psd_sqrt(psd_clip(defect, tol::psd * std::max(1.0, op_norm(defect))));
  std::vector<CMatrix> out;
  for (Index first = 0; first < n; first += m) {
    const Index rows = std::min(m, n - first);
    CMatrix block = CMatrix::Zero(m, n);
    block.topRows(rows) = root.middleRows(first, rows);
    out.push_back(std::move(block));
  }
  return out;
}

/// t extended by defect_operators(t) to a channel.
inline CpMap pad_to_channel(const CpMap& t) {
  std::vector<CMatrix> kraus = t.kraus();
  for (auto& k : defect_operators(t)) kraus.push_back(std::move(k));
  return CpMap(t.dim_in(), t.dim_out(), std::move(kraus));
}

struct NaimarkDilation {
  CMatrix isometry;             // C^d -> C^d ⊗ C^k, rows (a, i) -> a * k + i
  std::vector<CMatrix> pvm;     // E_i = 1_d ⊗ |δ_i⟩⟨δ_i|
};

/// Ṽξ = Σ_i (√F_i ξ) ⊗ δ_i, so that F_i = Ṽ* E_i Ṽ.
inline NaimarkDilation naimark_dilate(const PovmDecomposition& povm) {
  if (povm.elements.empty()) throw Error(ErrorKind::NotAResolution, "empty POVM");
  const Index d = povm.elements.front().rows();
  const Index k = static_cast<Index>(povm.elements.size());
  CMatrix total = CMatrix::Zero(d, d);
  for (const auto& e : povm.elements) {
    if (e.rows() != d || e.cols() != d) throw Error(ErrorKind::ShapeMismatch, "POVM elements differ in shape");
    total += e;
  }
  const double deviation = op_norm(total - identity(d));
  if (deviation > recon_tol(1.0))
    throw Error(ErrorKind::NotAResolution, "elements sum to identity only within " + std::to_string(deviation));

  NaimarkDilation out;
  out.isometry = CMatrix::Zero(d * k, d);
  for (Index i = 0; i < k; ++i) {
    const CMatrix root = psd_sqrt(psd_clip(povm.elements[static_cast<std::size_t>(i)], tol::psd));
    for (Index a = 0; a < d; ++a) out.isometry.row(a * k + i) = root.row(a);
    CMatrix marker = CMatrix::Zero(k, k);
    marker(i, i) = 1.0;
    out.pvm.push_back(tensor(identity(d), marker));
  }
  return out;
}

struct PvmChain {
  Index dim_in = 0;
  Index env_dim = 0;
  CMatrix isometry;                  // (dim_in * env_dim) x dim_out
  std::vector<CMatrix> projections;  // one per chain element
};

/// V*(A ⊗ Π_k)V for the k-th chain element (0-based).
inline CpMap chain_element(const PvmChain& chain, std::size_t k) {
  return from_dilation(chain.isometry, chain.dim_in, chain.projections.at(k));
}

inline PvmChain order_chain_dilation(const std::vector<CpMap>& chain) {
  if (chain.empty()) throw Error(ErrorKind::InvalidArgument, "empty chain");
  for (std::size_t i = 0; i < chain.size(); ++i) {
    require_same_dims(chain[i], chain.front());
    if (!is_quantum_operation(chain[i]))
      throw Error(ErrorKind::NotAnOperation, "chain element " + std::to_string(i) + " is not a quantum operation");
    if (i > 0 && !dominates(chain[i - 1], chain[i]))
      throw Error(ErrorKind::NotMonotone, "chain element " + std::to_string(i - 1) + " is not dominated by element " +
                                              std::to_string(i));
  }
  const Index m = chain.front().dim_in();
  const Index n = chain.front().dim_out();
  const CpMap top = is_channel(chain.back()) ? chain.back() : pad_to_channel(chain.back());

  // Increments S_1 = T_1, S_i = T_i − T_{i−1}, plus the padding defect.
  std::vector<CpMap> parts;
  CMatrix previous = CMatrix::Zero(m * n, m * n);
  auto increment = [&](const CMatrix& choi) {
    parts.push_back(from_choi(ChoiOperator(choi - previous, m, n)));
    previous = choi;
  };
  for (const auto& t : chain) increment(to_choi(t).matrix());
  if (op_norm(to_choi(top).matrix() - previous) > 0.0) increment(to_choi(top).matrix());

  const PovmDecomposition povm = instrument_rn(top, parts);
  const StinespringDilation w = Dominator(top).dilation();
  const NaimarkDilation lift = naimark_dilate(povm);
  const Index k = static_cast<Index>(povm.elements.size());

  PvmChain out;
  out.dim_in = m;
  out.env_dim = w.env_dim * k;
  out.isometry = tensor(identity(m), lift.isometry) * w.v;
  CMatrix running = CMatrix::Zero(out.env_dim, out.env_dim);
  for (std::size_t i = 0; i < chain.size(); ++i) {
    running += lift.pvm[i];
    out.projections.push_back(running);
  }
  return out;
}

}  // namespace cpcalc
