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

// CB-norm estimates for differences Λ = T1 − T2 of CP maps.
//
// Lower side: ‖Λ‖_cb = sup_ψ ‖(Λ_* ⊗ id_R)(|ψ⟩⟨ψ|)‖_1 is approached by an
// alternating ascent from random unit vectors ψ on C^n ⊗ C^R. The ancilla
// dimension R defaults to n = dim H2.
//
// Upper side:
//  - bound_rn: with T = T1 + T2 dominating both and F_i = D_T T_i,
//    ‖Λ‖_cb ≤ ‖V‖²‖F1 − F2‖ = ‖T(1)‖ ‖F1 − F2‖.
//  - bound_dilation_diff: for dilations V_i on a common environment,
//    ‖Λ‖_cb ≤ (‖V1‖ + ‖V2‖)‖V1 − V2‖.
//  - common_dilation: V_i = (1_H ⊗ √F_{T_i}) V_Φ on K ⊗ H, which satisfies
//    ‖V1 − V2‖ ≤ m √‖Λ‖_cb. This uses dim H = m; the analogous estimate for
//    the Schrödinger-side representation carries dim K instead, and which of
//    the two is tighter depends on the maps.

#include <algorithm>
#include <cstdint>
#include <future>
#include <optional>
#include <random>
#include <thread>
#include <vector>

#include "cpcalc/duality.hpp"

namespace cpcalc {

/// ‖T‖_cb = ‖T(1)‖ for CP maps.
inline double cb_norm_cp(const CpMap& t) { return op_norm(apply(t, identity(t.dim_in()))); }

struct DiamondOptions {
  std::uint64_t seed = 0;
  int restarts = 32;
  int max_iterations = 200;
  double convergence = 1e-10;
  Index ancilla_dim = 0;  // 0 selects dim H2
  unsigned threads = 0;   // 0 selects hardware concurrency
};

struct DiamondEstimate {
  double value = 0.0;
  int iterations = 0;  // summed over restarts
};

namespace detail {

struct LiftedKraus {
  std::vector<CMatrix> plus;   // V_x ⊗ 1_R for T1
  std::vector<CMatrix> minus;  // V_x ⊗ 1_R for T2
};

inline LiftedKraus lift_kraus(const CpMap& t1, const CpMap& t2, Index ancilla) {
  LiftedKraus out;
  for (const auto& k : t1.kraus()) out.plus.push_back(tensor(k, identity(ancilla)));
  for (const auto& k : t2.kraus()) out.minus.push_back(tensor(k, identity(ancilla)));
  return out;
}

struct RestartResult {
  double value = 0.0;
  int iterations = 0;
};

inline CVector random_unit(std::mt19937_64& rng, Index dim) {
  std::normal_distribution<double> normal;
  CVector v(dim);
  for (Index i = 0; i < dim; ++i) {
    const double re = normal(rng);
    const double im = normal(rng);
    v(i) = Complex(re, im);
  }
  return v.normalized();
}

inline RestartResult ascend(const LiftedKraus& lk, Index in_dim, Index out_dim, std::uint64_t seed, int restart,
                            const DiamondOptions& opts) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(restart)};
  std::mt19937_64 rng(seq);
  CVector psi = random_unit(rng, out_dim);

  RestartResult result;
  double previous = -1.0;
  for (int it = 0; it < opts.max_iterations; ++it) {
    // X = (Λ_* ⊗ id)(|ψ⟩⟨ψ|)
    CMatrix x = CMatrix::Zero(in_dim, in_dim);
    for (const auto& k : lk.plus) {
      const CVector u = k * psi;
      x.noalias() += u * u.adjoint();
    }
    for (const auto& k : lk.minus) {
      const CVector u = k * psi;
      x.noalias() -= u * u.adjoint();
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> xs(hermitian_part(x));
    const double value = xs.eigenvalues().cwiseAbs().sum();
    result.value = std::max(result.value, value);
    result.iterations = it + 1;
    if (value - previous <= opts.convergence) break;
    previous = value;

    // Sign unitary of X, pulled back through Λ ⊗ id; ψ ← its top eigenvector.
    RVector signs = xs.eigenvalues().unaryExpr([](double v) { return v >= 0.0 ? 1.0 : -1.0; });
    const CMatrix sign = xs.eigenvectors() * signs.cast<Complex>().asDiagonal() * xs.eigenvectors().adjoint();
    CMatrix y = CMatrix::Zero(out_dim, out_dim);
    for (const auto& k : lk.plus) y.noalias() += k.adjoint() * sign * k;
    for (const auto& k : lk.minus) y.noalias() -= k.adjoint() * sign * k;
    Eigen::SelfAdjointEigenSolver<CMatrix> ys(hermitian_part(y));
    psi = ys.eigenvectors().col(out_dim - 1);
  }
  return result;
}

}  // namespace detail

/// Random-restart lower estimate of ‖t1 − t2‖_cb. Restart r draws its start
/// from an RNG seeded by (seed, r) and results are combined by max in restart
/// order, so the value does not depend on the thread count.
inline DiamondEstimate diamond_estimate(const CpMap& t1, const CpMap& t2, const DiamondOptions& opts = {}) {
  require_same_dims(t1, t2);
  if (opts.restarts < 1) throw Error(ErrorKind::InvalidArgument, "restarts must be positive");
  // Identical maps written through different Kraus sets would otherwise
  // report roundoff instead of zero.
  if (to_choi(t1).matrix() == to_choi(t2).matrix()) return {};
  const Index ancilla = opts.ancilla_dim > 0 ? opts.ancilla_dim : t1.dim_out();
  const detail::LiftedKraus lk = detail::lift_kraus(t1, t2, ancilla);
  const Index in_dim = t1.dim_in() * ancilla;
  const Index out_dim = t1.dim_out() * ancilla;

  std::vector<detail::RestartResult> results(static_cast<std::size_t>(opts.restarts));
  unsigned workers = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(opts.restarts));
  auto run_range = [&](int begin, int stride) {
    for (int r = begin; r < opts.restarts; r += stride)
      results[static_cast<std::size_t>(r)] = detail::ascend(lk, in_dim, out_dim, opts.seed, r, opts);
  };
  if (workers <= 1) {
    run_range(0, 1);
  } else {
    std::vector<std::future<void>> jobs;
    for (unsigned w = 0; w < workers; ++w)
      jobs.push_back(std::async(std::launch::async, run_range, static_cast<int>(w), static_cast<int>(workers)));
    for (auto& j : jobs) j.get();
  }

  DiamondEstimate out;
  for (const auto& r : results) {
    out.value = std::max(out.value, r.value);
    out.iterations += r.iterations;
  }
  // Triangle inequality: a value above ‖T1‖cb + ‖T2‖cb is roundoff.
  out.value = std::min(out.value, cb_norm_cp(t1) + cb_norm_cp(t2));
  return out;
}

inline double diamond_lower(const CpMap& t1, const CpMap& t2, std::uint64_t seed = 0, int restarts = 32) {
  DiamondOptions opts;
  opts.seed = seed;
  opts.restarts = restarts;
  return diamond_estimate(t1, t2, opts).value;
}

inline double bound_rn(const CpMap& t1, const CpMap& t2) {
  require_same_dims(t1, t2);
  const CpMap dominator = sum(t1, t2);
  const Dominator dom(dominator);
  const RnDerivative f1 = dom.derivative(t1);
  const RnDerivative f2 = dom.derivative(t2);
  return cb_norm_cp(dominator) * op_norm(f1.f - f2.f);
}

struct CommonDilationPair {
  CMatrix v1;
  CMatrix v2;
  Index dim_in = 0;
  Index env_dim = 0;
};

inline double bound_dilation_diff(const CommonDilationPair& p) {
  if (p.v1.rows() != p.v2.rows() || p.v1.cols() != p.v2.cols())
    throw Error(ErrorKind::ShapeMismatch, "dilations differ in shape");
  return (op_norm(p.v1) + op_norm(p.v2)) * op_norm(p.v1 - p.v2);
}

/// V_Φ: C^n -> C^m ⊗ (C^n ⊗ C^m), the canonical dilation of Φ_{m,n}.
inline CMatrix reference_isometry(Index m, Index n) {
  const ReferenceChannel phi = reference_channel(m, n);
  return stack_kraus(m, n, phi.map.kraus(), true).v;
}

inline CommonDilationPair common_dilation(const CpMap& t1, const CpMap& t2) {
  require_same_dims(t1, t2);
  const Index m = t1.dim_in();
  const Index n = t1.dim_out();
  const CMatrix v_phi = reference_isometry(m, n);
  const CMatrix root1 = psd_sqrt(psd_clip(to_choi(t1).matrix(), tol::psd * std::max(1.0, op_norm(to_choi(t1).matrix()))));
  const CMatrix root2 = psd_sqrt(psd_clip(to_choi(t2).matrix(), tol::psd * std::max(1.0, op_norm(to_choi(t2).matrix()))));
  CommonDilationPair out;
  out.dim_in = m;
  out.env_dim = m * n;
  out.v1 = tensor(identity(m), root1) * v_phi;
  out.v2 = tensor(identity(m), root2) * v_phi;

  const double upper = bound_rn(t1, t2);
  const double slack = 1e-12 * std::max(1.0, op_norm(root1) * op_norm(root1));
  if (op_norm(out.v1 - out.v2) > static_cast<double>(m) * std::sqrt(upper + slack) * (1.0 + 1e-9))
    throw Error(ErrorKind::Inconsistent, "common dilation violates ||V1 - V2|| <= m sqrt(||T1 - T2||_cb)");
  return out;
}

struct NormReport {
  double lower = 0.0;
  double upper_rn = 0.0;
  double upper_dilation = 0.0;
  std::optional<double> cb_exact;  // set when t1 − t2 is itself CP
  std::uint64_t seed = 0;
  int restarts = 0;
  int iterations = 0;
};

inline NormReport norm_report(const CpMap& t1, const CpMap& t2, const DiamondOptions& opts = {}) {
  const DiamondEstimate est = diamond_estimate(t1, t2, opts);
  NormReport r;
  r.lower = est.value;
  r.iterations = est.iterations;
  r.seed = opts.seed;
  r.restarts = opts.restarts;
  r.upper_rn = bound_rn(t1, t2);
  r.upper_dilation = bound_dilation_diff(common_dilation(t1, t2));
  if (dominates(t2, t1)) r.cb_exact = op_norm(apply(t1, identity(t1.dim_in())) - apply(t2, identity(t2.dim_in())));
  return r;
}

}  // namespace cpcalc
