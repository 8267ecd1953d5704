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

// Acceptance suite. Each criterion runs at its stated tolerance and prints one
// line; the exit status is nonzero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cpcalc/cpcalc.hpp"
#include "support/oracles.hpp"

using namespace cpcalc;
using cpcalc::testing::Rng;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

/// Tracks the worst value of a quantity that must stay below a limit.
struct Worst {
  double limit;
  double value = 0.0;
  void see(double v) { value = std::max(value, v); }
  bool ok() const { return value <= limit; }
  std::string str(const char* what) const {
    std::ostringstream s;
    s << what << " " << value << " (limit " << limit << ")";
    return s.str();
  }
};

double max_abs(const CMatrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

CMatrix unit(Index m, Index i, Index j) {
  CMatrix u = CMatrix::Zero(m, m);
  u(i, j) = 1.0;
  return u;
}

/// Largest entrywise gap between f(E_ij) and the Kraus-sum oracle over all
/// matrix units.
double action_gap(const std::vector<CMatrix>& reference, Index m, const std::function<CMatrix(const CMatrix&)>& f) {
  double worst = 0.0;
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j)
      worst = std::max(worst, max_abs(f(unit(m, i, j)) - cpcalc::testing::kraus_sum(reference, unit(m, i, j))));
  return worst;
}

Verdict round_trips() {
  Rng rng(101);
  Worst choi{1e-10}, stine{1e-10};
  for (int rep = 0; rep < 200; ++rep) {
    const Index m = rng.integer(1, 6), n = rng.integer(1, 6);
    const CpMap t = rng.cp_map(m, n, rng.integer(1, static_cast<int>(m * n) + 2));
    const CpMap a = from_choi(to_choi(t));
    const CpMap b = from_stinespring(to_stinespring(t));
    choi.see(action_gap(t.kraus(), m, [&](const CMatrix& x) { return apply(a, x); }));
    stine.see(action_gap(t.kraus(), m, [&](const CMatrix& x) { return apply(b, x); }));
  }
  return {choi.ok() && stine.ok(), choi.str("choi gap") + ", " + stine.str("stinespring gap")};
}

Verdict rn_correctness() {
  Rng rng(202);
  Worst recover{1e-9}, residual{1e-10};
  for (int rep = 0; rep < 200; ++rep) {
    const Index m = rng.integer(1, 6), n = rng.integer(1, 6);
    const CpMap t = rng.cp_map(m, n, rng.integer(1, static_cast<int>(std::min<Index>(m * n, 12))));
    const CMatrix contraction = rng.psd_contraction(choi_rank(t));
    const CpMap s = rn_reconstruct(t, contraction);
    const RnDerivative f = rn_derivative(s, t);
    recover.see(max_abs(f.f - contraction));
    const StinespringDilation v = to_stinespring(t);
    residual.see(action_gap(s.kraus(), m, [&](const CMatrix& x) { return CMatrix(v.v.adjoint() * tensor(x, f.f) * v.v); }));
  }
  return {recover.ok() && residual.ok(), recover.str("derivative error") + ", " + residual.str("residual")};
}

Verdict domination_oracle() {
  Rng rng(303);
  int disagreements = 0, positives = 0, negatives = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const Index m = rng.integer(1, 3), n = rng.integer(1, 3);
    const CpMap t = rng.cp_map(m, n);
    CpMap s = rng.cp_map(m, n);
    if (rep % 2 == 0) s = rn_reconstruct(t, rng.psd_contraction(choi_rank(t)));
    const bool choi = dominates(s, t);
    const bool sampled = cpcalc::testing::cp_condition_holds(t.kraus(), s.kraus(), rng, 50);
    if (choi != sampled) ++disagreements;
    (choi ? positives : negatives)++;
  }
  std::ostringstream d;
  d << disagreements << " disagreements over " << positives << " dominated and " << negatives << " non-dominated pairs";
  return {disagreements == 0 && positives > 0 && negatives > 0, d.str()};
}

Verdict jamiolkowski_bounds() {
  // Half of the maps are quantum operations, half are scaled past T(1) ≤ 1,
  // so the criterion comparison sees both answers. The m² bound applies to
  // the operations.
  Rng rng(404);
  Worst below{tol::psd}, above{tol::psd}, eq10{1e-10};
  int mismatches = 0, operations = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const Index m = rep % 2 ? 2 : 3;
    const Index n = rng.integer(1, 3);
    CpMap t = rng.operation(m, n);
    if (rep % 4 >= 2) t = scaled(t, rng.uniform(1.05, 3.0) / cb_norm_cp(t));
    const ChoiOperator f = jam_forward(t);
    const double scale = std::max(1.0, op_norm(f.matrix()));
    below.see(-min_eigenvalue(f.matrix()) / scale);
    const bool op = is_quantum_operation(t);
    if (op) {
      ++operations;
      above.see((max_eigenvalue(f.matrix()) - static_cast<double>(m * m)) / scale);
    }
    eq10.see(action_gap(t.kraus(), m, [&](const CMatrix& x) { return jam_apply(f, x); }));
    if (jam_is_operation(f) != op) ++mismatches;
  }
  std::ostringstream d;
  d << below.str("F below 0 by") << ", " << above.str("F above m^2 by") << ", " << eq10.str("reconstruction error")
    << ", " << mismatches << " criterion mismatches (" << operations << " operations)";
  return {below.ok() && above.ok() && eq10.ok() && mismatches == 0 && operations > 0 && operations < 100, d.str()};
}

Verdict composition() {
  Rng rng(505);
  Worst gap{1e-10};
  for (int rep = 0; rep < 50; ++rep) {
    const Index m = rng.integer(2, 3), n = rng.integer(2, 3), d = rng.integer(2, 3);
    const CpMap t1 = rng.cp_map(m, n);
    const CpMap t2 = rng.cp_map(n, d);
    gap.see(max_abs(jam_compose(jam_forward(t2), jam_forward(t1)).matrix() - jam_forward(compose(t2, t1)).matrix()));
  }
  return {gap.ok(), gap.str("gap")};
}

Verdict channel_rigidity() {
  Rng rng(606);
  int ordered = 0, tested = 0, unequal_self = 0;
  // M_1 carries a single channel, so distinct pairs need m >= 2.
  for (int rep = 0; rep < 200; ++rep) {
    const Index m = rng.integer(2, 4), n = rng.integer(1, 4);
    const CpMap s = rng.channel(m, n);
    CpMap t = rng.channel(m, n);
    if (op_norm(to_choi(s).matrix() - to_choi(t).matrix()) <= 1e-6) continue;
    ++tested;
    if (dominates(s, t) || dominates(t, s)) ++ordered;
    if (channel_difference_is_cp(s, t) != ChannelDifference::NotCp) ++ordered;
    // The same channel presented through a different Kraus set.
    if (channel_difference_is_cp(s, canonicalize(s)) != ChannelDifference::Equal) ++unequal_self;
  }
  std::ostringstream d;
  d << ordered << " ordered distinct pairs of " << tested << ", " << unequal_self << " equal pairs not reported Equal";
  return {ordered == 0 && unequal_self == 0 && tested == 200, d.str()};
}

Verdict chain_pipeline() {
  Rng rng(707);
  Worst idem{1e-10}, recon{1e-9};
  int non_monotone = 0;
  for (int rep = 0; rep < 50; ++rep) {
    const Index m = rng.integer(1, 3), n = rng.integer(1, 3);
    const int length = rng.integer(1, 4);
    // Conic accumulation T_k = T_{k-1} + A_k, then one common rescaling that
    // makes the top element an operation (a channel for every third chain).
    std::vector<CpMap> chain{rng.cp_map(m, n)};
    for (int k = 1; k < length; ++k) chain.push_back(sum(chain.back(), scaled(rng.cp_map(m, n), rng.uniform(0.1, 1.0))));
    const double top = cb_norm_cp(chain.back());
    const double target = rep % 3 == 0 ? 1.0 : rng.uniform(0.3, 1.0);
    for (auto& t : chain) t = scaled(t, target / top);
    const PvmChain c = order_chain_dilation(chain);
    for (std::size_t k = 0; k < chain.size(); ++k) {
      const CMatrix& p = c.projections[k];
      idem.see(op_norm(p * p - p));
      if (k > 0 && !psd_leq(c.projections[k - 1], p)) ++non_monotone;
      recon.see(action_gap(chain[k].kraus(), m, [&](const CMatrix& x) {
        return CMatrix(c.isometry.adjoint() * tensor(x, p) * c.isometry);
      }));
    }
  }
  std::ostringstream d;
  d << idem.str("idempotency defect") << ", " << recon.str("reconstruction error") << ", " << non_monotone
    << " monotonicity failures";
  return {idem.ok() && recon.ok() && non_monotone == 0, d.str()};
}

Verdict norm_sandwich() {
  Rng rng(808);
  int violations = 0;
  Worst cb{1e-12};
  for (int rep = 0; rep < 100; ++rep) {
    const Index m = rng.integer(2, 3), n = rng.integer(1, 3);
    const CpMap a = rng.channel(m, n), b = rng.channel(m, n);
    const double lower = diamond_lower(a, b, static_cast<std::uint64_t>(rep), 8);
    if (lower > bound_rn(a, b) * (1 + 1e-9)) ++violations;
    if (lower > bound_dilation_diff(common_dilation(a, b)) * (1 + 1e-9)) ++violations;
    cb.see(std::abs(cb_norm_cp(a) - 1.0));
  }
  const double flip = diamond_lower(identity_map(2), unitary_conjugation(pauli::x()));
  const bool flip_ok = flip >= 2.0 - 1e-4 && flip <= 2.0;
  std::ostringstream d;
  d.precision(17);
  d << violations << " sandwich violations, id vs X = " << flip << ", " << cb.str("cb-norm deviation");
  return {violations == 0 && flip_ok && cb.ok(), d.str()};
}

Verdict common_dilations() {
  Rng rng(909);
  Worst recon{1e-9};
  int violations = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const Index m = rng.integer(1, 3), n = rng.integer(1, 3);
    const CpMap a = rep % 2 ? rng.channel(m, n) : rng.cp_map(m, n);
    const CpMap b = rep % 2 ? rng.channel(m, n) : rng.cp_map(m, n);
    const CommonDilationPair p = common_dilation(a, b);
    const CMatrix one = identity(p.env_dim);
    recon.see(action_gap(a.kraus(), m, [&](const CMatrix& x) { return CMatrix(p.v1.adjoint() * tensor(x, one) * p.v1); }));
    recon.see(action_gap(b.kraus(), m, [&](const CMatrix& x) { return CMatrix(p.v2.adjoint() * tensor(x, one) * p.v2); }));
    if (op_norm(p.v1 - p.v2) > static_cast<double>(m) * std::sqrt(bound_rn(a, b))) ++violations;
  }
  std::ostringstream d;
  d << recon.str("reconstruction error") << ", " << violations << " inequality violations";
  return {recon.ok() && violations == 0, d.str()};
}

Verdict faithful_states() {
  Rng rng(1010);
  Worst uniform{1e-12};
  int failures = 0;
  for (int rep = 0; rep < 50; ++rep) {
    const Index m = rng.integer(1, 4), n = rng.integer(1, 4);
    const CpMap t = rng.cp_map(m, n);
    const RVector flat = RVector::Constant(m, 1.0 / static_cast<double>(m));
    uniform.see(max_abs(faithful_rn(t, FaithfulState(flat)).f - to_choi(t).matrix()));

    RVector p(m);
    for (Index i = 0; i < m; ++i) p(i) = rng.uniform(0.02, 1.0);
    p /= p.sum();
    const FaithfulState w(p, rng.unitary(m));
    try {
      const FaithfulDerivative f = faithful_rn(t, w);
      if (!dominates(t, scaled(faithful_channel(w, n), f.c))) ++failures;
      const double bound = w.inverse_density_norm() * w.inverse_density_norm() * cb_norm_cp(t);
      if (f.c > bound * (1 + 1e-9)) ++failures;
    } catch (const Error&) {
      ++failures;
    }
  }
  std::ostringstream d;
  d << uniform.str("uniform-state deviation") << ", " << failures << " domination or bound failures";
  return {uniform.ok() && failures == 0, d.str()};
}

std::string capture(const std::string& command) {
  std::string out;
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) return "<popen failed>";
  char buffer[4096];
  std::size_t got;
  while ((got = fread(buffer, 1, sizeof buffer, pipe)) > 0) out.append(buffer, got);
  const int status = pclose(pipe);
  if (status != 0) out += "<exit status " + std::to_string(status) + ">";
  return out;
}

Verdict cli_determinism() {
  const std::string cli = CPCALC_CLI_PATH;
  const std::string dir = CPCALC_SAMPLES_DIR;
  const std::vector<std::string> commands{
      cli + " --seed 7 --restarts 64 --threads 4 diamond " + dir + "/damping.json " + dir + "/phi22.json",
      cli + " --seed 7 --restarts 64 --threads 1 diamond " + dir + "/damping.json " + dir + "/phi22.json",
      cli + " chain " + dir + "/damping_quarter.json " + dir + "/damping_half.json " + dir + "/damping.json",
  };
  const std::string reference = capture(commands[0]);
  int differing = 0;
  for (int run = 0; run < 10; ++run)
    if (capture(commands[0]) != reference) ++differing;
  // Thread count must not change the bytes either.
  if (capture(commands[1]) != reference) ++differing;
  const std::string chain = capture(commands[2]);
  for (int run = 0; run < 10; ++run)
    if (capture(commands[2]) != chain) ++differing;
  const bool sane = reference.find("\"lower\"") != std::string::npos && chain.find("\"projections\"") != std::string::npos;
  std::ostringstream d;
  d << differing << " differing outputs over 21 reruns";
  if (!sane) d << " (unexpected output: " << reference.substr(0, 80) << ")";
  return {differing == 0 && sane, d.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"representation round trips", round_trips},
      {"Radon-Nikodym recovery and reconstruction", rn_correctness},
      {"Choi domination test agrees with sampled CP condition", domination_oracle},
      {"Jamiolkowski operator bounds, action formula and operation criterion", jamiolkowski_bounds},
      {"Choi composition rule", composition},
      {"distinct channels are never ordered", channel_rigidity},
      {"ordered chains dilate to monotone projections", chain_pipeline},
      {"CB-norm estimate sandwiched by the upper bounds", norm_sandwich},
      {"common dilation estimate", common_dilations},
      {"faithful-state derivative", faithful_states},
      {"CLI output is deterministic", cli_determinism},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[k].second();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!v.pass) ++failed;
    std::cout << (v.pass ? "[PASS]" : "[FAIL]") << " criterion " << (k + 1) << ": " << criteria[k].first << " -- "
              << v.detail << " [" << std::fixed;
    std::cout.precision(2);
    std::cout << secs << " s]" << std::defaultfloat << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failed == 0 ? 0 : 1;
}
