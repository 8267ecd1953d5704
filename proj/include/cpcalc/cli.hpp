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

// Front end of the cp-calculus tool. run() is the whole program minus
// process setup, so tests can drive it in-process.
//
// Exit codes: 0 success or affirmative verdict, 1 negative verdict,
// 2 usage or input error, 3 numeric failure. Reports are written only after
// the whole computation succeeded.

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "cpcalc/io.hpp"

namespace cpcalc::cli {

enum ExitCode : int { kOk = 0, kNegative = 1, kUsage = 2, kNumeric = 3 };

enum class Command {
  Validate,
  Choi,
  Canonical,
  Apply,
  Dominate,
  Derivative,
  Cmin,
  Chain,
  Naimark,
  Compose,
  Diamond,
  Bounds,
  Faithful,
};

struct Options {
  double tol = tol::psd;
  std::string format = "json";
  std::uint64_t seed = 0;
  int restarts = 32;
  Index max_dim = kDefaultMaxDim;
  unsigned threads = 0;
  double scale = 1.0;  // derivative --scale
  bool dual = false;   // apply --dual
};

struct AnalysisRequest {
  Command command = Command::Validate;
  std::vector<std::string> inputs;
  Options options;
};

struct Outcome {
  int code = kOk;
  io::Json report;
};

namespace detail {

struct CommandSpec {
  Command command;
  const char* name;
  const char* help;
  std::size_t min_inputs;
  std::size_t max_inputs;  // 0 = unbounded
};

inline const std::vector<CommandSpec>& command_table() {
  static const std::vector<CommandSpec> table = {
      {Command::Validate, "validate", "Check an input file and report its properties", 1, 1},
      {Command::Choi, "choi", "Choi operator F_T of a CP map", 1, 1},
      {Command::Canonical, "canonical", "Canonical Kraus set and minimal Stinespring dilation", 1, 1},
      {Command::Apply, "apply", "Apply a map to a matrix: MAP MATRIX", 2, 2},
      {Command::Dominate, "dominate", "Decide S <= T: S T", 2, 2},
      {Command::Derivative, "derivative", "Radon-Nikodym derivative of S with respect to T: S T", 2, 2},
      {Command::Cmin, "cmin", "Minimal c with S <= cT: S T", 2, 2},
      {Command::Chain, "chain", "Dilate a monotone chain T1 <= ... <= Tk to projections", 1, 0},
      {Command::Naimark, "naimark", "Naimark dilation of a finite POVM", 1, 1},
      {Command::Compose, "compose", "Choi operator of T2 o T1: T2 T1", 2, 2},
      {Command::Diamond, "diamond", "CB-norm report for T1 - T2", 2, 2},
      {Command::Bounds, "bounds", "Upper bounds on ||T1 - T2||_cb", 2, 2},
      {Command::Faithful, "faithful", "Derivative against a faithful-state channel: MAP STATE", 2, 2},
  };
  return table;
}

template <class T>
T expect(io::Input&& in, const std::string& path, const char* what) {
  if (auto* v = std::get_if<T>(&in)) return std::move(*v);
  throw Error(ErrorKind::InvalidArgument, path + " is not " + what);
}

inline void check_dims(Index m, Index n, const Options& o) {
  if (m * n > o.max_dim)
    throw Error(ErrorKind::DimensionLimit, "dimension product " + std::to_string(m * n) + " exceeds --max-dim " +
                                               std::to_string(o.max_dim));
}

inline CpMap load_map(const std::string& path, const Options& o) {
  io::Input in = io::parse_input(path);
  if (auto* c = std::get_if<ChoiOperator>(&in)) {
    check_dims(c->dim_in(), c->dim_out(), o);
    return from_choi(*c);
  }
  CpMap t = expect<CpMap>(std::move(in), path, "a CP map or Choi operator");
  check_dims(t.dim_in(), t.dim_out(), o);
  return t;
}

inline ChoiOperator load_choi(const std::string& path, const Options& o) {
  io::Input in = io::parse_input(path);
  if (auto* t = std::get_if<CpMap>(&in)) {
    check_dims(t->dim_in(), t->dim_out(), o);
    return to_choi(*t);
  }
  ChoiOperator c = expect<ChoiOperator>(std::move(in), path, "a CP map or Choi operator");
  check_dims(c.dim_in(), c.dim_out(), o);
  return c;
}

inline io::Json map_properties(const CpMap& t) {
  return io::Json{{"dim_in", t.dim_in()},
                  {"dim_out", t.dim_out()},
                  {"kraus_count", t.kraus().size()},
                  {"choi_rank", choi_rank(t)},
                  {"is_quantum_operation", is_quantum_operation(t)},
                  {"is_channel", is_channel(t)},
                  {"is_pure", is_pure(t)},
                  {"cb_norm", cb_norm_cp(t)}};
}

inline Outcome validate(const AnalysisRequest& r) {
  const std::string& path = r.inputs[0];
  if (io::is_faithful_state_file(path)) {
    const FaithfulState w = io::load_faithful_state(path);
    return {kOk, io::Json{{"kind", "faithful_state"},
                          {"dim", w.dim()},
                          {"min_weight", w.p().minCoeff()},
                          {"inverse_density_norm", w.inverse_density_norm()}}};
  }
  io::Input in = io::parse_input(path);
  io::Json report;
  if (auto* t = std::get_if<CpMap>(&in)) {
    check_dims(t->dim_in(), t->dim_out(), r.options);
    report = {{"kind", "cp_map"}};
    report.update(map_properties(*t));
  } else if (auto* c = std::get_if<ChoiOperator>(&in)) {
    check_dims(c->dim_in(), c->dim_out(), r.options);
    report = {{"kind", "choi"},
              {"dim_in", c->dim_in()},
              {"dim_out", c->dim_out()},
              {"rank", psd_rank(c->matrix())},
              {"is_quantum_operation", jam_is_operation(*c, r.options.tol)}};
  } else {
    const auto& p = std::get<PovmDecomposition>(in);
    CMatrix total = CMatrix::Zero(p.elements.front().rows(), p.elements.front().cols());
    for (const auto& e : p.elements) total += e;
    report = {{"kind", "povm"},
              {"dim", p.elements.front().rows()},
              {"elements", p.elements.size()},
              {"is_resolution", op_norm(total - identity(total.rows())) <= recon_tol(1.0)}};
  }
  return {kOk, std::move(report)};
}

inline CMatrix load_matrix(const std::string& path) {
  const io::Json j = io::read_json_file(path);
  try {
    return io::matrix_from_json(j, "");
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + e.message());
  }
}

inline Outcome execute(const AnalysisRequest& r) {
  const Options& o = r.options;
  const auto& in = r.inputs;
  switch (r.command) {
    case Command::Validate:
      return validate(r);
    case Command::Choi:
      return {kOk, io::to_json(load_choi(in[0], o))};
    case Command::Canonical: {
      const CpMap t = load_map(in[0], o);
      const CpMap canon = canonicalize(t);
      const StinespringDilation s = to_stinespring(t);
      return {kOk, io::Json{{"map", io::to_json(canon)}, {"env_dim", s.env_dim}, {"stinespring", io::to_json(s.v)}}};
    }
    case Command::Apply: {
      const CpMap t = load_map(in[0], o);
      const CMatrix a = load_matrix(in[1]);
      const CMatrix out = o.dual ? apply_dual(t, a) : apply(t, a);
      return {kOk, io::Json{{"picture", o.dual ? "schrodinger" : "heisenberg"}, {"result", io::to_json(out)}}};
    }
    case Command::Dominate: {
      const bool verdict = dominates(load_map(in[0], o), load_map(in[1], o), o.tol);
      return {verdict ? kOk : kNegative, io::Json{{"dominates", verdict}}};
    }
    case Command::Derivative: {
      const CpMap s = load_map(in[0], o);
      const CpMap t = load_map(in[1], o);
      const RnDerivative f = rn_derivative(s, t, o.scale);
      io::Json report = io::to_json(f);
      report["scale"] = o.scale;
      io::Json lambda = io::Json::array();
      if (f.env_dim > 0) {
        const HermEig eig = herm_eig(f.f);
        for (Index k = 0; k < eig.values.size(); ++k) lambda.push_back(eig.values(k));
      }
      report["spectrum"] = std::move(lambda);
      return {kOk, std::move(report)};
    }
    case Command::Cmin: {
      const CpMap s = load_map(in[0], o);
      const CpMap t = load_map(in[1], o);
      const DominationConstant c = c_min(s, t);
      const DominationConstant back = c_min(t, s);
      io::Json report{{"c_min", c.attained ? io::Json(c.c_min) : io::Json(nullptr)},
                      {"attained", c.attained},
                      {"uniformly_equivalent", c.attained && back.attained}};
      return {c.attained ? kOk : kNegative, std::move(report)};
    }
    case Command::Chain: {
      std::vector<CpMap> chain;
      for (const auto& path : in) chain.push_back(load_map(path, o));
      return {kOk, io::to_json(order_chain_dilation(chain))};
    }
    case Command::Naimark: {
      io::Input input = io::parse_input(in[0]);
      const auto povm = expect<PovmDecomposition>(std::move(input), in[0], "a POVM");
      check_dims(povm.elements.front().rows(), static_cast<Index>(povm.elements.size()), o);
      const NaimarkDilation n = naimark_dilate(povm);
      io::Json pvm = io::Json::array();
      for (const auto& e : n.pvm) pvm.push_back(io::to_json(e));
      return {kOk, io::Json{{"isometry", io::to_json(n.isometry)}, {"pvm", std::move(pvm)}}};
    }
    case Command::Compose:
      return {kOk, io::to_json(jam_compose(load_choi(in[0], o), load_choi(in[1], o)))};
    case Command::Diamond: {
      DiamondOptions opts;
      opts.seed = o.seed;
      opts.restarts = o.restarts;
      opts.threads = o.threads;
      return {kOk, io::to_json(norm_report(load_map(in[0], o), load_map(in[1], o), opts))};
    }
    case Command::Bounds: {
      const CpMap t1 = load_map(in[0], o);
      const CpMap t2 = load_map(in[1], o);
      const double rn = bound_rn(t1, t2);
      const CommonDilationPair pair = common_dilation(t1, t2);
      io::Json report{{"upper_rn", rn}, {"upper_dilation", bound_dilation_diff(pair)}};
      report["cb_exact"] = dominates(t2, t1, o.tol)
                               ? io::Json(op_norm(apply(t1, identity(t1.dim_in())) - apply(t2, identity(t2.dim_in()))))
                               : io::Json(nullptr);
      report["dilation_gap"] = op_norm(pair.v1 - pair.v2);
      report["dilation_gap_bound"] = static_cast<double>(t1.dim_in()) * std::sqrt(rn);
      return {kOk, std::move(report)};
    }
    case Command::Faithful: {
      const CpMap t = load_map(in[0], o);
      const FaithfulState w = io::load_faithful_state(in[1]);
      const FaithfulDerivative f = faithful_rn(t, w);
      return {kOk, io::Json{{"c", f.c}, {"bound", f.bound}, {"f", io::to_json(f.f)}}};
    }
  }
  throw Error(ErrorKind::InvalidArgument, "unknown command");
}

inline int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotDominated:
    case ErrorKind::NotMonotone:
      return kNegative;
    case ErrorKind::SchemaError:
    case ErrorKind::IoError:
    case ErrorKind::InvalidArgument:
    case ErrorKind::DimensionLimit:
    case ErrorKind::DimMismatch:
    case ErrorKind::ShapeMismatch:
      return kUsage;
    default:
      return kNumeric;
  }
}

inline void flatten(const io::Json& j, const std::string& prefix, std::ostream& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it)
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
  } else if (j.is_array()) {
    for (std::size_t k = 0; k < j.size(); ++k) flatten(j[k], prefix + "[" + std::to_string(k) + "]", out);
  } else {
    out << prefix << " = " << j.dump() << '\n';
  }
}

}  // namespace detail

/// Text rendering: one "path = value" line per scalar, numbers printed
/// exactly as in the JSON rendering.
inline void write_report(const io::Json& report, const std::string& format, std::ostream& out) {
  if (format == "text") {
    detail::flatten(report, "", out);
  } else {
    io::dump_pretty(report, out);
    out << '\n';
  }
}

inline Outcome dispatch(const AnalysisRequest& req) {
  for (const auto& spec : detail::command_table()) {
    if (spec.command != req.command) continue;
    if (req.inputs.size() < spec.min_inputs || (spec.max_inputs && req.inputs.size() > spec.max_inputs))
      throw Error(ErrorKind::InvalidArgument, std::string(spec.name) + ": wrong number of input files");
  }
  return detail::execute(req);
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Radon-Nikodym calculus for completely positive maps", "cp-calculus"};
  app.fallthrough();
  app.require_subcommand(1);

  AnalysisRequest req;
  Options& o = req.options;
  app.add_option("--tol", o.tol, "PSD tolerance for verdicts")->check(CLI::PositiveNumber);
  app.add_option("--format", o.format, "Report format")->check(CLI::IsMember({"json", "text"}));
  app.add_option("--seed", o.seed, "RNG seed for the CB-norm estimator");
  app.add_option("--restarts", o.restarts, "Random restarts for the CB-norm estimator")->check(CLI::PositiveNumber);
  app.add_option("--max-dim", o.max_dim, "Largest accepted dim_in*dim_out")->check(CLI::PositiveNumber);
  app.add_option("--threads", o.threads, "Worker threads for the estimator (0 = all cores)");

  std::map<const CLI::App*, Command> commands;
  for (const auto& spec : detail::command_table()) {
    CLI::App* sub = app.add_subcommand(spec.name, spec.help);
    sub->add_option("inputs", req.inputs, "Input JSON files")->required();
    if (spec.command == Command::Derivative)
      sub->add_option("--scale", o.scale, "Derivative for S <= c*T, returned with 0 <= F <= c")
          ->check(CLI::PositiveNumber);
    if (spec.command == Command::Apply) sub->add_flag("--dual", o.dual, "Apply the Schrodinger-picture map");
    commands[sub] = spec.command;
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }
  for (const auto* sub : app.get_subcommands()) req.command = commands.at(sub);

  try {
    const Outcome outcome = dispatch(req);
    write_report(outcome.report, o.format, out);
    return outcome.code;
  } catch (const Error& e) {
    err << "cp-calculus: " << e.what() << '\n';
    return detail::exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "cp-calculus: " << e.what() << '\n';
    return kNumeric;
  }
}

}  // namespace cpcalc::cli
