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

// JSON encoding shared by the CLI and library users. See docs/format.md.
//
//   complex        [re, im]
//   matrix         {"rows": r, "cols": c, "data": [complex, ...]}  (row-major)
//   CpMap          {"dim_in": m, "dim_out": n, "kraus": [matrix, ...]}
//   ChoiOperator   {"dim_in": m, "dim_out": n, "matrix": matrix}
//   POVM           {"elements": [matrix, ...]}
//   FaithfulState  {"p": [real, ...], "basis": matrix}   (basis optional)

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "cpcalc/norms.hpp"
#include "cpcalc/order.hpp"

namespace cpcalc::io {

using Json = nlohmann::ordered_json;

// Adding +0.0 turns -0.0 into 0.0 and leaves every other value alone.
inline Json complex_to_json(Complex z) { return Json::array({z.real() + 0.0, z.imag() + 0.0}); }

/// dump(2) layout, except that arrays holding only scalars stay on one line,
/// so a complex entry reads [re, im].
inline void dump_pretty(const Json& j, std::ostream& out, int depth = 0) {
  const std::string pad(static_cast<std::size_t>(2 * depth + 2), ' ');
  const std::string close(static_cast<std::size_t>(2 * depth), ' ');
  if (j.is_object() && !j.empty()) {
    out << "{\n";
    std::size_t k = 0;
    for (auto it = j.begin(); it != j.end(); ++it, ++k) {
      out << pad << Json(it.key()).dump() << ": ";
      dump_pretty(it.value(), out, depth + 1);
      out << (k + 1 < j.size() ? ",\n" : "\n");
    }
    out << close << '}';
  } else if (j.is_array() && !j.empty()) {
    const bool flat = std::none_of(j.begin(), j.end(), [](const Json& e) { return e.is_structured(); });
    if (flat) {
      out << '[';
      for (std::size_t k = 0; k < j.size(); ++k) out << (k ? ", " : "") << j[k].dump();
      out << ']';
      return;
    }
    out << "[\n";
    for (std::size_t k = 0; k < j.size(); ++k) {
      out << pad;
      dump_pretty(j[k], out, depth + 1);
      out << (k + 1 < j.size() ? ",\n" : "\n");
    }
    out << close << ']';
  } else {
    out << j.dump();
  }
}

inline Json to_json(const CMatrix& m) {
  Json data = Json::array();
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) data.push_back(complex_to_json(m(i, j)));
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

inline Json to_json(const CpMap& t) {
  Json kraus = Json::array();
  for (const auto& k : t.kraus()) kraus.push_back(to_json(k));
  return Json{{"dim_in", t.dim_in()}, {"dim_out", t.dim_out()}, {"kraus", std::move(kraus)}};
}

inline Json to_json(const ChoiOperator& c) {
  return Json{{"dim_in", c.dim_in()}, {"dim_out", c.dim_out()}, {"matrix", to_json(c.matrix())}};
}

inline Json to_json(const PovmDecomposition& p) {
  Json elements = Json::array();
  for (const auto& e : p.elements) elements.push_back(to_json(e));
  return Json{{"elements", std::move(elements)}};
}

inline Json to_json(const PvmChain& c) {
  Json projections = Json::array();
  for (const auto& p : c.projections) projections.push_back(to_json(p));
  return Json{{"dim_in", c.dim_in},
              {"env_dim", c.env_dim},
              {"isometry", to_json(c.isometry)},
              {"projections", std::move(projections)}};
}

inline Json to_json(const RnDerivative& d) {
  return Json{{"dim_in", d.dim_in}, {"dim_out", d.dim_out}, {"env_dim", d.env_dim}, {"f", to_json(d.f)}};
}

inline Json to_json(const NormReport& r) {
  Json out{{"lower", r.lower}, {"upper_rn", r.upper_rn}, {"upper_dilation", r.upper_dilation}};
  out["cb_exact"] = r.cb_exact ? Json(*r.cb_exact) : Json(nullptr);
  out["seed"] = r.seed;
  out["restarts"] = r.restarts;
  out["iterations"] = r.iterations;
  return out;
}

inline Json to_json(const FaithfulState& w) {
  Json p = Json::array();
  for (Index i = 0; i < w.dim(); ++i) p.push_back(w.p()(i));
  return Json{{"p", std::move(p)}, {"basis", to_json(w.basis())}};
}

// ---------------------------------------------------------------------------
// Decoding. Errors name the offending field by its JSON path.

namespace detail {

[[noreturn]] inline void schema_error(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::SchemaError, (path.empty() ? std::string("<root>") : path) + ": " + what);
}

inline const Json& field(const Json& j, const char* key, const std::string& path) {
  if (!j.is_object()) schema_error(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) schema_error(path, std::string("missing field \"") + key + "\"");
  return *it;
}

inline Index positive_int(const Json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<long long>() <= 0) schema_error(path, "expected a positive integer");
  return static_cast<Index>(j.get<long long>());
}

inline double number(const Json& j, const std::string& path) {
  if (!j.is_number()) schema_error(path, "expected a number");
  return j.get<double>();
}

}  // namespace detail

inline Complex complex_from_json(const Json& j, const std::string& path) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) detail::schema_error(path, "expected [re, im]");
  return {detail::number(j[0], path + "[0]"), detail::number(j[1], path + "[1]")};
}

inline CMatrix matrix_from_json(const Json& j, const std::string& path) {
  const Index rows = detail::positive_int(detail::field(j, "rows", path), path + ".rows");
  const Index cols = detail::positive_int(detail::field(j, "cols", path), path + ".cols");
  const Json& data = detail::field(j, "data", path);
  if (!data.is_array()) detail::schema_error(path + ".data", "expected an array");
  if (static_cast<Index>(data.size()) != rows * cols)
    detail::schema_error(path + ".data", "expected " + std::to_string(rows * cols) + " entries, got " +
                                             std::to_string(data.size()));
  std::vector<Complex> entries;
  entries.reserve(data.size());
  for (std::size_t k = 0; k < data.size(); ++k)
    entries.push_back(complex_from_json(data[k], path + ".data[" + std::to_string(k) + "]"));
  try {
    return make_matrix(rows, cols, entries);
  } catch (const Error& e) {
    detail::schema_error(path, e.message());
  }
}

inline CpMap cpmap_from_json(const Json& j) {
  const Index m = detail::positive_int(detail::field(j, "dim_in", ""), "dim_in");
  const Index n = detail::positive_int(detail::field(j, "dim_out", ""), "dim_out");
  const Json& kraus = detail::field(j, "kraus", "");
  if (!kraus.is_array() || kraus.empty()) detail::schema_error("kraus", "expected a non-empty array");
  std::vector<CMatrix> ops;
  for (std::size_t x = 0; x < kraus.size(); ++x) {
    const std::string path = "kraus[" + std::to_string(x) + "]";
    CMatrix k = matrix_from_json(kraus[x], path);
    if (k.rows() != m || k.cols() != n)
      detail::schema_error(path, "shape " + std::to_string(k.rows()) + "x" + std::to_string(k.cols()) +
                                     " does not match dim_in x dim_out = " + std::to_string(m) + "x" +
                                     std::to_string(n));
    ops.push_back(std::move(k));
  }
  return CpMap(m, n, std::move(ops));
}

/// Shape-checked and PSD-checked Choi operator.
inline ChoiOperator choi_from_json(const Json& j) {
  const Index m = detail::positive_int(detail::field(j, "dim_in", ""), "dim_in");
  const Index n = detail::positive_int(detail::field(j, "dim_out", ""), "dim_out");
  CMatrix f = matrix_from_json(detail::field(j, "matrix", ""), "matrix");
  if (f.rows() != m * n || f.cols() != m * n)
    detail::schema_error("matrix", "expected " + std::to_string(m * n) + "x" + std::to_string(m * n));
  if (op_norm(f - f.adjoint()) > tol::herm * std::max(1.0, op_norm(f)))
    throw Error(ErrorKind::NotHermitian, "Choi operator is not Hermitian");
  ChoiOperator c(std::move(f), m, n);
  require_choi_psd(c);
  return c;
}

inline PovmDecomposition povm_from_json(const Json& j) {
  const Json& elements = detail::field(j, "elements", "");
  if (!elements.is_array() || elements.empty()) detail::schema_error("elements", "expected a non-empty array");
  PovmDecomposition out;
  for (std::size_t i = 0; i < elements.size(); ++i) {
    const std::string path = "elements[" + std::to_string(i) + "]";
    CMatrix e = matrix_from_json(elements[i], path);
    if (!out.elements.empty() && (e.rows() != out.elements.front().rows() || e.cols() != out.elements.front().cols()))
      detail::schema_error(path, "element shape differs from elements[0]");
    if (e.rows() != e.cols()) detail::schema_error(path, "element must be square");
    if (!is_psd(e)) throw Error(ErrorKind::NotPsd, path + " is not positive semidefinite");
    out.elements.push_back(std::move(e));
  }
  return out;
}

inline FaithfulState faithful_state_from_json(const Json& j) {
  const Json& p = detail::field(j, "p", "");
  if (!p.is_array() || p.empty()) detail::schema_error("p", "expected a non-empty array");
  RVector weights(static_cast<Index>(p.size()));
  for (std::size_t i = 0; i < p.size(); ++i)
    weights(static_cast<Index>(i)) = detail::number(p[i], "p[" + std::to_string(i) + "]");
  if (j.contains("basis") && !j["basis"].is_null())
    return FaithfulState(std::move(weights), matrix_from_json(j["basis"], "basis"));
  return FaithfulState(std::move(weights));
}

// ---------------------------------------------------------------------------
// Files.

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1;
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    for (std::size_t k = 0; k < upto; ++k)
      if (text[k] == '\n') ++line;
    throw Error(ErrorKind::SchemaError, path + ":" + std::to_string(line) + ": malformed JSON (" + e.what() + ")");
  } catch (const nlohmann::json::exception& e) {
    // Number overflow and friends carry no position.
    throw Error(ErrorKind::SchemaError, path + ": unreadable JSON (" + e.what() + ")");
  }
}

using Input = std::variant<CpMap, ChoiOperator, PovmDecomposition>;

/// Decodes a JSON document, deciding its kind by its fields.
inline Input parse_input_json(const Json& j) {
  if (!j.is_object()) detail::schema_error("", "expected an object");
  if (j.contains("kraus")) return cpmap_from_json(j);
  if (j.contains("matrix")) return choi_from_json(j);
  if (j.contains("elements")) return povm_from_json(j);
  detail::schema_error("", "not a CP map, Choi operator or POVM (need \"kraus\", \"matrix\" or \"elements\")");
}

namespace detail {

template <class F>
auto decode_at(const std::string& path, F&& decode) {
  try {
    return decode();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::SchemaError) throw Error(ErrorKind::SchemaError, path + ": " + e.message());
    throw;
  }
}

}  // namespace detail

inline Input parse_input(const std::string& path) {
  const Json j = read_json_file(path);
  return detail::decode_at(path, [&] { return parse_input_json(j); });
}

inline FaithfulState load_faithful_state(const std::string& path) {
  const Json j = read_json_file(path);
  return detail::decode_at(path, [&] { return faithful_state_from_json(j); });
}

inline bool is_faithful_state_file(const std::string& path) {
  const Json j = read_json_file(path);
  return j.is_object() && j.contains("p") && !j.contains("kraus") && !j.contains("matrix") && !j.contains("elements");
}

}  // namespace cpcalc::io
