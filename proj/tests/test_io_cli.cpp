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

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <regex>
#include <sstream>

#include "cpcalc/cli.hpp"
#include "support/oracles.hpp"

using namespace cpcalc;
using cpcalc::testing::Rng;

namespace {

std::string sample(const std::string& name) { return std::string(CPCALC_SAMPLES_DIR) + "/" + name; }

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

io::Json parsed(const CliResult& r) { return io::Json::parse(r.out); }

}  // namespace

TEST(Io, ParseIdentityChannel) {
  const io::Input in = io::parse_input(sample("identity2.json"));
  ASSERT_TRUE(std::holds_alternative<CpMap>(in));
  const CpMap& t = std::get<CpMap>(in);
  EXPECT_EQ(t.dim_in(), 2);
  EXPECT_EQ(t.dim_out(), 2);
  EXPECT_TRUE(is_channel(t));
}

TEST(Io, ShapeMismatchNamesTheIndex) {
  try {
    io::parse_input(sample("bad_kraus_shape.json"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SchemaError);
    EXPECT_NE(std::string(e.what()).find("kraus[1]"), std::string::npos) << e.what();
  }
}

TEST(Io, NonPsdChoiReportsEigenvalue) {
  try {
    io::parse_input(sample("bad_choi.json"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotPsd);
    EXPECT_NE(std::string(e.what()).find("-0.001"), std::string::npos) << e.what();
  }
}

TEST(Io, MalformedJsonReportsLine) {
  try {
    io::parse_input(sample("malformed.json"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SchemaError);
    EXPECT_NE(std::string(e.what()).find("malformed.json:3:"), std::string::npos) << e.what();
  }
}

TEST(Io, NumberOverflowIsSchemaError) {
  try {
    io::parse_input(sample("overflow.json"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SchemaError);
    EXPECT_NE(e.message().find("overflow.json"), std::string::npos) << e.message();
  }
  EXPECT_EQ(run({"validate", sample("overflow.json")}).code, 2);
}

TEST(Io, MissingFileIsIoError) {
  try {
    io::parse_input(sample("does_not_exist.json"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IoError);
  }
}

TEST(Io, RoundTripIsExact) {
  Rng rng(1);
  for (int rep = 0; rep < 10; ++rep) {
    const CpMap t = rng.cp_map(rng.integer(1, 4), rng.integer(1, 4));
    const io::Json j = io::Json::parse(io::to_json(t).dump());
    const CpMap back = io::cpmap_from_json(j);
    ASSERT_EQ(back.kraus().size(), t.kraus().size());
    for (std::size_t x = 0; x < t.kraus().size(); ++x) EXPECT_EQ(back.kraus()[x], t.kraus()[x]);
  }
}

TEST(Io, ComplexEncoding) {
  CMatrix m(1, 2);
  m(0, 0) = Complex(1.5, -2.0);
  m(0, 1) = Complex(0.0, 0.25);
  EXPECT_EQ(io::to_json(m).dump(), R"({"rows":1,"cols":2,"data":[[1.5,-2.0],[0.0,0.25]]})");
  // Plain numbers are accepted as real entries.
  const CMatrix r = io::matrix_from_json(io::Json::parse(R"({"rows":1,"cols":2,"data":[3,[0,1]]})"), "m");
  EXPECT_EQ(r(0, 0), Complex(3.0, 0.0));
  EXPECT_EQ(r(0, 1), Complex(0.0, 1.0));
}

TEST(Io, SchemaErrorsNameFields) {
  const auto bad = io::Json::parse(R"({"dim_in":2,"dim_out":2,"kraus":[{"rows":2,"cols":2,"data":[[1,0],[0,0],[0,0]]}]})");
  try {
    io::cpmap_from_json(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SchemaError);
    EXPECT_NE(std::string(e.what()).find("kraus[0].data"), std::string::npos) << e.what();
  }
  try {
    io::parse_input_json(io::Json::parse(R"({"dim_in":2})"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SchemaError);
  }
}

TEST(Cli, DominateExitCodes) {
  const CliResult yes = run({"dominate", sample("half_identity2.json"), sample("identity2.json")});
  EXPECT_EQ(yes.code, 0) << yes.err;
  EXPECT_EQ(parsed(yes), io::Json::parse(R"({"dominates": true})"));

  const CliResult no = run({"dominate", sample("identity2.json"), sample("zflip.json")});
  EXPECT_EQ(no.code, 1);
  EXPECT_EQ(parsed(no)["dominates"], false);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"dominate", sample("identity2.json")}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"--format", "xml", "validate", sample("identity2.json")}).code, 2);
  EXPECT_EQ(run({"validate", sample("missing.json")}).code, 2);
  const CliResult bad_shape = run({"validate", sample("bad_kraus_shape.json")});
  EXPECT_EQ(bad_shape.code, 2);
  EXPECT_TRUE(bad_shape.out.empty());
  EXPECT_NE(bad_shape.err.find("kraus[1]"), std::string::npos);
  EXPECT_EQ(run({"--max-dim", "3", "validate", sample("identity2.json")}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, NumericFailureExitCode) {
  const CliResult r = run({"validate", sample("bad_choi.json")});
  EXPECT_EQ(r.code, 3);
  EXPECT_TRUE(r.out.empty());
}

TEST(Cli, NegativeVerdicts) {
  EXPECT_EQ(run({"derivative", sample("identity2.json"), sample("zflip.json")}).code, 1);
  const CliResult c = run({"cmin", sample("phi22.json"), sample("identity2.json")});
  EXPECT_EQ(c.code, 1);
  EXPECT_TRUE(parsed(c)["c_min"].is_null());
  EXPECT_EQ(run({"chain", sample("identity2.json"), sample("half_identity2.json")}).code, 1);
}

TEST(Cli, ValidateReportsProperties) {
  const CliResult r = run({"validate", sample("phi22.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const io::Json j = parsed(r);
  EXPECT_EQ(j["kind"], "cp_map");
  EXPECT_EQ(j["choi_rank"], 4);
  EXPECT_EQ(j["is_channel"], true);
  EXPECT_EQ(j["is_pure"], false);

  const CliResult choi = run({"validate", sample("choi_identity2.json")});
  ASSERT_EQ(choi.code, 0) << choi.err;
  EXPECT_EQ(parsed(choi)["rank"], 1);

  const CliResult povm = run({"validate", sample("povm2.json")});
  ASSERT_EQ(povm.code, 0) << povm.err;
  EXPECT_EQ(parsed(povm)["is_resolution"], true);

  const CliResult state = run({"validate", sample("state_skewed.json")});
  ASSERT_EQ(state.code, 0) << state.err;
  EXPECT_EQ(parsed(state)["kind"], "faithful_state");
  EXPECT_DOUBLE_EQ(parsed(state)["inverse_density_norm"].get<double>(), 10.0);

  const CliResult bad = run({"validate", sample("bad_state.json")});
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.err.find("sum to 1"), std::string::npos) << bad.err;
}

TEST(Cli, JsonLayoutKeepsComplexPairsOnOneLine) {
  const CliResult r = run({"canonical", sample("xflip.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("\n          [0.0, 0.0],\n"), std::string::npos) << r.out;
  EXPECT_EQ(r.out.find("-0.0"), std::string::npos) << r.out;
  EXPECT_EQ(r.out.substr(0, 11), "{\n  \"map\": ");
  // The layout is cosmetic: the parsed document equals the library encoding.
  const CpMap canonical = canonicalize(std::get<CpMap>(io::parse_input(sample("xflip.json"))));
  EXPECT_EQ(parsed(r)["map"], io::to_json(canonical));
}

TEST(Cli, DerivativeAndCmin) {
  const CliResult d = run({"derivative", sample("half_identity2.json"), sample("identity2.json")});
  ASSERT_EQ(d.code, 0) << d.err;
  const io::Json j = parsed(d);
  EXPECT_EQ(j["env_dim"], 1);
  EXPECT_NEAR(j["spectrum"][0].get<double>(), 0.5, 1e-12);

  const CliResult scaled = run({"derivative", "--scale", "4", sample("identity2.json"), sample("phi22.json")});
  ASSERT_EQ(scaled.code, 0) << scaled.err;
  EXPECT_NEAR(parsed(scaled)["spectrum"][0].get<double>(), 4.0, 1e-9);

  const CliResult c = run({"cmin", sample("damping_half.json"), sample("damping.json")});
  ASSERT_EQ(c.code, 0) << c.err;
  EXPECT_NEAR(parsed(c)["c_min"].get<double>(), 0.5, 1e-12);
  EXPECT_EQ(parsed(c)["uniformly_equivalent"], true);
}

TEST(Cli, ApplyPictures) {
  const CliResult h = run({"apply", sample("phi22.json"), sample("sigma_z.json")});
  ASSERT_EQ(h.code, 0) << h.err;
  const CMatrix out = io::matrix_from_json(parsed(h)["result"], "result");
  EXPECT_LT(out.cwiseAbs().maxCoeff(), 1e-15);
  const CliResult s = run({"apply", "--dual", sample("xflip.json"), sample("sigma_z.json")});
  ASSERT_EQ(s.code, 0) << s.err;
  EXPECT_EQ(parsed(s)["picture"], "schrodinger");
  EXPECT_EQ(io::matrix_from_json(parsed(s)["result"], "result"), CMatrix(-pauli::z()));
}

TEST(Cli, ChainProducesMonotoneProjections) {
  const CliResult r = run({"chain", sample("damping_quarter.json"), sample("damping_half.json"), sample("damping.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const io::Json j = parsed(r);
  ASSERT_EQ(j["projections"].size(), 3u);
  std::vector<CMatrix> p;
  for (const auto& e : j["projections"]) p.push_back(io::matrix_from_json(e, "p"));
  for (std::size_t k = 0; k < p.size(); ++k) {
    EXPECT_LT(op_norm(p[k] * p[k] - p[k]), 1e-10);
    if (k) {
      EXPECT_TRUE(psd_leq(p[k - 1], p[k]));
    }
  }
}

TEST(Cli, DiamondIsDeterministic) {
  const std::vector<std::string> args{"--seed", "7", "--restarts", "64", "diamond", sample("identity2.json"),
                                      sample("xflip.json")};
  const CliResult a = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(run(args).out, a.out);
  std::vector<std::string> threaded = args;
  threaded.insert(threaded.begin(), {"--threads", "4"});
  EXPECT_EQ(run(threaded).out, a.out);
  const io::Json j = parsed(a);
  EXPECT_NEAR(j["lower"].get<double>(), 2.0, 1e-6);
  EXPECT_EQ(j["seed"], 7);
  EXPECT_EQ(j["restarts"], 64);
  EXPECT_TRUE(j["cb_exact"].is_null());
}

TEST(Cli, TextAndJsonAgree) {
  const std::vector<std::string> args{"bounds", sample("identity2.json"), sample("phi22.json")};
  const CliResult json = run(args);
  std::vector<std::string> text_args = args;
  text_args.insert(text_args.begin(), {"--format", "text"});
  const CliResult text = run(text_args);
  ASSERT_EQ(json.code, 0) << json.err;
  ASSERT_EQ(text.code, 0) << text.err;
  const io::Json j = parsed(json);
  std::istringstream lines(text.out);
  std::string line;
  int seen = 0;
  const std::regex pattern(R"(^([a-z_]+) = (.*)$)");
  while (std::getline(lines, line)) {
    std::smatch m;
    ASSERT_TRUE(std::regex_match(line, m, pattern)) << line;
    const io::Json value = io::Json::parse(m[2].str());
    if (value.is_number()) {
      const double a = value.get<double>(), b = j[m[1].str()].get<double>();
      EXPECT_LE(std::abs(a - b), 1e-12 * std::max(1.0, std::abs(b)));
    } else {
      EXPECT_EQ(value, j[m[1].str()]);
    }
    ++seen;
  }
  EXPECT_EQ(seen, static_cast<int>(j.size()));
}

TEST(Cli, ComposeAndChoiAcceptEitherForm) {
  const CliResult c = run({"compose", sample("choi_identity2.json"), sample("phi22.json")});
  ASSERT_EQ(c.code, 0) << c.err;
  const CMatrix f = io::matrix_from_json(parsed(c)["matrix"], "matrix");
  EXPECT_LT((f - identity(4)).cwiseAbs().maxCoeff(), 1e-12);
  const CliResult choi = run({"choi", sample("identity2.json")});
  ASSERT_EQ(choi.code, 0) << choi.err;
  EXPECT_EQ(parsed(choi)["matrix"]["data"][3], io::Json::parse("[2.0, 0.0]"));
}

TEST(Cli, FaithfulAndNaimark) {
  const CliResult f = run({"faithful", sample("identity2.json"), sample("state_skewed.json")});
  ASSERT_EQ(f.code, 0) << f.err;
  EXPECT_LE(parsed(f)["c"].get<double>(), 100.0);
  EXPECT_NEAR(parsed(f)["bound"].get<double>(), 100.0, 1e-9);
  const CliResult n = run({"naimark", sample("povm2.json")});
  ASSERT_EQ(n.code, 0) << n.err;
  EXPECT_EQ(parsed(n)["pvm"].size(), 2u);
  EXPECT_EQ(run({"naimark", sample("identity2.json")}).code, 2);
}

// Every console block in docs/format.md is real output; rerun each command and
// compare byte for byte. `cat` blocks show sample files verbatim.
TEST(Docs, FormatExamplesAreCurrent) {
  const std::filesystem::path root = CPCALC_SOURCE_DIR;
  std::ifstream doc(root / "docs" / "format.md");
  ASSERT_TRUE(doc) << "docs/format.md missing";
  std::vector<std::string> lines;
  for (std::string line; std::getline(doc, line);) lines.push_back(line);

  const auto previous = std::filesystem::current_path();
  std::filesystem::current_path(root);
  int checked = 0;
  for (std::size_t k = 0; k + 1 < lines.size(); ++k) {
    if (lines[k] != "```console") continue;
    const std::string command = lines[k + 1].substr(2);
    std::string shown;
    std::size_t end = k + 2;
    for (; end < lines.size() && lines[end] != "```"; ++end) shown += lines[end] + "\n";

    std::istringstream words(command);
    std::vector<std::string> args;
    for (std::string w; words >> w;) args.push_back(w);
    const bool merged = args.back() == "2>&1";
    if (merged) args.pop_back();

    std::string actual;
    if (args.front() == "cat") {
      std::ifstream in(args.at(1));
      actual.assign(std::istreambuf_iterator<char>(in), {});
    } else {
      ASSERT_EQ(args.front(), "cp-calculus") << command;
      const CliResult r = run({args.begin() + 1, args.end()});
      actual = merged ? r.out + r.err : r.out;
    }
    if (!actual.empty() && actual.back() != '\n') actual += '\n';
    EXPECT_EQ(shown, actual) << command;
    ++checked;
    k = end;
  }
  std::filesystem::current_path(previous);
  EXPECT_GE(checked, 20);
}
