// Copyright 2026 The relmeter Authors
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


#include "support/fixtures.hpp"

#include <relmeter/cli.hpp>

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace relmeter;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out, err;
};

Result run_cli(std::vector<std::string> args, const std::string& stdin_text = "") {
  std::istringstream in(stdin_text);
  std::ostringstream out, err;
  Result r;
  r.code = cli::run(args, in, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("relmeter_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                        "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
    // The worked example: n3 is never watched, so it comes from --services.
    write("events.csv",
          "viewer_id,service_id,amount\n"
          "s1,n2,1\ns2,n1,5\ns2,n2,1\ns3,n2,2\ns4,n1,1\ns4,n2,3\ns5,n1,2\ns5,n2,6\ns6,n1,3\n");
    write("prices.csv", "viewer_id,price\ns1,2\ns2,4\ns3,2.5\ns4,2\ns5,1\ns6,3.5\n");
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    std::ofstream(dir_ / name) << text;
    return path(name);
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::vector<std::string> data() const {
    return {"--events", path("events.csv"), "--prices", path("prices.csv"), "--services", "n1,n2,n3"};
  }
  std::vector<std::string> with_data(std::vector<std::string> args) const {
    for (auto& a : data()) args.push_back(a);
    return args;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, ComputeSubscriberUniform) {
  const auto r = run_cli(with_data({"compute", "--indicator", "su"}));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out,
            "Service  SU Value       %\n"
            "n1           7.00   46.67\n"
            "n2           8.00   53.33\n"
            "n3           0.00    0.00\n"
            "Total       15.00  100.00\n");
}

TEST_F(CliTest, ComputeExactJsonRoundTrips) {
  const auto r = run_cli(with_data({"compute", "--indicator", "all", "--json", "--exact"}));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  std::map<std::string, std::vector<std::string>> values;
  for (const auto& ind : j["indicators"])
    for (const auto& row : ind["rows"]) {
      EXPECT_EQ(row.size(), 3u);
      values[ind["indicator"].get<std::string>()].push_back(row["value"].get<std::string>());
    }
  EXPECT_EQ(values["u"], (std::vector<std::string>{"5", "5", "5"}));
  EXPECT_EQ(values["su"], (std::vector<std::string>{"7", "8", "0"}));
  EXPECT_EQ(values["p"], (std::vector<std::string>{"55/8", "65/8", "0"}));
  EXPECT_EQ(values["sp"], (std::vector<std::string>{"91/12", "89/12", "0"}));
}

TEST_F(CliTest, ComputeFromStdinAndCsvStats) {
  std::ifstream f(path("events.csv"));
  const std::string log((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  const auto r = run_cli({"compute", "--events", "-", "--default-price", "1", "--indicator", "u", "--stats", "--format",
                          "csv"},
                         log);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "service,viewers,viewers_pct,exclusive,exclusive_pct,u_value,u_pct\n"
                   "n2,5,55.56,2,66.67,3.00,50.00\n"
                   "n1,4,44.44,1,33.33,3.00,50.00\n");
}

TEST_F(CliTest, AllocateAndStats) {
  auto r = run_cli(with_data({"allocate", "--indicator", "su", "--pool", "30", "--format", "csv"}));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "service,payout,pct\nn1,14.00,46.67\nn2,16.00,53.33\nn3,0.00,0.00\n");
  r = run_cli(with_data({"stats", "--format", "csv"}));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "service,viewers,viewers_pct,exclusive,exclusive_pct\nn1,4,44.44,1,33.33\nn2,5,55.56,2,66.67\nn3,0,0.00,0,0.00\n");
}

TEST_F(CliTest, AxiomsTable1MatchesAtFiveHundredTrials) {
  const auto r = run_cli({"axioms", "table1", "--trials", "500", "--seed", "42", "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out,
            "axiom,u,su,p,sp\nefficiency,Y,Y,Y,Y\nsymmetry,Y,Y,Y,Y\nstrong-symmetry,Y,Y,N,N\nhomogeneity,Y,Y,Y,Y\n"
            "consumption-sensitivity,Y,N,N,N\ncomposition,Y,Y,N,Y\nsharing-proofness,Y,N,Y,N\n"
            "non-manipulability,N,N,Y,Y\nnullity,N,Y,Y,Y\n");
  EXPECT_EQ(run_cli({"axioms", "theorems", "--trials", "50"}).code, 0);
}

TEST_F(CliTest, WhatIfMergeEchoesDescriptor) {
  const auto r = run_cli({"whatif", "merge-services", "--group", "1,2", "--survivor", "1", "--indicator", "u", "--matrix",
                          "0;1;5/2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("transformation: merge-services group=1,2 survivor=1"), std::string::npos);
  EXPECT_NE(r.out.find("group before 2/3, merged after 1/2"), std::string::npos);

  const auto j = nlohmann::json::parse(run_cli({"whatif", "scale", "--factor", "3", "--indicator", "p", "--matrix",
                                                "C=[1,0;2,3]", "--price-vector", "p=(2,5)", "--json"})
                                           .out);
  EXPECT_EQ(j["transformation"], "scale factor=3");
  for (const auto& row : j["indicators"][0]["rows"]) EXPECT_EQ(row["delta"], "0");
}

TEST_F(CliTest, WhatIfSplitAndShare) {
  auto r = run_cli(with_data({"whatif", "split-service", "--service", "1", "--fractions", "1/4,3/4", "--indicator", "sp"}));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("service before 91/12, parts after 91/12"), std::string::npos);
  r = run_cli(with_data({"whatif", "split-service", "--service", "1", "--fractions", "1/4,1/4"}));
  EXPECT_EQ(r.code, 1);
  r = run_cli({"whatif", "share-subscription", "--group", "1,2", "--survivor", "1", "--indicator", "sp", "--matrix",
               "0,2;1,1;1,1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("3/4    2/3  -1/12"), std::string::npos);
}

TEST_F(CliTest, ShapleyAndLemmas) {
  auto r = run_cli(with_data({"shapley", "verify"}));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("essential-su"), std::string::npos);
  r = run_cli(with_data({"lemmas", "--service", "1", "--json"}));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["service"], "n1");
  EXPECT_EQ(j["pairs"].size(), 6u);
  EXPECT_EQ(j["lemmas"].size(), 6u);
  r = run_cli({"lemmas", "--toy", "--m", "1/2", "--p1", "3", "--p2", "1"});
  EXPECT_EQ(r.code, 0) << r.out;
}

TEST_F(CliTest, SynthThenCompute) {
  const std::string cfg = write("cfg.json", R"({"services": 19, "subscribers": 2000, "rngSeed": 11})");
  auto r = run_cli({"synth", "--config", cfg, "--out", path("log.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::string catalog;
  for (int i = 1; i <= 19; ++i) catalog += (i > 1 ? "," : "") + std::string(i < 10 ? "s0" : "s") + std::to_string(i);
  EXPECT_NE(r.out.find(catalog), std::string::npos);
  r = run_cli({"compute", "--events", path("log.csv"), "--default-price", "1", "--services", catalog, "--indicator", "u"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 21);
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  for (int i = 0; i < 19; ++i) {
    std::getline(lines, line);
    EXPECT_TRUE(line.ends_with("5.26")) << line;
  }
  // Same seed, same bytes.
  run_cli({"synth", "--config", cfg, "--out", path("again.csv")});
  std::ifstream a(path("log.csv")), b(path("again.csv"));
  EXPECT_EQ(std::string(std::istreambuf_iterator<char>(a), {}), std::string(std::istreambuf_iterator<char>(b), {}));
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(run_cli({}).code, 1);
  EXPECT_EQ(run_cli({"compute", "--bogus"}).code, 1);
  EXPECT_EQ(run_cli({"frobnicate"}).code, 1);
  EXPECT_EQ(run_cli({"--help"}).code, 0);
  EXPECT_EQ(run_cli(with_data({"compute", "--indicator", "xx"})).code, 1);
  EXPECT_EQ(run_cli(with_data({"allocate", "--indicator", "u", "--pool", "-3"})).code, 1);
  EXPECT_EQ(run_cli({"compute", "--events", path("events.csv")}).code, 1);
  EXPECT_EQ(run_cli({"compute", "--events", path("missing.csv"), "--default-price", "1"}).code, 2);
  const std::string bad = write("bad.csv", "viewer_id,service_id,amount\nv1,a,-1\n");
  auto r = run_cli({"compute", "--events", bad, "--default-price", "1"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("MalformedRow"), std::string::npos);
  r = run_cli({"compute", "--events", path("events.csv"), "--prices", write("few.csv", "viewer_id,price\ns1,1\n")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("UnpricedViewer"), std::string::npos);
  EXPECT_EQ(run_cli({"shapley", "verify", "--matrix", "1;1;1", "--limit", "2"}).code, 2);
  EXPECT_EQ(run_cli({"axioms", "table1", "--trials", "0"}).code, 1);
  EXPECT_EQ(run_cli({"synth", "--config", write("c.json", "{\"services\": 0}"), "--out", path("x.csv")}).code, 2);
  EXPECT_EQ(run_cli({"synth", "--config", write("d.json", "{nope"), "--out", path("x.csv")}).code, 2);

  // Computation verbs never report a verification failure.
  for (const auto& args : {with_data({"compute"}), with_data({"stats"}), with_data({"ingest"}),
                           with_data({"allocate", "--indicator", "p", "--pool", "1"})})
    EXPECT_NE(run_cli(args).code, 3);
}

TEST_F(CliTest, DeterministicAcrossThreadCounts) {
  const auto base = run_cli({"axioms", "table1", "--trials", "40", "--json"});
  ::setenv("RELMETER_THREADS", "1", 1);
  const auto single = run_cli({"axioms", "table1", "--trials", "40", "--json"});
  ::unsetenv("RELMETER_THREADS");
  EXPECT_EQ(base.out, single.out);
  EXPECT_EQ(run_cli(with_data({"compute", "--json"})).out, run_cli(with_data({"compute", "--json"})).out);
}
