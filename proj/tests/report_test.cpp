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

#include <relmeter/report.hpp>

#include <gtest/gtest.h>

using namespace relmeter;
using fixtures::q;

namespace {

std::vector<std::string> strings(const std::vector<mpz_class>& units, int decimals = 2) {
  std::vector<std::string> out;
  for (const auto& u : units) out.push_back(format_units(u, decimals));
  return out;
}

Platform uniform_width(std::size_t n) {
  std::vector<std::vector<Rational>> rows(n, std::vector<Rational>{q(1)});
  return platform_from_dense({q(1)}, rows);
}

}  // namespace

TEST(Rounding, HalfAwayFromZero) {
  EXPECT_EQ(format_fixed(q(1, 8), 2), "0.13");
  EXPECT_EQ(format_fixed(q(-1, 8), 2), "-0.13");
  EXPECT_EQ(format_fixed(q(1, 3), 2), "0.33");
  EXPECT_EQ(format_fixed(q(2, 3), 0), "1");
  EXPECT_EQ(format_fixed(q(55, 8), 2), "6.88");
  EXPECT_EQ(format_fixed(q(7), 2), "7.00");
  EXPECT_EQ(format_fixed(q(1, 200), 2), "0.01");
  EXPECT_EQ(format_fixed(q(1, 201), 2), "0.00");
  EXPECT_EQ(format_units(mpz_class(5), 3), "0.005");
}

TEST(Apportion, Examples) {
  // Worked example SU: 7/15 and 8/15.
  EXPECT_EQ(strings(percent_units({q(7), q(8), q(0)}, q(15))), (std::vector<std::string>{"46.67", "53.33", "0.00"}));
  // Three equal thirds: the tie run of three does not fit the single spare unit.
  EXPECT_EQ(strings(percent_units({q(1), q(1), q(1)}, q(3))), (std::vector<std::string>{"33.33", "33.33", "33.33"}));
  // Three sixths of 100: the run rounds up because 100.02 is nearer than 99.98.
  EXPECT_EQ(strings(percent_units({q(1), q(1), q(1), q(3)}, q(6))),
            (std::vector<std::string>{"16.67", "16.67", "16.67", "50.00"}));
  EXPECT_EQ(strings(payout_units({q(1, 3), q(1, 3), q(1, 3)})), (std::vector<std::string>{"0.34", "0.33", "0.33"}));
  // Strict rule hands units out by descending remainder.
  EXPECT_EQ(strings(payout_units({q(1, 6), q(1, 2), q(1, 3)})), (std::vector<std::string>{"0.17", "0.50", "0.33"}));
  EXPECT_THROW(apportion({q(-1)}, TieRule::Strict), Error);
}

TEST(Apportion, UniformAtNineteenPrintsEqualPercents) {
  const Platform p = uniform_width(19);
  const auto pct = percent_units(uniform(p).values, p.success());
  for (const auto& u : pct) EXPECT_EQ(format_units(u, 2), "5.26");
}

TEST(Apportion, Properties) {
  Rng rng(71);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng() % 25;
    std::vector<Rational> xs;
    Rational total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      xs.push_back(rng() % 4 == 0 ? q(0) : random_positive(rng, 50, 9));
      total += xs.back();
    }
    if (sgn(total) == 0) continue;
    for (TieRule rule : {TieRule::Strict, TieRule::PreserveTies}) {
      std::vector<Rational> shares;
      for (const auto& x : xs) shares.push_back(x * 10000 / total);
      const auto units = apportion(shares, rule);
      mpz_class sum = 0;
      for (std::size_t i = 0; i < n; ++i) {
        // Each entry is its floor or its ceiling.
        EXPECT_LE(Rational(units[i]) - shares[i], 1);
        EXPECT_GT(Rational(units[i]) - shares[i], -1);
        sum += units[i];
        for (std::size_t j = 0; j < n; ++j)
          if (rule == TieRule::PreserveTies && shares[i] == shares[j]) EXPECT_EQ(units[i], units[j]);
      }
      if (rule == TieRule::Strict) EXPECT_EQ(sum, 10000);
      else EXPECT_LE(2 * abs(sum - 10000), n);
    }
  }
}

TEST(Apportion, PayoutsTotalThePool) {
  Rng rng(72);
  for (int trial = 0; trial < 200; ++trial) {
    const Platform p = random_platform(rng, 6, 8);
    const Rational pool = random_positive(rng, 1000, 7);
    for (IndicatorKind k : kBuiltinIndicators) {
      const auto units = payout_units(allocate_revenue(p, k, pool));
      mpz_class sum = 0;
      for (const auto& u : units) sum += u;
      EXPECT_EQ(sum, round_units(pool, 2));
    }
  }
}

TEST(RenderReport, TableLayout) {
  const Platform p = fixtures::worked_example();
  const auto su = subscriber_uniform(p);
  const std::string text = render_report(p, su, std::nullopt);
  EXPECT_EQ(text,
            "Service  SU Value       %\n"
            "1            7.00   46.67\n"
            "2            8.00   53.33\n"
            "3            0.00    0.00\n"
            "Total       15.00  100.00\n");
}

TEST(RenderReport, CsvWithAndWithoutStats) {
  const Platform p = fixtures::worked_example();
  const std::vector<RelevanceVector> all{uniform(p), subscriber_uniform(p), proportional(p), subscriber_proportional(p)};
  const std::string bare = render_report(p, all, std::nullopt, {Format::Csv});
  EXPECT_EQ(bare.substr(0, bare.find('\n')), "service,u_value,u_pct,su_value,su_pct,p_value,p_pct,sp_value,sp_pct");
  EXPECT_NE(bare.find("1,5.00,33.33,7.00,46.67,6.88,45.83,7.58,50.56"), std::string::npos);

  const std::string with = render_report(p, all, viewer_stats(p), {Format::Csv});
  EXPECT_EQ(with.substr(0, with.find('\n')),
            "service,viewers,viewers_pct,exclusive,exclusive_pct,u_value,u_pct,su_value,su_pct,p_value,p_pct,sp_value,sp_pct");
  EXPECT_NE(with.find("\n2,5,55.56,2,66.67,"), std::string::npos);
}

TEST(RenderReport, JsonSchemaAndExact) {
  const Platform p = fixtures::worked_example();
  const auto j = nlohmann::json::parse(render_report(p, proportional(p), std::nullopt, {Format::Json}));
  ASSERT_EQ(j["indicators"].size(), 1u);
  const auto& rows = j["indicators"][0]["rows"];
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& row : rows) {
    EXPECT_EQ(row.size(), 3u);
    EXPECT_TRUE(row.contains("service") && row.contains("value") && row.contains("percent"));
  }
  EXPECT_DOUBLE_EQ(rows[0]["value"].get<double>(), 6.88);
  EXPECT_EQ(j["indicators"][0]["indicator"], "p");

  const auto exact = nlohmann::json::parse(render_report(p, proportional(p), std::nullopt, {Format::Json, 2, true}));
  const auto& erows = exact["indicators"][0]["rows"];
  EXPECT_EQ(erows[0]["value"], "55/8");
  EXPECT_EQ(erows[1]["value"], "65/8");
  EXPECT_EQ(*parse_rational(erows[0]["value"].get<std::string>()), q(55, 8));
  EXPECT_EQ(exact["success"], "15");
}

TEST(RenderReport, Deterministic) {
  SynthConfig cfg;
  cfg.services = 19;
  cfg.subscribers = 3000;
  const Platform p = synthesize(cfg).platform;
  std::vector<RelevanceVector> all;
  for (IndicatorKind k : kBuiltinIndicators) all.push_back(evaluate(k, p));
  for (Format f : {Format::Table, Format::Csv, Format::Json})
    EXPECT_EQ(render_report(p, all, viewer_stats(p), {f}), render_report(p, all, viewer_stats(p), {f}));
}

TEST(RenderPayouts, Layout) {
  const Platform p = fixtures::worked_example();
  const auto pay = allocate_revenue(p, IndicatorKind::SubscriberUniform, q(30));
  EXPECT_EQ(render_payouts(p, IndicatorKind::SubscriberUniform, q(30), pay),
            "Service  Payout       %\n"
            "1         14.00   46.67\n"
            "2         16.00   53.33\n"
            "3          0.00    0.00\n"
            "Total     30.00  100.00\n");
  const auto third = allocate_revenue(uniform_width(3), IndicatorKind::Uniform, q(1));
  EXPECT_EQ(render_payouts(uniform_width(3), IndicatorKind::Uniform, q(1), third, {Format::Csv}),
            "service,payout,pct\n1,0.34,33.33\n2,0.33,33.33\n3,0.33,33.33\n");
}

TEST(RenderTable1, CsvMirrorsGrid) {
  CheckConfig cfg;
  cfg.trials = 30;
  const Table1 grid = table1_matrix(cfg);
  const std::string csv = render_table1(grid, Format::Csv);
  EXPECT_EQ(csv,
            "axiom,u,su,p,sp\n"
            "efficiency,Y,Y,Y,Y\n"
            "symmetry,Y,Y,Y,Y\n"
            "strong-symmetry,Y,Y,N,N\n"
            "homogeneity,Y,Y,Y,Y\n"
            "consumption-sensitivity,Y,N,N,N\n"
            "composition,Y,Y,N,Y\n"
            "sharing-proofness,Y,N,Y,N\n"
            "non-manipulability,N,N,Y,Y\n"
            "nullity,N,Y,Y,Y\n");
  const auto j = nlohmann::json::parse(render_table1(grid, Format::Json));
  EXPECT_TRUE(j["matches"].get<bool>());
  EXPECT_EQ(j["rows"].size(), 9u);
  EXPECT_TRUE(j["rows"][7]["cells"]["u"].contains("witness"));
  EXPECT_NE(render_table1(grid, Format::Table).find("matches"), std::string::npos);

  std::vector<TheoremReport> reports;
  for (Theorem t : kTheorems) reports.push_back(theorem_consistency(t, cfg, &grid));
  const std::string th = render_theorems(reports, Format::Csv);
  EXPECT_NE(th.find("T3,symmetry+homogeneity+consumption-sensitivity,u,pass,"), std::string::npos);
  for (const auto& r : nlohmann::json::parse(render_theorems(reports, Format::Json))) EXPECT_TRUE(r["consistent"].get<bool>());
}
