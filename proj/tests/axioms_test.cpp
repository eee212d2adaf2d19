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
#include "support/oracle.hpp"

#include <relmeter/axioms.hpp>

#include <gtest/gtest.h>

using namespace relmeter;
using fixtures::q;
using K = IndicatorKind;

namespace {

std::vector<Rational> v(std::initializer_list<Rational> xs) { return xs; }

ErrorCode code_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected relmeter::Error";
  return ErrorCode::InvalidConfig;
}

std::vector<ServiceId> services(std::initializer_list<std::size_t> ids) {
  std::vector<ServiceId> out;
  for (auto i : ids) out.push_back(ServiceId{i});
  return out;
}

std::vector<SubscriberId> subscribers(std::initializer_list<std::size_t> ids) {
  std::vector<SubscriberId> out;
  for (auto i : ids) out.push_back(SubscriberId{i});
  return out;
}

Platform column(std::initializer_list<Rational> c, Rational price = q(1)) { return fixtures::single_column(c, price); }

}  // namespace

TEST(ComposePlatforms, Examples) {
  const Platform joined = compose_platforms(column({q(0), q(1), q(1)}), column({q(2), q(1), q(1)}));
  EXPECT_EQ(joined.service_count(), 3u);
  EXPECT_EQ(joined.subscriber_count(), 2u);
  EXPECT_EQ(joined.success(), q(2));
  EXPECT_EQ(joined.matrix().at(ServiceId{0}, SubscriberId{1}), q(2));

  const Platform p = fixtures::worked_example();
  Platform acc = restrict_subscribers(p, subscribers({0}));
  for (std::size_t s = 1; s < 6; ++s) acc = compose_platforms(acc, restrict_subscribers(p, subscribers({s})));
  EXPECT_EQ(acc, p);

  EXPECT_EQ(code_of([] { compose_platforms(column({q(1), q(1)}), column({q(1), q(1), q(1)})); }),
            ErrorCode::ServiceSetMismatch);
}

TEST(ComposePlatforms, RestrictThenConcatenateRoundTrips) {
  const Platform p = fixtures::worked_example();
  const Platform first = restrict_subscribers(p, subscribers({0}));
  const Platform rest = restrict_subscribers(p, subscribers({1, 2, 3, 4, 5}));
  EXPECT_EQ(compose_platforms(first, rest), p);
}

TEST(MergeServices, Examples) {
  const Platform merged = merge_services(column({q(0), q(1), q(5, 2)}), services({0, 1}), ServiceId{0});
  ASSERT_EQ(merged.service_count(), 2u);
  EXPECT_EQ(merged.matrix().service_totals(), v({q(1), q(5, 2)}));
  EXPECT_EQ(uniform(merged)[0], q(1, 2));

  const Platform all = merge_services(fixtures::worked_example(), services({0, 1, 2}), ServiceId{1});
  ASSERT_EQ(all.service_count(), 1u);
  std::vector<Rational> row;
  for (std::size_t s = 0; s < 6; ++s) row.push_back(all.matrix().at(ServiceId{0}, SubscriberId{s}));
  EXPECT_EQ(row, v({q(1), q(6), q(2), q(4), q(8), q(3)}));

  const Platform p = fixtures::worked_example();
  EXPECT_EQ(code_of([&] { merge_services(p, services({0, 1}), ServiceId{2}); }), ErrorCode::SurvivorNotInGroup);
  EXPECT_EQ(code_of([&] { merge_services(p, services({0}), ServiceId{0}); }), ErrorCode::GroupTooSmall);
  EXPECT_EQ(code_of([&] { merge_services(p, services({0, 5}), ServiceId{0}); }), ErrorCode::IndexOutOfBounds);
}

TEST(MergeServices, ZeroRowKeepsProportionalSurvivor) {
  const Platform p = fixtures::worked_example();
  const auto group = services({0, 2});
  const Platform merged = merge_services(p, group, ServiceId{0});
  for (K k : {K::Proportional, K::SubscriberProportional}) {
    const auto before = evaluate(k, p);
    EXPECT_EQ(evaluate(k, merged)[0], before[0] + before[2]);
  }
}

TEST(MergeServices, KeepsLabelsOfRemainingServices) {
  const Platform p = fixtures::to_platform(fixtures::worked_example_dense(), {{"a", "b", "c"}, {}});
  const Platform merged = merge_services(p, services({0, 2}), ServiceId{2});
  EXPECT_EQ(merged.labels().services, (std::vector<std::string>{"b", "c"}));
  EXPECT_EQ(merged.matrix().service_total(ServiceId{1}), q(11));
}

TEST(SplitService, Examples) {
  const Platform toy = fixtures::toy(q(4), q(1), q(1));
  const std::vector<SparseRow> halves{{{0, q(2)}}, {{0, q(2)}}};
  const Platform split = split_service(toy, ServiceId{0}, halves);
  ASSERT_EQ(split.service_count(), 4u);
  EXPECT_EQ(split.matrix().service_totals(), v({q(2), q(2), q(2), q(0)}));
  EXPECT_EQ(merge_services(split, services({0, 1}), ServiceId{0}), toy);

  const std::vector<SparseRow> empty_parts{{}, {}};
  const Platform zero_split = split_service(toy, ServiceId{2}, empty_parts);
  for (K k : {K::SubscriberUniform, K::Proportional, K::SubscriberProportional}) {
    const auto r = evaluate(k, zero_split);
    EXPECT_EQ(r[2], 0);
    EXPECT_EQ(r[3], 0);
  }

  const std::vector<SparseRow> wrong{{{0, q(1)}}, {{0, q(2)}}};
  EXPECT_EQ(code_of([&] { split_service(toy, ServiceId{0}, wrong); }), ErrorCode::PartsDoNotSum);
  const std::vector<SparseRow> one{{{0, q(4)}}};
  EXPECT_EQ(code_of([&] { split_service(toy, ServiceId{0}, one); }), ErrorCode::GroupTooSmall);
}

TEST(MergeSubscribers, Examples) {
  const Platform p = platform_from_dense({q(1), q(1)}, {{q(0), q(2)}, {q(1), q(1)}, {q(1), q(1)}});
  const Platform pooled = merge_subscribers(p, subscribers({0, 1}), SubscriberId{0});
  ASSERT_EQ(pooled.subscriber_count(), 1u);
  EXPECT_EQ(pooled.prices(), v({q(2)}));
  EXPECT_EQ(pooled.matrix().service_totals(), v({q(2), q(2), q(2)}));
  EXPECT_EQ(subscriber_proportional(p).values, v({q(1, 2), q(3, 4), q(3, 4)}));
  EXPECT_EQ(subscriber_proportional(pooled).values, v({q(2, 3), q(2, 3), q(2, 3)}));
  EXPECT_EQ(proportional(p).values, proportional(pooled).values);
  EXPECT_EQ(proportional(p).values, v({q(2, 3), q(2, 3), q(2, 3)}));

  const Platform dup = platform_from_dense({q(1), q(1)}, {{q(3), q(3)}, {q(1), q(1)}});
  const Platform half = merge_subscribers(dup, subscribers({0, 1}), SubscriberId{1});
  EXPECT_EQ(half.subscriber_count(), 1u);
  EXPECT_EQ(half.matrix().service_totals(), dup.matrix().service_totals());

  EXPECT_EQ(code_of([&] { merge_subscribers(p, subscribers({0, 1}), SubscriberId{2}); }), ErrorCode::SurvivorNotInGroup);
}

TEST(Registry, EveryEntryRefutesExactlyItsListedIndicators) {
  for (const Counterexample& ce : counterexample_registry()) {
    for (K k : kBuiltinIndicators) {
      const Evaluator r = Indicator::builtin(k).evaluate;
      const bool listed = std::find(ce.refutes.begin(), ce.refutes.end(), k) != ce.refutes.end();
      EXPECT_EQ(observe(ce.axiom, r, ce.platform, ce.transformation).violated, listed)
          << ce.name << " / " << to_string(k);
    }
  }
}

TEST(Registry, KnownGaps) {
  const auto& reg = counterexample_registry();
  auto find = [&](std::string_view name) -> const Counterexample& {
    return *std::find_if(reg.begin(), reg.end(), [&](const auto& c) { return c.name == name; });
  };
  const Evaluator u = Indicator::builtin(K::Uniform).evaluate;
  const auto merge = observe(AxiomId::NonManipulability, u, find("merge-uniform").platform,
                             find("merge-uniform").transformation);
  EXPECT_EQ(merge.after[0], q(1, 2));
  EXPECT_EQ(merge.before[0] + merge.before[1], q(2, 3));

  const Evaluator su = Indicator::builtin(K::SubscriberUniform).evaluate;
  const auto split = observe(AxiomId::NonManipulability, su, find("merge-split-scenario").platform,
                             find("merge-split-scenario").transformation);
  EXPECT_EQ(split.after[0], q(1, 2));
  EXPECT_EQ(split.before[0] + split.before[1], q(2, 3));

  const Evaluator p = Indicator::builtin(K::Proportional).evaluate;
  const auto comp = observe(AxiomId::Composition, p, find("compose-proportional").platform,
                            find("compose-proportional").transformation);
  EXPECT_EQ(comp.before, v({q(1, 2), q(3, 4), q(3, 4)}));
  EXPECT_EQ(comp.after, v({q(2, 3), q(2, 3), q(2, 3)}));

  const auto share = observe(AxiomId::SharingProofness, su, find("share-subscriber-uniform").platform,
                             find("share-subscriber-uniform").transformation);
  EXPECT_EQ(share.before, v({q(1), q(1, 2), q(1, 2)}));
  EXPECT_EQ(share.after, v({q(2, 3), q(2, 3), q(2, 3)}));
}

TEST(ConsumptionSensitivity, PersistentGapOnFlatVersusScaled) {
  const Platform base = column({q(0), q(1), q(2)}, q(3));
  const SensitivitySequence seq{};
  for (K k : {K::Proportional, K::SubscriberProportional}) {
    const auto obs = observe(AxiomId::ConsumptionSensitivity, Indicator::builtin(k).evaluate, base, seq);
    EXPECT_TRUE(obs.violated);
    EXPECT_EQ(obs.before, v({q(1), q(1), q(1)}));
    EXPECT_EQ(obs.after, v({q(0), q(1), q(2)}));
    Rational gap = 0;
    for (std::size_t i = 0; i < 3; ++i) gap += abs(obs.before[i] - obs.after[i]);
    EXPECT_EQ(gap, q(2));  // 2p/3 per unit price, p = 3
  }
  const auto su = observe(AxiomId::ConsumptionSensitivity, Indicator::builtin(K::SubscriberUniform).evaluate, base, seq);
  EXPECT_TRUE(su.violated);
  EXPECT_EQ(su.after, v({q(0), q(3, 2), q(3, 2)}));
  EXPECT_FALSE(observe(AxiomId::ConsumptionSensitivity, Indicator::builtin(K::Uniform).evaluate, base, seq).violated);

  // An all-ones platform has no input gap to shrink.
  EXPECT_FALSE(observe(AxiomId::ConsumptionSensitivity, Indicator::builtin(K::Proportional).evaluate,
                       column({q(1), q(1), q(1)}), seq)
                   .violated);
}

TEST(Observe, RejectsTransformationsThatDoNotFit) {
  const Platform p = fixtures::worked_example();
  const Evaluator u = Indicator::builtin(K::Uniform).evaluate;
  EXPECT_EQ(code_of([&] { observe(AxiomId::Symmetry, u, p, Rescale{q(2)}); }), ErrorCode::InvalidConfig);
  EXPECT_EQ(code_of([&] { observe(AxiomId::Symmetry, u, p, ServicePair{ServiceId{0}, ServiceId{1}}); }),
            ErrorCode::InvalidConfig);
  EXPECT_EQ(code_of([&] { observe(AxiomId::Nullity, u, p, ZeroService{ServiceId{0}}); }), ErrorCode::InvalidConfig);
}

TEST(CheckAxiom, Examples) {
  const CheckConfig cfg;
  const auto nm = check_axiom(AxiomId::NonManipulability, K::Uniform, cfg);
  ASSERT_FALSE(nm.holds);
  ASSERT_TRUE(nm.witness);
  EXPECT_EQ(nm.witness->platform, column({q(0), q(1), q(5, 2)}));
  EXPECT_EQ(nm.witness->source, "registered instance merge-uniform");

  for (K k : kBuiltinIndicators) EXPECT_TRUE(check_axiom(AxiomId::Efficiency, k, cfg).holds);

  const auto cs = check_axiom(AxiomId::ConsumptionSensitivity, K::Proportional, cfg);
  ASSERT_FALSE(cs.holds);
  EXPECT_EQ(cs.witness->platform, column({q(0), q(1), q(2)}));

  const auto comp = check_axiom(AxiomId::Composition, K::SubscriberProportional, cfg);
  EXPECT_TRUE(comp.holds);
  EXPECT_EQ(comp.trials_run, cfg.trials);
  EXPECT_NE(comp.justification.find("column by column"), std::string::npos);

  CheckConfig bad;
  bad.max_services = 2;
  EXPECT_EQ(code_of([&] { check_axiom(AxiomId::Efficiency, K::Uniform, bad); }), ErrorCode::InvalidConfig);
  bad = {};
  bad.trials = 0;
  EXPECT_EQ(code_of([&] { check_axiom(AxiomId::Efficiency, K::Uniform, bad); }), ErrorCode::InvalidConfig);
}

TEST(CheckAxiom, ExternalCopyOfProportionalIsRefuted) {
  const Indicator ext = Indicator::external("p-copy", [](const Platform& p) { return proportional(p); });
  const CheckConfig cfg;
  const auto comp = check_axiom(AxiomId::Composition, ext, cfg);
  ASSERT_FALSE(comp.holds);
  EXPECT_TRUE(comp.witness->source.starts_with("registered"));

  // Strong symmetry for proportional is also found by random trials.
  for (std::size_t k = 0; k < 50; ++k) {
    auto trial = generate_trial(AxiomId::StrongSymmetry, trial_seed(cfg, AxiomId::StrongSymmetry, k), cfg);
    ASSERT_TRUE(trial);
    if (observe(AxiomId::StrongSymmetry, ext.evaluate, trial->platform, trial->transformation).violated) {
      SUCCEED();
      return;
    }
  }
  ADD_FAILURE() << "no random strong-symmetry violation for proportional in 50 trials";
}

TEST(CheckAxiom, ExternalIndicatorWithoutRegistryHit) {
  // Mixture of uniform and proportional: efficient and symmetric, but not
  // null on zero rows. Its nullity violation comes from the registry instance.
  const Indicator mix = Indicator::external("mix", [](const Platform& p) {
    auto u = uniform(p), r = proportional(p);
    for (std::size_t i = 0; i < u.size(); ++i) u.values[i] = (u.values[i] + r.values[i]) / 2;
    u.kind = IndicatorKind::External;
    return u;
  });
  const CheckConfig cfg;
  EXPECT_TRUE(check_axiom(AxiomId::Efficiency, mix, cfg).holds);
  EXPECT_TRUE(check_axiom(AxiomId::Symmetry, mix, cfg).holds);
  const auto nul = check_axiom(AxiomId::Nullity, mix, cfg);
  EXPECT_FALSE(nul.holds);
  const auto nm = check_axiom(AxiomId::NonManipulability, mix, cfg);
  EXPECT_FALSE(nm.holds);
  EXPECT_TRUE(replay(*nm.witness, AxiomId::NonManipulability, mix.evaluate, cfg));
}

TEST(CheckAxiom, RandomWitnessesReplayFromTheirSeed) {
  // A broken evaluator that favors the first service; every efficiency
  // trial exposes it, and the witness carries the seed.
  const Indicator skewed = Indicator::external("skewed", [](const Platform& p) {
    auto r = uniform(p);
    r.values[0] += 1;
    return r;
  });
  const CheckConfig cfg;
  const auto verdict = check_axiom(AxiomId::Efficiency, skewed, cfg);
  ASSERT_FALSE(verdict.holds);
  ASSERT_TRUE(verdict.witness->seed);
  EXPECT_EQ(*verdict.witness->seed, trial_seed(cfg, AxiomId::Efficiency, 0));
  EXPECT_TRUE(replay(*verdict.witness, AxiomId::Efficiency, skewed.evaluate, cfg));
  EXPECT_FALSE(replay(*verdict.witness, AxiomId::Efficiency, Indicator::builtin(K::Uniform).evaluate, cfg));
}

TEST(Table1, MatchesExpectedPatternAndWitnessesReplay) {
  CheckConfig cfg;
  cfg.trials = 100;
  const Table1 grid = table1_matrix(cfg);
  ASSERT_EQ(grid.cells.size(), 36u);
  EXPECT_TRUE(grid.mismatches().empty());
  EXPECT_TRUE(grid.matches_expected());
  for (const auto& [key, verdict] : grid.cells) {
    if (verdict.holds) {
      EXPECT_EQ(verdict.trials_run, cfg.trials) << to_string(key.first);
      continue;
    }
    ASSERT_TRUE(verdict.witness);
    EXPECT_TRUE(replay(*verdict.witness, key.first, Indicator::builtin(key.second).evaluate, cfg));
  }
  const auto& sp_strong = grid.at(AxiomId::StrongSymmetry, K::Proportional);
  EXPECT_EQ(sp_strong.witness->platform, column({q(0), q(1), q(2)}));
  const auto& u_null = grid.at(AxiomId::Nullity, K::Uniform);
  EXPECT_TRUE(u_null.witness->platform.matrix().row(ServiceId{2}).empty());
}

TEST(Table1, DeterministicForFixedConfig) {
  CheckConfig cfg;
  cfg.trials = 20;
  cfg.rng_seed = 7;
  const Table1 a = table1_matrix(cfg), b = table1_matrix(cfg);
  for (const auto& [key, verdict] : a.cells) {
    const auto& other = b.at(key.first, key.second);
    EXPECT_EQ(verdict.holds, other.holds);
    EXPECT_EQ(verdict.justification, other.justification);
  }
}

TEST(Theorems, ExactlyTheCharacterizedIndicatorPasses) {
  CheckConfig cfg;
  cfg.trials = 50;
  const Table1 grid = table1_matrix(cfg);
  for (Theorem t : kTheorems) {
    const auto report = theorem_consistency(t, cfg, &grid);
    EXPECT_TRUE(report.consistent) << to_string(t);
  }
  const auto t1 = theorem_consistency(Theorem::T1, cfg, &grid);
  for (const auto& row : t1.rows) {
    if (row.indicator == K::SubscriberProportional) EXPECT_TRUE(row.passes);
    if (row.indicator == K::Uniform || row.indicator == K::SubscriberUniform)
      EXPECT_EQ(row.failed, std::vector<AxiomId>{AxiomId::NonManipulability});
    if (row.indicator == K::Proportional) EXPECT_EQ(row.failed, std::vector<AxiomId>{AxiomId::Composition});
  }
  // Without a precomputed grid the result is the same.
  EXPECT_TRUE(theorem_consistency(Theorem::T3, cfg).consistent);
  EXPECT_TRUE(characterizes(AxiomId::Nullity, K::SubscriberUniform));
  EXPECT_FALSE(characterizes(AxiomId::Nullity, K::Proportional));
}

// ---- properties over random instances --------------------------------------

TEST(AxiomProperties, SubscriberIndicatorsAreAdditiveUnderComposition) {
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 3 + rng() % 4;
    const Platform a = platform_from_dense(random_prices(rng, 3), random_dense(rng, n, 3));
    const Platform b = platform_from_dense(random_prices(rng, 2), random_dense(rng, n, 2));
    const Platform joined = compose_platforms(a, b);
    EXPECT_EQ(joined.success(), a.success() + b.success());
    for (K k : {K::Uniform, K::SubscriberUniform, K::SubscriberProportional}) {
      const auto ra = evaluate(k, a), rb = evaluate(k, b), rj = evaluate(k, joined);
      for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(rj[i], ra[i] + rb[i]);
    }
  }
}

TEST(AxiomProperties, ProportionalIndicatorsSurviveMerges) {
  Rng rng(32);
  for (int trial = 0; trial < 200; ++trial) {
    const Platform p = random_platform(rng, 6, 6);
    auto [group, survivor] = detail::pick_group<ServiceId>(rng, p.service_count());
    const Platform merged = merge_services(p, group, survivor);
    const ServiceId at = merged_index<ServiceId>(group, survivor);
    for (K k : {K::Proportional, K::SubscriberProportional}) {
      const auto before = evaluate(k, p);
      Rational sum = 0;
      for (ServiceId g : group) sum += before[g.value];
      EXPECT_EQ(evaluate(k, merged)[at.value], sum);
    }
  }
}

TEST(AxiomProperties, SplittingNeverLowersUniformOrSubscriberUniformTotals) {
  Rng rng(33);
  for (int trial = 0; trial < 200; ++trial) {
    const Platform p = random_platform(rng, 5, 6);
    const ServiceId target{rng() % p.service_count()};
    const std::size_t pieces = 2 + rng() % 2;
    std::vector<SparseRow> parts(pieces);
    for (const Cell& c : p.matrix().row(target)) {
      // Random split of c.amount into `pieces` nonnegative shares.
      Rational left = c.amount;
      for (std::size_t k = 0; k + 1 < pieces; ++k) {
        const Rational share = left * q(static_cast<long>(rng() % 4), 3);
        const Rational take = share > left ? left : share;
        if (sgn(take) > 0) parts[k].push_back({c.index, take});
        left -= take;
      }
      if (sgn(left) > 0) parts[pieces - 1].push_back({c.index, left});
    }
    const Platform split = split_service(p, target, parts);
    for (K k : {K::Uniform, K::SubscriberUniform}) {
      const auto before = evaluate(k, p), after = evaluate(k, split);
      Rational sum = 0;
      for (std::size_t j = 0; j < pieces; ++j) sum += after[target.value + j];
      EXPECT_GE(sum, before[target.value]) << to_string(k);
    }
  }
}

TEST(AxiomProperties, PoolingLeavesUniformAndProportionalUnchanged) {
  Rng rng(34);
  RandomPlatformOptions opt;
  opt.min_subscribers = 2;
  for (int trial = 0; trial < 200; ++trial) {
    const Platform p = random_platform(rng, opt);
    auto [group, survivor] = detail::pick_group<SubscriberId>(rng, p.subscriber_count());
    const Platform pooled = merge_subscribers(p, group, survivor);
    EXPECT_EQ(pooled.success(), p.success());
    for (K k : {K::Uniform, K::Proportional}) EXPECT_EQ(evaluate(k, pooled), evaluate(k, p));
  }
}

TEST(AxiomProperties, GeneratedTrialsSatisfyTheirHypotheses) {
  const CheckConfig cfg;
  for (AxiomId a : kAxiomRows)
    for (std::size_t k = 0; k < 100; ++k) {
      auto trial = generate_trial(a, trial_seed(cfg, a, k), cfg);
      ASSERT_TRUE(trial);
      EXPECT_GE(trial->platform.service_count(), 3u);
      EXPECT_LE(trial->platform.service_count(), cfg.max_services);
      EXPECT_LE(trial->platform.subscriber_count(), cfg.max_subscribers);
      // observe throws when a hypothesis is not met.
      EXPECT_NO_THROW(observe(a, Indicator::builtin(K::Uniform).evaluate, trial->platform, trial->transformation));
    }
}
