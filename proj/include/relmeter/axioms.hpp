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

#ifndef RELMETER_AXIOMS_HPP
#define RELMETER_AXIOMS_HPP

// Falsification harness for the nine axioms. A check runs the registered
// counterexamples and then `trials` seeded random instances; "holds" means
// nothing was found.

#include <relmeter/error.hpp>
#include <relmeter/indicators.hpp>
#include <relmeter/parallel.hpp>
#include <relmeter/platform.hpp>
#include <relmeter/random.hpp>
#include <relmeter/transform.hpp>

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace relmeter {

enum class AxiomId {
  Efficiency,
  Symmetry,
  StrongSymmetry,
  Nullity,
  Homogeneity,
  Composition,
  ConsumptionSensitivity,
  SharingProofness,
  NonManipulability,
};

/// Row order of the summary grid.
inline constexpr std::array<AxiomId, 9> kAxiomRows = {
    AxiomId::Efficiency,          AxiomId::Symmetry,         AxiomId::StrongSymmetry,
    AxiomId::Homogeneity,         AxiomId::ConsumptionSensitivity, AxiomId::Composition,
    AxiomId::SharingProofness,    AxiomId::NonManipulability,      AxiomId::Nullity,
};

constexpr std::string_view to_string(AxiomId a) noexcept {
  switch (a) {
    case AxiomId::Efficiency: return "efficiency";
    case AxiomId::Symmetry: return "symmetry";
    case AxiomId::StrongSymmetry: return "strong-symmetry";
    case AxiomId::Nullity: return "nullity";
    case AxiomId::Homogeneity: return "homogeneity";
    case AxiomId::Composition: return "composition";
    case AxiomId::ConsumptionSensitivity: return "consumption-sensitivity";
    case AxiomId::SharingProofness: return "sharing-proofness";
    case AxiomId::NonManipulability: return "non-manipulability";
  }
  return "unknown";
}

constexpr std::string_view display_name(AxiomId a) noexcept {
  switch (a) {
    case AxiomId::Efficiency: return "Efficiency";
    case AxiomId::Symmetry: return "Symmetry";
    case AxiomId::StrongSymmetry: return "Strong symmetry";
    case AxiomId::Nullity: return "Nullity";
    case AxiomId::Homogeneity: return "Homogeneity";
    case AxiomId::Composition: return "Composition";
    case AxiomId::ConsumptionSensitivity: return "Consumption sensitivity";
    case AxiomId::SharingProofness: return "Sharing proofness";
    case AxiomId::NonManipulability: return "Non-manipulability";
  }
  return "Unknown";
}

inline std::optional<AxiomId> parse_axiom(std::string_view text) {
  for (AxiomId a : kAxiomRows)
    if (text == to_string(a)) return a;
  return std::nullopt;
}

struct CheckConfig {
  std::size_t trials = 200;
  std::uint64_t rng_seed = 42;
  std::size_t max_services = 6;
  std::size_t max_subscribers = 6;
  std::size_t sensitivity_sequence_length = 32;
  Rational sensitivity_gap_threshold = Rational(1, 100);

  void validate() const {
    if (trials < 1) throw Error(ErrorCode::InvalidConfig, "trials must be at least 1");
    if (max_services < 3) throw Error(ErrorCode::InvalidConfig, "maxServices must be at least 3");
    if (max_subscribers < 1) throw Error(ErrorCode::InvalidConfig, "maxSubscribers must be at least 1");
    if (sensitivity_sequence_length < 2) throw Error(ErrorCode::InvalidConfig, "sensitivity sequence needs length >= 2");
    if (sgn(sensitivity_gap_threshold) <= 0) throw Error(ErrorCode::InvalidConfig, "sensitivity gap threshold must be positive");
  }
};

// ---- transformation descriptors -------------------------------------------

/// Evaluate once and inspect (efficiency).
struct DirectCheck {};
/// Two services whose rows are identical (symmetry) or share a support
/// (strong symmetry) and must tie.
struct ServicePair {
  ServiceId first, second;
};
/// A service with an all-zero row.
struct ZeroService {
  ServiceId service;
};
struct Rescale {
  Rational factor;
};
/// Column-concatenate the platform with `other`.
struct ComposeWith {
  Platform other;
};
struct MergeServiceGroup {
  std::vector<ServiceId> group;
  ServiceId survivor;
};
struct PoolSubscribers {
  std::vector<SubscriberId> group;
  SubscriberId survivor;
};
/// Compare R(J/n) against R(C/n), J all ones, for n = 1..length.
struct SensitivitySequence {
  std::size_t length = 32;
  Rational threshold = Rational(1, 100);
};

using Transformation = std::variant<DirectCheck, ServicePair, ZeroService, Rescale, ComposeWith, MergeServiceGroup,
                                    PoolSubscribers, SensitivitySequence>;

namespace detail {

template <class Id>
std::string join_one_based(const std::vector<Id>& ids) {
  std::string out;
  for (Id id : ids) {
    if (!out.empty()) out += ',';
    out += std::to_string(id.value + 1);
  }
  return out;
}

inline std::string dense_text(const Platform& p) {
  std::ostringstream os;
  os << "C=[";
  for (std::size_t i = 0; i < p.service_count(); ++i) {
    os << (i ? ";" : "");
    for (std::size_t s = 0; s < p.subscriber_count(); ++s)
      os << (s ? "," : "") << p.matrix().at(ServiceId{i}, SubscriberId{s}).get_str();
  }
  os << "] p=(";
  for (std::size_t s = 0; s < p.subscriber_count(); ++s) os << (s ? "," : "") << p.prices()[s].get_str();
  os << ")";
  return os.str();
}

template <class... F>
struct Overloaded : F... {
  using F::operator()...;
};
template <class... F>
Overloaded(F...) -> Overloaded<F...>;

}  // namespace detail

/// One-line, 1-based description of a transformation.
inline std::string describe(const Transformation& t) {
  return std::visit(
      detail::Overloaded{
          [](const DirectCheck&) { return std::string("direct evaluation"); },
          [](const ServicePair& x) {
            return "services " + std::to_string(x.first.value + 1) + " and " + std::to_string(x.second.value + 1);
          },
          [](const ZeroService& x) { return "zero row at service " + std::to_string(x.service.value + 1); },
          [](const Rescale& x) { return "scale by " + x.factor.get_str(); },
          [](const ComposeWith& x) { return "compose with " + detail::dense_text(x.other); },
          [](const MergeServiceGroup& x) {
            return "merge-services group=" + detail::join_one_based(x.group) +
                   " survivor=" + std::to_string(x.survivor.value + 1);
          },
          [](const PoolSubscribers& x) {
            return "share-subscription group=" + detail::join_one_based(x.group) +
                   " survivor=" + std::to_string(x.survivor.value + 1);
          },
          [](const SensitivitySequence& x) {
            return "all-ones vs scaled matrix, n=1.." + std::to_string(x.length) + ", gap floor " + x.threshold.get_str();
          },
      },
      t);
}

// ---- single observation ----------------------------------------------------

struct Observation {
  bool violated = false;
  std::vector<Rational> before;
  std::vector<Rational> after;
};

namespace detail {

inline bool rows_equal(const Platform& p, ServiceId a, ServiceId b) {
  const auto ra = p.matrix().row(a), rb = p.matrix().row(b);
  return std::equal(ra.begin(), ra.end(), rb.begin(), rb.end());
}

inline bool same_support(const Platform& p, ServiceId a, ServiceId b) {
  const auto ra = p.matrix().row(a), rb = p.matrix().row(b);
  return std::equal(ra.begin(), ra.end(), rb.begin(), rb.end(),
                    [](const Cell& x, const Cell& y) { return x.index == y.index; });
}

inline RelevanceVector run(const Evaluator& r, const Platform& p) {
  RelevanceVector out = r(p);
  if (out.size() != p.service_count())
    throw Error(ErrorCode::InvalidConfig, "evaluator returned a vector of the wrong length");
  return out;
}

inline Rational l1_distance(const std::vector<Rational>& a, const std::vector<Rational>& b) {
  Rational d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += abs(a[i] - b[i]);
  return d;
}

/// The all-ones matrix J/n with the prices of `p`.
inline Platform ones_over(const Platform& p, const Rational& inv_n) {
  std::vector<Entry> entries;
  entries.reserve(p.service_count() * p.subscriber_count());
  for (std::size_t i = 0; i < p.service_count(); ++i)
    for (std::size_t s = 0; s < p.subscriber_count(); ++s) entries.push_back({ServiceId{i}, SubscriberId{s}, inv_n});
  return build_platform(p.prices(), std::move(entries), p.service_count(), p.labels());
}

inline Observation observe_sensitivity(const Evaluator& r, const Platform& p, const SensitivitySequence& seq) {
  Observation obs;
  if (p.matrix().nonzeros() == p.service_count() * p.subscriber_count()) {
    bool all_ones = true;
    for (std::size_t i = 0; i < p.service_count() && all_ones; ++i)
      for (const Cell& c : p.matrix().row(ServiceId{i}))
        if (c.amount != 1) all_ones = false;
    if (all_ones) return obs;  // input gap is identically zero
  }
  const std::size_t tail_start = (seq.length + 1) / 2;
  bool persistent = true;
  for (std::size_t n = tail_start; n <= seq.length; ++n) {
    const Rational inv_n(1, static_cast<unsigned long>(n));
    auto flat = run(r, ones_over(p, inv_n)).values;
    auto scaled = run(r, scale_matrix(p, inv_n)).values;
    if (l1_distance(flat, scaled) < seq.threshold) persistent = false;
    if (n == seq.length || !persistent) {
      obs.before = std::move(flat);
      obs.after = std::move(scaled);
    }
    if (!persistent) break;
  }
  obs.violated = persistent;
  return obs;
}

}  // namespace detail

/// Applies one transformation and reports whether the axiom failed.
/// `before`/`after` hold the compared vectors: for pair, nullity and
/// efficiency checks only `before` is filled; for composition `before` is
/// R(a)+R(b); for consumption sensitivity they are R(J/n) and R(C/n) at the
/// last n examined.
inline Observation observe(AxiomId axiom, const Evaluator& r, const Platform& p, const Transformation& t) {
  auto mismatch = [&] {
    return Error(ErrorCode::InvalidConfig,
                 "transformation '" + describe(t) + "' does not fit axiom " + std::string(to_string(axiom)));
  };
  Observation obs;
  switch (axiom) {
    case AxiomId::Efficiency: {
      if (!std::holds_alternative<DirectCheck>(t)) throw mismatch();
      const auto v = detail::run(r, p);
      obs.before = v.values;
      bool negative = false;
      for (const auto& x : v.values) negative = negative || sgn(x) < 0;
      obs.violated = negative || v.total() != p.success();
      return obs;
    }
    case AxiomId::Symmetry:
    case AxiomId::StrongSymmetry: {
      const auto* pair = std::get_if<ServicePair>(&t);
      if (!pair) throw mismatch();
      if (pair->first.value >= p.service_count() || pair->second.value >= p.service_count())
        throw Error(ErrorCode::IndexOutOfBounds, "service pair out of range");
      const bool ok = axiom == AxiomId::Symmetry ? detail::rows_equal(p, pair->first, pair->second)
                                                 : detail::same_support(p, pair->first, pair->second);
      if (!ok) throw Error(ErrorCode::InvalidConfig, "service pair does not meet the axiom's hypothesis");
      obs.before = detail::run(r, p).values;
      obs.violated = obs.before[pair->first.value] != obs.before[pair->second.value];
      return obs;
    }
    case AxiomId::Nullity: {
      const auto* z = std::get_if<ZeroService>(&t);
      if (!z) throw mismatch();
      if (z->service.value >= p.service_count() || !p.matrix().row(z->service).empty())
        throw Error(ErrorCode::InvalidConfig, "nullity check needs a zero row");
      obs.before = detail::run(r, p).values;
      obs.violated = sgn(obs.before[z->service.value]) != 0;
      return obs;
    }
    case AxiomId::Homogeneity: {
      const auto* s = std::get_if<Rescale>(&t);
      if (!s) throw mismatch();
      obs.before = detail::run(r, p).values;
      obs.after = detail::run(r, scale_matrix(p, s->factor)).values;
      obs.violated = obs.before != obs.after;
      return obs;
    }
    case AxiomId::Composition: {
      const auto* c = std::get_if<ComposeWith>(&t);
      if (!c) throw mismatch();
      const Platform joined = compose_platforms(p, c->other);
      obs.before = detail::run(r, p).values;
      const auto other = detail::run(r, c->other);
      for (std::size_t i = 0; i < obs.before.size(); ++i) obs.before[i] += other[i];
      obs.after = detail::run(r, joined).values;
      obs.violated = obs.before != obs.after;
      return obs;
    }
    case AxiomId::ConsumptionSensitivity: {
      const auto* seq = std::get_if<SensitivitySequence>(&t);
      if (!seq) throw mismatch();
      return detail::observe_sensitivity(r, p, *seq);
    }
    case AxiomId::SharingProofness: {
      const auto* m = std::get_if<PoolSubscribers>(&t);
      if (!m) throw mismatch();
      obs.before = detail::run(r, p).values;
      obs.after = detail::run(r, merge_subscribers(p, m->group, m->survivor)).values;
      obs.violated = obs.before != obs.after;
      return obs;
    }
    case AxiomId::NonManipulability: {
      const auto* m = std::get_if<MergeServiceGroup>(&t);
      if (!m) throw mismatch();
      obs.before = detail::run(r, p).values;
      obs.after = detail::run(r, merge_services(p, m->group, m->survivor)).values;
      Rational group_sum = 0;
      for (ServiceId g : m->group) group_sum += obs.before[g.value];
      obs.violated = obs.after[merged_index<ServiceId>(m->group, m->survivor).value] != group_sum;
      return obs;
    }
  }
  throw mismatch();
}

// ---- random instances ------------------------------------------------------

namespace detail {

using Dense = std::vector<std::vector<Rational>>;

/// Puts a positive amount on a service outside `avoid` for every empty column.
inline void refill_columns(Dense& rows, Rng& rng, std::initializer_list<std::size_t> avoid) {
  std::vector<std::size_t> allowed;
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (std::find(avoid.begin(), avoid.end(), i) == avoid.end()) allowed.push_back(i);
  const std::size_t subscribers = rows.empty() ? 0 : rows[0].size();
  for (std::size_t s = 0; s < subscribers; ++s) {
    bool any = false;
    for (const auto& row : rows) any = any || sgn(row[s]) != 0;
    if (!any) rows[allowed[rng() % allowed.size()]][s] = random_positive(rng);
  }
}

inline std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

/// Two distinct indices below n.
inline std::pair<std::size_t, std::size_t> pick_pair(Rng& rng, std::size_t n) {
  const std::size_t a = pick(rng, 0, n - 1);
  std::size_t b = pick(rng, 0, n - 2);
  if (b >= a) ++b;
  return {a, b};
}

template <class Id>
std::pair<std::vector<Id>, Id> pick_group(Rng& rng, std::size_t n) {
  std::vector<std::size_t> all(n);
  for (std::size_t k = 0; k < n; ++k) all[k] = k;
  std::shuffle(all.begin(), all.end(), rng);
  const std::size_t size = pick(rng, 2, n);
  std::vector<Id> group;
  for (std::size_t k = 0; k < size; ++k) group.push_back(Id{all[k]});
  std::sort(group.begin(), group.end());
  const Id survivor = group[pick(rng, 0, size - 1)];
  return {group, survivor};
}

}  // namespace detail

struct Trial {
  Platform platform;
  Transformation transformation;
};

/// Deterministic random instance for one axiom. Returns nothing when the
/// size bounds leave no room for the transformation (pooling subscribers
/// needs two of them).
inline std::optional<Trial> generate_trial(AxiomId axiom, std::uint64_t seed, const CheckConfig& cfg) {
  Rng rng(seed);
  RandomPlatformOptions opt;
  opt.min_services = 3;
  opt.max_services = cfg.max_services;
  opt.max_subscribers = cfg.max_subscribers;
  if (axiom == AxiomId::SharingProofness) {
    if (cfg.max_subscribers < 2) return std::nullopt;
    opt.min_subscribers = 2;
  }
  const std::size_t n = detail::pick(rng, opt.min_services, opt.max_services);
  const std::size_t m = detail::pick(rng, opt.min_subscribers, opt.max_subscribers);
  detail::Dense rows = random_dense(rng, n, m, opt);
  auto prices = random_prices(rng, m, opt);
  auto make = [&] { return platform_from_dense(prices, rows); };

  switch (axiom) {
    case AxiomId::Efficiency: return Trial{make(), DirectCheck{}};
    case AxiomId::Symmetry: {
      const auto [a, b] = detail::pick_pair(rng, n);
      rows[b] = rows[a];
      detail::refill_columns(rows, rng, {a, b});
      return Trial{make(), ServicePair{ServiceId{a}, ServiceId{b}}};
    }
    case AxiomId::StrongSymmetry: {
      const auto [a, b] = detail::pick_pair(rng, n);
      for (std::size_t s = 0; s < m; ++s) rows[b][s] = sgn(rows[a][s]) != 0 ? random_positive(rng) : Rational(0);
      detail::refill_columns(rows, rng, {a, b});
      return Trial{make(), ServicePair{ServiceId{a}, ServiceId{b}}};
    }
    case AxiomId::Nullity: {
      const std::size_t z = detail::pick(rng, 0, n - 1);
      for (auto& x : rows[z]) x = 0;
      detail::refill_columns(rows, rng, {z});
      return Trial{make(), ZeroService{ServiceId{z}}};
    }
    case AxiomId::Homogeneity: return Trial{make(), Rescale{random_positive(rng, 30, 7)}};
    case AxiomId::Composition: {
      const std::size_t m2 = detail::pick(rng, opt.min_subscribers, opt.max_subscribers);
      auto rows2 = random_dense(rng, n, m2, opt);
      auto prices2 = random_prices(rng, m2, opt);
      return Trial{make(), ComposeWith{platform_from_dense(std::move(prices2), rows2)}};
    }
    case AxiomId::ConsumptionSensitivity:
      return Trial{make(), SensitivitySequence{cfg.sensitivity_sequence_length, cfg.sensitivity_gap_threshold}};
    case AxiomId::SharingProofness: {
      auto [group, survivor] = detail::pick_group<SubscriberId>(rng, m);
      return Trial{make(), PoolSubscribers{std::move(group), survivor}};
    }
    case AxiomId::NonManipulability: {
      auto [group, survivor] = detail::pick_group<ServiceId>(rng, n);
      return Trial{make(), MergeServiceGroup{std::move(group), survivor}};
    }
  }
  return std::nullopt;
}

inline std::uint64_t trial_seed(const CheckConfig& cfg, AxiomId axiom, std::size_t trial) {
  return derive_seed(cfg.rng_seed, static_cast<std::uint64_t>(axiom) + 1, trial);
}

// ---- counterexample registry -----------------------------------------------

struct Counterexample {
  std::string name;
  AxiomId axiom;
  std::vector<IndicatorKind> refutes;  // built-ins this instance is known to break
  Platform platform;
  Transformation transformation;
};

/// Fixed instances re-run by every check, each one known to refute the
/// listed built-in indicators.
inline const std::vector<Counterexample>& counterexample_registry() {
  static const std::vector<Counterexample> registry = [] {
    using K = IndicatorKind;
    auto r = [](long a, long b = 1) {
      Rational x(a, b);
      x.canonicalize();
      return x;
    };
    auto column = [](std::vector<Rational> c) {
      detail::Dense rows;
      for (auto& x : c) rows.push_back({x});
      return platform_from_dense({Rational(1)}, rows);
    };
    const Platform zero_one_two = column({r(0), r(1), r(2)});
    std::vector<Counterexample> out;
    out.push_back({"merge-uniform", AxiomId::NonManipulability, {K::Uniform}, column({r(0), r(1), r(5, 2)}),
                   MergeServiceGroup{{ServiceId{0}, ServiceId{1}}, ServiceId{0}}});
    out.push_back({"merge-split-scenario", AxiomId::NonManipulability, {K::Uniform, K::SubscriberUniform},
                   platform_from_dense({r(1), r(1)}, {{r(1), r(0)}, {r(1), r(0)}, {r(1), r(1)}, {r(0), r(0)}}),
                   MergeServiceGroup{{ServiceId{0}, ServiceId{1}}, ServiceId{0}}});
    out.push_back({"zero-row", AxiomId::Nullity, {K::Uniform},
                   platform_from_dense({r(2), r(4), r(5, 2), r(2), r(1), r(7, 2)},
                                       {{r(0), r(5), r(0), r(1), r(2), r(3)},
                                        {r(1), r(1), r(2), r(3), r(6), r(0)},
                                        {r(0), r(0), r(0), r(0), r(0), r(0)}}),
                   ZeroService{ServiceId{2}}});
    out.push_back({"support-tie", AxiomId::StrongSymmetry, {K::Proportional, K::SubscriberProportional}, zero_one_two,
                   ServicePair{ServiceId{1}, ServiceId{2}}});
    out.push_back({"support-tie-reversed", AxiomId::StrongSymmetry, {K::Proportional, K::SubscriberProportional},
                   column({r(2), r(1), r(0)}), ServicePair{ServiceId{0}, ServiceId{1}}});
    out.push_back({"flat-vs-scaled", AxiomId::ConsumptionSensitivity,
                   {K::SubscriberUniform, K::Proportional, K::SubscriberProportional}, zero_one_two,
                   SensitivitySequence{}});
    out.push_back({"compose-proportional", AxiomId::Composition, {K::Proportional}, column({r(0), r(1), r(1)}),
                   ComposeWith{column({r(2), r(1), r(1)})}});
    out.push_back({"share-subscriber-uniform", AxiomId::SharingProofness, {K::SubscriberUniform},
                   platform_from_dense({r(1), r(1)}, {{r(0), r(2)}, {r(1), r(0)}, {r(1), r(0)}}),
                   PoolSubscribers{{SubscriberId{0}, SubscriberId{1}}, SubscriberId{0}}});
    out.push_back({"share-subscriber-proportional", AxiomId::SharingProofness,
                   {K::SubscriberUniform, K::SubscriberProportional},
                   platform_from_dense({r(1), r(1)}, {{r(0), r(2)}, {r(1), r(1)}, {r(1), r(1)}}),
                   PoolSubscribers{{SubscriberId{0}, SubscriberId{1}}, SubscriberId{0}}});
    return out;
  }();
  return registry;
}

// ---- verdicts --------------------------------------------------------------

struct Witness {
  Platform platform;
  Transformation transformation;
  std::vector<Rational> before;
  std::vector<Rational> after;
  std::optional<std::uint64_t> seed;  // set when a random trial found it
  std::string source;                 // registry name or "trial <k>"
};

struct AxiomVerdict {
  AxiomId axiom = AxiomId::Efficiency;
  IndicatorKind indicator = IndicatorKind::External;
  std::string indicator_name;
  bool holds = true;
  std::optional<Witness> witness;
  std::size_t trials_run = 0;
  std::size_t registry_checked = 0;
  std::string justification;
};

/// Expected cell of the summary grid for a built-in indicator.
constexpr bool expected_holds(AxiomId a, IndicatorKind k) noexcept {
  using K = IndicatorKind;
  switch (a) {
    case AxiomId::Efficiency:
    case AxiomId::Symmetry:
    case AxiomId::Homogeneity: return k != K::External;
    case AxiomId::StrongSymmetry: return k == K::Uniform || k == K::SubscriberUniform;
    case AxiomId::ConsumptionSensitivity: return k == K::Uniform;
    case AxiomId::Composition: return k == K::Uniform || k == K::SubscriberUniform || k == K::SubscriberProportional;
    case AxiomId::SharingProofness: return k == K::Uniform || k == K::Proportional;
    case AxiomId::NonManipulability: return k == K::Proportional || k == K::SubscriberProportional;
    case AxiomId::Nullity: return k == K::SubscriberUniform || k == K::Proportional || k == K::SubscriberProportional;
  }
  return false;
}

/// Why a built-in satisfies an axiom, in one sentence.
inline std::string holds_reason(AxiomId a, IndicatorKind k) {
  using K = IndicatorKind;
  switch (a) {
    case AxiomId::Efficiency: return "each subscriber's price is split completely among the services";
    case AxiomId::Symmetry: return "identical rows receive identical shares of every column";
    case AxiomId::StrongSymmetry:
      return k == K::Uniform ? "every service receives the same amount"
                             : "each column is split by support only, so equal supports tie";
    case AxiomId::Homogeneity:
      if (k == K::Uniform) return "the output ignores consumption";
      if (k == K::SubscriberUniform) return "rescaling leaves every support unchanged";
      return "rescaling leaves every consumption ratio unchanged";
    case AxiomId::ConsumptionSensitivity: return "the output does not depend on consumption at all";
    case AxiomId::Composition:
      return k == K::Uniform ? "sigma/|N| is additive in sigma" : "computed column by column, so columns add across platforms";
    case AxiomId::SharingProofness:
      return k == K::Uniform ? "depends only on sigma, which pooling preserves"
                             : "pooling preserves every row total and sigma";
    case AxiomId::NonManipulability:
      return k == K::Proportional ? "a merged row total is the sum of the group's row totals"
                                  : "within each column the merged share is the sum of the group's shares";
    case AxiomId::Nullity: return "a service with no consumption takes no share of any column";
  }
  return {};
}

/// Re-runs a witness and reports whether the same violation reappears with
/// identical vectors. With a seed, the instance is regenerated first and must
/// match the stored platform.
inline bool replay(const Witness& w, AxiomId axiom, const Evaluator& r, const CheckConfig& cfg) {
  if (w.seed) {
    auto regenerated = generate_trial(axiom, *w.seed, cfg);
    if (!regenerated || !(regenerated->platform == w.platform)) return false;
  }
  const Observation obs = observe(axiom, r, w.platform, w.transformation);
  return obs.violated && obs.before == w.before && obs.after == w.after;
}

inline AxiomVerdict check_axiom(AxiomId axiom, const Indicator& indicator, const CheckConfig& cfg) {
  cfg.validate();
  AxiomVerdict v;
  v.axiom = axiom;
  v.indicator = indicator.kind;
  v.indicator_name = indicator.name;

  auto found = [&](const Platform& p, const Transformation& t, Observation obs, std::optional<std::uint64_t> seed,
                   std::string source) {
    v.holds = false;
    v.justification = "violated by " + source + ": " + describe(t) + " on " + detail::dense_text(p);
    v.witness = Witness{p, t, std::move(obs.before), std::move(obs.after), seed, std::move(source)};
  };

  for (const Counterexample& ce : counterexample_registry()) {
    if (ce.axiom != axiom) continue;
    ++v.registry_checked;
    Observation obs = observe(axiom, indicator.evaluate, ce.platform, ce.transformation);
    if (obs.violated) {
      found(ce.platform, ce.transformation, std::move(obs), std::nullopt, "registered instance " + ce.name);
      return v;
    }
  }
  for (std::size_t k = 0; k < cfg.trials; ++k) {
    const std::uint64_t seed = trial_seed(cfg, axiom, k);
    auto trial = generate_trial(axiom, seed, cfg);
    if (!trial) break;
    ++v.trials_run;
    Observation obs = observe(axiom, indicator.evaluate, trial->platform, trial->transformation);
    if (obs.violated) {
      found(trial->platform, trial->transformation, std::move(obs), seed, "trial " + std::to_string(k));
      return v;
    }
  }
  v.justification = indicator.kind == IndicatorKind::External
                        ? "no violation in " + std::to_string(v.trials_run) + " trials"
                        : holds_reason(axiom, indicator.kind) + "; no violation in " + std::to_string(v.trials_run) +
                              " trials";
  return v;
}

inline AxiomVerdict check_axiom(AxiomId axiom, IndicatorKind kind, const CheckConfig& cfg) {
  return check_axiom(axiom, Indicator::builtin(kind), cfg);
}

// ---- summary grid ----------------------------------------------------------

struct Table1 {
  std::map<std::pair<AxiomId, IndicatorKind>, AxiomVerdict> cells;

  const AxiomVerdict& at(AxiomId a, IndicatorKind k) const { return cells.at({a, k}); }

  std::vector<std::pair<AxiomId, IndicatorKind>> mismatches() const {
    std::vector<std::pair<AxiomId, IndicatorKind>> out;
    for (const auto& [key, verdict] : cells)
      if (verdict.holds != expected_holds(key.first, key.second)) out.push_back(key);
    return out;
  }
  bool matches_expected() const { return cells.size() == 36 && mismatches().empty(); }
};

/// All 36 cells, evaluated concurrently.
inline Table1 table1_matrix(const CheckConfig& cfg) {
  cfg.validate();
  std::vector<AxiomVerdict> flat(kAxiomRows.size() * kBuiltinIndicators.size());
  parallel_for(flat.size(), [&](std::size_t k) {
    flat[k] = check_axiom(kAxiomRows[k / 4], kBuiltinIndicators[k % 4], cfg);
  });
  Table1 t;
  for (auto& v : flat) t.cells.emplace(std::pair{v.axiom, v.indicator}, std::move(v));
  return t;
}

// ---- characterization theorems --------------------------------------------

enum class Theorem { T1, T2, T3, T4 };

inline constexpr std::array<Theorem, 4> kTheorems = {Theorem::T1, Theorem::T2, Theorem::T3, Theorem::T4};

constexpr std::string_view to_string(Theorem t) noexcept {
  switch (t) {
    case Theorem::T1: return "T1";
    case Theorem::T2: return "T2";
    case Theorem::T3: return "T3";
    case Theorem::T4: return "T4";
  }
  return "T?";
}

inline std::vector<AxiomId> theorem_axioms(Theorem t) {
  switch (t) {
    case Theorem::T1: return {AxiomId::Composition, AxiomId::NonManipulability};
    case Theorem::T2: return {AxiomId::SharingProofness, AxiomId::NonManipulability};
    case Theorem::T3: return {AxiomId::Symmetry, AxiomId::Homogeneity, AxiomId::ConsumptionSensitivity};
    case Theorem::T4: return {AxiomId::Composition, AxiomId::Nullity, AxiomId::StrongSymmetry};
  }
  return {};
}

constexpr IndicatorKind characterized_indicator(Theorem t) noexcept {
  switch (t) {
    case Theorem::T1: return IndicatorKind::SubscriberProportional;
    case Theorem::T2: return IndicatorKind::Proportional;
    case Theorem::T3: return IndicatorKind::Uniform;
    case Theorem::T4: return IndicatorKind::SubscriberUniform;
  }
  return IndicatorKind::External;
}

/// Whether axiom `a` is one of those characterizing indicator `k`.
inline bool characterizes(AxiomId a, IndicatorKind k) {
  for (Theorem t : kTheorems)
    if (characterized_indicator(t) == k) {
      const auto axioms = theorem_axioms(t);
      return std::find(axioms.begin(), axioms.end(), a) != axioms.end();
    }
  return false;
}

struct TheoremRow {
  IndicatorKind indicator;
  bool passes = true;
  std::vector<AxiomId> failed;
};

struct TheoremReport {
  Theorem theorem;
  std::vector<AxiomId> axioms;
  IndicatorKind characterized;
  std::vector<TheoremRow> rows;
  /// Exactly the characterized indicator passes.
  bool consistent = false;
};

/// Checks the theorem's axiom set against the four built-ins. Reuses the
/// cells of `grid` when given.
inline TheoremReport theorem_consistency(Theorem t, const CheckConfig& cfg, const Table1* grid = nullptr) {
  cfg.validate();
  TheoremReport report{t, theorem_axioms(t), characterized_indicator(t), {}, true};
  for (IndicatorKind k : kBuiltinIndicators) {
    TheoremRow row{k, true, {}};
    for (AxiomId a : report.axioms) {
      const bool holds = grid ? grid->at(a, k).holds : check_axiom(a, k, cfg).holds;
      if (!holds) {
        row.passes = false;
        row.failed.push_back(a);
      }
    }
    if (row.passes != (k == report.characterized)) report.consistent = false;
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace relmeter

#endif  // RELMETER_AXIOMS_HPP
