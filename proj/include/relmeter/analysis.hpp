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

#ifndef RELMETER_ANALYSIS_HPP
#define RELMETER_ANALYSIS_HPP

// When does a service prefer one indicator over another: the preference
// lemmas, split gains, exact marginal sensitivities and the two-subscriber
// toy thresholds.

#include <relmeter/error.hpp>
#include <relmeter/indicators.hpp>
#include <relmeter/platform.hpp>
#include <relmeter/transform.hpp>

#include <json.hpp>

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace relmeter {

enum class LemmaId {
  L0_SUvsU_general,
  L1_SUvsU_allviewers,
  L2_PvsU_avg,
  L3_SPvsU_colavg,
  L4_SPvsSU_localavg,
  L6_split_gain,
};

inline constexpr std::array<LemmaId, 6> kAllLemmas = {LemmaId::L0_SUvsU_general, LemmaId::L1_SUvsU_allviewers,
                                                      LemmaId::L2_PvsU_avg,      LemmaId::L3_SPvsU_colavg,
                                                      LemmaId::L4_SPvsSU_localavg, LemmaId::L6_split_gain};

constexpr std::string_view to_string(LemmaId l) noexcept {
  switch (l) {
    case LemmaId::L0_SUvsU_general: return "L0";
    case LemmaId::L1_SUvsU_allviewers: return "L1";
    case LemmaId::L2_PvsU_avg: return "L2";
    case LemmaId::L3_SPvsU_colavg: return "L3";
    case LemmaId::L4_SPvsSU_localavg: return "L4";
    case LemmaId::L6_split_gain: return "L6";
  }
  return "L?";
}

/// The (preferred, other) indicator pair a lemma certifies; none for L6.
constexpr std::optional<std::pair<IndicatorKind, IndicatorKind>> lemma_pair(LemmaId l) noexcept {
  using K = IndicatorKind;
  switch (l) {
    case LemmaId::L0_SUvsU_general:
    case LemmaId::L1_SUvsU_allviewers: return std::pair{K::SubscriberUniform, K::Uniform};
    case LemmaId::L2_PvsU_avg: return std::pair{K::Proportional, K::Uniform};
    case LemmaId::L3_SPvsU_colavg: return std::pair{K::SubscriberProportional, K::Uniform};
    case LemmaId::L4_SPvsSU_localavg: return std::pair{K::SubscriberProportional, K::SubscriberUniform};
    case LemmaId::L6_split_gain: return std::nullopt;
  }
  return std::nullopt;
}

namespace detail {

inline void check_service(const Platform& p, ServiceId i) {
  if (i.value >= p.service_count()) throw Error(ErrorCode::IndexOutOfBounds, "service index", i.value);
}

inline Rational count(std::size_t n) { return Rational(static_cast<unsigned long>(n)); }

/// Equal two-way split of row i.
inline std::vector<SparseRow> halves(const Platform& p, ServiceId i) {
  std::vector<SparseRow> parts(2);
  for (const Cell& c : p.matrix().row(i)) {
    parts[0].push_back({c.index, c.amount / 2});
    parts[1].push_back({c.index, c.amount / 2});
  }
  return parts;
}

}  // namespace detail

/// Exact hypothesis of the lemma for service i. Averages are compared in
/// multiplied form, e.g. (|N|-1)·‖C_i‖ ≥ Σ_{j≠i}‖C_j‖. L6 has no hypothesis
/// beyond a valid split and always returns true.
inline bool lemma_hypothesis(LemmaId lemma, const Platform& p, ServiceId i) {
  detail::check_service(p, i);
  const ConsumptionMatrix& m = p.matrix();
  const std::size_t n = p.service_count();
  switch (lemma) {
    case LemmaId::L0_SUvsU_general: {
      RationalSum lhs, rhs;
      std::vector<bool> watched(p.subscriber_count(), false);
      for (const Cell& c : m.row(i)) watched[c.index] = true;
      for (std::size_t s = 0; s < p.subscriber_count(); ++s) {
        if (watched[s]) {
          const std::size_t ns = m.column(SubscriberId{s}).size();
          lhs += detail::count(n - ns) / detail::count(ns) * p.prices()[s];
        } else {
          rhs += p.prices()[s];
        }
      }
      return lhs.total() >= rhs.total();
    }
    case LemmaId::L1_SUvsU_allviewers: return m.row(i).size() == p.subscriber_count();
    case LemmaId::L2_PvsU_avg: {
      const Rational& own = m.service_total(i);
      return detail::count(n - 1) * own >= m.grand_total() - own;
    }
    case LemmaId::L3_SPvsU_colavg: {
      for (std::size_t s = 0; s < p.subscriber_count(); ++s) {
        const Rational own = m.at(i, SubscriberId{s});
        if (detail::count(n - 1) * own < m.subscriber_total(SubscriberId{s}) - own) return false;
      }
      return true;
    }
    case LemmaId::L4_SPvsSU_localavg: {
      for (const Cell& c : m.row(i)) {
        const std::size_t ns = m.column(SubscriberId{c.index}).size();
        if (ns < 2) continue;  // sole viewer of s: both indicators give p_s
        if (detail::count(ns - 1) * c.amount < m.subscriber_total(SubscriberId{c.index}) - c.amount) return false;
      }
      return true;
    }
    case LemmaId::L6_split_gain: return true;
  }
  return false;
}

/// Gain from replacing `target` by the parts: Σ R_parts(after) − R_target(before).
inline Rational split_gain(const Platform& p, ServiceId target, std::span<const SparseRow> parts, IndicatorKind kind) {
  detail::check_service(p, target);
  const Platform after = split_service(p, target, parts);
  const auto r_after = evaluate(kind, after);
  Rational sum = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) sum += r_after[target.value + k];
  return sum - evaluate(kind, p)[target.value];
}

/// Conclusion of the lemma for service i. For L6 the conclusion is checked
/// on the equal two-way split of row i, under both U and SU.
inline bool lemma_conclusion_holds(LemmaId lemma, const Platform& p, ServiceId i) {
  detail::check_service(p, i);
  if (lemma == LemmaId::L6_split_gain) {
    const auto parts = detail::halves(p, i);
    return sgn(split_gain(p, i, parts, IndicatorKind::Uniform)) >= 0 &&
           sgn(split_gain(p, i, parts, IndicatorKind::SubscriberUniform)) >= 0;
  }
  const auto [better, worse] = *lemma_pair(lemma);
  return evaluate(better, p)[i.value] >= evaluate(worse, p)[i.value];
}

// ---- marginal sensitivity --------------------------------------------------

/// Effect on SU of service i gaining consumption from subscriber s.
struct SubscriberUniformDelta {
  bool new_view = false;   // C_is was 0
  Rational own_gain;       // change of R^SU_i
  Rational incumbent_loss; // drop for each j already in N_s
  std::size_t incumbents = 0;
};

using Sensitivity = std::variant<Rational, SubscriberUniformDelta>;

/// ∂R_i/∂C_is in closed form for U, P and SP; for SU, the discrete delta
/// record of a first view (or zeros when i already watched s).
inline Sensitivity marginal_sensitivity(const Platform& p, IndicatorKind kind, ServiceId i, SubscriberId s) {
  detail::check_service(p, i);
  if (s.value >= p.subscriber_count()) throw Error(ErrorCode::IndexOutOfBounds, "subscriber index", s.value);
  const ConsumptionMatrix& m = p.matrix();
  switch (kind) {
    case IndicatorKind::Uniform: return Rational(0);
    case IndicatorKind::Proportional: {
      const Rational& total = m.grand_total();
      return (total - m.service_total(i)) / (total * total) * p.success();
    }
    case IndicatorKind::SubscriberProportional: {
      const Rational& col = m.subscriber_total(s);
      return (col - m.at(i, s)) / (col * col) * p.price(s);
    }
    case IndicatorKind::SubscriberUniform: {
      SubscriberUniformDelta d;
      d.incumbents = m.column(s).size();
      if (sgn(m.at(i, s)) != 0) return d;  // support unchanged
      d.new_view = true;
      const Rational ns = detail::count(d.incumbents);
      d.own_gain = p.price(s) / (ns + 1);
      d.incumbent_loss = p.price(s) / ((ns + 1) * ns);
      return d;
    }
    case IndicatorKind::External: break;
  }
  throw Error(ErrorCode::InvalidConfig, "marginal sensitivity needs a built-in indicator");
}

// ---- pairwise preferences --------------------------------------------------

/// Sign of R_first − R_second for one service.
enum class Preference { First, Second, Tie };

constexpr std::string_view to_string(Preference p) noexcept {
  switch (p) {
    case Preference::First: return "first";
    case Preference::Second: return "second";
    case Preference::Tie: return "tie";
  }
  return "?";
}

inline Preference preference_of(const Rational& gap) {
  const int s = sgn(gap);
  return s > 0 ? Preference::First : s < 0 ? Preference::Second : Preference::Tie;
}

struct PairComparison {
  IndicatorKind first, second;
  Rational first_value, second_value;
  Rational gap;  // first_value − second_value
  Preference preferred = Preference::Tie;
  std::vector<LemmaId> certificates;  // lemmas whose hypothesis holds for this pair
};

struct PreferenceReport {
  ServiceId service;
  std::vector<PairComparison> pairs;
};

/// The six unordered indicator pairs, in a fixed order.
inline constexpr std::array<std::pair<IndicatorKind, IndicatorKind>, 6> kIndicatorPairs = {{
    {IndicatorKind::Uniform, IndicatorKind::SubscriberUniform},
    {IndicatorKind::Uniform, IndicatorKind::Proportional},
    {IndicatorKind::Uniform, IndicatorKind::SubscriberProportional},
    {IndicatorKind::SubscriberUniform, IndicatorKind::Proportional},
    {IndicatorKind::SubscriberUniform, IndicatorKind::SubscriberProportional},
    {IndicatorKind::Proportional, IndicatorKind::SubscriberProportional},
}};

inline PreferenceReport preference_report(const Platform& p, ServiceId i) {
  detail::check_service(p, i);
  std::array<Rational, 4> value;
  for (std::size_t k = 0; k < 4; ++k) value[k] = evaluate(kBuiltinIndicators[k], p)[i.value];
  auto of = [&](IndicatorKind k) { return value[static_cast<std::size_t>(k)]; };

  PreferenceReport report{i, {}};
  for (const auto& [a, b] : kIndicatorPairs) {
    PairComparison c{a, b, of(a), of(b), of(a) - of(b), Preference::Tie, {}};
    c.preferred = preference_of(c.gap);
    for (LemmaId l : kAllLemmas) {
      const auto pair = lemma_pair(l);
      if (!pair) continue;
      const bool same = (pair->first == a && pair->second == b) || (pair->first == b && pair->second == a);
      if (same && lemma_hypothesis(l, p, i)) c.certificates.push_back(l);
    }
    report.pairs.push_back(std::move(c));
  }
  return report;
}

inline nlohmann::json to_json(const PreferenceReport& r, const Platform& p) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& c : r.pairs) {
    nlohmann::json certs = nlohmann::json::array();
    for (LemmaId l : c.certificates) certs.push_back(std::string(to_string(l)));
    const IndicatorKind winner = c.preferred == Preference::Second ? c.second : c.first;
    pairs.push_back({
        {"first", std::string(short_name(c.first))},
        {"second", std::string(short_name(c.second))},
        {"firstValue", c.first_value.get_str()},
        {"secondValue", c.second_value.get_str()},
        {"gap", c.gap.get_str()},
        {"gapApprox", c.gap.get_d()},
        {"preferred", c.preferred == Preference::Tie ? std::string("tie") : std::string(short_name(winner))},
        {"certificates", certs},
    });
  }
  return {{"service", p.service_name(r.service)}, {"pairs", pairs}};
}

// ---- toy scenario ----------------------------------------------------------

/// Two subscribers, three services: C = [[M, 0], [1, 1], [0, 0]].
struct ToyScenario {
  Rational m = 1;
  Price p1 = 1;
  Price p2 = 1;

  Platform platform() const {
    if (sgn(m) <= 0) throw Error(ErrorCode::InvalidConfig, "M must be positive");
    return platform_from_dense({p1, p2}, {{m, Rational(0)}, {Rational(1), Rational(1)}, {Rational(0), Rational(0)}});
  }
};

struct ToyComparison {
  IndicatorKind first, second;
  std::size_t streamer = 1;  // 1 or 2
  Rational first_value, second_value;
  Preference observed = Preference::Tie;
  Preference predicted = Preference::Tie;
  std::string rule;  // the case condition that produced `predicted`
  bool agrees = false;
};

struct ToyReport {
  ToyScenario scenario;
  std::vector<ToyComparison> rows;
  bool all_agree = true;
};

namespace detail {

/// Preference when "first wins iff M > t" (ties at t).
inline std::pair<Preference, std::string> above(const Rational& m, const Rational& t) {
  const int c = cmp(m, t);
  return {c > 0 ? Preference::First : c < 0 ? Preference::Second : Preference::Tie, "M vs " + t.get_str()};
}

inline Preference flip(Preference p) {
  return p == Preference::First ? Preference::Second : p == Preference::Second ? Preference::First : Preference::Tie;
}

/// Case analysis for the toy scenario, written out from the closed forms:
/// U = σ/3 each, SU = (p1/2, p1/2 + p2), P = (M, 2)·σ/(M+2),
/// SP = (M p1/(M+1), p1/(M+1) + p2).
inline std::pair<Preference, std::string> toy_prediction(IndicatorKind a, IndicatorKind b, std::size_t streamer,
                                                         const ToyScenario& t) {
  using K = IndicatorKind;
  const Rational &m = t.m, &p1 = t.p1, &p2 = t.p2;
  auto pref = [](int c) { return c > 0 ? Preference::First : c < 0 ? Preference::Second : Preference::Tie; };
  if (a == K::SubscriberUniform && b == K::Uniform) {
    if (streamer == 2) return {Preference::First, "always"};
    return {pref(cmp(p1, 2 * p2)), "p1 vs 2*p2"};
  }
  if (a == K::Proportional && b == K::Uniform) {
    if (streamer == 1) return above(m, 1);
    auto [p, rule] = above(m, 4);
    return {flip(p), rule};
  }
  if (a == K::SubscriberProportional && b == K::Uniform) {
    if (streamer == 1) {
      if (2 * p1 <= p2) return {Preference::Second, "2*p1 <= p2"};
      return above(m, (p1 + p2) / (2 * p1 - p2));
    }
    if (p1 <= 2 * p2) return {Preference::First, "p1 <= 2*p2"};
    auto [p, rule] = above(m, 2 * (p1 + p2) / (p1 - 2 * p2));
    return {flip(p), rule};
  }
  if (a == K::SubscriberUniform && b == K::Proportional) {
    auto [p, rule] = above(m, 2 * p1 / (p1 + 2 * p2));  // P wins streamer 1 above the threshold
    return {streamer == 1 ? flip(p) : p, rule};
  }
  if (a == K::SubscriberProportional && b == K::SubscriberUniform) {
    auto [p, rule] = above(m, 1);
    return {streamer == 1 ? p : flip(p), rule};
  }
  if (a == K::Proportional && b == K::SubscriberProportional) {
    std::pair<Preference, std::string> one =
        p1 <= p2 ? std::pair{Preference::First, std::string("p1 <= p2")} : above(m, (p1 - p2) / p2);
    if (streamer == 2) one.first = flip(one.first);
    return one;
  }
  throw Error(ErrorCode::InvalidConfig, "no toy rule for this indicator pair");
}

}  // namespace detail

/// Toy comparisons in order SU/U, P/U, SP/U, SU/P, SP/SU, P/SP for
/// streamers 1 and 2, each checked against the case analysis.
inline ToyReport toy_thresholds(const ToyScenario& scn) {
  using K = IndicatorKind;
  if (sgn(scn.p1) <= 0 || sgn(scn.p2) <= 0) throw Error(ErrorCode::NonPositivePrice, "toy prices must be positive");
  const Platform p = scn.platform();
  std::array<RelevanceVector, 4> r;
  for (std::size_t k = 0; k < 4; ++k) r[k] = evaluate(kBuiltinIndicators[k], p);
  auto of = [&](K k, std::size_t streamer) { return r[static_cast<std::size_t>(k)][streamer - 1]; };

  static constexpr std::array<std::pair<K, K>, 6> kToyPairs = {{
      {K::SubscriberUniform, K::Uniform},
      {K::Proportional, K::Uniform},
      {K::SubscriberProportional, K::Uniform},
      {K::SubscriberUniform, K::Proportional},
      {K::SubscriberProportional, K::SubscriberUniform},
      {K::Proportional, K::SubscriberProportional},
  }};
  ToyReport report{scn, {}, true};
  for (const auto& [a, b] : kToyPairs)
    for (std::size_t streamer : {1u, 2u}) {
      ToyComparison c{a, b, streamer, of(a, streamer), of(b, streamer), Preference::Tie, Preference::Tie, {}, false};
      c.observed = preference_of(c.first_value - c.second_value);
      std::tie(c.predicted, c.rule) = detail::toy_prediction(a, b, streamer, scn);
      c.agrees = c.observed == c.predicted;
      report.all_agree = report.all_agree && c.agrees;
      report.rows.push_back(std::move(c));
    }
  return report;
}

}  // namespace relmeter

#endif  // RELMETER_ANALYSIS_HPP
