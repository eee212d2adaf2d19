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

#ifndef RELMETER_INDICATORS_HPP
#define RELMETER_INDICATORS_HPP

#include <relmeter/platform.hpp>
#include <relmeter/rational.hpp>

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace relmeter {

/// The four built-in relevance indicators. `External` tags vectors produced
/// by user-supplied evaluators (see `Indicator`).
enum class IndicatorKind { Uniform, SubscriberUniform, Proportional, SubscriberProportional, External };

inline constexpr std::array<IndicatorKind, 4> kBuiltinIndicators = {
    IndicatorKind::Uniform, IndicatorKind::SubscriberUniform, IndicatorKind::Proportional,
    IndicatorKind::SubscriberProportional};

constexpr std::string_view to_string(IndicatorKind k) noexcept {
  switch (k) {
    case IndicatorKind::Uniform: return "uniform";
    case IndicatorKind::SubscriberUniform: return "subscriber-uniform";
    case IndicatorKind::Proportional: return "proportional";
    case IndicatorKind::SubscriberProportional: return "subscriber-proportional";
    case IndicatorKind::External: return "external";
  }
  return "unknown";
}

/// "u", "su", "p", "sp" as used on the command line and in report headers.
constexpr std::string_view short_name(IndicatorKind k) noexcept {
  switch (k) {
    case IndicatorKind::Uniform: return "u";
    case IndicatorKind::SubscriberUniform: return "su";
    case IndicatorKind::Proportional: return "p";
    case IndicatorKind::SubscriberProportional: return "sp";
    case IndicatorKind::External: return "ext";
  }
  return "?";
}

inline std::optional<IndicatorKind> parse_indicator(std::string_view text) {
  for (IndicatorKind k : kBuiltinIndicators)
    if (text == short_name(k) || text == to_string(k)) return k;
  return std::nullopt;
}

/// Per-service relevance, indexed like the platform's services.
struct RelevanceVector {
  IndicatorKind kind = IndicatorKind::External;
  std::vector<Rational> values;

  std::size_t size() const noexcept { return values.size(); }
  const Rational& operator[](std::size_t i) const { return values[i]; }

  Rational total() const {
    RationalSum sum;
    for (const auto& v : values) sum.add(v);
    return sum.total();
  }

  friend bool operator==(const RelevanceVector& a, const RelevanceVector& b) { return a.values == b.values; }
};

/// sigma / |N| for every service, watched or not.
inline RelevanceVector uniform(const Platform& p) {
  const Rational share = p.success() / Rational(static_cast<unsigned long>(p.service_count()));
  return {IndicatorKind::Uniform, std::vector<Rational>(p.service_count(), share)};
}

/// Each subscriber's price split evenly over the services it consumed.
inline RelevanceVector subscriber_uniform(const Platform& p) {
  const auto& m = p.matrix();
  std::vector<RationalSum> sums(p.service_count());
  for (std::size_t s = 0; s < p.subscriber_count(); ++s) {
    const auto column = m.column(SubscriberId{s});
    const Rational share = p.prices()[s] / Rational(static_cast<unsigned long>(column.size()));
    for (const Cell& c : column) sums[c.index].add(share);
  }
  RelevanceVector out{IndicatorKind::SubscriberUniform, {}};
  out.values.reserve(sums.size());
  for (const auto& sum : sums) out.values.push_back(sum.total());
  return out;
}

/// sigma split by each service's share of total consumption.
inline RelevanceVector proportional(const Platform& p) {
  const auto& m = p.matrix();
  const Rational scale = p.success() / m.grand_total();
  RelevanceVector out{IndicatorKind::Proportional, {}};
  out.values.reserve(p.service_count());
  for (const auto& total : m.service_totals()) out.values.push_back(total * scale);
  return out;
}

/// Each subscriber's price split by its own consumption shares, then summed.
inline RelevanceVector subscriber_proportional(const Platform& p) {
  const auto& m = p.matrix();
  std::vector<Rational> rate(p.subscriber_count());
  for (std::size_t s = 0; s < p.subscriber_count(); ++s) rate[s] = p.prices()[s] / m.subscriber_total(SubscriberId{s});

  RelevanceVector out{IndicatorKind::SubscriberProportional, {}};
  out.values.reserve(p.service_count());
  Rational term;
  for (std::size_t i = 0; i < p.service_count(); ++i) {
    RationalSum sum;
    for (const Cell& c : m.row(ServiceId{i})) {
      term = c.amount * rate[c.index];
      sum.add(term);
    }
    out.values.push_back(sum.total());
  }
  return out;
}

inline RelevanceVector evaluate(IndicatorKind kind, const Platform& p) {
  switch (kind) {
    case IndicatorKind::Uniform: return uniform(p);
    case IndicatorKind::SubscriberUniform: return subscriber_uniform(p);
    case IndicatorKind::Proportional: return proportional(p);
    case IndicatorKind::SubscriberProportional: return subscriber_proportional(p);
    case IndicatorKind::External: break;
  }
  throw Error(ErrorCode::InvalidConfig, "external indicators need an evaluator");
}

using Evaluator = std::function<RelevanceVector(const Platform&)>;

/// A named indicator: one of the built-ins or any user evaluator.
struct Indicator {
  std::string name;
  IndicatorKind kind = IndicatorKind::External;
  Evaluator evaluate;

  static Indicator builtin(IndicatorKind k) {
    return {std::string(short_name(k)), k, [k](const Platform& p) { return relmeter::evaluate(k, p); }};
  }
  static Indicator external(std::string name, Evaluator fn) {
    return {std::move(name), IndicatorKind::External, std::move(fn)};
  }
};

}  // namespace relmeter

#endif  // RELMETER_INDICATORS_HPP
