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

#ifndef RELMETER_GAMES_HPP
#define RELMETER_GAMES_HPP

// The five coalition games attached to the indicators and an exact Shapley
// value over all 2^|N| coalitions.

#include <relmeter/error.hpp>
#include <relmeter/indicators.hpp>
#include <relmeter/parallel.hpp>
#include <relmeter/platform.hpp>

#include <array>
#include <bit>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace relmeter {

enum class GameKind { InessentialU, EssentialSU, SupportSU, AdditiveSP, AdditiveP };

inline constexpr std::array<GameKind, 5> kAllGames = {GameKind::InessentialU, GameKind::EssentialSU,
                                                      GameKind::SupportSU, GameKind::AdditiveSP, GameKind::AdditiveP};

constexpr std::string_view to_string(GameKind g) noexcept {
  switch (g) {
    case GameKind::InessentialU: return "inessential-u";
    case GameKind::EssentialSU: return "essential-su";
    case GameKind::SupportSU: return "support-su";
    case GameKind::AdditiveSP: return "additive-sp";
    case GameKind::AdditiveP: return "additive-p";
  }
  return "unknown";
}

/// Indicator whose values the game's Shapley value should reproduce.
constexpr IndicatorKind matching_indicator(GameKind g) noexcept {
  switch (g) {
    case GameKind::InessentialU: return IndicatorKind::Uniform;
    case GameKind::EssentialSU:
    case GameKind::SupportSU: return IndicatorKind::SubscriberUniform;
    case GameKind::AdditiveSP: return IndicatorKind::SubscriberProportional;
    case GameKind::AdditiveP: return IndicatorKind::Proportional;
  }
  return IndicatorKind::External;
}

inline constexpr std::size_t kDefaultShapleyLimit = 20;

/// Bitmask coalition: bit i set means service i is in.
using Coalition = std::uint64_t;

class CoalitionGame {
 public:
  CoalitionGame(const Platform& p, GameKind kind) : platform_(&p), kind_(kind) {}

  const Platform& platform() const noexcept { return *platform_; }
  GameKind kind() const noexcept { return kind_; }
  std::size_t players() const noexcept { return platform_->service_count(); }

 private:
  const Platform* platform_;
  GameKind kind_;
};

namespace detail {

/// v(R) straight from the definitions; `in(i)` tells membership.
template <class In>
Rational coalition_value_by(const CoalitionGame& g, In in, bool empty) {
  const Platform& p = g.platform();
  const ConsumptionMatrix& m = p.matrix();
  if (empty) return 0;
  switch (g.kind()) {
    case GameKind::InessentialU: return p.success();
    case GameKind::EssentialSU: {
      RationalSum sum;
      for (std::size_t s = 0; s < p.subscriber_count(); ++s) {
        bool inside = true;
        for (const Cell& c : m.column(SubscriberId{s})) inside = inside && in(c.index);
        if (inside) sum += p.prices()[s];
      }
      return sum.total();
    }
    case GameKind::SupportSU: {
      RationalSum sum;
      for (std::size_t s = 0; s < p.subscriber_count(); ++s) {
        const auto col = m.column(SubscriberId{s});
        unsigned long hit = 0;
        for (const Cell& c : col) hit += in(c.index) ? 1 : 0;
        if (hit) sum += Rational(hit) / Rational(static_cast<unsigned long>(col.size())) * p.prices()[s];
      }
      return sum.total();
    }
    case GameKind::AdditiveSP: {
      RationalSum sum;
      for (std::size_t s = 0; s < p.subscriber_count(); ++s) {
        Rational inside = 0;
        for (const Cell& c : m.column(SubscriberId{s}))
          if (in(c.index)) inside += c.amount;
        if (sgn(inside)) sum += inside / m.subscriber_total(SubscriberId{s}) * p.prices()[s];
      }
      return sum.total();
    }
    case GameKind::AdditiveP: {
      Rational inside = 0;
      for (std::size_t i = 0; i < p.service_count(); ++i)
        if (in(i)) inside += m.service_total(ServiceId{i});
      return inside / m.grand_total() * p.success();
    }
  }
  return 0;
}

inline void check_player_limit(std::size_t n, std::size_t limit) {
  if (n > limit)
    throw Error(ErrorCode::TooManyServices,
                "exhaustive Shapley value limited to " + std::to_string(limit) + " services", limit);
}

}  // namespace detail

inline Rational coalition_value(const CoalitionGame& g, std::span<const ServiceId> coalition) {
  std::vector<bool> in(g.players(), false);
  for (ServiceId i : coalition) {
    if (i.value >= g.players()) throw Error(ErrorCode::IndexOutOfBounds, "service index", i.value);
    in[i.value] = true;
  }
  return detail::coalition_value_by(g, [&](std::size_t i) { return static_cast<bool>(in[i]); }, coalition.empty());
}

inline Rational coalition_value(const CoalitionGame& g, Coalition mask) {
  detail::check_player_limit(g.players(), 63);
  if (g.players() < 64 && (mask >> g.players()) != 0)
    throw Error(ErrorCode::IndexOutOfBounds, "coalition names a service outside N");
  return detail::coalition_value_by(g, [&](std::size_t i) { return ((mask >> i) & 1u) != 0; }, mask == 0);
}

/// v over all 2^n coalitions. The additive games are filled from their
/// singleton values, the essential game by a subset-sum transform over
/// subscriber supports.
inline std::vector<Rational> coalition_table(const CoalitionGame& g, std::size_t limit = kDefaultShapleyLimit) {
  const std::size_t n = g.players();
  detail::check_player_limit(n, std::min<std::size_t>(limit, 30));
  const std::size_t size = std::size_t{1} << n;
  std::vector<Rational> v(size, Rational(0));
  switch (g.kind()) {
    case GameKind::InessentialU:
      for (std::size_t mask = 1; mask < size; ++mask) v[mask] = g.platform().success();
      break;
    case GameKind::EssentialSU: {
      const Platform& p = g.platform();
      for (std::size_t s = 0; s < p.subscriber_count(); ++s) {
        Coalition support = 0;
        for (const Cell& c : p.matrix().column(SubscriberId{s})) support |= Coalition{1} << c.index;
        v[support] += p.prices()[s];
      }
      for (std::size_t bit = 0; bit < n; ++bit)
        for (std::size_t mask = 0; mask < size; ++mask)
          if (mask & (std::size_t{1} << bit)) v[mask] += v[mask ^ (std::size_t{1} << bit)];
      break;
    }
    case GameKind::SupportSU:
    case GameKind::AdditiveSP:
    case GameKind::AdditiveP: {
      std::vector<Rational> single(n);
      for (std::size_t i = 0; i < n; ++i) single[i] = coalition_value(g, Coalition{1} << i);
      for (std::size_t mask = 1; mask < size; ++mask) {
        const std::size_t low = static_cast<std::size_t>(std::countr_zero(mask));
        v[mask] = v[mask & (mask - 1)] + single[low];
      }
      break;
    }
  }
  return v;
}

struct ShapleyResult {
  std::vector<Rational> values;
  GameKind game;
};

/// Weight of a coalition of size k not containing the player:
/// k! (n-k-1)! / n!.
inline std::vector<Rational> shapley_weights(std::size_t n) {
  std::vector<mpz_class> fact(n + 1, 1);
  for (std::size_t k = 1; k <= n; ++k) fact[k] = fact[k - 1] * static_cast<unsigned long>(k);
  std::vector<Rational> w(n);
  for (std::size_t k = 0; k < n; ++k) {
    w[k] = Rational(fact[k] * fact[n - k - 1], fact[n]);
    w[k].canonicalize();
  }
  return w;
}

/// Exact Shapley value over every coalition; marginal contributions are
/// summed per coalition size before weighting.
inline ShapleyResult shapley(const CoalitionGame& g, std::size_t limit = kDefaultShapleyLimit) {
  const std::size_t n = g.players();
  detail::check_player_limit(n, limit);
  const std::vector<Rational> v = coalition_table(g, limit);
  const std::vector<Rational> w = shapley_weights(n);
  ShapleyResult out{std::vector<Rational>(n), g.kind()};
  parallel_for(n, [&](std::size_t i) {
    const std::size_t bit = std::size_t{1} << i;
    std::vector<Rational> by_size(n, Rational(0));
    for (std::size_t mask = 0; mask < v.size(); ++mask) {
      if (mask & bit) continue;
      by_size[static_cast<std::size_t>(std::popcount(mask))] += v[mask | bit] - v[mask];
    }
    Rational total = 0;
    for (std::size_t k = 0; k < n; ++k) total += w[k] * by_size[k];
    out.values[i] = std::move(total);
  });
  return out;
}

struct CoincidenceRow {
  GameKind game;
  IndicatorKind indicator;
  std::vector<Rational> shapley;
  std::vector<Rational> indicator_values;
  bool equal = false;
};

struct CoincidenceReport {
  std::vector<CoincidenceRow> rows;
  bool all_equal = true;
};

/// Shapley value of each game against its indicator, exactly.
inline CoincidenceReport verify_coincidence(const Platform& p, std::size_t limit = kDefaultShapleyLimit) {
  CoincidenceReport report;
  for (GameKind kind : kAllGames) {
    CoincidenceRow row{kind, matching_indicator(kind), shapley(CoalitionGame(p, kind), limit).values,
                       evaluate(matching_indicator(kind), p).values, false};
    row.equal = row.shapley == row.indicator_values;
    report.all_equal = report.all_equal && row.equal;
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace relmeter

#endif  // RELMETER_GAMES_HPP
