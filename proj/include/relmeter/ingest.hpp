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

#ifndef RELMETER_INGEST_HPP
#define RELMETER_INGEST_HPP

// Viewer-event logs in, platforms out; viewer statistics, synthetic logs
// and revenue allocation.
//
// Event CSV:  viewer_id,service_id,amount   (amount a nonnegative decimal)
// Price CSV:  viewer_id,price
// Lines starting with '#' and blank lines are skipped. Fields are split on
// commas; quoting is not supported.

#include <relmeter/error.hpp>
#include <relmeter/indicators.hpp>
#include <relmeter/platform.hpp>
#include <relmeter/random.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <istream>
#include <iterator>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace relmeter {

struct ViewEvent {
  std::string viewer;
  std::string service;
  Quantity amount;
};

struct PriceTable {
  std::unordered_map<std::string, Price> entries;
  std::optional<Price> default_price;

  std::optional<Price> lookup(const std::string& viewer) const {
    if (const auto it = entries.find(viewer); it != entries.end()) return it->second;
    return default_price;
  }
};

namespace detail {

/// Calls fn(line_number, fields) for every data row after checking the
/// header. Rows with the wrong field count are MalformedRow.
template <class Fn>
void for_each_csv_row(std::istream& in, std::string_view header, std::size_t width, Fn&& fn) {
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::string_view rest(text);
  std::size_t line_no = 0;
  bool seen_header = false;
  std::vector<std::string_view> fields;
  fields.reserve(width);
  while (!rest.empty()) {
    const std::size_t nl = rest.find('\n');
    std::string_view line = rest.substr(0, nl);
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    if (!seen_header) {
      if (line != header)
        throw Error(ErrorCode::MalformedRow, "line " + std::to_string(line_no) + ": expected header '" +
                                                 std::string(header) + "'", line_no);
      seen_header = true;
      continue;
    }
    fields.clear();
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      fields.push_back(line.substr(start, comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (fields.size() != width)
      throw Error(ErrorCode::MalformedRow, "line " + std::to_string(line_no) + ": expected " + std::to_string(width) +
                                               " fields", line_no);
    fn(line_no, fields);
  }
  if (!seen_header) throw Error(ErrorCode::EmptyLog, "missing header '" + std::string(header) + "'");
}

inline Rational parse_amount(std::string_view field, std::size_t line_no) {
  auto value = parse_decimal(field);
  if (!value || sgn(*value) < 0)
    throw Error(ErrorCode::MalformedRow, "line " + std::to_string(line_no) + ": bad amount '" + std::string(field) + "'",
                line_no);
  return std::move(*value);
}

}  // namespace detail

/// Reads `viewer_id,price`. Prices must be positive decimals.
inline PriceTable read_prices(std::istream& in, std::optional<Price> default_price = std::nullopt) {
  if (default_price && sgn(*default_price) <= 0) throw Error(ErrorCode::NonPositivePrice, "default price must be positive");
  PriceTable table{{}, std::move(default_price)};
  detail::for_each_csv_row(in, "viewer_id,price", 2, [&](std::size_t line_no, const auto& f) {
    if (f[0].empty()) throw Error(ErrorCode::MalformedRow, "line " + std::to_string(line_no) + ": empty viewer", line_no);
    Rational price = detail::parse_amount(f[1], line_no);
    if (sgn(price) == 0)
      throw Error(ErrorCode::NonPositivePrice, "line " + std::to_string(line_no) + ": price must be positive", line_no);
    table.entries[std::string(f[0])] = std::move(price);
  });
  return table;
}

inline std::vector<ViewEvent> read_events(std::istream& in) {
  std::vector<ViewEvent> events;
  detail::for_each_csv_row(in, "viewer_id,service_id,amount", 3, [&](std::size_t line_no, const auto& f) {
    if (f[0].empty() || f[1].empty())
      throw Error(ErrorCode::MalformedRow, "line " + std::to_string(line_no) + ": empty key", line_no);
    events.push_back({std::string(f[0]), std::string(f[1]), detail::parse_amount(f[2], line_no)});
  });
  return events;
}

struct LoadResult {
  Platform platform;
  std::size_t events = 0;
  std::size_t dropped_viewers = 0;  // viewers whose events were all zero
};

/// Builds a platform from events. Services listed in `catalog` come first in
/// that order (so services nobody watched still exist); the rest, and all
/// viewers, are indexed by first appearance. Duplicate pairs are summed.
inline LoadResult load_events(const std::vector<ViewEvent>& events, const PriceTable& prices,
                              const std::vector<std::string>& catalog = {}) {
  std::unordered_map<std::string, std::size_t> service_index, viewer_index;
  std::vector<std::string> service_names, viewer_names;
  for (const auto& name : catalog)
    if (service_index.emplace(name, service_names.size()).second) service_names.push_back(name);
  viewer_index.reserve(events.size() / 2 + 1);

  std::vector<Entry> raw;
  raw.reserve(events.size());
  std::vector<bool> positive;
  for (const ViewEvent& e : events) {
    auto [sit, snew] = service_index.try_emplace(e.service, service_names.size());
    if (snew) service_names.push_back(e.service);
    auto [vit, vnew] = viewer_index.try_emplace(e.viewer, viewer_names.size());
    if (vnew) {
      viewer_names.push_back(e.viewer);
      positive.push_back(false);
    }
    if (sgn(e.amount) > 0) positive[vit->second] = true;
    raw.push_back({ServiceId{sit->second}, SubscriberId{vit->second}, e.amount});
  }

  // Drop all-zero viewers and renumber the rest densely.
  std::vector<std::size_t> remap(viewer_names.size());
  std::vector<std::string> kept_names;
  std::vector<Price> kept_prices;
  std::size_t dropped = 0;
  for (std::size_t v = 0; v < viewer_names.size(); ++v) {
    if (!positive[v]) {
      ++dropped;
      continue;
    }
    auto price = prices.lookup(viewer_names[v]);
    if (!price) throw Error(ErrorCode::UnpricedViewer, "no price for viewer '" + viewer_names[v] + "'", v);
    remap[v] = kept_names.size();
    kept_names.push_back(std::move(viewer_names[v]));
    kept_prices.push_back(std::move(*price));
  }
  if (kept_names.empty()) throw Error(ErrorCode::EmptyLog, "no positive-amount events");

  std::vector<Entry> entries;
  entries.reserve(raw.size());
  for (Entry& e : raw) {
    if (!positive[e.subscriber.value] || sgn(e.amount) == 0) continue;
    e.subscriber = SubscriberId{remap[e.subscriber.value]};
    entries.push_back(std::move(e));
  }
  const std::size_t n = service_names.size();
  return {build_platform(std::move(kept_prices), std::move(entries), n, {std::move(service_names), std::move(kept_names)}),
          events.size(), dropped};
}

inline LoadResult load_events(std::istream& in, const PriceTable& prices, const std::vector<std::string>& catalog = {}) {
  return load_events(read_events(in), prices, catalog);
}

/// Exact decimal text when the denominator is a product of 2s and 5s,
/// otherwise "num/den".
inline std::string exact_decimal(const Rational& q) {
  if (q.get_den() == 1) return q.get_str();
  mpz_class rest = q.get_den();
  std::size_t twos = 0, fives = 0;
  while (mpz_divisible_ui_p(rest.get_mpz_t(), 2)) rest /= 2, ++twos;
  while (mpz_divisible_ui_p(rest.get_mpz_t(), 5)) rest /= 5, ++fives;
  if (rest != 1) return q.get_str();
  const std::size_t digits = std::max(twos, fives);
  mpz_class p10;
  mpz_ui_pow_ui(p10.get_mpz_t(), 10, digits);
  const mpz_class scaled = abs(q.get_num()) * (p10 / q.get_den());
  std::string s = scaled.get_str();
  if (s.size() <= digits) s.insert(0, digits - s.size() + 1, '0');
  s.insert(s.size() - digits, ".");
  return (sgn(q) < 0 ? "-" : "") + s;
}

inline void write_events(std::ostream& out, const std::vector<ViewEvent>& events) {
  out << "viewer_id,service_id,amount\n";
  for (const ViewEvent& e : events) out << e.viewer << ',' << e.service << ',' << exact_decimal(e.amount) << '\n';
}

inline void write_prices(std::ostream& out, const std::vector<std::string>& viewers, const std::vector<Price>& prices) {
  out << "viewer_id,price\n";
  for (std::size_t k = 0; k < viewers.size(); ++k) out << viewers[k] << ',' << exact_decimal(prices[k]) << '\n';
}

// ---- viewer statistics -----------------------------------------------------

struct ServiceStats {
  std::size_t viewers = 0;
  Rational viewer_share;  // viewers / Σ viewers over services
  std::size_t exclusive_viewers = 0;
  Rational exclusive_share;  // exclusive / Σ exclusive over services
};

struct ViewerStats {
  std::vector<ServiceStats> per_service;
  std::size_t total_viewers = 0;     // Σ over services, a viewer counted once per service
  std::size_t total_exclusive = 0;
};

inline ViewerStats viewer_stats(const Platform& p) {
  ViewerStats stats;
  stats.per_service.resize(p.service_count());
  for (std::size_t i = 0; i < p.service_count(); ++i) {
    stats.per_service[i].viewers = p.matrix().row(ServiceId{i}).size();
    stats.total_viewers += stats.per_service[i].viewers;
  }
  for (std::size_t s = 0; s < p.subscriber_count(); ++s) {
    const auto col = p.matrix().column(SubscriberId{s});
    if (col.size() == 1) {
      ++stats.per_service[col[0].index].exclusive_viewers;
      ++stats.total_exclusive;
    }
  }
  for (ServiceStats& st : stats.per_service) {
    if (stats.total_viewers)
      st.viewer_share = Rational(static_cast<unsigned long>(st.viewers)) / static_cast<unsigned long>(stats.total_viewers);
    if (stats.total_exclusive)
      st.exclusive_share =
          Rational(static_cast<unsigned long>(st.exclusive_viewers)) / static_cast<unsigned long>(stats.total_exclusive);
  }
  return stats;
}

// ---- allocation ------------------------------------------------------------

/// payout_i = pool · R_i / σ, exact.
inline std::vector<Rational> allocate_revenue(const Platform& p, IndicatorKind kind, const Rational& pool) {
  if (sgn(pool) <= 0) throw Error(ErrorCode::InvalidConfig, "pool must be positive");
  const Rational factor = pool / p.success();
  auto r = evaluate(kind, p);
  for (Rational& x : r.values) x *= factor;
  return std::move(r.values);
}

// ---- synthetic logs --------------------------------------------------------

struct PriceModel {
  enum class Kind { Constant, LogNormal } kind = Kind::Constant;
  Rational value = 1;  // constant price
  double mu = 0.0;     // lognormal parameters of the price in currency units
  double sigma = 0.25;
};

struct SynthConfig {
  std::size_t services = 19;
  std::size_t subscribers = 10000;
  double popularity_exponent = 1.0;
  double mean_services_per_viewer = 1.45;
  double mean_events_per_view = 1.0;
  std::uint64_t rng_seed = 7;
  PriceModel price_model;

  void validate() const {
    if (services < 1) throw Error(ErrorCode::InvalidConfig, "services must be at least 1");
    if (subscribers < 1) throw Error(ErrorCode::InvalidConfig, "subscribers must be at least 1");
    if (!(popularity_exponent >= 0)) throw Error(ErrorCode::InvalidConfig, "popularityExponent must be >= 0");
    if (!(mean_services_per_viewer >= 1)) throw Error(ErrorCode::InvalidConfig, "meanServicesPerViewer must be >= 1");
    if (!(mean_events_per_view >= 1)) throw Error(ErrorCode::InvalidConfig, "meanEventsPerView must be >= 1");
    if (price_model.kind == PriceModel::Kind::Constant && sgn(price_model.value) <= 0)
      throw Error(ErrorCode::InvalidConfig, "constant price must be positive");
    if (price_model.kind == PriceModel::Kind::LogNormal && !(price_model.sigma >= 0))
      throw Error(ErrorCode::InvalidConfig, "lognormal sigma must be >= 0");
  }
};

/// JSON keys mirror the field names: services, subscribers,
/// popularityExponent, meanServicesPerViewer, meanEventsPerView, rngSeed and
/// priceModel = {"type": "constant", "value": "1"} or
/// {"type": "lognormal", "mu": 0, "sigma": 0.25}. Missing keys keep defaults.
inline SynthConfig synth_config_from_json(const nlohmann::json& j) {
  SynthConfig cfg;
  try {
    for (const auto& [key, _] : j.items()) {
      static const char* known[] = {"services", "subscribers", "popularityExponent", "meanServicesPerViewer",
                                    "meanEventsPerView", "rngSeed", "priceModel"};
      if (std::find(std::begin(known), std::end(known), key) == std::end(known))
        throw Error(ErrorCode::InvalidConfig, "unknown synth config key '" + key + "'");
    }
    if (j.contains("services")) cfg.services = j.at("services").get<std::size_t>();
    if (j.contains("subscribers")) cfg.subscribers = j.at("subscribers").get<std::size_t>();
    if (j.contains("popularityExponent")) cfg.popularity_exponent = j.at("popularityExponent").get<double>();
    if (j.contains("meanServicesPerViewer")) cfg.mean_services_per_viewer = j.at("meanServicesPerViewer").get<double>();
    if (j.contains("meanEventsPerView")) cfg.mean_events_per_view = j.at("meanEventsPerView").get<double>();
    if (j.contains("rngSeed")) cfg.rng_seed = j.at("rngSeed").get<std::uint64_t>();
    if (j.contains("priceModel")) {
      const auto& pm = j.at("priceModel");
      const std::string type = pm.value("type", "constant");
      if (type == "constant") {
        cfg.price_model.kind = PriceModel::Kind::Constant;
        if (pm.contains("value")) {
          const auto& v = pm.at("value");
          const std::string text = v.is_string() ? v.get<std::string>() : v.dump();
          auto parsed = parse_rational(text);
          if (!parsed) throw Error(ErrorCode::InvalidConfig, "bad constant price '" + text + "'");
          cfg.price_model.value = *parsed;
        }
      } else if (type == "lognormal") {
        cfg.price_model.kind = PriceModel::Kind::LogNormal;
        cfg.price_model.mu = pm.value("mu", 0.0);
        cfg.price_model.sigma = pm.value("sigma", 0.25);
      } else {
        throw Error(ErrorCode::InvalidConfig, "unknown price model '" + type + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("synth config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

struct SynthResult {
  Platform platform;
  std::vector<ViewEvent> events;
  std::vector<std::string> services;  // catalog, in index order
  PriceTable prices;
};

namespace detail {

inline std::string padded(char prefix, std::size_t k, std::size_t width) {
  std::string digits = std::to_string(k);
  if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
  return prefix + digits;
}

}  // namespace detail

/// Zipf-popular services; each viewer watches 1 + Poisson(mean − 1)
/// distinct services (capped at |N|), each relationship is logged as
/// 1 + Poisson(meanEventsPerView − 1) events of 0.1 to 4.0 hours.
inline SynthResult synthesize(const SynthConfig& cfg) {
  cfg.validate();
  Rng rng(mix_seed(cfg.rng_seed));
  const std::size_t n = cfg.services;
  const std::size_t width_s = std::to_string(n).size() < 2 ? 2 : std::to_string(n).size();
  const std::size_t width_v = std::max<std::size_t>(7, std::to_string(cfg.subscribers).size());

  SynthResult out;
  for (std::size_t i = 0; i < n; ++i) out.services.push_back(detail::padded('s', i + 1, width_s));

  std::vector<double> weights(n);
  for (std::size_t i = 0; i < n; ++i) weights[i] = 1.0 / std::pow(static_cast<double>(i + 1), cfg.popularity_exponent);
  std::discrete_distribution<std::size_t> pick_service(weights.begin(), weights.end());
  std::poisson_distribution<std::size_t> extra_services(cfg.mean_services_per_viewer - 1.0);
  std::poisson_distribution<std::size_t> extra_events(cfg.mean_events_per_view - 1.0);
  const bool poisson_services = cfg.mean_services_per_viewer > 1.0;
  const bool poisson_events = cfg.mean_events_per_view > 1.0;
  std::uniform_int_distribution<long> tenths(1, 40);
  std::lognormal_distribution<double> price_dist(cfg.price_model.mu, cfg.price_model.sigma);

  std::vector<Price> prices;
  std::vector<std::string> viewers;
  std::vector<Entry> entries;
  prices.reserve(cfg.subscribers);
  viewers.reserve(cfg.subscribers);
  std::vector<std::size_t> chosen;
  std::vector<char> taken(n, 0);
  for (std::size_t v = 0; v < cfg.subscribers; ++v) {
    const std::string viewer = detail::padded('v', v + 1, width_v);
    std::size_t k = 1 + (poisson_services ? extra_services(rng) : 0);
    k = std::min(k, n);
    chosen.clear();
    for (std::size_t attempts = 0; chosen.size() < k && attempts < 64 * k; ++attempts) {
      const std::size_t i = pick_service(rng);
      if (!taken[i]) {
        taken[i] = 1;
        chosen.push_back(i);
      }
    }
    for (std::size_t i = 0; chosen.size() < k && i < n; ++i)
      if (!taken[i]) {
        taken[i] = 1;
        chosen.push_back(i);
      }
    for (std::size_t i : chosen) {
      taken[i] = 0;
      const std::size_t count = 1 + (poisson_events ? extra_events(rng) : 0);
      for (std::size_t e = 0; e < count; ++e) {
        Rational amount(tenths(rng), 10L);
        amount.canonicalize();
        out.events.push_back({viewer, out.services[i], amount});
        entries.push_back({ServiceId{i}, SubscriberId{v}, std::move(amount)});
      }
    }
    Price price = cfg.price_model.value;
    if (cfg.price_model.kind == PriceModel::Kind::LogNormal) {
      const long cents = std::max(1L, std::lround(price_dist(rng) * 100.0));
      price = Rational(cents, 100L);
      price.canonicalize();
    }
    out.prices.entries.emplace(viewer, price);
    prices.push_back(std::move(price));
    viewers.push_back(viewer);
  }
  out.platform = build_platform(std::move(prices), std::move(entries), n, {out.services, std::move(viewers)});
  return out;
}

}  // namespace relmeter

#endif  // RELMETER_INGEST_HPP
