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

#ifndef RELMETER_PLATFORM_HPP
#define RELMETER_PLATFORM_HPP

#include <relmeter/error.hpp>
#include <relmeter/rational.hpp>

#include <algorithm>
#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace relmeter {

/// Dense zero-based index, distinct per tag so services and subscribers
/// cannot be mixed up.
template <class Tag>
struct Index {
  std::size_t value = 0;

  constexpr Index() = default;
  constexpr explicit Index(std::size_t v) : value(v) {}

  friend constexpr auto operator<=>(Index, Index) = default;
};

using ServiceId = Index<struct ServiceTag>;
using SubscriberId = Index<struct SubscriberTag>;

using Quantity = Rational;
using Price = Rational;

/// One (service, subscriber, amount) triplet used to assemble a matrix.
struct Entry {
  ServiceId service;
  SubscriberId subscriber;
  Quantity amount;
};

/// Stored nonzero of a sparse row or column. `index` is the subscriber for a
/// row and the service for a column.
struct Cell {
  std::size_t index = 0;
  Quantity amount;

  friend bool operator==(const Cell&, const Cell&) = default;
};

/// Sparse consumption matrix stored twice, by service (rows) and by
/// subscriber (columns). Only strictly positive amounts are stored; cells in
/// each line are sorted by index.
class ConsumptionMatrix {
 public:
  ConsumptionMatrix() = default;

  std::size_t service_count() const noexcept { return service_totals_.size(); }
  std::size_t subscriber_count() const noexcept { return subscriber_totals_.size(); }
  std::size_t nonzeros() const noexcept { return row_cells_.size(); }

  std::span<const Cell> row(ServiceId i) const {
    return {row_cells_.data() + row_offsets_[i.value], row_cells_.data() + row_offsets_[i.value + 1]};
  }
  std::span<const Cell> column(SubscriberId s) const {
    return {col_cells_.data() + col_offsets_[s.value], col_cells_.data() + col_offsets_[s.value + 1]};
  }

  const Quantity& service_total(ServiceId i) const { return service_totals_[i.value]; }
  const Quantity& subscriber_total(SubscriberId s) const { return subscriber_totals_[s.value]; }
  const std::vector<Quantity>& service_totals() const noexcept { return service_totals_; }
  const std::vector<Quantity>& subscriber_totals() const noexcept { return subscriber_totals_; }

  /// Sum of every entry.
  const Quantity& grand_total() const noexcept { return grand_total_; }

  /// C_{is}; zero when the cell is absent.
  Quantity at(ServiceId i, SubscriberId s) const {
    const auto cells = row(i);
    const auto it = std::lower_bound(cells.begin(), cells.end(), s.value,
                                     [](const Cell& c, std::size_t idx) { return c.index < idx; });
    if (it != cells.end() && it->index == s.value) return it->amount;
    return Quantity(0);
  }

  /// Row-major copy of the stored triplets.
  std::vector<Entry> entries() const {
    std::vector<Entry> out;
    out.reserve(nonzeros());
    for (std::size_t i = 0; i < service_count(); ++i)
      for (const Cell& c : row(ServiceId{i})) out.push_back({ServiceId{i}, SubscriberId{c.index}, c.amount});
    return out;
  }

  friend bool operator==(const ConsumptionMatrix& a, const ConsumptionMatrix& b) {
    return a.row_offsets_ == b.row_offsets_ && a.row_cells_ == b.row_cells_ &&
           a.subscriber_totals_.size() == b.subscriber_totals_.size();
  }

  /// `entries` must be sorted by (service, subscriber), free of duplicates
  /// and strictly positive. Used by `build_platform`.
  static ConsumptionMatrix from_canonical(std::vector<Entry> entries, std::size_t services, std::size_t subscribers) {
    ConsumptionMatrix m;
    m.row_offsets_.assign(services + 1, 0);
    m.col_offsets_.assign(subscribers + 1, 0);
    m.service_totals_.assign(services, Quantity(0));
    m.subscriber_totals_.assign(subscribers, Quantity(0));
    for (const Entry& e : entries) {
      ++m.row_offsets_[e.service.value + 1];
      ++m.col_offsets_[e.subscriber.value + 1];
    }
    for (std::size_t i = 0; i < services; ++i) m.row_offsets_[i + 1] += m.row_offsets_[i];
    for (std::size_t s = 0; s < subscribers; ++s) m.col_offsets_[s + 1] += m.col_offsets_[s];

    m.row_cells_.resize(entries.size());
    m.col_cells_.resize(entries.size());
    std::vector<std::size_t> col_fill(m.col_offsets_.begin(), m.col_offsets_.end() - 1);
    // Columns are short, so their totals are plain running sums.
    std::vector<RationalSum> row_sums(services);
    for (std::size_t k = 0; k < entries.size(); ++k) {
      Entry& e = entries[k];
      row_sums[e.service.value].add(e.amount);
      m.subscriber_totals_[e.subscriber.value] += e.amount;
      m.col_cells_[col_fill[e.subscriber.value]++] = Cell{e.service.value, e.amount};
      m.row_cells_[k] = Cell{e.subscriber.value, std::move(e.amount)};
    }
    RationalSum grand;
    for (std::size_t i = 0; i < services; ++i) {
      m.service_totals_[i] = row_sums[i].total();
      grand.add(m.service_totals_[i]);
    }
    m.grand_total_ = grand.total();
    return m;
  }

 private:
  std::vector<std::size_t> row_offsets_{0};
  std::vector<Cell> row_cells_;
  std::vector<std::size_t> col_offsets_{0};
  std::vector<Cell> col_cells_;
  std::vector<Quantity> service_totals_;
  std::vector<Quantity> subscriber_totals_;
  Quantity grand_total_;
};

/// Optional display names. Either vector may be empty; when present it has
/// one unique entry per service (subscriber).
struct Labels {
  std::vector<std::string> services;
  std::vector<std::string> subscribers;

  friend bool operator==(const Labels&, const Labels&) = default;
};

/// A validated, immutable (N, S, p, C) platform.
class Platform {
 public:
  std::size_t service_count() const noexcept { return matrix_.service_count(); }
  std::size_t subscriber_count() const noexcept { return prices_.size(); }

  const std::vector<Price>& prices() const noexcept { return prices_; }
  const Price& price(SubscriberId s) const { return prices_[s.value]; }
  const ConsumptionMatrix& matrix() const noexcept { return matrix_; }

  /// Total subscription revenue.
  const Rational& success() const noexcept { return success_; }

  const Labels& labels() const noexcept { return labels_; }

  /// Label if one was given, otherwise the one-based position.
  std::string service_name(ServiceId i) const {
    return labels_.services.empty() ? std::to_string(i.value + 1) : labels_.services[i.value];
  }
  std::string subscriber_name(SubscriberId s) const {
    return labels_.subscribers.empty() ? std::to_string(s.value + 1) : labels_.subscribers[s.value];
  }

  friend bool operator==(const Platform& a, const Platform& b) {
    return a.prices_ == b.prices_ && a.matrix_ == b.matrix_ && a.labels_ == b.labels_;
  }

 private:
  friend Platform build_platform(std::vector<Price>, std::vector<Entry>, std::size_t, Labels);

  std::vector<Price> prices_;
  ConsumptionMatrix matrix_;
  Rational success_;
  Labels labels_;
};

namespace detail {

inline void check_unique(const std::vector<std::string>& labels, std::size_t expected, const char* what) {
  if (labels.empty()) return;
  if (labels.size() != expected)
    throw Error(ErrorCode::IndexOutOfBounds, std::string(what) + " label count does not match");
  std::unordered_set<std::string> seen;
  for (const auto& l : labels)
    if (!seen.insert(l).second) throw Error(ErrorCode::DuplicateLabel, std::string(what) + " label '" + l + "'");
}

}  // namespace detail

/// Validates and assembles a platform. Duplicate (service, subscriber) pairs
/// are summed; zero amounts are dropped.
inline Platform build_platform(std::vector<Price> prices, std::vector<Entry> entries, std::size_t service_count,
                               Labels labels = {}) {
  if (service_count == 0) throw Error(ErrorCode::EmptyServiceSet, "a platform needs at least one service");
  if (prices.empty()) throw Error(ErrorCode::EmptySubscriberSet, "a platform needs at least one subscriber");
  const std::size_t subscribers = prices.size();
  for (std::size_t s = 0; s < subscribers; ++s)
    if (sgn(prices[s]) <= 0) throw Error(ErrorCode::NonPositivePrice, "subscriber " + std::to_string(s), s);
  for (const Entry& e : entries) {
    if (e.service.value >= service_count || e.subscriber.value >= subscribers)
      throw Error(ErrorCode::IndexOutOfBounds,
                  "entry (" + std::to_string(e.service.value) + ", " + std::to_string(e.subscriber.value) + ")");
    if (sgn(e.amount) < 0) throw Error(ErrorCode::MalformedRow, "negative consumption");
  }
  detail::check_unique(labels.services, service_count, "service");
  detail::check_unique(labels.subscribers, subscribers, "subscriber");

  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return a.service != b.service ? a.service < b.service : a.subscriber < b.subscriber;
  });
  std::vector<Entry> merged;
  merged.reserve(entries.size());
  for (Entry& e : entries) {
    if (!merged.empty() && merged.back().service == e.service && merged.back().subscriber == e.subscriber)
      merged.back().amount += e.amount;
    else
      merged.push_back(std::move(e));
  }
  std::erase_if(merged, [](const Entry& e) { return sgn(e.amount) == 0; });

  Platform p;
  p.matrix_ = ConsumptionMatrix::from_canonical(std::move(merged), service_count, subscribers);
  for (std::size_t s = 0; s < subscribers; ++s)
    if (p.matrix_.column(SubscriberId{s}).empty())
      throw Error(ErrorCode::ZeroColumnSubscriber, "subscriber " + std::to_string(s) + " consumes nothing", s);

  RationalSum sigma;
  for (const Price& price : prices) sigma.add(price);
  p.success_ = sigma.total();
  p.prices_ = std::move(prices);
  p.labels_ = std::move(labels);
  return p;
}

/// Same platform with every consumption entry multiplied by `lambda`.
inline Platform scale_matrix(const Platform& p, const Rational& lambda) {
  if (sgn(lambda) <= 0) throw Error(ErrorCode::NonPositiveScale, "scale factor must be positive");
  auto entries = p.matrix().entries();
  for (Entry& e : entries) e.amount *= lambda;
  return build_platform(p.prices(), std::move(entries), p.service_count(), p.labels());
}

/// Platform over the kept columns only, in the order given by `keep`.
inline Platform restrict_subscribers(const Platform& p, std::span<const SubscriberId> keep) {
  if (keep.empty()) throw Error(ErrorCode::EmptySubscriberSet, "no subscribers kept");
  std::vector<Price> prices;
  std::vector<Entry> entries;
  Labels labels{p.labels().services, {}};
  for (std::size_t k = 0; k < keep.size(); ++k) {
    const SubscriberId s = keep[k];
    if (s.value >= p.subscriber_count()) throw Error(ErrorCode::IndexOutOfBounds, "subscriber index", s.value);
    prices.push_back(p.price(s));
    if (!p.labels().subscribers.empty()) labels.subscribers.push_back(p.labels().subscribers[s.value]);
    for (const Cell& c : p.matrix().column(s)) entries.push_back({ServiceId{c.index}, SubscriberId{k}, c.amount});
  }
  return build_platform(std::move(prices), std::move(entries), p.service_count(), std::move(labels));
}

/// Convenience for small fixtures: `rows[i][s]` is C_{is}.
inline Platform platform_from_dense(std::vector<Price> prices, const std::vector<std::vector<Quantity>>& rows,
                                    Labels labels = {}) {
  std::vector<Entry> entries;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != prices.size()) throw Error(ErrorCode::IndexOutOfBounds, "row width differs from |S|", i);
    for (std::size_t s = 0; s < rows[i].size(); ++s)
      if (sgn(rows[i][s]) != 0) entries.push_back({ServiceId{i}, SubscriberId{s}, rows[i][s]});
  }
  return build_platform(std::move(prices), std::move(entries), rows.size(), std::move(labels));
}

}  // namespace relmeter

#endif  // RELMETER_PLATFORM_HPP
