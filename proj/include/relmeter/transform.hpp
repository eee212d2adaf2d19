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

#ifndef RELMETER_TRANSFORM_HPP
#define RELMETER_TRANSFORM_HPP

// Platform transformations behind the composition, non-manipulability and
// sharing-proofness checks. All of them return new platforms.

#include <relmeter/error.hpp>
#include <relmeter/platform.hpp>

#include <algorithm>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace relmeter {

/// Sparse row: (subscriber index, amount) cells.
using SparseRow = std::vector<Cell>;

/// Column concatenation (C ⊕ C', p ⊕ p'). Both sides must have the same
/// services; subscriber labels, when present on both, must be disjoint.
inline Platform compose_platforms(const Platform& a, const Platform& b) {
  if (a.service_count() != b.service_count())
    throw Error(ErrorCode::ServiceSetMismatch, "platforms have different service counts");
  if (a.labels().services != b.labels().services)
    throw Error(ErrorCode::ServiceSetMismatch, "platforms have different service labels");

  std::vector<Price> prices = a.prices();
  prices.insert(prices.end(), b.prices().begin(), b.prices().end());
  std::vector<Entry> entries = a.matrix().entries();
  for (Entry e : b.matrix().entries()) {
    e.subscriber.value += a.subscriber_count();
    entries.push_back(std::move(e));
  }
  Labels labels{a.labels().services, {}};
  const bool a_named = !a.labels().subscribers.empty();
  const bool b_named = !b.labels().subscribers.empty();
  if (a_named || b_named) {
    for (std::size_t s = 0; s < a.subscriber_count(); ++s) labels.subscribers.push_back(a.subscriber_name(SubscriberId{s}));
    for (std::size_t s = 0; s < b.subscriber_count(); ++s) labels.subscribers.push_back(b.subscriber_name(SubscriberId{s}));
  }
  return build_platform(std::move(prices), std::move(entries), a.service_count(), std::move(labels));
}

namespace detail {

template <class Id>
void check_group(std::span<const Id> group, Id survivor, std::size_t bound, const char* what) {
  if (group.size() < 2) throw Error(ErrorCode::GroupTooSmall, std::string(what) + " group needs at least two members");
  std::vector<std::size_t> seen;
  for (Id g : group) {
    if (g.value >= bound) throw Error(ErrorCode::IndexOutOfBounds, std::string(what) + " index", g.value);
    seen.push_back(g.value);
  }
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
    throw Error(ErrorCode::InvalidConfig, std::string(what) + " group lists a member twice");
  if (!std::binary_search(seen.begin(), seen.end(), survivor.value))
    throw Error(ErrorCode::SurvivorNotInGroup, std::string(what) + " survivor must belong to the group");
}

/// Old index -> new index after removing `group \ {survivor}`; the removed
/// members map onto the survivor.
template <class Id>
std::vector<std::size_t> collapse_map(std::span<const Id> group, Id survivor, std::size_t count) {
  std::vector<bool> removed(count, false);
  for (Id g : group)
    if (g != survivor) removed[g.value] = true;
  std::vector<std::size_t> map(count);
  std::size_t next = 0;
  for (std::size_t k = 0; k < count; ++k)
    if (!removed[k]) map[k] = next++;
  for (Id g : group) map[g.value] = map[survivor.value];
  return map;
}

}  // namespace detail

/// Position of the survivor once the rest of `group` has been removed.
template <class Id>
Id merged_index(std::span<const Id> group, Id survivor) {
  std::size_t before = 0;
  for (Id g : group)
    if (g != survivor && g.value < survivor.value) ++before;
  return Id{survivor.value - before};
}

/// The survivor's row becomes the entrywise sum of the group's rows; the
/// other group rows are removed and later services shift down.
inline Platform merge_services(const Platform& p, std::span<const ServiceId> group, ServiceId survivor) {
  detail::check_group(group, survivor, p.service_count(), "service");
  const auto map = detail::collapse_map(group, survivor, p.service_count());
  std::vector<Entry> entries = p.matrix().entries();
  for (Entry& e : entries) e.service = ServiceId{map[e.service.value]};
  Labels labels{{}, p.labels().subscribers};
  if (!p.labels().services.empty())
    for (std::size_t i = 0; i < p.service_count(); ++i)
      if (map[i] == labels.services.size() && (i == survivor.value || map[i] != map[survivor.value]))
        labels.services.push_back(p.labels().services[i]);
  return build_platform(p.prices(), std::move(entries), p.service_count() - (group.size() - 1), std::move(labels));
}

/// Replaces the target row by `parts.size()` rows placed where the target
/// was. The parts must add up to the target row exactly.
inline Platform split_service(const Platform& p, ServiceId target, std::span<const SparseRow> parts) {
  if (target.value >= p.service_count()) throw Error(ErrorCode::IndexOutOfBounds, "service index", target.value);
  if (parts.size() < 2) throw Error(ErrorCode::GroupTooSmall, "a split needs at least two parts");

  std::map<std::size_t, Rational> sum;
  for (const SparseRow& part : parts)
    for (const Cell& c : part) {
      if (c.index >= p.subscriber_count()) throw Error(ErrorCode::IndexOutOfBounds, "subscriber index", c.index);
      if (sgn(c.amount) < 0) throw Error(ErrorCode::PartsDoNotSum, "negative part amount");
      sum[c.index] += c.amount;
    }
  std::erase_if(sum, [](const auto& kv) { return sgn(kv.second) == 0; });
  const auto row = p.matrix().row(target);
  bool equal = sum.size() == row.size();
  for (const Cell& c : row) {
    const auto it = sum.find(c.index);
    if (it == sum.end() || it->second != c.amount) equal = false;
  }
  if (!equal) throw Error(ErrorCode::PartsDoNotSum, "parts do not add up to the target row");

  const std::size_t extra = parts.size() - 1;
  std::vector<Entry> entries;
  for (Entry& e : p.matrix().entries()) {
    if (e.service == target) continue;
    if (e.service > target) e.service.value += extra;
    entries.push_back(std::move(e));
  }
  for (std::size_t k = 0; k < parts.size(); ++k)
    for (const Cell& c : parts[k]) entries.push_back({ServiceId{target.value + k}, SubscriberId{c.index}, c.amount});

  Labels labels{{}, p.labels().subscribers};
  if (!p.labels().services.empty()) {
    for (std::size_t i = 0; i < p.service_count(); ++i) {
      if (i != target.value) {
        labels.services.push_back(p.labels().services[i]);
        continue;
      }
      for (std::size_t k = 0; k < parts.size(); ++k)
        labels.services.push_back(p.labels().services[i] + "#" + std::to_string(k + 1));
    }
  }
  return build_platform(p.prices(), std::move(entries), p.service_count() + extra, std::move(labels));
}

/// Subscribers in `group` pool one account: the survivor's column is the
/// group's column sum and its price the group's price sum.
inline Platform merge_subscribers(const Platform& p, std::span<const SubscriberId> group, SubscriberId survivor) {
  detail::check_group(group, survivor, p.subscriber_count(), "subscriber");
  const auto map = detail::collapse_map(group, survivor, p.subscriber_count());
  const std::size_t remaining = p.subscriber_count() - (group.size() - 1);
  std::vector<Price> prices(remaining, Price(0));
  for (std::size_t s = 0; s < p.subscriber_count(); ++s) prices[map[s]] += p.prices()[s];
  std::vector<Entry> entries = p.matrix().entries();
  for (Entry& e : entries) e.subscriber = SubscriberId{map[e.subscriber.value]};
  Labels labels{p.labels().services, {}};
  if (!p.labels().subscribers.empty()) {
    labels.subscribers.resize(remaining);
    for (std::size_t s = 0; s < p.subscriber_count(); ++s)
      if (map[s] != map[survivor.value] || s == survivor.value) labels.subscribers[map[s]] = p.labels().subscribers[s];
  }
  return build_platform(std::move(prices), std::move(entries), p.service_count(), std::move(labels));
}

}  // namespace relmeter

#endif  // RELMETER_TRANSFORM_HPP
