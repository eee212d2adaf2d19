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

#ifndef RELMETER_TESTS_SHADOW_HPP
#define RELMETER_TESTS_SHADOW_HPP

#include <relmeter/analysis.hpp>
#include <relmeter/random.hpp>

#include <algorithm>
#include <utility>
#include <vector>

namespace shadow {

using namespace relmeter;
using K = IndicatorKind;

/// Floating shadow copy of a platform for finite differences.
struct FloatPlatform {
  std::vector<double> prices;
  std::vector<std::vector<double>> c;

  explicit FloatPlatform(const Platform& p) : prices(p.subscriber_count()) {
    c.assign(p.service_count(), std::vector<double>(p.subscriber_count(), 0.0));
    for (std::size_t s = 0; s < p.subscriber_count(); ++s) prices[s] = p.prices()[s].get_d();
    for (const Entry& e : p.matrix().entries()) c[e.service.value][e.subscriber.value] = e.amount.get_d();
  }

  double proportional(std::size_t i) const {
    double all = 0, own = 0, sigma = 0;
    for (std::size_t j = 0; j < c.size(); ++j)
      for (double x : c[j]) {
        all += x;
        if (j == i) own += x;
      }
    for (double x : prices) sigma += x;
    return own / all * sigma;
  }

  double subscriber_proportional(std::size_t i) const {
    double out = 0;
    for (std::size_t s = 0; s < prices.size(); ++s) {
      double col = 0;
      for (const auto& row : c) col += row[s];
      out += c[i][s] / col * prices[s];
    }
    return out;
  }
};

inline double central_difference(const Platform& p, K kind, std::size_t i, std::size_t s) {
  FloatPlatform f(p);
  double scale = 1.0;
  for (const auto& row : f.c)
    for (double x : row) scale = std::max(scale, x);
  const double h = 1e-6 * scale;
  auto eval = [&](double delta) {
    FloatPlatform g = f;
    g.c[i][s] += delta;
    return kind == K::Proportional ? g.proportional(i) : g.subscriber_proportional(i);
  };
  return (eval(h) - eval(-h)) / (2 * h);
}

/// Random platform and service; half of the time row i is pushed above
/// the sum of the other rows in every column so the lemma hypotheses hold.
inline std::pair<Platform, ServiceId> biased_instance(Rng& rng) {
  const std::size_t n = 2 + rng() % 5, m = 1 + rng() % 6;
  auto rows = random_dense(rng, n, m);
  const std::size_t i = rng() % n;
  const int mode = static_cast<int>(rng() % 4);
  if (mode < 2) {
    for (std::size_t s = 0; s < m; ++s) {
      Rational others = 0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) others += rows[j][s];
      rows[i][s] = random_positive(rng) + (mode == 0 ? others : others / static_cast<long>(n - 1));
    }
  } else if (mode == 2) {
    for (std::size_t s = 0; s < m; ++s)
      if (sgn(rows[i][s]) == 0) rows[i][s] = random_positive(rng);
  }
  return {platform_from_dense(random_prices(rng, m), rows), ServiceId{i}};
}

}  // namespace shadow

#endif  // RELMETER_TESTS_SHADOW_HPP
