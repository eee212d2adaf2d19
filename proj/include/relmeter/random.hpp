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

#ifndef RELMETER_RANDOM_HPP
#define RELMETER_RANDOM_HPP

#include <relmeter/platform.hpp>

#include <cstdint>
#include <random>
#include <vector>

namespace relmeter {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; derives independent stream seeds from one seed.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) noexcept {
  return mix_seed(mix_seed(mix_seed(base) ^ a) ^ b);
}

struct RandomPlatformOptions {
  std::size_t min_services = 3;
  std::size_t max_services = 6;
  std::size_t min_subscribers = 1;
  std::size_t max_subscribers = 6;
  double density = 0.5;
  long max_numerator = 12;
  long max_denominator = 4;
};

/// k/d with k in [1, max_numerator] and d in [1, max_denominator].
inline Rational random_positive(Rng& rng, long max_numerator = 12, long max_denominator = 4) {
  std::uniform_int_distribution<long> num(1, max_numerator), den(1, max_denominator);
  Rational out(num(rng), den(rng));
  out.canonicalize();
  return out;
}

/// Dense rows C[i][s] with every column nonzero. Columns that come out empty
/// are redrawn.
inline std::vector<std::vector<Rational>> random_dense(Rng& rng, std::size_t services, std::size_t subscribers,
                                                       const RandomPlatformOptions& opt = {}) {
  std::vector<std::vector<Rational>> rows(services, std::vector<Rational>(subscribers, Rational(0)));
  std::bernoulli_distribution present(opt.density);
  for (std::size_t s = 0; s < subscribers; ++s) {
    bool any = false;
    while (!any) {
      for (std::size_t i = 0; i < services; ++i) {
        if (present(rng)) {
          rows[i][s] = random_positive(rng, opt.max_numerator, opt.max_denominator);
          any = true;
        } else {
          rows[i][s] = 0;
        }
      }
    }
  }
  return rows;
}

inline std::vector<Price> random_prices(Rng& rng, std::size_t subscribers, const RandomPlatformOptions& opt = {}) {
  std::vector<Price> prices;
  prices.reserve(subscribers);
  for (std::size_t s = 0; s < subscribers; ++s) prices.push_back(random_positive(rng, opt.max_numerator, opt.max_denominator));
  return prices;
}

/// Sizes uniform in the option ranges, sparse entries and prices drawn as
/// small positive rationals.
inline Platform random_platform(Rng& rng, const RandomPlatformOptions& opt = {}) {
  std::uniform_int_distribution<std::size_t> n(opt.min_services, opt.max_services);
  std::uniform_int_distribution<std::size_t> s(opt.min_subscribers, opt.max_subscribers);
  const std::size_t services = n(rng);
  const std::size_t subscribers = s(rng);
  auto rows = random_dense(rng, services, subscribers, opt);
  return platform_from_dense(random_prices(rng, subscribers, opt), rows);
}

inline Platform random_platform(Rng& rng, std::size_t max_services, std::size_t max_subscribers) {
  RandomPlatformOptions opt;
  opt.max_services = max_services;
  opt.min_services = std::min<std::size_t>(3, max_services);
  opt.max_subscribers = max_subscribers;
  return random_platform(rng, opt);
}

}  // namespace relmeter

#endif  // RELMETER_RANDOM_HPP
