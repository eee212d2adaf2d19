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

#ifndef RELMETER_TESTS_FIXTURES_HPP
#define RELMETER_TESTS_FIXTURES_HPP

#include "oracle.hpp"

#include <relmeter/platform.hpp>

#include <string>
#include <vector>

namespace fixtures {

using relmeter::Rational;

inline Rational q(long num, long den = 1) {
  Rational out(num, den);
  out.canonicalize();
  return out;
}

/// Three services, six subscribers; the third service is never watched.
inline oracle::Problem worked_example_dense() {
  return {{q(2), q(4), q(5, 2), q(2), q(1), q(7, 2)},
          {{q(0), q(5), q(0), q(1), q(2), q(3)},
           {q(1), q(1), q(2), q(3), q(6), q(0)},
           {q(0), q(0), q(0), q(0), q(0), q(0)}}};
}

inline relmeter::Platform to_platform(const oracle::Problem& pr, relmeter::Labels labels = {}) {
  return relmeter::platform_from_dense(pr.prices, pr.c, std::move(labels));
}

inline relmeter::Platform worked_example() { return to_platform(worked_example_dense()); }

/// Two subscribers: [[M, 0], [1, 1], [0, 0]].
inline relmeter::Platform toy(const Rational& m, const Rational& p1, const Rational& p2) {
  return relmeter::platform_from_dense({p1, p2}, {{m, q(0)}, {q(1), q(1)}, {q(0), q(0)}});
}

inline relmeter::Platform single_column(std::vector<Rational> column, Rational price = q(1)) {
  std::vector<std::vector<Rational>> rows;
  for (auto& v : column) rows.push_back({v});
  return relmeter::platform_from_dense({price}, rows);
}

}  // namespace fixtures

#endif  // RELMETER_TESTS_FIXTURES_HPP
