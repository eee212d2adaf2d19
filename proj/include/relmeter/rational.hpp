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

#ifndef RELMETER_RATIONAL_HPP
#define RELMETER_RATIONAL_HPP

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace relmeter {

/// Exact value type for every quantity, price and relevance in the core.
using Rational = mpq_class;

inline double to_double(const Rational& q) { return q.get_d(); }

/// Canonical "num/den" form ("7", "55/8").
inline std::string to_string(const Rational& q) { return q.get_str(); }

/// Parses a plain decimal such as "12", "2.50", ".5" or "-1.25" exactly.
/// Exponents, thousands separators and surrounding blanks are rejected.
inline std::optional<Rational> parse_decimal(std::string_view text) {
  bool negative = false;
  if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  std::size_t int_digits = 0;
  std::size_t frac_digits = 0;
  bool seen_point = false;
  for (char c : text) {
    if (c == '.') {
      if (seen_point) return std::nullopt;
      seen_point = true;
    } else if (c >= '0' && c <= '9') {
      (seen_point ? frac_digits : int_digits)++;
    } else {
      return std::nullopt;
    }
  }
  if (int_digits + frac_digits == 0) return std::nullopt;

  Rational out;
  if (int_digits + frac_digits <= 18) {
    std::uint64_t num = 0;
    std::uint64_t den = 1;
    for (char c : text) {
      if (c == '.') continue;
      num = num * 10 + static_cast<std::uint64_t>(c - '0');
    }
    for (std::size_t k = 0; k < frac_digits; ++k) den *= 10;
    out.get_num() = static_cast<unsigned long>(num);
    out.get_den() = static_cast<unsigned long>(den);
  } else {
    std::string digits;
    digits.reserve(text.size());
    for (char c : text)
      if (c != '.') digits.push_back(c);
    out.get_num().set_str(digits, 10);
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, frac_digits);
    out.get_den() = den;
  }
  out.canonicalize();
  if (negative) out = -out;
  return out;
}

/// Accepts either "a/b" (integers, b != 0) or a plain decimal.
inline std::optional<Rational> parse_rational(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return parse_decimal(text);
  const auto num = parse_decimal(text.substr(0, slash));
  const auto den = parse_decimal(text.substr(slash + 1));
  if (!num || !den || *den == 0) return std::nullopt;
  if (num->get_den() != 1 || den->get_den() != 1) return std::nullopt;
  return Rational(*num / *den);
}

/// Pairwise reduction keeps operand sizes balanced when many terms with
/// unrelated denominators are summed.
inline Rational balanced_sum(std::vector<Rational> terms) {
  if (terms.empty()) return Rational(0);
  while (terms.size() > 1) {
    std::size_t out = 0;
    for (std::size_t k = 0; k + 1 < terms.size(); k += 2) terms[out++] = terms[k] + terms[k + 1];
    if (terms.size() % 2 == 1) terms[out++] = std::move(terms.back());
    terms.resize(out);
  }
  return std::move(terms.front());
}

/// Exact accumulator for long sums. Terms sharing a denominator are added as
/// integers; the distinct denominators are combined once in `total()`.
class RationalSum {
 public:
  void add(const Rational& q) {
    if (sgn(q) == 0) return;
    const mpz_class& den = q.get_den();
    if (den.fits_ulong_p()) {
      small_[den.get_ui()] += q.get_num();
    } else {
      large_.push_back(q);
    }
  }

  RationalSum& operator+=(const Rational& q) {
    add(q);
    return *this;
  }

  Rational total() const {
    std::vector<std::pair<unsigned long, const mpz_class*>> keyed;
    keyed.reserve(small_.size());
    for (const auto& [den, num] : small_) keyed.emplace_back(den, &num);
    std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

    std::vector<Rational> terms;
    terms.reserve(keyed.size() + large_.size());
    for (const auto& [den, num] : keyed) {
      Rational term;
      term.get_num() = *num;
      term.get_den() = den;
      term.canonicalize();
      terms.push_back(std::move(term));
    }
    terms.insert(terms.end(), large_.begin(), large_.end());
    return balanced_sum(std::move(terms));
  }

 private:
  std::unordered_map<unsigned long, mpz_class> small_;
  std::vector<Rational> large_;
};

}  // namespace relmeter

#endif  // RELMETER_RATIONAL_HPP
