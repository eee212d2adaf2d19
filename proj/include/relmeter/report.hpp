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


#ifndef RELMETER_REPORT_HPP
#define RELMETER_REPORT_HPP

// Fixed-point display of exact results: rounding, largest-remainder
// apportionment, and table/CSV/JSON rendering of relevance, payout and
// axiom-grid reports.

#include <relmeter/axioms.hpp>
#include <relmeter/error.hpp>
#include <relmeter/indicators.hpp>
#include <relmeter/ingest.hpp>
#include <relmeter/platform.hpp>

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

namespace relmeter {

enum class Format { Table, Csv, Json };

inline std::optional<Format> parse_format(std::string_view text) {
  if (text == "table") return Format::Table;
  if (text == "csv") return Format::Csv;
  if (text == "json") return Format::Json;
  return std::nullopt;
}

inline mpz_class pow10(int decimals) {
  mpz_class p;
  mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(decimals));
  return p;
}

/// x · 10^decimals rounded half away from zero.
inline mpz_class round_units(const Rational& x, int decimals) {
  const Rational scaled = x * Rational(pow10(decimals));
  mpz_class twice = 2 * abs(scaled.get_num()) + scaled.get_den();
  mpz_class out;
  mpz_fdiv_q(out.get_mpz_t(), twice.get_mpz_t(), mpz_class(2 * scaled.get_den()).get_mpz_t());
  return sgn(scaled) < 0 ? mpz_class(-out) : out;
}

/// Renders an integer count of 10^-decimals units, e.g. (526, 2) → "5.26".
inline std::string format_units(const mpz_class& units, int decimals) {
  std::string digits = mpz_class(abs(units)).get_str();
  if (decimals > 0) {
    const auto d = static_cast<std::size_t>(decimals);
    if (digits.size() <= d) digits.insert(0, d - digits.size() + 1, '0');
    digits.insert(digits.size() - d, ".");
  }
  return (sgn(units) < 0 ? "-" : "") + digits;
}

inline std::string format_fixed(const Rational& x, int decimals) { return format_units(round_units(x, decimals), decimals); }

enum class TieRule {
  /// Extra units go by descending remainder, index breaking ties. The result
  /// always hits the target.
  Strict,
  /// A run of equal remainders is bumped together or not at all. A run that
  /// does not fit goes to the side nearer the target and ends the pass, so
  /// equal inputs always print equal at the cost of missing the target by at
  /// most half that run.
  PreserveTies,
};

/// Largest-remainder apportionment of `shares` (already in display units,
/// nonnegative) to integers summing to round(Σ shares).
inline std::vector<mpz_class> apportion(const std::vector<Rational>& shares, TieRule rule) {
  const std::size_t n = shares.size();
  std::vector<mpz_class> floor_units(n);
  std::vector<Rational> remainder(n);
  Rational total = 0;
  mpz_class assigned = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (sgn(shares[i]) < 0) throw Error(ErrorCode::InvalidConfig, "apportion needs nonnegative shares", i);
    mpz_fdiv_q(floor_units[i].get_mpz_t(), shares[i].get_num_mpz_t(), shares[i].get_den_mpz_t());
    remainder[i] = shares[i] - Rational(floor_units[i]);
    total += shares[i];
    assigned += floor_units[i];
  }
  mpz_class left = round_units(total, 0) - assigned;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t k = 0; k < n && sgn(left) > 0;) {
    std::size_t end = k + 1;
    if (rule == TieRule::PreserveTies)
      while (end < n && remainder[order[end]] == remainder[order[k]]) ++end;
    if (sgn(remainder[order[k]]) == 0) break;
    const mpz_class size = static_cast<unsigned long>(end - k);
    if (size > left) {
      // A tie run straddles the cut: round it to whichever side lands nearer
      // the target, then stop so no smaller remainder is rounded up.
      const mpz_class over = size - left;
      if (over < left || (over == left && remainder[order[k]] >= Rational(1, 2)))
        for (std::size_t j = k; j < end; ++j) ++floor_units[order[j]];
      break;
    }
    for (std::size_t j = k; j < end; ++j) ++floor_units[order[j]];
    left -= size;
    k = end;
  }
  return floor_units;
}

/// Percent units (10^-decimals of a percent) of values / total.
inline std::vector<mpz_class> percent_units(const std::vector<Rational>& values, const Rational& total, int decimals = 2) {
  std::vector<Rational> shares;
  shares.reserve(values.size());
  const Rational factor = sgn(total) == 0 ? Rational(0) : Rational(100 * pow10(decimals)) / total;
  for (const Rational& v : values) shares.push_back(v * factor);
  return apportion(shares, TieRule::PreserveTies);
}

/// Payout units that add up to the pool rounded to `decimals`.
inline std::vector<mpz_class> payout_units(const std::vector<Rational>& payouts, int decimals = 2) {
  std::vector<Rational> shares;
  shares.reserve(payouts.size());
  const Rational factor(pow10(decimals));
  for (const Rational& v : payouts) shares.push_back(v * factor);
  return apportion(shares, TieRule::Strict);
}

struct ReportOptions {
  Format format = Format::Table;
  int decimals = 2;
  bool exact = false;  // JSON only: values and percents as exact "num/den" strings
};

namespace detail {

inline std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

/// Column-aligned plain text; the first column is left-aligned.
inline std::string render_grid(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& row : rows)
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (width.size() <= c) width.push_back(0);
      width[c] = std::max(width[c], row[c].size());
    }
  std::ostringstream out;
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) line += "  ";
      const std::string pad(width[c] - row[c].size(), ' ');
      line += c == 0 ? row[c] + pad : pad + row[c];
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out << line << '\n';
  }
  return out.str();
}

inline std::string render_csv(const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream out;
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << row[c];
    out << '\n';
  }
  return out.str();
}

inline nlohmann::json number_or_exact(const Rational& x, const mpz_class& units, int decimals, bool exact) {
  if (exact) return x.get_str();
  return std::stod(format_units(units, decimals));
}

}  // namespace detail

/// Relevance report: one Value and % column pair per vector, optionally
/// preceded by viewer and exclusive-viewer counts with their shares.
inline std::string render_report(const Platform& p, std::span<const RelevanceVector> vectors,
                                 const std::optional<ViewerStats>& stats, const ReportOptions& opt = {}) {
  const std::size_t n = p.service_count();
  for (const auto& v : vectors)
    if (v.size() != n) throw Error(ErrorCode::InvalidConfig, "relevance vector length does not match the platform");
  const int d = opt.decimals;

  std::vector<std::vector<mpz_class>> value_units, pct_units;
  for (const auto& v : vectors) {
    std::vector<mpz_class> units;
    for (const Rational& x : v.values) units.push_back(round_units(x, d));
    value_units.push_back(std::move(units));
    pct_units.push_back(percent_units(v.values, p.success(), d));
  }
  std::vector<mpz_class> viewer_pct, exclusive_pct;
  if (stats) {
    std::vector<Rational> viewers, exclusive;
    for (const auto& s : stats->per_service) {
      viewers.push_back(s.viewer_share);
      exclusive.push_back(s.exclusive_share);
    }
    viewer_pct = percent_units(viewers, stats->total_viewers ? Rational(1) : Rational(0), d);
    exclusive_pct = percent_units(exclusive, stats->total_exclusive ? Rational(1) : Rational(0), d);
  }

  if (opt.format == Format::Json) {
    nlohmann::json doc;
    doc["services"] = n;
    doc["subscribers"] = p.subscriber_count();
    doc["success"] = opt.exact ? nlohmann::json(p.success().get_str()) : nlohmann::json(p.success().get_d());
    doc["indicators"] = nlohmann::json::array();
    for (std::size_t k = 0; k < vectors.size(); ++k) {
      nlohmann::json rows = nlohmann::json::array();
      for (std::size_t i = 0; i < n; ++i) {
        const Rational pct = sgn(p.success()) ? vectors[k][i] * 100 / p.success() : Rational(0);
        rows.push_back({{"service", p.service_name(ServiceId{i})},
                        {"value", detail::number_or_exact(vectors[k][i], value_units[k][i], d, opt.exact)},
                        {"percent", detail::number_or_exact(pct, pct_units[k][i], d, opt.exact)}});
      }
      doc["indicators"].push_back({{"indicator", short_name(vectors[k].kind)}, {"rows", std::move(rows)}});
    }
    if (stats) {
      nlohmann::json rows = nlohmann::json::array();
      for (std::size_t i = 0; i < n; ++i) {
        const auto& s = stats->per_service[i];
        rows.push_back({{"service", p.service_name(ServiceId{i})},
                        {"viewers", s.viewers},
                        {"viewerPercent", detail::number_or_exact(s.viewer_share * 100, viewer_pct[i], d, opt.exact)},
                        {"exclusiveViewers", s.exclusive_viewers},
                        {"exclusivePercent",
                         detail::number_or_exact(s.exclusive_share * 100, exclusive_pct[i], d, opt.exact)}});
      }
      doc["stats"] = std::move(rows);
    }
    return doc.dump(2) + "\n";
  }

  const bool csv = opt.format == Format::Csv;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{csv ? "service" : "Service"};
  if (stats) {
    static constexpr std::array<const char*, 4> kCsv{"viewers", "viewers_pct", "exclusive", "exclusive_pct"};
    static constexpr std::array<const char*, 4> kTable{"Viewers", "%", "Exclusive", "%"};
    for (const char* h : csv ? kCsv : kTable) header.emplace_back(h);
  }
  for (const auto& v : vectors) {
    const std::string name(short_name(v.kind));
    header.push_back(csv ? name + "_value" : detail::upper(name) + " Value");
    header.push_back(csv ? name + "_pct" : "%");
  }
  rows.push_back(std::move(header));

  std::vector<mpz_class> pct_totals(vectors.size()), view_total_pct(2);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::string> row{p.service_name(ServiceId{i})};
    if (stats) {
      const auto& s = stats->per_service[i];
      row.push_back(std::to_string(s.viewers));
      row.push_back(format_units(viewer_pct[i], d));
      row.push_back(std::to_string(s.exclusive_viewers));
      row.push_back(format_units(exclusive_pct[i], d));
      view_total_pct[0] += viewer_pct[i];
      view_total_pct[1] += exclusive_pct[i];
    }
    for (std::size_t k = 0; k < vectors.size(); ++k) {
      row.push_back(format_units(value_units[k][i], d));
      row.push_back(format_units(pct_units[k][i], d));
      pct_totals[k] += pct_units[k][i];
    }
    rows.push_back(std::move(row));
  }
  if (csv) return detail::render_csv(rows);

  std::vector<std::string> total{"Total"};
  if (stats) {
    total.push_back(std::to_string(stats->total_viewers));
    total.push_back(format_units(view_total_pct[0], d));
    total.push_back(std::to_string(stats->total_exclusive));
    total.push_back(format_units(view_total_pct[1], d));
  }
  for (std::size_t k = 0; k < vectors.size(); ++k) {
    total.push_back(format_fixed(vectors[k].total(), d));
    total.push_back(format_units(pct_totals[k], d));
  }
  rows.push_back(std::move(total));
  return detail::render_grid(rows);
}

inline std::string render_report(const Platform& p, const RelevanceVector& v, const std::optional<ViewerStats>& stats,
                                 const ReportOptions& opt = {}) {
  return render_report(p, std::span<const RelevanceVector>(&v, 1), stats, opt);
}

/// Payout table; rounded payouts always add up to the rounded pool.
inline std::string render_payouts(const Platform& p, IndicatorKind kind, const Rational& pool,
                                  const std::vector<Rational>& payouts, const ReportOptions& opt = {}) {
  const int d = opt.decimals;
  const auto units = payout_units(payouts, d);
  const auto pct = percent_units(payouts, pool, d);
  if (opt.format == Format::Json) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < payouts.size(); ++i)
      rows.push_back({{"service", p.service_name(ServiceId{i})},
                      {"value", detail::number_or_exact(payouts[i], units[i], d, opt.exact)},
                      {"percent", detail::number_or_exact(payouts[i] * 100 / pool, pct[i], d, opt.exact)}});
    nlohmann::json doc{{"indicator", short_name(kind)},
                       {"pool", opt.exact ? nlohmann::json(pool.get_str()) : nlohmann::json(std::stod(format_fixed(pool, d)))},
                       {"rows", std::move(rows)}};
    return doc.dump(2) + "\n";
  }
  const bool csv = opt.format == Format::Csv;
  std::vector<std::vector<std::string>> rows{csv ? std::vector<std::string>{"service", "payout", "pct"}
                                                 : std::vector<std::string>{"Service", "Payout", "%"}};
  mpz_class sum = 0, pct_sum = 0;
  for (std::size_t i = 0; i < payouts.size(); ++i) {
    rows.push_back({p.service_name(ServiceId{i}), format_units(units[i], d), format_units(pct[i], d)});
    sum += units[i];
    pct_sum += pct[i];
  }
  if (csv) return detail::render_csv(rows);
  rows.push_back({"Total", format_units(sum, d), format_units(pct_sum, d)});
  return detail::render_grid(rows);
}

// ---- axiom grid -------------------------------------------------------------

namespace detail {

inline nlohmann::json witness_json(const Witness& w) {
  auto strings = [](const std::vector<Rational>& xs) {
    std::vector<std::string> out;
    for (const auto& x : xs) out.push_back(x.get_str());
    return out;
  };
  nlohmann::json j{{"source", w.source},
                   {"platform", dense_text(w.platform)},
                   {"transformation", describe(w.transformation)},
                   {"before", strings(w.before)},
                   {"after", strings(w.after)}};
  if (w.seed) j["seed"] = *w.seed;
  return j;
}

}  // namespace detail

inline std::string render_table1(const Table1& grid, Format format) {
  if (format == Format::Json) {
    nlohmann::json rows = nlohmann::json::array();
    for (AxiomId a : kAxiomRows) {
      nlohmann::json cells = nlohmann::json::object();
      for (IndicatorKind k : kBuiltinIndicators) {
        const AxiomVerdict& v = grid.at(a, k);
        nlohmann::json cell{{"holds", v.holds},
                            {"expected", expected_holds(a, k)},
                            {"trials", v.trials_run},
                            {"justification", v.justification}};
        if (v.witness) cell["witness"] = detail::witness_json(*v.witness);
        cells[std::string(short_name(k))] = std::move(cell);
      }
      rows.push_back({{"axiom", to_string(a)}, {"cells", std::move(cells)}});
    }
    return nlohmann::json{{"matches", grid.matches_expected()}, {"rows", std::move(rows)}}.dump(2) + "\n";
  }
  const bool csv = format == Format::Csv;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{csv ? "axiom" : "Axiom"};
  for (IndicatorKind k : kBuiltinIndicators) header.push_back(csv ? std::string(short_name(k)) : detail::upper(short_name(k)));
  rows.push_back(std::move(header));
  for (AxiomId a : kAxiomRows) {
    std::vector<std::string> row{csv ? std::string(to_string(a)) : std::string(display_name(a))};
    for (IndicatorKind k : kBuiltinIndicators) {
      std::string cell = grid.at(a, k).holds ? "Y" : "N";
      if (!csv && grid.at(a, k).holds != expected_holds(a, k)) cell += "!";
      row.push_back(std::move(cell));
    }
    rows.push_back(std::move(row));
  }
  if (csv) return detail::render_csv(rows);
  std::string out = detail::render_grid(rows);
  out += grid.matches_expected() ? "grid matches the expected pattern\n"
                                 : std::to_string(grid.mismatches().size()) + " cell(s) differ from the expected pattern (!)\n";
  return out;
}

inline std::string render_theorems(const std::vector<TheoremReport>& reports, Format format) {
  auto axiom_list = [](const std::vector<AxiomId>& xs) {
    std::string out;
    for (AxiomId a : xs) out += (out.empty() ? "" : "+") + std::string(to_string(a));
    return out;
  };
  if (format == Format::Json) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : reports) {
      nlohmann::json rows = nlohmann::json::array();
      for (const auto& row : r.rows) {
        std::vector<std::string> failed;
        for (AxiomId a : row.failed) failed.emplace_back(to_string(a));
        rows.push_back({{"indicator", short_name(row.indicator)}, {"passes", row.passes}, {"failed", failed}});
      }
      std::vector<std::string> axioms;
      for (AxiomId a : r.axioms) axioms.emplace_back(to_string(a));
      out.push_back({{"theorem", to_string(r.theorem)},
                     {"axioms", axioms},
                     {"characterized", short_name(r.characterized)},
                     {"consistent", r.consistent},
                     {"rows", std::move(rows)}});
    }
    return out.dump(2) + "\n";
  }
  const bool csv = format == Format::Csv;
  std::vector<std::vector<std::string>> rows{
      csv ? std::vector<std::string>{"theorem", "axioms", "characterized", "u", "su", "p", "sp", "consistent"}
          : std::vector<std::string>{"Theorem", "Axioms", "Characterizes", "U", "SU", "P", "SP", "Consistent"}};
  for (const auto& r : reports) {
    std::vector<std::string> row{std::string(to_string(r.theorem)), axiom_list(r.axioms),
                                 csv ? std::string(short_name(r.characterized)) : detail::upper(short_name(r.characterized))};
    for (const auto& tr : r.rows) row.push_back(tr.passes ? "pass" : "fails " + axiom_list(tr.failed));
    row.push_back(r.consistent ? "yes" : "no");
    rows.push_back(std::move(row));
  }
  return csv ? detail::render_csv(rows) : detail::render_grid(rows);
}

}  // namespace relmeter

#endif  // RELMETER_REPORT_HPP
