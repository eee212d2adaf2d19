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


#ifndef RELMETER_CLI_HPP
#define RELMETER_CLI_HPP

// The `relmeter` command line. `run` takes argv and three streams and returns
// the process exit code, so tests can drive it in-process.

#include <relmeter/analysis.hpp>
#include <relmeter/axioms.hpp>
#include <relmeter/error.hpp>
#include <relmeter/games.hpp>
#include <relmeter/indicators.hpp>
#include <relmeter/ingest.hpp>
#include <relmeter/platform.hpp>
#include <relmeter/report.hpp>
#include <relmeter/transform.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace relmeter::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kVerification = 3 };

/// Bad flag values; exit 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
/// Unreadable inputs; exit 2.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

using relmeter::detail::Overloaded;

inline std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t at = text.find(sep, start);
    out.emplace_back(text.substr(start, at - start));
    if (at == std::string_view::npos) break;
    start = at + 1;
  }
  return out;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline Rational number(std::string_view text, const std::string& flag) {
  auto q = parse_rational(trim(text));
  if (!q) throw UsageError(flag + ": '" + std::string(text) + "' is not a number");
  return *q;
}

inline Rational positive(std::string_view text, const std::string& flag) {
  Rational q = number(text, flag);
  if (sgn(q) <= 0) throw UsageError(flag + " must be positive");
  return q;
}

/// "1,2,3" (1-based) → zero-based ids.
template <class Id>
std::vector<Id> index_list(const std::string& text, const std::string& flag) {
  std::vector<Id> out;
  for (const std::string& item : split(text, ',')) {
    const std::string_view t = trim(item);
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || v == 0)
      throw UsageError(flag + ": '" + std::string(item) + "' is not a 1-based index");
    out.push_back(Id{v - 1});
  }
  return out;
}

template <class Id>
Id one_index(const std::string& text, const std::string& flag) {
  const auto ids = index_list<Id>(text, flag);
  if (ids.size() != 1) throw UsageError(flag + " takes a single index");
  return ids.front();
}

class InputStream {
 public:
  InputStream(const std::string& path, std::istream& stdin_stream) {
    if (path == "-") {
      stream_ = &stdin_stream;
    } else {
      file_ = std::make_unique<std::ifstream>(path, std::ios::binary);
      if (!*file_) throw DataError("cannot open '" + path + "'");
      stream_ = file_.get();
    }
  }
  std::istream& get() { return *stream_; }

 private:
  std::unique_ptr<std::ifstream> file_;
  std::istream* stream_ = nullptr;
};

struct InputOptions {
  std::string events;
  std::string prices;
  std::string default_price;
  std::string services;
  std::string matrix;
  std::string price_vector;
};

inline void add_input_options(CLI::App* cmd, InputOptions& o) {
  auto* events = cmd->add_option("--events", o.events, "event CSV (viewer_id,service_id,amount); '-' reads stdin");
  cmd->add_option("--prices", o.prices, "price CSV (viewer_id,price)");
  cmd->add_option("--default-price", o.default_price, "price for viewers missing from the price table");
  cmd->add_option("--services", o.services, "comma-separated service catalog, indexed first and kept when unwatched");
  auto* matrix = cmd->add_option("--matrix", o.matrix, "inline matrix, rows by ';' and entries by ',', e.g. \"0;1;5/2\"");
  cmd->add_option("--price-vector", o.price_vector, "inline prices for --matrix, comma-separated (default all 1)");
  events->excludes(matrix);
}

/// Parses "C=[a,b;c,d]" or "a,b;c,d".
inline Platform inline_platform(const InputOptions& o) {
  std::string_view m = trim(o.matrix);
  if (m.starts_with("C=")) m.remove_prefix(2);
  if (m.starts_with("[") && m.ends_with("]")) m = m.substr(1, m.size() - 2);
  std::vector<std::vector<Rational>> rows;
  for (const std::string& row : split(m, ';')) {
    std::vector<Rational> values;
    for (const std::string& cell : split(row, ',')) values.push_back(number(cell, "--matrix"));
    if (!rows.empty() && values.size() != rows.front().size()) throw UsageError("--matrix rows differ in length");
    rows.push_back(std::move(values));
  }
  std::vector<Rational> prices;
  if (o.price_vector.empty()) {
    prices.assign(rows.front().size(), Rational(1));
  } else {
    std::string_view pv = trim(o.price_vector);
    if (pv.starts_with("p=")) pv.remove_prefix(2);
    if (pv.starts_with("(") && pv.ends_with(")")) pv = pv.substr(1, pv.size() - 2);
    for (const std::string& cell : split(pv, ',')) prices.push_back(number(cell, "--price-vector"));
    if (prices.size() != rows.front().size()) throw UsageError("--price-vector needs one price per matrix column");
  }
  return platform_from_dense(std::move(prices), rows);
}

struct Loaded {
  Platform platform;
  std::size_t events = 0;
  std::size_t dropped = 0;
};

inline Loaded load_input(const InputOptions& o, std::istream& in, std::ostream& err) {
  if (!o.matrix.empty()) return {inline_platform(o), 0, 0};
  if (o.events.empty()) throw UsageError("one of --events or --matrix is required");
  std::optional<Price> fallback;
  if (!o.default_price.empty()) fallback = positive(o.default_price, "--default-price");
  PriceTable prices{{}, fallback};
  if (!o.prices.empty()) {
    InputStream ps(o.prices, in);
    prices = read_prices(ps.get(), fallback);
  } else if (!fallback) {
    throw UsageError("--prices or --default-price is required with --events");
  }
  std::vector<std::string> catalog;
  if (!o.services.empty())
    for (const std::string& s : split(o.services, ',')) catalog.emplace_back(trim(s));
  InputStream es(o.events, in);
  LoadResult r = load_events(es.get(), prices, catalog);
  if (r.dropped_viewers) err << "warning: dropped " << r.dropped_viewers << " viewer(s) with zero total consumption\n";
  return {std::move(r.platform), r.events, r.dropped_viewers};
}

struct OutputOptions {
  std::string format = "table";
  bool json = false;
  bool exact = false;
  int decimals = 2;
};

inline void add_output_options(CLI::App* cmd, OutputOptions& o, bool with_exact = true) {
  cmd->add_option("--format", o.format, "table, csv or json")->check(CLI::IsMember({"table", "csv", "json"}));
  cmd->add_flag("--json", o.json, "same as --format json");
  if (with_exact) {
    cmd->add_flag("--exact", o.exact, "JSON values as exact num/den strings (implies --json)");
    cmd->add_option("--decimals", o.decimals, "display decimals")->check(CLI::Range(0, 12));
  }
}

inline ReportOptions report_options(const OutputOptions& o) {
  ReportOptions r;
  r.format = (o.json || o.exact) ? Format::Json : *parse_format(o.format);
  r.exact = o.exact;
  r.decimals = o.decimals;
  return r;
}

inline std::vector<IndicatorKind> indicator_list(const std::string& text, bool allow_all) {
  if (allow_all && text == "all") return {kBuiltinIndicators.begin(), kBuiltinIndicators.end()};
  std::vector<IndicatorKind> out;
  for (const std::string& item : split(text, ',')) {
    auto k = parse_indicator(trim(item));
    if (!k || *k == IndicatorKind::External) throw UsageError("--indicator: unknown indicator '" + item + "'");
    out.push_back(*k);
  }
  if (!allow_all && out.size() != 1) throw UsageError("--indicator takes a single indicator here");
  return out;
}

/// Gives every service a name so rows can be matched across a transformation.
inline Platform with_service_labels(const Platform& p) {
  if (!p.labels().services.empty()) return p;
  Labels labels{{}, p.labels().subscribers};
  for (std::size_t i = 0; i < p.service_count(); ++i) labels.services.push_back(std::to_string(i + 1));
  return build_platform(p.prices(), p.matrix().entries(), p.service_count(), std::move(labels));
}

inline std::string joined(const std::vector<Rational>& xs) {
  std::string out;
  for (const auto& x : xs) out += (out.empty() ? "" : ",") + x.get_str();
  return out;
}

// ---- verbs -------------------------------------------------------------------

inline int ingest_verb(const InputOptions& in_opt, const OutputOptions& out_opt, std::istream& in, std::ostream& out,
                       std::ostream& err) {
  const Loaded l = load_input(in_opt, in, err);
  const Platform& p = l.platform;
  if (out_opt.json || out_opt.format == "json") {
    nlohmann::json j{{"services", p.service_count()},
                     {"subscribers", p.subscriber_count()},
                     {"events", l.events},
                     {"droppedViewers", l.dropped},
                     {"relationships", p.matrix().nonzeros()},
                     {"success", p.success().get_str()}};
    out << j.dump(2) << '\n';
    return kOk;
  }
  out << "services       " << p.service_count() << '\n'
      << "subscribers    " << p.subscriber_count() << '\n'
      << "events         " << l.events << '\n'
      << "dropped        " << l.dropped << '\n'
      << "relationships  " << p.matrix().nonzeros() << '\n'
      << "success        " << p.success().get_str() << '\n';
  return kOk;
}

inline int compute_verb(const InputOptions& in_opt, const OutputOptions& out_opt, const std::string& indicator,
                        bool with_stats, std::istream& in, std::ostream& out, std::ostream& err) {
  const auto kinds = indicator_list(indicator, true);
  const Platform p = load_input(in_opt, in, err).platform;
  std::vector<RelevanceVector> vectors(kinds.size());
  parallel_for(kinds.size(), [&](std::size_t k) { vectors[k] = evaluate(kinds[k], p); });
  std::optional<ViewerStats> stats;
  if (with_stats) stats = viewer_stats(p);
  out << render_report(p, vectors, stats, report_options(out_opt));
  return kOk;
}

inline int allocate_verb(const InputOptions& in_opt, const OutputOptions& out_opt, const std::string& indicator,
                         const std::string& pool_text, std::istream& in, std::ostream& out, std::ostream& err) {
  const IndicatorKind kind = indicator_list(indicator, false).front();
  const Rational pool = positive(pool_text, "--pool");
  const Platform p = load_input(in_opt, in, err).platform;
  out << render_payouts(p, kind, pool, allocate_revenue(p, kind, pool), report_options(out_opt));
  return kOk;
}

inline int stats_verb(const InputOptions& in_opt, const OutputOptions& out_opt, std::istream& in, std::ostream& out,
                      std::ostream& err) {
  const Platform p = load_input(in_opt, in, err).platform;
  out << render_report(p, std::span<const RelevanceVector>{}, viewer_stats(p), report_options(out_opt));
  return kOk;
}

struct AxiomOptions {
  std::size_t trials = 200;
  std::uint64_t seed = 42;
  std::size_t max_services = 6;
  std::size_t max_subscribers = 6;
};

inline CheckConfig check_config(const AxiomOptions& o) {
  CheckConfig cfg;
  cfg.trials = o.trials;
  cfg.rng_seed = o.seed;
  cfg.max_services = o.max_services;
  cfg.max_subscribers = o.max_subscribers;
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

inline int table1_verb(const AxiomOptions& a, const OutputOptions& o, std::ostream& out) {
  const Table1 grid = table1_matrix(check_config(a));
  out << render_table1(grid, report_options(o).format);
  return grid.matches_expected() ? kOk : kVerification;
}

inline int theorems_verb(const AxiomOptions& a, const OutputOptions& o, std::ostream& out) {
  const CheckConfig cfg = check_config(a);
  const Table1 grid = table1_matrix(cfg);
  std::vector<TheoremReport> reports;
  bool ok = true;
  for (Theorem t : kTheorems) {
    reports.push_back(theorem_consistency(t, cfg, &grid));
    ok = ok && reports.back().consistent;
  }
  out << render_theorems(reports, report_options(o).format);
  return ok ? kOk : kVerification;
}

inline int shapley_verb(const InputOptions& in_opt, const OutputOptions& o, std::size_t limit, std::istream& in,
                        std::ostream& out, std::ostream& err) {
  const Platform p = load_input(in_opt, in, err).platform;
  const CoincidenceReport report = verify_coincidence(p, limit);
  const Format f = report_options(o).format;
  if (f == Format::Json) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : report.rows) {
      std::vector<std::string> sh, iv;
      for (const auto& x : r.shapley) sh.push_back(x.get_str());
      for (const auto& x : r.indicator_values) iv.push_back(x.get_str());
      rows.push_back({{"game", to_string(r.game)},
                      {"indicator", short_name(r.indicator)},
                      {"equal", r.equal},
                      {"shapley", sh},
                      {"indicatorValues", iv}});
    }
    out << nlohmann::json{{"allEqual", report.all_equal}, {"rows", rows}}.dump(2) << '\n';
  } else {
    const bool csv = f == Format::Csv;
    std::vector<std::vector<std::string>> rows{
        csv ? std::vector<std::string>{"game", "indicator", "equal", "shapley", "indicator_values"}
            : std::vector<std::string>{"Game", "Indicator", "Equal", "Shapley", "Indicator values"}};
    for (const auto& r : report.rows) {
      std::string sh = joined(r.shapley), iv = joined(r.indicator_values);
      if (csv) sh = '"' + sh + '"', iv = '"' + iv + '"';
      rows.push_back({std::string(to_string(r.game)), std::string(short_name(r.indicator)), r.equal ? "yes" : "no",
                      std::move(sh), std::move(iv)});
    }
    out << (csv ? relmeter::detail::render_csv(rows) : relmeter::detail::render_grid(rows));
  }
  return report.all_equal ? kOk : kVerification;
}

struct WhatIfOptions {
  std::string indicator = "all";
  std::string group;
  std::string survivor;
  std::string service;
  std::string fractions;
  std::string factor;
};

/// Before/after comparison keyed by service name.
inline void whatif_report(const Platform& before, const Platform& after, const std::string& descriptor,
                          const std::vector<IndicatorKind>& kinds, const std::function<std::string(
                              const std::map<std::string, Rational>&, const std::map<std::string, Rational>&)>& summary,
                          Format format, std::ostream& out) {
  auto keyed = [](const Platform& p, IndicatorKind k) {
    std::map<std::string, Rational> m;
    const auto r = evaluate(k, p);
    for (std::size_t i = 0; i < p.service_count(); ++i) m[p.service_name(ServiceId{i})] = r[i];
    return m;
  };
  std::vector<std::string> names;
  for (std::size_t i = 0; i < before.service_count(); ++i) names.push_back(before.service_name(ServiceId{i}));
  for (std::size_t i = 0; i < after.service_count(); ++i) {
    const std::string n = after.service_name(ServiceId{i});
    if (std::find(names.begin(), names.end(), n) == names.end()) names.push_back(n);
  }

  nlohmann::json doc{{"transformation", descriptor}, {"indicators", nlohmann::json::array()}};
  std::ostringstream text;
  text << "transformation: " << descriptor << '\n';
  for (IndicatorKind k : kinds) {
    const auto b = keyed(before, k), a = keyed(after, k);
    std::vector<std::vector<std::string>> rows{{"Service", "Before", "After", "Delta"}};
    nlohmann::json jrows = nlohmann::json::array();
    for (const std::string& n : names) {
      const auto bi = b.find(n), ai = a.find(n);
      const bool both = bi != b.end() && ai != a.end();
      rows.push_back({n, bi != b.end() ? bi->second.get_str() : "-", ai != a.end() ? ai->second.get_str() : "-",
                      both ? Rational(ai->second - bi->second).get_str() : "-"});
      jrows.push_back({{"service", n},
                       {"before", bi != b.end() ? nlohmann::json(bi->second.get_str()) : nlohmann::json()},
                       {"after", ai != a.end() ? nlohmann::json(ai->second.get_str()) : nlohmann::json()},
                       {"delta", both ? nlohmann::json(Rational(ai->second - bi->second).get_str()) : nlohmann::json()}});
    }
    const std::string note = summary ? summary(b, a) : std::string();
    text << "\nindicator: " << short_name(k) << '\n' << relmeter::detail::render_grid(rows);
    if (!note.empty()) text << note << '\n';
    nlohmann::json entry{{"indicator", short_name(k)}, {"rows", std::move(jrows)}};
    if (!note.empty()) entry["summary"] = note;
    doc["indicators"].push_back(std::move(entry));
  }
  out << (format == Format::Json ? doc.dump(2) + "\n" : text.str());
}

inline int whatif_verb(const std::string& op, const InputOptions& in_opt, const WhatIfOptions& w, const OutputOptions& o,
                       std::istream& in, std::ostream& out, std::ostream& err) {
  const auto kinds = indicator_list(w.indicator, true);
  const Platform before = with_service_labels(load_input(in_opt, in, err).platform);
  const Format format = report_options(o).format;
  auto name = [&](ServiceId i) {
    if (i.value >= before.service_count()) throw Error(ErrorCode::IndexOutOfBounds, "service index", i.value);
    return before.service_name(i);
  };

  if (op == "merge-services") {
    if (w.group.empty() || w.survivor.empty()) throw UsageError("merge-services needs --group and --survivor");
    const auto group = index_list<ServiceId>(w.group, "--group");
    const auto survivor = one_index<ServiceId>(w.survivor, "--survivor");
    const Platform after = merge_services(before, group, survivor);
    std::vector<std::string> members;
    for (ServiceId i : group) members.push_back(name(i));
    const std::string kept = name(survivor);
    whatif_report(before, after, describe(MergeServiceGroup{group, survivor}), kinds,
                  [&](const auto& b, const auto& a) {
                    Rational sum = 0;
                    for (const auto& m : members) sum += b.at(m);
                    return "group before " + sum.get_str() + ", merged after " + a.at(kept).get_str();
                  },
                  format, out);
  } else if (op == "split-service") {
    if (w.service.empty() || w.fractions.empty()) throw UsageError("split-service needs --service and --fractions");
    const auto target = one_index<ServiceId>(w.service, "--service");
    const std::string target_name = name(target);
    std::vector<Rational> fractions;
    Rational total = 0;
    for (const std::string& f : split(w.fractions, ',')) {
      fractions.push_back(positive(f, "--fractions"));
      total += fractions.back();
    }
    if (fractions.size() < 2) throw UsageError("--fractions needs at least two parts");
    if (total != 1) throw UsageError("--fractions must add up to 1");
    std::vector<SparseRow> parts(fractions.size());
    for (std::size_t k = 0; k < fractions.size(); ++k)
      for (const Cell& c : before.matrix().row(target)) parts[k].push_back({c.index, c.amount * fractions[k]});
    const Platform after = split_service(before, target, parts);
    std::string descriptor = "split-service service=" + std::to_string(target.value + 1) + " fractions=";
    for (std::size_t k = 0; k < fractions.size(); ++k) descriptor += (k ? "," : "") + fractions[k].get_str();
    whatif_report(before, after, descriptor, kinds,
                  [&](const auto& b, const auto& a) {
                    Rational sum = 0;
                    for (const auto& [n, v] : a)
                      if (!b.count(n)) sum += v;
                    return "service before " + b.at(target_name).get_str() + ", parts after " + sum.get_str();
                  },
                  format, out);
  } else if (op == "share-subscription") {
    if (w.group.empty() || w.survivor.empty()) throw UsageError("share-subscription needs --group and --survivor");
    const auto group = index_list<SubscriberId>(w.group, "--group");
    const auto survivor = one_index<SubscriberId>(w.survivor, "--survivor");
    const Platform after = merge_subscribers(before, group, survivor);
    whatif_report(before, after, describe(PoolSubscribers{group, survivor}), kinds, nullptr, format, out);
  } else if (op == "scale") {
    if (w.factor.empty()) throw UsageError("scale needs --factor");
    const Rational factor = positive(w.factor, "--factor");
    whatif_report(before, scale_matrix(before, factor), "scale factor=" + factor.get_str(), kinds, nullptr, format, out);
  }
  return kOk;
}

inline std::string preference_name(const PairComparison& c) {
  if (c.preferred == Preference::Tie) return "tie";
  return std::string(short_name(c.preferred == Preference::First ? c.first : c.second));
}

inline std::string preference_name(Preference p, IndicatorKind a, IndicatorKind b) {
  if (p == Preference::Tie) return "tie";
  return std::string(short_name(p == Preference::First ? a : b));
}

inline int lemmas_verb(const InputOptions& in_opt, const OutputOptions& o, const std::string& service, std::istream& in,
                       std::ostream& out, std::ostream& err) {
  if (service.empty()) throw UsageError("lemmas needs --service (or --toy)");
  const ServiceId i = one_index<ServiceId>(service, "--service");
  const Platform p = load_input(in_opt, in, err).platform;
  if (i.value >= p.service_count()) throw UsageError("--service is out of range");
  const PreferenceReport report = preference_report(p, i);
  const Format f = report_options(o).format;
  if (f == Format::Json) {
    nlohmann::json j = to_json(report, p);
    nlohmann::json lemmas = nlohmann::json::array();
    for (LemmaId l : kAllLemmas)
      lemmas.push_back({{"lemma", to_string(l)},
                        {"hypothesis", lemma_hypothesis(l, p, i)},
                        {"conclusion", lemma_conclusion_holds(l, p, i)}});
    j["lemmas"] = std::move(lemmas);
    out << j.dump(2) << '\n';
    return kOk;
  }
  std::vector<std::vector<std::string>> rows{{"Pair", "First", "Second", "Gap", "Preferred", "Certificates"}};
  for (const auto& c : report.pairs) {
    std::string certs;
    for (LemmaId l : c.certificates) certs += (certs.empty() ? "" : ",") + std::string(to_string(l));
    rows.push_back({relmeter::detail::upper(short_name(c.first)) + "-" + relmeter::detail::upper(short_name(c.second)),
                    c.first_value.get_str(), c.second_value.get_str(), c.gap.get_str(), preference_name(c),
                    certs.empty() ? "-" : certs});
  }
  std::vector<std::vector<std::string>> lemma_rows{{"Lemma", "Hypothesis", "Conclusion"}};
  for (LemmaId l : kAllLemmas)
    lemma_rows.push_back({std::string(to_string(l)), lemma_hypothesis(l, p, i) ? "holds" : "fails",
                          lemma_conclusion_holds(l, p, i) ? "holds" : "fails"});
  if (f == Format::Csv) {
    out << relmeter::detail::render_csv(rows);
    return kOk;
  }
  out << "service: " << p.service_name(i) << '\n'
      << relmeter::detail::render_grid(rows) << '\n'
      << relmeter::detail::render_grid(lemma_rows);
  return kOk;
}

inline int toy_verb(const std::string& m, const std::string& p1, const std::string& p2, const OutputOptions& o,
                    std::ostream& out) {
  ToyScenario scn{positive(m, "--m"), positive(p1, "--p1"), positive(p2, "--p2")};
  const ToyReport report = toy_thresholds(scn);
  const Format f = report_options(o).format;
  if (f == Format::Json) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : report.rows)
      rows.push_back({{"first", short_name(r.first)},
                      {"second", short_name(r.second)},
                      {"streamer", r.streamer},
                      {"firstValue", r.first_value.get_str()},
                      {"secondValue", r.second_value.get_str()},
                      {"observed", preference_name(r.observed, r.first, r.second)},
                      {"predicted", preference_name(r.predicted, r.first, r.second)},
                      {"rule", r.rule},
                      {"agrees", r.agrees}});
    out << nlohmann::json{{"m", scn.m.get_str()}, {"p1", scn.p1.get_str()}, {"p2", scn.p2.get_str()},
                          {"allAgree", report.all_agree}, {"rows", rows}}
               .dump(2)
        << '\n';
  } else {
    std::vector<std::vector<std::string>> rows{
        {"Pair", "Streamer", "First", "Second", "Observed", "Predicted", "Rule", "Agrees"}};
    for (const auto& r : report.rows)
      rows.push_back({relmeter::detail::upper(short_name(r.first)) + "-" + relmeter::detail::upper(short_name(r.second)),
                      std::to_string(r.streamer), r.first_value.get_str(), r.second_value.get_str(),
                      preference_name(r.observed, r.first, r.second), preference_name(r.predicted, r.first, r.second),
                      r.rule, r.agrees ? "yes" : "no"});
    if (f == Format::Csv) {
      out << relmeter::detail::render_csv(rows);
    } else {
      out << "toy platform C=[M,0;1,1;0,0] with M=" << scn.m.get_str() << " p=(" << scn.p1.get_str() << ","
          << scn.p2.get_str() << ")\n"
          << relmeter::detail::render_grid(rows);
    }
  }
  return report.all_agree ? kOk : kVerification;
}

inline int synth_verb(const std::string& config_path, const std::string& out_path, const std::string& prices_path,
                      std::istream& in, std::ostream& out) {
  InputStream cfg_in(config_path, in);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(cfg_in.get());
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("synth config: ") + e.what());
  }
  const SynthConfig cfg = synth_config_from_json(j);
  const SynthResult r = synthesize(cfg);

  auto write = [&](const std::string& path, const std::function<void(std::ostream&)>& fn) {
    if (path == "-") return fn(out);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot write '" + path + "'");
    fn(f);
    if (!f) throw DataError("write failed for '" + path + "'");
  };
  write(out_path, [&](std::ostream& os) { write_events(os, r.events); });
  if (!prices_path.empty())
    write(prices_path, [&](std::ostream& os) { write_prices(os, r.platform.labels().subscribers, r.platform.prices()); });
  if (out_path != "-" && prices_path != "-") {
    std::string catalog;
    for (const auto& s : r.services) catalog += (catalog.empty() ? "" : ",") + s;
    out << "events         " << r.events.size() << '\n'
        << "subscribers    " << r.platform.subscriber_count() << '\n'
        << "relationships  " << r.platform.matrix().nonzeros() << '\n'
        << "success        " << r.platform.success().get_str() << '\n'
        << "services       " << catalog << '\n';
  }
  return kOk;
}

}  // namespace detail

inline int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
  using namespace detail;
  CLI::App app{"Exact relevance indicators for subscription platforms", "relmeter"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "help for every verb");

  InputOptions input;
  OutputOptions output;
  std::string indicator = "all";
  std::string pool;
  bool with_stats = false;
  AxiomOptions axiom_opt;
  std::size_t shapley_limit = kDefaultShapleyLimit;
  WhatIfOptions whatif;
  std::string lemma_service, toy_m = "1", toy_p1 = "1", toy_p2 = "1";
  bool toy = false;
  std::string synth_config, synth_out, synth_prices;

  auto* ingest = app.add_subcommand("ingest", "load an event log and summarize it");
  add_input_options(ingest, input);
  add_output_options(ingest, output, false);

  auto* compute = app.add_subcommand("compute", "relevance table for one or more indicators");
  add_input_options(compute, input);
  add_output_options(compute, output);
  compute->add_option("--indicator", indicator, "u, su, p, sp, a comma list, or all")->capture_default_str();
  compute->add_flag("--stats", with_stats, "prepend viewer and exclusive-viewer columns");

  auto* allocate = app.add_subcommand("allocate", "split a revenue pool by relevance");
  add_input_options(allocate, input);
  add_output_options(allocate, output);
  allocate->add_option("--indicator", indicator, "u, su, p or sp")->required();
  allocate->add_option("--pool", pool, "revenue pool, a positive decimal")->required();

  auto* stats = app.add_subcommand("stats", "viewer and exclusive-viewer counts per service");
  add_input_options(stats, input);
  add_output_options(stats, output);

  auto* axioms = app.add_subcommand("axioms", "randomized axiom checks");
  axioms->require_subcommand(1);
  std::vector<CLI::App*> axiom_cmds{axioms->add_subcommand("table1", "9x4 axiom grid"),
                                    axioms->add_subcommand("theorems", "characterization consistency")};
  for (CLI::App* cmd : axiom_cmds) {
    cmd->add_option("--trials", axiom_opt.trials, "random trials per cell")->capture_default_str();
    cmd->add_option("--seed", axiom_opt.seed, "base seed")->capture_default_str();
    cmd->add_option("--max-services", axiom_opt.max_services, "largest random |N|")->capture_default_str();
    cmd->add_option("--max-subscribers", axiom_opt.max_subscribers, "largest random |S|")->capture_default_str();
    add_output_options(cmd, output, false);
  }

  auto* shapley_cmd = app.add_subcommand("shapley", "cooperative-game checks");
  shapley_cmd->require_subcommand(1);
  auto* verify = shapley_cmd->add_subcommand("verify", "exhaustive Shapley value of each game against its indicator");
  add_input_options(verify, input);
  add_output_options(verify, output, false);
  verify->add_option("--limit", shapley_limit, "largest service count to enumerate")->capture_default_str();

  auto* whatif_cmd = app.add_subcommand("whatif", "apply a transformation and compare indicators");
  whatif_cmd->require_subcommand(1);
  std::vector<CLI::App*> whatif_cmds;
  for (const char* op : {"merge-services", "split-service", "share-subscription", "scale"}) {
    auto* cmd = whatif_cmd->add_subcommand(op);
    add_input_options(cmd, input);
    add_output_options(cmd, output, false);
    cmd->add_option("--indicator", whatif.indicator, "u, su, p, sp, a comma list, or all")->capture_default_str();
    whatif_cmds.push_back(cmd);
  }
  whatif_cmds[0]->description("merge a group of services into a survivor");
  whatif_cmds[0]->add_option("--group", whatif.group, "1-based service indices")->required();
  whatif_cmds[0]->add_option("--survivor", whatif.survivor, "1-based survivor index")->required();
  whatif_cmds[1]->description("split one service into parts proportional to fractions");
  whatif_cmds[1]->add_option("--service", whatif.service, "1-based service index")->required();
  whatif_cmds[1]->add_option("--fractions", whatif.fractions, "positive fractions adding up to 1")->required();
  whatif_cmds[2]->description("pool a group of subscribers into one shared subscription");
  whatif_cmds[2]->add_option("--group", whatif.group, "1-based subscriber indices")->required();
  whatif_cmds[2]->add_option("--survivor", whatif.survivor, "1-based survivor index")->required();
  whatif_cmds[3]->description("multiply all consumption by a factor");
  whatif_cmds[3]->add_option("--factor", whatif.factor, "positive factor")->required();

  auto* lemmas = app.add_subcommand("lemmas", "pairwise indicator preferences for one service");
  add_input_options(lemmas, input);
  add_output_options(lemmas, output, false);
  lemmas->add_option("--service", lemma_service, "1-based service index");
  lemmas->add_flag("--toy", toy, "threshold table of the two-viewer toy platform instead");
  lemmas->add_option("--m", toy_m, "toy parameter M")->capture_default_str();
  lemmas->add_option("--p1", toy_p1, "toy price of subscriber 1")->capture_default_str();
  lemmas->add_option("--p2", toy_p2, "toy price of subscriber 2")->capture_default_str();

  auto* synth = app.add_subcommand("synth", "write a synthetic event log");
  synth->add_option("--config", synth_config, "JSON config")->required();
  synth->add_option("--out", synth_out, "event CSV destination; '-' for stdout")->required();
  synth->add_option("--prices-out", synth_prices, "price CSV destination");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (ingest->parsed()) return ingest_verb(input, output, in, out, err);
    if (compute->parsed()) return compute_verb(input, output, indicator, with_stats, in, out, err);
    if (allocate->parsed()) return allocate_verb(input, output, indicator, pool, in, out, err);
    if (stats->parsed()) return stats_verb(input, output, in, out, err);
    if (axiom_cmds[0]->parsed()) return table1_verb(axiom_opt, output, out);
    if (axiom_cmds[1]->parsed()) return theorems_verb(axiom_opt, output, out);
    if (verify->parsed()) return shapley_verb(input, output, shapley_limit, in, out, err);
    for (CLI::App* cmd : whatif_cmds)
      if (cmd->parsed()) return whatif_verb(cmd->get_name(), input, whatif, output, in, out, err);
    if (lemmas->parsed()) {
      if (toy) return toy_verb(toy_m, toy_p1, toy_p2, output, out);
      return lemmas_verb(input, output, lemma_service, in, out, err);
    }
    if (synth->parsed()) return synth_verb(synth_config, synth_out, synth_prices, in, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kData;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kData;
  }
  return kUsage;
}

inline int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"relmeter"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), in, out, err);
}

}  // namespace relmeter::cli

#endif  // RELMETER_CLI_HPP
