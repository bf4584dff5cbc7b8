#pragma once

// ROUGE-N, L, W, S and SU over contiguous lowercase token streams, with
// multi-reference aggregation and percentile bootstrap intervals.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <json.hpp>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "topicsum/error.hpp"
#include "topicsum/porter.hpp"

namespace topicsum {

using EvalTokenSequence = std::vector<std::string>;

struct EvalOptions {
  bool stem = true;
  std::size_t stem_min_length = 4;  // shorter tokens are left as they are
};

/// Lowercases ASCII and splits on every non-alphanumeric byte.
inline EvalTokenSequence eval_tokenize(std::string_view text, const EvalOptions& options = {}) {
  EvalTokenSequence out;
  std::string cur;
  static const PorterStemmer stemmer;
  auto flush = [&] {
    if (cur.empty()) return;
    if (options.stem && cur.size() >= options.stem_min_length) cur = stemmer(cur);
    out.push_back(std::move(cur));
    cur.clear();
  };
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (c < 0x80 && std::isalnum(c)) cur.push_back(static_cast<char>(std::tolower(c)));
    else flush();
  }
  flush();
  return out;
}

enum class RougeKind { n, l, w, s, su };

struct RougeVariant {
  RougeKind kind = RougeKind::n;
  std::size_t n = 1;                   // ROUGE-N order
  std::optional<std::size_t> max_skip;  // S / SU; empty means unlimited
  double weight = 1.2;                 // ROUGE-W

  std::string name() const {
    switch (kind) {
      case RougeKind::n: return "ROUGE-" + std::to_string(n);
      case RougeKind::l: return "ROUGE-L";
      case RougeKind::w: {
        char buf[32];
        std::snprintf(buf, sizeof buf, "ROUGE-W-%g", weight);
        return buf;
      }
      case RougeKind::s:
      case RougeKind::su: {
        std::string base = kind == RougeKind::s ? "ROUGE-S" : "ROUGE-SU";
        return base + (max_skip ? std::to_string(*max_skip) : "*");
      }
    }
    return "ROUGE-?";
  }
};

/// Accepts "ROUGE-1".."ROUGE-4", "ROUGE-L", "ROUGE-W-<weight>", "ROUGE-S*",
/// "ROUGE-SU*", "ROUGE-S<skip>", "ROUGE-SU<skip>"; the "ROUGE-" prefix is
/// optional and case is ignored.
inline RougeVariant parse_variant(std::string_view text) {
  std::string s;
  for (char c : text) s.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  if (s.rfind("ROUGE-", 0) == 0) s.erase(0, 6);
  auto bad = [&]() -> RougeVariant {
    fail(ErrorKind::invalid_argument, "unknown ROUGE variant '" + std::string(text) + "'");
  };
  auto parse_uint = [&](std::string_view digits) -> std::size_t {
    if (digits.empty() || digits.size() > 6) bad();
    std::size_t v = 0;
    for (char c : digits) {
      if (c < '0' || c > '9') bad();
      v = v * 10 + static_cast<std::size_t>(c - '0');
    }
    return v;
  };
  RougeVariant v;
  if (s == "L") {
    v.kind = RougeKind::l;
  } else if (s == "W") {
    v.kind = RougeKind::w;
  } else if (s.rfind("W-", 0) == 0) {
    v.kind = RougeKind::w;
    char* end = nullptr;
    v.weight = std::strtod(s.c_str() + 2, &end);
    if (end == s.c_str() + 2 || *end != '\0') bad();
  } else if (s.rfind("SU", 0) == 0 || s.rfind("S", 0) == 0) {
    const bool su = s.rfind("SU", 0) == 0;
    v.kind = su ? RougeKind::su : RougeKind::s;
    const std::string rest = s.substr(su ? 2 : 1);
    if (rest != "*") v.max_skip = parse_uint(rest);
  } else {
    v.kind = RougeKind::n;
    v.n = parse_uint(s);
    if (v.n < 1 || v.n > 4) bad();
  }
  return v;
}

inline std::vector<RougeVariant> default_variants() {
  std::vector<RougeVariant> out;
  for (const char* name : {"ROUGE-1", "ROUGE-2", "ROUGE-3", "ROUGE-4", "ROUGE-L", "ROUGE-W-1.2",
                           "ROUGE-S*", "ROUGE-SU*"})
    out.push_back(parse_variant(name));
  return out;
}

struct RougeScore {
  std::string variant;
  double recall = 0.0;
  double precision = 0.0;
  double f1 = 0.0;
  std::optional<double> ci_low, ci_high;
  double level = 0.95;
};

inline double f1_of(double recall, double precision) {
  return recall + precision > 0.0 ? 2.0 * recall * precision / (recall + precision) : 0.0;
}

inline RougeScore make_score(std::string variant, double recall, double precision) {
  RougeScore s;
  s.variant = std::move(variant);
  s.recall = recall;
  s.precision = precision;
  s.f1 = f1_of(recall, precision);
  return s;
}

namespace detail {

using NgramCounts = std::map<std::vector<std::string>, std::size_t>;

inline NgramCounts ngram_counts(const EvalTokenSequence& tokens, std::size_t n) {
  NgramCounts out;
  if (tokens.size() < n) return out;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i)
    ++out[std::vector<std::string>(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                   tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
  return out;
}

inline std::size_t clipped_overlap(const NgramCounts& a, const NgramCounts& b) {
  std::size_t hits = 0;
  for (const auto& [gram, count] : a) {
    auto it = b.find(gram);
    if (it != b.end()) hits += std::min(count, it->second);
  }
  return hits;
}

inline double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

// skip-bigram (and optionally unigram) multiset
inline NgramCounts skip_units(const EvalTokenSequence& t, std::optional<std::size_t> max_skip,
                              bool unigrams) {
  NgramCounts out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (unigrams) ++out[{t[i]}];
    for (std::size_t j = i + 1; j < t.size(); ++j) {
      if (max_skip && j - i - 1 > *max_skip) break;
      ++out[{t[i], t[j]}];
    }
  }
  return out;
}

inline std::size_t count_units(const NgramCounts& c) {
  std::size_t total = 0;
  for (const auto& [_, n] : c) total += n;
  return total;
}

}  // namespace detail

inline RougeScore rouge_n(const EvalTokenSequence& system, const EvalTokenSequence& reference,
                          std::size_t n) {
  require(n >= 1, "rouge_n: n must be at least 1");
  if (reference.size() < n)
    fail(ErrorKind::invalid_argument, "rouge_n: reference too short for n = " + std::to_string(n));
  const auto ref = detail::ngram_counts(reference, n);
  const auto sys = detail::ngram_counts(system, n);
  const std::size_t hits = detail::clipped_overlap(sys, ref);
  const std::size_t ref_total = reference.size() - n + 1;
  const std::size_t sys_total = system.size() >= n ? system.size() - n + 1 : 0;
  return make_score("ROUGE-" + std::to_string(n), detail::ratio(hits, ref_total),
                    detail::ratio(hits, sys_total));
}

inline std::size_t lcs_length(const EvalTokenSequence& a, const EvalTokenSequence& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

inline RougeScore rouge_l(const EvalTokenSequence& system, const EvalTokenSequence& reference) {
  const std::size_t l = lcs_length(system, reference);
  return make_score("ROUGE-L", detail::ratio(l, reference.size()), detail::ratio(l, system.size()));
}

/// Maximum over all common subsequences of sum(f(run length)) with
/// f(k) = k^weight, runs being maximal stretches that are consecutive in
/// both sequences.
inline double weighted_lcs(const EvalTokenSequence& a, const EvalTokenSequence& b, double weight) {
  const std::size_t m = a.size(), n = b.size();
  auto f = [weight](std::size_t k) { return std::pow(static_cast<double>(k), weight); };
  // best[j]: best score within the current prefixes; runs[j][k-1]: best score of
  // an alignment whose last match is (i, j) and whose final run has length k
  std::vector<double> best_prev(n + 1, 0.0), best_cur(n + 1, 0.0);
  std::vector<std::vector<double>> runs_prev(n + 1), runs_cur(n + 1);
  for (std::size_t i = 1; i <= m; ++i) {
    best_cur[0] = 0.0;
    for (std::size_t j = 1; j <= n; ++j) {
      auto& runs = runs_cur[j];
      runs.clear();
      double here = std::max(best_prev[j], best_cur[j - 1]);
      if (a[i - 1] == b[j - 1]) {
        runs.push_back(best_prev[j - 1] + f(1));
        const auto& diag = runs_prev[j - 1];
        for (std::size_t k = 1; k <= diag.size(); ++k)
          runs.push_back(diag[k - 1] - f(k) + f(k + 1));
        for (double r : runs) here = std::max(here, r);
      }
      best_cur[j] = here;
    }
    std::swap(best_prev, best_cur);
    std::swap(runs_prev, runs_cur);
  }
  return best_prev[n];
}

inline RougeScore rouge_w(const EvalTokenSequence& system, const EvalTokenSequence& reference,
                          double weight = 1.2) {
  if (!(weight > 1.0)) fail(ErrorKind::invalid_argument, "rouge_w: weight must be greater than 1");
  RougeVariant v;
  v.kind = RougeKind::w;
  v.weight = weight;
  const double w = weighted_lcs(system, reference, weight);
  auto inv = [weight](double x) { return x > 0.0 ? std::pow(x, 1.0 / weight) : 0.0; };
  auto f = [weight](std::size_t k) { return std::pow(static_cast<double>(k), weight); };
  const double recall = reference.empty() ? 0.0 : std::min(1.0, inv(w / f(reference.size())));
  const double precision = system.empty() ? 0.0 : std::min(1.0, inv(w / f(system.size())));
  return make_score(v.name(), recall, precision);
}

inline RougeScore rouge_skip(const EvalTokenSequence& system, const EvalTokenSequence& reference,
                             std::optional<std::size_t> max_skip, bool with_unigrams) {
  RougeVariant v;
  v.kind = with_unigrams ? RougeKind::su : RougeKind::s;
  v.max_skip = max_skip;
  const auto ref = detail::skip_units(reference, max_skip, with_unigrams);
  const auto sys = detail::skip_units(system, max_skip, with_unigrams);
  const std::size_t hits = detail::clipped_overlap(sys, ref);
  return make_score(v.name(), detail::ratio(hits, detail::count_units(ref)),
                    detail::ratio(hits, detail::count_units(sys)));
}

inline RougeScore rouge_s(const EvalTokenSequence& system, const EvalTokenSequence& reference,
                          std::optional<std::size_t> max_skip = std::nullopt) {
  return rouge_skip(system, reference, max_skip, false);
}

inline RougeScore rouge_su(const EvalTokenSequence& system, const EvalTokenSequence& reference,
                           std::optional<std::size_t> max_skip = std::nullopt) {
  return rouge_skip(system, reference, max_skip, true);
}

inline RougeScore rouge(const RougeVariant& v, const EvalTokenSequence& system,
                        const EvalTokenSequence& reference) {
  RougeScore s;
  switch (v.kind) {
    case RougeKind::n: s = rouge_n(system, reference, v.n); break;
    case RougeKind::l: s = rouge_l(system, reference); break;
    case RougeKind::w: s = rouge_w(system, reference, v.weight); break;
    case RougeKind::s: s = rouge_s(system, reference, v.max_skip); break;
    case RougeKind::su: s = rouge_su(system, reference, v.max_skip); break;
  }
  s.variant = v.name();
  return s;
}

struct MultiReferenceResult {
  std::vector<std::vector<RougeScore>> per_reference;  // [reference][variant]
  std::vector<RougeScore> best;                        // per variant, highest F1 (first on ties)
};

inline MultiReferenceResult evaluate(const EvalTokenSequence& system,
                                     const std::vector<EvalTokenSequence>& references,
                                     const std::vector<RougeVariant>& variants) {
  require(!references.empty(), "evaluate: at least one reference is required");
  require(!variants.empty(), "evaluate: at least one variant is required");
  MultiReferenceResult out;
  for (const auto& ref : references) {
    std::vector<RougeScore> row;
    for (const auto& v : variants) row.push_back(rouge(v, system, ref));
    out.per_reference.push_back(std::move(row));
  }
  for (std::size_t v = 0; v < variants.size(); ++v) {
    const RougeScore* best = &out.per_reference[0][v];
    for (const auto& row : out.per_reference)
      if (row[v].f1 > best->f1) best = &row[v];
    out.best.push_back(*best);
  }
  return out;
}

struct ConfidenceInterval {
  double low = 0.0, high = 0.0;
};

struct BootstrapResult {
  double level = 0.95;
  std::size_t resamples = 0;
  bool degenerate = false;  // single pair: the interval collapses to the point
  RougeScore mean;
  ConfidenceInterval recall, precision, f1;
};

namespace detail {

// linear interpolation between order statistics
inline double quantile(std::vector<double> sorted, double q) {
  std::sort(sorted.begin(), sorted.end());
  if (sorted.size() == 1) return sorted[0];
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace detail

/// Percentile bootstrap of the mean recall, precision and F1 over evaluation
/// pairs. Resample r draws from its own generator seeded with (seed, r), so
/// results do not depend on evaluation order.
inline BootstrapResult bootstrap_ci(const std::vector<RougeScore>& scores, double level = 0.95,
                                    std::size_t resamples = 1000, std::uint64_t seed = 42) {
  if (scores.empty()) fail(ErrorKind::invalid_argument, "bootstrap_ci: no scores given");
  require(level > 0.0 && level < 1.0, "bootstrap_ci: level must be in (0, 1)");
  require(resamples >= 1, "bootstrap_ci: resamples must be at least 1");
  const std::size_t n = scores.size();
  BootstrapResult out;
  out.level = level;
  double r = 0, p = 0, f = 0;
  for (const auto& s : scores) {
    r += s.recall;
    p += s.precision;
    f += s.f1;
  }
  out.mean = scores[0];
  out.mean.recall = r / static_cast<double>(n);
  out.mean.precision = p / static_cast<double>(n);
  out.mean.f1 = f / static_cast<double>(n);
  out.mean.level = level;
  if (n == 1) {
    out.degenerate = true;
    out.recall = {out.mean.recall, out.mean.recall};
    out.precision = {out.mean.precision, out.mean.precision};
    out.f1 = {out.mean.f1, out.mean.f1};
  } else {
    out.resamples = resamples;
    std::vector<double> rs(resamples), ps(resamples), fs(resamples);
    for (std::size_t b = 0; b < resamples; ++b) {
      std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                        static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
      std::mt19937_64 rng(seq);
      double sr = 0, sp = 0, sf = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const auto& s = scores[static_cast<std::size_t>(rng() % n)];
        sr += s.recall;
        sp += s.precision;
        sf += s.f1;
      }
      rs[b] = sr / static_cast<double>(n);
      ps[b] = sp / static_cast<double>(n);
      fs[b] = sf / static_cast<double>(n);
    }
    const double a = (1.0 - level) / 2.0;
    auto interval = [&](const std::vector<double>& v, double point) {
      ConfidenceInterval ci{detail::quantile(v, a), detail::quantile(v, 1.0 - a)};
      ci.low = std::min(ci.low, point);
      ci.high = std::max(ci.high, point);
      return ci;
    };
    out.recall = interval(rs, out.mean.recall);
    out.precision = interval(ps, out.mean.precision);
    out.f1 = interval(fs, out.mean.f1);
  }
  out.mean.ci_low = out.f1.low;
  out.mean.ci_high = out.f1.high;
  return out;
}

inline nlohmann::json score_to_json(const RougeScore& s) {
  nlohmann::json j{{"variant", s.variant},
                   {"recall", s.recall},
                   {"precision", s.precision},
                   {"f1", s.f1},
                   {"ci_low", nullptr},
                   {"ci_high", nullptr},
                   {"level", s.level}};
  if (s.ci_low) j["ci_low"] = *s.ci_low;
  if (s.ci_high) j["ci_high"] = *s.ci_high;
  return j;
}

/// Plain-text table: ROUGE, Recall, Precision, F1 Score, Conf.int.
inline std::string format_table(const std::vector<RougeScore>& rows) {
  std::string out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-12s %-9s %-9s %-9s %s\n", "ROUGE", "Recall", "Precision",
                "F1 Score", "Conf.int");
  out += buf;
  for (const auto& s : rows) {
    std::string ci;
    char cbuf[64];
    std::snprintf(cbuf, sizeof cbuf, "%g%%", s.level * 100.0);
    ci = cbuf;
    if (s.ci_low && s.ci_high) {
      std::snprintf(cbuf, sizeof cbuf, " [%.5f, %.5f]", *s.ci_low, *s.ci_high);
      ci += cbuf;
    }
    std::snprintf(buf, sizeof buf, "%-12s %.5f   %.5f   %.5f   %s\n", s.variant.c_str(), s.recall,
                  s.precision, s.f1, ci.c_str());
    out += buf;
  }
  return out;
}

}  // namespace topicsum
