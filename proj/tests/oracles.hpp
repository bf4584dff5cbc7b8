#pragma once

// Slow reference implementations used to check the library. Nothing here
// calls into topicsum beyond plain data types.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

using Tokens = std::vector<std::string>;

inline std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// ---- word frequencies and sentence scores --------------------------------

// count by linear scans, then divide by the largest count
inline std::map<std::string, double> frequency_table(const std::vector<Tokens>& sentences,
                                                     const std::set<std::string>& stopwords) {
  Tokens all;
  for (const auto& s : sentences)
    for (const auto& t : s)
      if (!stopwords.count(lower(t))) all.push_back(lower(t));
  std::map<std::string, double> out;
  double top = 0;
  for (const auto& w : all) {
    const auto c = static_cast<double>(std::count(all.begin(), all.end(), w));
    out[w] = c;
    top = std::max(top, c);
  }
  for (auto& [_, v] : out) v /= top;
  return out;
}

inline std::map<std::size_t, double> sentence_scores(const std::vector<Tokens>& sentences,
                                                     const std::map<std::string, double>& table,
                                                     std::size_t max_words) {
  std::map<std::size_t, double> out;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (sentences[i].size() >= max_words) continue;
    bool any = false;
    double sum = 0;
    for (const auto& t : sentences[i]) {
      auto it = table.find(lower(t));
      if (it == table.end()) continue;
      any = true;
      sum += it->second;
    }
    if (any) out[i] = sum;
  }
  return out;
}

inline std::vector<std::size_t> top_n(const std::map<std::size_t, double>& scores, std::size_t n) {
  std::vector<std::pair<double, std::size_t>> v;
  for (const auto& [i, s] : scores) v.emplace_back(-s, i);
  std::stable_sort(v.begin(), v.end());
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < v.size() && k < n; ++k) out.push_back(v[k].second);
  std::sort(out.begin(), out.end());
  return out;
}

// Up to 20 sentences over at most 40 distinct words; some sentences cross
// the 30-word limit and some contain only stopwords.
inline std::vector<Tokens> mini_document(std::mt19937_64& rng) {
  static const Tokens stop = {"the", "and", "of", "a", "is"};
  const std::size_t vocab = 1 + rng() % 40;
  const std::size_t n = 1 + rng() % 20;
  std::vector<Tokens> doc(n);
  for (auto& s : doc) {
    const std::size_t len = rng() % 36;
    for (std::size_t i = 0; i < len; ++i) {
      if (rng() % 6 == 0) {
        s.push_back(stop[rng() % stop.size()]);
        continue;
      }
      std::string w = "w" + std::to_string(rng() % vocab);
      if (rng() % 5 == 0) w[0] = 'W';
      s.push_back(w);
    }
  }
  return doc;
}

// ---- topic model quantities ------------------------------------------------

inline double kl(const std::vector<double>& p, const std::vector<double>& q) {
  double s = 0;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] > 0) s += p[i] * std::log(p[i] / q[i]);
  return s;
}

inline double jsd(const std::vector<double>& p, const std::vector<double>& q) {
  std::vector<double> m(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) m[i] = (p[i] + q[i]) / 2;
  return (kl(p, m) + kl(q, m)) / 2;
}

// I(T; W) for the joint p(t, w) = prevalence[t] * phi[t][w]
inline double mutual_information(const std::vector<std::vector<double>>& phi,
                                 const std::vector<double>& prevalence) {
  const std::size_t K = phi.size(), V = phi[0].size();
  std::vector<double> pw(V, 0.0);
  for (std::size_t t = 0; t < K; ++t)
    for (std::size_t w = 0; w < V; ++w) pw[w] += prevalence[t] * phi[t][w];
  double mi = 0;
  for (std::size_t t = 0; t < K; ++t)
    for (std::size_t w = 0; w < V; ++w) {
      const double joint = prevalence[t] * phi[t][w];
      if (joint > 0) mi += joint * std::log(joint / (prevalence[t] * pw[w]));
    }
  return mi;
}

// ---- ROUGE -----------------------------------------------------------------

inline std::size_t ngram_overlap(const Tokens& sys, const Tokens& ref, std::size_t n) {
  auto grams = [n](const Tokens& t) {
    std::vector<Tokens> g;
    for (std::size_t i = 0; i + n <= t.size(); ++i) g.emplace_back(t.begin() + i, t.begin() + i + n);
    return g;
  };
  auto r = grams(ref);
  std::size_t hits = 0;
  for (const auto& g : grams(sys)) {
    auto it = std::find(r.begin(), r.end(), g);
    if (it == r.end()) continue;
    r.erase(it);
    ++hits;
  }
  return hits;
}

inline std::size_t unigram_overlap(const Tokens& sys, const Tokens& ref) {
  std::set<std::string> words(sys.begin(), sys.end());
  std::size_t hits = 0;
  for (const auto& w : words)
    hits += std::min(std::count(sys.begin(), sys.end(), w), std::count(ref.begin(), ref.end(), w));
  return hits;
}

// all (i, j) index pairs with i < j and gap j - i - 1 <= max_gap
inline std::vector<Tokens> skip_pairs(const Tokens& t, std::size_t max_gap) {
  std::vector<Tokens> out;
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t j = i + 1; j < t.size(); ++j)
      if (j - i - 1 <= max_gap) out.push_back({t[i], t[j]});
  return out;
}

inline std::size_t multiset_overlap(std::vector<Tokens> a, std::vector<Tokens> b) {
  std::size_t hits = 0;
  for (const auto& x : a) {
    auto it = std::find(b.begin(), b.end(), x);
    if (it == b.end()) continue;
    b.erase(it);
    ++hits;
  }
  return hits;
}

// Longest run of consecutive tokens shared by both sequences.
inline std::size_t longest_common_substring(const Tokens& a, const Tokens& b) {
  std::size_t best = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) {
      std::size_t k = 0;
      while (i + k < a.size() && j + k < b.size() && a[i + k] == b[j + k]) ++k;
      best = std::max(best, k);
    }
  return best;
}

// Enumerates every common subsequence alignment and credits each maximal
// run of length k (consecutive in both sequences) with k^weight.
inline double weighted_lcs(const Tokens& a, const Tokens& b, double weight) {
  double best = 0;
  std::function<void(std::size_t, std::size_t, std::size_t, double)> walk =
      [&](std::size_t i0, std::size_t j0, std::size_t run, double closed) {
        best = std::max(best, closed + std::pow(static_cast<double>(run), weight));
        for (std::size_t i = i0; i < a.size(); ++i)
          for (std::size_t j = j0; j < b.size(); ++j) {
            if (a[i] != b[j]) continue;
            const bool extends = run > 0 && i == i0 && j == j0;
            if (extends)
              walk(i + 1, j + 1, run + 1, closed);
            else
              walk(i + 1, j + 1, 1, closed + std::pow(static_cast<double>(run), weight));
          }
      };
  walk(0, 0, 0, 0.0);
  return best;
}

inline double f1(double r, double p) { return r + p > 0 ? 2 * r * p / (r + p) : 0.0; }

}  // namespace oracle
