#pragma once

// Frequency-based sentence scoring with top-N selection, plus an alternative
// ranker based on cosine-similarity centrality.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <unordered_map>
#include <vector>

#include "topicsum/error.hpp"
#include "topicsum/text.hpp"

namespace topicsum {

inline constexpr std::size_t kDefaultMaxWords = 30;

struct SentenceScoreTable {
  std::map<std::size_t, double> scores;
  std::size_t max_words = kDefaultMaxWords;
};

enum class SummaryMethod { frequency, centrality, lsa };

inline const char* to_string(SummaryMethod m) {
  switch (m) {
    case SummaryMethod::frequency: return "frequency";
    case SummaryMethod::centrality: return "centrality";
    case SummaryMethod::lsa: return "lsa";
  }
  return "frequency";
}

struct Summary {
  std::vector<std::size_t> selected;  // strictly increasing
  std::string text;
  SummaryMethod method = SummaryMethod::frequency;
  std::size_t n_requested = 0;
  bool short_result = false;  // fewer eligible sentences than requested
};

/// Accumulates normalized word frequencies per sentence. Only sentences with
/// fewer than `max_words` tokens are scored; the first in-table token
/// initializes a sentence's score and later ones (repeats included) add to it.
inline SentenceScoreTable score_sentences(const SentenceList& sentences,
                                          const WordFrequencyTable& freqs,
                                          std::size_t max_words = kDefaultMaxWords) {
  require(max_words > 0, "score_sentences: max_words must be positive");
  SentenceScoreTable table;
  table.max_words = max_words;
  for (const auto& s : sentences) {
    if (s.word_count() >= max_words) continue;
    for (const auto& tok : s.tokens) {
      const double* f = freqs.find(tok);
      if (!f) continue;
      auto [it, inserted] = table.scores.try_emplace(s.index, *f);
      if (!inserted) it->second += *f;
    }
  }
  return table;
}

inline std::string join_sentences(const SentenceList& sentences,
                                  const std::vector<std::size_t>& indices) {
  std::string text;
  for (std::size_t idx : indices) {
    const auto it = std::find_if(sentences.begin(), sentences.end(),
                                 [&](const Sentence& s) { return s.index == idx; });
    if (it == sentences.end()) continue;
    if (!text.empty()) text.push_back(' ');
    text += it->text;
  }
  return text;
}

/// Takes the `n` highest scores off a max-heap (ties: lower index first) and
/// reports them in document order.
inline Summary select_top_n(const SentenceScoreTable& scores, const SentenceList& sentences,
                            std::size_t n) {
  require(n >= 1, "select_top_n: n must be at least 1");
  using Entry = std::pair<double, std::size_t>;
  auto lower_priority = [](const Entry& a, const Entry& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second > b.second;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(lower_priority)> heap(lower_priority);
  for (const auto& [idx, score] : scores.scores) heap.emplace(score, idx);

  Summary summary;
  summary.method = SummaryMethod::frequency;
  summary.n_requested = n;
  summary.short_result = scores.scores.size() < n;
  while (!heap.empty() && summary.selected.size() < n) {
    summary.selected.push_back(heap.top().second);
    heap.pop();
  }
  std::sort(summary.selected.begin(), summary.selected.end());
  summary.text = join_sentences(sentences, summary.selected);
  return summary;
}

using Vector = std::vector<double>;
using EmbeddingTable = std::unordered_map<std::string, Vector>;

/// Mean of the one-hot vectors of a sentence's tokens over `vocabulary`
/// (tokens outside the vocabulary contribute zero), or, with `embeddings`,
/// the mean of the available word embeddings.
inline std::vector<Vector> sentence_vectors(const SentenceList& sentences,
                                            const std::vector<std::string>& vocabulary,
                                            const EmbeddingTable* embeddings = nullptr,
                                            bool lowercase = true) {
  auto norm = [&](const std::string& t) { return lowercase ? utf8::to_lower(t) : t; };
  std::vector<Vector> out;
  out.reserve(sentences.size());
  if (embeddings) {
    std::size_t dim = 0;
    if (!embeddings->empty()) dim = embeddings->begin()->second.size();
    for (const auto& s : sentences) {
      Vector v(dim, 0.0);
      std::size_t hits = 0;
      for (const auto& tok : s.tokens) {
        auto it = embeddings->find(norm(tok));
        if (it == embeddings->end()) continue;
        if (it->second.size() != dim) fail(ErrorKind::invalid_argument, "embedding dimension mismatch");
        for (std::size_t d = 0; d < dim; ++d) v[d] += it->second[d];
        ++hits;
      }
      if (hits)
        for (auto& x : v) x /= static_cast<double>(hits);
      out.push_back(std::move(v));
    }
    return out;
  }

  require(!vocabulary.empty(), "sentence_vectors: vocabulary is empty");
  std::unordered_map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < vocabulary.size(); ++i) pos.emplace(vocabulary[i], i);
  for (const auto& s : sentences) {
    Vector v(vocabulary.size(), 0.0);
    for (const auto& tok : s.tokens)
      if (auto it = pos.find(norm(tok)); it != pos.end()) v[it->second] += 1.0;
    if (s.word_count() > 0)
      for (auto& x : v) x /= static_cast<double>(s.word_count());
    out.push_back(std::move(v));
  }
  return out;
}

/// Dense symmetric matrix of pairwise cosine similarities.
struct SimilarityMatrix {
  std::size_t dim = 0;
  std::vector<double> values;  // row-major dim x dim

  double operator()(std::size_t i, std::size_t j) const { return values[i * dim + j]; }
  double& operator()(std::size_t i, std::size_t j) { return values[i * dim + j]; }
};

inline SimilarityMatrix similarity_matrix(const std::vector<Vector>& vectors) {
  SimilarityMatrix m;
  m.dim = vectors.size();
  m.values.assign(m.dim * m.dim, 0.0);
  if (vectors.empty()) return m;
  const std::size_t d = vectors.front().size();
  std::vector<double> norms(m.dim);
  for (std::size_t i = 0; i < m.dim; ++i) {
    if (vectors[i].size() != d)
      fail(ErrorKind::invalid_argument, "similarity_matrix: vector " + std::to_string(i) +
                                            " has dimension " + std::to_string(vectors[i].size()) +
                                            ", expected " + std::to_string(d));
    double ss = 0.0;
    for (double x : vectors[i]) ss += x * x;
    norms[i] = std::sqrt(ss);
  }
  for (std::size_t i = 0; i < m.dim; ++i) {
    m(i, i) = norms[i] > 0.0 ? 1.0 : 0.0;
    for (std::size_t j = i + 1; j < m.dim; ++j) {
      double c = 0.0;
      if (norms[i] > 0.0 && norms[j] > 0.0) {
        double dot = 0.0;
        for (std::size_t k = 0; k < d; ++k) dot += vectors[i][k] * vectors[j][k];
        c = std::clamp(dot / (norms[i] * norms[j]), -1.0, 1.0);
      }
      m(i, j) = c;
      m(j, i) = c;
    }
  }
  return m;
}

struct CentralityResult {
  std::vector<std::pair<std::size_t, double>> ranking;  // sorted by decreasing score
  std::vector<double> scores;                           // by sentence index, sums to 1
  bool converged = false;
  bool degenerate = false;  // no edges at all; scores are uniform
  std::size_t iterations = 0;
};

/// Damped power iteration over the row-normalized similarity graph.
/// Self-similarity is ignored and rows without edges spread their mass
/// uniformly. Iteration stops when successive iterates differ by less than
/// `tol` in max-norm.
inline CentralityResult rank_by_centrality(const SimilarityMatrix& matrix, double damping = 0.85,
                                           double tol = 1e-6, std::size_t max_iter = 100) {
  require(damping > 0.0 && damping < 1.0, "rank_by_centrality: damping must be in (0, 1)");
  require(tol > 0.0, "rank_by_centrality: tol must be positive");
  require(max_iter > 0, "rank_by_centrality: max_iter must be positive");
  require(matrix.values.size() == matrix.dim * matrix.dim, "rank_by_centrality: matrix not square");

  const std::size_t n = matrix.dim;
  CentralityResult r;
  if (n == 0) {
    r.converged = true;
    return r;
  }
  std::vector<double> row_sum(n, 0.0);
  bool any_edge = false;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && matrix(i, j) > 0.0) {
        row_sum[i] += matrix(i, j);
        any_edge = true;
      }

  const double uniform = 1.0 / static_cast<double>(n);
  std::vector<double> x(n, uniform), next(n);
  if (!any_edge) {
    r.degenerate = true;
    r.converged = true;
  } else {
    for (r.iterations = 1; r.iterations <= max_iter; ++r.iterations) {
      double dangling = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        if (row_sum[i] == 0.0) dangling += x[i];
      for (std::size_t j = 0; j < n; ++j) {
        double in = 0.0;
        for (std::size_t i = 0; i < n; ++i)
          if (i != j && row_sum[i] > 0.0 && matrix(i, j) > 0.0) in += x[i] * matrix(i, j) / row_sum[i];
        next[j] = (1.0 - damping) * uniform + damping * (in + dangling * uniform);
      }
      double total = 0.0;
      for (double v : next) total += v;
      double delta = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        next[j] /= total;
        delta = std::max(delta, std::abs(next[j] - x[j]));
      }
      x.swap(next);
      if (delta < tol) {
        r.converged = true;
        break;
      }
    }
    r.iterations = std::min(r.iterations, max_iter);
  }
  r.scores = x;
  for (std::size_t i = 0; i < n; ++i) r.ranking.emplace_back(i, x[i]);
  std::stable_sort(r.ranking.begin(), r.ranking.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return r;
}

/// Top-n sentences by centrality among those under `max_words`, in document
/// order.
inline Summary select_by_centrality(const SentenceList& sentences, std::size_t n,
                                    std::size_t max_words = kDefaultMaxWords, double damping = 0.85,
                                    double tol = 1e-6, std::size_t max_iter = 100) {
  require(n >= 1, "select_by_centrality: n must be at least 1");
  SentenceList eligible;
  for (const auto& s : sentences)
    if (s.word_count() < max_words) eligible.push_back(s);
  Summary summary;
  summary.method = SummaryMethod::centrality;
  summary.n_requested = n;
  summary.short_result = eligible.size() < n;
  if (eligible.empty()) return summary;

  std::vector<std::string> vocab;
  std::map<std::string, bool> seen;
  for (const auto& s : eligible)
    for (const auto& t : s.tokens)
      if (seen.emplace(utf8::to_lower(t), true).second) vocab.push_back(utf8::to_lower(t));
  const auto sim = similarity_matrix(sentence_vectors(eligible, vocab));
  const auto rank = rank_by_centrality(sim, damping, tol, max_iter);
  for (std::size_t k = 0; k < rank.ranking.size() && summary.selected.size() < n; ++k)
    summary.selected.push_back(eligible[rank.ranking[k].first].index);
  std::sort(summary.selected.begin(), summary.selected.end());
  summary.text = join_sentences(sentences, summary.selected);
  return summary;
}

}  // namespace topicsum
