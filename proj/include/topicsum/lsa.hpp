#pragma once

// Latent semantic analysis over a term-sentence matrix: one sentence is
// picked per latent concept, strongest concept first.

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "topicsum/error.hpp"
#include "topicsum/extractive.hpp"
#include "topicsum/linalg.hpp"
#include "topicsum/text.hpp"

namespace topicsum {

enum class TermWeighting { tf, tfidf };

struct TermSentenceMatrix {
  std::vector<std::string> terms;  // row labels, first-appearance order
  std::size_t sentence_count = 0;
  Matrix values;                   // terms x sentences
};

/// Lowercased, stopword-filtered term counts per sentence; with tfidf each
/// count is scaled by ln(sentences / sentences containing the term). Rows
/// that end up all zero are dropped.
inline TermSentenceMatrix build_term_sentence_matrix(const SentenceList& sentences,
                                                     const StopwordSet& stopwords,
                                                     TermWeighting weighting = TermWeighting::tf) {
  require(!sentences.empty(), "build_term_sentence_matrix: at least one sentence is required");
  std::vector<std::string> order;
  std::map<std::string, std::vector<double>> counts;
  const std::size_t n = sentences.size();
  for (std::size_t s = 0; s < n; ++s) {
    for (const auto& tok : sentences[s].tokens) {
      std::string t = utf8::to_lower(tok);
      if (stopwords.contains(t)) continue;
      auto [it, inserted] = counts.try_emplace(t, std::vector<double>(n, 0.0));
      if (inserted) order.push_back(t);
      it->second[s] += 1.0;
    }
  }
  if (weighting == TermWeighting::tfidf) {
    for (auto& [_, row] : counts) {
      const auto df = std::count_if(row.begin(), row.end(), [](double x) { return x > 0.0; });
      const double idf = std::log(static_cast<double>(n) / static_cast<double>(df));
      for (auto& x : row) x *= idf;
    }
  }
  TermSentenceMatrix m;
  m.sentence_count = n;
  for (const auto& t : order) {
    const auto& row = counts[t];
    if (std::any_of(row.begin(), row.end(), [](double x) { return x != 0.0; })) m.terms.push_back(t);
  }
  if (m.terms.empty()) fail(ErrorKind::invalid_argument, "build_term_sentence_matrix: empty matrix");
  m.values = Matrix(m.terms.size(), n);
  for (std::size_t r = 0; r < m.terms.size(); ++r) {
    const auto& row = counts[m.terms[r]];
    for (std::size_t s = 0; s < n; ++s) m.values(r, s) = row[s];
  }
  return m;
}

using SvdFactors = SvdResult;

inline SvdFactors truncated_svd(const TermSentenceMatrix& matrix, std::size_t k, double tol = 1e-9) {
  require(tol > 0.0, "truncated_svd: tol must be positive");
  return jacobi_svd(matrix.values, k, std::max(tol, 1e-15));
}

/// Concept j (in order of decreasing singular value) contributes the
/// not-yet-selected sentence with the largest |V[s, j]|; ties go to the lower
/// sentence index. When more sentences are requested than there are
/// concepts, the concepts are visited again in the same order.
inline Summary select_sentences_lsa(const SvdFactors& factors, const SentenceList& sentences,
                                    std::size_t n) {
  require(n >= 1, "select_sentences_lsa: n must be at least 1");
  require(factors.v.rows() == sentences.size(),
          "select_sentences_lsa: factor rows do not match sentence count");
  Summary summary;
  summary.method = SummaryMethod::lsa;
  summary.n_requested = n;
  const std::size_t count = sentences.size();
  const std::size_t concepts = factors.v.cols();
  if (n >= count || concepts == 0) {
    summary.short_result = n > count;
    for (const auto& s : sentences) summary.selected.push_back(s.index);
  } else {
    std::vector<bool> taken(count, false);
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t c = j % concepts;
      std::size_t best = count;
      for (std::size_t s = 0; s < count; ++s) {
        if (taken[s]) continue;
        if (best == count || std::abs(factors.v(s, c)) > std::abs(factors.v(best, c))) best = s;
      }
      taken[best] = true;
      summary.selected.push_back(sentences[best].index);
    }
  }
  std::sort(summary.selected.begin(), summary.selected.end());
  summary.text = join_sentences(sentences, summary.selected);
  return summary;
}

/// Matrix construction, SVD with as many concepts as requested sentences
/// (bounded by the matrix rank limit), and concept-wise selection.
inline Summary lsa_summarize(const SentenceList& sentences, const StopwordSet& stopwords,
                             std::size_t n, TermWeighting weighting = TermWeighting::tf,
                             double tol = 1e-9) {
  const auto m = build_term_sentence_matrix(sentences, stopwords, weighting);
  const std::size_t k = std::min({n, m.values.rows(), m.values.cols()});
  return select_sentences_lsa(truncated_svd(m, k, tol), sentences, n);
}

}  // namespace topicsum
