#pragma once

// Quantities behind the interactive topic map: prevalence, term relevance
// under lambda, saliency, Jensen-Shannon topic distances with a classical
// MDS projection, and the visdata.json payload.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <numeric>
#include <string>
#include <vector>

#include "topicsum/error.hpp"
#include "topicsum/lda.hpp"
#include "topicsum/linalg.hpp"

namespace topicsum {

inline constexpr const char* kVisSchemaVersion = "1.0";
inline constexpr double kDefaultLambdaStep = 0.01;
inline constexpr std::size_t kDefaultTermsShown = 30;
inline constexpr double kInitialLambda = 0.48;

struct TopicSummary {
  std::vector<double> prevalence;   // by model topic, sums to 1
  std::vector<std::size_t> order;   // model topics by decreasing prevalence; position + 1 = display id
};

/// Token-weighted mean of the document-topic rows.
inline TopicSummary topic_prevalence(const Matrix& theta, const std::vector<std::size_t>& doc_lengths) {
  require(theta.rows() == doc_lengths.size(), "topic_prevalence: theta rows must match doc_lengths");
  const std::size_t K = theta.cols();
  TopicSummary out;
  out.prevalence.assign(K, 0.0);
  double total = 0.0;
  for (std::size_t len : doc_lengths) total += static_cast<double>(len);
  const bool unweighted = total == 0.0;
  if (unweighted) total = static_cast<double>(theta.rows());
  for (std::size_t d = 0; d < theta.rows(); ++d) {
    const double w = unweighted ? 1.0 : static_cast<double>(doc_lengths[d]);
    for (std::size_t k = 0; k < K; ++k) out.prevalence[k] += w * theta(d, k);
  }
  if (total > 0.0)
    for (auto& p : out.prevalence) p /= total;
  out.order.resize(K);
  std::iota(out.order.begin(), out.order.end(), 0);
  std::stable_sort(out.order.begin(), out.order.end(), [&](std::size_t a, std::size_t b) {
    return out.prevalence[a] > out.prevalence[b];
  });
  return out;
}

struct TermRelevanceTable {
  std::size_t K = 0, V = 0;
  Matrix phi;      // K x V
  Matrix logprob;  // ln phi
  Matrix loglift;  // ln(phi / p(w))
  std::vector<double> marginal;             // p(w) = sum_t p(t) phi[t, w]
  std::vector<std::size_t> corpus_freq;     // raw counts, display only
};

inline TermRelevanceTable build_relevance_table(const Matrix& phi, const TopicSummary& prevalence,
                                                std::vector<std::size_t> corpus_freq = {}) {
  require(prevalence.prevalence.size() == phi.rows(), "build_relevance_table: topic count mismatch");
  TermRelevanceTable t;
  t.K = phi.rows();
  t.V = phi.cols();
  t.phi = phi;
  t.marginal.assign(t.V, 0.0);
  for (std::size_t k = 0; k < t.K; ++k)
    for (std::size_t w = 0; w < t.V; ++w) t.marginal[w] += prevalence.prevalence[k] * phi(k, w);
  t.logprob = Matrix(t.K, t.V);
  t.loglift = Matrix(t.K, t.V);
  for (std::size_t k = 0; k < t.K; ++k)
    for (std::size_t w = 0; w < t.V; ++w) {
      t.logprob(k, w) = std::log(phi(k, w));
      t.loglift(k, w) = t.logprob(k, w) - std::log(t.marginal[w]);
    }
  t.corpus_freq = corpus_freq.empty() ? std::vector<std::size_t>(t.V, 0) : std::move(corpus_freq);
  require(t.corpus_freq.size() == t.V, "build_relevance_table: corpus_freq size mismatch");
  return t;
}

/// Term ids ranked by lambda * logprob + (1 - lambda) * loglift, descending,
/// ties by ascending id.
inline std::vector<std::size_t> term_relevance(const TermRelevanceTable& table, std::size_t topic,
                                               double lambda) {
  require(topic < table.K, "term_relevance: topic out of range");
  if (!(lambda >= 0.0 && lambda <= 1.0))
    fail(ErrorKind::invalid_argument, "term_relevance: lambda must be in [0, 1]");
  std::vector<double> r(table.V);
  for (std::size_t w = 0; w < table.V; ++w)
    r[w] = lambda * table.logprob(topic, w) + (1.0 - lambda) * table.loglift(topic, w);
  std::vector<std::size_t> ids(table.V);
  std::iota(ids.begin(), ids.end(), 0);
  std::stable_sort(ids.begin(), ids.end(), [&](std::size_t a, std::size_t b) { return r[a] > r[b]; });
  return ids;
}

/// saliency(w) = p(w) * KL(p(t | w) || p(t)).
inline std::vector<double> term_saliency(const TermRelevanceTable& table, const TopicSummary& prevalence) {
  std::vector<double> out(table.V, 0.0);
  for (std::size_t w = 0; w < table.V; ++w) {
    const double pw = table.marginal[w];
    if (pw <= 0.0) continue;
    double kl = 0.0;
    for (std::size_t k = 0; k < table.K; ++k) {
      const double pt = prevalence.prevalence[k];
      if (pt <= 0.0) continue;
      const double post = table.phi(k, w) * pt / pw;
      if (post > 0.0) kl += post * std::log(post / pt);
    }
    out[w] = std::max(0.0, pw * kl);
  }
  return out;
}

/// Jensen-Shannon divergence in nats; bounded by ln 2.
inline double jensen_shannon(const std::vector<double>& p, const std::vector<double>& q) {
  require(p.size() == q.size(), "jensen_shannon: size mismatch");
  double js = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double m = 0.5 * (p[i] + q[i]);
    if (p[i] > 0.0) js += 0.5 * p[i] * std::log(p[i] / m);
    if (q[i] > 0.0) js += 0.5 * q[i] * std::log(q[i] / m);
  }
  return std::clamp(js, 0.0, std::log(2.0));
}

inline Matrix topic_distances(const Matrix& phi) {
  const std::size_t K = phi.rows();
  Matrix d(K, K);
  for (std::size_t i = 0; i < K; ++i)
    for (std::size_t j = i + 1; j < K; ++j) {
      const double v = jensen_shannon(phi.row(i), phi.row(j));
      d(i, j) = v;
      d(j, i) = v;
    }
  return d;
}

struct TopicCoordinates {
  std::vector<double> x, y;  // by model topic
};

/// Classical MDS: top-2 eigenpairs of the double-centered squared-distance
/// matrix. Negative eigenvalues contribute a zero axis.
inline TopicCoordinates project_2d(const Matrix& distances) {
  require(distances.rows() == distances.cols(), "project_2d: distance matrix must be square");
  const std::size_t K = distances.rows();
  TopicCoordinates c;
  c.x.assign(K, 0.0);
  c.y.assign(K, 0.0);
  if (K < 2) return c;
  Matrix sq(K, K);
  for (std::size_t i = 0; i < K; ++i)
    for (std::size_t j = 0; j < K; ++j) sq(i, j) = distances(i, j) * distances(i, j);
  std::vector<double> row_mean(K, 0.0);
  double grand = 0.0;
  for (std::size_t i = 0; i < K; ++i) {
    for (std::size_t j = 0; j < K; ++j) row_mean[i] += sq(i, j);
    grand += row_mean[i];
    row_mean[i] /= static_cast<double>(K);
  }
  grand /= static_cast<double>(K * K);
  Matrix b(K, K);
  for (std::size_t i = 0; i < K; ++i)
    for (std::size_t j = 0; j < K; ++j) b(i, j) = -0.5 * (sq(i, j) - row_mean[i] - row_mean[j] + grand);
  const auto eig = symmetric_eigen(b);
  for (std::size_t axis = 0; axis < 2 && axis < K; ++axis) {
    const double lambda = eig.values[axis];
    if (lambda <= 0.0) continue;
    auto& out = axis == 0 ? c.x : c.y;
    for (std::size_t i = 0; i < K; ++i) out[i] = eig.vectors(i, axis) * std::sqrt(lambda);
  }
  return c;
}

namespace detail {

/// Rounds to 12 significant digits so the serialized form stays short.
inline double round12(double v) {
  if (!std::isfinite(v)) fail(ErrorKind::runtime, "visdata: non-finite value");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  const double r = std::strtod(buf, nullptr);
  return r == 0.0 ? 0.0 : r;
}

}  // namespace detail

/// Builds the visdata.json payload. `R` larger than the vocabulary is
/// clamped and reported through `warnings`.
inline nlohmann::json export_vis_json(const FittedModel& model, std::size_t R = kDefaultTermsShown,
                                      double lambda_step = kDefaultLambdaStep,
                                      std::vector<std::string>* warnings = nullptr) {
  require(R >= 1, "export_vis_json: R must be >= 1");
  require(lambda_step > 0.0 && lambda_step <= 1.0, "export_vis_json: lambda_step must be in (0, 1]");
  const std::size_t K = model.phi.rows();
  const std::size_t V = model.phi.cols();
  require(K >= 1 && V >= 1, "export_vis_json: model is empty");
  if (R > V) {
    if (warnings)
      warnings->push_back("R = " + std::to_string(R) + " exceeds vocabulary size " + std::to_string(V) +
                          "; clamped");
    R = V;
  }
  const auto prevalence = topic_prevalence(model.theta, model.doc_lengths);
  const auto table = build_relevance_table(model.phi, prevalence, model.dictionary.corpus_freq);
  const auto saliency = term_saliency(table, prevalence);
  const auto coords = project_2d(topic_distances(model.phi));

  // estimated tokens per topic
  std::vector<double> topic_tokens(K, 0.0);
  for (std::size_t d = 0; d < model.theta.rows(); ++d)
    for (std::size_t k = 0; k < K; ++k)
      topic_tokens[k] += model.theta(d, k) * static_cast<double>(model.doc_lengths[d]);

  using detail::round12;
  nlohmann::json mds = nlohmann::json::array();
  for (std::size_t pos = 0; pos < K; ++pos) {
    const std::size_t k = prevalence.order[pos];
    mds.push_back({{"topic", pos + 1},
                   {"x", round12(coords.x[k])},
                   {"y", round12(coords.y[k])},
                   {"prevalence", round12(100.0 * prevalence.prevalence[k])}});
  }

  nlohmann::json tinfo = nlohmann::json::array();
  std::vector<std::size_t> by_saliency(V);
  std::iota(by_saliency.begin(), by_saliency.end(), 0);
  std::stable_sort(by_saliency.begin(), by_saliency.end(),
                   [&](std::size_t a, std::size_t b) { return saliency[a] > saliency[b]; });
  for (std::size_t i = 0; i < R; ++i) {
    const std::size_t w = by_saliency[i];
    const double total = static_cast<double>(table.corpus_freq[w]);
    tinfo.push_back({{"term", model.dictionary.id2word[w]},
                     {"category", "Default"},
                     {"freq", round12(total)},
                     {"total", round12(total)},
                     {"logprob", round12(std::log(table.marginal[w]))},
                     {"loglift", 0.0}});
  }
  for (std::size_t pos = 0; pos < K; ++pos) {
    const std::size_t k = prevalence.order[pos];
    const auto ranked = term_relevance(table, k, 1.0);
    for (std::size_t i = 0; i < R; ++i) {
      const std::size_t w = ranked[i];
      tinfo.push_back({{"term", model.dictionary.id2word[w]},
                       {"category", "Topic" + std::to_string(pos + 1)},
                       {"freq", round12(model.phi(k, w) * topic_tokens[k])},
                       {"total", round12(static_cast<double>(table.corpus_freq[w]))},
                       {"logprob", round12(table.logprob(k, w))},
                       {"loglift", round12(table.loglift(k, w))}});
    }
  }
  return {{"schema_version", kVisSchemaVersion},
          {"lambda_step", round12(lambda_step)},
          {"R", R},
          {"mds", mds},
          {"tinfo", tinfo}};
}

}  // namespace topicsum
