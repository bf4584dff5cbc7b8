#pragma once

// Latent Dirichlet allocation fitted by collapsed Gibbs sampling.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <json.hpp>
#include <map>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "topicsum/error.hpp"
#include "topicsum/fsutil.hpp"
#include "topicsum/linalg.hpp"

namespace topicsum {

struct Dictionary {
  std::vector<std::string> id2word;
  std::unordered_map<std::string, std::size_t> word2id;
  std::vector<std::size_t> doc_freq;     // documents containing the term, by id
  std::vector<std::size_t> corpus_freq;  // total occurrences, by id

  std::size_t size() const { return id2word.size(); }

  bool operator==(const Dictionary& o) const {
    return id2word == o.id2word && doc_freq == o.doc_freq && corpus_freq == o.corpus_freq;
  }
};

/// Keeps tokens found in at least `min_doc_freq` documents and in at most
/// `max_doc_fraction` of all documents. Ids follow first appearance.
inline Dictionary build_dictionary(const std::vector<std::vector<std::string>>& documents,
                                   std::size_t min_doc_freq = 1, double max_doc_fraction = 1.0) {
  require(!documents.empty(), "build_dictionary: at least one document is required");
  require(min_doc_freq >= 1, "build_dictionary: min_doc_freq must be >= 1");
  require(max_doc_fraction > 0.0 && max_doc_fraction <= 1.0,
          "build_dictionary: max_doc_fraction must be in (0, 1]");
  std::vector<std::string> order;
  std::unordered_map<std::string, std::pair<std::size_t, std::size_t>> stats;  // df, cf
  for (const auto& doc : documents) {
    std::unordered_map<std::string, bool> seen;
    for (const auto& tok : doc) {
      auto [it, inserted] = stats.try_emplace(tok, 0, 0);
      if (inserted) order.push_back(tok);
      ++it->second.second;
      if (seen.emplace(tok, true).second) ++it->second.first;
    }
  }
  const double max_docs = max_doc_fraction * static_cast<double>(documents.size());
  Dictionary dict;
  for (const auto& tok : order) {
    const auto [df, cf] = stats[tok];
    if (df < min_doc_freq || static_cast<double>(df) > max_docs + 1e-9) continue;
    dict.word2id.emplace(tok, dict.id2word.size());
    dict.id2word.push_back(tok);
    dict.doc_freq.push_back(df);
    dict.corpus_freq.push_back(cf);
  }
  if (dict.id2word.empty()) fail(ErrorKind::invalid_argument, "build_dictionary: empty vocabulary after filtering");
  return dict;
}

struct BowDocument {
  std::string doc_id;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (term id, count), ids ascending

  std::size_t length() const {
    std::size_t n = 0;
    for (const auto& p : pairs) n += p.second;
    return n;
  }
};

inline BowDocument to_bow(const std::vector<std::string>& tokens, const Dictionary& dict,
                          std::string doc_id = {}) {
  std::map<std::size_t, std::size_t> counts;
  for (const auto& tok : tokens)
    if (auto it = dict.word2id.find(tok); it != dict.word2id.end()) ++counts[it->second];
  BowDocument doc;
  doc.doc_id = std::move(doc_id);
  doc.pairs.assign(counts.begin(), counts.end());
  return doc;
}

struct LdaConfig {
  std::size_t K = 5;
  std::vector<double> alpha;  // per topic; empty means 50/K for every topic
  double beta = 0.01;
  std::size_t iterations = 1000;
  std::size_t burn_in = 100;
  std::uint64_t seed = 42;
  bool average_samples = false;  // average point estimates over post-burn-in sweeps

  std::vector<double> alpha_vector() const {
    if (alpha.empty()) return std::vector<double>(K, 50.0 / static_cast<double>(K));
    return alpha;
  }

  void validate() const {
    if (K < 1) fail(ErrorKind::invalid_argument, "lda: K must be >= 1");
    if (!alpha.empty() && alpha.size() != K)
      fail(ErrorKind::invalid_argument, "lda: alpha must have K entries");
    for (double a : alpha)
      if (!(a > 0.0)) fail(ErrorKind::invalid_argument, "lda: alpha entries must be positive");
    if (!(beta > 0.0)) fail(ErrorKind::invalid_argument, "lda: beta must be positive");
    if (iterations < 1 || iterations <= burn_in)
      fail(ErrorKind::invalid_argument, "lda: iterations must exceed burn_in");
  }

  bool operator==(const LdaConfig&) const = default;
};

struct LdaModelState {
  std::size_t K = 0, V = 0;
  std::vector<std::vector<std::uint32_t>> z;    // per document, per expanded token position
  std::vector<std::vector<std::uint32_t>> words;  // expanded term ids, parallel to z
  std::vector<std::uint32_t> n_kw;              // K x V
  std::vector<std::uint32_t> n_dk;              // D x K
  std::vector<std::uint32_t> n_k;               // K
  Matrix phi;                                   // K x V
  Matrix theta;                                 // D x K
  std::size_t sweeps = 0;

  std::size_t documents() const { return z.size(); }
  std::uint32_t kw(std::size_t k, std::size_t w) const { return n_kw[k * V + w]; }
  std::uint32_t dk(std::size_t d, std::size_t k) const { return n_dk[d * K + k]; }
};

/// True when the count tables agree with the assignments.
inline bool counts_consistent(const LdaModelState& s) {
  std::vector<std::uint32_t> kw(s.K * s.V, 0), dk(s.documents() * s.K, 0), k_tot(s.K, 0);
  for (std::size_t d = 0; d < s.documents(); ++d)
    for (std::size_t i = 0; i < s.z[d].size(); ++i) {
      ++kw[s.z[d][i] * s.V + s.words[d][i]];
      ++dk[d * s.K + s.z[d][i]];
      ++k_tot[s.z[d][i]];
    }
  if (kw != s.n_kw || dk != s.n_dk || k_tot != s.n_k) return false;
  for (std::size_t k = 0; k < s.K; ++k) {
    std::uint64_t row = 0;
    for (std::size_t w = 0; w < s.V; ++w) row += s.kw(k, w);
    if (row != s.n_k[k]) return false;
  }
  for (std::size_t d = 0; d < s.documents(); ++d) {
    std::uint64_t row = 0;
    for (std::size_t k = 0; k < s.K; ++k) row += s.dk(d, k);
    if (row != s.z[d].size()) return false;
  }
  return true;
}

namespace detail {

/// Uniform double in [0, 1) built from the top 53 bits of the engine output,
/// so the stream is identical on every standard library.
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline void estimate(LdaModelState& s, const std::vector<double>& alpha, double beta, Matrix& phi,
                     Matrix& theta) {
  const double vbeta = static_cast<double>(s.V) * beta;
  double alpha_sum = 0.0;
  for (double a : alpha) alpha_sum += a;
  phi = Matrix(s.K, s.V);
  for (std::size_t k = 0; k < s.K; ++k)
    for (std::size_t w = 0; w < s.V; ++w)
      phi(k, w) = (static_cast<double>(s.kw(k, w)) + beta) / (static_cast<double>(s.n_k[k]) + vbeta);
  theta = Matrix(s.documents(), s.K);
  for (std::size_t d = 0; d < s.documents(); ++d) {
    const double len = static_cast<double>(s.z[d].size());
    for (std::size_t k = 0; k < s.K; ++k)
      theta(d, k) = (static_cast<double>(s.dk(d, k)) + alpha[k]) / (len + alpha_sum);
  }
}

inline LdaModelState initialize(const std::vector<BowDocument>& corpus, std::size_t V,
                                const LdaConfig& config, std::mt19937_64& rng) {
  LdaModelState s;
  s.K = config.K;
  s.V = V;
  s.n_kw.assign(s.K * V, 0);
  s.n_dk.assign(corpus.size() * s.K, 0);
  s.n_k.assign(s.K, 0);
  s.z.resize(corpus.size());
  s.words.resize(corpus.size());
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    // canonical scan order: term ids ascending, each count expanded in place
    auto pairs = corpus[d].pairs;
    std::sort(pairs.begin(), pairs.end());
    for (const auto& [w, c] : pairs) {
      if (w >= V) fail(ErrorKind::invalid_argument, "lda: term id " + std::to_string(w) + " out of range");
      for (std::size_t r = 0; r < c; ++r) {
        const auto k = static_cast<std::uint32_t>(
            std::min<std::size_t>(s.K - 1, static_cast<std::size_t>(unit_uniform(rng) * static_cast<double>(s.K))));
        s.words[d].push_back(static_cast<std::uint32_t>(w));
        s.z[d].push_back(k);
        ++s.n_kw[k * V + w];
        ++s.n_dk[d * s.K + k];
        ++s.n_k[k];
      }
    }
  }
  return s;
}

}  // namespace detail

/// Model state after the random initial assignment, before any sweep.
inline LdaModelState lda_initial_state(const std::vector<BowDocument>& corpus, std::size_t V,
                                       const LdaConfig& config) {
  config.validate();
  if (corpus.empty()) fail(ErrorKind::invalid_argument, "lda: empty corpus");
  std::mt19937_64 rng(config.seed);
  auto s = detail::initialize(corpus, V, config, rng);
  detail::estimate(s, config.alpha_vector(), config.beta, s.phi, s.theta);
  return s;
}

using SweepHook = std::function<void(const LdaModelState&, std::size_t sweep)>;

/// Runs `config.iterations` full Gibbs sweeps. The conditional for a token is
/// p(z = k) proportional to (n_dk + alpha_k)(n_kw + beta)/(n_k + V beta) with
/// the token's own assignment removed. Bitwise deterministic per
/// (corpus, config).
inline LdaModelState fit_lda(const std::vector<BowDocument>& corpus, std::size_t V,
                             const LdaConfig& config, const SweepHook& on_sweep = {}) {
  config.validate();
  if (corpus.empty()) fail(ErrorKind::invalid_argument, "lda: empty corpus");
  if (V == 0) fail(ErrorKind::invalid_argument, "lda: empty vocabulary");
  std::mt19937_64 rng(config.seed);
  LdaModelState s = detail::initialize(corpus, V, config, rng);
  const auto alpha = config.alpha_vector();
  const double beta = config.beta;
  const double vbeta = static_cast<double>(V) * beta;
  const std::size_t K = s.K;
  std::vector<double> cumulative(K);

  Matrix phi_sum, theta_sum;
  std::size_t samples = 0;
  for (std::size_t sweep = 1; sweep <= config.iterations; ++sweep) {
    for (std::size_t d = 0; d < s.documents(); ++d) {
      auto& zd = s.z[d];
      const auto& wd = s.words[d];
      for (std::size_t i = 0; i < zd.size(); ++i) {
        const std::uint32_t w = wd[i];
        const std::uint32_t old = zd[i];
        --s.n_kw[old * V + w];
        --s.n_dk[d * K + old];
        --s.n_k[old];
        double total = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
          total += (static_cast<double>(s.n_dk[d * K + k]) + alpha[k]) *
                   (static_cast<double>(s.n_kw[k * V + w]) + beta) /
                   (static_cast<double>(s.n_k[k]) + vbeta);
          cumulative[k] = total;
        }
        const double u = detail::unit_uniform(rng) * total;
        std::uint32_t k_new = static_cast<std::uint32_t>(K - 1);
        for (std::size_t k = 0; k < K; ++k)
          if (u < cumulative[k]) {
            k_new = static_cast<std::uint32_t>(k);
            break;
          }
        zd[i] = k_new;
        ++s.n_kw[k_new * V + w];
        ++s.n_dk[d * K + k_new];
        ++s.n_k[k_new];
      }
    }
    s.sweeps = sweep;
    if (config.average_samples && sweep > config.burn_in) {
      Matrix phi, theta;
      detail::estimate(s, alpha, beta, phi, theta);
      if (samples == 0) {
        phi_sum = phi;
        theta_sum = theta;
      } else {
        for (std::size_t i = 0; i < phi.data().size(); ++i) phi_sum.data()[i] += phi.data()[i];
        for (std::size_t i = 0; i < theta.data().size(); ++i) theta_sum.data()[i] += theta.data()[i];
      }
      ++samples;
    }
    if (on_sweep) on_sweep(s, sweep);
  }
  if (config.average_samples && samples > 0) {
    for (auto& x : phi_sum.data()) x /= static_cast<double>(samples);
    for (auto& x : theta_sum.data()) x /= static_cast<double>(samples);
    s.phi = std::move(phi_sum);
    s.theta = std::move(theta_sum);
  } else {
    detail::estimate(s, alpha, beta, s.phi, s.theta);
  }
  return s;
}

inline LdaModelState fit_lda(const std::vector<BowDocument>& corpus, const Dictionary& dict,
                             const LdaConfig& config, const SweepHook& on_sweep = {}) {
  for (const auto& d : corpus)
    for (const auto& [id, _] : d.pairs)
      if (id >= dict.size()) fail(ErrorKind::invalid_argument, "lda: term id outside the dictionary");
  return fit_lda(corpus, dict.size(), config, on_sweep);
}

/// exp(-sum_d sum_w count * ln(sum_k theta[d,k] phi[k,w]) / total tokens).
inline double perplexity(const Matrix& phi, const Matrix& theta, const std::vector<BowDocument>& corpus) {
  require(theta.rows() == corpus.size(), "perplexity: theta rows must match corpus size");
  require(theta.cols() == phi.rows(), "perplexity: topic counts differ");
  double log_lik = 0.0;
  std::size_t tokens = 0;
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    for (const auto& [w, c] : corpus[d].pairs) {
      require(w < phi.cols(), "perplexity: term id out of range");
      double p = 0.0;
      for (std::size_t k = 0; k < phi.rows(); ++k) p += theta(d, k) * phi(k, w);
      log_lik += static_cast<double>(c) * std::log(p);
      tokens += c;
    }
  }
  if (tokens == 0) return 1.0;
  return std::exp(-log_lik / static_cast<double>(tokens));
}

inline double perplexity(const LdaModelState& s, const std::vector<BowDocument>& corpus) {
  return perplexity(s.phi, s.theta, corpus);
}

// ---------------------------------------------------------------------------
// Model file: 8-byte magic "TSLDAMDL", u32 format version, u64 header length,
// a UTF-8 JSON header, then phi (K x V) and theta (D x K) as row-major
// little-endian IEEE-754 doubles.
// ---------------------------------------------------------------------------

inline constexpr std::uint32_t kModelFormatVersion = 1;
inline constexpr char kModelMagic[8] = {'T', 'S', 'L', 'D', 'A', 'M', 'D', 'L'};

struct FittedModel {
  LdaConfig config;
  Dictionary dictionary;
  std::vector<std::string> doc_ids;
  std::vector<std::size_t> doc_lengths;
  Matrix phi;
  Matrix theta;

  bool operator==(const FittedModel&) const = default;
};

inline FittedModel make_fitted_model(const LdaConfig& config, const Dictionary& dict,
                                     const std::vector<BowDocument>& corpus, const LdaModelState& s) {
  FittedModel m{config, dict, {}, {}, s.phi, s.theta};
  for (const auto& d : corpus) {
    m.doc_ids.push_back(d.doc_id);
    m.doc_lengths.push_back(d.length());
  }
  return m;
}

namespace detail {

inline void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline std::uint64_t get_u64(std::string_view in, std::size_t pos) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  return v;
}

}  // namespace detail

inline std::string serialize_model(const FittedModel& m) {
  nlohmann::json header = {
      {"format", "topicsum-lda"},
      {"version", kModelFormatVersion},
      {"K", m.config.K},
      {"V", m.dictionary.size()},
      {"D", m.doc_ids.size()},
      {"config",
       {{"K", m.config.K},
        {"alpha", m.config.alpha},
        {"beta", m.config.beta},
        {"iterations", m.config.iterations},
        {"burn_in", m.config.burn_in},
        {"seed", m.config.seed},
        {"average_samples", m.config.average_samples}}},
      {"dictionary",
       {{"id2word", m.dictionary.id2word},
        {"doc_freq", m.dictionary.doc_freq},
        {"corpus_freq", m.dictionary.corpus_freq}}},
      {"doc_ids", m.doc_ids},
      {"doc_lengths", m.doc_lengths},
  };
  const std::string h = header.dump();
  std::string out(kModelMagic, 8);
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((kModelFormatVersion >> (8 * i)) & 0xFF));
  detail::put_u64(out, h.size());
  out += h;
  for (double x : m.phi.data()) detail::put_u64(out, std::bit_cast<std::uint64_t>(x));
  for (double x : m.theta.data()) detail::put_u64(out, std::bit_cast<std::uint64_t>(x));
  return out;
}

inline FittedModel deserialize_model(std::string_view bytes) {
  auto bad = [](const std::string& what) { fail(ErrorKind::format, "model file: " + what); };
  if (bytes.size() < 20 || bytes.substr(0, 8) != std::string_view(kModelMagic, 8)) bad("bad magic");
  std::uint32_t version = 0;
  for (int i = 0; i < 4; ++i) version |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[8 + i])) << (8 * i);
  if (version != kModelFormatVersion) bad("unsupported version " + std::to_string(version));
  const std::uint64_t hlen = detail::get_u64(bytes, 12);
  if (20 + hlen > bytes.size()) bad("truncated header");
  FittedModel m;
  std::size_t K = 0, V = 0, D = 0;
  try {
    const auto h = nlohmann::json::parse(bytes.substr(20, hlen));
    K = h.at("K").get<std::size_t>();
    V = h.at("V").get<std::size_t>();
    D = h.at("D").get<std::size_t>();
    const auto& c = h.at("config");
    m.config.K = c.at("K").get<std::size_t>();
    m.config.alpha = c.at("alpha").get<std::vector<double>>();
    m.config.beta = c.at("beta").get<double>();
    m.config.iterations = c.at("iterations").get<std::size_t>();
    m.config.burn_in = c.at("burn_in").get<std::size_t>();
    m.config.seed = c.at("seed").get<std::uint64_t>();
    m.config.average_samples = c.at("average_samples").get<bool>();
    const auto& d = h.at("dictionary");
    m.dictionary.id2word = d.at("id2word").get<std::vector<std::string>>();
    m.dictionary.doc_freq = d.at("doc_freq").get<std::vector<std::size_t>>();
    m.dictionary.corpus_freq = d.at("corpus_freq").get<std::vector<std::size_t>>();
    for (std::size_t i = 0; i < m.dictionary.id2word.size(); ++i)
      m.dictionary.word2id.emplace(m.dictionary.id2word[i], i);
    m.doc_ids = h.at("doc_ids").get<std::vector<std::string>>();
    m.doc_lengths = h.at("doc_lengths").get<std::vector<std::size_t>>();
  } catch (const nlohmann::json::exception& e) {
    bad(std::string("bad header: ") + e.what());
  }
  if (m.dictionary.size() != V || m.doc_ids.size() != D || m.doc_lengths.size() != D || m.config.K != K)
    bad("header dimensions disagree");
  const std::size_t expected = 20 + hlen + 8 * (K * V + D * K);
  if (bytes.size() != expected) bad("payload size mismatch");
  std::size_t pos = 20 + hlen;
  m.phi = Matrix(K, V);
  for (auto& x : m.phi.data()) {
    x = std::bit_cast<double>(detail::get_u64(bytes, pos));
    pos += 8;
  }
  m.theta = Matrix(D, K);
  for (auto& x : m.theta.data()) {
    x = std::bit_cast<double>(detail::get_u64(bytes, pos));
    pos += 8;
  }
  return m;
}

inline void save_model(const FittedModel& m, const fs::path& path) {
  write_file_atomic(path, serialize_model(m));
}

inline FittedModel load_model(const fs::path& path) { return deserialize_model(read_file(path)); }

}  // namespace topicsum
