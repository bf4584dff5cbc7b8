#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "topicsum/extractive.hpp"

using namespace topicsum;

namespace {

SentenceList to_sentences(const std::vector<std::vector<std::string>>& docs) {
  SentenceList out;
  for (const auto& toks : docs) {
    Sentence s;
    s.index = out.size();
    s.tokens = toks;
    for (const auto& t : toks) s.text += (s.text.empty() ? "" : " ") + t;
    out.push_back(s);
  }
  return out;
}

WordFrequencyTable table_of(std::map<std::string, double> entries) {
  WordFrequencyTable t;
  t.entries = std::move(entries);
  for (const auto& [w, _] : t.entries) t.raw_counts[w] = 1;
  return t;
}

SentenceScoreTable scores_of(std::map<std::size_t, double> s) {
  SentenceScoreTable t;
  t.scores = std::move(s);
  return t;
}

SimilarityMatrix matrix_of(std::size_t n, std::vector<double> v) {
  SimilarityMatrix m;
  m.dim = n;
  m.values = std::move(v);
  return m;
}

}  // namespace

TEST(ScoreSentences, Examples) {
  const auto freqs = table_of({{"a", 1.0}, {"b", 0.5}});
  auto t = score_sentences(to_sentences({{"a", "b", "a"}}), freqs);
  EXPECT_DOUBLE_EQ(t.scores.at(0), 2.5);
  t = score_sentences(to_sentences({{"the", "of"}, {"b"}}), freqs);
  EXPECT_EQ(t.scores.count(0), 0u);
  EXPECT_DOUBLE_EQ(t.scores.at(1), 0.5);
}

TEST(ScoreSentences, WordLimitIsStrict) {
  const auto freqs = table_of({{"a", 1.0}});
  const auto t = score_sentences(to_sentences({std::vector<std::string>(29, "a"),
                                               std::vector<std::string>(30, "a")}),
                                 freqs);
  EXPECT_DOUBLE_EQ(t.scores.at(0), 29.0);
  EXPECT_EQ(t.scores.count(1), 0u);
  EXPECT_THROW(score_sentences({}, freqs, 0), Error);
}

TEST(ScoreSentences, MatchesBruteForceOnRandomDocuments) {
  std::mt19937_64 rng(2024);
  const std::set<std::string> stop = {"the", "and", "of", "a", "is"};
  const auto stopwords = StopwordSet::parse("the\nand\nof\na\nis\n", "test");
  for (int trial = 0; trial < 500; ++trial) {
    const auto doc = oracle::mini_document(rng);
    const auto sentences = to_sentences(doc);
    const auto freqs = build_word_frequencies(sentences, stopwords);
    const auto expected_table = oracle::frequency_table(doc, stop);
    ASSERT_EQ(freqs.entries.size(), expected_table.size());
    for (const auto& [w, f] : expected_table) EXPECT_NEAR(freqs.entries.at(w), f, 1e-12);

    const auto scores = score_sentences(sentences, freqs);
    const auto expected = oracle::sentence_scores(doc, expected_table, 30);
    ASSERT_EQ(scores.scores.size(), expected.size());
    for (const auto& [i, s] : expected) EXPECT_NEAR(scores.scores.at(i), s, 1e-12);

    const std::size_t n = 1 + rng() % 6;
    EXPECT_EQ(select_top_n(scores, sentences, n).selected, oracle::top_n(scores.scores, n));
  }
}

TEST(SelectTopN, Examples) {
  const auto sentences = to_sentences({{"x"}, {"y"}, {"z"}});
  const auto scores = scores_of({{0, 2.5}, {1, 1.0}, {2, 3.0}});
  auto s = select_top_n(scores, sentences, 2);
  EXPECT_EQ(s.selected, (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(s.text, "x z");
  EXPECT_FALSE(s.short_result);
  s = select_top_n(scores, sentences, 5);
  EXPECT_EQ(s.selected, (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_TRUE(s.short_result);
  EXPECT_EQ(select_top_n(scores, sentences, 1).selected, (std::vector<std::size_t>{2}));
  EXPECT_THROW(select_top_n(scores, sentences, 0), Error);
}

TEST(SelectTopN, TiesGoToLowerIndex) {
  const auto sentences = to_sentences({{"a"}, {"b"}, {"c"}, {"d"}});
  const auto s = select_top_n(scores_of({{0, 1.0}, {1, 2.0}, {2, 1.0}, {3, 2.0}}), sentences, 3);
  EXPECT_EQ(s.selected, (std::vector<std::size_t>{0, 1, 3}));
}

TEST(SelectTopN, MatchesSortOracleOnLargeTables) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t size = 1 + rng() % 1000;
    std::map<std::size_t, double> raw;
    for (std::size_t i = 0; i < size; ++i) raw[i] = static_cast<double>(rng() % 50) / 7.0;
    const std::size_t n = 1 + rng() % size;
    std::vector<std::vector<std::string>> docs(size, {"t"});
    EXPECT_EQ(select_top_n(scores_of(raw), to_sentences(docs), n).selected, oracle::top_n(raw, n));
  }
}

TEST(SelectTopN, RaisingOneScoreKeepsOthersThatOutrankIt) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    std::map<std::size_t, double> raw;
    const std::size_t size = 2 + rng() % 30;
    for (std::size_t i = 0; i < size; ++i) raw[i] = static_cast<double>(rng() % 1000);
    const std::size_t n = 1 + rng() % size;
    const std::vector<std::vector<std::string>> docs(size, {"t"});
    const auto before = select_top_n(scores_of(raw), to_sentences(docs), n).selected;
    const std::size_t bumped = rng() % size;
    raw[bumped] += 1 + static_cast<double>(rng() % 500);
    const auto after = select_top_n(scores_of(raw), to_sentences(docs), n).selected;
    // every other member survives, except one that the bumped entry displaced
    std::size_t lost = 0;
    for (std::size_t i : before)
      if (i != bumped && !std::count(after.begin(), after.end(), i)) ++lost;
    EXPECT_LE(lost, 1u);
    if (lost) {
      EXPECT_TRUE(std::count(after.begin(), after.end(), bumped));
    }
  }
}

TEST(SentenceVectors, Examples) {
  const std::vector<std::string> vocab = {"a", "b"};
  const auto v = sentence_vectors(to_sentences({{"a", "a", "b"}, {"c"}, {"b"}}), vocab);
  EXPECT_DOUBLE_EQ(v[0][0], 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(v[0][1], 1.0 / 3.0);
  EXPECT_EQ(v[1], (Vector{0.0, 0.0}));
  EXPECT_EQ(v[2], (Vector{0.0, 1.0}));
  EXPECT_THROW(sentence_vectors({}, {}), Error);
}

TEST(SentenceVectors, Embeddings) {
  const EmbeddingTable emb = {{"a", {1.0, 0.0}}, {"b", {0.0, 2.0}}};
  const auto v = sentence_vectors(to_sentences({{"A", "b", "zz"}, {"zz"}}), {}, &emb);
  EXPECT_EQ(v[0], (Vector{0.5, 1.0}));
  EXPECT_EQ(v[1], (Vector{0.0, 0.0}));
}

TEST(Similarity, Examples) {
  auto m = similarity_matrix({{2.0 / 3.0, 1.0 / 3.0}, {0.0, 1.0}, {1.0, 0.0}, {0.0, 0.0}});
  EXPECT_NEAR(m(0, 1), 1.0 / std::sqrt(5.0), 1e-15);
  EXPECT_DOUBLE_EQ(m(1, 2), 0.0);
  EXPECT_DOUBLE_EQ(m(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(m(3, 3), 0.0);
  EXPECT_DOUBLE_EQ(m(3, 0), 0.0);
  EXPECT_THROW(similarity_matrix({{1.0}, {1.0, 2.0}}), Error);
}

TEST(Similarity, SymmetricAndInRange) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng() % 6, d = 1 + rng() % 5;
    std::vector<Vector> vs(n, Vector(d));
    for (auto& v : vs)
      for (auto& x : v) x = rng() % 3 == 0 ? 0.0 : u(rng);
    const auto m = similarity_matrix(vs);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        EXPECT_NEAR(m(i, j), m(j, i), 1e-12);
        EXPECT_GE(m(i, j), 0.0);
        EXPECT_LE(m(i, j), 1.0);
      }
  }
}

TEST(Centrality, NoEdgesIsUniform) {
  const auto r = rank_by_centrality(matrix_of(3, {1, 0, 0, 0, 1, 0, 0, 0, 1}));
  EXPECT_TRUE(r.degenerate);
  for (double s : r.scores) EXPECT_DOUBLE_EQ(s, 1.0 / 3.0);
}

TEST(Centrality, SymmetricPairSplitsEvenly) {
  const auto r = rank_by_centrality(matrix_of(2, {1, 0.4, 0.4, 1}));
  EXPECT_NEAR(r.scores[0], 0.5, 1e-12);
  EXPECT_NEAR(r.scores[1], 0.5, 1e-12);
}

TEST(Centrality, ChainMiddleIsHighestAndMatchesPowerIteration) {
  const auto m = matrix_of(3, {1, 1, 0, 1, 1, 1, 0, 1, 1});
  const auto r = rank_by_centrality(m, 0.85, 1e-12, 1000);
  ASSERT_TRUE(r.converged);
  EXPECT_GT(r.scores[1], r.scores[0]);
  EXPECT_GT(r.scores[1], r.scores[2]);
  EXPECT_EQ(r.ranking[0].first, 1u);
  // transition rows: 0 -> 1, 1 -> {0, 2} halves, 2 -> 1
  std::vector<double> x(3, 1.0 / 3.0);
  for (int it = 0; it < 2000; ++it) {
    const std::vector<double> in = {x[1] / 2, x[0] + x[2], x[1] / 2};
    for (int j = 0; j < 3; ++j) x[j] = 0.15 / 3 + 0.85 * in[j];
  }
  for (int j = 0; j < 3; ++j) EXPECT_NEAR(r.scores[j], x[j], 1e-9);
}

TEST(Centrality, ScaleInvariantAndSumsToOne) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng() % 7;
    std::vector<double> v(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) v[i * n + j] = v[j * n + i] = i == j ? 1.0 : u(rng);
    const auto a = rank_by_centrality(matrix_of(n, v));
    for (auto& x : v) x *= 3.7;
    const auto b = rank_by_centrality(matrix_of(n, v));
    double total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_NEAR(a.scores[i], b.scores[i], 1e-12);
      total += a.scores[i];
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(Centrality, InvalidParameters) {
  const auto m = matrix_of(2, {1, 1, 1, 1});
  EXPECT_THROW(rank_by_centrality(m, 1.0), Error);
  EXPECT_THROW(rank_by_centrality(m, 0.85, 0.0), Error);
  EXPECT_THROW(rank_by_centrality(matrix_of(2, {1, 1, 1})), Error);
}

TEST(SelectByCentrality, PicksTheHubSentence) {
  const auto sentences = to_sentences({{"gene", "x"}, {"gene", "disease"}, {"disease", "y"}, {"q"}});
  const auto s = select_by_centrality(sentences, 1);
  EXPECT_EQ(s.selected, (std::vector<std::size_t>{1}));
  EXPECT_EQ(s.method, SummaryMethod::centrality);
}
