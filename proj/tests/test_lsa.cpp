#include <gtest/gtest.h>

#include <algorithm>

#include "dense_oracle.hpp"
#include "topicsum/lsa.hpp"

using namespace topicsum;

namespace {

SentenceList sentences_of(const std::vector<std::string>& texts) {
  SentenceList out;
  for (const auto& t : texts) {
    Sentence s;
    s.index = out.size();
    s.text = t;
    s.tokens = tokenize(t);
    out.push_back(s);
  }
  return out;
}

const StopwordSet kNoStopwords;

}  // namespace

TEST(TermSentenceMatrix, TfCounts) {
  const auto m = build_term_sentence_matrix(sentences_of({"a b", "a"}), kNoStopwords);
  EXPECT_EQ(m.terms, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(m.values.row(0), (std::vector<double>{1, 1}));
  EXPECT_EQ(m.values.row(1), (std::vector<double>{1, 0}));
}

TEST(TermSentenceMatrix, TfIdf) {
  const auto m = build_term_sentence_matrix(sentences_of({"a", "b"}), kNoStopwords, TermWeighting::tfidf);
  EXPECT_DOUBLE_EQ(m.values(0, 0), std::log(2.0));
  EXPECT_DOUBLE_EQ(m.values(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(m.values(1, 1), std::log(2.0));
  // a term present everywhere gets zero weight and its row is dropped
  const auto m2 = build_term_sentence_matrix(sentences_of({"a b", "a c"}), kNoStopwords, TermWeighting::tfidf);
  EXPECT_EQ(m2.terms, (std::vector<std::string>{"b", "c"}));
}

TEST(TermSentenceMatrix, Errors) {
  try {
    build_term_sentence_matrix(sentences_of({"a b"}), kNoStopwords, TermWeighting::tfidf);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("empty matrix"), std::string::npos);
  }
  EXPECT_THROW(build_term_sentence_matrix(sentences_of({"the of"}), StopwordSet::builtin()), Error);
  EXPECT_THROW(build_term_sentence_matrix({}, kNoStopwords), Error);
}

TEST(TruncatedSvd, RandomSixByFiveAgainstOracle) {
  std::mt19937_64 rng(6);
  const Eigen::MatrixXd a = oracle::random_matrix(rng, 6, 5).cwiseAbs();
  TermSentenceMatrix m;
  m.values = Matrix(6, 5);
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 5; ++c) m.values(r, c) = a(r, c);
  const auto f = truncated_svd(m, 3);
  const auto s = oracle::singular_values(a);
  for (int j = 0; j < 3; ++j) EXPECT_NEAR(f.s[j], s(j), 1e-6 * s(j));
  EXPECT_THROW(truncated_svd(m, 6), Error);
}

TEST(SelectLsa, BlockDiagonalPicksOnePerBlock) {
  const auto sentences = sentences_of({"a a a", "a a", "b b b", "b b"});
  const auto s = lsa_summarize(sentences, kNoStopwords, 2);
  ASSERT_EQ(s.selected.size(), 2u);
  EXPECT_LT(s.selected[0], 2u);
  EXPECT_GE(s.selected[1], 2u);
  // the longest sentence of each block carries the largest loading
  EXPECT_EQ(s.selected, (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(s.method, SummaryMethod::lsa);
}

TEST(SelectLsa, BlockFixtureMatchesDenseOracle) {
  const auto sentences = sentences_of({"a a a", "a a", "b b b", "b b"});
  const auto m = build_term_sentence_matrix(sentences, kNoStopwords);
  Eigen::MatrixXd a(m.values.rows(), m.values.cols());
  for (std::size_t r = 0; r < m.values.rows(); ++r)
    for (std::size_t c = 0; c < m.values.cols(); ++c) a(r, c) = m.values(r, c);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinV);
  std::vector<std::size_t> expected;
  for (int j = 0; j < 2; ++j) {
    Eigen::Index arg;
    svd.matrixV().col(j).cwiseAbs().maxCoeff(&arg);
    expected.push_back(static_cast<std::size_t>(arg));
  }
  std::sort(expected.begin(), expected.end());
  EXPECT_EQ(lsa_summarize(sentences, kNoStopwords, 2).selected, expected);
}

TEST(SelectLsa, SaturationAndShortFlag) {
  const auto sentences = sentences_of({"gene one", "gene two", "disease three"});
  auto s = lsa_summarize(sentences, kNoStopwords, 3);
  EXPECT_EQ(s.selected, (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_FALSE(s.short_result);
  s = lsa_summarize(sentences, kNoStopwords, 5);
  EXPECT_EQ(s.selected.size(), 3u);
  EXPECT_TRUE(s.short_result);
  EXPECT_THROW(lsa_summarize(sentences, kNoStopwords, 0), Error);
}

TEST(SelectLsa, DominantColumnArgmax) {
  SvdFactors f;
  f.s = {2.0};
  f.v = Matrix(3, 1);
  f.v(0, 0) = 0.1;
  f.v(1, 0) = -0.9;
  f.v(2, 0) = 0.4;
  const auto s = select_sentences_lsa(f, sentences_of({"x", "y", "z"}), 1);
  EXPECT_EQ(s.selected, (std::vector<std::size_t>{1}));
}

TEST(SelectLsa, ExactlyNSentencesWhenConceptsRunOut) {
  // rank 2 matrix, 4 requested out of 6
  const auto sentences = sentences_of({"a a", "a", "b", "b b", "a b", "a a b"});
  const auto s = lsa_summarize(sentences, kNoStopwords, 4);
  EXPECT_EQ(s.selected.size(), 4u);
  EXPECT_TRUE(std::is_sorted(s.selected.begin(), s.selected.end()));
}

TEST(SelectLsa, DeterministicAndPermutationEquivariant) {
  const std::vector<std::string> texts = {"gene expression rises", "disease risk falls",
                                          "gene disease link", "protein folding study",
                                          "expression of protein", "risk factors"};
  const auto a = lsa_summarize(sentences_of(texts), kNoStopwords, 3);
  EXPECT_EQ(lsa_summarize(sentences_of(texts), kNoStopwords, 3).selected, a.selected);

  const std::vector<std::size_t> perm = {3, 0, 5, 1, 4, 2};
  std::vector<std::string> shuffled;
  for (std::size_t p : perm) shuffled.push_back(texts[p]);
  const auto b = lsa_summarize(sentences_of(shuffled), kNoStopwords, 3);
  std::vector<std::string> picked_a, picked_b;
  for (std::size_t i : a.selected) picked_a.push_back(texts[i]);
  for (std::size_t i : b.selected) picked_b.push_back(shuffled[i]);
  std::sort(picked_a.begin(), picked_a.end());
  std::sort(picked_b.begin(), picked_b.end());
  EXPECT_EQ(picked_a, picked_b);
}
