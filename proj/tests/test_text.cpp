#include <gtest/gtest.h>

#include <algorithm>
#include <map>

#include "support.hpp"
#include "topicsum/text.hpp"

using namespace topicsum;

namespace {

std::vector<std::string> texts(const SentenceList& s) {
  std::vector<std::string> out;
  for (const auto& x : s) out.push_back(x.text);
  return out;
}

SentenceList from_tokens(const std::vector<std::vector<std::string>>& docs) {
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

}  // namespace

TEST(SplitSentences, Basic) {
  EXPECT_EQ(texts(split_sentences("A b. C d.")), (std::vector<std::string>{"A b.", "C d."}));
  EXPECT_TRUE(split_sentences("").empty());
  EXPECT_TRUE(split_sentences("   \n ").empty());
}

TEST(SplitSentences, AbbreviationGuard) {
  EXPECT_EQ(texts(split_sentences("Dr. Smith ran. He won.")),
            (std::vector<std::string>{"Dr. Smith ran.", "He won."}));
  EXPECT_EQ(split_sentences("J. R. Tolkien wrote it. Fine.").size(), 2u);
  EXPECT_EQ(split_sentences("Results (Fig. 2) differ. See e.g. Table 1.").size(), 2u);
}

TEST(SplitSentences, OtherTerminators) {
  EXPECT_EQ(texts(split_sentences("Really? Yes! Done.")),
            (std::vector<std::string>{"Really?", "Yes!", "Done."}));
  EXPECT_EQ(split_sentences("It rose (to 5%.) Then fell.").size(), 2u);
  EXPECT_EQ(split_sentences("Version 2.5 is out. next one is lowercase.").size(), 1u);
}

TEST(SplitSentences, ConcatenationReproducesInput) {
  const std::string in = "First  one.\nSecond\tone?  Third one!   Tail without stop";
  std::string joined;
  for (const auto& s : split_sentences(in)) joined += (joined.empty() ? "" : " ") + s.text;
  std::string collapsed;
  for (char c : in) {
    const bool space = std::isspace(static_cast<unsigned char>(c));
    if (space && (collapsed.empty() || collapsed.back() == ' ')) continue;
    collapsed.push_back(space ? ' ' : c);
  }
  EXPECT_EQ(joined, collapsed);
}

TEST(Tokenize, Examples) {
  EXPECT_EQ(tokenize("gene-disease link"), (std::vector<std::string>{"gene-disease", "link"}));
  EXPECT_TRUE(tokenize("").empty());
  EXPECT_EQ(tokenize("ABL1, FLT1."), (std::vector<std::string>{"ABL1", "FLT1"}));
  EXPECT_EQ(tokenize("-edge- a--b x-"), (std::vector<std::string>{"edge", "a", "b", "x"}));
  EXPECT_EQ(tokenize("caf\xC3\xA9 na\xC3\xAFve"), (std::vector<std::string>{"caf\xC3\xA9", "na\xC3\xAFve"}));
}

TEST(Tokenize, JoinIsIdempotent) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    auto toks = tokenize("x" + std::to_string(rng() % 100) + "-y, z" + std::to_string(trial) + ". w");
    std::string joined;
    for (const auto& t : toks) joined += (joined.empty() ? "" : " ") + t;
    EXPECT_EQ(tokenize(joined), toks);
  }
}

TEST(Segment, IndicesContiguousAndWordCounts) {
  const auto s = segment("One two. ... Three four five. !");
  ASSERT_EQ(s.size(), 2u);
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_EQ(s[i].index, i);
    EXPECT_EQ(s[i].word_count(), s[i].tokens.size());
    EXPECT_GT(s[i].word_count(), 0u);
  }
}

TEST(Stopwords, BuiltinList) {
  const auto s = StopwordSet::builtin();
  EXPECT_EQ(s.size(), 179u);
  EXPECT_EQ(s.source(), "builtin");
  EXPECT_TRUE(s.contains("the"));
  EXPECT_TRUE(s.contains("wouldn't"));
  EXPECT_FALSE(s.contains("gene"));
  for (const auto& w : s.words()) {
    EXPECT_EQ(w, utf8::to_lower(w));
    EXPECT_EQ(w.find(' '), std::string::npos);
  }
}

TEST(Stopwords, FileFormat) {
  const auto s = StopwordSet::parse("# comment\nThe\n  gene  # trailing\n\n", "inline");
  EXPECT_EQ(s.size(), 2u);
  EXPECT_TRUE(s.contains("the"));
  EXPECT_TRUE(s.contains("gene"));
  EXPECT_THROW(StopwordSet::parse("two words\n", "inline"), Error);
}

TEST(WordFrequencies, Examples) {
  const StopwordSet none;
  auto t = build_word_frequencies(from_tokens({{"a"}}), none);
  EXPECT_EQ(t.entries, (std::map<std::string, double>{{"a", 1.0}}));
  t = build_word_frequencies(from_tokens({{"a", "a", "b"}}), none);
  EXPECT_EQ(t.entries, (std::map<std::string, double>{{"a", 1.0}, {"b", 0.5}}));
  EXPECT_EQ(t.raw_counts.at("a"), 2u);
}

TEST(WordFrequencies, StopwordsAndCase) {
  const auto s = segment("The gene and the Gene. GENE disease.");
  auto t = build_word_frequencies(s, StopwordSet::builtin());
  EXPECT_EQ(t.entries, (std::map<std::string, double>{{"gene", 1.0}, {"disease", 1.0 / 3.0}}));
  t = build_word_frequencies(s, StopwordSet::builtin(), false);
  EXPECT_EQ(t.raw_counts.at("gene"), 1u);
  EXPECT_EQ(t.raw_counts.at("GENE"), 1u);
  EXPECT_EQ(t.raw_counts.count("The"), 0u);
}

TEST(WordFrequencies, AllFilteredGivesEmptyTable) {
  EXPECT_TRUE(build_word_frequencies(segment("The and of."), StopwordSet::builtin()).empty());
}

TEST(WordFrequencies, Properties) {
  std::mt19937_64 rng(5);
  const StopwordSet stop = StopwordSet::parse("w0\nw1\n", "test");
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::vector<std::string>> docs;
    const std::size_t n = 1 + rng() % 8;
    for (std::size_t i = 0; i < n; ++i) docs.push_back(support::random_tokens(rng, 12, 15));
    const auto table = build_word_frequencies(from_tokens(docs), stop);
    if (table.empty()) continue;
    // normalization
    double mx = 0;
    for (const auto& [w, f] : table.entries) {
      EXPECT_GT(f, 0.0);
      EXPECT_LE(f, 1.0);
      mx = std::max(mx, f);
      EXPECT_TRUE(table.raw_counts.count(w));
      EXPECT_FALSE(stop.contains(w));
    }
    EXPECT_EQ(mx, 1.0);
    EXPECT_EQ(table.entries.size(), table.raw_counts.size());
    // duplicating the corpus keeps the ratios
    auto doubled = docs;
    doubled.insert(doubled.end(), docs.begin(), docs.end());
    EXPECT_EQ(build_word_frequencies(from_tokens(doubled), stop).entries, table.entries);
    // sentence order does not matter
    auto shuffled = docs;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    EXPECT_EQ(build_word_frequencies(from_tokens(shuffled), stop).entries, table.entries);
  }
}
