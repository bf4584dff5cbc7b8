#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "topicsum/error.hpp"
#include "topicsum/fsutil.hpp"
#include "topicsum/html_text.hpp"
#include "topicsum/unicode.hpp"

namespace topicsum {

struct Sentence {
  std::size_t index = 0;
  std::string text;
  std::vector<std::string> tokens;

  std::size_t word_count() const { return tokens.size(); }
};

using SentenceList = std::vector<Sentence>;

class StopwordSet {
 public:
  StopwordSet() = default;

  /// The conventional 179-word English list.
  static StopwordSet builtin() {
    static const char* const kWords[] = {
        "i", "me", "my", "myself", "we", "our", "ours", "ourselves", "you", "you're",
        "you've", "you'll", "you'd", "your", "yours", "yourself", "yourselves", "he", "him",
        "his", "himself", "she", "she's", "her", "hers", "herself", "it", "it's", "its",
        "itself", "they", "them", "their", "theirs", "themselves", "what", "which", "who",
        "whom", "this", "that", "that'll", "these", "those", "am", "is", "are", "was", "were",
        "be", "been", "being", "have", "has", "had", "having", "do", "does", "did", "doing",
        "a", "an", "the", "and", "but", "if", "or", "because", "as", "until", "while", "of",
        "at", "by", "for", "with", "about", "against", "between", "into", "through", "during",
        "before", "after", "above", "below", "to", "from", "up", "down", "in", "out", "on",
        "off", "over", "under", "again", "further", "then", "once", "here", "there", "when",
        "where", "why", "how", "all", "any", "both", "each", "few", "more", "most", "other",
        "some", "such", "no", "nor", "not", "only", "own", "same", "so", "than", "too", "very",
        "s", "t", "can", "will", "just", "don", "don't", "should", "should've", "now", "d",
        "ll", "m", "o", "re", "ve", "y", "ain", "aren", "aren't", "couldn", "couldn't",
        "didn", "didn't", "doesn", "doesn't", "hadn", "hadn't", "hasn", "hasn't", "haven",
        "haven't", "isn", "isn't", "ma", "mightn", "mightn't", "mustn", "mustn't", "needn",
        "needn't", "shan", "shan't", "shouldn", "shouldn't", "wasn", "wasn't", "weren",
        "weren't", "won", "won't", "wouldn", "wouldn't"};
    StopwordSet s;
    s.source_ = "builtin";
    for (const char* w : kWords) s.words_.insert(w);
    return s;
  }

  /// One word per line, '#' starts a comment.
  static StopwordSet parse(std::string_view content, std::string source) {
    StopwordSet s;
    s.source_ = std::move(source);
    std::size_t start = 0;
    while (start <= content.size()) {
      std::size_t end = content.find('\n', start);
      if (end == std::string_view::npos) end = content.size();
      std::string_view line = content.substr(start, end - start);
      if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      const std::string word = utf8::to_lower(detail::normalize_space(line));
      if (!word.empty()) {
        if (word.find(' ') != std::string::npos)
          fail(ErrorKind::format, s.source_ + ": stopword line contains whitespace: '" + word + "'");
        s.words_.insert(word);
      }
      start = end + 1;
    }
    return s;
  }

  static StopwordSet load(const std::filesystem::path& path) {
    return parse(read_file(path), path.string());
  }

  bool contains(std::string_view lowercase_word) const {
    return words_.find(std::string(lowercase_word)) != words_.end();
  }

  std::size_t size() const { return words_.size(); }
  const std::string& source() const { return source_; }
  const std::set<std::string>& words() const { return words_; }

 private:
  std::set<std::string> words_;
  std::string source_ = "empty";
};

namespace detail {

inline bool is_abbreviation(std::u32string_view word) {
  // single-letter initials ("J.") and common title/reference abbreviations
  if (word.size() == 1 && utf8::is_upper(word[0])) return true;
  static const std::set<std::u32string> kAbbrev = {
      U"dr", U"mr", U"mrs", U"ms", U"prof", U"sr", U"jr", U"st", U"vs", U"etc", U"fig", U"figs",
      U"al", U"eq", U"eqs", U"vol", U"approx", U"ca", U"cf", U"e.g", U"i.e", U"inc",
      U"ltd", U"co", U"dept", U"univ", U"ref", U"refs"};
  std::u32string lower;
  for (char32_t c : word) lower.push_back(utf8::to_lower(c));
  return kAbbrev.count(lower) > 0;
}

inline bool is_closing_punct(char32_t c) {
  return c == U'"' || c == U'\'' || c == U')' || c == U']' || c == 0x201D || c == 0x2019;
}

}  // namespace detail

/// Splits at '.', '!' or '?' when followed by whitespace and an uppercase
/// letter, or by the end of the text. A period ending a single-letter
/// initial or a known abbreviation ("Dr.", "Fig.") does not split. Indices are
/// assigned in order; tokens are left empty.
inline SentenceList split_sentences(std::string_view text) {
  const std::u32string s = utf8::decode(text);
  SentenceList out;
  std::size_t start = 0;
  auto emit = [&](std::size_t end) {
    std::string piece = detail::normalize_space(utf8::encode(s.substr(start, end - start)));
    if (!piece.empty()) out.push_back({out.size(), std::move(piece), {}});
    start = end;
  };

  for (std::size_t i = 0; i < s.size(); ++i) {
    const char32_t c = s[i];
    if (c != U'.' && c != U'!' && c != U'?') continue;
    std::size_t end = i + 1;
    while (end < s.size() && (s[end] == U'.' || s[end] == U'!' || s[end] == U'?' ||
                              detail::is_closing_punct(s[end])))
      ++end;
    std::size_t next = end;
    while (next < s.size() && utf8::is_space(s[next])) ++next;
    bool boundary = false;
    if (next == s.size()) {
      boundary = true;
    } else if (next > end && utf8::is_upper(s[next])) {
      boundary = true;
      if (c == U'.') {
        std::size_t w = i;
        while (w > start && !utf8::is_space(s[w - 1]) && s[w - 1] != U'(') --w;
        if (detail::is_abbreviation(std::u32string_view(s).substr(w, i - w))) boundary = false;
      }
    }
    if (boundary) {
      emit(end);
      i = end - 1;
    }
  }
  if (start < s.size()) emit(s.size());
  return out;
}

/// Maximal runs of letters/digits; a hyphen joins two alphanumeric runs.
/// Case is preserved.
inline std::vector<std::string> tokenize(std::string_view text) {
  const std::u32string s = utf8::decode(text);
  std::vector<std::string> tokens;
  std::u32string cur;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char32_t c = s[i];
    if (utf8::is_alnum(c)) {
      cur.push_back(c);
    } else if (c == U'-' && !cur.empty() && i + 1 < s.size() && utf8::is_alnum(s[i + 1])) {
      cur.push_back(c);
    } else if (!cur.empty()) {
      tokens.push_back(utf8::encode(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(utf8::encode(cur));
  return tokens;
}

/// Sentence split plus tokenization. Sentences without any token are dropped
/// and the remaining indices renumbered from 0.
inline SentenceList segment(std::string_view text) {
  SentenceList out;
  for (auto& s : split_sentences(text)) {
    s.tokens = tokenize(s.text);
    if (s.tokens.empty()) continue;
    s.index = out.size();
    out.push_back(std::move(s));
  }
  return out;
}

/// Token -> frequency normalized by the largest raw count, so the most
/// frequent token maps to exactly 1.
struct WordFrequencyTable {
  std::map<std::string, double> entries;
  std::map<std::string, std::size_t> raw_counts;
  bool lowercase = true;

  bool empty() const { return entries.empty(); }

  /// Applies the table's case convention to a token.
  std::string key(std::string_view token) const {
    return lowercase ? utf8::to_lower(token) : std::string(token);
  }

  const double* find(std::string_view token) const {
    auto it = entries.find(key(token));
    return it == entries.end() ? nullptr : &it->second;
  }
};

inline WordFrequencyTable build_word_frequencies(const SentenceList& sentences,
                                                 const StopwordSet& stopwords, bool lowercase = true) {
  WordFrequencyTable table;
  table.lowercase = lowercase;
  for (const auto& s : sentences) {
    for (const auto& tok : s.tokens) {
      const std::string lower = utf8::to_lower(tok);
      if (stopwords.contains(lower)) continue;
      ++table.raw_counts[lowercase ? lower : tok];
    }
  }
  std::size_t max_count = 0;
  for (const auto& [_, n] : table.raw_counts) max_count = std::max(max_count, n);
  for (const auto& [w, n] : table.raw_counts)
    table.entries[w] = static_cast<double>(n) / static_cast<double>(max_count);
  return table;
}

}  // namespace topicsum
