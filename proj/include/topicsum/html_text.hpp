#pragma once

// Paragraph text extraction from HTML/XML and the character-level cleaner
// applied before anything is stored in a corpus.

#include <array>
#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "topicsum/unicode.hpp"

namespace topicsum {

struct ExtractedText {
  std::string text;
  std::size_t paragraph_count = 0;

  bool operator==(const ExtractedText&) const = default;
};

namespace detail {

inline char ascii_lower(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c + 32) : c;
}

inline bool ascii_alpha(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

inline bool ieq_prefix(std::string_view s, std::size_t pos, std::string_view word) {
  if (pos + word.size() > s.size()) return false;
  for (std::size_t i = 0; i < word.size(); ++i)
    if (ascii_lower(s[pos + i]) != word[i]) return false;
  return true;
}

inline constexpr std::array<std::pair<std::string_view, char32_t>, 40> kNamedEntities{{
    {"amp", U'&'},     {"lt", U'<'},       {"gt", U'>'},      {"quot", U'"'},
    {"apos", U'\''},   {"nbsp", 0xA0},     {"ndash", 0x2013}, {"mdash", 0x2014},
    {"lsquo", 0x2018}, {"rsquo", 0x2019},  {"ldquo", 0x201C}, {"rdquo", 0x201D},
    {"hellip", 0x2026}, {"middot", 0xB7},  {"bull", 0x2022},  {"deg", 0xB0},
    {"plusmn", 0xB1},  {"times", 0xD7},    {"divide", 0xF7},  {"micro", 0xB5},
    {"alpha", 0x3B1},  {"beta", 0x3B2},    {"gamma", 0x3B3},  {"delta", 0x3B4},
    {"kappa", 0x3BA},  {"lambda", 0x3BB},  {"mu", 0x3BC},     {"sigma", 0x3C3},
    {"copy", 0xA9},    {"reg", 0xAE},      {"trade", 0x2122}, {"le", 0x2264},
    {"ge", 0x2265},    {"minus", 0x2212},  {"thinsp", 0x2009}, {"ensp", 0x2002},
    {"emsp", 0x2003},  {"shy", 0xAD},      {"eacute", 0xE9},  {"uuml", 0xFC},
}};

/// Decodes the entity reference starting at s[pos] == '&'. On success,
/// appends the character and returns the number of bytes consumed; returns 0
/// when no entity is recognized.
inline std::size_t decode_entity(std::string_view s, std::size_t pos, std::string& out) {
  const std::size_t semi = s.find(';', pos + 1);
  if (semi == std::string_view::npos || semi - pos > 12 || semi == pos + 1) return 0;
  const std::string_view body = s.substr(pos + 1, semi - pos - 1);
  if (body[0] == '#') {
    char32_t cp = 0;
    bool hex = body.size() > 1 && (body[1] == 'x' || body[1] == 'X');
    std::size_t i = hex ? 2 : 1;
    if (i >= body.size()) return 0;
    for (; i < body.size(); ++i) {
      const char c = body[i];
      int d;
      if (c >= '0' && c <= '9') d = c - '0';
      else if (hex && c >= 'a' && c <= 'f') d = c - 'a' + 10;
      else if (hex && c >= 'A' && c <= 'F') d = c - 'A' + 10;
      else return 0;
      cp = cp * (hex ? 16 : 10) + static_cast<char32_t>(d);
      if (cp > 0x10FFFF) return 0;
    }
    if (cp == 0 || (cp >= 0xD800 && cp <= 0xDFFF)) cp = utf8::replacement;
    utf8::append(out, cp);
    return semi - pos + 1;
  }
  for (const auto& [name, cp] : kNamedEntities) {
    if (name == body) {
      utf8::append(out, cp);
      return semi - pos + 1;
    }
  }
  return 0;
}

/// Collapses whitespace runs to one ASCII space and trims both ends.
inline std::string normalize_space(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending = false;
  for (std::size_t pos = 0; pos < s.size();) {
    const char32_t cp = utf8::next(s, pos);
    if (utf8::is_space(cp)) {
      pending = !out.empty();
      continue;
    }
    if (pending) out.push_back(' ');
    pending = false;
    utf8::append(out, cp);
  }
  return out;
}

inline std::string decode_entities(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '&') {
      const std::size_t used = decode_entity(s, i, out);
      if (used) {
        i += used - 1;
        continue;
      }
    }
    out.push_back(s[i]);
  }
  return out;
}

// Elements whose start or end implicitly closes an open paragraph.
inline bool closes_paragraph(std::string_view tag) {
  static constexpr std::array<std::string_view, 36> kBlocks{
      "address", "article", "aside", "blockquote", "body", "caption", "dd",
      "details", "div", "dl", "dt", "fieldset", "figcaption", "figure", "footer",
      "form", "h1", "h2", "h3", "h4", "h5", "h6", "header", "hr", "html", "li",
      "main", "nav", "ol", "pre", "section", "table", "td", "th", "tr", "ul"};
  for (auto b : kBlocks)
    if (b == tag) return true;
  return false;
}

inline bool is_raw_text_element(std::string_view tag) {
  return tag == "script" || tag == "style" || tag == "noscript" || tag == "template" ||
         tag == "textarea" || tag == "title";
}

inline bool looks_like_markup(std::string_view s) {
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    if (s[i] != '<') continue;
    const char n = s[i + 1];
    if (ascii_alpha(n) || n == '/' || n == '!' || n == '?') return true;
  }
  return false;
}

}  // namespace detail

/// Concatenates the inner text of every <p> element in document order,
/// joined by single spaces. Script/style bodies are skipped, entities are
/// decoded, and whitespace is normalized. Input without any markup is taken
/// as one paragraph of plain text, which makes the function idempotent on its
/// own output.
inline ExtractedText extract_text(std::string_view raw_html) {
  const std::string input = utf8::sanitize(raw_html);
  const std::string_view s = input;

  ExtractedText result;
  if (!detail::looks_like_markup(s)) {
    result.text = detail::normalize_space(detail::decode_entities(s));
    result.paragraph_count = result.text.empty() ? 0 : 1;
    return result;
  }

  bool in_paragraph = false;
  std::string current;
  auto close_paragraph = [&] {
    if (!in_paragraph) return;
    in_paragraph = false;
    std::string para = detail::normalize_space(current);
    current.clear();
    if (para.empty()) return;
    if (!result.text.empty()) result.text.push_back(' ');
    result.text += para;
  };

  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (c == '<') {
      if (s.substr(i, 4) == "<!--") {
        const std::size_t end = s.find("-->", i + 4);
        i = end == std::string_view::npos ? s.size() : end + 3;
        continue;
      }
      if (detail::ieq_prefix(s, i, "<![cdata[")) {
        const std::size_t end = s.find("]]>", i + 9);
        const std::size_t stop = end == std::string_view::npos ? s.size() : end;
        if (in_paragraph) current.append(s.substr(i + 9, stop - i - 9));
        i = end == std::string_view::npos ? s.size() : end + 3;
        continue;
      }
      if (i + 1 < s.size() && (s[i + 1] == '!' || s[i + 1] == '?')) {
        const std::size_t end = s.find('>', i + 2);
        i = end == std::string_view::npos ? s.size() : end + 1;
        continue;
      }
      const bool closing = i + 1 < s.size() && s[i + 1] == '/';
      const std::size_t name_start = i + (closing ? 2 : 1);
      if (name_start < s.size() && detail::ascii_alpha(s[name_start])) {
        std::size_t j = name_start;
        std::string name;
        while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) ||
                                s[j] == '-' || s[j] == ':' || s[j] == '_'))
          name.push_back(detail::ascii_lower(s[j++]));
        // XML namespaces (e.g. jats:p) are treated by local name
        if (auto colon = name.rfind(':'); colon != std::string::npos) name = name.substr(colon + 1);
        // skip attributes, honouring quotes
        char quote = 0;
        bool self_closing = false;
        while (j < s.size()) {
          const char a = s[j];
          if (quote) {
            if (a == quote) quote = 0;
          } else if (a == '"' || a == '\'') {
            quote = a;
          } else if (a == '>') {
            self_closing = j > 0 && s[j - 1] == '/';
            break;
          }
          ++j;
        }
        i = j < s.size() ? j + 1 : s.size();

        if (!closing && detail::is_raw_text_element(name) && !self_closing) {
          const std::string end_tag = "</" + name;
          std::size_t k = i;
          while (k < s.size() && !detail::ieq_prefix(s, k, end_tag)) ++k;
          if (k >= s.size()) {
            i = s.size();
          } else {
            const std::size_t gt = s.find('>', k);
            i = gt == std::string_view::npos ? s.size() : gt + 1;
          }
          continue;
        }
        if (name == "p") {
          close_paragraph();
          if (!closing) {
            ++result.paragraph_count;
            in_paragraph = !self_closing;
          }
        } else if (detail::closes_paragraph(name)) {
          close_paragraph();
        } else if (in_paragraph && (name == "br" || name == "wbr")) {
          current.push_back(' ');
        }
        continue;
      }
      // a lone '<' is text
    }
    if (in_paragraph) {
      if (c == '&') {
        const std::size_t used = detail::decode_entity(s, i, current);
        if (used) {
          i += used;
          continue;
        }
      }
      current.push_back(c);
    }
    ++i;
  }
  close_paragraph();
  return result;
}

/// Removes bracketed numeric citation markers such as "[12]" or "[3, 5-7]",
/// drops every character outside letters, digits, space and ". , ; : ( ) - %",
/// collapses whitespace and trims.
inline std::string clean_text(std::string_view text) {
  const std::u32string in = utf8::decode(text);
  std::u32string stripped;
  stripped.reserve(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (in[i] == U'[') {
      std::size_t j = i + 1;
      bool has_digit = false;
      while (j < in.size() &&
             (utf8::is_digit(in[j]) || in[j] == U',' || in[j] == U' ' || in[j] == U'-' ||
              in[j] == 0x2013 || in[j] == 0x2014)) {
        has_digit = has_digit || utf8::is_digit(in[j]);
        ++j;
      }
      if (has_digit && j < in.size() && in[j] == U']') {
        // "word [1]." keeps no gap before the period
        if (j + 1 >= in.size() || !utf8::is_alnum(in[j + 1]))
          while (!stripped.empty() && utf8::is_space(stripped.back())) stripped.pop_back();
        i = j;
        continue;
      }
    }
    stripped.push_back(in[i]);
  }

  std::string out;
  out.reserve(text.size());
  bool pending = false;
  for (char32_t c : stripped) {
    if (utf8::is_space(c)) {
      pending = !out.empty();
      continue;
    }
    const bool keep = utf8::is_alnum(c) || c == U'.' || c == U',' || c == U';' ||
                      c == U':' || c == U'(' || c == U')' || c == U'-' || c == U'%';
    if (!keep) continue;
    if (pending) out.push_back(' ');
    pending = false;
    utf8::append(out, c);
  }
  return out;
}

}  // namespace topicsum
