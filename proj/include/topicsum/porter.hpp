#pragma once

// Porter (1980) suffix-stripping stemmer, following the published rules.
// Operates on lowercase ASCII words; anything else is returned unchanged.

#include <string>
#include <string_view>

namespace topicsum {

class PorterStemmer {
 public:
  std::string operator()(std::string_view word) const {
    for (char c : word)
      if (c < 'a' || c > 'z') return std::string(word);
    if (word.size() <= 2) return std::string(word);
    State s{std::string(word), static_cast<int>(word.size()) - 1, 0};
    step1ab(s);
    if (s.k > 0) {
      step1c(s);
      step2(s);
      step3(s);
      step4(s);
      step5(s);
    }
    return s.b.substr(0, static_cast<std::size_t>(s.k + 1));
  }

 private:
  struct State {
    std::string b;
    int k;  // end of the current word (inclusive)
    int j;  // end of the stem once a suffix matched
  };

  static bool cons(const State& s, int i) {
    switch (s.b[i]) {
      case 'a': case 'e': case 'i': case 'o': case 'u': return false;
      case 'y': return i == 0 ? true : !cons(s, i - 1);
      default: return true;
    }
  }

  // number of VC sequences in b[0..j]
  static int measure(const State& s) {
    int n = 0;
    int i = 0;
    for (;;) {
      if (i > s.j) return n;
      if (!cons(s, i)) break;
      ++i;
    }
    ++i;
    for (;;) {
      for (;;) {
        if (i > s.j) return n;
        if (cons(s, i)) break;
        ++i;
      }
      ++i;
      ++n;
      for (;;) {
        if (i > s.j) return n;
        if (!cons(s, i)) break;
        ++i;
      }
      ++i;
    }
  }

  static bool vowel_in_stem(const State& s) {
    for (int i = 0; i <= s.j; ++i)
      if (!cons(s, i)) return true;
    return false;
  }

  static bool double_cons(const State& s, int i) {
    return i >= 1 && s.b[i] == s.b[i - 1] && cons(s, i);
  }

  static bool cvc(const State& s, int i) {
    if (i < 2 || !cons(s, i) || cons(s, i - 1) || !cons(s, i - 2)) return false;
    const char ch = s.b[i];
    return ch != 'w' && ch != 'x' && ch != 'y';
  }

  static bool ends(State& s, std::string_view suffix) {
    const int len = static_cast<int>(suffix.size());
    if (len > s.k + 1) return false;
    if (std::string_view(s.b).substr(static_cast<std::size_t>(s.k - len + 1), suffix.size()) != suffix)
      return false;
    s.j = s.k - len;
    return true;
  }

  static void set_to(State& s, std::string_view repl) {
    s.b.replace(static_cast<std::size_t>(s.j + 1), std::string::npos, repl);
    s.k = s.j + static_cast<int>(repl.size());
  }

  static void replace_if_measured(State& s, std::string_view repl) {
    if (measure(s) > 0) set_to(s, repl);
  }

  static void step1ab(State& s) {
    if (s.b[s.k] == 's') {
      if (ends(s, "sses")) s.k -= 2;
      else if (ends(s, "ies")) set_to(s, "i");
      else if (s.k >= 1 && s.b[s.k - 1] != 's') --s.k;
    }
    if (ends(s, "eed")) {
      if (measure(s) > 0) --s.k;
    } else if ((ends(s, "ed") || ends(s, "ing")) && vowel_in_stem(s)) {
      s.k = s.j;
      s.b.resize(static_cast<std::size_t>(s.k + 1));
      if (ends(s, "at")) set_to(s, "ate");
      else if (ends(s, "bl")) set_to(s, "ble");
      else if (ends(s, "iz")) set_to(s, "ize");
      else if (double_cons(s, s.k)) {
        const char ch = s.b[s.k];
        if (ch != 'l' && ch != 's' && ch != 'z') --s.k;
      } else {
        s.j = s.k;
        if (measure(s) == 1 && cvc(s, s.k)) set_to(s, "e");
      }
    }
    s.b.resize(static_cast<std::size_t>(s.k + 1));
  }

  static void step1c(State& s) {
    if (ends(s, "y") && vowel_in_stem(s)) s.b[s.k] = 'i';
  }

  static void step2(State& s) {
    if (s.k < 1) return;
    switch (s.b[s.k - 1]) {
      case 'a':
        if (ends(s, "ational")) { replace_if_measured(s, "ate"); break; }
        if (ends(s, "tional")) { replace_if_measured(s, "tion"); break; }
        break;
      case 'c':
        if (ends(s, "enci")) { replace_if_measured(s, "ence"); break; }
        if (ends(s, "anci")) { replace_if_measured(s, "ance"); break; }
        break;
      case 'e':
        if (ends(s, "izer")) { replace_if_measured(s, "ize"); break; }
        break;
      case 'l':
        if (ends(s, "abli")) { replace_if_measured(s, "able"); break; }
        if (ends(s, "alli")) { replace_if_measured(s, "al"); break; }
        if (ends(s, "entli")) { replace_if_measured(s, "ent"); break; }
        if (ends(s, "eli")) { replace_if_measured(s, "e"); break; }
        if (ends(s, "ousli")) { replace_if_measured(s, "ous"); break; }
        break;
      case 'o':
        if (ends(s, "ization")) { replace_if_measured(s, "ize"); break; }
        if (ends(s, "ation")) { replace_if_measured(s, "ate"); break; }
        if (ends(s, "ator")) { replace_if_measured(s, "ate"); break; }
        break;
      case 's':
        if (ends(s, "alism")) { replace_if_measured(s, "al"); break; }
        if (ends(s, "iveness")) { replace_if_measured(s, "ive"); break; }
        if (ends(s, "fulness")) { replace_if_measured(s, "ful"); break; }
        if (ends(s, "ousness")) { replace_if_measured(s, "ous"); break; }
        break;
      case 't':
        if (ends(s, "aliti")) { replace_if_measured(s, "al"); break; }
        if (ends(s, "iviti")) { replace_if_measured(s, "ive"); break; }
        if (ends(s, "biliti")) { replace_if_measured(s, "ble"); break; }
        break;
      default: break;
    }
  }

  static void step3(State& s) {
    switch (s.b[s.k]) {
      case 'e':
        if (ends(s, "icate")) { replace_if_measured(s, "ic"); break; }
        if (ends(s, "ative")) { replace_if_measured(s, ""); break; }
        if (ends(s, "alize")) { replace_if_measured(s, "al"); break; }
        break;
      case 'i':
        if (ends(s, "iciti")) { replace_if_measured(s, "ic"); break; }
        break;
      case 'l':
        if (ends(s, "ical")) { replace_if_measured(s, "ic"); break; }
        if (ends(s, "ful")) { replace_if_measured(s, ""); break; }
        break;
      case 's':
        if (ends(s, "ness")) { replace_if_measured(s, ""); break; }
        break;
      default: break;
    }
  }

  static void step4(State& s) {
    if (s.k < 1) return;
    bool matched = false;
    switch (s.b[s.k - 1]) {
      case 'a': matched = ends(s, "al"); break;
      case 'c': matched = ends(s, "ance") || ends(s, "ence"); break;
      case 'e': matched = ends(s, "er"); break;
      case 'i': matched = ends(s, "ic"); break;
      case 'l': matched = ends(s, "able") || ends(s, "ible"); break;
      case 'n': matched = ends(s, "ant") || ends(s, "ement") || ends(s, "ment") || ends(s, "ent"); break;
      case 'o':
        matched = (ends(s, "ion") && s.j >= 0 && (s.b[s.j] == 's' || s.b[s.j] == 't')) || ends(s, "ou");
        break;
      case 's': matched = ends(s, "ism"); break;
      case 't': matched = ends(s, "ate") || ends(s, "iti"); break;
      case 'u': matched = ends(s, "ous"); break;
      case 'v': matched = ends(s, "ive"); break;
      case 'z': matched = ends(s, "ize"); break;
      default: break;
    }
    if (matched && measure(s) > 1) {
      s.k = s.j;
      s.b.resize(static_cast<std::size_t>(s.k + 1));
    }
  }

  static void step5(State& s) {
    s.j = s.k;
    if (s.b[s.k] == 'e') {
      const int a = measure(s);
      if (a > 1 || (a == 1 && !cvc(s, s.k - 1))) --s.k;
    }
    s.j = s.k;
    if (s.b[s.k] == 'l' && double_cons(s, s.k) && measure(s) > 1) --s.k;
    s.b.resize(static_cast<std::size_t>(s.k + 1));
  }
};

}  // namespace topicsum
