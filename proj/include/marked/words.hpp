#pragma once

#include <cctype>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "marked/errors.hpp"

namespace marked {

/// One letter of a word over X^{+-1}: a generator index and a sign.
struct Letter {
  int gen = 0;
  int sign = +1;

  friend bool operator==(const Letter& a, const Letter& b) {
    return a.gen == b.gen && a.sign == b.sign;
  }
  Letter inverse() const { return Letter{gen, -sign}; }
};

using Word = std::vector<Letter>;

inline bool mutually_inverse(const Letter& a, const Letter& b) {
  return a.gen == b.gen && a.sign == -b.sign;
}

/// Free reduction: cancel adjacent mutually inverse letters until none
/// remain. Idempotent; never lengthens.
inline Word reduce_word(const Word& w) {
  Word out;
  out.reserve(w.size());
  for (const Letter& l : w) {
    if (!out.empty() && mutually_inverse(out.back(), l)) {
      out.pop_back();
    } else {
      out.push_back(l);
    }
  }
  return out;
}

inline bool is_reduced(const Word& w) {
  for (size_t i = 1; i < w.size(); ++i) {
    if (mutually_inverse(w[i - 1], w[i])) return false;
  }
  return true;
}

inline Word inverse_word(const Word& w) {
  Word out;
  out.reserve(w.size());
  for (auto it = w.rbegin(); it != w.rend(); ++it) out.push_back(it->inverse());
  return out;
}

inline Word concat(const Word& a, const Word& b) {
  Word out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

inline Word pow_word(const Word& w, int e) {
  Word base = e >= 0 ? w : inverse_word(w);
  int n = e >= 0 ? e : -e;
  Word out;
  out.reserve(base.size() * static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) out.insert(out.end(), base.begin(), base.end());
  return out;
}

// ---------------------------------------------------------------------------
// Text form. Words are whitespace-separated letters with optional ^k powers;
// parenthesized subwords may carry powers too: "a b^-1 (a b)^3".
// ---------------------------------------------------------------------------

class WordParser {
 public:
  WordParser(const std::vector<std::string>& names) {
    for (size_t i = 0; i < names.size(); ++i) index_[names[i]] = static_cast<int>(i);
  }

  Word parse(const std::string& text) const {
    size_t pos = 0;
    Word w = parse_seq(text, pos, /*depth=*/0);
    skip_ws(text, pos);
    if (pos != text.size()) {
      throw ConfigError("unexpected ')' at column " + std::to_string(pos + 1) +
                        " in word \"" + text + "\"");
    }
    return w;
  }

 private:
  static void skip_ws(const std::string& s, size_t& pos) {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
  }

  Word parse_seq(const std::string& s, size_t& pos, int depth) const {
    Word out;
    for (;;) {
      skip_ws(s, pos);
      if (pos == s.size()) return out;
      char c = s[pos];
      if (c == ')') {
        if (depth == 0) return out;  // caller reports
        return out;
      }
      Word piece;
      if (c == '(') {
        ++pos;
        piece = parse_seq(s, pos, depth + 1);
        skip_ws(s, pos);
        if (pos == s.size() || s[pos] != ')') {
          throw ConfigError("missing ')' in word \"" + s + "\"");
        }
        ++pos;
      } else {
        size_t start = pos;
        while (pos < s.size() && !token_boundary(s[pos])) ++pos;
        std::string name = s.substr(start, pos - start);
        auto it = index_.find(name);
        if (it == index_.end()) {
          throw ConfigError("unknown generator \"" + name + "\" at column " +
                            std::to_string(start + 1));
        }
        piece.push_back(Letter{it->second, +1});
      }
      int e = parse_power(s, pos);
      Word p = pow_word(piece, e);
      out.insert(out.end(), p.begin(), p.end());
    }
  }

  static bool token_boundary(char c) {
    return c == ' ' || c == '\t' || c == '^' || c == '(' || c == ')';
  }

  static int parse_power(const std::string& s, size_t& pos) {
    if (pos >= s.size() || s[pos] != '^') return 1;
    ++pos;
    size_t start = pos;
    if (pos < s.size() && (s[pos] == '-' || s[pos] == '+')) ++pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos == start || (pos - start == 1 && !std::isdigit(static_cast<unsigned char>(s[start])))) {
      throw ConfigError("malformed exponent at column " + std::to_string(start + 1));
    }
    return std::stoi(s.substr(start, pos - start));
  }

  std::unordered_map<std::string, int> index_;
};

inline std::string format_word(const Word& w, const std::vector<std::string>& names) {
  if (w.empty()) return "1";
  std::string out;
  for (size_t i = 0; i < w.size(); ++i) {
    if (i) out += ' ';
    out += names[static_cast<size_t>(w[i].gen)];
    if (w[i].sign < 0) out += "^-1";
  }
  return out;
}

}  // namespace marked
