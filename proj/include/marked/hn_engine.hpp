#pragma once

#include <cstdint>
#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include "marked/group.hpp"

namespace marked {

/// The groups H_n of the converging hyperbolic sequence:
///   H_n = < t, a_{-n}..a_n | t^-1 a_k t = a_{k+1} (k=-n..n-1),
///                            a_i^2 = 1, [a_i, a_j] = 1 >,
/// an HNN extension of A_n = (Z_2)^{2n+1} with associated subgroups
/// A = <a_{-n}..a_{n-1}>, B = <a_{-n+1}..a_n> and phi the index shift +1.
///
/// Canonical form: product of syllables (r_i, e_i) meaning r_i t^{e_i},
/// followed by a tail in A_n, where every r_i is the chosen coset
/// representative ({} or {a_n} before t; {} or {a_{-n}} before t^-1).
/// Subsets of {-n..n} are stored as bitmasks over index+n.
class HnEngine final : public Engine {
 public:
  explicit HnEngine(int n) : n_(n) {
    if (n < 1) throw ConfigError("hn rank must be >= 1");
    if (n > 30) throw ConfigError("hn rank capped at 30 (subset bitmasks)");
    gens_.push_back("t");
    for (int k = -n; k <= n; ++k) gens_.push_back("a_" + std::to_string(k));
    for (int k = -n; k < n; ++k) {
      // t^-1 a_k t a_{k+1}   (a_{k+1} is its own inverse)
      relators_.push_back(Word{t_letter(-1), a_letter(k), t_letter(+1), a_letter(k + 1)});
    }
    for (int i = -n; i <= n; ++i) relators_.push_back(Word{a_letter(i), a_letter(i)});
    for (int i = -n; i <= n; ++i) {
      for (int j = i + 1; j <= n; ++j) {
        relators_.push_back(Word{a_letter(i), a_letter(j), a_letter(i), a_letter(j)});
      }
    }
  }

  int n() const { return n_; }
  Letter t_letter(int sign) const { return Letter{0, sign}; }
  Letter a_letter(int k) const { return Letter{k + n_ + 1, +1}; }

  const std::vector<std::string>& generators() const override { return gens_; }
  std::string kind() const override { return "hn"; }
  const std::vector<Word>* relators() const override { return &relators_; }

  struct Form {
    std::vector<std::pair<std::uint64_t, int>> syllables;  // (rep mask, t sign)
    std::uint64_t tail = 0;
  };

  Form decode(const GroupElement& g) const {
    Form f;
    if (g.bytes.empty()) return f;
    size_t pos = 0;
    std::uint32_t count;
    std::memcpy(&count, g.bytes.data(), 4);
    pos += 4;
    for (std::uint32_t i = 0; i < count; ++i) {
      std::uint64_t mask;
      char sign;
      std::memcpy(&mask, g.bytes.data() + pos, 8);
      sign = g.bytes[pos + 8];
      pos += 9;
      f.syllables.emplace_back(mask, sign == 'n' ? -1 : +1);
    }
    std::memcpy(&f.tail, g.bytes.data() + pos, 8);
    return f;
  }

  GroupElement encode(const Form& f) const {
    if (f.syllables.empty() && f.tail == 0) return GroupElement{};
    GroupElement g;
    std::uint32_t count = static_cast<std::uint32_t>(f.syllables.size());
    g.bytes.resize(4 + 9 * f.syllables.size() + 8);
    std::memcpy(g.bytes.data(), &count, 4);
    size_t pos = 4;
    for (const auto& [mask, sign] : f.syllables) {
      std::memcpy(g.bytes.data() + pos, &mask, 8);
      g.bytes[pos + 8] = sign < 0 ? 'n' : 'p';
      pos += 9;
    }
    std::memcpy(g.bytes.data() + pos, &f.tail, 8);
    return g;
  }

  std::uint64_t bit(int k) const { return std::uint64_t(1) << (k + n_); }
  std::uint64_t mask_A() const { return (std::uint64_t(1) << (2 * n_)) - 1; }              // indices -n..n-1
  std::uint64_t mask_B() const { return ((std::uint64_t(1) << (2 * n_)) - 1) << 1; }       // indices -n+1..n

  GroupElement apply(const GroupElement& g, Letter l) const override {
    Form f = decode(g);
    if (l.gen == 0) {
      if (l.sign > 0) {
        if (!f.syllables.empty() && f.syllables.back().second == -1 &&
            (f.tail & ~mask_A()) == 0) {
          // pinch t^-1 u t with u in A: pop and shift
          std::uint64_t rep = f.syllables.back().first;
          f.syllables.pop_back();
          f.tail = rep ^ (f.tail << 1);
        } else {
          std::uint64_t rep = f.tail & bit(n_);
          std::uint64_t a = f.tail & mask_A();
          f.syllables.emplace_back(rep, +1);
          f.tail = a << 1;
        }
      } else {
        if (!f.syllables.empty() && f.syllables.back().second == +1 &&
            (f.tail & ~mask_B()) == 0) {
          std::uint64_t rep = f.syllables.back().first;
          f.syllables.pop_back();
          f.tail = rep ^ (f.tail >> 1);
        } else {
          std::uint64_t rep = f.tail & bit(-n_);
          std::uint64_t b = f.tail & mask_B();
          f.syllables.emplace_back(rep, -1);
          f.tail = b >> 1;
        }
      }
    } else {
      int k = l.gen - n_ - 1;
      f.tail ^= bit(k);
    }
    return encode(f);
  }

  GroupElement multiply(const GroupElement& a, const GroupElement& b) const override {
    GroupElement out = a;
    for (Letter l : element_word(b)) out = apply(out, l);
    return out;
  }

  GroupElement inverse(const GroupElement& a) const override {
    Word w = inverse_word(element_word(a));
    GroupElement out;
    for (Letter l : w) out = apply(out, l);
    return out;
  }

  Word element_word(const GroupElement& g) const override {
    Form f = decode(g);
    Word w;
    for (const auto& [mask, sign] : f.syllables) {
      append_mask(w, mask);
      w.push_back(t_letter(sign));
    }
    append_mask(w, f.tail);
    return w;
  }

 private:
  void append_mask(Word& w, std::uint64_t mask) const {
    for (int k = -n_; k <= n_; ++k) {
      if (mask & bit(k)) w.push_back(a_letter(k));
    }
  }

  int n_;
  std::vector<std::string> gens_;
  std::vector<Word> relators_;
};

inline MarkedGroup make_hn_group(int n) {
  return MarkedGroup(std::make_shared<HnEngine>(n));
}

// ---------------------------------------------------------------------------
// Britton reduction on literal words: eliminate pinches t^-1 u t (u in A)
// and t u t^-1 (u in B) without converting to coset representatives, so the
// output is a word over the original letters with an explicit t-syllable
// decomposition. The result is the identity iff it is the empty word, and
// the t-exponent sum is that of the input.
// ---------------------------------------------------------------------------

struct BrittonDecomposition {
  /// u_0 t^{e_1} u_1 ... t^{e_m} u_m with u_i subsets of the a-generators
  std::vector<std::uint64_t> segments;  // m+1 masks
  std::vector<int> t_signs;             // m signs
  Word word;                            // the Britton-reduced word
  int t_exponent_sum = 0;

  size_t t_syllables() const { return t_signs.size(); }
  bool is_identity() const { return t_signs.empty() && segments.size() == 1 && segments[0] == 0; }
};

inline BrittonDecomposition britton_reduce(const MarkedGroup& H, const Word& w) {
  const auto& eng = dynamic_cast<const HnEngine&>(H.engine());
  const int n = eng.n();
  std::vector<std::uint64_t> seg{0};
  std::vector<int> signs;
  for (const Letter& l : w) {
    if (l.gen != 0) {
      int k = l.gen - n - 1;
      seg.back() ^= eng.bit(k);
      continue;
    }
    if (l.sign > 0) {
      if (!signs.empty() && signs.back() == -1 && (seg.back() & ~eng.mask_A()) == 0) {
        std::uint64_t u = seg.back();
        seg.pop_back();
        signs.pop_back();
        seg.back() ^= (u << 1);  // phi(u)
      } else {
        signs.push_back(+1);
        seg.push_back(0);
      }
    } else {
      if (!signs.empty() && signs.back() == +1 && (seg.back() & ~eng.mask_B()) == 0) {
        std::uint64_t u = seg.back();
        seg.pop_back();
        signs.pop_back();
        seg.back() ^= (u >> 1);  // phi^-1(u)
      } else {
        signs.push_back(-1);
        seg.push_back(0);
      }
    }
  }
  BrittonDecomposition out;
  out.segments = seg;
  out.t_signs = signs;
  for (int s : signs) out.t_exponent_sum += s;
  for (size_t i = 0; i < seg.size(); ++i) {
    for (int k = -n; k <= n; ++k) {
      if (seg[i] & eng.bit(k)) out.word.push_back(eng.a_letter(k));
    }
    if (i < signs.size()) out.word.push_back(eng.t_letter(signs[i]));
  }
  return out;
}

}  // namespace marked
