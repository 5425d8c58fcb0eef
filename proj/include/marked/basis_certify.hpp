#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "marked/free_engine.hpp"
#include "marked/free_product_engine.hpp"
#include "marked/group.hpp"

namespace marked {

/// The free-basis construction over a base group G and A subset of G \ {1}:
/// in P = G * <x_1> * ... * <x_n> * <y_a> * <z_a>, the set
///   T = { y_a x_i a x_i^-1 z_a }
/// is a basis of a free subgroup, witnessed by the survival of the cores
/// (x_i, a, x_i^-1) in every reduced T-word.
struct FreeBasisInstance {
  MarkedGroup base;
  std::vector<Word> a_words;  // the subset A, as words over the base
  int n = 0;
  MarkedGroup product;                 // P
  std::vector<GroupElement> t_elements;  // elements of P, one per (a, i)
  std::vector<std::pair<size_t, size_t>> t_index;  // (a index, x index)

  size_t basis_size() const { return t_elements.size(); }
};

namespace detail {

struct TaggedEntry {
  size_t factor;
  GroupElement element;
  int word_pos = -1;   // which T-letter produced it; -1 once merged
  int entry_pos = -1;  // 0..4 within the letter's five-entry form
};

/// Push one syllable onto a provenance-tracked normal form: consolidation
/// marks the result as merged, cancellation removes both sides.
inline void tagged_push(std::vector<TaggedEntry>& stack, const FreeProductEngine& eng,
                        TaggedEntry e) {
  if (e.element.is_identity()) return;
  if (!stack.empty() && stack.back().factor == e.factor) {
    GroupElement prod = eng.factor(e.factor).multiply(stack.back().element, e.element);
    stack.pop_back();
    if (!prod.is_identity()) {
      stack.push_back(TaggedEntry{e.factor, prod, -1, -1});
    }
  } else {
    stack.push_back(std::move(e));
  }
}

}  // namespace detail

inline FreeBasisInstance make_free_basis_instance(const MarkedGroup& base,
                                                  const std::vector<Word>& a_words, int n) {
  if (n < 1 || a_words.empty()) throw ConfigError("free basis instance needs n >= 1, A nonempty");
  FreeBasisInstance inst;
  inst.base = base;
  inst.a_words = a_words;
  inst.n = n;

  std::vector<MarkedGroup> factors{base};
  for (int i = 1; i <= n; ++i) factors.push_back(make_free_group({"x" + std::to_string(i)}));
  for (size_t a = 1; a <= a_words.size(); ++a) {
    factors.push_back(make_free_group({"y" + std::to_string(a)}));
  }
  for (size_t a = 1; a <= a_words.size(); ++a) {
    factors.push_back(make_free_group({"z" + std::to_string(a)}));
  }
  inst.product = make_free_product(factors);
  const auto& eng = dynamic_cast<const FreeProductEngine&>(inst.product.engine());

  // A must avoid the identity, and cores must identify their letter uniquely
  std::map<std::string, int> core_ids;
  for (size_t a = 0; a < a_words.size(); ++a) {
    GroupElement ae = base.evaluate(a_words[a]);
    if (ae.is_identity()) throw ConfigError("A must avoid the identity of the base group");
    GroupElement inv = base.inverse(ae);
    if (core_ids.count(ae.bytes) || core_ids.count(inv.bytes) || ae == inv) {
      throw ConfigError("core elements of A must be distinct from each other and their inverses");
    }
    core_ids[ae.bytes] = static_cast<int>(a);
    core_ids[inv.bytes] = -static_cast<int>(a) - 1;
  }

  const int base_rank = static_cast<int>(base.rank());
  for (size_t a = 0; a < a_words.size(); ++a) {
    for (int i = 1; i <= n; ++i) {
      Word t;
      t.push_back(Letter{base_rank + n + static_cast<int>(a), +1});  // y_a
      t.push_back(Letter{base_rank + i - 1, +1});                    // x_i
      for (const Letter& l : a_words[a]) t.push_back(l);             // a (base letters)
      t.push_back(Letter{base_rank + i - 1, -1});                    // x_i^-1
      t.push_back(
          Letter{base_rank + n + static_cast<int>(a_words.size()) + static_cast<int>(a), +1});
      inst.t_elements.push_back(inst.product.evaluate(t));
      inst.t_index.emplace_back(a, static_cast<size_t>(i - 1));
      // sanity: the letter itself must have the five-entry normal form
      if (eng.decode(inst.t_elements.back()).size() != 5) {
        throw InvariantViolated("basis letter does not have a 5-entry normal form");
      }
    }
  }
  return inst;
}

struct CoreHit {
  size_t stack_pos;  // position of the x^{+1} entry
  size_t a_index;
  size_t x_index;
  int sign;  // +1 for a; -1 for a^-1 (i.e. an inverse letter)
};

namespace detail {

/// Locate all consecutive (x_i, a^{+-1}, x_i^{-1}) patterns in a tracked
/// normal form.
inline std::vector<CoreHit> scan_cores(const FreeBasisInstance& inst,
                                       const std::vector<TaggedEntry>& stack) {
  const auto& eng = dynamic_cast<const FreeProductEngine&>(inst.product.engine());
  std::vector<CoreHit> hits;
  const size_t nx = static_cast<size_t>(inst.n);
  std::map<std::string, std::pair<size_t, int>> core_of;  // base elem -> (a idx, sign)
  for (size_t a = 0; a < inst.a_words.size(); ++a) {
    GroupElement ae = inst.base.evaluate(inst.a_words[a]);
    core_of[ae.bytes] = {a, +1};
    core_of[inst.base.inverse(ae).bytes] = {a, -1};
  }
  auto x_exponent = [&](const TaggedEntry& e) -> int {
    // factors 1..n are the rank-one free groups <x_i>
    if (e.factor < 1 || e.factor > nx) return 0;
    const auto& fe = dynamic_cast<const FreeEngine&>(eng.factor(e.factor).engine());
    Word w = fe.element_word(e.element);
    if (w.size() != 1) return 0;
    return w[0].sign;
  };
  for (size_t p = 0; p + 2 < stack.size(); ++p) {
    const auto& e1 = stack[p];
    const auto& e2 = stack[p + 1];
    const auto& e3 = stack[p + 2];
    if (e2.factor != 0) continue;  // middle entry must be in the base group
    if (e1.factor != e3.factor) continue;
    if (x_exponent(e1) != +1 || x_exponent(e3) != -1) continue;
    auto it = core_of.find(e2.element.bytes);
    if (it == core_of.end()) continue;
    hits.push_back(CoreHit{p, it->second.first, e1.factor - 1, it->second.second});
  }
  return hits;
}

inline std::vector<TaggedEntry> tracked_evaluate(const FreeBasisInstance& inst,
                                                 const std::vector<int>& t_word) {
  const auto& eng = dynamic_cast<const FreeProductEngine&>(inst.product.engine());
  std::vector<TaggedEntry> stack;
  for (size_t j = 0; j < t_word.size(); ++j) {
    int letter = t_word[j];
    size_t idx = static_cast<size_t>(letter > 0 ? letter - 1 : -letter - 1);
    NormalForm nf = eng.decode(inst.t_elements[idx]);
    if (letter > 0) {
      for (size_t p = 0; p < nf.size(); ++p) {
        tagged_push(stack, eng,
                    TaggedEntry{nf[p].factor, nf[p].element, static_cast<int>(j),
                                static_cast<int>(p)});
      }
    } else {
      for (size_t p = nf.size(); p-- > 0;) {
        tagged_push(stack, eng,
                    TaggedEntry{nf[p].factor,
                                eng.factor(nf[p].factor).inverse(nf[p].element),
                                static_cast<int>(j), static_cast<int>(p)});
      }
    }
  }
  return stack;
}

}  // namespace detail

struct BasisCertificate {
  int length_cap = 0;
  std::uint64_t words_checked = 0;
  std::uint64_t cores_verified = 0;
  std::uint64_t malnormality_samples = 0;
  std::uint64_t malnormality_violations = 0;
};

/// Exhaustive freeness + core-survival certification of an instance, over
/// all freely reduced T-words of length <= L:
///  (i)  every word evaluates to a nonempty normal form;
///  (ii) each constituent core survives untouched, in order;
///  (iii) the normal form contains no core patterns beyond those traces.
inline BasisCertificate free_basis_certify(const FreeBasisInstance& inst, int L) {
  BasisCertificate cert;
  cert.length_cap = L;
  const int K = static_cast<int>(inst.basis_size());
  std::vector<std::vector<int>> layer{{}};
  for (int len = 1; len <= L; ++len) {
    std::vector<std::vector<int>> next;
    for (const auto& w : layer) {
      for (int l = 1; l <= K; ++l) {
        for (int s : {+1, -1}) {
          int letter = s * l;
          if (!w.empty() && w.back() == -letter) continue;
          std::vector<int> nw = w;
          nw.push_back(letter);
          next.push_back(nw);
        }
      }
    }
    for (const auto& w : next) {
      auto stack = detail::tracked_evaluate(inst, w);
      if (stack.empty()) {
        throw CertificationFailed("reduced T-word of length " + std::to_string(len) +
                                      " evaluates to the identity",
                                  w);
      }
      // survival of each constituent core, located structurally
      auto hits = detail::scan_cores(inst, stack);
      if (hits.size() != w.size()) {
        throw CertificationFailed("core count mismatch in normal form", w);
      }
      for (size_t j = 0; j < w.size(); ++j) {
        int letter = w[j];
        size_t idx = static_cast<size_t>(letter > 0 ? letter - 1 : -letter - 1);
        const auto& [ai, xi] = inst.t_index[idx];
        const CoreHit& h = hits[j];
        if (h.a_index != ai || h.x_index != xi || h.sign != (letter > 0 ? +1 : -1)) {
          throw CertificationFailed("core of letter " + std::to_string(j) +
                                        " not found at its position",
                                    w);
        }
        // untouched provenance on the three core entries
        const auto& e1 = stack[h.stack_pos];
        const auto& e2 = stack[h.stack_pos + 1];
        const auto& e3 = stack[h.stack_pos + 2];
        bool tagged = e1.word_pos == static_cast<int>(j) && e2.word_pos == static_cast<int>(j) &&
                      e3.word_pos == static_cast<int>(j);
        bool positions = letter > 0
                             ? (e1.entry_pos == 1 && e2.entry_pos == 2 && e3.entry_pos == 3)
                             : (e1.entry_pos == 3 && e2.entry_pos == 2 && e3.entry_pos == 1);
        if (!tagged || !positions) {
          throw CertificationFailed("core of letter " + std::to_string(j) +
                                        " was touched by the reduction",
                                    w);
        }
        ++cert.cores_verified;
      }
      ++cert.words_checked;
    }
    layer = std::move(next);
  }
  return cert;
}

/// Freeness-only certification for an arbitrary claimed basis (used for
/// planted-dependence inputs): every freely reduced word of length <= L in
/// the candidates must evaluate to a nontrivial element of P.
inline BasisCertificate certify_claimed_basis(const MarkedGroup& P,
                                              const std::vector<GroupElement>& candidates,
                                              int L) {
  BasisCertificate cert;
  cert.length_cap = L;
  const int K = static_cast<int>(candidates.size());
  std::vector<GroupElement> inverses;
  for (const auto& c : candidates) inverses.push_back(P.inverse(c));
  struct Node {
    std::vector<int> word;
    GroupElement value;
  };
  std::vector<Node> layer{{{}, P.identity()}};
  for (int len = 1; len <= L; ++len) {
    std::vector<Node> next;
    for (const auto& node : layer) {
      for (int l = 1; l <= K; ++l) {
        for (int s : {+1, -1}) {
          int letter = s * l;
          if (!node.word.empty() && node.word.back() == -letter) continue;
          Node nn;
          nn.word = node.word;
          nn.word.push_back(letter);
          nn.value = P.multiply(node.value, s > 0 ? candidates[static_cast<size_t>(l - 1)]
                                                  : inverses[static_cast<size_t>(l - 1)]);
          if (nn.value.is_identity()) {
            throw CertificationFailed("claimed basis has a relation of length " +
                                          std::to_string(len),
                                      nn.word);
          }
          ++cert.words_checked;
          next.push_back(std::move(nn));
        }
      }
    }
    layer = std::move(next);
  }
  return cert;
}

/// Try to read an element of P as a word in T via its surviving cores; a
/// successful parse that reproduces the element certifies membership in <T>.
inline std::optional<std::vector<int>> parse_as_t_word(const FreeBasisInstance& inst,
                                                       const GroupElement& g) {
  const auto& eng = dynamic_cast<const FreeProductEngine&>(inst.product.engine());
  NormalForm nf = eng.decode(g);
  std::vector<detail::TaggedEntry> stack;
  for (const auto& s : nf) stack.push_back(detail::TaggedEntry{s.factor, s.element, -1, -1});
  auto hits = detail::scan_cores(inst, stack);
  if (hits.empty()) {
    if (g.is_identity()) return std::vector<int>{};
    return std::nullopt;
  }
  std::vector<int> word;
  for (const CoreHit& h : hits) {
    int letter = 0;
    for (size_t idx = 0; idx < inst.t_index.size(); ++idx) {
      if (inst.t_index[idx] == std::make_pair(h.a_index, h.x_index)) {
        letter = static_cast<int>(idx) + 1;
        break;
      }
    }
    if (letter == 0) return std::nullopt;
    word.push_back(h.sign > 0 ? letter : -letter);
  }
  GroupElement prod = inst.product.identity();
  for (int letter : word) {
    size_t idx = static_cast<size_t>(letter > 0 ? letter - 1 : -letter - 1);
    GroupElement e = letter > 0 ? inst.t_elements[idx]
                                : inst.product.inverse(inst.t_elements[idx]);
    prod = inst.product.multiply(prod, e);
  }
  if (prod == g) return word;
  return std::nullopt;
}

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace detail

/// Bounded malnormality spot-check: for deterministic pseudo-random p of
/// bounded length with p not parsed into <T>, no conjugate p t p^-1 admits a
/// core-pattern certificate placing it in <T>.
inline BasisCertificate malnormality_spot_check(const FreeBasisInstance& inst, int samples,
                                                int word_length, std::uint64_t seed) {
  BasisCertificate cert;
  std::uint64_t state = seed;
  const size_t rank = inst.product.rank();
  for (int s = 0; s < samples; ++s) {
    Word pw;
    for (int i = 0; i < word_length; ++i) {
      int gen = static_cast<int>(detail::splitmix64(state) % rank);
      int sign = (detail::splitmix64(state) & 1) ? +1 : -1;
      pw.push_back(Letter{gen, sign});
    }
    GroupElement p = inst.product.evaluate(pw);
    if (p.is_identity() || parse_as_t_word(inst, p)) continue;  // want p outside <T>
    GroupElement pinv = inst.product.inverse(p);
    for (const GroupElement& t : inst.t_elements) {
      GroupElement w = inst.product.multiply(inst.product.multiply(p, t), pinv);
      ++cert.malnormality_samples;
      if (parse_as_t_word(inst, w)) ++cert.malnormality_violations;
    }
  }
  return cert;
}

}  // namespace marked
