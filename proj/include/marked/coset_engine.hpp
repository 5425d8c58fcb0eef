#pragma once

#include <cstdint>
#include <cstring>
#include <deque>
#include <memory>
#include <string>
#include <vector>

#include "marked/group.hpp"

namespace marked {

namespace detail {

/// Relator-driven Todd-Coxeter enumeration of the cosets of the trivial
/// subgroup, i.e. of the group elements themselves. Fully deterministic:
/// cosets are defined in scan order and the closed table is renumbered by
/// BFS over generator order before use.
class TC {
 public:
  TC(size_t rank, const std::vector<Word>& relators, std::uint64_t max_cosets)
      : rank_(rank), max_(max_cosets) {
    for (const Word& r : relators) {
      if (r.empty()) throw ConfigError("empty relator");
      rel_.push_back(r);
    }
    new_coset();
  }

  // returns false when the coset cap is hit before closure
  bool run() {
    for (;;) {
      if (!rescan_all()) return false;
      bool holes = false;
      for (size_t c = 0; c < table_.size(); ++c) {
        if (dead_[c]) continue;
        for (size_t col = 0; col < 2 * rank_; ++col) {
          if (dead_[c]) break;
          if (at(c, col) == kNone) {
            if (table_.size() - dead_count_ >= max_) return false;
            size_t d = new_coset();
            deduce(c, col, d);
            holes = true;
          }
        }
      }
      if (!holes) return true;
    }
  }

  size_t live_count() const { return table_.size() - dead_count_; }

  // canonical renumbering: BFS from coset 0 in letter order
  void canonicalize() {
    std::vector<size_t> order;
    std::vector<size_t> newid(table_.size(), kNone);
    order.push_back(root(0));
    newid[root(0)] = 0;
    for (size_t i = 0; i < order.size(); ++i) {
      size_t c = order[i];
      for (size_t col = 0; col < 2 * rank_; ++col) {
        size_t d = root(at(c, col));
        if (newid[d] == kNone) {
          newid[d] = order.size();
          order.push_back(d);
        }
      }
    }
    std::vector<std::uint32_t> flat(order.size() * 2 * rank_);
    for (size_t i = 0; i < order.size(); ++i) {
      for (size_t col = 0; col < 2 * rank_; ++col) {
        flat[i * 2 * rank_ + col] = static_cast<std::uint32_t>(newid[root(at(order[i], col))]);
      }
    }
    canonical_ = std::move(flat);
    size_ = order.size();
  }

  const std::vector<std::uint32_t>& canonical_table() const { return canonical_; }
  size_t size() const { return size_; }

 private:
  static constexpr size_t kNone = static_cast<size_t>(-1);

  size_t new_coset() {
    table_.emplace_back(2 * rank_, kNone);
    parent_.push_back(table_.size() - 1);
    dead_.push_back(false);
    return table_.size() - 1;
  }

  size_t root(size_t c) {
    while (parent_[c] != c) {
      parent_[c] = parent_[parent_[c]];
      c = parent_[c];
    }
    return c;
  }

  size_t& at(size_t c, size_t col) { return table_[c][col]; }
  size_t at(size_t c, size_t col) const { return table_[c][col]; }

  static size_t column(Letter l) {
    return 2 * static_cast<size_t>(l.gen) + (l.sign < 0 ? 1 : 0);
  }
  static size_t inv_column(size_t col) { return col ^ 1; }

  void deduce(size_t c, size_t col, size_t d) {
    at(c, col) = d;
    size_t back = at(d, inv_column(col));
    if (back == kNone) {
      at(d, inv_column(col)) = c;
    } else if (root(back) != root(c)) {
      merge(back, c);
    }
  }

  void merge(size_t a, size_t b) {
    std::deque<std::pair<size_t, size_t>> queue{{a, b}};
    while (!queue.empty()) {
      auto [x, y] = queue.front();
      queue.pop_front();
      x = root(x);
      y = root(y);
      if (x == y) continue;
      if (y < x) std::swap(x, y);  // keep the smaller index alive
      parent_[y] = x;
      dead_[y] = true;
      ++dead_count_;
      for (size_t col = 0; col < 2 * rank_; ++col) {
        size_t t = at(y, col);
        if (t == kNone) continue;
        size_t cur = at(x, col);
        if (cur == kNone) {
          at(x, col) = t;
          size_t back = at(root(t), inv_column(col));
          if (back == kNone) at(root(t), inv_column(col)) = x;
        } else if (root(cur) != root(t)) {
          queue.emplace_back(cur, t);
        }
      }
    }
  }

  bool scan(size_t c, const Word& r) {
    c = root(c);
    // forward scan
    size_t front = c;
    size_t i = 0;
    while (i < r.size()) {
      size_t nxt = at(front, column(r[i]));
      if (nxt == kNone) break;
      front = root(nxt);
      ++i;
    }
    if (i == r.size()) {
      if (front != root(c)) merge(front, c);
      return true;
    }
    // backward scan
    size_t back = root(c);
    size_t j = r.size();
    while (j > i) {
      size_t nxt = at(back, column(r[j - 1].inverse()));
      if (nxt == kNone) break;
      back = root(nxt);
      --j;
    }
    if (j == i) {
      // scans met at the same position: the two cosets must coincide
      if (root(front) != root(back)) merge(front, back);
      return true;
    }
    if (j == i + 1) {
      deduce(front, column(r[i]), back);
      return true;
    }
    // define one new coset to extend the forward scan, then retry
    if (table_.size() - dead_count_ >= max_) return false;
    size_t d = new_coset();
    deduce(front, column(r[i]), d);
    return scan(c, r);
  }

  bool rescan_all() {
    for (size_t c = 0; c < table_.size(); ++c) {
      if (dead_[c]) continue;
      for (const Word& r : rel_) {
        if (!scan(c, r)) return false;
        if (dead_[c]) break;
      }
    }
    return true;
  }

  size_t rank_;
  std::uint64_t max_;
  std::vector<Word> rel_;
  std::vector<std::vector<size_t>> table_;
  std::vector<size_t> parent_;
  std::vector<bool> dead_;
  size_t dead_count_ = 0;
  std::vector<std::uint32_t> canonical_;
  size_t size_ = 0;
};

}  // namespace detail

/// Finite group defined by a closed coset table. Canonical form = the
/// 4-byte little-endian element index (identity = index 0 = empty bytes).
class CosetEngine final : public Engine {
 public:
  CosetEngine(FinitePresentation pres, const std::vector<std::uint32_t>& table, size_t n)
      : pres_(std::move(pres)), rank_(pres_.generators.size()), table_(table), n_(n) {
    // BFS representative words (tree edges in generator order)
    rep_parent_.assign(n_, 0);
    rep_letter_.assign(n_, Letter{});
    std::vector<bool> seen(n_, false);
    std::vector<std::uint32_t> q{0};
    seen[0] = true;
    for (size_t i = 0; i < q.size(); ++i) {
      std::uint32_t c = q[i];
      for (size_t col = 0; col < 2 * rank_; ++col) {
        std::uint32_t d = table_[c * 2 * rank_ + col];
        if (!seen[d]) {
          seen[d] = true;
          rep_parent_[d] = c;
          rep_letter_[d] = Letter{static_cast<int>(col / 2), (col % 2) ? -1 : +1};
          q.push_back(d);
        }
      }
    }
  }

  const std::vector<std::string>& generators() const override { return pres_.generators; }
  std::string kind() const override { return "coset-table"; }
  bool finite() const override { return true; }
  std::uint64_t order() const override { return n_; }
  const std::vector<Word>* relators() const override { return &pres_.relators; }

  std::uint32_t index_of(const GroupElement& g) const {
    if (g.bytes.empty()) return 0;
    std::uint32_t v;
    std::memcpy(&v, g.bytes.data(), 4);
    return v;
  }

  GroupElement element_at(std::uint32_t idx) const {
    GroupElement g;
    if (idx != 0) {
      g.bytes.resize(4);
      std::memcpy(g.bytes.data(), &idx, 4);
    }
    return g;
  }

  GroupElement apply(const GroupElement& g, Letter l) const override {
    std::uint32_t c = index_of(g);
    size_t col = 2 * static_cast<size_t>(l.gen) + (l.sign < 0 ? 1 : 0);
    return element_at(table_[c * 2 * rank_ + col]);
  }

  GroupElement multiply(const GroupElement& a, const GroupElement& b) const override {
    std::uint32_t c = index_of(a);
    for (const Letter& l : element_word(b)) {
      size_t col = 2 * static_cast<size_t>(l.gen) + (l.sign < 0 ? 1 : 0);
      c = table_[c * 2 * rank_ + col];
    }
    return element_at(c);
  }

  GroupElement inverse(const GroupElement& a) const override {
    Word w = inverse_word(element_word(a));
    std::uint32_t c = 0;
    for (const Letter& l : w) {
      size_t col = 2 * static_cast<size_t>(l.gen) + (l.sign < 0 ? 1 : 0);
      c = table_[c * 2 * rank_ + col];
    }
    return element_at(c);
  }

  Word element_word(const GroupElement& g) const override {
    Word w;
    for (std::uint32_t c = index_of(g); c != 0; c = rep_parent_[c]) {
      w.push_back(rep_letter_[c]);
    }
    std::reverse(w.begin(), w.end());
    return w;
  }

  const FinitePresentation& presentation() const { return pres_; }

 private:
  FinitePresentation pres_;
  size_t rank_;
  std::vector<std::uint32_t> table_;
  size_t n_;
  std::vector<std::uint32_t> rep_parent_;
  std::vector<Letter> rep_letter_;
};

/// Deterministic coset enumeration over the trivial subgroup. Throws
/// ResourceExceeded when the table does not close within `max_cosets`
/// (group possibly infinite, or the bound too small).
inline MarkedGroup coset_enumerate(const FinitePresentation& pres,
                                   std::uint64_t max_cosets = 1'000'000) {
  for (const Word& r : pres.relators) {
    if (r.empty() || !is_reduced(r)) throw ConfigError("relators must be nonempty reduced words");
  }
  detail::TC tc(pres.generators.size(), pres.relators, max_cosets);
  if (!tc.run()) {
    throw ResourceExceeded("coset enumeration did not close within " +
                           std::to_string(max_cosets) +
                           " cosets (group possibly infinite or bound too small)");
  }
  tc.canonicalize();
  return MarkedGroup(
      std::make_shared<CosetEngine>(pres, tc.canonical_table(), tc.size()));
}

/// All reduced words of length 1..maxlen over the given rank, in canonical
/// (length, lexicographic) order.
inline std::vector<Word> short_reduced_words(size_t rank, size_t maxlen) {
  std::vector<Word> out;
  std::vector<Word> layer{Word{}};
  for (size_t len = 1; len <= maxlen; ++len) {
    std::vector<Word> next;
    for (const Word& w : layer) {
      for (size_t g = 0; g < rank; ++g) {
        for (int s : {+1, -1}) {
          Letter l{static_cast<int>(g), s};
          if (!w.empty() && mutually_inverse(w.back(), l)) continue;
          Word nw = w;
          nw.push_back(l);
          next.push_back(nw);
          out.push_back(nw);
        }
      }
    }
    layer = std::move(next);
  }
  return out;
}

/// Self-validating engine for the free group of exponent `q` on `rank`
/// generators: relators are q-th powers of all short words, the finite
/// result is exhaustively checked against the law g^q = 1, and any
/// offending power is added as a relator before re-enumerating.
inline MarkedGroup burnside_group(size_t rank, unsigned q, size_t seed_length = 2,
                                  std::uint64_t max_cosets = 1'000'000) {
  FinitePresentation pres;
  for (size_t i = 0; i < rank; ++i) pres.generators.push_back(std::string(1, 'a' + static_cast<char>(i)));
  for (const Word& w : short_reduced_words(rank, seed_length)) {
    Word r = reduce_word(pow_word(w, static_cast<int>(q)));
    if (!r.empty()) pres.relators.push_back(r);
  }
  for (int round = 0; round < 16; ++round) {
    MarkedGroup G = coset_enumerate(pres, max_cosets);
    const auto& eng = dynamic_cast<const CosetEngine&>(G.engine());
    bool law_holds = true;
    for (std::uint32_t i = 0; i < eng.order(); ++i) {
      GroupElement g = eng.element_at(i), p = G.identity();
      for (unsigned k = 0; k < q; ++k) p = G.multiply(p, g);
      if (!p.is_identity()) {
        pres.relators.push_back(reduce_word(pow_word(eng.element_word(g), static_cast<int>(q))));
        law_holds = false;
        break;
      }
    }
    if (law_holds) return G;
  }
  throw InvariantViolated("burnside law failed to stabilize");
}

}  // namespace marked
