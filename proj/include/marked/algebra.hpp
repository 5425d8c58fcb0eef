#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "marked/group.hpp"
#include "marked/rational.hpp"

namespace marked {

constexpr std::uint64_t kDefaultSupportCap = 10'000'000;

/// Finitely supported map from group elements to exact rational
/// coefficients: an element of QG. Zero coefficients are never stored.
class AlgebraElement {
 public:
  AlgebraElement() = default;
  explicit AlgebraElement(MarkedGroup g) : group_(std::move(g)) {}

  const MarkedGroup& group() const { return group_; }
  const std::unordered_map<std::string, Rat>& coeffs() const { return coef_; }
  size_t support_size() const { return coef_.size(); }
  bool is_zero() const { return coef_.empty(); }

  void add_term(const GroupElement& g, const Rat& c) {
    if (sgn(c) == 0) return;
    auto it = coef_.find(g.bytes);
    if (it == coef_.end()) {
      coef_.emplace(g.bytes, c);
    } else {
      it->second += c;
      if (sgn(it->second) == 0) coef_.erase(it);
    }
  }

  Rat coefficient(const GroupElement& g) const {
    auto it = coef_.find(g.bytes);
    return it == coef_.end() ? Rat(0) : it->second;
  }

  bool nonnegative() const {
    for (const auto& [k, c] : coef_) {
      if (sgn(c) < 0) return false;
    }
    return true;
  }

  Rat l1_norm() const {
    Rat s = 0;
    for (const auto& [k, c] : coef_) s += abs(c);
    return s;
  }

  /// ||a||_2^2 = sum of squared coefficients = tau(a* a).
  Rat l2_norm_sq() const {
    Rat s = 0;
    for (const auto& [k, c] : coef_) s += c * c;
    return s;
  }

  friend bool operator==(const AlgebraElement& a, const AlgebraElement& b) {
    if (a.coef_.size() != b.coef_.size()) return false;
    for (const auto& [k, c] : a.coef_) {
      auto it = b.coef_.find(k);
      if (it == b.coef_.end() || it->second != c) return false;
    }
    return true;
  }

  AlgebraElement& operator+=(const AlgebraElement& o) {
    for (const auto& [k, c] : o.coef_) add_term(GroupElement{k}, c);
    return *this;
  }

  AlgebraElement& operator*=(const Rat& s) {
    if (sgn(s) == 0) {
      coef_.clear();
      return *this;
    }
    for (auto& [k, c] : coef_) c *= s;
    return *this;
  }

  /// Support in canonical byte order, for deterministic output.
  std::vector<std::pair<GroupElement, Rat>> sorted_terms() const {
    std::vector<std::pair<GroupElement, Rat>> out;
    out.reserve(coef_.size());
    for (const auto& [k, c] : coef_) out.emplace_back(GroupElement{k}, c);
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.first.bytes < b.first.bytes; });
    return out;
  }

 private:
  MarkedGroup group_;
  std::unordered_map<std::string, Rat> coef_;
};

inline AlgebraElement build_element(const MarkedGroup& G,
                                    const std::vector<std::pair<Word, Rat>>& terms) {
  AlgebraElement a(G);
  for (const auto& [w, c] : terms) a.add_term(G.evaluate(w), c);
  return a;
}

inline AlgebraElement unit_element(const MarkedGroup& G) {
  AlgebraElement a(G);
  a.add_term(G.identity(), 1);
  return a;
}

/// (a * b)(g) = sum_h a(h) b(h^-1 g), exact.
inline AlgebraElement convolve(const AlgebraElement& a, const AlgebraElement& b,
                               std::uint64_t support_cap = kDefaultSupportCap) {
  if (!a.group().same_group(b.group())) {
    throw ConfigError("convolution of elements over different groups");
  }
  const MarkedGroup& G = a.group();
  AlgebraElement out(G);
  for (const auto& [hk, ac] : a.coeffs()) {
    GroupElement h{hk};
    for (const auto& [gk, bc] : b.coeffs()) {
      out.add_term(G.multiply(h, GroupElement{gk}), ac * bc);
      if (out.support_size() > support_cap) {
        throw ResourceExceeded("convolution support exceeded cap " +
                               std::to_string(support_cap));
      }
    }
  }
  return out;
}

/// (sum a_g g)* = sum a_g g^-1 (rational coefficients: conjugation is id).
inline AlgebraElement involute(const AlgebraElement& a) {
  const MarkedGroup& G = a.group();
  AlgebraElement out(G);
  for (const auto& [k, c] : a.coeffs()) out.add_term(G.inverse(GroupElement{k}), c);
  return out;
}

/// Canonical trace: the coefficient at the identity.
inline Rat trace(const AlgebraElement& a) { return a.coefficient(GroupElement{}); }

/// tau(a * b) without materializing the product.
inline Rat trace_of_product(const AlgebraElement& a, const AlgebraElement& b) {
  const MarkedGroup& G = a.group();
  // iterate the smaller support
  const AlgebraElement& x = a.support_size() <= b.support_size() ? a : b;
  const AlgebraElement& y = a.support_size() <= b.support_size() ? b : a;
  Rat s = 0;
  for (const auto& [k, c] : x.coeffs()) {
    Rat other = y.coefficient(G.inverse(GroupElement{k}));
    if (sgn(other) != 0) s += c * other;
  }
  return s;
}

/// Averaging operator A_X = (1/|X|) sum lambda(x_i); with `symmetrized`,
/// A_{X+-} = (A_X + A_{X^-1})/2. Colliding generator images accumulate.
inline AlgebraElement averaging_operator(const MarkedGroup& G, bool symmetrized) {
  const size_t m = G.rank();
  AlgebraElement a(G);
  for (size_t i = 0; i < m; ++i) {
    GroupElement x = G.generator(i);
    if (symmetrized) {
      a.add_term(x, Rat(1, 2 * static_cast<long>(m)));
      a.add_term(G.inverse(x), Rat(1, 2 * static_cast<long>(m)));
    } else {
      a.add_term(x, Rat(1, static_cast<long>(m)));
    }
  }
  return a;
}

/// Exact traces tau((a* a)^n), n = 1..N, plus the certified lower bounds
/// tau^(1/2n) they induce for ||lambda(a)||. The bound sequence is verified
/// nondecreasing and capped by ||a||_1, both exactly.
struct TracePowerSequence {
  Rat l1;
  Rat l2sq;
  std::vector<Rat> traces;  // traces[n-1] = tau((a* a)^n)

  std::vector<double> bounds() const {
    std::vector<double> out;
    out.reserve(traces.size());
    for (size_t n = 1; n <= traces.size(); ++n) {
      out.push_back(root_k(traces[n - 1], 2 * static_cast<unsigned>(n)));
    }
    return out;
  }
};

inline TracePowerSequence power_trace_sequence(const AlgebraElement& a, int depth,
                                               std::uint64_t support_cap = kDefaultSupportCap) {
  if (depth < 1) throw ConfigError("trace depth must be >= 1");
  TracePowerSequence seq;
  seq.l1 = a.l1_norm();
  seq.l2sq = a.l2_norm_sq();
  AlgebraElement c = convolve(involute(a), a, support_cap);

  // tau(c^(2j)) = <c^j, c^j>, tau(c^(2j+1)) = <c^j, c^(j+1)>: only powers up
  // to ceil(depth/2) are ever materialized.
  seq.traces.assign(static_cast<size_t>(depth), Rat(0));
  AlgebraElement power = c;  // c^1
  seq.traces[0] = trace(c);
  for (int j = 1; 2 * j <= depth || 2 * j - 1 <= depth; ++j) {
    if (2 * j <= depth) seq.traces[static_cast<size_t>(2 * j - 1)] = trace_of_product(power, power);
    if (2 * j + 1 <= depth) {
      AlgebraElement next = convolve(power, c, support_cap);
      seq.traces[static_cast<size_t>(2 * j)] = trace_of_product(power, next);
      power = std::move(next);
    } else {
      break;
    }
  }

  if (seq.traces[0] != seq.l2sq) {
    throw InvariantViolated("tau(a* a) != ||a||_2^2");
  }
  Rat l1sq = seq.l1 * seq.l1;
  for (size_t n = 1; n <= seq.traces.size(); ++n) {
    const Rat& t = seq.traces[n - 1];
    if (sgn(t) < 0) throw InvariantViolated("negative trace power");
    if (!pow_leq(t, 1, l1sq, n)) {
      throw InvariantViolated("trace power exceeds l1 bound at n=" + std::to_string(n));
    }
    if (n >= 2 && !pow_leq(seq.traces[n - 2], n, t, n - 1)) {
      throw InvariantViolated("trace-power bounds not monotone at n=" + std::to_string(n));
    }
  }
  return seq;
}

// ---------------------------------------------------------------------------
// Homomorphisms given by generator images.
// ---------------------------------------------------------------------------

struct Homomorphism {
  MarkedGroup domain;
  MarkedGroup target;
  std::vector<Word> images;  // one word over target per domain generator

  Word map_word(const Word& w) const {
    Word out;
    for (const Letter& l : w) {
      const Word& im = images[static_cast<size_t>(l.gen)];
      Word piece = l.sign > 0 ? im : inverse_word(im);
      out.insert(out.end(), piece.begin(), piece.end());
    }
    return out;
  }

  GroupElement map_element(const GroupElement& g) const {
    return target.evaluate(map_word(domain.engine().element_word(g)));
  }

  /// Check every available relator of the domain dies in the target.
  void verify() const {
    if (images.size() != domain.rank()) {
      throw InvalidHomomorphism("generator image count mismatch");
    }
    const std::vector<Word>* rel = domain.engine().relators();
    if (!rel) return;
    for (const Word& r : *rel) {
      if (!target.evaluate(map_word(r)).is_identity()) {
        throw InvalidHomomorphism("relator \"" + domain.format(r) +
                                  "\" does not map to the identity");
      }
    }
  }
};

inline AlgebraElement apply_hom(const Homomorphism& h, const AlgebraElement& a) {
  AlgebraElement out(h.target);
  for (const auto& [k, c] : a.coeffs()) out.add_term(h.map_element(GroupElement{k}), c);
  return out;
}

// ---------------------------------------------------------------------------
// Element expressions for the CLI: "1 + 2*(x y^-1) - (x)".
// ---------------------------------------------------------------------------

inline AlgebraElement parse_element(const MarkedGroup& G, const std::string& text) {
  AlgebraElement a(G);
  WordParser wp(G.generators());
  size_t pos = 0;
  auto skip = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  int pending_sign = +1;
  bool first = true;
  for (;;) {
    skip();
    if (pos == text.size()) {
      if (first) throw ConfigError("empty element expression");
      break;
    }
    if (!first || text[pos] == '+' || text[pos] == '-') {
      if (text[pos] == '+') {
        pending_sign = +1;
        ++pos;
      } else if (text[pos] == '-') {
        pending_sign = -1;
        ++pos;
      } else if (!first) {
        throw ConfigError("expected '+' or '-' at column " + std::to_string(pos + 1) +
                          " in element expression");
      }
    }
    skip();
    // coefficient
    Rat coef = 1;
    if (pos < text.size() && (std::isdigit(static_cast<unsigned char>(text[pos])))) {
      size_t start = pos;
      while (pos < text.size() &&
             (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '/')) {
        ++pos;
      }
      coef = Rat(text.substr(start, pos - start));
      coef.canonicalize();
      skip();
      if (pos < text.size() && text[pos] == '*') {
        ++pos;
        skip();
      }
    }
    Word w;
    if (pos < text.size() && text[pos] == '(') {
      size_t depth = 1, start = ++pos;
      while (pos < text.size() && depth > 0) {
        if (text[pos] == '(') ++depth;
        if (text[pos] == ')') --depth;
        ++pos;
      }
      if (depth != 0) throw ConfigError("missing ')' in element expression");
      w = wp.parse(text.substr(start, pos - 1 - start));
    }
    a.add_term(G.evaluate(w), pending_sign * coef);
    pending_sign = +1;
    first = false;
  }
  return a;
}

}  // namespace marked
