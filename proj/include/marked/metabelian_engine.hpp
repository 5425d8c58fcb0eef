#pragma once

#include <cstdint>
#include <cstring>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "marked/algebra.hpp"
#include "marked/coset_engine.hpp"
#include "marked/group.hpp"

namespace marked {

/// Free Fox derivative d(w)/d(x) evaluated in ZG for a finite quotient G,
/// by the rules d(uv) = du + u dv, dx/dx = 1, dx^-1/dx = -x^-1.
inline AlgebraElement fox_derivative(const Word& w, size_t gen, const MarkedGroup& G) {
  if (!G.engine().finite()) {
    throw NotApplicable("fox_derivative requires a finite, fully enumerated quotient");
  }
  AlgebraElement d(G);
  GroupElement prefix = G.identity();
  for (const Letter& l : w) {
    if (static_cast<size_t>(l.gen) == gen) {
      if (l.sign > 0) {
        d.add_term(prefix, 1);  // u * dx/dx = u * 1
      } else {
        // u * d(x^-1)/dx = -u x^-1
        d.add_term(G.engine().apply(prefix, l), -1);
      }
    }
    prefix = G.engine().apply(prefix, l);
  }
  return d;
}

/// F(X)/[N,N] for a finite quotient G = F(X)/N, realized through the Magnus
/// embedding: w is determined by (its image in G, all Fox derivatives in ZG).
/// Canonical form serializes that pair; equality is exact and the word
/// problem is decidable because G is fully enumerated.
class MetabelianEngine final : public Engine {
 public:
  explicit MetabelianEngine(MarkedGroup base) : base_(std::move(base)) {
    if (!base_.engine().finite()) {
      throw ConfigError("metabelianized engine requires a finite base quotient");
    }
    coset_ = dynamic_cast<const CosetEngine*>(&base_.engine());
    if (!coset_) throw ConfigError("metabelianized engine requires a coset-table base");
    gens_ = base_.generators();
  }

  const std::vector<std::string>& generators() const override { return gens_; }
  std::string kind() const override { return "metabelianized"; }
  const MarkedGroup& base() const { return base_; }

  struct Form {
    std::uint32_t image = 0;                        // index in the base group
    std::vector<std::map<std::uint32_t, Int>> fox;  // one ZG vector per generator
  };

  Form decode(const GroupElement& g) const {
    Form f;
    f.fox.resize(gens_.size());
    if (g.bytes.empty()) return f;
    size_t pos = 0;
    std::memcpy(&f.image, g.bytes.data(), 4);
    pos = 4;
    for (size_t i = 0; i < gens_.size(); ++i) {
      std::uint32_t cnt;
      std::memcpy(&cnt, g.bytes.data() + pos, 4);
      pos += 4;
      for (std::uint32_t j = 0; j < cnt; ++j) {
        std::uint32_t idx, len;
        std::memcpy(&idx, g.bytes.data() + pos, 4);
        std::memcpy(&len, g.bytes.data() + pos + 4, 4);
        pos += 8;
        f.fox[i][idx] = Int(g.bytes.substr(pos, len));
        pos += len;
      }
    }
    return f;
  }

  GroupElement encode(const Form& f) const {
    bool trivial = f.image == 0;
    for (const auto& v : f.fox) {
      if (!v.empty()) trivial = false;
    }
    if (trivial) return GroupElement{};
    GroupElement g;
    g.bytes.resize(4);
    std::memcpy(g.bytes.data(), &f.image, 4);
    for (const auto& v : f.fox) {
      std::uint32_t cnt = static_cast<std::uint32_t>(v.size());
      char buf[4];
      std::memcpy(buf, &cnt, 4);
      g.bytes.append(buf, 4);
      for (const auto& [idx, c] : v) {  // std::map: sorted, canonical
        std::string digits = c.get_str();
        std::uint32_t len = static_cast<std::uint32_t>(digits.size());
        char hdr[8];
        std::memcpy(hdr, &idx, 4);
        std::memcpy(hdr + 4, &len, 4);
        g.bytes.append(hdr, 8);
        g.bytes.append(digits);
      }
    }
    return g;
  }

  GroupElement apply(const GroupElement& g, Letter l) const override {
    Form f = decode(g);
    GroupElement pre = coset_->element_at(f.image);
    size_t gi = static_cast<size_t>(l.gen);
    if (l.sign > 0) {
      add_at(f.fox[gi], f.image, Int(1));
    } else {
      GroupElement shifted = base_.engine().apply(pre, l);
      add_at(f.fox[gi], coset_->index_of(shifted), Int(-1));
    }
    f.image = coset_->index_of(base_.engine().apply(pre, l));
    return encode(f);
  }

  /// Magnus pair multiplication: (g1, D1)(g2, D2) = (g1 g2, D1 + g1 D2).
  GroupElement multiply(const GroupElement& a, const GroupElement& b) const override {
    Form fa = decode(a), fb = decode(b);
    GroupElement ga = coset_->element_at(fa.image);
    for (size_t i = 0; i < gens_.size(); ++i) {
      for (const auto& [idx, c] : fb.fox[i]) {
        GroupElement shifted = base_.multiply(ga, coset_->element_at(idx));
        add_at(fa.fox[i], coset_->index_of(shifted), c);
      }
    }
    fa.image = coset_->index_of(base_.multiply(ga, coset_->element_at(fb.image)));
    return encode(fa);
  }

  GroupElement inverse(const GroupElement& a) const override {
    Form f = decode(a);
    Form r;
    r.fox.resize(gens_.size());
    GroupElement ginv = base_.inverse(coset_->element_at(f.image));
    r.image = coset_->index_of(ginv);
    for (size_t i = 0; i < gens_.size(); ++i) {
      for (const auto& [idx, c] : f.fox[i]) {
        GroupElement shifted = base_.multiply(ginv, coset_->element_at(idx));
        add_at(r.fox[i], coset_->index_of(shifted), -c);
      }
    }
    return encode(r);
  }

 private:
  static void add_at(std::map<std::uint32_t, Int>& v, std::uint32_t idx, const Int& c) {
    auto it = v.find(idx);
    if (it == v.end()) {
      if (sgn(c) != 0) v.emplace(idx, c);
    } else {
      it->second += c;
      if (sgn(it->second) == 0) v.erase(it);
    }
  }

  MarkedGroup base_;
  const CosetEngine* coset_;
  std::vector<std::string> gens_;
};

/// A finite base quotient together with its metabelianized cover F/[N,N].
struct MetabelianizedPresentation {
  MarkedGroup base;   // G = F(X)/N, finite, fully enumerated
  MarkedGroup cover;  // F(X)/[N,N]
};

inline MetabelianizedPresentation metabelianize(const MarkedGroup& finite_base) {
  MetabelianizedPresentation p;
  p.base = finite_base;
  p.cover = MarkedGroup(std::make_shared<MetabelianEngine>(finite_base));
  return p;
}

/// w = 1 in F/[N,N] iff w lies in N and every Fox derivative vanishes in ZG
/// (Magnus embedding). The N-membership test short-circuits.
inline bool metabelian_is_trivial(const MetabelianizedPresentation& M, const Word& w) {
  if (!M.base.evaluate(w).is_identity()) return false;  // w not even in N
  for (size_t i = 0; i < M.base.rank(); ++i) {
    if (!fox_derivative(w, i, M.base).is_zero()) return false;
  }
  return true;
}

}  // namespace marked
