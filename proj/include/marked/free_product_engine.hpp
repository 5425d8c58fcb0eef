#pragma once

#include <cstdint>
#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include "marked/group.hpp"

namespace marked {

/// One entry of a free-product normal form: which factor, and a nontrivial
/// element of it.
struct FactorSyllable {
  size_t factor = 0;
  GroupElement element;

  friend bool operator==(const FactorSyllable& a, const FactorSyllable& b) {
    return a.factor == b.factor && a.element == b.element;
  }
};

using NormalForm = std::vector<FactorSyllable>;

/// Free product of marked groups. Generators are the factors' generators in
/// order; the canonical form is the normal form of Lyndon-Schupp: an
/// alternating sequence of nontrivial factor elements.
class FreeProductEngine final : public Engine {
 public:
  explicit FreeProductEngine(std::vector<MarkedGroup> factors)
      : factors_(std::move(factors)) {
    for (size_t f = 0; f < factors_.size(); ++f) {
      const auto& names = factors_[f].generators();
      for (size_t j = 0; j < names.size(); ++j) {
        gens_.push_back(names[j]);
        owner_.push_back(f);
        local_.push_back(static_cast<int>(j));
      }
    }
    for (size_t i = 0; i < gens_.size(); ++i) {
      for (size_t j = i + 1; j < gens_.size(); ++j) {
        if (gens_[i] == gens_[j]) {
          throw ConfigError("free product factors share generator name \"" + gens_[i] + "\"");
        }
      }
    }
  }

  const std::vector<std::string>& generators() const override { return gens_; }
  std::string kind() const override { return "free-product"; }
  size_t factor_count() const { return factors_.size(); }
  const MarkedGroup& factor(size_t f) const { return factors_[f]; }

  NormalForm decode(const GroupElement& g) const {
    NormalForm nf;
    size_t pos = 0;
    const std::string& b = g.bytes;
    while (pos < b.size()) {
      std::uint32_t f, len;
      std::memcpy(&f, b.data() + pos, 4);
      std::memcpy(&len, b.data() + pos + 4, 4);
      pos += 8;
      nf.push_back(FactorSyllable{f, GroupElement{b.substr(pos, len)}});
      pos += len;
    }
    return nf;
  }

  GroupElement encode(const NormalForm& nf) const {
    GroupElement g;
    for (const FactorSyllable& s : nf) {
      std::uint32_t f = static_cast<std::uint32_t>(s.factor);
      std::uint32_t len = static_cast<std::uint32_t>(s.element.bytes.size());
      char hdr[8];
      std::memcpy(hdr, &f, 4);
      std::memcpy(hdr + 4, &len, 4);
      g.bytes.append(hdr, 8);
      g.bytes.append(s.element.bytes);
    }
    return g;
  }

  /// Append one nontrivial factor element, consolidating and cancelling.
  static void push_syllable(NormalForm& nf, size_t f, const GroupElement& e,
                            const MarkedGroup& factor_group) {
    if (e.is_identity()) return;
    if (!nf.empty() && nf.back().factor == f) {
      GroupElement prod = factor_group.multiply(nf.back().element, e);
      nf.pop_back();
      if (!prod.is_identity()) nf.push_back(FactorSyllable{f, prod});
    } else {
      nf.push_back(FactorSyllable{f, e});
    }
  }

  GroupElement apply(const GroupElement& g, Letter l) const override {
    NormalForm nf = decode(g);
    size_t f = owner_[static_cast<size_t>(l.gen)];
    GroupElement e = factors_[f].evaluate({Letter{local_[static_cast<size_t>(l.gen)], l.sign}});
    push_syllable(nf, f, e, factors_[f]);
    return encode(nf);
  }

  GroupElement multiply(const GroupElement& a, const GroupElement& b) const override {
    NormalForm nf = decode(a);
    for (const FactorSyllable& s : decode(b)) {
      push_syllable(nf, s.factor, s.element, factors_[s.factor]);
    }
    return encode(nf);
  }

  GroupElement inverse(const GroupElement& a) const override {
    NormalForm nf = decode(a);
    NormalForm out;
    for (auto it = nf.rbegin(); it != nf.rend(); ++it) {
      out.push_back(FactorSyllable{it->factor, factors_[it->factor].inverse(it->element)});
    }
    return encode(out);
  }

  Word element_word(const GroupElement& g) const override {
    Word w;
    for (const FactorSyllable& s : decode(g)) {
      Word fw = factors_[s.factor].engine().element_word(s.element);
      for (Letter l : fw) w.push_back(Letter{global_index(s.factor, l.gen), l.sign});
    }
    return w;
  }

  int global_index(size_t factor, int local_gen) const {
    int base = 0;
    for (size_t f = 0; f < factor; ++f) base += static_cast<int>(factors_[f].rank());
    return base + local_gen;
  }

  size_t owner_of(int global_gen) const { return owner_[static_cast<size_t>(global_gen)]; }

 private:
  std::vector<MarkedGroup> factors_;
  std::vector<std::string> gens_;
  std::vector<size_t> owner_;
  std::vector<int> local_;
};

inline MarkedGroup make_free_product(std::vector<MarkedGroup> factors) {
  return MarkedGroup(std::make_shared<FreeProductEngine>(std::move(factors)));
}

/// The sequence (p_1, ..., p_m) of Lyndon-Schupp: no two consecutive entries
/// in the same factor, no trivial entries; empty iff w is the identity.
inline NormalForm free_product_normal_form(const MarkedGroup& P, const Word& w) {
  const auto& eng = dynamic_cast<const FreeProductEngine&>(P.engine());
  return eng.decode(P.evaluate(w));
}

}  // namespace marked
