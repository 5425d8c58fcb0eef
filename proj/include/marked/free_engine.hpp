#pragma once

#include <memory>
#include <string>
#include <vector>

#include "marked/group.hpp"

namespace marked {

/// Free group on the given basis. Canonical form = the reduced word, one
/// byte per letter: 2*gen + (sign < 0).
class FreeEngine final : public Engine {
 public:
  explicit FreeEngine(std::vector<std::string> gens) : gens_(std::move(gens)) {}

  const std::vector<std::string>& generators() const override { return gens_; }
  std::string kind() const override { return "free"; }

  static char pack(Letter l) {
    return static_cast<char>(2 * l.gen + (l.sign < 0 ? 1 : 0));
  }
  static Letter unpack(char c) {
    unsigned char u = static_cast<unsigned char>(c);
    return Letter{static_cast<int>(u >> 1), (u & 1) ? -1 : +1};
  }

  GroupElement apply(const GroupElement& g, Letter l) const override {
    GroupElement out = g;
    char c = pack(l);
    if (!out.bytes.empty() && (static_cast<unsigned char>(out.bytes.back()) ^ 1u) ==
                                  static_cast<unsigned char>(c)) {
      out.bytes.pop_back();
    } else {
      out.bytes.push_back(c);
    }
    return out;
  }

  GroupElement multiply(const GroupElement& a, const GroupElement& b) const override {
    GroupElement out = a;
    for (char c : b.bytes) {
      if (!out.bytes.empty() && (static_cast<unsigned char>(out.bytes.back()) ^ 1u) ==
                                    static_cast<unsigned char>(c)) {
        out.bytes.pop_back();
      } else {
        out.bytes.push_back(c);
      }
    }
    return out;
  }

  GroupElement inverse(const GroupElement& a) const override {
    GroupElement out;
    out.bytes.reserve(a.bytes.size());
    for (auto it = a.bytes.rbegin(); it != a.bytes.rend(); ++it) {
      out.bytes.push_back(static_cast<char>(static_cast<unsigned char>(*it) ^ 1u));
    }
    return out;
  }

  Word element_word(const GroupElement& g) const override {
    Word w;
    w.reserve(g.bytes.size());
    for (char c : g.bytes) w.push_back(unpack(c));
    return w;
  }

 private:
  std::vector<std::string> gens_;
};

inline MarkedGroup make_free_group(std::vector<std::string> gens) {
  return MarkedGroup(std::make_shared<FreeEngine>(std::move(gens)));
}

inline MarkedGroup make_free_group(size_t rank, const std::string& stem = "x") {
  std::vector<std::string> gens;
  for (size_t i = 1; i <= rank; ++i) gens.push_back(stem + std::to_string(i));
  return make_free_group(std::move(gens));
}

}  // namespace marked
