#pragma once

#include <cstdint>
#include <cstring>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "marked/group.hpp"

namespace marked {

/// Wreath product Z_2 wr Z marked by (t, a_{-n}, ..., a_n), the limit group
/// of the H_n sequence. Elements are (finite lit-lamp set in Z, shift in Z)
/// under the convention t^-1 a_k t = a_{k+1}:
///   (S1, d1) (S2, d2) = (S1 xor (S2 - d1), d1 + d2).
class LamplighterEngine final : public Engine {
 public:
  explicit LamplighterEngine(int range) : range_(range) {
    if (range < 0) throw ConfigError("lamplighter range must be >= 0");
    gens_.push_back("t");
    for (int k = -range; k <= range; ++k) gens_.push_back("a_" + std::to_string(k));
  }

  const std::vector<std::string>& generators() const override { return gens_; }
  std::string kind() const override { return "lamplighter"; }
  int range() const { return range_; }

  Letter t_letter(int sign) const { return Letter{0, sign}; }
  Letter a_letter(int k) const { return Letter{k + range_ + 1, +1}; }

  struct State {
    std::set<std::int64_t> lamps;
    std::int64_t shift = 0;
  };

  State decode(const GroupElement& g) const {
    State s;
    if (g.bytes.empty()) return s;
    size_t pos = 0;
    std::memcpy(&s.shift, g.bytes.data(), 8);
    std::uint32_t count;
    std::memcpy(&count, g.bytes.data() + 8, 4);
    pos = 12;
    for (std::uint32_t i = 0; i < count; ++i) {
      std::int64_t p;
      std::memcpy(&p, g.bytes.data() + pos, 8);
      s.lamps.insert(p);
      pos += 8;
    }
    return s;
  }

  GroupElement encode(const State& s) const {
    if (s.shift == 0 && s.lamps.empty()) return GroupElement{};
    GroupElement g;
    g.bytes.resize(12 + 8 * s.lamps.size());
    std::memcpy(g.bytes.data(), &s.shift, 8);
    std::uint32_t count = static_cast<std::uint32_t>(s.lamps.size());
    std::memcpy(g.bytes.data() + 8, &count, 4);
    size_t pos = 12;
    for (std::int64_t p : s.lamps) {  // std::set iterates sorted: canonical
      std::memcpy(g.bytes.data() + pos, &p, 8);
      pos += 8;
    }
    return g;
  }

  GroupElement apply(const GroupElement& g, Letter l) const override {
    State s = decode(g);
    if (l.gen == 0) {
      s.shift += l.sign > 0 ? 1 : -1;
    } else {
      std::int64_t k = l.gen - range_ - 1;
      std::int64_t pos = k - s.shift;
      auto it = s.lamps.find(pos);
      if (it == s.lamps.end()) {
        s.lamps.insert(pos);
      } else {
        s.lamps.erase(it);
      }
    }
    return encode(s);
  }

  GroupElement multiply(const GroupElement& a, const GroupElement& b) const override {
    State x = decode(a), y = decode(b);
    for (std::int64_t p : y.lamps) {
      std::int64_t q = p - x.shift;
      auto it = x.lamps.find(q);
      if (it == x.lamps.end()) {
        x.lamps.insert(q);
      } else {
        x.lamps.erase(it);
      }
    }
    x.shift += y.shift;
    return encode(x);
  }

  GroupElement inverse(const GroupElement& a) const override {
    State s = decode(a);
    State r;
    r.shift = -s.shift;
    for (std::int64_t p : s.lamps) r.lamps.insert(p + s.shift);
    return encode(r);
  }

  Word element_word(const GroupElement& g) const override {
    // a_p = t^-p a_0 t^p; emit lamps left to right, then the shift
    State s = decode(g);
    Word w;
    std::int64_t cur = 0;
    for (std::int64_t p : s.lamps) {
      std::int64_t mv = -p - cur;
      for (std::int64_t i = 0; i < mv; ++i) w.push_back(t_letter(+1));
      for (std::int64_t i = 0; i < -mv; ++i) w.push_back(t_letter(-1));
      cur = -p;
      w.push_back(a_letter(0));
    }
    std::int64_t mv = s.shift - cur;
    for (std::int64_t i = 0; i < mv; ++i) w.push_back(t_letter(+1));
    for (std::int64_t i = 0; i < -mv; ++i) w.push_back(t_letter(-1));
    return w;
  }

 private:
  int range_;
  std::vector<std::string> gens_;
};

inline MarkedGroup make_lamplighter_group(int range) {
  return MarkedGroup(std::make_shared<LamplighterEngine>(range));
}

}  // namespace marked
