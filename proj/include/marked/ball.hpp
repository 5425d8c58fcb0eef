#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "marked/group.hpp"
#include "marked/rational.hpp"

namespace marked {

/// Exact reduced-word counts per element per length, for all elements
/// reachable by reduced words of length <= radius.
struct BallProfile {
  int radius = 0;
  /// element -> counts[k] = number of reduced words of length k landing there
  std::map<GroupElement, std::vector<Int>> counts;
  /// layer_totals[k] = sum over elements of counts[k]; equals 2m(2m-1)^(k-1)
  std::vector<Int> layer_totals;

  size_t size() const { return counts.size(); }
  bool contains(const GroupElement& g) const { return counts.count(g) != 0; }

  /// Word metric distance from the identity (first length with a word).
  int distance(const GroupElement& g) const {
    const auto& c = counts.at(g);
    for (size_t k = 0; k < c.size(); ++k) {
      if (c[k] != 0) return static_cast<int>(k);
    }
    return -1;
  }
};

/// DP over (element, last letter) states; never enumerates raw words.
inline BallProfile ball_enumerate(const MarkedGroup& G, int radius,
                                  std::uint64_t element_cap = 5'000'000) {
  if (radius < 0) throw ConfigError("ball radius must be >= 0");
  const size_t m = G.rank();
  BallProfile ball;
  ball.radius = radius;
  ball.layer_totals.assign(static_cast<size_t>(radius) + 1, Int(0));
  ball.layer_totals[0] = 1;

  struct State {
    GroupElement g;
    Letter last;
  };
  // key: element bytes + one packed letter byte
  auto key_of = [](const GroupElement& g, Letter l) {
    std::string k = g.bytes;
    k.push_back(static_cast<char>(2 * l.gen + (l.sign < 0 ? 1 : 0)));
    return k;
  };

  GroupElement id = G.identity();
  ball.counts[id] = std::vector<Int>(static_cast<size_t>(radius) + 1, Int(0));
  ball.counts[id][0] = 1;

  std::unordered_map<std::string, Int> layer;
  std::unordered_map<std::string, State> meta;
  layer[std::string()] = 1;  // the empty word; no last letter
  meta[std::string()] = State{id, Letter{-1, +1}};

  for (int k = 1; k <= radius; ++k) {
    std::unordered_map<std::string, Int> next;
    std::unordered_map<std::string, State> next_meta;
    for (const auto& [key, cnt] : layer) {
      const State& st = meta.at(key);
      for (size_t gi = 0; gi < m; ++gi) {
        for (int s : {+1, -1}) {
          Letter l{static_cast<int>(gi), s};
          if (st.last.gen >= 0 && mutually_inverse(st.last, l)) continue;
          GroupElement h = G.engine().apply(st.g, l);
          std::string nk = key_of(h, l);
          auto it = next.find(nk);
          if (it == next.end()) {
            next.emplace(nk, cnt);
            next_meta.emplace(nk, State{h, l});
          } else {
            it->second += cnt;
          }
        }
      }
    }
    for (const auto& [key, cnt] : next) {
      const State& st = next_meta.at(key);
      auto it = ball.counts.find(st.g);
      if (it == ball.counts.end()) {
        if (ball.counts.size() >= element_cap) {
          throw ResourceExceeded("ball enumeration exceeded element cap " +
                                 std::to_string(element_cap));
        }
        it = ball.counts.emplace(st.g, std::vector<Int>(static_cast<size_t>(radius) + 1, Int(0)))
                 .first;
      }
      it->second[static_cast<size_t>(k)] += cnt;
      ball.layer_totals[static_cast<size_t>(k)] += cnt;
    }
    layer = std::move(next);
    meta = std::move(next_meta);
  }

  // conservation: totals at length k must equal 2m(2m-1)^(k-1)
  Int expect = 1;
  for (int k = 1; k <= radius; ++k) {
    if (k == 1) {
      expect = Int(2 * static_cast<long>(m));
    } else {
      expect *= Int(2 * static_cast<long>(m) - 1);
    }
    if (ball.layer_totals[static_cast<size_t>(k)] != expect) {
      throw InvariantViolated("reduced-word conservation failed at length " + std::to_string(k));
    }
  }
  return ball;
}

/// Full closure for finite groups: expand until no new elements appear.
inline std::vector<GroupElement> enumerate_finite(const MarkedGroup& G,
                                                  std::uint64_t element_cap = 5'000'000) {
  std::vector<GroupElement> order;
  std::unordered_map<std::string, bool> seen;
  order.push_back(G.identity());
  seen[order[0].bytes] = true;
  for (size_t i = 0; i < order.size(); ++i) {
    for (size_t gi = 0; gi < G.rank(); ++gi) {
      for (int s : {+1, -1}) {
        GroupElement h = G.engine().apply(order[i], Letter{static_cast<int>(gi), s});
        if (!seen.count(h.bytes)) {
          if (order.size() >= element_cap) {
            throw ResourceExceeded("closure exceeded element cap");
          }
          seen[h.bytes] = true;
          order.push_back(h);
        }
      }
    }
  }
  return order;
}

}  // namespace marked
