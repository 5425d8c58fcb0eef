#pragma once

#include <cstdint>
#include <vector>

#include "marked/group.hpp"

namespace marked::testing {

// deterministic PRNG so failures reproduce
struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  std::uint64_t below(std::uint64_t n) { return next() % n; }
};

inline Word random_word(Rng& rng, size_t rank, size_t length) {
  Word w;
  for (size_t i = 0; i < length; ++i) {
    w.push_back(Letter{static_cast<int>(rng.below(rank)), (rng.next() & 1) ? +1 : -1});
  }
  return w;
}

/// Group axioms through the canonical forms: evaluate is a homomorphism and
/// inverses work, on `trials` random word pairs.
inline void check_engine_axioms(const MarkedGroup& G, Rng& rng, int trials, size_t max_len) {
  for (int t = 0; t < trials; ++t) {
    Word u = random_word(rng, G.rank(), rng.below(max_len + 1));
    Word v = random_word(rng, G.rank(), rng.below(max_len + 1));
    GroupElement gu = G.evaluate(u);
    GroupElement gv = G.evaluate(v);
    if (!(G.evaluate(concat(u, v)) == G.multiply(gu, gv))) {
      throw InvariantViolated("evaluate(uv) != evaluate(u) evaluate(v)");
    }
    if (!G.multiply(gu, G.inverse(gu)).is_identity()) {
      throw InvariantViolated("g g^-1 != 1");
    }
    if (!(G.evaluate(inverse_word(u)) == G.inverse(gu))) {
      throw InvariantViolated("evaluate(u^-1) != evaluate(u)^-1");
    }
  }
}

}  // namespace marked::testing
