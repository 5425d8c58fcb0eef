#include <catch2/catch_amalgamated.hpp>

#include "marked/ball.hpp"
#include "marked/metabelian_engine.hpp"
#include "test_support.hpp"

using namespace marked;

namespace {
MarkedGroup klein_four() {
  FinitePresentation p;
  p.generators = {"a", "b"};
  WordParser wp(p.generators);
  p.relators = {wp.parse("a^2"), wp.parse("b^2"), wp.parse("(a b)^2")};
  return coset_enumerate(p);
}
}  // namespace

TEST_CASE("fox derivative base rules") {
  MarkedGroup G = klein_four();
  Word x{Letter{0, 1}};
  AlgebraElement d = fox_derivative(x, 0, G);
  CHECK(d.coefficient(G.identity()) == 1);
  CHECK(d.support_size() == 1);

  Word xinv{Letter{0, -1}};
  AlgebraElement dinv = fox_derivative(xinv, 0, G);
  CHECK(dinv.coefficient(G.evaluate(xinv)) == -1);
  CHECK(dinv.support_size() == 1);
}

TEST_CASE("fox derivative of a^4 in Z[Z_2 x Z_2] is 2 + 2a") {
  MarkedGroup G = klein_four();
  Word a4 = G.parse("a^4");
  AlgebraElement d = fox_derivative(a4, 0, G);
  CHECK(d.coefficient(G.identity()) == 2);
  CHECK(d.coefficient(G.evaluate(G.parse("a"))) == 2);
  CHECK(d.support_size() == 2);
}

TEST_CASE("fox product rule holds on random words") {
  MarkedGroup G = klein_four();
  testing::Rng rng(67);
  for (int t = 0; t < 200; ++t) {
    Word u = testing::random_word(rng, 2, rng.below(8));
    Word v = testing::random_word(rng, 2, rng.below(8));
    for (size_t gen = 0; gen < 2; ++gen) {
      AlgebraElement lhs = fox_derivative(concat(u, v), gen, G);
      // du + u dv
      AlgebraElement rhs = fox_derivative(u, gen, G);
      AlgebraElement dv = fox_derivative(v, gen, G);
      GroupElement ue = G.evaluate(u);
      for (const auto& [k, c] : dv.coeffs()) {
        rhs.add_term(G.multiply(ue, GroupElement{k}), c);
      }
      CHECK(lhs == rhs);
    }
  }
}

TEST_CASE("metabelian word problem: the three spec cases") {
  MetabelianizedPresentation M = metabelianize(klein_four());
  MarkedGroup base = M.base;
  CHECK(metabelian_is_trivial(M, base.parse("a^2 b^2 a^-2 b^-2")));
  CHECK_FALSE(metabelian_is_trivial(M, base.parse("a^4")));
  CHECK_FALSE(metabelian_is_trivial(M, base.parse("a")));  // short-circuit: not in N
}

TEST_CASE("metabelian triviality matches the cover engine's canonical forms") {
  MetabelianizedPresentation M = metabelianize(klein_four());
  testing::Rng rng(73);
  for (int t = 0; t < 300; ++t) {
    Word w = testing::random_word(rng, 2, rng.below(10));
    CHECK(metabelian_is_trivial(M, w) == M.cover.evaluate(w).is_identity());
  }
  testing::check_engine_axioms(M.cover, rng, 200, 8);
}

TEST_CASE("metabelian triviality implies membership in N") {
  MetabelianizedPresentation M = metabelianize(klein_four());
  testing::Rng rng(79);
  for (int t = 0; t < 300; ++t) {
    Word w = testing::random_word(rng, 2, rng.below(10));
    if (metabelian_is_trivial(M, w)) {
      CHECK(M.base.evaluate(w).is_identity());
    }
  }
}

TEST_CASE("metabelian triviality is a congruence (conjugation and products)") {
  MetabelianizedPresentation M = metabelianize(klein_four());
  testing::Rng rng(83);
  std::vector<Word> trivials;
  WordParser wp(M.base.generators());
  trivials.push_back(wp.parse("a^2 b^2 a^-2 b^-2"));
  trivials.push_back(wp.parse("b^2 a^2 b^-2 a^-2"));
  for (int t = 0; t < 100; ++t) {
    const Word& u = trivials[rng.below(trivials.size())];
    const Word& v = trivials[rng.below(trivials.size())];
    Word c = testing::random_word(rng, 2, rng.below(6));
    CHECK(metabelian_is_trivial(M, concat(u, v)));
    CHECK(metabelian_is_trivial(M, concat(concat(c, u), inverse_word(c))));
  }
}

TEST_CASE("Z^2 through the trivial base: ball of radius 1 has 5 elements") {
  FinitePresentation triv;
  triv.generators = {"a", "b"};
  triv.relators = {Word{Letter{0, 1}}, Word{Letter{1, 1}}};
  MetabelianizedPresentation M = metabelianize(coset_enumerate(triv));
  BallProfile ball = ball_enumerate(M.cover, 1);
  CHECK(ball.size() == 5);
  // commutativity
  CHECK(M.cover.evaluate(M.cover.parse("a b a^-1 b^-1")).is_identity());
  CHECK_FALSE(M.cover.evaluate(M.cover.parse("a b")).is_identity());
  testing::Rng rng(89);
  testing::check_engine_axioms(M.cover, rng, 200, 10);
}
