#include <catch2/catch_amalgamated.hpp>

#include <map>

#include "marked/algebra.hpp"
#include "marked/coset_engine.hpp"
#include "marked/free_engine.hpp"
#include "test_support.hpp"

using namespace marked;

namespace {

MarkedGroup cyclic(int n) {
  FinitePresentation p;
  p.generators = {"x"};
  Word r;
  for (int i = 0; i < n; ++i) r.push_back(Letter{0, 1});
  p.relators = {r};
  return coset_enumerate(p);
}

/// Independent oracle: walks with steps +1/-1 of length 2n from 0 to 0,
/// counted by a plain lattice DP (no group algebra involved).
Int lattice_path_count(int n) {
  std::map<int, Int> pos{{0, Int(1)}};
  for (int s = 0; s < 2 * n; ++s) {
    std::map<int, Int> next;
    for (const auto& [p, c] : pos) {
      next[p + 1] += c;
      next[p - 1] += c;
    }
    pos = std::move(next);
  }
  return pos[0];
}

AlgebraElement rand_element(const MarkedGroup& G, testing::Rng& rng, int terms, int len) {
  AlgebraElement a(G);
  for (int i = 0; i < terms; ++i) {
    long num = static_cast<long>(rng.below(7)) - 3;
    Rat c(num, 1 + static_cast<long>(rng.below(3)));
    c.canonicalize();
    a.add_term(G.evaluate(testing::random_word(rng, G.rank(), rng.below(len + 1))), c);
  }
  return a;
}

}  // namespace

TEST_CASE("build_element merges words that agree in the group") {
  MarkedGroup Z = make_free_group({"x"});
  AlgebraElement zero =
      build_element(Z, {{Z.parse("x"), 1}, {Z.parse("x^-1 x x"), -1}});
  CHECK(zero.is_zero());

  MarkedGroup F2 = make_free_group({"x1", "x2"});
  AlgebraElement two = build_element(F2, {{F2.parse("x1"), 1}, {F2.parse("x2"), 1}});
  CHECK(two.support_size() == 2);

  MarkedGroup Z3 = cyclic(3);
  AlgebraElement merged = build_element(Z3, {{Z3.parse("x"), 1}, {Z3.parse("x^4"), 2}});
  CHECK(merged.support_size() == 1);
  CHECK(merged.coefficient(Z3.evaluate(Z3.parse("x"))) == 3);
}

TEST_CASE("convolution: unit, Z and Z_2 expansions") {
  MarkedGroup Z = make_free_group({"x"});
  AlgebraElement a = build_element(Z, {{Word{}, 1}, {Z.parse("x"), 1}});
  CHECK(convolve(a, unit_element(Z)) == a);

  AlgebraElement b = build_element(Z, {{Word{}, 1}, {Z.parse("x^-1"), 1}});
  AlgebraElement prod = convolve(a, b);
  CHECK(prod.coefficient(Z.identity()) == 2);
  CHECK(prod.coefficient(Z.evaluate(Z.parse("x"))) == 1);
  CHECK(prod.coefficient(Z.evaluate(Z.parse("x^-1"))) == 1);
  CHECK(prod.support_size() == 3);

  MarkedGroup Z2 = cyclic(2);
  AlgebraElement c = build_element(Z2, {{Word{}, 1}, {Z2.parse("x"), 1}});
  AlgebraElement sq = convolve(c, c);
  CHECK(sq.coefficient(Z2.identity()) == 2);
  CHECK(sq.coefficient(Z2.evaluate(Z2.parse("x"))) == 2);
}

TEST_CASE("convolution respects the support cap") {
  MarkedGroup F = make_free_group({"x", "y"});
  AlgebraElement a(F);
  for (const Word& w : short_reduced_words(2, 3)) a.add_term(F.evaluate(w), 1);
  CHECK_THROWS_AS(convolve(a, a, /*support_cap=*/10), ResourceExceeded);
}

TEST_CASE("involution: examples and the antihomomorphism law") {
  MarkedGroup Z = make_free_group({"x"});
  AlgebraElement x = build_element(Z, {{Z.parse("x"), 1}});
  CHECK(involute(x) == build_element(Z, {{Z.parse("x^-1"), 1}}));

  AlgebraElement sa = build_element(
      Z, {{Word{}, 2}, {Z.parse("x"), 1}, {Z.parse("x^-1"), 1}});
  CHECK(involute(sa) == sa);

  MarkedGroup F = make_free_group({"x", "y"});
  testing::Rng rng(97);
  for (int t = 0; t < 50; ++t) {
    AlgebraElement a = rand_element(F, rng, 4, 4);
    AlgebraElement b = rand_element(F, rng, 4, 4);
    CHECK(involute(convolve(a, b)) == convolve(involute(b), involute(a)));
  }
}

TEST_CASE("trace reads the identity coefficient") {
  MarkedGroup Z = make_free_group({"x"});
  AlgebraElement a = build_element(Z, {{Word{}, 3}, {Z.parse("x"), 2}});
  CHECK(trace(a) == 3);
  CHECK(trace(build_element(Z, {{Z.parse("x"), 1}})) == 0);
  AlgebraElement one_plus_x = build_element(Z, {{Word{}, 1}, {Z.parse("x"), 1}});
  CHECK(trace(convolve(involute(one_plus_x), one_plus_x)) == 2);
}

TEST_CASE("trace cyclicity on random pairs, exactly") {
  MarkedGroup F = make_free_group({"x", "y"});
  MarkedGroup B = burnside_group(2, 3);
  testing::Rng rng(101);
  for (int t = 0; t < 60; ++t) {
    AlgebraElement a = rand_element(F, rng, 4, 4);
    AlgebraElement b = rand_element(F, rng, 4, 4);
    CHECK(trace(convolve(a, b)) == trace(convolve(b, a)));
    AlgebraElement c = rand_element(B, rng, 4, 5);
    AlgebraElement d = rand_element(B, rng, 4, 5);
    CHECK(trace(convolve(c, d)) == trace(convolve(d, c)));
    CHECK(trace_of_product(c, d) == trace(convolve(c, d)));
  }
}

TEST_CASE("averaging operator: plain, symmetrized, and the collision rule") {
  MarkedGroup F = make_free_group({"x1", "x2"});
  AlgebraElement ax = averaging_operator(F, false);
  CHECK(ax.coefficient(F.evaluate(F.parse("x1"))) == Rat(1, 2));
  CHECK(ax.coefficient(F.evaluate(F.parse("x2"))) == Rat(1, 2));
  CHECK(ax.support_size() == 2);

  MarkedGroup Z = make_free_group({"x"});
  AlgebraElement az = averaging_operator(Z, true);
  CHECK(az.coefficient(Z.evaluate(Z.parse("x"))) == Rat(1, 2));
  CHECK(az.coefficient(Z.evaluate(Z.parse("x^-1"))) == Rat(1, 2));

  MarkedGroup Z2 = cyclic(2);
  AlgebraElement az2 = averaging_operator(Z2, true);
  CHECK(az2.support_size() == 1);
  CHECK(az2.coefficient(Z2.evaluate(Z2.parse("x"))) == 1);  // 1/2 + 1/2 collide
}

TEST_CASE("power traces: unitary element gives constant 1") {
  MarkedGroup Z = make_free_group({"x"});
  AlgebraElement x = build_element(Z, {{Z.parse("x"), 1}});
  TracePowerSequence seq = power_trace_sequence(x, 8);
  for (const Rat& t : seq.traces) CHECK(t == 1);
  for (double b : seq.bounds()) CHECK(b == Catch::Approx(1.0));
}

TEST_CASE("power traces: 1 + x against the independent lattice oracle") {
  MarkedGroup Z = make_free_group({"x"});
  AlgebraElement a = build_element(Z, {{Word{}, 1}, {Z.parse("x"), 1}});
  TracePowerSequence seq = power_trace_sequence(a, 10);
  for (int n = 1; n <= 10; ++n) {
    CHECK(seq.traces[static_cast<size_t>(n - 1)] == Rat(lattice_path_count(n)));
  }
}

TEST_CASE("power traces: x1 + x2 in F_2 collapses to central binomials") {
  MarkedGroup F = make_free_group({"x1", "x2"});
  AlgebraElement a = build_element(F, {{F.parse("x1"), 1}, {F.parse("x2"), 1}});
  TracePowerSequence seq = power_trace_sequence(a, 8);
  for (int n = 1; n <= 8; ++n) {
    CHECK(seq.traces[static_cast<size_t>(n - 1)] == Rat(lattice_path_count(n)));
  }
}

TEST_CASE("power trace invariants: l2, l1 and left unitary invariance") {
  MarkedGroup F = make_free_group({"x", "y"});
  testing::Rng rng(103);
  for (int t = 0; t < 25; ++t) {
    AlgebraElement a = rand_element(F, rng, 3, 3);
    if (a.is_zero()) continue;
    TracePowerSequence seq = power_trace_sequence(a, 4);
    CHECK(seq.traces[0] == a.l2_norm_sq());
    // left translate: (ga)* (ga) = a* a
    GroupElement g = F.evaluate(testing::random_word(rng, 2, 3));
    AlgebraElement ga(F);
    for (const auto& [k, c] : a.coeffs()) ga.add_term(F.multiply(g, GroupElement{k}), c);
    TracePowerSequence seq2 = power_trace_sequence(ga, 4);
    for (int n = 0; n < 4; ++n) CHECK(seq.traces[(size_t)n] == seq2.traces[(size_t)n]);
  }
}

TEST_CASE("element expression parser") {
  MarkedGroup F = make_free_group({"x", "y"});
  AlgebraElement a = parse_element(F, "1 + 2*(x y^-1) - (x)");
  CHECK(a.coefficient(F.identity()) == 1);
  CHECK(a.coefficient(F.evaluate(F.parse("x y^-1"))) == 2);
  CHECK(a.coefficient(F.evaluate(F.parse("x"))) == -1);
  AlgebraElement b = parse_element(F, "1/2 (x) + 1/2 (x^-1)");
  CHECK(b.coefficient(F.evaluate(F.parse("x"))) == Rat(1, 2));
  CHECK_THROWS_AS(parse_element(F, ""), ConfigError);
  CHECK_THROWS_AS(parse_element(F, "(z)"), ConfigError);
}
