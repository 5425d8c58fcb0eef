#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "marked/coset_engine.hpp"
#include "marked/criteria.hpp"
#include "marked/metabelian_engine.hpp"
#include "test_support.hpp"

using namespace marked;

namespace {
MarkedGroup z_squared() {
  FinitePresentation triv;
  triv.generators = {"a", "b"};
  triv.relators = {Word{Letter{0, 1}}, Word{Letter{1, 1}}};
  return metabelianize(coset_enumerate(triv)).cover;
}
}  // namespace

TEST_CASE("powers average: abelian groups give value exactly 1") {
  MarkedGroup Z2 = z_squared();
  std::vector<Word> Y{Z2.parse("a"), Z2.parse("b"), Z2.parse("a b")};
  PowersAverageReport rep = powers_average_bounds(Z2, Z2.parse("a b^-1"), Y, 6);
  CHECK(rep.conjugate_support == 1);
  for (double b : rep.estimate.bounds) CHECK(b == Catch::Approx(1.0));
}

TEST_CASE("powers average: Y = {1} gives value 1") {
  MarkedGroup F = make_free_group({"x1", "x2"});
  PowersAverageReport rep = powers_average_bounds(F, F.parse("x1"), {Word{}}, 6);
  for (double b : rep.estimate.bounds) CHECK(b == Catch::Approx(1.0));
}

TEST_CASE("powers average: free conjugates match the free-basis oracle") {
  MarkedGroup F = make_free_group({"x1", "x2"});
  std::vector<Word> Y{Word{}, F.parse("x2"), F.parse("x2 x2")};
  PowersAverageReport rep = powers_average_bounds(F, F.parse("x1"), Y, 5);
  // the three conjugates freely generate, so the traces agree with the
  // rank-3 averaging oracle exactly
  auto oracle = free_averaging_trace_oracle(3, 5);
  for (int n = 1; n <= 5; ++n) {
    CHECK(rep.estimate.traces[static_cast<size_t>(n - 1)] ==
          oracle[static_cast<size_t>(n - 1)]);
  }
  // deep extrapolation through the oracle: 2 sqrt(2)/3
  SpectralEstimate deep = estimate_from_traces(free_averaging_trace_oracle(3, 60), "oracle");
  CHECK(std::fabs(deep.extrapolated - 2.0 * std::sqrt(2.0) / 3.0) < 0.01);
}

TEST_CASE("powers average rejects trivial g and empty Y") {
  MarkedGroup F = make_free_group(2);
  CHECK_THROWS_AS(powers_average_bounds(F, Word{}, {Word{}}, 3), ConfigError);
  CHECK_THROWS_AS(powers_average_bounds(F, F.parse("x1"), {}, 3), ConfigError);
}

TEST_CASE("conjugate/commutator identity on randomized instances") {
  testing::Rng rng(107);
  MarkedGroup F = make_free_group(2);
  MarkedGroup B = burnside_group(2, 3);
  MarkedGroup H = make_hn_group(1);
  std::vector<MarkedGroup> gs{F, B, H};
  int done = 0;
  while (done < 30) {
    const MarkedGroup& G = gs[rng.below(gs.size())];
    Word g = testing::random_word(rng, G.rank(), 1 + rng.below(4));
    if (G.evaluate(g).is_identity()) continue;
    std::vector<Word> Y;
    size_t ny = 1 + rng.below(3);
    for (size_t i = 0; i < ny; ++i) Y.push_back(testing::random_word(rng, G.rank(), rng.below(4)));
    Word u = testing::random_word(rng, G.rank(), rng.below(4));
    // powers_average_bounds throws InvariantViolated if the identities fail
    PowersAverageReport rep = powers_average_bounds(G, g, Y, 3, u);
    CHECK(rep.identities_verified);
    ++done;
  }
}

TEST_CASE("trace monotonicity: F_2 -> Z collapse is strict from n = 1") {
  MarkedGroup F = make_free_group({"x1", "x2"});
  MarkedGroup Z = make_free_group({"x"});
  AlgebraElement a = build_element(F, {{F.parse("x1"), 1}, {F.parse("x2"), 1}});
  Homomorphism eps{F, Z, {Z.parse("x"), Z.parse("x")}};
  MonotonicityResult res = trace_monotonicity_check(a, eps, 8);
  CHECK(res.passed);
  for (int n = 1; n <= 8; ++n) {
    // C(2n, n) < 4^n strictly
    CHECK(res.domain_traces[static_cast<size_t>(n - 1)] <
          res.target_traces[static_cast<size_t>(n - 1)]);
  }
}

TEST_CASE("trace monotonicity: abelianization gives termwise equality") {
  MarkedGroup F = make_free_group({"x1", "x2"});
  MarkedGroup Z2 = z_squared();
  AlgebraElement a = build_element(F, {{F.parse("x1"), 1}, {F.parse("x2"), 1}});
  Homomorphism eps{F, Z2, {Z2.parse("a"), Z2.parse("b")}};
  MonotonicityResult res = trace_monotonicity_check(a, eps, 6);
  CHECK(res.passed);
  for (int n = 1; n <= 6; ++n) {
    CHECK(res.domain_traces[static_cast<size_t>(n - 1)] ==
          res.target_traces[static_cast<size_t>(n - 1)]);
  }
}

TEST_CASE("trace domination: x vs x + y") {
  MarkedGroup F = make_free_group({"x", "y"});
  AlgebraElement a = build_element(F, {{F.parse("x"), 1}});
  AlgebraElement b = build_element(F, {{F.parse("x"), 1}, {F.parse("y"), 1}});
  MonotonicityResult res = trace_domination_check(a, b, 6);
  CHECK(res.passed);
  for (int n = 1; n <= 6; ++n) {
    CHECK(res.domain_traces[static_cast<size_t>(n - 1)] == 1);
    CHECK(res.target_traces[static_cast<size_t>(n - 1)] >= 1);
  }
}

TEST_CASE("invalid homomorphism is rejected") {
  FinitePresentation p;
  p.generators = {"x"};
  WordParser wp(p.generators);
  p.relators = {wp.parse("x^3")};
  MarkedGroup Z3 = coset_enumerate(p);
  MarkedGroup Z = make_free_group({"t"});
  AlgebraElement a = build_element(Z3, {{Z3.parse("x"), 1}});
  Homomorphism bad{Z3, Z, {Z.parse("t")}};  // x^3 -> t^3 != 1
  CHECK_THROWS_AS(trace_monotonicity_check(a, bad, 3), InvalidHomomorphism);
}

TEST_CASE("rebalance homomorphism: the three spec cases") {
  RebalanceResult r52 = rebalance_homomorphism(5, 2);
  CHECK(r52.q == 2);
  CHECK(r52.r == 1);
  CHECK(r52.image.coefficient(r52.hom.target.identity()) == 1);
  CHECK(r52.image.coefficient(r52.hom.target.generator(0)) == 2);
  CHECK(r52.image.coefficient(r52.hom.target.generator(1)) == 2);

  RebalanceResult r33 = rebalance_homomorphism(3, 3);
  CHECK(r33.q == 1);
  CHECK(r33.r == 0);
  CHECK(r33.image.coefficient(r33.hom.target.identity()) == 0);

  RebalanceResult r63 = rebalance_homomorphism(6, 3);
  CHECK(r63.q == 2);
  CHECK(r63.r == 0);
  for (int j = 0; j < 3; ++j) {
    CHECK(r63.image.coefficient(r63.hom.target.generator(static_cast<size_t>(j))) == 2);
  }
  // the image identity itself is asserted inside rebalance_homomorphism
  for (long k = 1; k <= 7; ++k) {
    for (long l = 1; l <= k; ++l) CHECK_NOTHROW(rebalance_homomorphism(k, l));
  }
}

TEST_CASE("subgroup restriction: commutator sums computed in the subgroup agree") {
  // <x2^k x1 x2^-k> is free of rank 3; computing inside that free engine
  // must give the same traces as inside F_2 (both exact)
  MarkedGroup F = make_free_group({"x1", "x2"});
  std::vector<Word> Y{Word{}, F.parse("x2"), F.parse("x2 x2")};
  AlgebraElement s(F);
  for (const Word& y : Y) {
    s.add_term(F.evaluate(concat(concat(y, F.parse("x1")), inverse_word(y))), 1);
  }
  TracePowerSequence in_g = power_trace_sequence(s, 5);
  MarkedGroup H = make_free_group({"h1", "h2", "h3"});
  AlgebraElement sh(H);
  for (int i = 0; i < 3; ++i) sh.add_term(H.generator(static_cast<size_t>(i)), 1);
  TracePowerSequence in_h = power_trace_sequence(sh, 5);
  for (int n = 1; n <= 5; ++n) {
    CHECK(in_g.traces[static_cast<size_t>(n - 1)] == in_h.traces[static_cast<size_t>(n - 1)]);
  }
}

TEST_CASE("infinitesimal report on the free family") {
  std::vector<MarkedGroup> family;
  for (size_t i = 2; i <= 5; ++i) family.push_back(make_free_group(i));
  SequenceReport rep = infinitesimal_report(family, 60, 10, 3);
  REQUIRE(rep.rows.size() == 4);
  for (size_t i = 0; i < 4; ++i) {
    const IndexReport& r = rep.rows[i];
    REQUIRE(r.error.empty());
    double m = static_cast<double>(r.rank);
    CHECK(std::fabs(r.ax_bound - 2.0 * std::sqrt(m - 1.0) / m) < 0.01);
    CHECK(std::fabs(r.rho_bound - std::sqrt(2.0 * m - 1.0) / m) < 0.01);
    CHECK(r.girth_text.starts_with(">"));
  }
  CHECK(rep.ax_monotone_decreasing);
  CHECK_FALSE(rep.flagged_not_infinitesimal);
}

TEST_CASE("infinitesimal report flags a constant amenable family") {
  std::vector<MarkedGroup> family{z_squared(), z_squared()};
  SequenceReport rep = infinitesimal_report(family, 24, 12, 3);
  REQUIRE(rep.rows.size() == 2);
  CHECK(rep.rows[0].error.empty());
  CHECK(rep.rows[0].rho_bound > 0.9);
  CHECK(rep.flagged_not_infinitesimal);
}
