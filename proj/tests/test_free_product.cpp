#include <catch2/catch_amalgamated.hpp>

#include "marked/coset_engine.hpp"
#include "marked/free_engine.hpp"
#include "marked/free_product_engine.hpp"
#include "test_support.hpp"

using namespace marked;

namespace {
MarkedGroup z3_star_z() {
  FinitePresentation p;
  p.generators = {"a"};
  p.relators = {Word{Letter{0, 1}, Letter{0, 1}, Letter{0, 1}}};
  MarkedGroup z3 = coset_enumerate(p);
  MarkedGroup fx = make_free_group({"x"});
  return make_free_product({z3, fx});
}
}  // namespace

TEST_CASE("free product normal form: inner cancellation") {
  MarkedGroup P = z3_star_z();
  // a x a^-1 a x^-1 -> (a)
  NormalForm nf = free_product_normal_form(P, P.parse("a x a^-1 a x^-1"));
  REQUIRE(nf.size() == 1);
  CHECK(nf[0].factor == 0);
  CHECK(nf[0].element == dynamic_cast<const FreeProductEngine&>(P.engine())
                             .factor(0)
                             .evaluate({Letter{0, 1}}));
}

TEST_CASE("free product normal form: consolidation uses factor arithmetic") {
  MarkedGroup P = z3_star_z();
  // x a a^2 x^-1: a^3 = 1 collapses, then x x^-1 cancels
  NormalForm nf = free_product_normal_form(P, P.parse("x a a^2 x^-1"));
  CHECK(nf.empty());
  CHECK(P.evaluate(P.parse("x a a^2 x^-1")).is_identity());
}

TEST_CASE("free product normal form: no reduction case") {
  MarkedGroup P = z3_star_z();
  NormalForm nf = free_product_normal_form(P, P.parse("a x a"));
  REQUIRE(nf.size() == 3);
  CHECK(nf[0].factor == 0);
  CHECK(nf[1].factor == 1);
  CHECK(nf[2].factor == 0);
}

TEST_CASE("free product normal form: empty iff identity; remultiplication") {
  MarkedGroup P = z3_star_z();
  const auto& eng = dynamic_cast<const FreeProductEngine&>(P.engine());
  testing::Rng rng(41);
  for (int t = 0; t < 300; ++t) {
    Word w = testing::random_word(rng, P.rank(), rng.below(12));
    GroupElement g = P.evaluate(w);
    NormalForm nf = eng.decode(g);
    CHECK(nf.empty() == g.is_identity());
    // no two consecutive entries share a factor; no trivial entries
    for (size_t i = 0; i < nf.size(); ++i) {
      CHECK_FALSE(nf[i].element.is_identity());
      if (i) CHECK(nf[i].factor != nf[i - 1].factor);
    }
    // remultiplying the normal form reproduces the element
    GroupElement prod = P.identity();
    for (const FactorSyllable& s : nf) {
      GroupElement lifted;
      // embed the factor element through its letters
      Word fw = eng.factor(s.factor).engine().element_word(s.element);
      Word pw;
      for (Letter l : fw) pw.push_back(Letter{eng.global_index(s.factor, l.gen), l.sign});
      prod = P.multiply(prod, P.evaluate(pw));
    }
    CHECK(prod == g);
  }
  testing::check_engine_axioms(P, rng, 200, 10);
}

TEST_CASE("free product rejects colliding generator names") {
  MarkedGroup a = make_free_group({"x"});
  MarkedGroup b = make_free_group({"x"});
  CHECK_THROWS_AS(make_free_product({a, b}), ConfigError);
}
