#include <catch2/catch_amalgamated.hpp>

#include "marked/basis_certify.hpp"
#include "marked/coset_engine.hpp"
#include "test_support.hpp"

using namespace marked;

namespace {
FreeBasisInstance z3_instance(int n) {
  FinitePresentation p;
  p.generators = {"a"};
  p.relators = {Word{Letter{0, 1}, Letter{0, 1}, Letter{0, 1}}};
  MarkedGroup z3 = coset_enumerate(p);
  return make_free_basis_instance(z3, {z3.parse("a")}, n);
}
}  // namespace

TEST_CASE("basis letters have the five-entry normal form") {
  FreeBasisInstance inst = z3_instance(2);
  REQUIRE(inst.basis_size() == 2);
  const auto& eng = dynamic_cast<const FreeProductEngine&>(inst.product.engine());
  for (const GroupElement& t : inst.t_elements) {
    CHECK(eng.decode(t).size() == 5);
  }
}

TEST_CASE("certification passes exhaustively to length 4 on the Z_3 instance") {
  FreeBasisInstance inst = z3_instance(2);
  BasisCertificate cert = free_basis_certify(inst, 4);
  // 4 + 4*3 + 4*9 + 4*27 freely reduced words
  CHECK(cert.words_checked == 4 + 12 + 36 + 108);
  CHECK(cert.cores_verified > 0);
}

TEST_CASE("planted dependence fails with a length-3 witness") {
  FreeBasisInstance inst = z3_instance(2);
  std::vector<GroupElement> planted{
      inst.t_elements[0], inst.product.multiply(inst.t_elements[0], inst.t_elements[0])};
  try {
    certify_claimed_basis(inst.product, planted, 4);
    FAIL("planted dependence was not detected");
  } catch (const CertificationFailed& e) {
    CHECK(e.witness.size() == 3);
  }
}

TEST_CASE("an honest basis passes the claimed-basis check") {
  FreeBasisInstance inst = z3_instance(2);
  CHECK_NOTHROW(certify_claimed_basis(inst.product, inst.t_elements, 4));
}

TEST_CASE("core parse recognizes exactly the T-words") {
  FreeBasisInstance inst = z3_instance(2);
  testing::Rng rng(113);
  // every short T-word parses back to itself
  std::vector<std::vector<int>> words{{1}, {2}, {-1}, {1, 2}, {2, -1}, {1, 1}, {1, 2, -1}};
  for (const auto& w : words) {
    GroupElement g = inst.product.identity();
    for (int letter : w) {
      size_t idx = static_cast<size_t>(letter > 0 ? letter - 1 : -letter - 1);
      GroupElement e = letter > 0 ? inst.t_elements[idx]
                                  : inst.product.inverse(inst.t_elements[idx]);
      g = inst.product.multiply(g, e);
    }
    auto parsed = parse_as_t_word(inst, g);
    REQUIRE(parsed.has_value());
    CHECK(*parsed == w);
  }
  // generic non-members do not parse
  int rejected = 0;
  for (int t = 0; t < 50; ++t) {
    Word w = testing::random_word(rng, inst.product.rank(), 3 + rng.below(5));
    GroupElement p = inst.product.evaluate(w);
    if (p.is_identity()) continue;
    if (!parse_as_t_word(inst, p)) ++rejected;
  }
  CHECK(rejected > 30);
}

TEST_CASE("malnormality spot-check finds no violations") {
  FreeBasisInstance inst = z3_instance(2);
  BasisCertificate cert = malnormality_spot_check(inst, 60, 6, 20240501);
  CHECK(cert.malnormality_samples > 0);
  CHECK(cert.malnormality_violations == 0);
}

TEST_CASE("certification passes on other shaped instances") {
  // rank-1 instance over Z_3
  FreeBasisInstance one = z3_instance(1);
  CHECK_NOTHROW(free_basis_certify(one, 4));
  // S_3 base with A = {ab} (an order-3 element, distinct from its inverse)
  FinitePresentation p;
  p.generators = {"a", "b"};
  WordParser wp(p.generators);
  p.relators = {wp.parse("a^2"), wp.parse("b^2"), wp.parse("(a b)^3")};
  MarkedGroup s3 = coset_enumerate(p);
  FreeBasisInstance inst = make_free_basis_instance(s3, {s3.parse("a b")}, 2);
  CHECK_NOTHROW(free_basis_certify(inst, 3));
}

TEST_CASE("every planted dependence in the corpus is caught") {
  FreeBasisInstance inst = z3_instance(2);
  const GroupElement& t1 = inst.t_elements[0];
  const GroupElement& t2 = inst.t_elements[1];
  std::vector<std::vector<GroupElement>> planted{
      {t1, inst.product.multiply(t1, t1)},
      {t1, t2, inst.product.multiply(t1, t2)},
      {t1, inst.product.inverse(t1)},
  };
  for (const auto& claim : planted) {
    CHECK_THROWS_AS(certify_claimed_basis(inst.product, claim, 4), CertificationFailed);
  }
}

TEST_CASE("instance construction rejects degenerate A") {
  FinitePresentation p;
  p.generators = {"a"};
  p.relators = {Word{Letter{0, 1}, Letter{0, 1}}};  // Z_2: a = a^-1
  MarkedGroup z2 = coset_enumerate(p);
  CHECK_THROWS_AS(make_free_basis_instance(z2, {z2.parse("a")}, 2), ConfigError);
  FinitePresentation q;
  q.generators = {"a"};
  q.relators = {Word{Letter{0, 1}, Letter{0, 1}, Letter{0, 1}}};
  MarkedGroup z3 = coset_enumerate(q);
  CHECK_THROWS_AS(make_free_basis_instance(z3, {z3.parse("a^3")}, 2), ConfigError);
}
