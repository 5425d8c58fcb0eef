#include <catch2/catch_amalgamated.hpp>

#include "marked/words.hpp"
#include "test_support.hpp"

using namespace marked;

namespace {
Word W(std::initializer_list<std::pair<int, int>> ls) {
  Word w;
  for (auto [g, s] : ls) w.push_back(Letter{g, s});
  return w;
}
}  // namespace

TEST_CASE("free reduction cancels inverse pairs") {
  CHECK(reduce_word(W({{0, 1}, {0, -1}})).empty());
  // a b b^-1 a -> a a
  Word r = reduce_word(W({{0, 1}, {1, 1}, {1, -1}, {0, 1}}));
  CHECK(r == W({{0, 1}, {0, 1}}));
}

TEST_CASE("free reduction is idempotent and never lengthens") {
  testing::Rng rng(13);
  for (int t = 0; t < 500; ++t) {
    Word w = testing::random_word(rng, 3, rng.below(20));
    Word r = reduce_word(w);
    CHECK(r.size() <= w.size());
    CHECK(reduce_word(r) == r);
    CHECK(is_reduced(r));
  }
}

TEST_CASE("reduced words pass through unchanged") {
  Word w = W({{0, 1}, {1, -1}, {0, 1}});
  CHECK(reduce_word(w) == w);
}

TEST_CASE("word parsing: powers and parens") {
  WordParser p({"a", "b"});
  CHECK(p.parse("a b") == W({{0, 1}, {1, 1}}));
  CHECK(p.parse("a^-1") == W({{0, -1}}));
  CHECK(p.parse("a^3") == W({{0, 1}, {0, 1}, {0, 1}}));
  CHECK(p.parse("(a b)^2") == W({{0, 1}, {1, 1}, {0, 1}, {1, 1}}));
  CHECK(p.parse("(a b^-1)^-1") == W({{1, 1}, {0, -1}}));
  CHECK_THROWS_AS(p.parse("c"), ConfigError);
  CHECK_THROWS_AS(p.parse("(a b"), ConfigError);
  CHECK_THROWS_AS(p.parse("a^x"), ConfigError);
}

TEST_CASE("word formatting round-trips through the parser") {
  WordParser p({"a", "b"});
  testing::Rng rng(5);
  for (int t = 0; t < 100; ++t) {
    Word w = testing::random_word(rng, 2, 1 + rng.below(8));
    CHECK(p.parse(format_word(w, {"a", "b"})) == w);
  }
}
