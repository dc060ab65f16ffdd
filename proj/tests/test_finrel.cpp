#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "relsim/relsim.hpp"

using namespace relsim;

namespace {

FinRel random_rel(std::size_t nx, std::size_t ny, std::mt19937_64& rng) {
  FinRel r(FinSet::anonymous(nx), FinSet::anonymous(ny));
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y)
      if (rng() & 1U) r.set(x, y);
  return r;
}

FinRel rel_from_mask(std::size_t nx, std::size_t ny, std::uint64_t m) {
  FinRel r(FinSet::anonymous(nx), FinSet::anonymous(ny));
  for (std::size_t k = 0; k < nx * ny; ++k)
    if ((m >> k) & 1U) r.set(k / ny, k % ny);
  return r;
}

}  // namespace

TEST(BitRow, BasicOperations) {
  BitRow a(130), b(130);
  a.set(0), a.set(64), a.set(129);
  b.set(64);
  EXPECT_EQ(a.count(), 3u);
  EXPECT_TRUE(b.subset_of(a));
  EXPECT_FALSE(a.subset_of(b));
  EXPECT_TRUE(a.intersects(b));
  b |= a;
  EXPECT_EQ(a, b);
  b.reset(129);
  a &= b;
  EXPECT_EQ(a.count(), 2u);
  BitRow f(70);
  f.fill();
  EXPECT_EQ(f.count(), 70u);
}

TEST(FinRel, ComposeMatchesOracle) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    const std::size_t nx = rng() % 5, ny = rng() % 5, nz = rng() % 5;
    const FinRel r = random_rel(nx, ny, rng), s = random_rel(ny, nz, rng);
    EXPECT_EQ(oracle::mat(compose(r, s)), oracle::compose(oracle::mat(r), oracle::mat(s), nz));
  }
}

TEST(FinRel, ConverseIsInvolutiveAndReversesComposition) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 100; ++i) {
    const FinRel r = random_rel(3, 4, rng), s = random_rel(4, 2, rng);
    EXPECT_EQ(converse(converse(r)), r);
    EXPECT_EQ(converse(compose(r, s)), compose(converse(s), converse(r)));
  }
}

TEST(FinRel, IdentityIsNeutral) {
  std::mt19937_64 rng(3);
  const FinRel r = random_rel(3, 4, rng);
  EXPECT_EQ(compose(FinRel::identity(r.dom()), r), r);
  EXPECT_EQ(compose(r, FinRel::identity(r.cod())), r);
}

TEST(FinRel, CompositionChecksCarriers) {
  const FinRel r(FinSet({"a"}), FinSet({"b"}));
  const FinRel s(FinSet({"c"}), FinSet({"d"}));
  EXPECT_THROW(compose(r, s), CarrierMismatch);
}

TEST(FinRel, DifunctionalClosureMatchesOracleExhaustively) {
  for (std::size_t nx = 0; nx <= 3; ++nx)
    for (std::size_t ny = 0; ny <= 3; ++ny)
      for (std::uint64_t m = 0; m < (std::uint64_t{1} << (nx * ny)); ++m) {
        const FinRel r = rel_from_mask(nx, ny, m);
        const FinRel c = difunctional_closure(r);
        ASSERT_EQ(oracle::mat(c), oracle::difunctional_closure(oracle::mat(r)));
        ASSERT_TRUE(is_difunctional(c));
        ASSERT_TRUE(leq(r, c));
        ASSERT_EQ(is_difunctional(r), c == r);
      }
}

TEST(FinRel, DifunctionalMeansFactorsThroughCospan) {
  // r = g°·f for the pushout legs exactly when r is difunctional.
  for (std::uint64_t m = 0; m < (1u << 6); ++m) {
    const FinRel r = rel_from_mask(2, 3, m);
    const Cospan c = pushout(tabulation(r));
    EXPECT_EQ(cospan_relation(c) == r, is_difunctional(r)) << m;
    EXPECT_EQ(cospan_relation(c), difunctional_closure(r)) << m;
  }
}

TEST(FinRel, TabulationRecoversRelation) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    const FinRel r = random_rel(3, 3, rng);
    const Span s = tabulation(r);
    EXPECT_EQ(s.apex.size(), r.count());
    EXPECT_EQ(span_relation(s), r);
  }
}

TEST(FinRel, PushoutNumbersClassesByLeastMember) {
  const FinSet x({"x0", "x1", "x2"}), y({"y0", "y1"});
  FinRel r(x, y);
  r.set(2, 0);
  const Cospan c = pushout(tabulation(r));
  // Classes: {x0}, {x1}, {x2, y0}, {y1}.
  EXPECT_EQ(c.apex.size(), 4u);
  EXPECT_EQ(c.left.table(), (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(c.right.table(), (std::vector<std::size_t>{2, 3}));
}

TEST(FinRel, DifunctionalIffPushoutSquareIsWeakPullbackSmall) {
  for (std::size_t nx = 0; nx <= 2; ++nx)
    for (std::size_t ny = 0; ny <= 2; ++ny)
      for (std::uint64_t m = 0; m < (std::uint64_t{1} << (nx * ny)); ++m) {
        const FinRel r = rel_from_mask(nx, ny, m);
        const Span t = tabulation(r);
        EXPECT_EQ(is_difunctional(r), is_weak_pullback(pushout(t), t));
      }
}

TEST(FinRel, PullbackOfInclusionIsPreimage) {
  // Pulling back an inclusion m : S >-> Y along f gives the preimage of S.
  const FinSet x({"a", "b", "c", "d"}), y({"0", "1", "2"}), s({"1", "2"});
  const FinFun f(x, y, {0, 1, 2, 1});
  const FinFun incl(s, y, {1, 2});
  const Span p = pullback(Cospan{y, f, incl});
  EXPECT_EQ(p.apex.size(), 3u);
  EXPECT_EQ(p.left.table(), (std::vector<std::size_t>{1, 2, 3}));
  EXPECT_TRUE(p.left.injective());
  EXPECT_TRUE(is_weak_pullback(Cospan{y, f, incl}, p));
}

TEST(FinRel, WeakPullbackRejectsNonCommutingSquare) {
  const FinSet one({"*"}), two({"0", "1"});
  const Cospan c{two, FinFun(one, two, {0}), FinFun(one, two, {1})};
  const Span s{one, FinFun(one, one, {0}), FinFun(one, one, {0})};
  EXPECT_THROW(is_weak_pullback(c, s), SpecError);
}

TEST(FinRel, ImageFactorization) {
  const FinSet x({"a", "b", "c"}), y({"0", "1", "2", "3"});
  const FinFun f(x, y, {3, 1, 3});
  const auto fac = image_factorization(f);
  EXPECT_TRUE(fac.epi.surjective());
  EXPECT_TRUE(fac.mono.injective());
  EXPECT_EQ(then(fac.epi, fac.mono).table(), f.table());
  EXPECT_EQ(fac.mono.dom().names(), (std::vector<std::string>{"1", "3"}));
}

TEST(FinRelIO, TextRoundTrip) {
  const FinSet x({"p", "q"}), y({"u", "v", "w"});
  FinRel r(x, y);
  r.set(0, 2), r.set(1, 0);
  EXPECT_EQ(relation_from_text(to_text(r)), r);
}

TEST(FinRelIO, JsonRoundTrip) {
  const FinSet x({"p", "q"});
  FinRel r(x, x);
  r.set(0, 1), r.set(1, 1);
  EXPECT_EQ(relation_from_json(to_json(r)), r);
}

TEST(FinRelIO, ParseErrorsCarryLineNumbers) {
  try {
    relation_from_text("dom: a b\ncod: c\na -> c\nb => c\n");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.location(), 4u);
  }
  try {
    relation_from_text("dom: a\ncod: c\na -> z\n");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.location(), 3u);
  }
  EXPECT_THROW(relation_from_text("a -> b\n"), ParseError);
  EXPECT_THROW(relation_from_json(nlohmann::json::parse(R"({"dom":["a"],"cod":["b"],"pairs":[["a"]]})")),
               ParseError);
}

TEST(FinSet, DuplicateNamesRejected) { EXPECT_THROW(FinSet({"a", "a"}), SpecError); }

TEST(FinSet, DisjointUnionKeepsOrder) {
  const FinSet u = disjoint_union(FinSet({"a"}), FinSet({"b", "c"}));
  EXPECT_EQ(u.size(), 3u);
}
