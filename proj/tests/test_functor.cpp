#include <gtest/gtest.h>

#include <random>
#include <set>

#include "relsim/relsim.hpp"

using namespace relsim;

namespace {

const FinSet kAB({"a", "b"});

std::vector<FunctorExpr> sample_functors() {
  return {
      FunctorExpr::id(),
      FunctorExpr::pow(),
      FunctorExpr::exp(kAB),
      FunctorExpr::constant(FinSet({"c0", "c1"})),
      parse_functor("2 * Exp{a,b}"),
      parse_functor("C{c} + C{b0,b1} * Id"),
      parse_functor("Exp{a,b} . Pow"),
      parse_functor("Pow . Pow"),
      parse_functor("MVal(Z2)"),
      parse_functor("MVal(N2)"),
      parse_functor("Id + Id * Id"),
  };
}

FinFun random_fun(std::size_t n, std::size_t m, std::mt19937_64& rng) {
  std::vector<std::size_t> t(n);
  for (auto& v : t) v = rng() % m;
  return FinFun(FinSet::anonymous(n), FinSet::anonymous(m), t);
}

}  // namespace

TEST(Functor, Cardinalities) {
  EXPECT_EQ(card(FunctorExpr::pow(), 3), 8u);
  EXPECT_EQ(card(FunctorExpr::exp(kAB), 3), 9u);
  EXPECT_EQ(card(parse_functor("Exp{a,b} . Pow"), 2), 16u);
  EXPECT_EQ(card(parse_functor("2 * Exp{a,b}"), 3), 18u);
  EXPECT_EQ(card(parse_functor("2 + 3 * Id"), 2), 8u);
  EXPECT_EQ(card(parse_functor("MVal(Z3)"), 2), 9u);
  EXPECT_EQ(card(FunctorExpr::exp(FinSet::anonymous(0)), 5), 1u);
  EXPECT_EQ(card(FunctorExpr::exp(kAB), 0), 0u);
  EXPECT_EQ(card(FunctorExpr::pow(), 0), 1u);
}

TEST(Functor, SaturatingCardinalityRaisesResourceError) {
  const FunctorExpr f = parse_functor("Pow . Pow . Pow");
  EXPECT_GE(card(f, 3), detail::kSaturated);
  EXPECT_THROW(checked_card(f, 3, Limits{}), ResourceError);
  EXPECT_THROW(apply_obj(parse_functor("Pow . Pow"), FinSet::anonymous(6)), ResourceError);
}

TEST(Functor, GoldenEnumerationExp) {
  // Exp{a,b} on {x0,x1}: first label is the least significant digit.
  const FunctorExpr f = FunctorExpr::exp(kAB);
  const FinSet x({"x0", "x1"});
  const std::vector<std::string> expected = {
      R"({"a":"x0","b":"x0"})", R"({"a":"x1","b":"x0"})", R"({"a":"x0","b":"x1"})", R"({"a":"x1","b":"x1"})"};
  for (std::size_t u = 0; u < 4; ++u) EXPECT_EQ(value_to_json(f, x, u).dump(), expected[u]);
}

TEST(Functor, GoldenEnumerationPowSumProd) {
  const FinSet x({"x0", "x1"});
  EXPECT_EQ(value_to_json(FunctorExpr::pow(), x, 2).dump(), R"(["x1"])");
  EXPECT_EQ(value_to_json(FunctorExpr::pow(), x, 3).dump(), R"(["x0","x1"])");
  const FunctorExpr s = parse_functor("C{c} + Id");
  EXPECT_EQ(value_to_json(s, x, 0).dump(), R"({"tag":0,"value":"c"})");
  EXPECT_EQ(value_to_json(s, x, 2).dump(), R"({"tag":1,"value":"x1"})");
  const FunctorExpr p = parse_functor("2 * Id");
  // Row-major: the first factor is the most significant.
  EXPECT_EQ(value_to_json(p, x, 1).dump(), R"(["0","x1"])");
  EXPECT_EQ(value_to_json(p, x, 2).dump(), R"(["1","x0"])");
}

TEST(Functor, ValueLiteralsRoundTripAndAreDistinct) {
  const FinSet x({"x0", "x1", "x2"});
  for (const auto& f : sample_functors()) {
    const std::size_t c = card(f, 3);
    if (c > 5000) continue;
    std::set<std::string> seen;
    for (std::size_t u = 0; u < c; ++u) {
      const auto j = value_to_json(f, x, u);
      EXPECT_EQ(value_from_json(f, x, j), u) << to_string(f) << " " << j.dump();
      seen.insert(j.dump());
    }
    EXPECT_EQ(seen.size(), c) << to_string(f);
  }
}

TEST(Functor, MapPreservesIdentityAndComposition) {
  std::mt19937_64 rng(17);
  for (const auto& f : sample_functors()) {
    for (std::size_t n = 0; n <= 3; ++n) {
      if (card(f, n) > 5000) continue;
      const FinFun id(FinSet::anonymous(n), FinSet::anonymous(n), [&] {
        std::vector<std::size_t> t(n);
        for (std::size_t i = 0; i < n; ++i) t[i] = i;
        return t;
      }());
      const FinFun fid = apply_map(f, id);
      for (std::size_t u = 0; u < fid.dom().size(); ++u) EXPECT_EQ(fid(u), u) << to_string(f);
      if (n == 0) continue;
      for (int k = 0; k < 5; ++k) {
        const FinFun g = random_fun(n, 3, rng), h = random_fun(3, 2, rng);
        if (card(f, 3) > 5000) continue;
        EXPECT_EQ(apply_map(f, then(g, h)).table(), then(apply_map(f, g), apply_map(f, h)).table())
            << to_string(f);
      }
    }
  }
}

TEST(Functor, SupportOfNestedValues) {
  const FunctorExpr f = parse_functor("Exp{a,b} . Pow");
  const FinSet x({"x0", "x1", "x2"});
  const std::size_t u = value_from_json(f, x, nlohmann::json::parse(R"({"a":["x2"],"b":["x0","x2"]})"));
  EXPECT_EQ(support(f, 3, u), (std::vector<std::size_t>{0, 2}));
  const FunctorExpr m = parse_functor("MVal(Z3)");
  const std::size_t w = value_from_json(m, x, nlohmann::json::parse(R"({"x1":"2"})"));
  EXPECT_EQ(support(m, 3, w), (std::vector<std::size_t>{1}));
}

TEST(FunctorIO, ParseAndPrintRoundTrip) {
  for (const auto& f : sample_functors()) EXPECT_EQ(parse_functor(to_string(f)), f) << to_string(f);
  EXPECT_EQ(parse_functor("Exp{a,b}.Pow.Pow"),
            FunctorExpr::comp(FunctorExpr::exp(kAB), FunctorExpr::comp(FunctorExpr::pow(), FunctorExpr::pow())));
  EXPECT_EQ(parse_functor("(Id + Id) * Id").kind(), FunctorExpr::Kind::Prod);
  EXPECT_EQ(parse_functor("Id + Id * Id").kind(), FunctorExpr::Kind::Sum);
}

TEST(FunctorIO, ParseErrorsReportColumn) {
  try {
    parse_functor("Exp{a,b} + ");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.location(), 12u);
  }
  try {
    parse_functor("Pow * Foo");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.location(), 7u);
  }
  EXPECT_THROW(parse_functor("Exp{a,a}"), Error);
  EXPECT_THROW(parse_functor("(Id"), ParseError);
}

TEST(FunctorIO, MonoidFromFile) {
  const FunctorExpr f = parse_functor(std::string("MVal(") + RELSIM_DATA_DIR + "/z3.json)");
  EXPECT_EQ(f.monoid(), MonoidTable::cyclic(3));
}

TEST(Monoid, Properties) {
  EXPECT_FALSE(is_positive(MonoidTable::cyclic(2)));
  EXPECT_TRUE(is_positive(MonoidTable::cyclic(1)));
  EXPECT_TRUE(is_positive(MonoidTable::capped(2)));
  EXPECT_THROW(MonoidTable(FinSet({"0", "1"}), 0, {{0, 1}, {1, 0}, {0, 0}}), SpecError);
  EXPECT_THROW(MonoidTable(FinSet({"0", "1"}), 0, {{0, 1}, {0, 1}}), SpecError);
}

TEST(FunctorProps, RuleTableAgreesWithExhaustiveCheck) {
  for (const auto& f : sample_functors()) {
    const std::size_t max = card(f, 3) > 100 ? 2 : 3;
    const PreservationCheck chk = check_pullback_preservation(f, max);
    EXPECT_TRUE(chk.agrees_with(preservation_profile(f))) << to_string(f);
    EXPECT_GT(chk.squares, 0u);
  }
}

TEST(FunctorProps, BasicFunctorsPreserveEverything) {
  for (const char* s : {"Id", "Pow", "Exp{a,b}", "2 * Exp{a,b}", "Exp{a,b} . Pow", "C{c} + C{b0,b1} * Id"}) {
    const PreservationProfile p = preservation_profile(parse_functor(s));
    EXPECT_EQ(p, PreservationProfile{}) << s;
    EXPECT_TRUE(check_pullback_preservation(parse_functor(s), 2).counterexamples.empty()) << s;
  }
}

TEST(FunctorProps, NonPositiveMonoidFailsInverseImages) {
  const FunctorExpr f = parse_functor("MVal(Z2)");
  const PreservationProfile p = preservation_profile(f);
  EXPECT_FALSE(p.inverse_images);
  EXPECT_FALSE(p.quarter_iso_pullbacks);
  const PreservationCheck chk = check_pullback_preservation(f, 2);
  EXPECT_FALSE(chk.observed.inverse_images);
  bool found = false;
  for (const auto& ce : chk.counterexamples)
    if (ce.shape == PullbackShape::InverseImage) {
      // X = 2 mapped onto Y = 1, pulled back along the empty inclusion.
      EXPECT_EQ(ce.x_size, 2u);
      EXPECT_EQ(ce.b_size, 0u);
      EXPECT_EQ(ce.y_size, 1u);
      found = true;
    }
  EXPECT_TRUE(found);
}

TEST(FunctorProps, PositiveMonoidPreservesInverseImages) {
  const FunctorExpr f = parse_functor("MVal(N2)");
  const PreservationCheck chk = check_pullback_preservation(f, 3);
  EXPECT_TRUE(chk.observed.inverse_images);
  EXPECT_TRUE(chk.observed.quarter_iso_pullbacks);
  EXPECT_TRUE(chk.agrees_with(preservation_profile(f)));
}
