#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "relsim/relsim.hpp"

using namespace relsim;

namespace {

const FinSet kAB({"a", "b"});
const FinSet kABC({"a", "b", "c"});

constexpr EndoMask kPhiA = 0b0111;  // {(a,a),(a,b),(b,a)}
constexpr EndoMask kPhiB = 0b1110;  // {(a,b),(b,a),(b,b)}

std::vector<bool> table_of(std::size_t n, const std::set<EndoMask>& s) {
  std::vector<bool> t(endo::universe(n), false);
  for (EndoMask m : s) t[m] = true;
  return t;
}

// Independent closure test on an explicit subset of Rel(A, A).
bool oracle_is_uc_submonoid(std::size_t n, const std::vector<bool>& in) {
  if (!in[endo::identity(n)]) return false;
  std::vector<EndoMask> ms;
  for (std::size_t m = 0; m < in.size(); ++m)
    if (in[m]) ms.push_back(static_cast<EndoMask>(m));
  return oracle::submonoid_closure(n, ms) == std::set<EndoMask>(ms.begin(), ms.end());
}

}  // namespace

TEST(Endo, OperationsMatchMatrixOracle) {
  for (std::size_t n = 1; n <= 3; ++n) {
    std::mt19937_64 rng(n);
    const FinSet a = FinSet::anonymous(n);
    for (int k = 0; k < 100; ++k) {
      const auto r = static_cast<EndoMask>(rng() % endo::universe(n));
      const auto s = static_cast<EndoMask>(rng() % endo::universe(n));
      const FinRel rr = endo::to_rel(a, r), sr = endo::to_rel(a, s);
      EXPECT_EQ(endo::from_rel(rr), r);
      EXPECT_EQ(endo::to_rel(a, endo::compose(n, r, s)), compose(rr, sr));
      EXPECT_EQ(endo::to_rel(a, endo::converse(n, r)), converse(rr));
      EXPECT_EQ(oracle::mat(endo::to_rel(a, endo::difunctional_closure(n, r))),
                oracle::difunctional_closure(oracle::mat(rr)));
    }
  }
}

TEST(Endo, NormalityThreeWays) {
  for (std::size_t n = 1; n <= 3; ++n) {
    const FinSet a = FinSet::anonymous(n);
    for (std::size_t m = 0; m < endo::universe(n); ++m) {
      const auto phi = static_cast<EndoMask>(m);
      const bool want = oracle::normal_endorelation(n, phi);
      ASSERT_EQ(endo::is_normal(n, phi), want);
      ASSERT_EQ(is_normal_endorelation(endo::to_rel(a, phi)), want);
      if (n <= 2) {
        ASSERT_EQ(normal_via_cospans(endo::to_rel(a, phi)), want) << m;
      }
    }
  }
}

TEST(Endo, NamedNormalRelations) {
  EXPECT_TRUE(endo::is_normal(2, kPhiA));
  EXPECT_TRUE(endo::is_normal(2, kPhiB));
  EXPECT_FALSE(endo::is_normal(2, 0b0010));  // {(a,b)}
  EXPECT_FALSE(endo::is_normal(2, 0b0110));  // {(a,b),(b,a)}
  EXPECT_TRUE(endo::is_normal(2, 0b1111));
}

TEST(UCSubmonoid, ValidationRejectsBadTables) {
  std::vector<bool> t(16, false);
  EXPECT_THROW(UCSubmonoid(kAB, t), InvariantError);
  t[endo::identity(2)] = true;
  EXPECT_THROW(UCSubmonoid(kAB, t), InvariantError);  // not upward closed
  EXPECT_THROW(UCSubmonoid(kAB, std::vector<bool>(8, true)), SpecError);
  // Upward closed but missing a composite: {(a,b)} and {(b,a)} without {(a,a)}.
  std::vector<bool> u(16, false);
  for (EndoMask m = 0; m < 16; ++m)
    u[m] = (m & endo::identity(2)) == endo::identity(2) || (m & 0b0010) == 0b0010 || (m & 0b0100) == 0b0100;
  EXPECT_THROW(UCSubmonoid(kAB, u), InvariantError);
  EXPECT_THROW(generate(FinSet::anonymous(5), std::vector<EndoMask>{}), ResourceError);
}

TEST(UCSubmonoid, GenerateMatchesOracleClosure) {
  std::mt19937_64 rng(4);
  for (std::size_t n = 1; n <= 3; ++n)
    for (int k = 0; k < 20; ++k) {
      std::vector<EndoMask> gens;
      for (std::size_t i = 0, cnt = rng() % 3; i < cnt; ++i)
        gens.push_back(static_cast<EndoMask>(rng() % endo::universe(n)));
      const UCSubmonoid s = generate(FinSet::anonymous(n), gens);
      EXPECT_EQ(s.table(), table_of(n, oracle::submonoid_closure(n, gens)));
    }
}

TEST(UCSubmonoid, ClosureOrderDoesNotMatter) {
  std::mt19937_64 rng(9);
  for (int k = 0; k < 40; ++k) {
    std::vector<bool> seed(endo::universe(3), false);
    for (int i = 0; i < 2; ++i) seed[rng() % seed.size()] = true;
    const auto a = generate_observed(kABC, seed, false);
    const auto b = generate_observed(kABC, seed, true);
    EXPECT_EQ(a.submonoid, b.submonoid);
    std::vector<EndoMask> gens;
    for (std::size_t m = 0; m < seed.size(); ++m)
      if (seed[m]) gens.push_back(static_cast<EndoMask>(m));
    EXPECT_EQ(a.submonoid, generate(kABC, gens));
  }
}

TEST(UCSubmonoid, GeneratorsRegenerate) {
  for (const auto& s : enumerate_uc_submonoids(kAB)) EXPECT_EQ(generate(kAB, generators(s)), s);
}

TEST(UCSubmonoid, JoinIsLeastUpperBound) {
  const UCSubmonoid sa = generate(kAB, std::vector<EndoMask>{kPhiA});
  const UCSubmonoid sb = generate(kAB, std::vector<EndoMask>{kPhiB});
  const UCSubmonoid j = join({sa, sb});
  EXPECT_TRUE(sa.subset_of(j));
  EXPECT_TRUE(sb.subset_of(j));
  EXPECT_EQ(j, top_submonoid(kAB));
  EXPECT_EQ(join_observed({sa, sb}).submonoid, j);
  for (const auto& s : enumerate_uc_submonoids(kAB))
    if (sa.subset_of(s) && sb.subset_of(s)) {
      EXPECT_TRUE(j.subset_of(s));
    }
}

TEST(UCSubmonoid, JoinAgreesWithOracleOnThreeLabels) {
  std::mt19937_64 rng(12);
  for (int k = 0; k < 20; ++k) {
    const auto g1 = static_cast<EndoMask>(rng() % 512), g2 = static_cast<EndoMask>(rng() % 512);
    const UCSubmonoid j = join({generate(kABC, std::vector<EndoMask>{g1}), generate(kABC, std::vector<EndoMask>{g2})});
    EXPECT_EQ(j.table(), table_of(3, oracle::submonoid_closure(3, {g1, g2})));
  }
}

TEST(Enumeration, UCSubmonoidsOnTwoLabelsMatchBruteForce) {
  const auto all = enumerate_uc_submonoids(kAB);
  std::size_t brute = 0;
  const EndoMask id = endo::identity(2);
  for (std::uint32_t subset = 0; subset < (1u << 16); ++subset) {
    if (!((subset >> id) & 1U)) continue;
    std::vector<bool> in(16);
    for (std::size_t m = 0; m < 16; ++m) in[m] = (subset >> m) & 1U;
    // Cheap upward-closure prefilter before the oracle closure.
    bool up = true;
    for (std::size_t m = 0; m < 16 && up; ++m)
      for (std::size_t b = 0; b < 4 && up; ++b) up = !in[m] || in[m | (1u << b)];
    if (up && oracle_is_uc_submonoid(2, in)) ++brute;
  }
  EXPECT_EQ(all.size(), brute);
  for (const auto& s : all) EXPECT_TRUE(oracle_is_uc_submonoid(2, s.table()));
}

TEST(Enumeration, LatticeOfTwoLabelsIsTheDiamond) {
  const NLELattice lat = enumerate_nle(kAB);
  EXPECT_FALSE(lat.lower_bound);
  ASSERT_EQ(lat.nodes.size(), 4u);
  EXPECT_EQ(lat.nodes[0], barr_submonoid(kAB));
  EXPECT_EQ(lat.nodes[1], generate(kAB, std::vector<EndoMask>{kPhiA}));
  EXPECT_EQ(lat.nodes[2], generate(kAB, std::vector<EndoMask>{kPhiB}));
  EXPECT_EQ(lat.nodes[3], top_submonoid(kAB));
  EXPECT_EQ(lat.hasse, (std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}, {0, 2}, {1, 3}, {2, 3}}));
  std::vector<std::size_t> sizes;
  for (const auto& s : lat.nodes) sizes.push_back(s.size());
  EXPECT_EQ(sizes, (std::vector<std::size_t>{4, 5, 5, 6}));
  EXPECT_EQ(generators(lat.nodes[1]), std::vector<EndoMask>{kPhiA});
  EXPECT_EQ(generators(lat.nodes[2]), std::vector<EndoMask>{kPhiB});
}

TEST(Enumeration, SmallLabelSetsHaveOneNode) {
  EXPECT_EQ(enumerate_nle(FinSet::anonymous(0)).nodes.size(), 1u);
  EXPECT_EQ(enumerate_nle(FinSet({"*"})).nodes.size(), 1u);
}

TEST(Enumeration, ThreeLabelsIsAFlaggedLowerBound) {
  const NLELattice lat = enumerate_nle(kABC);
  EXPECT_TRUE(lat.lower_bound);
  EXPECT_GT(lat.nodes.size(), 4u);
  EXPECT_EQ(lat.nodes.front(), barr_submonoid(kABC));
  for (const auto& s : lat.nodes) EXPECT_TRUE(s.all_normal());
  const UCSubmonoid top = greatest_nle(kABC);
  EXPECT_EQ(lat.nodes.back(), top);
  for (const auto& s : lat.nodes) EXPECT_TRUE(s.subset_of(top));
}

TEST(Enumeration, GreatestOnTwoLabelsIsTop) {
  EXPECT_EQ(greatest_nle(kAB), top_submonoid(kAB));
  EXPECT_THROW(greatest_nle(FinSet::anonymous(4)), ResourceError);
}

TEST(RoundTrip, SOfRelatorRecoversEverySubmonoidOnTwoLabels) {
  for (const auto& s : enumerate_uc_submonoids(kAB))
    EXPECT_EQ(s_of_relator_table(RelatorSpec::submonoid_exp(s)), s.table()) << describe(s);
}

TEST(RoundTrip, SOfBarrIsTheBottom) {
  EXPECT_EQ(s_of_relator_table(RelatorSpec::barr(FunctorExpr::exp(kABC))), barr_submonoid(kABC).table());
  EXPECT_THROW(s_of_relator(RelatorSpec::barr(FunctorExpr::pow())), SpecError);
}

TEST(SubmonoidIO, JsonRoundTrip) {
  for (const auto& s : enumerate_nle(kAB).nodes) {
    EXPECT_EQ(submonoid_from_json(to_json(s)), s);
    EXPECT_EQ(submonoid_from_json(to_json(s, false)), s);
  }
  auto j = to_json(top_submonoid(kAB));
  j["members"].erase(0);
  EXPECT_THROW(submonoid_from_json(j), ParseError);
  EXPECT_THROW(submonoid_from_json(nlohmann::json::parse(R"({"labels":["a"],"generators":[[["a","z"]]]})")),
               ParseError);
}

TEST(SubmonoidIO, DotListsNodesAndEdges) {
  const std::string dot = to_dot(enumerate_nle(kAB));
  EXPECT_NE(dot.find("n0 -> n1"), std::string::npos);
  EXPECT_NE(dot.find("n2 -> n3"), std::string::npos);
  EXPECT_NE(dot.find("6 members"), std::string::npos);
}
