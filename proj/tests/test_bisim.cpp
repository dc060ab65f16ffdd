#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "relsim/fixtures.hpp"
#include "relsim/relsim.hpp"

using namespace relsim;

namespace {

const FinSet kAB({"a", "b"});

Coalgebra load(const std::string& name) { return coalgebra_from_json(read_json(std::string(RELSIM_DATA_DIR) + "/" + name)); }

std::vector<RelatorSpec> oracle_relators() {
  const FunctorExpr e = FunctorExpr::exp(kAB);
  return {
      RelatorSpec::barr(FunctorExpr::pow()),
      RelatorSpec::cobarr(FunctorExpr::pow()),
      RelatorSpec::barr(e),
      RelatorSpec::submonoid_exp(top_submonoid(kAB)),
      RelatorSpec::barr(parse_functor("C{c} + C{b0,b1} * Id")),
      twisted_relator(top_submonoid(kAB)),
      RelatorSpec::pow_upper(),
  };
}

Coalgebra renamed(const Coalgebra& c, const std::vector<std::size_t>& perm) {
  // State i of the result is state perm[i] of c.
  std::vector<std::size_t> inv(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) inv[perm[i]] = i;
  const FinSet s = FinSet::anonymous(c.size());
  const FinFun h(s, s, inv);
  const auto fh = apply_map(c.functor(), h);
  std::vector<std::size_t> t(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) t[i] = fh(c(perm[i]));
  return Coalgebra(c.functor(), s, t);
}

}  // namespace

TEST(Simulation, TwoStatePowExamples) {
  const Coalgebra c = load("pow_two_state.json");
  const auto spec = RelatorSpec::barr(c.functor());
  EXPECT_TRUE(is_simulation(spec, FinRel::identity(c.states()), c, c));
  FinRel uv(c.states(), c.states());
  uv.set(0, 1);
  const SimulationCheck chk = is_simulation(spec, uv, c, c);
  EXPECT_FALSE(chk);
  EXPECT_EQ(chk.failing, std::make_pair(std::size_t{0}, std::size_t{1}));
  EXPECT_EQ(similarity(spec, c, c), FinRel::identity(c.states()));
  EXPECT_TRUE(is_simulation(spec, FinRel(c.states(), c.states()), c, c));
}

TEST(Simulation, LoopsAreBisimilarToTheirQuotient) {
  const Coalgebra loops = load("pow_loops.json"), q = load("pow_quotient.json");
  const auto spec = RelatorSpec::barr(loops.functor());
  EXPECT_EQ(similarity(spec, loops, q), FinRel::full(loops.states(), q.states()));
  EXPECT_EQ(behavioural_equivalence(loops, q), FinRel::full(loops.states(), q.states()));
  const Coalgebra two = load("pow_two_state.json");
  EXPECT_TRUE(similarity(spec, loops, two).empty_relation());
}

TEST(Simulation, FunctorMismatchIsRejected) {
  const Coalgebra c = load("pow_loops.json");
  EXPECT_THROW(similarity(RelatorSpec::barr(FunctorExpr::id()), c, c), SpecError);
  EXPECT_THROW(is_simulation(RelatorSpec::barr(c.functor()), FinRel(FinSet::anonymous(1), c.states()), c, c),
               CarrierMismatch);
}

TEST(Similarity, EqualsUnionOfAllSimulations) {
  std::mt19937_64 rng(41);
  for (const auto& spec : oracle_relators())
    for (int k = 0; k < 12; ++k) {
      const Coalgebra a = random_coalgebra(spec.functor(), 1 + rng() % 3, rng);
      const Coalgebra b = random_coalgebra(spec.functor(), 1 + rng() % 3, rng);
      const FinRel sim = similarity(spec, a, b);
      ASSERT_EQ(sim, oracle::union_of_simulations(spec, a, b)) << to_string(spec);
      ASSERT_TRUE(is_simulation(spec, sim, a, b));
    }
}

TEST(BehaviouralEquivalence, MatchesCongruenceOracle) {
  std::mt19937_64 rng(43);
  for (const char* s : {"Pow", "Exp{a,b}", "2 * Exp{a,b}", "C{c} + C{b0,b1} * Id", "Exp{a,b} . Pow", "MVal(Z2)",
                        "MVal(N2)"}) {
    const FunctorExpr f = parse_functor(s);
    for (int k = 0; k < 25; ++k) {
      const Coalgebra a = random_coalgebra(f, 1 + rng() % 3, rng);
      const Coalgebra b = random_coalgebra(f, 1 + rng() % 3, rng);
      ASSERT_EQ(behavioural_equivalence(a, b), oracle::behavioural_equivalence(a, b)) << s;
    }
  }
}

TEST(BehaviouralEquivalence, IsAnEquivalenceOnOneCoalgebra) {
  std::mt19937_64 rng(44);
  const Coalgebra c = random_coalgebra(FunctorExpr::pow(), 5, rng);
  const FinRel e = behavioural_equivalence(c, c);
  EXPECT_TRUE(leq(FinRel::identity(c.states()), e));
  EXPECT_EQ(converse(e), e);
  EXPECT_TRUE(leq(compose(e, e), e));
}

TEST(Soundness, BarrSoundAndCoBarrExact) {
  const SampleConfig cfg{.pairs = 60, .max_states = 3, .seed = 5};
  for (const char* s : {"Pow", "Exp{a,b}", "2 * Exp{a,b}", "C{c} + C{b0,b1} * Id", "Exp{a,b} . Pow"}) {
    const FunctorExpr f = parse_functor(s);
    const SoundnessReport barr = soundness_completeness_report(RelatorSpec::barr(f), cfg);
    EXPECT_TRUE(barr.sound()) << s;
    EXPECT_TRUE(barr.complete()) << s;
    const SoundnessReport cob = soundness_completeness_report(RelatorSpec::cobarr(f), cfg);
    EXPECT_TRUE(cob.sound() && cob.complete()) << s;
    EXPECT_EQ(cob.samples, 60u);
  }
}

TEST(Soundness, NonNormalRelatorIsUnsound) {
  const SoundnessReport r =
      soundness_completeness_report(RelatorSpec::pow_upper(), {.pairs = 40, .max_states = 3, .seed = 2});
  EXPECT_FALSE(r.sound());
  ASSERT_FALSE(r.counterexamples.empty());
  EXPECT_TRUE(r.counterexamples[0].similar);
  EXPECT_FALSE(r.counterexamples[0].equivalent);
}

TEST(Similarity, MonotoneInTheRelator) {
  std::mt19937_64 rng(47);
  const NLELattice lat = enumerate_nle(kAB);
  const FunctorExpr f = FunctorExpr::exp(kAB);
  for (int k = 0; k < 20; ++k) {
    const Coalgebra a = random_coalgebra(f, 1 + rng() % 4, rng), b = random_coalgebra(f, 1 + rng() % 4, rng);
    for (auto [lo, hi] : lat.hasse)
      EXPECT_TRUE(leq(similarity(RelatorSpec::submonoid_exp(lat.nodes[lo]), a, b),
                      similarity(RelatorSpec::submonoid_exp(lat.nodes[hi]), a, b)));
  }
}

TEST(Similarity, InvariantUnderRenaming) {
  std::mt19937_64 rng(53);
  const std::vector<std::size_t> perm{2, 0, 3, 1};
  for (const auto& spec : oracle_relators()) {
    const Coalgebra a = random_coalgebra(spec.functor(), 3, rng), b = random_coalgebra(spec.functor(), 4, rng);
    const Coalgebra b2 = renamed(b, perm);
    const FinRel s1 = similarity(spec, a, b), s2 = similarity(spec, a, b2);
    for (std::size_t x = 0; x < 3; ++x)
      for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(s2.holds(x, i), s1.holds(x, perm[i])) << to_string(spec);
  }
}

TEST(Witness, MinimalSizeMatchesExhaustiveSearch) {
  std::mt19937_64 rng(59);
  for (const auto& spec : oracle_relators())
    for (int k = 0; k < 8; ++k) {
      const Coalgebra a = random_coalgebra(spec.functor(), 1 + rng() % 3, rng);
      const Coalgebra b = random_coalgebra(spec.functor(), 1 + rng() % 3, rng);
      const std::pair<std::size_t, std::size_t> seed{rng() % a.size(), rng() % b.size()};
      const auto w = minimal_witness(spec, a, b, seed);
      const auto want = oracle::minimal_simulation_size(spec, a, b, seed);
      ASSERT_EQ(w.has_value(), want.has_value()) << to_string(spec);
      if (!w) continue;
      EXPECT_EQ(w->count(), *want) << to_string(spec);
      EXPECT_TRUE(w->holds(seed.first, seed.second));
      EXPECT_TRUE(is_simulation(spec, *w, a, b));
    }
}

TEST(Witness, NonLocalRelatorsUseTheFallback) {
  const FunctorExpr f = parse_functor("2 * Id");
  const auto spec = RelatorSpec::up_to_difunctional(RelatorSpec::barr(f));
  EXPECT_FALSE(is_local(spec));
  std::mt19937_64 rng(61);
  for (int k = 0; k < 10; ++k) {
    const Coalgebra a = random_coalgebra(f, 3, rng), b = random_coalgebra(f, 3, rng);
    const auto w = minimal_witness(spec, a, b, {0, 0});
    const auto want = oracle::minimal_simulation_size(spec, a, b, {0, 0});
    ASSERT_EQ(w.has_value(), want.has_value());
    if (w) {
      EXPECT_EQ(w->count(), *want);
    }
  }
}

TEST(Witness, SeedOutsideCarriersIsRejected) {
  const Coalgebra c = load("pow_loops.json");
  EXPECT_THROW(minimal_witness(RelatorSpec::barr(c.functor()), c, c, {5, 0}), SpecError);
}

TEST(Composition, NormalLaxExtensionsAreClosed) {
  const SampleConfig cfg{.pairs = 30, .max_states = 2, .seed = 3};
  for (const auto& s : enumerate_nle(kAB).nodes) {
    const ClosureReport r = composition_closure_report(RelatorSpec::submonoid_exp(s), cfg);
    EXPECT_TRUE(r.closed()) << describe(s);
    EXPECT_GT(r.compositions, 0u);
  }
  EXPECT_TRUE(composition_closure_report(RelatorSpec::barr(FunctorExpr::pow()), cfg).closed());
}

TEST(Composition, UpToDifunctionalSimulationsAreNotClosed) {
  const ClosureCase cs = difunctional_composition_counterexample();
  const auto spec = RelatorSpec::up_to_difunctional(RelatorSpec::barr(cs.a.functor()));
  EXPECT_TRUE(is_simulation(spec, cs.r, cs.a, cs.b));
  EXPECT_TRUE(is_simulation(spec, cs.s, cs.b, cs.c));
  EXPECT_FALSE(is_simulation(spec, compose(cs.r, cs.s), cs.a, cs.c));
  const ClosureReport rep = composition_closure_report(spec, {.pairs = 0, .max_states = 1, .seed = 1}, {cs});
  EXPECT_FALSE(rep.closed());
  ASSERT_TRUE(rep.certificate);
  EXPECT_EQ(rep.certificate->r, cs.r);
  // s is not a plain Barr simulation: only its difunctional closure is.
  EXPECT_FALSE(is_simulation(RelatorSpec::barr(cs.a.functor()), cs.s, cs.b, cs.c));
}

TEST(Automaton, AllAcceptingFamilyIsFullyBisimilar) {
  const Coalgebra c = minimization_automaton(2, 3);
  const FinRel full = FinRel::full(c.states(), c.states());
  EXPECT_EQ(similarity(RelatorSpec::barr(c.functor()), c, c), full);
  EXPECT_EQ(behavioural_equivalence(c, c), full);
}
