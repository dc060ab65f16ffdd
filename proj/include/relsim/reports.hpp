#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "relsim/bisim.hpp"
#include "relsim/coalgebra.hpp"
#include "relsim/relator.hpp"

namespace relsim {

struct SampleConfig {
  std::size_t pairs = 200;
  std::size_t max_states = 3;
  std::uint64_t seed = 1;
};

struct CoalgebraPair {
  Coalgebra a;
  Coalgebra b;
};

/// Deterministic in (F, cfg): carrier sizes uniform in [1, max_states].
inline std::vector<CoalgebraPair> sample_pairs(const FunctorExpr& f, const SampleConfig& cfg,
                                               const Limits& limits = {}) {
  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<std::size_t> size(1, std::max<std::size_t>(1, cfg.max_states));
  std::vector<CoalgebraPair> out;
  out.reserve(cfg.pairs);
  for (std::size_t i = 0; i < cfg.pairs; ++i) {
    const std::size_t nx = size(rng), ny = size(rng);
    Coalgebra a = random_coalgebra(f, nx, rng, limits);
    Coalgebra b = random_coalgebra(f, ny, rng, limits);
    out.push_back({std::move(a), std::move(b)});
  }
  return out;
}

struct OracleCounterexample {
  std::size_t sample = 0;
  std::size_t x = 0, y = 0;
  bool similar = false;     // in similarity
  bool equivalent = false;  // in behavioural equivalence
};

struct SoundnessReport {
  SampleConfig config;
  std::size_t samples = 0;
  std::size_t unsound = 0;     // samples with a similar but inequivalent pair
  std::size_t incomplete = 0;  // samples with an equivalent but dissimilar pair
  std::vector<OracleCounterexample> counterexamples{};  // first mismatch per failing sample

  bool sound() const { return unsound == 0; }
  bool complete() const { return incomplete == 0; }
};

/// Similarity against behavioural equivalence on seeded random pairs.
inline SoundnessReport soundness_completeness_report(const RelatorSpec& spec, const SampleConfig& cfg,
                                                     const Limits& limits = {}) {
  SoundnessReport rep{cfg};
  const auto samples = sample_pairs(spec.functor(), cfg, limits);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& [a, b] = samples[i];
    const FinRel sim = similarity(spec, a, b, limits);
    const FinRel beh = behavioural_equivalence(a, b, limits);
    ++rep.samples;
    const bool s_ok = leq(sim, beh), c_ok = leq(beh, sim);
    rep.unsound += s_ok ? 0 : 1;
    rep.incomplete += c_ok ? 0 : 1;
    if (s_ok && c_ok) continue;
    for (std::size_t x = 0; x < a.size(); ++x)
      for (std::size_t y = 0; y < b.size(); ++y)
        if (sim.holds(x, y) != beh.holds(x, y)) {
          rep.counterexamples.push_back({i, x, y, sim.holds(x, y), beh.holds(x, y)});
          x = a.size();
          break;
        }
  }
  return rep;
}

/// A composable pair of simulations r : A ⇸ B, s : B ⇸ C.
struct ClosureCase {
  Coalgebra a, b, c;
  FinRel r, s;
};

struct ClosureReport {
  SampleConfig config;
  std::size_t compositions = 0;
  std::size_t failures = 0;
  std::optional<ClosureCase> certificate{};

  bool closed() const { return failures == 0; }
};

namespace detail {

inline std::vector<FinRel> all_simulations(const RelatorSpec& spec, const Coalgebra& a, const Coalgebra& b,
                                           const Limits& limits) {
  const std::size_t bits = a.size() * b.size();
  if (bits > 12) throw ResourceError("too many relations to enumerate simulations", bits);
  std::vector<FinRel> out;
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << bits); ++m) {
    FinRel r(a.states(), b.states());
    for (std::size_t k = 0; k < bits; ++k)
      if ((m >> k) & 1U) r.set(k / b.size(), k % b.size());
    if (is_simulation(spec, r, a, b, limits)) out.push_back(std::move(r));
  }
  return out;
}

}  // namespace detail

/// Composes every pair of simulations over seeded random triples (carriers up to
/// max_states, at most 3), plus any fixed cases, and checks the composite.
inline ClosureReport composition_closure_report(const RelatorSpec& spec, const SampleConfig& cfg,
                                                const std::vector<ClosureCase>& fixed = {},
                                                const Limits& limits = {}) {
  ClosureReport rep{cfg};
  auto check = [&](const ClosureCase& cs) {
    ++rep.compositions;
    if (is_simulation(spec, compose(cs.r, cs.s), cs.a, cs.c, limits)) return;
    ++rep.failures;
    if (!rep.certificate) rep.certificate = cs;
  };
  for (const auto& cs : fixed) check(cs);

  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<std::size_t> size(1, std::clamp<std::size_t>(cfg.max_states, 1, 3));
  for (std::size_t i = 0; i < cfg.pairs; ++i) {
    const std::size_t na = size(rng), nb = size(rng), nc = size(rng);
    Coalgebra a = random_coalgebra(spec.functor(), na, rng, limits);
    Coalgebra b = random_coalgebra(spec.functor(), nb, rng, limits);
    Coalgebra c = random_coalgebra(spec.functor(), nc, rng, limits);
    const auto rs = detail::all_simulations(spec, a, b, limits);
    const auto ss = detail::all_simulations(spec, b, c, limits);
    for (const auto& r : rs)
      for (const auto& s : ss) check(ClosureCase{a, b, c, r, s});
  }
  return rep;
}

/// Coalgebras for 2 × Id and two up-to-difunctional Barr simulations whose
/// composite is not one: X = {*}, Y = Z = {a, b}.
inline ClosureCase difunctional_composition_counterexample() {
  const FunctorExpr f = FunctorExpr::prod({FunctorExpr::constant(FinSet({"0", "1"})), FunctorExpr::id()});
  const FinSet x({"*"}), yz({"a", "b"});
  auto val = [&](std::size_t n, std::size_t tag, std::size_t state) { return prod_join(f, n, {tag, state}); };
  Coalgebra a(f, x, {val(1, 0, 0)});
  Coalgebra b(f, yz, {val(2, 0, 0), val(2, 0, 1)});
  Coalgebra c(f, yz, {val(2, 0, 1), val(2, 0, 1)});
  FinRel r(x, yz);
  r.set(0, 0);
  FinRel s(yz, yz);
  s.set(0, 0), s.set(1, 0), s.set(1, 1);
  return {a, b, c, r, s};
}

}  // namespace relsim
