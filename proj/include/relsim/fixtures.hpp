#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "relsim/bisim.hpp"
#include "relsim/finrel_io.hpp"
#include "relsim/lts.hpp"
#include "relsim/nle.hpp"
#include "relsim/relator_laws.hpp"
#include "relsim/submonoid.hpp"

namespace relsim {

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ParseError("cannot read '" + p.string() + "'", 0);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline nlohmann::json read_json(const std::filesystem::path& p) {
  try {
    return nlohmann::json::parse(read_file(p));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(p.filename().string() + ": " + e.what(), e.byte);
  }
}

struct FixtureResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

namespace fixtures {

inline FixtureResult egli_milner(const std::filesystem::path& dir) {
  // Barr on Pow relates {x} to {1} and not {x,y} to {1} when r = {(x,1)}.
  const auto j = read_json(dir / "pow_egli_milner.json");
  const FinRel r = relation_from_json(j.at("relation"));
  const auto f = FunctorExpr::pow();
  const Lifting l(RelatorSpec::barr(f), r);
  for (const auto& [key, want] : {std::pair{"related", true}, std::pair{"unrelated", false}})
    for (const auto& uv : j.at(key)) {
      const std::size_t u = value_from_json(f, r.dom(), uv.at(0));
      const std::size_t v = value_from_json(f, r.cod(), uv.at(1));
      if (l.relates(u, v) != want) return {"egli-milner", false, "unexpected verdict for " + uv.dump()};
    }
  return {"egli-milner", true, "Barr on Pow matches the listed pairs"};
}

inline FixtureResult cobarr_identity(const std::filesystem::path& dir) {
  const auto j = read_json(dir / "cobarr_identity.json");
  const FinRel z = relation_from_json(j.at("z"));
  const FinRel a = relation_from_json(j.at("a"));
  const auto spec = RelatorSpec::cobarr(FunctorExpr::id());
  const FinRel za = compose(a, z);
  const FinRel lift_za = lift(spec, za);
  const FinRel lifted = compose(lift(spec, a), lift(spec, z));
  const bool ok = lift_za == relation_from_json(j.at("lift_of_composite")) &&
                  lifted == relation_from_json(j.at("composite_of_lifts")) && !leq(lifted, lift_za);
  return {"cobarr-composition", ok, ok ? "lax composition fails as listed" : "lifts differ from the fixture"};
}

inline FixtureResult converse_failure(const std::filesystem::path& dir) {
  const auto j = read_json(dir / "submonoid_abc.json");
  const UCSubmonoid s = submonoid_from_json(j.at("submonoid"));
  const auto spec = RelatorSpec::submonoid_exp(s);
  const bool lax = is_lax_extension(spec, 2).holds, normal = is_normal(spec, 3).holds;
  const bool conv = preserves_converses(spec, 3).holds;
  const bool ok = lax == j.at("lax").get<bool>() && normal == j.at("normal").get<bool>() &&
                  conv == j.at("preserves_converses").get<bool>();
  return {"converse-failure", ok,
          "lax=" + std::to_string(lax) + " normal=" + std::to_string(normal) + " converses=" + std::to_string(conv)};
}

inline FixtureResult lattice(const std::filesystem::path& dir) {
  const auto j = read_json(dir / "lattice_ab.json");
  const FinSet a(j.at("labels").get<std::vector<std::string>>());
  const NLELattice lat = enumerate_nle(a);
  std::vector<UCSubmonoid> want;
  for (const auto& n : j.at("nodes")) want.push_back(submonoid_from_json(n));
  const auto hasse = j.at("hasse").get<std::vector<std::pair<std::size_t, std::size_t>>>();
  const bool ok = lat.nodes == want && lat.hasse == hasse;
  return {"nle-lattice", ok, std::to_string(lat.nodes.size()) + " nodes, " + std::to_string(lat.hasse.size()) +
                                 " covering pairs"};
}

inline FixtureResult minimization(const std::filesystem::path& dir) {
  const auto j = read_json(dir / "minimization.json");
  const std::size_t n = j.at("n"), m = j.at("m");
  const LTS l = minimization_family(n, m);
  const Coalgebra c = to_coalgebra(l);
  const FinRel lin = linear_witness(n, m);
  const auto tw = twisted_relator(top_submonoid(l.labels()));
  const auto std_w = minimal_witness(RelatorSpec::barr(c.functor()), c, c, {0, n});
  bool ok = lin.count() == j.at("linear_witness_pairs").get<std::size_t>() && is_simulation(tw, lin, c, c) &&
            std_w && std_w->count() == j.at("standard_witness_pairs").get<std::size_t>();
  return {"minimization", ok,
          "linear " + std::to_string(lin.count()) + ", standard " + std::to_string(std_w ? std_w->count() : 0)};
}

inline FixtureResult final_lts(const std::filesystem::path& dir) {
  const LTS l = lts_from_text(read_file(dir / "final_example.lts"));
  const Coalgebra c = to_coalgebra(l);
  const FinRel want_std = relation_from_text(read_file(dir / "final_standard_witness.rel"), l.states(), l.states());
  const FinRel want_tw = relation_from_text(read_file(dir / "final_twisted_witness.rel"), l.states(), l.states());
  const auto p = *l.states().index_of("p"), q = *l.states().index_of("q");
  const auto tw = twisted_relator(top_submonoid(l.labels()));
  const auto w_std = minimal_witness(RelatorSpec::barr(c.functor()), c, c, {p, q});
  const auto w_tw = minimal_witness(tw, c, c, {p, q});
  const bool ok = w_std && *w_std == want_std && w_tw && w_tw->count() == want_tw.count() &&
                  is_simulation(tw, want_tw, c, c) && !is_simulation(RelatorSpec::barr(c.functor()), want_tw, c, c);
  return {"final-lts", ok,
          "standard " + std::to_string(w_std ? w_std->count() : 0) + ", twisted " +
              std::to_string(w_tw ? w_tw->count() : 0)};
}

}  // namespace fixtures

/// Every fixture under `dir`; a missing or unreadable file is a named failure.
inline std::vector<FixtureResult> run_fixtures(const std::filesystem::path& dir) {
  using Fn = FixtureResult (*)(const std::filesystem::path&);
  const std::pair<const char*, Fn> all[] = {
      {"egli-milner", &fixtures::egli_milner},     {"cobarr-composition", &fixtures::cobarr_identity},
      {"converse-failure", &fixtures::converse_failure}, {"nle-lattice", &fixtures::lattice},
      {"minimization", &fixtures::minimization},   {"final-lts", &fixtures::final_lts},
  };
  std::vector<FixtureResult> out;
  for (const auto& [name, fn] : all) {
    try {
      out.push_back(fn(dir));
    } catch (const std::exception& e) {
      out.push_back({name, false, e.what()});
    }
  }
  return out;
}

}  // namespace relsim
