#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "relsim/bisim.hpp"
#include "relsim/coalgebra.hpp"
#include "relsim/finrel_io.hpp"
#include "relsim/fixtures.hpp"
#include "relsim/functor_props.hpp"
#include "relsim/lts.hpp"
#include "relsim/relator_laws.hpp"
#include "relsim/relator_parse.hpp"
#include "relsim/reports.hpp"
#include "relsim/submonoid.hpp"

namespace relsim::cli {

enum ExitCode : int { kOk = 0, kFails = 1, kUsage = 2, kResource = 3 };

enum class Format { Text, Json, Dot };

struct RunConfig {
  std::vector<std::string> inputs;
  std::string relator;   // empty: Barr over the input functor
  std::string functor;   // for commands without a system
  std::string witness;
  std::string labels;    // comma separated
  std::string pair;      // "x,y"
  std::string data_dir;
  std::optional<std::size_t> max_size;
  std::size_t samples = 200;
  std::uint64_t seed = 1;
  Format format = Format::Text;
  Limits limits;
};

struct CommandResult {
  int code = kOk;
  std::string out;
  std::string err;
};

/// A loaded system; `lts` is set when the input was a transition system.
struct System {
  Coalgebra coalgebra;
  std::optional<LTS> lts;
};

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(relsim::detail::trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty() || !out.empty()) out.push_back(relsim::detail::trim(cur));
  return out;
}

inline bool is_json_path(const std::string& p) { return std::filesystem::path(p).extension() == ".json"; }

inline std::string seed_line(const RunConfig& c) { return "seed: " + std::to_string(c.seed) + "\n"; }

inline std::string relation_dot(const FinRel& r) {
  std::ostringstream os;
  os << "digraph relation {\n  rankdir=LR;\n";
  for (const auto& n : r.dom().names()) os << "  \"L." << n << "\" [label=\"" << n << "\"];\n";
  for (const auto& n : r.cod().names()) os << "  \"R." << n << "\" [label=\"" << n << "\"];\n";
  for (auto [x, y] : r.pairs())
    os << "  \"L." << r.dom().name(x) << "\" -> \"R." << r.cod().name(y) << "\" [style=dashed, dir=none];\n";
  os << "}\n";
  return os.str();
}

/// Equivalence classes when r is an equivalence on one carrier.
inline std::optional<std::vector<std::vector<std::string>>> classes(const FinRel& r) {
  if (!(r.dom() == r.cod())) return std::nullopt;
  if (!(r == converse(r)) || !leq(FinRel::identity(r.dom()), r) || !leq(compose(r, r), r)) return std::nullopt;
  std::vector<std::vector<std::string>> out;
  std::vector<bool> done(r.dom().size(), false);
  for (std::size_t x = 0; x < r.dom().size(); ++x) {
    if (done[x]) continue;
    std::vector<std::string> cls;
    for (std::size_t y = x; y < r.dom().size(); ++y)
      if (r.holds(x, y)) {
        done[y] = true;
        cls.push_back(r.dom().name(y));
      }
    out.push_back(std::move(cls));
  }
  return out;
}

inline std::string classes_text(const std::vector<std::vector<std::string>>& cs) {
  std::string out;
  for (const auto& c : cs) {
    out += out.empty() ? "{" : " {";
    for (std::size_t i = 0; i < c.size(); ++i) out += (i ? "," : "") + c[i];
    out += "}";
  }
  return out;
}

inline std::pair<std::size_t, std::size_t> parse_pair(const std::string& text, const FinSet& x, const FinSet& y) {
  const auto parts = split(text, ',');
  if (parts.size() != 2) throw ParseError("expected a pair 'x,y'", 1);
  const auto i = x.index_of(parts[0]);
  const auto j = y.index_of(parts[1]);
  if (!i) throw ParseError("unknown state '" + parts[0] + "'", 1);
  if (!j) throw ParseError("unknown state '" + parts[1] + "'", parts[0].size() + 2);
  return {*i, *j};
}

}  // namespace detail

/// JSON with "trans" is an LTS, JSON with "transition" a coalgebra, anything else
/// the `src -label-> dst` text format.
inline System load_system(const std::string& path, const Limits& limits = {}) {
  if (detail::is_json_path(path)) {
    const auto j = read_json(path);
    if (j.contains("trans")) {
      LTS l = lts_from_json(j);
      return {to_coalgebra(l, limits), l};
    }
    return {coalgebra_from_json(j, limits), std::nullopt};
  }
  LTS l = lts_from_text(read_file(path));
  return {to_coalgebra(l, limits), l};
}

inline FinRel load_relation(const std::string& path, const FinSet& dom, const FinSet& cod) {
  if (detail::is_json_path(path)) {
    const auto j = read_json(path);
    return relation_from_json(j.contains("relation") ? j.at("relation") : j, dom, cod);
  }
  return relation_from_text(read_file(path), dom, cod);
}

namespace detail {

struct Pair {
  System a, b;
};

inline Pair load_pair(const RunConfig& c) {
  if (c.inputs.empty() || c.inputs.size() > 2) throw SpecError("expected one or two input systems");
  System a = load_system(c.inputs[0], c.limits);
  System b = c.inputs.size() == 2 ? load_system(c.inputs[1], c.limits) : a;
  return {std::move(a), std::move(b)};
}

inline RelatorSpec relator_for(const RunConfig& c, const FunctorExpr& f) {
  if (c.relator.empty()) return RelatorSpec::barr(f);
  RelatorSpec r = parse_relator(c.relator);
  if (!(r.functor() == f))
    throw SpecError("relator is over " + to_string(r.functor()) + " but the input is over " + to_string(f));
  return r;
}

inline RelatorSpec relator_without_system(const RunConfig& c) {
  if (!c.relator.empty()) return parse_relator(c.relator);
  if (!c.functor.empty()) return RelatorSpec::barr(parse_functor(c.functor));
  throw SpecError("give --relator or --functor");
}

}  // namespace detail

inline CommandResult cmd_similarity(const RunConfig& c) {
  const auto [a, b] = detail::load_pair(c);
  const RelatorSpec spec = detail::relator_for(c, a.coalgebra.functor());
  const FinRel sim = similarity(spec, a.coalgebra, b.coalgebra, c.limits);
  std::optional<bool> matches;
  try {
    matches = sim == behavioural_equivalence(a.coalgebra, b.coalgebra, c.limits);
  } catch (const ResourceError&) {
  }
  const auto cls = c.inputs.size() == 1 ? detail::classes(sim) : std::nullopt;
  CommandResult res;
  if (c.format == Format::Json) {
    nlohmann::json j;
    j["seed"] = c.seed;
    j["relator"] = to_string(spec);
    j["relation"] = to_json(sim);
    j["matches_behavioural_equivalence"] = matches ? nlohmann::json(*matches) : nlohmann::json(nullptr);
    if (cls) j["classes"] = *cls;
    res.out = j.dump(2) + "\n";
  } else if (c.format == Format::Dot) {
    res.out = "// " + detail::seed_line(c) +
              (a.lts && b.lts ? to_dot(*a.lts, *b.lts, sim) : detail::relation_dot(sim));
  } else {
    std::ostringstream os;
    os << detail::seed_line(c) << "relator: " << to_string(spec) << "\n"
       << "similarity: " << sim.count() << " pairs\n"
       << to_text(sim) << "behavioural equivalence: "
       << (matches ? (*matches ? "equal" : "differs") : "skipped (too large)") << "\n";
    if (cls) os << "classes: " << detail::classes_text(*cls) << "\n";
    res.out = os.str();
  }
  return res;
}

inline CommandResult cmd_check(const RunConfig& c) {
  const auto [a, b] = detail::load_pair(c);
  if (c.witness.empty()) throw SpecError("check needs --witness");
  const RelatorSpec spec = detail::relator_for(c, a.coalgebra.functor());
  const FinRel r = load_relation(c.witness, a.coalgebra.states(), b.coalgebra.states());
  const SimulationCheck chk = is_simulation(spec, r, a.coalgebra, b.coalgebra, c.limits);
  CommandResult res;
  res.code = chk.holds ? kOk : kFails;
  std::string failing;
  if (chk.failing)
    failing = "(" + r.dom().name(chk.failing->first) + ", " + r.cod().name(chk.failing->second) + ")";
  if (c.format == Format::Json) {
    nlohmann::json j;
    j["seed"] = c.seed;
    j["relator"] = to_string(spec);
    j["holds"] = chk.holds;
    if (chk.failing) j["failing_pair"] = {r.dom().name(chk.failing->first), r.cod().name(chk.failing->second)};
    res.out = j.dump(2) + "\n";
  } else {
    res.out = detail::seed_line(c) + "relator: " + to_string(spec) + "\n" +
              (chk.holds ? "holds\n" : "fails at " + failing + "\n");
  }
  return res;
}

inline CommandResult cmd_lattice(const RunConfig& c) {
  std::vector<std::string> names = detail::split(c.labels, ',');
  if (names.size() == 1 && names[0].empty()) names.clear();
  const NLELattice lat = enumerate_nle(FinSet(names));
  CommandResult res;
  if (c.format == Format::Json) {
    nlohmann::json j;
    j["seed"] = c.seed;
    j["labels"] = names;
    j["lower_bound"] = lat.lower_bound;
    j["nodes"] = nlohmann::json::array();
    for (const auto& s : lat.nodes) j["nodes"].push_back(to_json(s, false));
    j["hasse"] = lat.hasse;
    res.out = j.dump(2) + "\n";
  } else if (c.format == Format::Dot) {
    res.out = "// " + detail::seed_line(c) + to_dot(lat);
  } else {
    std::ostringstream os;
    os << detail::seed_line(c) << "nodes: " << lat.nodes.size() << (lat.lower_bound ? " (lower bound)" : "")
       << "\n";
    for (std::size_t i = 0; i < lat.nodes.size(); ++i)
      os << "  n" << i << " " << describe(lat.nodes[i]) << " members=" << lat.nodes[i].size() << "\n";
    os << "hasse:";
    for (auto [lo, hi] : lat.hasse) os << " n" << lo << "<n" << hi;
    os << "\n";
    res.out = os.str();
  }
  return res;
}

/// Minimal witnesses for a seed pair under Barr and under the greatest twisted relator.
inline CommandResult cmd_twisted(const RunConfig& c) {
  const auto [a, b] = detail::load_pair(c);
  if (!a.lts || !b.lts) throw SpecError("twisted needs labelled transition systems");
  if (c.pair.empty()) throw SpecError("twisted needs --pair x,y");
  const auto seed = detail::parse_pair(c.pair, a.coalgebra.states(), b.coalgebra.states());
  const FinSet& labels = a.lts->labels();
  const RelatorSpec tw =
      c.relator.empty() ? twisted_relator(labels.size() == 2 ? top_submonoid(labels) : greatest_nle(labels))
                        : detail::relator_for(c, a.coalgebra.functor());
  const RelatorSpec barr = RelatorSpec::barr(a.coalgebra.functor());
  const auto ws = minimal_witness(barr, a.coalgebra, b.coalgebra, seed, c.limits);
  const auto wt = minimal_witness(tw, a.coalgebra, b.coalgebra, seed, c.limits);
  CommandResult res;
  res.code = ws && wt ? kOk : kFails;
  if (c.format == Format::Json) {
    nlohmann::json j;
    j["seed"] = c.seed;
    j["relator"] = to_string(tw);
    j["standard"] = ws ? to_json(*ws) : nlohmann::json(nullptr);
    j["twisted"] = wt ? to_json(*wt) : nlohmann::json(nullptr);
    res.out = j.dump(2) + "\n";
  } else if (c.format == Format::Dot) {
    res.out = "// " + detail::seed_line(c) + (wt ? to_dot(*a.lts, *b.lts, *wt) : to_dot(*a.lts));
  } else {
    std::ostringstream os;
    os << detail::seed_line(c) << "relator: " << to_string(tw) << "\n";
    for (const auto& [name, w] : {std::pair{"standard", &ws}, std::pair{"twisted", &wt}}) {
      if (*w)
        os << name << " witness: " << (*w)->count() << " pairs\n" << to_text(**w);
      else
        os << name << " witness: none (seed not bisimilar)\n";
    }
    res.out = os.str();
  }
  return res;
}

inline CommandResult cmd_oracle_compare(const RunConfig& c) {
  const RelatorSpec spec = detail::relator_without_system(c);
  const SampleConfig cfg{c.samples, c.max_size.value_or(3), c.seed};
  const SoundnessReport rep = soundness_completeness_report(spec, cfg, c.limits);
  CommandResult res;
  res.code = rep.sound() ? kOk : kFails;
  if (c.format == Format::Json) {
    nlohmann::json j;
    j["seed"] = c.seed;
    j["max_size"] = cfg.max_states;
    j["relator"] = to_string(spec);
    j["samples"] = rep.samples;
    j["unsound"] = rep.unsound;
    j["incomplete"] = rep.incomplete;
    j["counterexamples"] = nlohmann::json::array();
    for (const auto& ce : rep.counterexamples)
      j["counterexamples"].push_back(nlohmann::json{
          {"sample", ce.sample}, {"x", ce.x}, {"y", ce.y}, {"similar", ce.similar}, {"equivalent", ce.equivalent}});
    res.out = j.dump(2) + "\n";
  } else {
    std::ostringstream os;
    os << detail::seed_line(c) << "max-size: " << cfg.max_states << "\nrelator: " << to_string(spec) << "\n"
       << "samples: " << rep.samples << "\nsound: " << (rep.sound() ? "yes" : "no") << " (" << rep.unsound
       << " failing)\ncomplete: " << (rep.complete() ? "yes" : "no") << " (" << rep.incomplete << " failing)\n";
    for (const auto& ce : rep.counterexamples)
      os << "  sample " << ce.sample << ": s" << ce.x << " vs s" << ce.y << (ce.similar ? " similar" : " dissimilar")
         << (ce.equivalent ? " but equivalent" : " but inequivalent") << "\n";
    res.out = os.str();
  }
  return res;
}

inline CommandResult cmd_properties(const RunConfig& c) {
  const RelatorSpec spec = detail::relator_without_system(c);
  const std::size_t n = c.max_size.value_or(2);
  LiftCache cache(spec, c.limits);
  std::vector<LawResult> laws;
  laws.push_back(is_normal(cache, n));
  laws.push_back(is_monotone(cache, n));
  laws.push_back(is_lax_extension(cache, n));
  laws.push_back(is_relational_connector(cache, n));
  laws.push_back(preserves_converses(cache, n));
  laws.push_back(difunctional_functoriality_check(cache, n));
  const PreservationProfile prof = preservation_profile(spec.functor());
  CommandResult res;
  for (const auto& l : laws)
    if (!l.holds) res.code = kFails;
  if (c.format == Format::Json) {
    nlohmann::json j;
    j["seed"] = c.seed;
    j["max_size"] = n;
    j["relator"] = to_string(spec);
    j["profile"] = {{"weak_pullbacks", prof.weak_pullbacks},
                    {"inverse_images", prof.inverse_images},
                    {"quarter_iso_pullbacks", prof.quarter_iso_pullbacks},
                    {"empty_intersections", prof.empty_intersections}};
    for (const auto& l : laws) {
      nlohmann::json e{{"holds", l.holds}, {"cases", l.cases}, {"failures", l.failures},
                       {"empty_failures", l.empty_failures}};
      if (l.certificate) e["certificate"] = l.certificate->text;
      j["laws"][l.law] = e;
    }
    res.out = j.dump(2) + "\n";
  } else {
    std::ostringstream os;
    os << detail::seed_line(c) << "max-size: " << n << "\nrelator: " << to_string(spec) << "\n"
       << "functor preserves: weak pullbacks=" << prof.weak_pullbacks << " inverse images=" << prof.inverse_images
       << " 1/4-iso=" << prof.quarter_iso_pullbacks << " empty intersections=" << prof.empty_intersections << "\n";
    for (const auto& l : laws) {
      os << l.law << ": " << (l.holds ? "holds" : "fails") << " (" << l.cases << " cases)";
      if (l.certificate) os << "\n  " << l.certificate->text;
      os << "\n";
    }
    res.out = os.str();
  }
  return res;
}

inline CommandResult cmd_examples(const RunConfig& c) {
  const auto results = run_fixtures(std::filesystem::path(c.data_dir.empty() ? std::string("data") : c.data_dir));
  CommandResult res;
  for (const auto& r : results)
    if (!r.pass) res.code = kFails;
  if (c.format == Format::Json) {
    nlohmann::json j;
    j["seed"] = c.seed;
    j["fixtures"] = nlohmann::json::array();
    for (const auto& r : results) j["fixtures"].push_back(nlohmann::json{{"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
    res.out = j.dump(2) + "\n";
  } else {
    std::ostringstream os;
    os << detail::seed_line(c);
    for (const auto& r : results) os << (r.pass ? "PASS " : "FAIL ") << r.name << ": " << r.detail << "\n";
    res.out = os.str();
  }
  return res;
}

/// Runs a command and maps library errors onto exit codes.
inline CommandResult run_guarded(const std::function<CommandResult()>& fn) {
  try {
    return fn();
  } catch (const ParseError& e) {
    return {kUsage, "", std::string("parse error: ") + e.what() + "\n"};
  } catch (const ResourceError& e) {
    return {kResource, "", std::string("resource bound: ") + e.what() + "\n"};
  } catch (const InvariantError& e) {
    return {kFails, "", std::string("invariant violated: ") + e.what() + "\n"};
  } catch (const Error& e) {
    return {kUsage, "", std::string("error: ") + e.what() + "\n"};
  } catch (const std::exception& e) {
    return {kUsage, "", std::string("error: ") + e.what() + "\n"};
  }
}

}  // namespace relsim::cli
