#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "relsim/coalgebra.hpp"
#include "relsim/errors.hpp"
#include "relsim/finrel.hpp"
#include "relsim/finrel_io.hpp"
#include "relsim/relator.hpp"
#include "relsim/submonoid.hpp"

namespace relsim {

struct Transition {
  std::size_t src = 0;
  std::size_t label = 0;
  std::size_t dst = 0;
  friend auto operator<=>(const Transition&, const Transition&) = default;
};

/// A finite labelled transition system. Transitions are kept sorted and unique.
class LTS {
 public:
  LTS(FinSet states, FinSet labels, std::vector<Transition> trans)
      : states_(std::move(states)), labels_(std::move(labels)), trans_(std::move(trans)) {
    for (const auto& t : trans_)
      if (t.src >= states_.size() || t.dst >= states_.size() || t.label >= labels_.size())
        throw SpecError("transition endpoint or label out of range");
    std::sort(trans_.begin(), trans_.end());
    trans_.erase(std::unique(trans_.begin(), trans_.end()), trans_.end());
  }

  const FinSet& states() const noexcept { return states_; }
  const FinSet& labels() const noexcept { return labels_; }
  std::size_t size() const noexcept { return states_.size(); }
  const std::vector<Transition>& transitions() const noexcept { return trans_; }

  std::vector<std::size_t> successors(std::size_t x, std::size_t label) const {
    std::vector<std::size_t> out;
    for (const auto& t : trans_)
      if (t.src == x && t.label == label) out.push_back(t.dst);
    return out;
  }

 private:
  FinSet states_;
  FinSet labels_;
  std::vector<Transition> trans_;
};

inline FunctorExpr lts_functor(const FinSet& labels) {
  return FunctorExpr::comp(FunctorExpr::exp(labels), FunctorExpr::pow());
}

/// α(x)(u) = {x' | x -u-> x'} as a coalgebra for Exp(A)·Pow.
inline Coalgebra to_coalgebra(const LTS& l, const Limits& limits = {}) {
  const FunctorExpr f = lts_functor(l.labels());
  const std::size_t n = l.size();
  checked_card(f, n, limits);
  std::vector<std::vector<std::size_t>> masks(n, std::vector<std::size_t>(l.labels().size(), 0));
  for (const auto& t : l.transitions()) masks[t.src][t.label] |= std::size_t{1} << t.dst;
  std::vector<std::size_t> trans(n);
  for (std::size_t x = 0; x < n; ++x) trans[x] = from_digits(masks[x], std::size_t{1} << n);
  return Coalgebra(f, l.states(), std::move(trans), limits);
}

/// Submonoid extension of the exponential composed with the Egli-Milner lifting.
inline RelatorSpec twisted_relator(const UCSubmonoid& s, bool allow_non_normal = false) {
  if (!allow_non_normal && !s.all_normal())
    throw SpecError("submonoid has non-normal members; the induced bisimulation would be unsound");
  return RelatorSpec::comp_of(RelatorSpec::submonoid_exp(s), RelatorSpec::barr(FunctorExpr::pow()));
}

inline FinSet ab_labels() { return FinSet({"a", "b"}); }

/// Generated by {(a,b),(a,a),(b,a)} and {(a,b),(b,b),(b,a)}: the greatest normal one on two labels.
inline UCSubmonoid top_submonoid(const FinSet& ab) {
  if (ab.size() != 2) throw SpecError("top_submonoid needs exactly two labels");
  FinRel phi_a(ab, ab), phi_b(ab, ab);
  phi_a.set(0, 1), phi_a.set(0, 0), phi_a.set(1, 0);
  phi_b.set(0, 1), phi_b.set(1, 1), phi_b.set(1, 0);
  return generate(ab, std::vector<FinRel>{phi_a, phi_b});
}

struct ClauseCheck {
  bool holds = true;
  std::optional<std::pair<std::size_t, std::size_t>> failing;
  explicit operator bool() const { return holds; }
};

namespace detail {

inline bool matched(const LTS& l1, const LTS& l2, const FinRel& r, std::size_t x, std::size_t y, std::size_t u,
                    std::size_t v) {
  const auto xs = l1.successors(x, u);
  const auto ys = l2.successors(y, v);
  for (auto x2 : xs)
    if (std::none_of(ys.begin(), ys.end(), [&](std::size_t y2) { return r.holds(x2, y2); })) return false;
  for (auto y2 : ys)
    if (std::none_of(xs.begin(), xs.end(), [&](std::size_t x2) { return r.holds(x2, y2); })) return false;
  return true;
}

}  // namespace detail

/// Three clause families over labels {a, b}: matched labels, the (a,b),(b,a),(b,b)
/// family, and the (a,b),(b,a),(a,a) family.
inline ClauseCheck is_twisted_bisimulation_clausal(const FinRel& r, const LTS& l1, const LTS& l2) {
  if (l1.labels().size() != 2 || l2.labels().size() != 2)
    throw SpecError("the clausal checker is defined for two labels only");
  require_compatible(l1.labels(), l2.labels(), "clausal check (labels)");
  require_compatible(r.dom(), l1.states(), "clausal check (source)");
  require_compatible(r.cod(), l2.states(), "clausal check (target)");
  using Fam = std::vector<std::pair<std::size_t, std::size_t>>;
  const Fam families[3] = {{{0, 0}, {1, 1}}, {{0, 1}, {1, 0}, {1, 1}}, {{0, 1}, {1, 0}, {0, 0}}};
  for (auto [x, y] : r.pairs()) {
    bool ok = false;
    for (const auto& fam : families) {
      ok = std::all_of(fam.begin(), fam.end(),
                       [&](const auto& uv) { return detail::matched(l1, l2, r, x, y, uv.first, uv.second); });
      if (ok) break;
    }
    if (!ok) return ClauseCheck{false, std::make_pair(x, y)};
  }
  return {};
}

/// s_i -a-> s_{i+1 mod n}, t_j -a-> t_{j+1 mod m}, s_i -b-> t_0, t_j -b-> s_0.
inline LTS minimization_family(std::size_t n, std::size_t m) {
  if (n == 0 || m == 0 || std::gcd(n, m) != 1) throw SpecError("n and m must be positive and coprime");
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back("s" + std::to_string(i));
  for (std::size_t j = 0; j < m; ++j) names.push_back("t" + std::to_string(j));
  std::vector<Transition> tr;
  for (std::size_t i = 0; i < n; ++i) {
    tr.push_back({i, 0, (i + 1) % n});
    tr.push_back({i, 1, n});
  }
  for (std::size_t j = 0; j < m; ++j) {
    tr.push_back({n + j, 0, n + (j + 1) % m});
    tr.push_back({n + j, 1, 0});
  }
  return LTS(FinSet(std::move(names)), ab_labels(), std::move(tr));
}

/// The same family as a deterministic automaton, all states accepting: functor 2 × Exp{a,b}.
inline Coalgebra minimization_automaton(std::size_t n, std::size_t m) {
  const LTS l = minimization_family(n, m);
  const FunctorExpr f = FunctorExpr::prod({FunctorExpr::constant(FinSet({"0", "1"})), FunctorExpr::exp(ab_labels())});
  const std::size_t k = l.size();
  std::vector<std::size_t> t(k);
  for (std::size_t x = 0; x < k; ++x) {
    const std::size_t sa = l.successors(x, 0).front(), sb = l.successors(x, 1).front();
    t[x] = prod_join(f, k, {1, from_digits({sa, sb}, k)});
  }
  return Coalgebra(f, l.states(), std::move(t));
}

/// S × {s_0, t_0} ∪ {s_0, t_0} × S.
inline FinRel linear_witness(std::size_t n, std::size_t m) {
  const LTS l = minimization_family(n, m);
  FinRel r(l.states(), l.states());
  for (std::size_t x = 0; x < l.size(); ++x)
    for (std::size_t anchor : {std::size_t{0}, n}) {
      r.set(x, anchor);
      r.set(anchor, x);
    }
  if (!is_twisted_bisimulation_clausal(r, l, l)) throw InvariantError("linear witness fails the twisted clauses");
  return r;
}

/// x -a-> x, x -b-> y, y -a-> y, y -b-> x, p -a-> x, p -b-> x, q -a-> x, q -b-> y.
inline LTS final_example() {
  const FinSet s({"p", "q", "x", "y"});
  const std::size_t p = 0, q = 1, x = 2, y = 3, a = 0, b = 1;
  return LTS(s, ab_labels(),
             {{x, a, x}, {x, b, y}, {y, a, y}, {y, b, x}, {p, a, x}, {p, b, x}, {q, a, x}, {q, b, y}});
}

// ---- I/O ----

inline nlohmann::json to_json(const LTS& l) {
  nlohmann::json j;
  j["states"] = l.states().names();
  j["labels"] = l.labels().names();
  j["trans"] = nlohmann::json::array();
  for (const auto& t : l.transitions())
    j["trans"].push_back({l.states().name(t.src), l.labels().name(t.label), l.states().name(t.dst)});
  return j;
}

inline LTS lts_from_json(const nlohmann::json& j) {
  try {
    const FinSet states(j.at("states").get<std::vector<std::string>>());
    const FinSet labels(j.at("labels").get<std::vector<std::string>>());
    std::vector<Transition> tr;
    std::size_t k = 0;
    for (const auto& e : j.at("trans")) {
      if (!e.is_array() || e.size() != 3) throw ParseError("transition must be [src, label, dst]", k);
      auto idx = [&](const FinSet& set, const nlohmann::json& v) {
        auto i = set.index_of(v.get<std::string>());
        if (!i) throw ParseError("unknown name '" + v.get<std::string>() + "' in transition", k);
        return *i;
      };
      tr.push_back({idx(states, e[0]), idx(labels, e[1]), idx(states, e[2])});
      ++k;
    }
    return LTS(states, labels, std::move(tr));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad LTS JSON: ") + e.what(), 0);
  }
}

inline std::string to_text(const LTS& l) {
  std::ostringstream os;
  os << "states:";
  for (const auto& s : l.states().names()) os << ' ' << s;
  os << "\nlabels:";
  for (const auto& s : l.labels().names()) os << ' ' << s;
  os << '\n';
  for (const auto& t : l.transitions())
    os << l.states().name(t.src) << " -" << l.labels().name(t.label) << "-> " << l.states().name(t.dst) << '\n';
  return os.str();
}

/// Lines `src -label-> dst`; optional `states:` and `labels:` headers fix the order,
/// otherwise names are taken in order of first appearance. `#` starts a comment.
inline LTS lts_from_text(const std::string& text) {
  std::vector<std::string> states, labels;
  bool fixed_states = false, fixed_labels = false;
  std::vector<std::tuple<std::string, std::string, std::string, std::size_t>> raw;
  auto note = [](std::vector<std::string>& v, const std::string& s) {
    if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(s);
  };
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.rfind("states:", 0) == 0) {
      for (auto& s : detail::split_ws(line.substr(7))) note(states, s);
      fixed_states = true;
      continue;
    }
    if (line.rfind("labels:", 0) == 0) {
      for (auto& s : detail::split_ws(line.substr(7))) note(labels, s);
      fixed_labels = true;
      continue;
    }
    const auto dash = line.find(" -");
    const auto arrow = line.find("-> ");
    if (dash == std::string::npos || arrow == std::string::npos || arrow <= dash + 2)
      throw ParseError("expected 'src -label-> dst'", lineno);
    const std::string src = detail::trim(line.substr(0, dash));
    const std::string lab = detail::trim(line.substr(dash + 2, arrow - dash - 2));
    const std::string dst = detail::trim(line.substr(arrow + 3));
    if (src.empty() || lab.empty() || dst.empty()) throw ParseError("empty name in transition", lineno);
    raw.emplace_back(src, lab, dst, lineno);
  }
  for (const auto& [s, l, d, ln] : raw) {
    auto need = [&, ln = ln](std::vector<std::string>& v, bool fixed, const std::string& name) {
      if (fixed && std::find(v.begin(), v.end(), name) == v.end())
        throw ParseError("undeclared name '" + name + "'", ln);
      note(v, name);
    };
    need(states, fixed_states, s);
    need(labels, fixed_labels, l);
    need(states, fixed_states, d);
  }
  const FinSet st(states), lb(labels);
  std::vector<Transition> tr;
  for (const auto& [s, l, d, ln] : raw) tr.push_back({*st.index_of(s), *lb.index_of(l), *st.index_of(d)});
  return LTS(st, lb, std::move(tr));
}

namespace detail {

inline std::string dot_id(const std::string& prefix, const std::string& name) {
  std::string out = "\"" + prefix;
  for (char c : name) out += (c == '"' ? '\'' : c);
  return out + "\"";
}

}  // namespace detail

inline std::string to_dot(const LTS& l, const std::string& graph_name = "lts") {
  std::ostringstream os;
  os << "digraph " << graph_name << " {\n";
  for (const auto& s : l.states().names()) os << "  " << detail::dot_id("", s) << ";\n";
  for (const auto& t : l.transitions())
    os << "  " << detail::dot_id("", l.states().name(t.src)) << " -> " << detail::dot_id("", l.states().name(t.dst))
       << " [label=\"" << l.labels().name(t.label) << "\"];\n";
  os << "}\n";
  return os.str();
}

/// Both systems side by side; related pairs drawn as dashed undirected edges.
inline std::string to_dot(const LTS& l1, const LTS& l2, const FinRel& r) {
  std::ostringstream os;
  os << "digraph witness {\n";
  const std::pair<const LTS*, const char*> sides[2] = {{&l1, "L."}, {&l2, "R."}};
  for (std::size_t k = 0; k < 2; ++k) {
    const LTS& l = *sides[k].first;
    const std::string pre = sides[k].second;
    os << "  subgraph cluster_" << k << " {\n";
    for (const auto& s : l.states().names())
      os << "    " << detail::dot_id(pre, s) << " [label=\"" << s << "\"];\n";
    for (const auto& t : l.transitions())
      os << "    " << detail::dot_id(pre, l.states().name(t.src)) << " -> "
         << detail::dot_id(pre, l.states().name(t.dst)) << " [label=\"" << l.labels().name(t.label) << "\"];\n";
    os << "  }\n";
  }
  for (auto [x, y] : r.pairs())
    os << "  " << detail::dot_id("L.", l1.states().name(x)) << " -> " << detail::dot_id("R.", l2.states().name(y))
       << " [style=dashed, dir=none, constraint=false];\n";
  os << "}\n";
  return os.str();
}

}  // namespace relsim
