#pragma once

#include <cctype>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "relsim/errors.hpp"
#include "relsim/functor.hpp"

namespace relsim {

// Surface syntax, loosest binding first:
//   F + G      sum
//   F * G      product
//   F . G      composition, F applied after G
//   atoms      C{a,b}  Id  Pow  Exp{a,b}  MVal(Z3)  MVal(N2)  MVal(path.json)  n  (F)
// A bare number n abbreviates C{0,...,n-1}. Chains of the same operator are flattened.

namespace detail {

class Lexer {
 public:
  explicit Lexer(std::string src) : s_(std::move(src)) {}

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool done() {
    skip();
    return pos_ >= s_.size();
  }
  char peek() {
    skip();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }
  bool eat(char c) {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }
  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }
  bool eat_word(const std::string& w) {
    skip();
    if (s_.compare(pos_, w.size(), w) != 0) return false;
    const std::size_t end = pos_ + w.size();
    if (end < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '_'))
      return false;
    pos_ = end;
    return true;
  }
  /// Characters up to (not including) any of `stops`, trimmed.
  std::string until(const std::string& stops) {
    skip();
    const std::size_t b = pos_;
    while (pos_ < s_.size() && stops.find(s_[pos_]) == std::string::npos) ++pos_;
    std::string t = s_.substr(b, pos_ - b);
    while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.pop_back();
    return t;
  }
  std::string number() {
    skip();
    const std::size_t b = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    return s_.substr(b, pos_ - b);
  }
  std::size_t pos() const { return pos_; }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, pos_ + 1);
  }

 private:
  std::string s_;
  std::size_t pos_ = 0;
};

inline std::vector<std::string> parse_name_list(Lexer& lx, char close) {
  std::vector<std::string> names;
  if (lx.eat(close)) return names;
  for (;;) {
    std::string n = lx.until(std::string(",") + close);
    if (n.empty()) lx.fail("empty element name");
    names.push_back(std::move(n));
    if (lx.eat(close)) return names;
    lx.expect(',');
  }
}

inline MonoidTable monoid_from_json(const nlohmann::json& j) {
  try {
    FinSet carrier(j.at("carrier").get<std::vector<std::string>>());
    auto idx = [&](const nlohmann::json& v) {
      auto i = carrier.index_of(v.is_string() ? v.get<std::string>() : v.dump());
      if (!i) throw ParseError("monoid element " + v.dump() + " not in carrier", 0);
      return *i;
    };
    std::vector<std::vector<std::size_t>> add;
    for (const auto& row : j.at("add")) {
      add.emplace_back();
      for (const auto& v : row) add.back().push_back(idx(v));
    }
    return MonoidTable(carrier, idx(j.at("unit")), std::move(add));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad monoid table: ") + e.what(), 0);
  }
}

inline MonoidTable parse_monoid_arg(Lexer& lx) {
  const std::string arg = lx.until(")");
  lx.expect(')');
  if (arg.size() > 1 && (arg[0] == 'Z' || arg[0] == 'N') &&
      arg.find_first_not_of("0123456789", 1) == std::string::npos) {
    const std::size_t k = std::stoul(arg.substr(1));
    if (arg[0] == 'Z') {
      if (k == 0) lx.fail("Z0 is not a monoid");
      return MonoidTable::cyclic(k);
    }
    return MonoidTable::capped(k);
  }
  std::ifstream in(arg);
  if (!in) lx.fail("cannot open monoid table '" + arg + "'");
  try {
    return monoid_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("bad monoid table '" + arg + "': " + e.what(), 0);
  }
}

inline FunctorExpr parse_sum(Lexer& lx);

inline FunctorExpr parse_atom(Lexer& lx) {
  if (lx.eat('(')) {
    FunctorExpr f = parse_sum(lx);
    lx.expect(')');
    return f;
  }
  if (std::isdigit(static_cast<unsigned char>(lx.peek()))) {
    const std::size_t n = std::stoul(lx.number());
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back(std::to_string(i));
    return FunctorExpr::constant(FinSet(std::move(names)));
  }
  if (lx.eat_word("Id")) return FunctorExpr::id();
  if (lx.eat_word("Pow")) return FunctorExpr::pow();
  if (lx.eat_word("Exp")) {
    lx.expect('{');
    return FunctorExpr::exp(FinSet(parse_name_list(lx, '}')));
  }
  if (lx.eat_word("C")) {
    lx.expect('{');
    return FunctorExpr::constant(FinSet(parse_name_list(lx, '}')));
  }
  if (lx.eat_word("MVal")) {
    lx.expect('(');
    return FunctorExpr::monoid_valued(parse_monoid_arg(lx));
  }
  lx.fail("expected a functor");
}

inline FunctorExpr parse_comp(Lexer& lx) {
  FunctorExpr outer = parse_atom(lx);
  if (!lx.eat('.')) return outer;
  return FunctorExpr::comp(outer, parse_comp(lx));
}

inline FunctorExpr parse_prod(Lexer& lx) {
  std::vector<FunctorExpr> parts{parse_comp(lx)};
  while (lx.eat('*')) parts.push_back(parse_comp(lx));
  return parts.size() == 1 ? parts[0] : FunctorExpr::prod(std::move(parts));
}

inline FunctorExpr parse_sum(Lexer& lx) {
  std::vector<FunctorExpr> parts{parse_prod(lx)};
  while (lx.eat('+')) parts.push_back(parse_prod(lx));
  return parts.size() == 1 ? parts[0] : FunctorExpr::sum(std::move(parts));
}

inline std::string join_names(const FinSet& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + s.name(i);
  return out;
}

inline std::string monoid_name(const MonoidTable& m) {
  if (m == MonoidTable::cyclic(m.size())) return "Z" + std::to_string(m.size());
  if (m == MonoidTable::capped(m.size() - 1)) return "N" + std::to_string(m.size() - 1);
  return "<table:" + std::to_string(m.size()) + ">";
}

}  // namespace detail

inline FunctorExpr parse_functor(const std::string& text) {
  detail::Lexer lx(text);
  FunctorExpr f = detail::parse_sum(lx);
  if (!lx.done()) lx.fail("trailing input");
  return f;
}

/// Print in the surface syntax; parse_functor(to_string(F)) == F for tabulated monoids.
inline std::string to_string(const FunctorExpr& f) {
  using K = FunctorExpr::Kind;
  auto wrap = [](const FunctorExpr& g, bool cond) {
    return cond ? "(" + to_string(g) + ")" : to_string(g);
  };
  switch (f.kind()) {
    case K::Const: return "C{" + detail::join_names(f.set()) + "}";
    case K::Id: return "Id";
    case K::Pow: return "Pow";
    case K::Exp: return "Exp{" + detail::join_names(f.set()) + "}";
    case K::MonoidVal: return "MVal(" + detail::monoid_name(f.monoid()) + ")";
    case K::Sum: {
      std::string out;
      for (std::size_t i = 0; i < f.parts().size(); ++i)
        out += (i ? " + " : "") + wrap(f.parts()[i], f.parts()[i].kind() == K::Sum);
      return out;
    }
    case K::Prod: {
      std::string out;
      for (std::size_t i = 0; i < f.parts().size(); ++i) {
        const auto k = f.parts()[i].kind();
        out += (i ? " * " : "") + wrap(f.parts()[i], k == K::Sum || k == K::Prod);
      }
      return out;
    }
    case K::Comp: {
      const auto ko = f.outer().kind();
      const auto ki = f.inner().kind();
      return wrap(f.outer(), ko == K::Sum || ko == K::Prod || ko == K::Comp) + " . " +
             wrap(f.inner(), ki == K::Sum || ki == K::Prod);
    }
  }
  return "?";
}

// F-value literals in JSON:
//   Const  "c"                 element name
//   Id     "x"                 state name
//   Pow    ["x", "y"]          subset
//   Exp    {"a": "x", ...}     one entry per label
//   Sum    {"tag": k, "value": v}
//   Prod   [v1, v2, ...]
//   Comp   outer literal whose states are inner literals
//   MVal   {"x": "m", ...}     missing states carry the unit

using StateReader = std::function<std::size_t(const nlohmann::json&)>;
using StateWriter = std::function<nlohmann::json(std::size_t)>;

namespace detail {

inline std::size_t read_value(const FunctorExpr& f, std::size_t n, const StateReader& rd,
                              const nlohmann::json& j) {
  using K = FunctorExpr::Kind;
  auto bad = [&](const std::string& what) -> ParseError {
    return ParseError("bad " + what + " literal " + j.dump(), 0);
  };
  switch (f.kind()) {
    case K::Const: {
      auto i = f.set().index_of(j.is_string() ? j.get<std::string>() : j.dump());
      if (!i) throw bad("constant");
      return *i;
    }
    case K::Id: return rd(j);
    case K::Pow: {
      if (!j.is_array()) throw bad("subset");
      std::size_t mask = 0;
      for (const auto& e : j) mask |= std::size_t{1} << rd(e);
      return mask;
    }
    case K::Exp: {
      if (!j.is_object()) throw bad("function");
      std::vector<std::size_t> d(f.set().size());
      for (std::size_t i = 0; i < d.size(); ++i) {
        const auto it = j.find(f.set().name(i));
        if (it == j.end()) throw bad("function (missing label " + f.set().name(i) + ")");
        d[i] = rd(*it);
      }
      for (const auto& [k, v] : j.items())
        if (!f.set().index_of(k)) throw bad("function (unknown label " + k + ")");
      return from_digits(d, n);
    }
    case K::Sum: {
      if (!j.is_object() || !j.contains("tag") || !j.contains("value")) throw bad("tagged");
      const auto tag = j.at("tag").get<std::size_t>();
      if (tag >= f.parts().size()) throw bad("tagged");
      return sum_inject(f, n, tag, read_value(f.parts()[tag], n, rd, j.at("value")));
    }
    case K::Prod: {
      if (!j.is_array() || j.size() != f.parts().size()) throw bad("tuple");
      std::vector<std::size_t> comps;
      for (std::size_t k = 0; k < j.size(); ++k) comps.push_back(read_value(f.parts()[k], n, rd, j[k]));
      return prod_join(f, n, comps);
    }
    case K::Comp: {
      const FunctorExpr& in = f.inner();
      StateReader inner = [&](const nlohmann::json& e) { return read_value(in, n, rd, e); };
      return read_value(f.outer(), card(in, n), inner, j);
    }
    case K::MonoidVal: {
      if (!j.is_object()) throw bad("monoid-valued");
      const MonoidTable& m = f.monoid();
      std::vector<std::size_t> d(n, m.unit());
      for (const auto& [k, v] : j.items()) {
        const std::size_t x = rd(nlohmann::json(k));
        auto e = m.carrier().index_of(v.is_string() ? v.get<std::string>() : v.dump());
        if (!e) throw bad("monoid-valued");
        d[x] = *e;
      }
      return from_digits(d, m.size());
    }
  }
  return 0;
}

inline nlohmann::json write_value(const FunctorExpr& f, std::size_t n, const StateWriter& wr,
                                  std::size_t u) {
  using K = FunctorExpr::Kind;
  switch (f.kind()) {
    case K::Const: return f.set().name(u);
    case K::Id: return wr(u);
    case K::Pow: {
      auto arr = nlohmann::json::array();
      for (std::size_t i = 0; i < n; ++i)
        if ((u >> i) & 1U) arr.push_back(wr(i));
      return arr;
    }
    case K::Exp: {
      auto obj = nlohmann::json::object();
      const auto d = digits(u, n, f.set().size());
      for (std::size_t i = 0; i < d.size(); ++i) obj[f.set().name(i)] = wr(d[i]);
      return obj;
    }
    case K::Sum: {
      auto [tag, local] = sum_locate(f, n, u);
      return {{"tag", tag}, {"value", write_value(f.parts()[tag], n, wr, local)}};
    }
    case K::Prod: {
      auto arr = nlohmann::json::array();
      const auto comps = prod_split(f, n, u);
      for (std::size_t k = 0; k < comps.size(); ++k) arr.push_back(write_value(f.parts()[k], n, wr, comps[k]));
      return arr;
    }
    case K::Comp: {
      const FunctorExpr& in = f.inner();
      StateWriter inner = [&](std::size_t w) { return write_value(in, n, wr, w); };
      return write_value(f.outer(), card(in, n), inner, u);
    }
    case K::MonoidVal: {
      const MonoidTable& m = f.monoid();
      auto obj = nlohmann::json::object();
      const auto d = digits(u, m.size(), n);
      for (std::size_t x = 0; x < n; ++x) {
        if (d[x] == m.unit()) continue;
        const auto key = wr(x);
        obj[key.is_string() ? key.get<std::string>() : key.dump()] = m.carrier().name(d[x]);
      }
      return obj;
    }
  }
  return nullptr;
}

}  // namespace detail

/// Decode an F-value literal over the named carrier X.
inline std::size_t value_from_json(const FunctorExpr& f, const FinSet& x, const nlohmann::json& j) {
  StateReader rd = [&](const nlohmann::json& e) -> std::size_t {
    auto i = x.index_of(e.is_string() ? e.get<std::string>() : e.dump());
    if (!i) throw ParseError("unknown state " + e.dump(), 0);
    return *i;
  };
  try {
    return detail::read_value(f, x.size(), rd, j);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad F-value literal: ") + e.what(), 0);
  }
}

inline nlohmann::json value_to_json(const FunctorExpr& f, const FinSet& x, std::size_t u) {
  StateWriter wr = [&](std::size_t i) { return nlohmann::json(x.name(i)); };
  return detail::write_value(f, x.size(), wr, u);
}

}  // namespace relsim
