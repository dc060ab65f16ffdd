#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "relsim/errors.hpp"
#include "relsim/functor_io.hpp"
#include "relsim/lts.hpp"
#include "relsim/relator.hpp"
#include "relsim/submonoid.hpp"

namespace relsim {

// Relator expressions:
//   barr(F)  cobarr(F)  upper  lower
//   submon(Exp{a,b}; gens: [(a,b),(b,b),(b,a)], [(a,a),(a,b),(b,a)])
//   submon(Exp{a,b}; top)  submon(Exp{a,b}; bot)  greatest(Exp{a,b})
//   comp(R, S)  sum(R, ...)  prod(R, ...)  sup(R, ...)  inf(R, ...)
//   upto-difun(R)  twisted{a,b}
// comp(R, S) applies S first and R to the result.

namespace detail {

class RelatorParser {
 public:
  explicit RelatorParser(std::string text) : s_(std::move(text)) {}

  RelatorSpec parse() {
    RelatorSpec r = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return r;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_ + 1); }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  std::string word() {
    skip();
    const std::size_t b = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '-' || s_[pos_] == '_'))
      ++pos_;
    if (b == pos_) fail("expected a name");
    return s_.substr(b, pos_ - b);
  }

  /// Text up to the first of `stops` at bracket depth zero.
  std::string balanced(const std::string& stops) {
    skip();
    const std::size_t b = pos_;
    int depth = 0;
    while (pos_ < s_.size()) {
      const char c = s_[pos_];
      if (depth == 0 && stops.find(c) != std::string::npos) break;
      if (c == '(' || c == '{' || c == '[') ++depth;
      if (c == ')' || c == '}' || c == ']') {
        if (depth == 0) break;
        --depth;
      }
      ++pos_;
    }
    if (b == pos_) fail("expected a functor expression");
    return s_.substr(b, pos_ - b);
  }

  FunctorExpr functor_arg(const std::string& stops) {
    const std::size_t at = pos_;
    const std::string text = balanced(stops);
    try {
      return parse_functor(text);
    } catch (const ParseError& e) {
      pos_ = at;
      fail(std::string("in functor: ") + e.what());
    }
  }

  FinSet exp_labels(const FunctorExpr& f) {
    if (f.kind() != FunctorExpr::Kind::Exp) fail("expected an exponential functor Exp{...}");
    return f.set();
  }

  std::vector<RelatorSpec> list() {
    std::vector<RelatorSpec> out;
    expect('(');
    out.push_back(expr());
    while (accept(',')) out.push_back(expr());
    expect(')');
    return out;
  }

  std::string label_name() {
    skip();
    const std::size_t b = pos_;
    while (pos_ < s_.size() && std::string_view(",()}").find(s_[pos_]) == std::string_view::npos &&
           !std::isspace(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
    if (b == pos_) fail("expected a label");
    return s_.substr(b, pos_ - b);
  }

  EndoMask generator(const FinSet& a) {
    expect('[');
    EndoMask m = 0;
    if (accept(']')) return m;
    do {
      expect('(');
      const std::size_t at = pos_;
      const auto i = a.index_of(label_name());
      expect(',');
      const auto j = a.index_of(label_name());
      if (!i || !j) {
        pos_ = at;
        fail("unknown label in generator");
      }
      expect(')');
      m |= EndoMask{1} << (*i * a.size() + *j);
    } while (accept(','));
    expect(']');
    return m;
  }

  RelatorSpec submon() {
    expect('(');
    const FinSet a = exp_labels(functor_arg(";"));
    expect(';');
    const std::string mode = word();
    RelatorSpec out = RelatorSpec::barr(FunctorExpr::exp(a));
    if (mode == "top") {
      out = RelatorSpec::submonoid_exp(greatest_nle(a));
    } else if (mode == "bot") {
      out = RelatorSpec::submonoid_exp(barr_submonoid(a));
    } else if (mode == "gens") {
      expect(':');
      std::vector<EndoMask> gens{generator(a)};
      while (accept(',')) gens.push_back(generator(a));
      out = RelatorSpec::submonoid_exp(generate(a, gens));
    } else {
      fail("expected 'gens:', 'top' or 'bot'");
    }
    expect(')');
    return out;
  }

  RelatorSpec expr() {
    const std::size_t at = (skip(), pos_);
    const std::string head = word();
    try {
      if (head == "barr" || head == "cobarr") {
        expect('(');
        FunctorExpr f = functor_arg(")");
        expect(')');
        return head == "barr" ? RelatorSpec::barr(f) : RelatorSpec::cobarr(f);
      }
      if (head == "upper") return RelatorSpec::pow_upper();
      if (head == "lower") return RelatorSpec::pow_lower();
      if (head == "submon") return submon();
      if (head == "greatest") {
        expect('(');
        const FinSet a = exp_labels(functor_arg(")"));
        expect(')');
        return RelatorSpec::submonoid_exp(greatest_nle(a));
      }
      if (head == "twisted") {
        expect('{');
        std::vector<std::string> names{label_name()};
        while (accept(',')) names.push_back(label_name());
        expect('}');
        const FinSet a(names);
        return twisted_relator(a.size() == 2 ? top_submonoid(a) : greatest_nle(a));
      }
      if (head == "comp") {
        auto parts = list();
        if (parts.size() != 2) fail("comp takes two relators");
        return RelatorSpec::comp_of(parts[0], parts[1]);
      }
      if (head == "sum") return RelatorSpec::sum_of(list());
      if (head == "prod") return RelatorSpec::prod_of(list());
      if (head == "sup") return RelatorSpec::sup(list());
      if (head == "inf") return RelatorSpec::inf(list());
      if (head == "upto-difun") {
        auto parts = list();
        if (parts.size() != 1) fail("upto-difun takes one relator");
        return RelatorSpec::up_to_difunctional(parts[0]);
      }
    } catch (const SpecError& e) {
      pos_ = at;
      fail(e.what());
    }
    pos_ = at;
    fail("unknown relator '" + head + "'");
  }

  std::string s_;
  std::size_t pos_ = 0;
};

inline std::string join(const std::vector<RelatorSpec>& parts, std::string (*f)(const RelatorSpec&)) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? ", " : "") + f(parts[i]);
  return out;
}

}  // namespace detail

inline RelatorSpec parse_relator(const std::string& text) { return detail::RelatorParser(text).parse(); }

inline std::string to_string(const RelatorSpec& r) {
  using K = RelatorSpec::Kind;
  switch (r.kind()) {
    case K::Barr: return "barr(" + to_string(r.functor()) + ")";
    case K::CoBarr: return "cobarr(" + to_string(r.functor()) + ")";
    case K::PowUpper: return "upper";
    case K::PowLower: return "lower";
    case K::SubmonoidExp: {
      const UCSubmonoid& s = r.submonoid();
      const auto gens = generators(s);
      std::string out = "submon(" + to_string(r.functor()) + "; ";
      if (gens.empty()) return out + "bot)";
      out += "gens: ";
      for (std::size_t i = 0; i < gens.size(); ++i) {
        out += i ? ", [" : "[";
        std::string body = endo::to_string(s.labels(), gens[i]);
        out += body.substr(1, body.size() - 2) + "]";
      }
      return out + ")";
    }
    case K::SumOf: return "sum(" + detail::join(r.parts(), &to_string) + ")";
    case K::ProdOf: return "prod(" + detail::join(r.parts(), &to_string) + ")";
    case K::CompOf: return "comp(" + detail::join(r.parts(), &to_string) + ")";
    case K::UpTo: return "upto-difun(" + detail::join(r.parts(), &to_string) + ")";
    case K::PointwiseSup: return "sup(" + detail::join(r.parts(), &to_string) + ")";
    case K::PointwiseInf: return "inf(" + detail::join(r.parts(), &to_string) + ")";
  }
  return "?";
}

}  // namespace relsim
