#pragma once

#include <functional>
#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "relsim/errors.hpp"
#include "relsim/finrel.hpp"
#include "relsim/finset.hpp"
#include "relsim/monoid.hpp"

namespace relsim {

/// Runtime size bounds shared by every materializing operation.
struct Limits {
  std::size_t max_card = 1'000'000;           // largest F X that may be enumerated
  std::size_t max_matrix_bits = std::size_t{1} << 28;  // largest materialized relation
};

/// A term of the set-functor grammar.
///
/// Elements of F X are numbered canonically:
///   Const C   -> the elements of C
///   Id        -> the elements of X
///   Pow       -> subsets as bitmasks (element i is bit i)
///   Exp A     -> functions A -> X in base-|X| counter order, first label least significant
///   Sum       -> tagged union in list order (all of summand 0, then summand 1, ...)
///   Prod      -> tuples in row-major order (first factor most significant)
///   Comp G.H  -> G applied to the enumeration of H X
///   MVal M    -> maps X -> M in base-|M| counter order, first element least significant
class FunctorExpr {
 public:
  enum class Kind { Const, Id, Pow, Exp, Sum, Prod, Comp, MonoidVal };

  static FunctorExpr constant(FinSet c) { return FunctorExpr(Node{Kind::Const, std::move(c), {}, {}}); }
  static FunctorExpr id() { return FunctorExpr(Node{Kind::Id, {}, {}, {}}); }
  static FunctorExpr pow() { return FunctorExpr(Node{Kind::Pow, {}, {}, {}}); }
  static FunctorExpr exp(FinSet labels) { return FunctorExpr(Node{Kind::Exp, std::move(labels), {}, {}}); }

  static FunctorExpr sum(std::vector<FunctorExpr> parts) {
    if (parts.empty()) throw SpecError("a sum of functors needs at least one summand");
    return FunctorExpr(Node{Kind::Sum, {}, std::move(parts), {}});
  }
  static FunctorExpr prod(std::vector<FunctorExpr> parts) {
    if (parts.empty()) throw SpecError("a product of functors needs at least one factor");
    return FunctorExpr(Node{Kind::Prod, {}, std::move(parts), {}});
  }
  /// outer ∘ inner, i.e. X ↦ outer(inner X).
  static FunctorExpr comp(FunctorExpr outer, FunctorExpr inner) {
    return FunctorExpr(Node{Kind::Comp, {}, {std::move(outer), std::move(inner)}, {}});
  }
  static FunctorExpr monoid_valued(MonoidTable m) {
    return FunctorExpr(Node{Kind::MonoidVal, {}, {}, std::move(m)});
  }

  Kind kind() const noexcept { return node_->kind; }
  /// The constant set for Const, the label set for Exp.
  const FinSet& set() const noexcept { return node_->set; }
  const std::vector<FunctorExpr>& parts() const noexcept { return node_->parts; }
  const FunctorExpr& outer() const { return node_->parts.at(0); }
  const FunctorExpr& inner() const { return node_->parts.at(1); }
  const MonoidTable& monoid() const { return *node_->monoid; }

  friend bool operator==(const FunctorExpr& a, const FunctorExpr& b) {
    if (a.node_ == b.node_) return true;
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
      case Kind::Id:
      case Kind::Pow:
        return true;
      case Kind::Const:
      case Kind::Exp:
        return a.set() == b.set() && a.set().names() == b.set().names();
      case Kind::MonoidVal:
        return a.monoid() == b.monoid();
      default:
        return a.parts() == b.parts();
    }
  }

 private:
  struct Node {
    Kind kind;
    FinSet set;
    std::vector<FunctorExpr> parts;
    std::optional<MonoidTable> monoid;
  };
  explicit FunctorExpr(Node n) : node_(std::make_shared<const Node>(std::move(n))) {}

  std::shared_ptr<const Node> node_;
};

namespace detail {

inline constexpr std::size_t kSaturated = std::numeric_limits<std::size_t>::max() / 4;

inline std::size_t sat_add(std::size_t a, std::size_t b) {
  return (a >= kSaturated || b >= kSaturated || a + b >= kSaturated) ? kSaturated : a + b;
}
inline std::size_t sat_mul(std::size_t a, std::size_t b) {
  if (a == 0 || b == 0) return 0;
  if (a >= kSaturated || b >= kSaturated || a > kSaturated / b) return kSaturated;
  return a * b;
}
inline std::size_t sat_pow(std::size_t base, std::size_t exp) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    r = sat_mul(r, base);
    if (r == 0 || r >= kSaturated) return r;
  }
  return r;
}

}  // namespace detail

/// |F X| for |X| = n, saturating at an implementation-defined huge value.
inline std::size_t card(const FunctorExpr& f, std::size_t n) {
  using K = FunctorExpr::Kind;
  switch (f.kind()) {
    case K::Const: return f.set().size();
    case K::Id: return n;
    case K::Pow: return n >= 62 ? detail::kSaturated : (std::size_t{1} << n);
    case K::Exp: return detail::sat_pow(n, f.set().size());
    case K::Sum: {
      std::size_t s = 0;
      for (const auto& p : f.parts()) s = detail::sat_add(s, card(p, n));
      return s;
    }
    case K::Prod: {
      std::size_t s = 1;
      for (const auto& p : f.parts()) s = detail::sat_mul(s, card(p, n));
      return s;
    }
    case K::Comp: return card(f.outer(), card(f.inner(), n));
    case K::MonoidVal: return detail::sat_pow(f.monoid().size(), n);
  }
  return 0;
}

inline std::size_t checked_card(const FunctorExpr& f, std::size_t n, const Limits& limits) {
  const std::size_t c = card(f, n);
  if (c > limits.max_card) throw ResourceError("functor image exceeds the size bound", c);
  return c;
}

/// Materialize F X. Const and Id keep element names; every other carrier is anonymous.
inline FinSet apply_obj(const FunctorExpr& f, const FinSet& x, const Limits& limits = {}) {
  const std::size_t c = checked_card(f, x.size(), limits);
  if (f.kind() == FunctorExpr::Kind::Id) return x;
  if (f.kind() == FunctorExpr::Kind::Const) return f.set();
  return FinSet::anonymous(c);
}

/// Digit i of u written in base `base`.
inline std::vector<std::size_t> digits(std::size_t u, std::size_t base, std::size_t count) {
  std::vector<std::size_t> d(count);
  for (std::size_t i = 0; i < count; ++i) {
    d[i] = u % base;
    u /= base;
  }
  return d;
}

inline std::size_t from_digits(const std::vector<std::size_t>& d, std::size_t base) {
  std::size_t u = 0;
  for (std::size_t i = d.size(); i-- > 0;) u = u * base + d[i];
  return u;
}

/// Locate u ∈ (Σ F_k) X: returns (summand index, local index).
inline std::pair<std::size_t, std::size_t> sum_locate(const FunctorExpr& f, std::size_t n, std::size_t u) {
  for (std::size_t k = 0; k < f.parts().size(); ++k) {
    const std::size_t c = card(f.parts()[k], n);
    if (u < c) return {k, u};
    u -= c;
  }
  throw SpecError("element index out of range for sum functor");
}

inline std::size_t sum_inject(const FunctorExpr& f, std::size_t n, std::size_t tag, std::size_t local) {
  std::size_t off = 0;
  for (std::size_t k = 0; k < tag; ++k) off += card(f.parts()[k], n);
  return off + local;
}

/// Split u ∈ (Π F_k) X into its components.
inline std::vector<std::size_t> prod_split(const FunctorExpr& f, std::size_t n, std::size_t u) {
  const auto& ps = f.parts();
  std::vector<std::size_t> out(ps.size());
  for (std::size_t k = ps.size(); k-- > 0;) {
    const std::size_t c = card(ps[k], n);
    out[k] = u % c;
    u /= c;
  }
  return out;
}

inline std::size_t prod_join(const FunctorExpr& f, std::size_t n, const std::vector<std::size_t>& comps) {
  std::size_t u = 0;
  for (std::size_t k = 0; k < comps.size(); ++k) u = u * card(f.parts()[k], n) + comps[k];
  return u;
}

/// (F h)(u) for u ∈ F X, where h : X -> Y is given as a callable on indices and
/// |X| = n_from, |Y| = n_to. Requires card(F, n_from) and card(F, n_to) to be finite.
using IndexMap = std::function<std::size_t(std::size_t)>;

inline std::size_t map_element(const FunctorExpr& f, std::size_t n_from, std::size_t n_to, const IndexMap& h,
                               std::size_t u) {
  using K = FunctorExpr::Kind;
  switch (f.kind()) {
    case K::Const: return u;
    case K::Id: return h(u);
    case K::Pow: {
      std::size_t out = 0;
      for (std::size_t i = 0; i < n_from; ++i)
        if ((u >> i) & 1U) out |= std::size_t{1} << h(i);
      return out;
    }
    case K::Exp: {
      const std::size_t na = f.set().size();
      auto d = digits(u, n_from, na);
      for (auto& x : d) x = h(x);
      return from_digits(d, n_to);
    }
    case K::Sum: {
      auto [tag, local] = sum_locate(f, n_from, u);
      return sum_inject(f, n_to, tag, map_element(f.parts()[tag], n_from, n_to, h, local));
    }
    case K::Prod: {
      auto comps = prod_split(f, n_from, u);
      for (std::size_t k = 0; k < comps.size(); ++k)
        comps[k] = map_element(f.parts()[k], n_from, n_to, h, comps[k]);
      return prod_join(f, n_to, comps);
    }
    case K::Comp: {
      const FunctorExpr& in = f.inner();
      const IndexMap lifted = [&](std::size_t w) { return map_element(in, n_from, n_to, h, w); };
      return map_element(f.outer(), card(in, n_from), card(in, n_to), lifted, u);
    }
    case K::MonoidVal: {
      const MonoidTable& m = f.monoid();
      auto d = digits(u, m.size(), n_from);
      std::vector<std::size_t> out(n_to, m.unit());
      for (std::size_t x = 0; x < n_from; ++x) {
        const std::size_t y = h(x);
        out[y] = m.add(out[y], d[x]);
      }
      return from_digits(out, m.size());
    }
  }
  return u;
}

/// F f : F X -> F Y as a lookup table.
inline FinFun apply_map(const FunctorExpr& f, const FinFun& h, const Limits& limits = {}) {
  const FinSet fx = apply_obj(f, h.dom(), limits);
  const FinSet fy = apply_obj(f, h.cod(), limits);
  const auto& t = h.table();
  auto hf = [&](std::size_t x) { return t[x]; };
  std::vector<std::size_t> table(fx.size());
  for (std::size_t u = 0; u < fx.size(); ++u)
    table[u] = map_element(f, h.dom().size(), h.cod().size(), hf, u);
  return FinFun(fx, fy, std::move(table));
}

/// The states of X that occur in u ∈ F X, sorted and without duplicates.
inline std::vector<std::size_t> support(const FunctorExpr& f, std::size_t n, std::size_t u) {
  using K = FunctorExpr::Kind;
  std::vector<std::size_t> out;
  switch (f.kind()) {
    case K::Const: break;
    case K::Id: out.push_back(u); break;
    case K::Pow:
      for (std::size_t i = 0; i < n; ++i)
        if ((u >> i) & 1U) out.push_back(i);
      break;
    case K::Exp: out = digits(u, n, f.set().size()); break;
    case K::Sum: {
      auto [tag, local] = sum_locate(f, n, u);
      out = support(f.parts()[tag], n, local);
      break;
    }
    case K::Prod: {
      auto comps = prod_split(f, n, u);
      for (std::size_t k = 0; k < comps.size(); ++k) {
        auto s = support(f.parts()[k], n, comps[k]);
        out.insert(out.end(), s.begin(), s.end());
      }
      break;
    }
    case K::Comp: {
      for (auto w : support(f.outer(), card(f.inner(), n), u)) {
        auto s = support(f.inner(), n, w);
        out.insert(out.end(), s.begin(), s.end());
      }
      break;
    }
    case K::MonoidVal: {
      auto d = digits(u, f.monoid().size(), n);
      for (std::size_t x = 0; x < n; ++x)
        if (d[x] != f.monoid().unit()) out.push_back(x);
      break;
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace relsim
