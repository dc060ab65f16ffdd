#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "relsim/errors.hpp"
#include "relsim/finrel.hpp"
#include "relsim/functor.hpp"
#include "relsim/functor_props.hpp"
#include "relsim/submonoid.hpp"

namespace relsim {

/// A description of a relator. The functor is derived from the construction.
class RelatorSpec {
 public:
  enum class Kind {
    Barr,
    CoBarr,
    SubmonoidExp,
    SumOf,
    ProdOf,
    CompOf,
    UpTo,          // R applied after the difunctional closure
    PointwiseSup,
    PointwiseInf,
    PowUpper,      // A ⊑ B iff every a ∈ A has a partner in B
    PowLower,      // A ⊑ B iff every b ∈ B has a partner in A
  };

  static RelatorSpec barr(FunctorExpr f) { return RelatorSpec(Kind::Barr, std::move(f)); }

  static RelatorSpec cobarr(FunctorExpr f) {
    if (!preservation_profile(f).quarter_iso_pullbacks)
      throw SpecError("coBarr relator needs a functor preserving 1/4-iso pullbacks");
    return RelatorSpec(Kind::CoBarr, std::move(f));
  }

  static RelatorSpec submonoid_exp(UCSubmonoid s) {
    RelatorSpec r(Kind::SubmonoidExp, FunctorExpr::exp(s.labels()));
    r.submonoid_ = std::move(s);
    return r;
  }

  static RelatorSpec sum_of(std::vector<RelatorSpec> parts) {
    std::vector<FunctorExpr> fs;
    for (const auto& p : parts) fs.push_back(p.functor());
    RelatorSpec r(Kind::SumOf, FunctorExpr::sum(std::move(fs)));
    r.parts_ = std::move(parts);
    return r;
  }

  static RelatorSpec prod_of(std::vector<RelatorSpec> parts) {
    std::vector<FunctorExpr> fs;
    for (const auto& p : parts) fs.push_back(p.functor());
    RelatorSpec r(Kind::ProdOf, FunctorExpr::prod(std::move(fs)));
    r.parts_ = std::move(parts);
    return r;
  }

  /// Lift along `inner` first, then along `outer`.
  static RelatorSpec comp_of(RelatorSpec outer, RelatorSpec inner) {
    RelatorSpec r(Kind::CompOf, FunctorExpr::comp(outer.functor(), inner.functor()));
    r.parts_ = {std::move(outer), std::move(inner)};
    return r;
  }

  static RelatorSpec up_to_difunctional(RelatorSpec base) {
    RelatorSpec r(Kind::UpTo, base.functor());
    r.parts_ = {std::move(base)};
    return r;
  }

  static RelatorSpec sup(std::vector<RelatorSpec> parts) { return lattice_op(Kind::PointwiseSup, std::move(parts)); }
  static RelatorSpec inf(std::vector<RelatorSpec> parts) { return lattice_op(Kind::PointwiseInf, std::move(parts)); }

  static RelatorSpec pow_upper() { return RelatorSpec(Kind::PowUpper, FunctorExpr::pow()); }
  static RelatorSpec pow_lower() { return RelatorSpec(Kind::PowLower, FunctorExpr::pow()); }

  Kind kind() const noexcept { return kind_; }
  const FunctorExpr& functor() const noexcept { return functor_; }
  const UCSubmonoid& submonoid() const { return *submonoid_; }
  const std::vector<RelatorSpec>& parts() const noexcept { return parts_; }

 private:
  RelatorSpec(Kind k, FunctorExpr f) : kind_(k), functor_(std::move(f)) {}

  static RelatorSpec lattice_op(Kind k, std::vector<RelatorSpec> parts) {
    if (parts.empty()) throw SpecError("pointwise sup/inf needs at least one relator");
    for (const auto& p : parts)
      if (!(p.functor() == parts[0].functor()))
        throw SpecError("pointwise sup/inf of relators over different functors");
    RelatorSpec r(k, parts[0].functor());
    r.parts_ = std::move(parts);
    return r;
  }

  Kind kind_;
  FunctorExpr functor_;
  std::optional<UCSubmonoid> submonoid_;
  std::vector<RelatorSpec> parts_;
};

/// Whether u (R r) v depends only on r restricted to supp(u) × supp(v).
inline bool is_local(const RelatorSpec& spec) {
  using K = RelatorSpec::Kind;
  switch (spec.kind()) {
    case K::Barr: {
      // Structural Barr lifting only inspects pairs of support elements.
      std::vector<const FunctorExpr*> stack{&spec.functor()};
      while (!stack.empty()) {
        const FunctorExpr* f = stack.back();
        stack.pop_back();
        if (f->kind() == FunctorExpr::Kind::MonoidVal) return false;
        if (f->kind() == FunctorExpr::Kind::Comp && !preservation_profile(*f).weak_pullbacks) return false;
        for (const auto& p : f->parts()) stack.push_back(&p);
      }
      return true;
    }
    case K::SubmonoidExp:
    case K::PowUpper:
    case K::PowLower:
      return true;
    case K::CoBarr:
    case K::UpTo:
      return false;
    default:
      for (const auto& p : spec.parts())
        if (!is_local(p)) return false;
      return true;
  }
}

namespace lift_detail {

struct Node {
  virtual ~Node() = default;
  virtual bool relates(std::size_t u, std::size_t v) const = 0;
};
using NodePtr = std::shared_ptr<const Node>;

struct MatNode final : Node {
  explicit MatNode(FinRel m) : m(std::move(m)) {}
  bool relates(std::size_t u, std::size_t v) const override { return m.holds(u, v); }
  FinRel m;
};

struct EqNode final : Node {
  bool relates(std::size_t u, std::size_t v) const override { return u == v; }
};

enum class PowMode { EgliMilner, Upper, Lower };

struct PowNode final : Node {
  PowNode(NodePtr c, std::size_t nx, std::size_t ny, PowMode m) : child(std::move(c)), nx(nx), ny(ny), mode(m) {}
  bool relates(std::size_t u, std::size_t v) const override {
    if (mode != PowMode::Lower)
      for (std::size_t i = 0; i < nx; ++i) {
        if (!((u >> i) & 1U)) continue;
        bool found = false;
        for (std::size_t j = 0; j < ny && !found; ++j) found = ((v >> j) & 1U) && child->relates(i, j);
        if (!found) return false;
      }
    if (mode != PowMode::Upper)
      for (std::size_t j = 0; j < ny; ++j) {
        if (!((v >> j) & 1U)) continue;
        bool found = false;
        for (std::size_t i = 0; i < nx && !found; ++i) found = ((u >> i) & 1U) && child->relates(i, j);
        if (!found) return false;
      }
    return true;
  }
  NodePtr child;
  std::size_t nx, ny;
  PowMode mode;
};

struct ExpNode final : Node {
  ExpNode(NodePtr c, std::size_t nx, std::size_t ny, std::size_t k) : child(std::move(c)), nx(nx), ny(ny), k(k) {}
  bool relates(std::size_t u, std::size_t v) const override {
    for (std::size_t i = 0; i < k; ++i) {
      if (!child->relates(u % nx, v % ny)) return false;
      u /= nx;
      v /= ny;
    }
    return true;
  }
  NodePtr child;
  std::size_t nx, ny, k;
};

struct SumNode final : Node {
  SumNode(FunctorExpr f, std::size_t nx, std::size_t ny, std::vector<NodePtr> cs)
      : f(std::move(f)), nx(nx), ny(ny), children(std::move(cs)) {}
  bool relates(std::size_t u, std::size_t v) const override {
    auto [tu, lu] = sum_locate(f, nx, u);
    auto [tv, lv] = sum_locate(f, ny, v);
    return tu == tv && children[tu]->relates(lu, lv);
  }
  FunctorExpr f;
  std::size_t nx, ny;
  std::vector<NodePtr> children;
};

struct ProdNode final : Node {
  ProdNode(FunctorExpr f, std::size_t nx, std::size_t ny, std::vector<NodePtr> cs)
      : f(std::move(f)), nx(nx), ny(ny), children(std::move(cs)) {}
  bool relates(std::size_t u, std::size_t v) const override {
    const auto cu = prod_split(f, nx, u);
    const auto cv = prod_split(f, ny, v);
    for (std::size_t k = 0; k < cu.size(); ++k)
      if (!children[k]->relates(cu[k], cv[k])) return false;
    return true;
  }
  FunctorExpr f;
  std::size_t nx, ny;
  std::vector<NodePtr> children;
};

// u ~ v iff the k×k label matrix [r(u(a), v(b))] lies in the submonoid.
struct SubmonoidNode final : Node {
  SubmonoidNode(NodePtr c, std::size_t nx, std::size_t ny, UCSubmonoid s)
      : child(std::move(c)), nx(nx), ny(ny), sub(std::move(s)) {}
  bool relates(std::size_t u, std::size_t v) const override {
    const std::size_t k = sub.arity();
    const auto du = digits(u, nx, k);
    const auto dv = digits(v, ny, k);
    EndoMask m = 0;
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < k; ++b)
        if (child->relates(du[a], dv[b])) m |= EndoMask{1} << (a * k + b);
    return sub.contains(m);
  }
  NodePtr child;
  std::size_t nx, ny;
  UCSubmonoid sub;
};

struct CoBarrNode final : Node {
  CoBarrNode(FunctorExpr f, std::size_t nx, std::size_t ny, std::size_t no, std::vector<std::size_t> p1,
             std::vector<std::size_t> p2)
      : f(std::move(f)), nx(nx), ny(ny), no(no), p1(std::move(p1)), p2(std::move(p2)) {}
  bool relates(std::size_t u, std::size_t v) const override {
    auto m1 = [&](std::size_t i) { return p1[i]; };
    auto m2 = [&](std::size_t i) { return p2[i]; };
    return map_element(f, nx, no, m1, u) == map_element(f, ny, no, m2, v);
  }
  FunctorExpr f;
  std::size_t nx, ny, no;
  std::vector<std::size_t> p1, p2;
};

struct BoolNode final : Node {
  BoolNode(std::vector<NodePtr> cs, bool any) : children(std::move(cs)), any(any) {}
  bool relates(std::size_t u, std::size_t v) const override {
    for (const auto& c : children)
      if (c->relates(u, v) == any) return any;
    return !any;
  }
  std::vector<NodePtr> children;
  bool any;
};

inline void check_matrix(std::size_t rows, std::size_t cols, const Limits& limits) {
  if (rows != 0 && cols > limits.max_matrix_bits / rows)
    throw ResourceError("lifted relation exceeds the matrix bound", detail::sat_mul(rows, cols));
}

inline FinRel materialize(const Node& n, const FinSet& fx, const FinSet& fy, const Limits& limits) {
  check_matrix(fx.size(), fy.size(), limits);
  FinRel out(fx, fy);
  for (std::size_t u = 0; u < fx.size(); ++u)
    for (std::size_t v = 0; v < fy.size(); ++v)
      if (n.relates(u, v)) out.set(u, v);
  return out;
}

/// F̄r = Fπ₂·(Fπ₁)° for an arbitrary span with composite r.
inline FinRel barr_via_span(const FunctorExpr& f, const Span& s, const Limits& limits) {
  const FinSet fx = apply_obj(f, s.left.cod(), limits);
  const FinSet fy = apply_obj(f, s.right.cod(), limits);
  const std::size_t fa = checked_card(f, s.apex.size(), limits);
  check_matrix(fx.size(), fy.size(), limits);
  FinRel out(fx, fy);
  const auto& l = s.left.table();
  const auto& r = s.right.table();
  auto lf = [&](std::size_t i) { return l[i]; };
  auto rf = [&](std::size_t i) { return r[i]; };
  const std::size_t na = s.apex.size(), nx = s.left.cod().size(), ny = s.right.cod().size();
  for (std::size_t w = 0; w < fa; ++w) out.set(map_element(f, na, nx, lf, w), map_element(f, na, ny, rf, w));
  return out;
}

inline NodePtr base_node(std::shared_ptr<const FinRel> r) {
  struct RelNode final : Node {
    explicit RelNode(std::shared_ptr<const FinRel> r) : r(std::move(r)) {}
    bool relates(std::size_t u, std::size_t v) const override { return r->holds(u, v); }
    std::shared_ptr<const FinRel> r;
  };
  return std::make_shared<RelNode>(std::move(r));
}

inline NodePtr build_barr(const FunctorExpr& f, const std::shared_ptr<const FinRel>& r, const Limits& limits) {
  using K = FunctorExpr::Kind;
  const std::size_t nx = r->dom().size(), ny = r->cod().size();
  switch (f.kind()) {
    case K::Const: return std::make_shared<EqNode>();
    case K::Id: return base_node(r);
    case K::Pow:
      checked_card(f, nx, limits);
      checked_card(f, ny, limits);
      return std::make_shared<PowNode>(base_node(r), nx, ny, PowMode::EgliMilner);
    case K::Exp:
      checked_card(f, nx, limits);
      checked_card(f, ny, limits);
      return std::make_shared<ExpNode>(base_node(r), nx, ny, f.set().size());
    case K::Sum:
    case K::Prod: {
      std::vector<NodePtr> cs;
      for (const auto& p : f.parts()) cs.push_back(build_barr(p, r, limits));
      checked_card(f, nx, limits);
      checked_card(f, ny, limits);
      if (f.kind() == K::Sum) return std::make_shared<SumNode>(f, nx, ny, std::move(cs));
      return std::make_shared<ProdNode>(f, nx, ny, std::move(cs));
    }
    case K::Comp:
      if (preservation_profile(f).weak_pullbacks) {
        const NodePtr in = build_barr(f.inner(), r, limits);
        auto m = std::make_shared<const FinRel>(materialize(*in, apply_obj(f.inner(), r->dom(), limits),
                                                            apply_obj(f.inner(), r->cod(), limits), limits));
        return build_barr(f.outer(), m, limits);
      }
      [[fallthrough]];
    case K::MonoidVal:
      return std::make_shared<MatNode>(barr_via_span(f, tabulation(*r), limits));
  }
  return nullptr;
}

inline NodePtr build(const RelatorSpec& spec, const std::shared_ptr<const FinRel>& r, const Limits& limits) {
  using K = RelatorSpec::Kind;
  const std::size_t nx = r->dom().size(), ny = r->cod().size();
  const FunctorExpr& f = spec.functor();
  switch (spec.kind()) {
    case K::Barr: return build_barr(f, r, limits);
    case K::CoBarr: {
      const Cospan c = pushout(tabulation(difunctional_closure(*r)));
      checked_card(f, nx, limits);
      checked_card(f, ny, limits);
      checked_card(f, c.apex.size(), limits);
      return std::make_shared<CoBarrNode>(f, nx, ny, c.apex.size(), c.left.table(), c.right.table());
    }
    case K::SubmonoidExp:
      checked_card(f, nx, limits);
      checked_card(f, ny, limits);
      return std::make_shared<SubmonoidNode>(base_node(r), nx, ny, spec.submonoid());
    case K::SumOf:
    case K::ProdOf: {
      std::vector<NodePtr> cs;
      for (const auto& p : spec.parts()) cs.push_back(build(p, r, limits));
      checked_card(f, nx, limits);
      checked_card(f, ny, limits);
      if (spec.kind() == K::SumOf) return std::make_shared<SumNode>(f, nx, ny, std::move(cs));
      return std::make_shared<ProdNode>(f, nx, ny, std::move(cs));
    }
    case K::CompOf: {
      const RelatorSpec& outer = spec.parts()[0];
      const RelatorSpec& inner = spec.parts()[1];
      const NodePtr in = build(inner, r, limits);
      auto m = std::make_shared<const FinRel>(materialize(*in, apply_obj(inner.functor(), r->dom(), limits),
                                                          apply_obj(inner.functor(), r->cod(), limits), limits));
      return build(outer, m, limits);
    }
    case K::UpTo:
      return build(spec.parts()[0], std::make_shared<const FinRel>(difunctional_closure(*r)), limits);
    case K::PointwiseSup:
    case K::PointwiseInf: {
      std::vector<NodePtr> cs;
      for (const auto& p : spec.parts()) cs.push_back(build(p, r, limits));
      return std::make_shared<BoolNode>(std::move(cs), spec.kind() == K::PointwiseSup);
    }
    case K::PowUpper:
    case K::PowLower:
      checked_card(f, nx, limits);
      checked_card(f, ny, limits);
      return std::make_shared<PowNode>(base_node(r), nx, ny,
                                       spec.kind() == K::PowUpper ? PowMode::Upper : PowMode::Lower);
  }
  return nullptr;
}

}  // namespace lift_detail

/// R r, evaluated on demand. Construction does only the work that cannot be deferred
/// (closures, pushouts, inner lifts of composites).
class Lifting {
 public:
  Lifting(const RelatorSpec& spec, const FinRel& r, const Limits& limits = {})
      : spec_(spec), limits_(limits), base_(std::make_shared<const FinRel>(r)),
        fx_(apply_obj(spec.functor(), r.dom(), limits)), fy_(apply_obj(spec.functor(), r.cod(), limits)),
        root_(lift_detail::build(spec, base_, limits)) {}

  bool relates(std::size_t u, std::size_t v) const { return root_->relates(u, v); }
  const FinSet& dom() const noexcept { return fx_; }
  const FinSet& cod() const noexcept { return fy_; }
  const FinRel& base() const noexcept { return *base_; }
  const RelatorSpec& spec() const noexcept { return spec_; }

  FinRel materialize() const { return lift_detail::materialize(*root_, fx_, fy_, limits_); }

 private:
  RelatorSpec spec_;
  Limits limits_;
  std::shared_ptr<const FinRel> base_;
  FinSet fx_, fy_;
  lift_detail::NodePtr root_;
};

inline FinRel lift(const RelatorSpec& spec, const FinRel& r, const Limits& limits = {}) {
  return Lifting(spec, r, limits).materialize();
}

/// Barr lifting through the canonical tabulation, without structural shortcuts.
inline FinRel lift_barr_generic(const FunctorExpr& f, const FinRel& r, const Limits& limits = {}) {
  return lift_detail::barr_via_span(f, tabulation(r), limits);
}

/// Barr lifting through a caller-chosen span.
inline FinRel lift_barr_via_span(const FunctorExpr& f, const Span& s, const Limits& limits = {}) {
  return lift_detail::barr_via_span(f, s, limits);
}

}  // namespace relsim
