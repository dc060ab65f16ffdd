#pragma once

#include <cstddef>
#include <numeric>
#include <utility>
#include <vector>

#include "relsim/bitrow.hpp"
#include "relsim/errors.hpp"
#include "relsim/finset.hpp"

namespace relsim {

/// A relation r ⊆ X × Y stored as a dense boolean matrix with one bit row per x.
class FinRel {
 public:
  FinRel() = default;
  FinRel(FinSet dom, FinSet cod)
      : dom_(std::move(dom)), cod_(std::move(cod)), rows_(dom_.size(), BitRow(cod_.size())) {}

  FinRel(FinSet dom, FinSet cod, const std::vector<std::pair<std::size_t, std::size_t>>& pairs)
      : FinRel(std::move(dom), std::move(cod)) {
    for (auto [x, y] : pairs) {
      if (x >= dom_.size() || y >= cod_.size())
        throw SpecError("pair (" + std::to_string(x) + "," + std::to_string(y) +
                        ") outside the carriers");
      set(x, y);
    }
  }

  static FinRel empty(const FinSet& x, const FinSet& y) { return FinRel(x, y); }

  static FinRel full(const FinSet& x, const FinSet& y) {
    FinRel r(x, y);
    for (auto& row : r.rows_) row.fill();
    return r;
  }

  static FinRel identity(const FinSet& x) {
    FinRel r(x, x);
    for (std::size_t i = 0; i < x.size(); ++i) r.set(i, i);
    return r;
  }

  /// The graph {(x, f(x))} of a function.
  static FinRel graph(const FinFun& f) {
    FinRel r(f.dom(), f.cod());
    for (std::size_t i = 0; i < f.dom().size(); ++i) r.set(i, f(i));
    return r;
  }

  /// The subidentity on X picking the elements flagged in `mask`.
  static FinRel subidentity(const FinSet& x, const BitRow& mask) {
    FinRel r(x, x);
    mask.for_each([&](std::size_t i) { r.set(i, i); });
    return r;
  }

  const FinSet& dom() const noexcept { return dom_; }
  const FinSet& cod() const noexcept { return cod_; }

  bool holds(std::size_t x, std::size_t y) const { return rows_[x].test(y); }
  void set(std::size_t x, std::size_t y) { rows_[x].set(y); }
  void reset(std::size_t x, std::size_t y) { rows_[x].reset(y); }
  void assign(std::size_t x, std::size_t y, bool b) { rows_[x].assign(y, b); }

  const BitRow& row(std::size_t x) const { return rows_[x]; }
  BitRow& row(std::size_t x) { return rows_[x]; }

  std::size_t count() const {
    std::size_t c = 0;
    for (const auto& r : rows_) c += r.count();
    return c;
  }
  bool empty_relation() const {
    for (const auto& r : rows_)
      if (r.any()) return false;
    return true;
  }

  /// All related pairs in row-major (dom-then-cod) order.
  std::vector<std::pair<std::size_t, std::size_t>> pairs() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t x = 0; x < rows_.size(); ++x)
      rows_[x].for_each([&](std::size_t y) { out.emplace_back(x, y); });
    return out;
  }

  friend bool operator==(const FinRel& a, const FinRel& b) {
    return a.dom_ == b.dom_ && a.cod_ == b.cod_ && a.rows_ == b.rows_;
  }

 private:
  FinSet dom_;
  FinSet cod_;
  std::vector<BitRow> rows_;
};

/// s·r : X ⇸ Z, relating x to z iff x r y and y s z for some y.
inline FinRel compose(const FinRel& r, const FinRel& s) {
  require_compatible(r.cod(), s.dom(), "compose");
  FinRel out(r.dom(), s.cod());
  for (std::size_t x = 0; x < r.dom().size(); ++x) {
    BitRow& acc = out.row(x);
    r.row(x).for_each([&](std::size_t y) { acc |= s.row(y); });
  }
  return out;
}

inline FinRel converse(const FinRel& r) {
  FinRel out(r.cod(), r.dom());
  for (std::size_t x = 0; x < r.dom().size(); ++x)
    r.row(x).for_each([&](std::size_t y) { out.set(y, x); });
  return out;
}

inline FinRel unite(const FinRel& a, const FinRel& b) {
  require_compatible(a.dom(), b.dom(), "union");
  require_compatible(a.cod(), b.cod(), "union");
  FinRel out = a;
  for (std::size_t x = 0; x < a.dom().size(); ++x) out.row(x) |= b.row(x);
  return out;
}

inline FinRel intersect(const FinRel& a, const FinRel& b) {
  require_compatible(a.dom(), b.dom(), "intersection");
  require_compatible(a.cod(), b.cod(), "intersection");
  FinRel out = a;
  for (std::size_t x = 0; x < a.dom().size(); ++x) out.row(x) &= b.row(x);
  return out;
}

/// Inclusion a ≤ b.
inline bool leq(const FinRel& a, const FinRel& b) {
  require_compatible(a.dom(), b.dom(), "inclusion");
  require_compatible(a.cod(), b.cod(), "inclusion");
  for (std::size_t x = 0; x < a.dom().size(); ++x)
    if (!a.row(x).subset_of(b.row(x))) return false;
  return true;
}

/// dom r ⊆ X as a mask.
inline BitRow domain(const FinRel& r) {
  BitRow out(r.dom().size());
  for (std::size_t x = 0; x < r.dom().size(); ++x)
    if (r.row(x).any()) out.set(x);
  return out;
}

/// img r ⊆ Y as a mask.
inline BitRow image(const FinRel& r) {
  BitRow out(r.cod().size());
  for (std::size_t x = 0; x < r.dom().size(); ++x) out |= r.row(x);
  return out;
}

inline bool is_difunctional(const FinRel& r) {
  return leq(compose(compose(r, converse(r)), r), r);
}

/// Least difunctional relation above r: the stabilized union r ∪ r·(r°·r) ∪ ...
inline FinRel difunctional_closure(const FinRel& r) {
  FinRel acc = r;
  for (;;) {
    FinRel next = unite(acc, compose(compose(acc, converse(acc)), acc));
    if (next == acc) return acc;
    acc = std::move(next);
  }
}

struct Span {
  FinSet apex;
  FinFun left;   // apex -> X
  FinFun right;  // apex -> Y
};

struct Cospan {
  FinSet apex;
  FinFun left;   // X -> apex
  FinFun right;  // Y -> apex
};

/// The composite right·left° of a span.
inline FinRel span_relation(const Span& s) {
  return compose(converse(FinRel::graph(s.left)), FinRel::graph(s.right));
}

/// The composite right°·left of a cospan.
inline FinRel cospan_relation(const Cospan& c) {
  return compose(FinRel::graph(c.left), converse(FinRel::graph(c.right)));
}

/// Canonical tabulation: apex is the set of related pairs in row-major order.
inline Span tabulation(const FinRel& r) {
  const auto ps = r.pairs();
  std::vector<std::string> names;
  names.reserve(ps.size());
  std::vector<std::size_t> l, rr;
  for (auto [x, y] : ps) {
    names.push_back("(" + r.dom().name(x) + "," + r.cod().name(y) + ")");
    l.push_back(x);
    rr.push_back(y);
  }
  FinSet apex(std::move(names));
  return Span{apex, FinFun(apex, r.dom(), std::move(l)), FinFun(apex, r.cod(), std::move(rr))};
}

namespace detail {

struct UnionFind {
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  }
  // The smaller index becomes the root, so roots are least class members.
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent[b] = a;
  }
  std::vector<std::size_t> parent;
};

}  // namespace detail

/// Pushout of a span: (X+Y) modulo the equivalence generated by left(a) ~ right(a).
/// Classes are numbered in order of their least member.
inline Cospan pushout(const Span& s) {
  require_compatible(s.left.dom(), s.right.dom(), "pushout");
  const std::size_t nx = s.left.cod().size();
  const std::size_t ny = s.right.cod().size();
  detail::UnionFind uf(nx + ny);
  for (std::size_t a = 0; a < s.apex.size(); ++a) uf.unite(s.left(a), nx + s.right(a));
  std::vector<std::size_t> cls(nx + ny, 0), root_id(nx + ny, SIZE_MAX);
  std::vector<std::string> names;
  const FinSet both = disjoint_union(s.left.cod(), s.right.cod());
  for (std::size_t i = 0; i < nx + ny; ++i) {
    const std::size_t root = uf.find(i);
    if (root_id[root] == SIZE_MAX) {
      root_id[root] = names.size();
      names.push_back("[" + both.name(i) + "]");
    }
    cls[i] = root_id[root];
  }
  FinSet apex(std::move(names));
  std::vector<std::size_t> l(cls.begin(), cls.begin() + static_cast<std::ptrdiff_t>(nx));
  std::vector<std::size_t> r(cls.begin() + static_cast<std::ptrdiff_t>(nx), cls.end());
  return Cospan{apex, FinFun(s.left.cod(), apex, std::move(l)),
                FinFun(s.right.cod(), apex, std::move(r))};
}

/// Pullback of a cospan: {(x, y) | left(x) = right(y)} with its projections.
inline Span pullback(const Cospan& c) {
  require_compatible(c.left.cod(), c.right.cod(), "pullback");
  std::vector<std::string> names;
  std::vector<std::size_t> l, r;
  const FinSet& x = c.left.dom();
  const FinSet& y = c.right.dom();
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j)
      if (c.left(i) == c.right(j)) {
        names.push_back("(" + x.name(i) + "," + y.name(j) + ")");
        l.push_back(i);
        r.push_back(j);
      }
  FinSet apex(std::move(names));
  return Span{apex, FinFun(apex, x, std::move(l)), FinFun(apex, y, std::move(r))};
}

/// Whether the commuting square (s over c) is a weak pullback, i.e. every pair
/// (x, y) with left(x) = right(y) is the image of some apex element of s.
inline bool is_weak_pullback(const Cospan& c, const Span& s) {
  require_compatible(s.left.cod(), c.left.dom(), "weak pullback (left leg)");
  require_compatible(s.right.cod(), c.right.dom(), "weak pullback (right leg)");
  for (std::size_t a = 0; a < s.apex.size(); ++a)
    if (c.left(s.left(a)) != c.right(s.right(a)))
      throw SpecError("square does not commute at apex element " + s.apex.name(a));
  FinRel hit(c.left.dom(), c.right.dom());
  for (std::size_t a = 0; a < s.apex.size(); ++a) hit.set(s.left(a), s.right(a));
  for (std::size_t i = 0; i < c.left.dom().size(); ++i)
    for (std::size_t j = 0; j < c.right.dom().size(); ++j)
      if (c.left(i) == c.right(j) && !hit.holds(i, j)) return false;
  return true;
}

struct ImageFactorization {
  FinFun epi;   // X ->> f[X]
  FinFun mono;  // f[X] >-> Y
};

/// Factor f through its image; the image keeps the codomain's order and names.
inline ImageFactorization image_factorization(const FinFun& f) {
  std::vector<bool> hit(f.cod().size(), false);
  for (auto v : f.table()) hit[v] = true;
  std::vector<std::size_t> pos(f.cod().size(), SIZE_MAX), incl;
  std::vector<std::string> names;
  for (std::size_t y = 0; y < hit.size(); ++y)
    if (hit[y]) {
      pos[y] = incl.size();
      incl.push_back(y);
      names.push_back(f.cod().name(y));
    }
  FinSet img(std::move(names));
  std::vector<std::size_t> e(f.dom().size());
  for (std::size_t x = 0; x < e.size(); ++x) e[x] = pos[f(x)];
  return ImageFactorization{FinFun(f.dom(), img, std::move(e)), FinFun(img, f.cod(), std::move(incl))};
}

}  // namespace relsim
