#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "relsim/finrel.hpp"
#include "relsim/relator.hpp"

namespace relsim {

/// A concrete failure of a law. `relations` and `functions` hold the inputs
/// (carriers are anonymous, sized as recorded) and `u`, `v` the offending pair in
/// the lifted carriers.
struct LawCertificate {
  std::string law;
  std::vector<FinRel> relations;
  std::vector<FinFun> functions;
  std::size_t u = 0, v = 0;
  std::string text;
};

struct LawResult {
  std::string law;
  bool holds = true;
  std::size_t cases = 0;
  std::size_t failures = 0;
  std::size_t empty_failures = 0;  // failures whose composite relation is empty
  std::optional<LawCertificate> certificate{};
  bool certificate_from_empty = false;

  bool only_empty_failures() const { return failures > 0 && failures == empty_failures; }
  explicit operator bool() const { return holds; }
};

namespace laws {

inline FinSet carrier(std::size_t n) { return FinSet::anonymous(n); }

/// Relation on n×m carriers from a bitmask, bit i*m + j.
inline FinRel rel_from_mask(std::size_t n, std::size_t m, std::uint64_t mask) {
  FinRel r(carrier(n), carrier(m));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if ((mask >> (i * m + j)) & 1U) r.set(i, j);
  return r;
}

inline std::uint64_t mask_of(const FinRel& r) {
  std::uint64_t mask = 0;
  const std::size_t m = r.cod().size();
  for (auto [i, j] : r.pairs()) mask |= std::uint64_t{1} << (i * m + j);
  return mask;
}

inline std::uint64_t relation_count(std::size_t n, std::size_t m) { return std::uint64_t{1} << (n * m); }

inline std::vector<FinFun> all_functions(std::size_t n, std::size_t m) {
  std::vector<FinFun> out;
  if (n > 0 && m == 0) return out;
  std::vector<std::size_t> t(n, 0);
  for (;;) {
    out.emplace_back(carrier(n), carrier(m), t);
    std::size_t i = 0;
    for (; i < n; ++i) {
      if (++t[i] < m) break;
      t[i] = 0;
    }
    if (i == n) break;
  }
  return out;
}

inline std::string describe(const FinRel& r) {
  std::ostringstream os;
  os << r.dom().size() << "x" << r.cod().size() << " {";
  bool first = true;
  for (auto [x, y] : r.pairs()) {
    os << (first ? "" : ",") << "(" << x << "," << y << ")";
    first = false;
  }
  os << "}";
  return os.str();
}

inline std::string describe(const FinFun& f) {
  std::ostringstream os;
  os << f.dom().size() << "->" << f.cod().size() << " [";
  for (std::size_t i = 0; i < f.table().size(); ++i) os << (i ? "," : "") << f.table()[i];
  os << "]";
  return os.str();
}

}  // namespace laws

/// Materialized lifts on anonymous carriers, cached by (|X|, |Y|, relation mask).
class LiftCache {
 public:
  LiftCache(RelatorSpec spec, Limits limits = {}) : spec_(std::move(spec)), limits_(limits) {}

  const FinRel& get(const FinRel& r) {
    const auto key = std::make_tuple(r.dom().size(), r.cod().size(), laws::mask_of(r));
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    FinRel base(laws::carrier(r.dom().size()), laws::carrier(r.cod().size()));
    for (auto [x, y] : r.pairs()) base.set(x, y);
    return cache_.emplace(key, lift(spec_, base, limits_)).first->second;
  }

  const FinSet& fobj(std::size_t n) {
    auto it = objs_.find(n);
    if (it == objs_.end()) it = objs_.emplace(n, apply_obj(spec_.functor(), laws::carrier(n), limits_)).first;
    return it->second;
  }

  const std::vector<std::size_t>& fmap(const FinFun& f) {
    const auto key = std::make_pair(f.cod().size(), f.table());
    auto it = maps_.find(key);
    if (it != maps_.end()) return it->second;
    return maps_.emplace(key, apply_map(spec_.functor(), FinFun(laws::carrier(f.dom().size()),
                                                                laws::carrier(f.cod().size()), f.table()),
                                        limits_)
                                  .table())
        .first->second;
  }

  const RelatorSpec& spec() const noexcept { return spec_; }
  const Limits& limits() const noexcept { return limits_; }

 private:
  RelatorSpec spec_;
  Limits limits_;
  std::map<std::tuple<std::size_t, std::size_t, std::uint64_t>, FinRel> cache_;
  std::map<std::size_t, FinSet> objs_;
  std::map<std::pair<std::size_t, std::vector<std::size_t>>, std::vector<std::size_t>> maps_;
};

namespace laws {

inline void fail(LawResult& res, bool empty_composite, LawCertificate cert) {
  res.holds = false;
  ++res.failures;
  if (empty_composite) ++res.empty_failures;
  // Keep the first certificate, unless a non-empty composite turns up after empty ones.
  if (!res.certificate || (res.certificate_from_empty && !empty_composite)) {
    res.certificate = std::move(cert);
    res.certificate_from_empty = empty_composite;
  }
}

// First (u, v) with a(u,v) and not b(u,v).
inline std::optional<std::pair<std::size_t, std::size_t>> excess(const FinRel& a, const FinRel& b) {
  for (std::size_t u = 0; u < a.dom().size(); ++u) {
    if (a.row(u).subset_of(b.row(u))) continue;
    std::optional<std::pair<std::size_t, std::size_t>> out;
    a.row(u).for_each([&](std::size_t v) {
      if (!out && !b.holds(u, v)) out.emplace(u, v);
    });
    return out;
  }
  return std::nullopt;
}

}  // namespace laws

/// R 1_X = 1_{F X} for |X| ≤ max_size.
inline LawResult is_normal(LiftCache& c, std::size_t max_size) {
  LawResult res{.law = "normal"};
  for (std::size_t n = 0; n <= max_size; ++n) {
    ++res.cases;
    const FinRel id = FinRel::identity(laws::carrier(n));
    const FinRel& l = c.get(id);
    const FinRel fid = FinRel::identity(l.dom());
    if (l == fid) continue;
    auto bad = laws::excess(l, fid);
    if (!bad) bad = laws::excess(fid, l);
    laws::fail(res, false,
               {"normal", {id}, {}, bad->first, bad->second,
                "R 1_" + std::to_string(n) + " differs from the identity at (" + std::to_string(bad->first) + "," +
                    std::to_string(bad->second) + ")"});
    return res;
  }
  return res;
}

/// Relax conditions F f ≤ R f and (F f)° ≤ R(f°), and R s · R r ≤ R(s·r).
inline LawResult is_lax_extension(LiftCache& c, std::size_t max_size) {
  LawResult res{.law = "lax_extension"};
  for (std::size_t n = 0; n <= max_size; ++n)
    for (std::size_t m = 0; m <= max_size; ++m)
      for (const FinFun& f : laws::all_functions(n, m)) {
        res.cases += 2;
        const auto& ff = c.fmap(f);
        const FinRel g = FinRel::graph(f);
        const FinRel& lg = c.get(g);
        for (std::size_t u = 0; u < ff.size(); ++u)
          if (!lg.holds(u, ff[u])) {
            laws::fail(res, false, {"F f <= R f", {}, {f}, u, ff[u], "F f not below R f for f = " + laws::describe(f)});
            return res;
          }
        const FinRel& lgc = c.get(converse(g));
        for (std::size_t u = 0; u < ff.size(); ++u)
          if (!lgc.holds(ff[u], u)) {
            laws::fail(res, false,
                       {"(F f)° <= R(f°)", {}, {f}, ff[u], u, "(F f)° not below R(f°) for f = " + laws::describe(f)});
            return res;
          }
      }
  for (std::size_t nx = 0; nx <= max_size; ++nx)
    for (std::size_t ny = 0; ny <= max_size; ++ny)
      for (std::size_t nz = 0; nz <= max_size; ++nz)
        for (std::uint64_t rm = 0; rm < laws::relation_count(nx, ny); ++rm) {
          const FinRel r = laws::rel_from_mask(nx, ny, rm);
          const FinRel& lr = c.get(r);
          for (std::uint64_t sm = 0; sm < laws::relation_count(ny, nz); ++sm) {
            ++res.cases;
            const FinRel s = laws::rel_from_mask(ny, nz, sm);
            const FinRel sr = compose(r, s);
            const FinRel lhs = compose(lr, c.get(s));
            const FinRel& rhs = c.get(sr);
            if (auto bad = laws::excess(lhs, rhs)) {
              laws::fail(res, sr.empty_relation(),
                         {"R s . R r <= R(s.r)", {r, s}, {}, bad->first, bad->second,
                          "r = " + laws::describe(r) + ", s = " + laws::describe(s) + ": (" +
                              std::to_string(bad->first) + "," + std::to_string(bad->second) +
                              ") in R s . R r but not in R(s.r)"});
            }
          }
        }
  return res;
}

/// Monotonicity: adding one pair never removes a lifted pair.
inline LawResult is_monotone(LiftCache& c, std::size_t max_size) {
  LawResult res{.law = "monotone"};
  for (std::size_t nx = 0; nx <= max_size; ++nx)
    for (std::size_t ny = 0; ny <= max_size; ++ny)
      for (std::uint64_t rm = 0; rm < laws::relation_count(nx, ny); ++rm)
        for (std::size_t b = 0; b < nx * ny; ++b) {
          if ((rm >> b) & 1U) continue;
          ++res.cases;
          const FinRel r = laws::rel_from_mask(nx, ny, rm);
          const FinRel r2 = laws::rel_from_mask(nx, ny, rm | (std::uint64_t{1} << b));
          if (auto bad = laws::excess(c.get(r), c.get(r2))) {
            laws::fail(res, false, {"monotone", {r, r2}, {}, bad->first, bad->second,
                                    "lift of " + laws::describe(r) + " not below lift of " + laws::describe(r2)});
            return res;
          }
        }
  return res;
}

/// Naturality R(g°·r·f) = (F g)°·R r·F f and unit 1 ≤ R 1.
inline LawResult is_relational_connector(LiftCache& c, std::size_t max_size) {
  LawResult res{.law = "relational_connector"};
  for (std::size_t n = 0; n <= max_size; ++n) {
    ++res.cases;
    const FinRel& l = c.get(FinRel::identity(laws::carrier(n)));
    for (std::size_t u = 0; u < l.dom().size(); ++u)
      if (!l.holds(u, u)) {
        laws::fail(res, false, {"1 <= R 1", {FinRel::identity(laws::carrier(n))}, {}, u, u,
                                "R 1_" + std::to_string(n) + " misses (" + std::to_string(u) + "," + std::to_string(u) + ")"});
        return res;
      }
  }
  for (std::size_t nx = 0; nx <= max_size; ++nx)
    for (std::size_t ny = 0; ny <= max_size; ++ny)
      for (std::uint64_t rm = 0; rm < laws::relation_count(nx, ny); ++rm) {
        const FinRel r = laws::rel_from_mask(nx, ny, rm);
        const FinRel& lr = c.get(r);
        for (std::size_t nx2 = 0; nx2 <= max_size; ++nx2)
          for (const FinFun& f : laws::all_functions(nx2, nx))
            for (std::size_t ny2 = 0; ny2 <= max_size; ++ny2)
              for (const FinFun& g : laws::all_functions(ny2, ny)) {
                ++res.cases;
                const FinRel comp = compose(compose(FinRel::graph(f), r), converse(FinRel::graph(g)));
                const FinRel& lhs = c.get(comp);
                const auto& ff = c.fmap(f);
                const auto& fg = c.fmap(g);
                for (std::size_t u = 0; u < ff.size(); ++u)
                  for (std::size_t v = 0; v < fg.size(); ++v)
                    if (lhs.holds(u, v) != lr.holds(ff[u], fg[v])) {
                      laws::fail(res, comp.empty_relation(),
                                 {"naturality", {r}, {f, g}, u, v,
                                  "r = " + laws::describe(r) + ", f = " + laws::describe(f) + ", g = " +
                                      laws::describe(g) + ": R(g°.r.f) and (Fg)°.R r.Ff differ at (" +
                                      std::to_string(u) + "," + std::to_string(v) + ")"});
                      return res;
                    }
              }
      }
  return res;
}

/// R(r°) = (R r)°.
inline LawResult preserves_converses(LiftCache& c, std::size_t max_size) {
  LawResult res{.law = "converse"};
  for (std::size_t nx = 0; nx <= max_size; ++nx)
    for (std::size_t ny = 0; ny <= max_size; ++ny)
      for (std::uint64_t rm = 0; rm < laws::relation_count(nx, ny); ++rm) {
        ++res.cases;
        const FinRel r = laws::rel_from_mask(nx, ny, rm);
        const FinRel lrc = converse(c.get(r));
        const FinRel rc = converse(r);
        const FinRel& lcr = c.get(rc);
        if (lrc == lcr) continue;
        auto bad = laws::excess(lrc, lcr);
        const bool lost = bad.has_value();
        if (!bad) bad = laws::excess(lcr, lrc);
        laws::fail(res, false,
                   {"converse", {r}, {}, bad->first, bad->second,
                    "r = " + laws::describe(r) + ": (" + std::to_string(bad->first) + "," +
                        std::to_string(bad->second) + ") " +
                        (lost ? "in (R r)° but not in R(r°)" : "in R(r°) but not in (R r)°")});
        return res;
      }
  return res;
}

/// R(g°·f) = (F g)°·F f for all cospans f : X -> A, g : Y -> A.
inline LawResult difunctional_functoriality_check(LiftCache& c, std::size_t max_size) {
  LawResult res{.law = "difunctional_functoriality"};
  for (std::size_t na = 0; na <= max_size; ++na)
    for (std::size_t nx = 0; nx <= max_size; ++nx)
      for (const FinFun& f : laws::all_functions(nx, na))
        for (std::size_t ny = 0; ny <= max_size; ++ny)
          for (const FinFun& g : laws::all_functions(ny, na)) {
            ++res.cases;
            const FinRel d = compose(FinRel::graph(f), converse(FinRel::graph(g)));
            const FinRel& l = c.get(d);
            const auto& ff = c.fmap(f);
            const auto& fg = c.fmap(g);
            for (std::size_t u = 0; u < ff.size(); ++u)
              for (std::size_t v = 0; v < fg.size(); ++v)
                if (l.holds(u, v) != (ff[u] == fg[v])) {
                  laws::fail(res, d.empty_relation(),
                             {"difunctional_functoriality", {d}, {f, g}, u, v,
                              "f = " + laws::describe(f) + ", g = " + laws::describe(g) + ": differ at (" +
                                  std::to_string(u) + "," + std::to_string(v) + ")"});
                  return res;
                }
          }
  return res;
}

/// Pointwise r ↦ lower(r) ≤ upper(r) on all relations up to max_size.
inline LawResult check_below(LiftCache& lower, LiftCache& upper, std::size_t max_size, const std::string& name) {
  LawResult res{name};
  for (std::size_t nx = 0; nx <= max_size; ++nx)
    for (std::size_t ny = 0; ny <= max_size; ++ny)
      for (std::uint64_t rm = 0; rm < laws::relation_count(nx, ny); ++rm) {
        ++res.cases;
        const FinRel r = laws::rel_from_mask(nx, ny, rm);
        if (auto bad = laws::excess(lower.get(r), upper.get(r))) {
          laws::fail(res, false, {name, {r}, {}, bad->first, bad->second,
                                  "r = " + laws::describe(r) + ": (" + std::to_string(bad->first) + "," +
                                      std::to_string(bad->second) + ") violates the inclusion"});
          return res;
        }
      }
  return res;
}

/// Coincidence of the coBarr relator with Barr after difunctional closure.
inline LawResult cobarr_equals_barr_of_closure(const FunctorExpr& f, std::size_t max_size, const Limits& limits = {}) {
  if (!preservation_profile(f).weak_pullbacks)
    throw SpecError("coBarr/Barr comparison needs a functor that weakly preserves pullbacks");
  LiftCache cob(RelatorSpec::cobarr(f), limits);
  LiftCache bar(RelatorSpec::barr(f), limits);
  LawResult res{.law = "cobarr_equals_barr_of_closure"};
  for (std::size_t nx = 0; nx <= max_size; ++nx)
    for (std::size_t ny = 0; ny <= max_size; ++ny)
      for (std::uint64_t rm = 0; rm < laws::relation_count(nx, ny); ++rm) {
        ++res.cases;
        const FinRel r = laws::rel_from_mask(nx, ny, rm);
        const FinRel& a = cob.get(r);
        const FinRel& b = bar.get(difunctional_closure(r));
        if (a == b) continue;
        auto bad = laws::excess(a, b);
        if (!bad) bad = laws::excess(b, a);
        laws::fail(res, false, {"cobarr_equals_barr_of_closure", {r}, {}, bad->first, bad->second,
                                "r = " + laws::describe(r)});
        return res;
      }
  return res;
}

// Convenience overloads that build a fresh cache.
inline LawResult is_normal(const RelatorSpec& s, std::size_t max_size, const Limits& l = {}) {
  LiftCache c(s, l);
  return is_normal(c, max_size);
}
inline LawResult is_lax_extension(const RelatorSpec& s, std::size_t max_size, const Limits& l = {}) {
  LiftCache c(s, l);
  return is_lax_extension(c, max_size);
}
inline LawResult is_monotone(const RelatorSpec& s, std::size_t max_size, const Limits& l = {}) {
  LiftCache c(s, l);
  return is_monotone(c, max_size);
}
inline LawResult is_relational_connector(const RelatorSpec& s, std::size_t max_size, const Limits& l = {}) {
  LiftCache c(s, l);
  return is_relational_connector(c, max_size);
}
inline LawResult preserves_converses(const RelatorSpec& s, std::size_t max_size, const Limits& l = {}) {
  LiftCache c(s, l);
  return preserves_converses(c, max_size);
}
inline LawResult difunctional_functoriality_check(const RelatorSpec& s, std::size_t max_size, const Limits& l = {}) {
  LiftCache c(s, l);
  return difunctional_functoriality_check(c, max_size);
}

/// Barr ≤ R ≤ coBarr on all relations up to max_size.
inline LawResult check_sandwich(const RelatorSpec& s, std::size_t max_size, const Limits& l = {}) {
  LiftCache mid(s, l);
  LiftCache lo(RelatorSpec::barr(s.functor()), l);
  LiftCache hi(RelatorSpec::cobarr(s.functor()), l);
  LawResult a = check_below(lo, mid, max_size, "barr <= R");
  if (!a) return a;
  LawResult b = check_below(mid, hi, max_size, "R <= cobarr");
  b.cases += a.cases;
  b.law = "sandwich";
  return b;
}

}  // namespace relsim
