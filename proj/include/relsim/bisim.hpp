#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "relsim/coalgebra.hpp"
#include "relsim/finrel.hpp"
#include "relsim/relator.hpp"

namespace relsim {

struct SimulationCheck {
  bool holds = true;
  std::optional<std::pair<std::size_t, std::size_t>> failing;  // (x, y) with α x not related to β y
  explicit operator bool() const { return holds; }
};

namespace detail {

inline void require_functor(const RelatorSpec& spec, const Coalgebra& a, const Coalgebra& b) {
  if (!(spec.functor() == a.functor()) || !(spec.functor() == b.functor()))
    throw SpecError("relator and coalgebras are over different functors");
}

}  // namespace detail

/// r ≤ β°·(R r)·α, checked pair by pair.
inline SimulationCheck is_simulation(const RelatorSpec& spec, const FinRel& r, const Coalgebra& a,
                                     const Coalgebra& b, const Limits& limits = {}) {
  detail::require_functor(spec, a, b);
  require_compatible(r.dom(), a.states(), "simulation (source)");
  require_compatible(r.cod(), b.states(), "simulation (target)");
  const Lifting l(spec, r, limits);
  for (auto [x, y] : r.pairs())
    if (!l.relates(a(x), b(y))) return SimulationCheck{false, std::make_pair(x, y)};
  return {};
}

/// Greatest R-simulation, by removing every violating pair in each round.
inline FinRel similarity(const RelatorSpec& spec, const Coalgebra& a, const Coalgebra& b,
                         const Limits& limits = {}) {
  detail::require_functor(spec, a, b);
  FinRel r = FinRel::full(a.states(), b.states());
  for (;;) {
    const Lifting l(spec, r, limits);
    FinRel next(a.states(), b.states());
    for (auto [x, y] : r.pairs())
      if (l.relates(a(x), b(y))) next.set(x, y);
    if (next == r) return r;
    r = std::move(next);
  }
}

/// Kernel of the final sequence on the coproduct X + Y, restricted to X × Y.
/// Blocks are numbered by their least state.
inline FinRel behavioural_equivalence(const Coalgebra& a, const Coalgebra& b, const Limits& limits = {}) {
  if (!(a.functor() == b.functor())) throw SpecError("coalgebras over different functors");
  const FunctorExpr& f = a.functor();
  const std::size_t nx = a.size(), ny = b.size(), n = nx + ny;
  if (card(f, n) >= detail::kSaturated) throw ResourceError("coproduct is too large to index", card(f, n));
  (void)limits;
  std::vector<std::size_t> t(n);
  for (std::size_t x = 0; x < nx; ++x) t[x] = map_element(f, nx, n, [](std::size_t i) { return i; }, a(x));
  for (std::size_t y = 0; y < ny; ++y)
    t[nx + y] = map_element(f, ny, n, [nx](std::size_t i) { return nx + i; }, b(y));

  std::vector<std::size_t> q(n, 0);
  std::size_t blocks = n == 0 ? 0 : 1;
  for (;;) {
    std::unordered_map<std::size_t, std::size_t> ids;
    std::vector<std::size_t> next(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t key = map_element(f, n, blocks, [&](std::size_t s) { return q[s]; }, t[i]);
      next[i] = ids.emplace(key, ids.size()).first->second;
    }
    const std::size_t nb = ids.size();
    q = std::move(next);
    if (nb == blocks) break;
    blocks = nb;
  }
  FinRel out(a.states(), b.states());
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y)
      if (q[x] == q[nx + y]) out.set(x, y);
  return out;
}

struct WitnessOptions {
  std::size_t max_demand_pairs = 20;     // per-pair subset enumeration bound (local relators)
  std::size_t max_fallback_candidates = 22;  // subset enumeration bound (other relators)
};

namespace detail {

struct PairIndex {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // row-major
  std::unordered_map<std::size_t, std::size_t> index;       // x * ny + y -> position
  std::size_t ny = 0;

  std::optional<std::size_t> find(std::size_t x, std::size_t y) const {
    auto it = index.find(x * ny + y);
    if (it == index.end()) return std::nullopt;
    return it->second;
  }
};

struct BitsHash {
  std::size_t operator()(const BitRow& b) const noexcept {
    std::size_t h = b.size();
    for (auto w : b.words()) h = h * 1000003U ^ std::hash<std::uint64_t>{}(w);
    return h;
  }
};

inline FinRel relation_of(const PairIndex& idx, const BitRow& bits, const FinSet& x, const FinSet& y) {
  FinRel r(x, y);
  bits.for_each([&](std::size_t k) { r.set(idx.pairs[k].first, idx.pairs[k].second); });
  return r;
}

}  // namespace detail

/// A smallest R-simulation containing `seed`, or none when the seed is not similar.
/// Ties are broken by the order in which demands are explored (lexicographic).
inline std::optional<FinRel> minimal_witness(const RelatorSpec& spec, const Coalgebra& a, const Coalgebra& b,
                                             std::pair<std::size_t, std::size_t> seed, const Limits& limits = {},
                                             const WitnessOptions& opts = {}) {
  detail::require_functor(spec, a, b);
  if (seed.first >= a.size() || seed.second >= b.size()) throw SpecError("seed pair outside the carriers");
  const FinRel sim = similarity(spec, a, b, limits);
  if (!sim.holds(seed.first, seed.second)) return std::nullopt;
  const FunctorExpr& f = spec.functor();

  std::vector<std::vector<std::size_t>> sa(a.size()), sb(b.size());
  for (std::size_t x = 0; x < a.size(); ++x) sa[x] = support(f, a.size(), a(x));
  for (std::size_t y = 0; y < b.size(); ++y) sb[y] = support(f, b.size(), b(y));

  // Candidates: similar pairs reachable from the seed through successor supports.
  detail::PairIndex idx;
  idx.ny = b.size();
  {
    std::vector<bool> seen(a.size() * b.size(), false);
    std::vector<std::pair<std::size_t, std::size_t>> work{seed};
    seen[seed.first * b.size() + seed.second] = true;
    while (!work.empty()) {
      auto [x, y] = work.back();
      work.pop_back();
      for (auto x2 : sa[x])
        for (auto y2 : sb[y])
          if (sim.holds(x2, y2) && !seen[x2 * b.size() + y2]) {
            seen[x2 * b.size() + y2] = true;
            work.emplace_back(x2, y2);
          }
    }
    for (std::size_t x = 0; x < a.size(); ++x)
      for (std::size_t y = 0; y < b.size(); ++y)
        if (seen[x * b.size() + y]) {
          idx.index.emplace(x * b.size() + y, idx.pairs.size());
          idx.pairs.emplace_back(x, y);
        }
  }
  const std::size_t nc = idx.pairs.size();
  const std::size_t seed_pos = *idx.find(seed.first, seed.second);

  if (!is_local(spec)) {
    if (nc > opts.max_fallback_candidates)
      throw ResourceError("too many candidate pairs for a non-local relator", nc);
    // Subsets containing the seed, by increasing size, in lexicographic order.
    std::vector<std::size_t> others;
    for (std::size_t k = 0; k < nc; ++k)
      if (k != seed_pos) others.push_back(k);
    for (std::size_t extra = 0; extra <= others.size(); ++extra) {
      std::vector<std::size_t> pick(extra);
      for (std::size_t i = 0; i < extra; ++i) pick[i] = i;
      for (;;) {
        BitRow bits(nc);
        bits.set(seed_pos);
        for (auto p : pick) bits.set(others[p]);
        FinRel r = detail::relation_of(idx, bits, a.states(), b.states());
        if (is_simulation(spec, r, a, b, limits)) return r;
        std::size_t i = extra;
        while (i > 0 && pick[i - 1] == others.size() - extra + i - 1) --i;
        if (i == 0) break;
        ++pick[i - 1];
        for (std::size_t j = i; j < extra; ++j) pick[j] = pick[j - 1] + 1;
      }
    }
    return std::nullopt;
  }

  // Minimal demand sets per candidate pair.
  std::vector<std::vector<BitRow>> demands(nc);
  for (std::size_t k = 0; k < nc; ++k) {
    auto [x, y] = idx.pairs[k];
    std::vector<std::size_t> local;
    for (auto x2 : sa[x])
      for (auto y2 : sb[y])
        if (auto p = idx.find(x2, y2)) local.push_back(*p);
    std::sort(local.begin(), local.end());
    if (local.size() > opts.max_demand_pairs)
      throw ResourceError("successor pair set too large for demand enumeration", local.size());
    std::vector<std::uint64_t> found;
    for (std::size_t size = 0; size <= local.size(); ++size) {
      for (std::uint64_t m = 0; m < (std::uint64_t{1} << local.size()); ++m) {
        if (static_cast<std::size_t>(std::popcount(m)) != size) continue;
        bool superset = false;
        for (auto g : found) superset = superset || (g & m) == g;
        if (superset) continue;
        FinRel d(a.states(), b.states());
        for (std::size_t i = 0; i < local.size(); ++i)
          if ((m >> i) & 1U) d.set(idx.pairs[local[i]].first, idx.pairs[local[i]].second);
        if (Lifting(spec, d, limits).relates(a(x), b(y))) found.push_back(m);
      }
    }
    for (auto m : found) {
      BitRow bits(nc);
      for (std::size_t i = 0; i < local.size(); ++i)
        if ((m >> i) & 1U) bits.set(local[i]);
      demands[k].push_back(std::move(bits));
    }
  }

  auto satisfied = [&](std::size_t k, const BitRow& r) {
    for (const auto& d : demands[k])
      if (d.subset_of(r)) return true;
    return false;
  };

  for (std::size_t bound = 1; bound <= nc; ++bound) {
    std::unordered_set<BitRow, detail::BitsHash> dead;
    std::optional<BitRow> result;
    std::function<bool(const BitRow&)> dfs = [&](const BitRow& r) -> bool {
      if (dead.count(r)) return false;
      std::optional<std::size_t> open;
      r.for_each([&](std::size_t k) {
        if (!open && !satisfied(k, r)) open = k;
      });
      if (!open) {
        result = r;
        return true;
      }
      for (const auto& d : demands[*open]) {
        BitRow next = r;
        next |= d;
        if (next.count() > bound) continue;
        if (dfs(next)) return true;
      }
      dead.insert(r);
      return false;
    };
    BitRow start(nc);
    start.set(seed_pos);
    if (dfs(start)) return detail::relation_of(idx, *result, a.states(), b.states());
  }
  return std::nullopt;
}

}  // namespace relsim
