#pragma once

// Brute-force reference implementations used only by the tests. They work on
// plain boolean matrices and explicit enumerations and share no algorithmic
// code with the library beyond functor action on single elements.

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <vector>

#include "relsim/relsim.hpp"

namespace oracle {

using Mat = std::vector<std::vector<bool>>;

inline Mat mat(const relsim::FinRel& r) {
  Mat m(r.dom().size(), std::vector<bool>(r.cod().size(), false));
  for (std::size_t x = 0; x < m.size(); ++x)
    for (std::size_t y = 0; y < r.cod().size(); ++y) m[x][y] = r.holds(x, y);
  return m;
}

inline relsim::FinRel rel(const Mat& m, const relsim::FinSet& x, const relsim::FinSet& y) {
  relsim::FinRel r(x, y);
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m[i].size(); ++j)
      if (m[i][j]) r.set(i, j);
  return r;
}

/// (r ; s)(x, z) iff some y has r(x, y) and s(y, z).
inline Mat compose(const Mat& r, const Mat& s, std::size_t nz) {
  Mat out(r.size(), std::vector<bool>(nz, false));
  for (std::size_t x = 0; x < r.size(); ++x)
    for (std::size_t y = 0; y < r[x].size(); ++y)
      if (r[x][y])
        for (std::size_t z = 0; z < nz; ++z)
          if (s[y][z]) out[x][z] = true;
  return out;
}

/// Least fixpoint of r ∪ r·r°·r, by repeated scanning for zig-zag paths.
inline Mat difunctional_closure(Mat r) {
  const std::size_t nx = r.size(), ny = nx ? r[0].size() : 0;
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t x = 0; x < nx; ++x)
      for (std::size_t y = 0; y < ny; ++y)
        for (std::size_t x2 = 0; x2 < nx; ++x2)
          for (std::size_t y2 = 0; y2 < ny; ++y2)
            if (r[x][y] && r[x2][y] && r[x2][y2] && !r[x][y2]) {
              r[x][y2] = true;
              changed = true;
            }
  }
  return r;
}

/// Egli-Milner: every element of A has a partner in B and vice versa.
inline bool egli_milner(const relsim::FinRel& r, std::size_t a, std::size_t b) {
  const std::size_t nx = r.dom().size(), ny = r.cod().size();
  for (std::size_t x = 0; x < nx; ++x) {
    if (!((a >> x) & 1U)) continue;
    bool found = false;
    for (std::size_t y = 0; y < ny; ++y) found = found || (((b >> y) & 1U) && r.holds(x, y));
    if (!found) return false;
  }
  for (std::size_t y = 0; y < ny; ++y) {
    if (!((b >> y) & 1U)) continue;
    bool found = false;
    for (std::size_t x = 0; x < nx; ++x) found = found || (((a >> x) & 1U) && r.holds(x, y));
    if (!found) return false;
  }
  return true;
}

/// Barr lifting by definition: u and v are related iff some w ∈ F(r) projects onto both.
inline bool barr_by_definition(const relsim::FunctorExpr& f, const relsim::FinRel& r, std::size_t u,
                               std::size_t v) {
  const auto ps = r.pairs();
  const std::size_t nr = ps.size(), nx = r.dom().size(), ny = r.cod().size();
  const std::size_t c = relsim::card(f, nr);
  for (std::size_t w = 0; w < c; ++w) {
    const std::size_t pu = relsim::map_element(f, nr, nx, [&](std::size_t i) { return ps[i].first; }, w);
    if (pu != u) continue;
    const std::size_t pv = relsim::map_element(f, nr, ny, [&](std::size_t i) { return ps[i].second; }, w);
    if (pv == v) return true;
  }
  return false;
}

/// Union of every relation passing the simulation check (exhaustive subset scan).
inline relsim::FinRel union_of_simulations(const relsim::RelatorSpec& spec, const relsim::Coalgebra& a,
                                           const relsim::Coalgebra& b) {
  const std::size_t bits = a.size() * b.size();
  relsim::FinRel out(a.states(), b.states());
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << bits); ++m) {
    relsim::FinRel r(a.states(), b.states());
    for (std::size_t k = 0; k < bits; ++k)
      if ((m >> k) & 1U) r.set(k / b.size(), k % b.size());
    if (relsim::is_simulation(spec, r, a, b)) out = relsim::unite(out, r);
  }
  return out;
}

/// Smallest simulation containing the seed, by subsets in order of size.
inline std::optional<std::size_t> minimal_simulation_size(const relsim::RelatorSpec& spec,
                                                          const relsim::Coalgebra& a, const relsim::Coalgebra& b,
                                                          std::pair<std::size_t, std::size_t> seed) {
  const std::size_t bits = a.size() * b.size();
  std::optional<std::size_t> best;
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << bits); ++m) {
    if (!((m >> (seed.first * b.size() + seed.second)) & 1U)) continue;
    const auto k = static_cast<std::size_t>(std::popcount(m));
    if (best && k >= *best) continue;
    relsim::FinRel r(a.states(), b.states());
    for (std::size_t i = 0; i < bits; ++i)
      if ((m >> i) & 1U) r.set(i / b.size(), i % b.size());
    if (relsim::is_simulation(spec, r, a, b)) best = k;
  }
  return best;
}

/// Behavioural equivalence as the union of all congruences on the coproduct:
/// a partition q is a congruence iff q(s) = q(t) implies (F q)(α s) = (F q)(α t).
inline relsim::FinRel behavioural_equivalence(const relsim::Coalgebra& a, const relsim::Coalgebra& b) {
  const std::size_t nx = a.size(), n = nx + b.size();
  const auto& f = a.functor();
  std::vector<std::size_t> t(n);
  for (std::size_t x = 0; x < nx; ++x)
    t[x] = relsim::map_element(f, nx, n, [](std::size_t i) { return i; }, a(x));
  for (std::size_t y = 0; y < b.size(); ++y)
    t[nx + y] = relsim::map_element(f, b.size(), n, [nx](std::size_t i) { return nx + i; }, b(y));
  relsim::FinRel out(a.states(), b.states());
  // Restricted growth strings enumerate set partitions.
  std::vector<std::size_t> q(n, 0);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t blocks) {
    if (i == n) {
      for (std::size_t s = 0; s < n; ++s)
        for (std::size_t u = s + 1; u < n; ++u)
          if (q[s] == q[u]) {
            auto fq = [&](std::size_t k) { return q[k]; };
            if (relsim::map_element(f, n, blocks, fq, t[s]) != relsim::map_element(f, n, blocks, fq, t[u])) return;
          }
      for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t y = 0; y < b.size(); ++y)
          if (q[x] == q[nx + y]) out.set(x, y);
      return;
    }
    for (std::size_t k = 0; k <= blocks; ++k) {
      q[i] = k;
      rec(i + 1, std::max(blocks, k + 1));
    }
  };
  if (n == 0) return out;
  q[0] = 0;
  rec(1, 1);
  return out;
}

/// Least upward-closed submonoid containing the seeds: close under all pairwise
/// composites and all one-pair enlargements until nothing changes.
inline std::set<relsim::EndoMask> submonoid_closure(std::size_t n, std::vector<relsim::EndoMask> seeds) {
  std::set<relsim::EndoMask> s(seeds.begin(), seeds.end());
  s.insert(relsim::endo::identity(n));
  for (bool changed = true; changed;) {
    changed = false;
    std::vector<relsim::EndoMask> cur(s.begin(), s.end());
    for (auto r : cur) {
      for (std::size_t k = 0; k < n * n; ++k) changed |= s.insert(r | (relsim::EndoMask{1} << k)).second;
      for (auto u : cur) {
        // Compose by definition on the n x n matrices.
        relsim::EndoMask c = 0;
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k)
              if (((r >> (i * n + j)) & 1U) && ((u >> (j * n + k)) & 1U)) c |= relsim::EndoMask{1} << (i * n + k);
        changed |= s.insert(c).second;
      }
    }
  }
  return s;
}

/// Normal: the difunctional closure contains the identity.
inline bool normal_endorelation(std::size_t n, relsim::EndoMask m) {
  Mat r(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) r[i][j] = (m >> (i * n + j)) & 1U;
  const Mat c = difunctional_closure(r);
  for (std::size_t i = 0; i < n; ++i)
    if (!c[i][i]) return false;
  return true;
}

}  // namespace oracle
