#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "relsim/bitrow.hpp"
#include "relsim/errors.hpp"
#include "relsim/finrel.hpp"
#include "relsim/finset.hpp"

namespace relsim {

/// Endorelations on a label set with at most four elements, packed into a mask:
/// bit i*n + j is set iff (i, j) is related.
using EndoMask = std::uint32_t;

inline constexpr std::size_t kMaxLabels = 4;

namespace endo {

inline std::size_t universe(std::size_t n) { return std::size_t{1} << (n * n); }

inline EndoMask identity(std::size_t n) {
  EndoMask m = 0;
  for (std::size_t i = 0; i < n; ++i) m |= EndoMask{1} << (i * n + i);
  return m;
}

inline bool holds(std::size_t n, EndoMask m, std::size_t i, std::size_t j) {
  return (m >> (i * n + j)) & 1U;
}

inline EndoMask row(std::size_t n, EndoMask m, std::size_t i) {
  return (m >> (i * n)) & ((EndoMask{1} << n) - 1);
}

/// s·r, first r then s.
inline EndoMask compose(std::size_t n, EndoMask r, EndoMask s) {
  EndoMask out = 0;
  for (std::size_t i = 0; i < n; ++i) {
    EndoMask acc = 0;
    const EndoMask ri = row(n, r, i);
    for (std::size_t j = 0; j < n; ++j)
      if ((ri >> j) & 1U) acc |= row(n, s, j);
    out |= acc << (i * n);
  }
  return out;
}

inline EndoMask converse(std::size_t n, EndoMask m) {
  EndoMask out = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (holds(n, m, i, j)) out |= EndoMask{1} << (j * n + i);
  return out;
}

inline EndoMask difunctional_closure(std::size_t n, EndoMask m) {
  for (;;) {
    const EndoMask next = m | compose(n, compose(n, m, converse(n, m)), m);
    if (next == m) return m;
    m = next;
  }
}

inline bool is_normal(std::size_t n, EndoMask m) {
  const EndoMask id = identity(n);
  return (difunctional_closure(n, m) & id) == id;
}

inline EndoMask from_rel(const FinRel& r) {
  if (r.dom().size() != r.cod().size()) throw CarrierMismatch("endorelation expected");
  const std::size_t n = r.dom().size();
  if (n > kMaxLabels) throw ResourceError("label sets are limited to four elements", n);
  EndoMask m = 0;
  for (auto [i, j] : r.pairs()) m |= EndoMask{1} << (i * n + j);
  return m;
}

inline FinRel to_rel(const FinSet& a, EndoMask m) {
  FinRel r(a, a);
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (holds(n, m, i, j)) r.set(i, j);
  return r;
}

inline std::string to_string(const FinSet& a, EndoMask m) {
  std::string out = "{";
  bool first = true;
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (holds(n, m, i, j)) {
        out += (first ? "(" : ",(") + a.name(i) + "," + a.name(j) + ")";
        first = false;
      }
  return out + "}";
}

}  // namespace endo

/// φ is normal iff its difunctional closure is reflexive.
inline bool is_normal_endorelation(const FinRel& phi) {
  require_compatible(phi.dom(), phi.cod(), "normal endorelation");
  const FinRel c = difunctional_closure(phi);
  for (std::size_t i = 0; i < phi.dom().size(); ++i)
    if (!c.holds(i, i)) return false;
  return true;
}

/// Cospan criterion: φ ≤ g°·f forces f = g, for all f, g : A -> X with |X| ≤ max_target.
inline bool normal_via_cospans(const FinRel& phi, std::size_t max_target) {
  require_compatible(phi.dom(), phi.cod(), "normal endorelation");
  const std::size_t n = phi.dom().size();
  if (n == 0) return true;
  const auto ps = phi.pairs();
  for (std::size_t nx = 1; nx <= max_target; ++nx) {
    std::vector<std::size_t> f(n, 0);
    do {
      std::vector<std::size_t> g(n, 0);
      do {
        bool below = true;
        for (auto [a, b] : ps) below = below && f[a] == g[b];
        if (below && f != g) return false;
        std::size_t i = 0;
        for (; i < n; ++i) {
          if (++g[i] < nx) break;
          g[i] = 0;
        }
        if (i == n) break;
      } while (true);
      std::size_t i = 0;
      for (; i < n; ++i) {
        if (++f[i] < nx) break;
        f[i] = 0;
      }
      if (i == n) break;
    } while (true);
  }
  return true;
}

inline bool normal_via_cospans(const FinRel& phi) { return normal_via_cospans(phi, 2 * phi.dom().size()); }

/// An upward-closed submonoid of Rel(A, A): contains 1_A, closed under composition
/// and under enlarging relations.
class UCSubmonoid {
 public:
  UCSubmonoid(FinSet labels, std::vector<bool> table)
      : labels_(std::move(labels)), members_(std::move(table)) {
    const std::size_t n = labels_.size();
    if (n > kMaxLabels) throw ResourceError("label sets are limited to four elements", n);
    if (members_.size() != endo::universe(n)) throw SpecError("member table has the wrong size");
    if (!members_[endo::identity(n)]) throw InvariantError("submonoid does not contain the identity");
    const auto ms = members();
    for (EndoMask m : ms)
      for (std::size_t b = 0; b < n * n; ++b)
        if (!members_[m | (EndoMask{1} << b)])
          throw InvariantError("submonoid is not upward closed at " + endo::to_string(labels_, m));
    // Upward closure holds, so composites of minimal members suffice.
    const auto mins = minimal_members();
    for (EndoMask r : mins)
      for (EndoMask s : mins)
        if (!members_[endo::compose(n, r, s)])
          throw InvariantError("submonoid is not closed under composition");
  }

  const FinSet& labels() const noexcept { return labels_; }
  std::size_t arity() const noexcept { return labels_.size(); }
  bool contains(EndoMask m) const { return members_.at(m); }
  bool contains(const FinRel& r) const { return contains(endo::from_rel(r)); }
  const std::vector<bool>& table() const noexcept { return members_; }

  std::vector<EndoMask> members() const {
    std::vector<EndoMask> out;
    for (std::size_t m = 0; m < members_.size(); ++m)
      if (members_[m]) out.push_back(static_cast<EndoMask>(m));
    return out;
  }
  std::size_t size() const { return static_cast<std::size_t>(std::count(members_.begin(), members_.end(), true)); }

  /// Inclusion-minimal members, in increasing mask order.
  std::vector<EndoMask> minimal_members() const {
    std::vector<EndoMask> out;
    const std::size_t n = arity();
    for (EndoMask m : members()) {
      bool minimal = true;
      for (std::size_t b = 0; b < n * n && minimal; ++b)
        if ((m >> b) & 1U) minimal = !members_[m & ~(EndoMask{1} << b)];
      if (minimal) out.push_back(m);
    }
    return out;
  }

  bool all_normal() const {
    for (EndoMask m : members())
      if (!endo::is_normal(arity(), m)) return false;
    return true;
  }

  bool subset_of(const UCSubmonoid& o) const {
    if (members_.size() != o.members_.size()) return false;
    for (std::size_t m = 0; m < members_.size(); ++m)
      if (members_[m] && !o.members_[m]) return false;
    return true;
  }

  friend bool operator==(const UCSubmonoid& a, const UCSubmonoid& b) {
    return a.labels_ == b.labels_ && a.members_ == b.members_;
  }

 private:
  FinSet labels_;
  std::vector<bool> members_;
};

namespace detail {

// Adds all composites of members to `in`, returning whether anything changed.
inline bool composition_close(std::size_t n, std::vector<bool>& in) {
  std::vector<EndoMask> list;
  for (std::size_t m = 0; m < in.size(); ++m)
    if (in[m]) list.push_back(static_cast<EndoMask>(m));
  bool changed = false;
  for (std::size_t k = 0; k < list.size(); ++k) {
    const EndoMask r = list[k];
    for (std::size_t i = 0; i <= k; ++i) {
      const EndoMask s = list[i];
      for (EndoMask c : {endo::compose(n, r, s), endo::compose(n, s, r)}) {
        if (!in[c]) {
          in[c] = true;
          list.push_back(c);
          changed = true;
        }
      }
    }
  }
  return changed;
}

inline bool upward_close(std::size_t n, std::vector<bool>& in) {
  bool changed = false;
  for (std::size_t m = 0; m < in.size(); ++m) {
    if (!in[m]) continue;
    for (std::size_t b = 0; b < n * n; ++b) {
      const std::size_t up = m | (std::size_t{1} << b);
      if (!in[up]) {
        in[up] = true;
        changed = true;
      }
    }
  }
  return changed;
}

inline bool is_upward_closed(std::size_t n, const std::vector<bool>& in) {
  for (std::size_t m = 0; m < in.size(); ++m)
    if (in[m])
      for (std::size_t b = 0; b < n * n; ++b)
        if (!in[m | (std::size_t{1} << b)]) return false;
  return true;
}

}  // namespace detail

namespace detail {

// Upward closure plus composites of minimal members, repeated to a fixpoint. Because
// composition is monotone, composites of minimal members generate all composites.
inline void close_fast(std::size_t n, std::vector<bool>& in) {
  for (;;) {
    upward_close(n, in);
    std::vector<EndoMask> mins;
    for (std::size_t m = 0; m < in.size(); ++m) {
      if (!in[m]) continue;
      bool minimal = true;
      for (std::size_t b = 0; b < n * n && minimal; ++b)
        if ((m >> b) & 1U) minimal = !in[m & ~(std::size_t{1} << b)];
      if (minimal) mins.push_back(static_cast<EndoMask>(m));
    }
    bool added = false;
    for (EndoMask r : mins)
      for (EndoMask s : mins) {
        const EndoMask c = endo::compose(n, r, s);
        if (!in[c]) {
          in[c] = true;
          added = true;
        }
      }
    if (!added) return;
  }
}

}  // namespace detail

struct GenerateResult {
  UCSubmonoid submonoid;
  bool composition_closure_was_upward_closed;  // after the first composition pass
};

/// Least upward-closed submonoid containing `seed`, by plain alternation of full
/// composition closure and upward closure. `upward_first` selects the order.
inline GenerateResult generate_observed(const FinSet& a, std::vector<bool> seed, bool upward_first = false) {
  const std::size_t n = a.size();
  seed[endo::identity(n)] = true;
  bool comp_only_upclosed = false;
  bool first_round = true;
  for (;;) {
    bool changed = false;
    if (upward_first) {
      changed |= detail::upward_close(n, seed);
      changed |= detail::composition_close(n, seed);
    } else {
      changed |= detail::composition_close(n, seed);
      if (first_round) comp_only_upclosed = detail::is_upward_closed(n, seed);
      changed |= detail::upward_close(n, seed);
    }
    first_round = false;
    if (!changed) break;
  }
  return GenerateResult{UCSubmonoid(a, std::move(seed)), comp_only_upclosed};
}

inline UCSubmonoid generate(const FinSet& a, const std::vector<EndoMask>& gens) {
  const std::size_t n = a.size();
  if (n > kMaxLabels) throw ResourceError("label sets are limited to four elements", n);
  std::vector<bool> seed(endo::universe(n), false);
  seed[endo::identity(n)] = true;
  for (EndoMask g : gens) {
    if (g >= seed.size()) throw SpecError("generator is not an endorelation on the label set");
    seed[g] = true;
  }
  detail::close_fast(n, seed);
  return UCSubmonoid(a, std::move(seed));
}

inline UCSubmonoid generate(const FinSet& a, const std::vector<FinRel>& gens) {
  std::vector<EndoMask> ms;
  for (const auto& g : gens) {
    require_compatible(g.dom(), a, "submonoid generator");
    require_compatible(g.cod(), a, "submonoid generator");
    ms.push_back(endo::from_rel(g));
  }
  return generate(a, ms);
}

/// The Barr submonoid: upward closure of {1_A}.
inline UCSubmonoid barr_submonoid(const FinSet& a) { return generate(a, std::vector<EndoMask>{}); }

struct JoinResult {
  UCSubmonoid submonoid;
  bool composition_closure_was_upward_closed;
};

inline JoinResult join_observed(const std::vector<UCSubmonoid>& parts) {
  if (parts.empty()) throw SpecError("join of an empty family needs a label set");
  std::vector<bool> seed(parts[0].table().size(), false);
  for (const auto& p : parts) {
    require_compatible(p.labels(), parts[0].labels(), "submonoid join");
    for (std::size_t m = 0; m < seed.size(); ++m) seed[m] = seed[m] || p.table()[m];
  }
  auto r = generate_observed(parts[0].labels(), std::move(seed));
  return JoinResult{std::move(r.submonoid), r.composition_closure_was_upward_closed};
}

inline UCSubmonoid join(const std::vector<UCSubmonoid>& parts) {
  if (parts.empty()) throw SpecError("join of an empty family needs a label set");
  const FinSet& a = parts[0].labels();
  std::vector<bool> seed(parts[0].table().size(), false);
  for (const auto& p : parts) {
    require_compatible(p.labels(), a, "submonoid join");
    for (std::size_t m = 0; m < seed.size(); ++m) seed[m] = seed[m] || p.table()[m];
  }
  detail::close_fast(a.size(), seed);
  return UCSubmonoid(a, std::move(seed));
}

/// A small generating set: members are added in (size, mask) order whenever they are not
/// yet generated, then redundant ones are dropped.
inline std::vector<EndoMask> generators(const UCSubmonoid& s) {
  const FinSet& a = s.labels();
  std::vector<EndoMask> cand = s.members();
  std::stable_sort(cand.begin(), cand.end(), [](EndoMask x, EndoMask y) {
    const int px = std::popcount(x), py = std::popcount(y);
    return px != py ? px < py : x < y;
  });
  std::vector<EndoMask> gens;
  UCSubmonoid cur = barr_submonoid(a);
  for (EndoMask m : cand) {
    if (cur.contains(m)) continue;
    gens.push_back(m);
    cur = generate(a, gens);
    if (cur == s) break;
  }
  for (std::size_t i = gens.size(); i-- > 0;) {
    std::vector<EndoMask> rest = gens;
    rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
    if (generate(a, rest) == s) gens = std::move(rest);
  }
  return gens;
}

/// Lattice of normal lax extensions of Exp(A), one node per all-normal submonoid.
struct NLELattice {
  FinSet labels;
  std::vector<UCSubmonoid> nodes;                            // increasing size, then members
  std::vector<std::pair<std::size_t, std::size_t>> hasse;   // (lower, upper) covering pairs
  bool lower_bound = false;                                  // generator-driven enumeration
};

namespace detail {

inline void finish_lattice(NLELattice& lat) {
  // Order: size, then members lexicographically (the reverse of table order).
  std::sort(lat.nodes.begin(), lat.nodes.end(), [](const UCSubmonoid& x, const UCSubmonoid& y) {
    const std::size_t sx = x.size(), sy = y.size();
    return sx != sy ? sx < sy : y.table() < x.table();
  });
  lat.nodes.erase(std::unique(lat.nodes.begin(), lat.nodes.end()), lat.nodes.end());
  const std::size_t k = lat.nodes.size();
  std::vector<BitRow> tables;
  for (const auto& s : lat.nodes) {
    BitRow b(s.table().size());
    for (std::size_t m = 0; m < s.table().size(); ++m)
      if (s.table()[m]) b.set(m);
    tables.push_back(std::move(b));
  }
  // below[i] : strict supersets of i; above[j] : strict subsets of j.
  std::vector<BitRow> below(k, BitRow(k)), above(k, BitRow(k));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j)
      if (tables[i].subset_of(tables[j])) below[i].set(j), above[j].set(i);
  lat.hasse.clear();
  for (std::size_t i = 0; i < k; ++i)
    below[i].for_each([&](std::size_t j) {
      if (!below[i].intersects(above[j])) lat.hasse.emplace_back(i, j);
    });
}

}  // namespace detail

/// Every upward-closed submonoid on A, normal or not. Exhaustive, |A| ≤ 2.
inline std::vector<UCSubmonoid> enumerate_uc_submonoids(const FinSet& a) {
  const std::size_t n = a.size();
  if (n > 2) throw ResourceError("exhaustive submonoid search is limited to two labels", n);
  const std::size_t u = endo::universe(n);
  const EndoMask id = endo::identity(n);
  std::vector<UCSubmonoid> out;
  for (std::size_t subset = 0; subset < (std::size_t{1} << u); ++subset) {
    if (!((subset >> id) & 1U)) continue;
    std::vector<bool> in(u);
    for (std::size_t m = 0; m < u; ++m) in[m] = (subset >> m) & 1U;
    if (!detail::is_upward_closed(n, in)) continue;
    bool closed = true;
    for (std::size_t r = 0; r < u && closed; ++r)
      for (std::size_t s = 0; s < u && closed; ++s)
        if (in[r] && in[s]) closed = in[endo::compose(n, static_cast<EndoMask>(r), static_cast<EndoMask>(s))];
    if (closed) out.emplace_back(a, std::move(in));
  }
  return out;
}

/// Join of every all-normal single-generator submonoid; verified all-normal.
inline UCSubmonoid greatest_nle(const FinSet& a, std::size_t max_labels = 3) {
  const std::size_t n = a.size();
  if (n > max_labels) throw ResourceError("greatest extension search is limited by max_labels", n);
  std::vector<UCSubmonoid> parts{barr_submonoid(a)};
  for (std::size_t m = 0; m < endo::universe(n); ++m) {
    const auto phi = static_cast<EndoMask>(m);
    if (!endo::is_normal(n, phi)) continue;
    UCSubmonoid s = generate(a, std::vector<EndoMask>{phi});
    if (s.all_normal()) parts.push_back(std::move(s));
  }
  UCSubmonoid top = join(parts);
  if (!top.all_normal())
    throw InvariantError("join of normal submonoids contains a non-normal relation");
  for (const auto& p : parts)
    if (!p.subset_of(top)) throw InvariantError("greatest extension misses a normal submonoid");
  return top;
}

/// Exhaustive for |A| ≤ 2. For |A| = 3 the nodes are the single-generator closures of
/// normal relations that stay all-normal together with their pairwise joins; the
/// result is flagged as a lower bound.
inline NLELattice enumerate_nle(const FinSet& a) {
  const std::size_t n = a.size();
  NLELattice lat{a, {}, {}, false};
  if (n <= 2) {
    for (auto& s : enumerate_uc_submonoids(a))
      if (s.all_normal()) lat.nodes.push_back(std::move(s));
  } else if (n == 3) {
    lat.lower_bound = true;
    lat.nodes.push_back(barr_submonoid(a));
    std::vector<UCSubmonoid> singles;
    for (std::size_t m = 0; m < endo::universe(n); ++m) {
      const auto phi = static_cast<EndoMask>(m);
      if (!endo::is_normal(n, phi)) continue;
      UCSubmonoid s = generate(a, std::vector<EndoMask>{phi});
      if (s.all_normal()) singles.push_back(std::move(s));
    }
    std::sort(singles.begin(), singles.end(), [](const UCSubmonoid& x, const UCSubmonoid& y) {
      return x.table() < y.table();
    });
    singles.erase(std::unique(singles.begin(), singles.end()), singles.end());
    for (std::size_t i = 0; i < singles.size(); ++i) {
      lat.nodes.push_back(singles[i]);
      for (std::size_t j = i + 1; j < singles.size(); ++j) {
        UCSubmonoid jn = join({singles[i], singles[j]});
        if (jn.all_normal()) lat.nodes.push_back(std::move(jn));
      }
    }
    lat.nodes.push_back(greatest_nle(a));
  } else {
    throw ResourceError("lattice enumeration is limited to three labels", n);
  }
  detail::finish_lattice(lat);
  return lat;
}

// Serialization.

inline nlohmann::json to_json(const UCSubmonoid& s, bool with_members = true) {
  nlohmann::json j;
  j["labels"] = s.labels().names();
  auto pairs_of = [&](EndoMask m) {
    auto arr = nlohmann::json::array();
    const std::size_t n = s.arity();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k)
        if (endo::holds(n, m, i, k)) arr.push_back({s.labels().name(i), s.labels().name(k)});
    return arr;
  };
  j["generators"] = nlohmann::json::array();
  for (EndoMask g : generators(s)) j["generators"].push_back(pairs_of(g));
  if (with_members) {
    j["members"] = nlohmann::json::array();
    for (EndoMask m : s.members()) j["members"].push_back(pairs_of(m));
  }
  return j;
}

inline UCSubmonoid submonoid_from_json(const nlohmann::json& j) {
  try {
    FinSet a(j.at("labels").get<std::vector<std::string>>());
    const std::size_t n = a.size();
    if (n > kMaxLabels) throw ResourceError("label sets are limited to four elements", n);
    auto read = [&](const nlohmann::json& rel) {
      EndoMask m = 0;
      for (const auto& p : rel) {
        auto i = a.index_of(p.at(0).get<std::string>());
        auto k = a.index_of(p.at(1).get<std::string>());
        if (!i || !k) throw ParseError("unknown label in " + p.dump(), 0);
        m |= EndoMask{1} << (*i * n + *k);
      }
      return m;
    };
    std::vector<EndoMask> gens;
    for (const auto& g : j.at("generators")) gens.push_back(read(g));
    UCSubmonoid s = generate(a, gens);
    if (j.contains("members")) {
      std::vector<bool> listed(endo::universe(n), false);
      for (const auto& m : j.at("members")) listed[read(m)] = true;
      if (listed != s.table()) throw ParseError("listed members differ from the generated submonoid", 0);
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad submonoid JSON: ") + e.what(), 0);
  }
}

inline std::string describe(const UCSubmonoid& s) {
  const auto gens = generators(s);
  if (gens.empty()) return "<>";
  std::string out = "<";
  for (std::size_t i = 0; i < gens.size(); ++i)
    out += (i ? ", " : "") + endo::to_string(s.labels(), gens[i]);
  return out + ">";
}

inline std::string to_dot(const NLELattice& lat) {
  std::ostringstream os;
  os << "digraph nle {\n  rankdir=BT;\n  node [shape=box];\n";
  for (std::size_t i = 0; i < lat.nodes.size(); ++i)
    os << "  n" << i << " [label=\"" << describe(lat.nodes[i]) << "\\n" << lat.nodes[i].size()
       << " members\"];\n";
  for (auto [lo, hi] : lat.hasse) os << "  n" << lo << " -> n" << hi << ";\n";
  os << "}\n";
  return os.str();
}

}  // namespace relsim
