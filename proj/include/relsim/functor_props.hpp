#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "relsim/functor.hpp"

namespace relsim {

struct PreservationProfile {
  bool weak_pullbacks = true;
  bool inverse_images = true;
  bool quarter_iso_pullbacks = true;
  bool empty_intersections = true;

  friend bool operator==(const PreservationProfile&, const PreservationProfile&) = default;
};

/// Structural rule table.
///   Const, Id, Pow, Exp : everything
///   Sum, Prod, Comp     : conjunction over the parts
///   MVal(M)             : inverse images and 1/4-iso pullbacks iff M is positive,
///                         weak pullbacks iff M is positive and refinable,
///                         empty intersections always
inline PreservationProfile preservation_profile(const FunctorExpr& f) {
  using K = FunctorExpr::Kind;
  PreservationProfile p;
  auto meet = [&](const PreservationProfile& q) {
    p.weak_pullbacks = p.weak_pullbacks && q.weak_pullbacks;
    p.inverse_images = p.inverse_images && q.inverse_images;
    p.quarter_iso_pullbacks = p.quarter_iso_pullbacks && q.quarter_iso_pullbacks;
    p.empty_intersections = p.empty_intersections && q.empty_intersections;
  };
  switch (f.kind()) {
    case K::Const:
    case K::Id:
    case K::Pow:
    case K::Exp:
      break;
    case K::Sum:
    case K::Prod:
    case K::Comp:
      for (const auto& part : f.parts()) meet(preservation_profile(part));
      break;
    case K::MonoidVal: {
      const bool pos = is_positive(f.monoid());
      p.inverse_images = pos;
      p.quarter_iso_pullbacks = pos;
      p.weak_pullbacks = pos && is_refinable(f.monoid());
      break;
    }
  }
  return p;
}

enum class PullbackShape { Weak, InverseImage, QuarterIso, EmptyIntersection };

inline const char* to_string(PullbackShape s) {
  switch (s) {
    case PullbackShape::Weak: return "weak_pullbacks";
    case PullbackShape::InverseImage: return "inverse_images";
    case PullbackShape::QuarterIso: return "quarter_iso_pullbacks";
    case PullbackShape::EmptyIntersection: return "empty_intersections";
  }
  return "?";
}

/// A square where F fails to preserve a pullback. h : X -> Y and g : B -> Y.
struct PullbackCounterexample {
  PullbackShape shape;
  std::size_t x_size = 0, b_size = 0, y_size = 0;
  std::vector<std::size_t> h, g;
  std::string detail;
};

struct PreservationCheck {
  PreservationProfile observed;  // false where a counterexample was found
  std::vector<PullbackCounterexample> counterexamples;  // first one per shape
  std::size_t squares = 0;

  bool agrees_with(const PreservationProfile& claimed) const {
    // The checker can only refute; a claimed property must not be refuted.
    return (!claimed.weak_pullbacks || observed.weak_pullbacks) &&
           (!claimed.inverse_images || observed.inverse_images) &&
           (!claimed.quarter_iso_pullbacks || observed.quarter_iso_pullbacks) &&
           (!claimed.empty_intersections || observed.empty_intersections);
  }
};

namespace detail {

inline bool next_function(std::vector<std::size_t>& t, std::size_t cod) {
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (++t[i] < cod) return true;
    t[i] = 0;
  }
  return false;
}

// Compare F P with the pullback of F h and F g. Returns (injective, surjective, detail).
struct LiftedSquare {
  bool injective = true;
  bool surjective = true;
  std::string detail;
};

inline LiftedSquare lift_square(const FunctorExpr& f, std::size_t nx, std::size_t nb, std::size_t ny,
                                const std::vector<std::size_t>& h, const std::vector<std::size_t>& g) {
  std::vector<std::size_t> p1, p2;
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t b = 0; b < nb; ++b)
      if (h[x] == g[b]) {
        p1.push_back(x);
        p2.push_back(b);
      }
  const std::size_t np = p1.size();
  const std::size_t fp = card(f, np), fx = card(f, nx), fb = card(f, nb), fy = card(f, ny);
  auto hf = [&](std::size_t i) { return h[i]; };
  auto gf = [&](std::size_t i) { return g[i]; };
  auto p1f = [&](std::size_t i) { return p1[i]; };
  auto p2f = [&](std::size_t i) { return p2[i]; };

  std::vector<std::size_t> fh(fx), fg(fb);
  for (std::size_t v = 0; v < fx; ++v) fh[v] = map_element(f, nx, ny, hf, v);
  for (std::size_t w = 0; w < fb; ++w) fg[w] = map_element(f, nb, ny, gf, w);

  LiftedSquare out;
  std::unordered_set<std::size_t> hit;
  for (std::size_t u = 0; u < fp; ++u) {
    const std::size_t v = map_element(f, np, nx, p1f, u);
    const std::size_t w = map_element(f, np, nb, p2f, u);
    if (!hit.insert(v * fb + w).second && out.injective) {
      out.injective = false;
      out.detail = "two elements of F P map to (" + std::to_string(v) + "," + std::to_string(w) + ")";
    }
  }
  std::vector<std::size_t> by_y(fy, 0);
  for (std::size_t w = 0; w < fb; ++w) ++by_y[fg[w]];
  std::size_t pb = 0;
  for (std::size_t v = 0; v < fx; ++v) pb += by_y[fh[v]];
  if (hit.size() < pb) {
    out.surjective = false;
    for (std::size_t v = 0; v < fx && out.detail.empty(); ++v)
      for (std::size_t w = 0; w < fb; ++w)
        if (fh[v] == fg[w] && !hit.count(v * fb + w)) {
          out.detail = "pair (" + std::to_string(v) + "," + std::to_string(w) +
                       ") of the lifted pullback is not reached from F P";
          break;
        }
  }
  return out;
}

}  // namespace detail

/// Apply F to every pullback square with carriers of size at most `max_size` and
/// test the lifted square. Squares whose lifted carriers exceed `limits` are skipped.
inline PreservationCheck check_pullback_preservation(const FunctorExpr& f, std::size_t max_size,
                                                     const Limits& limits = {}) {
  if (max_size > 4) throw ResourceError("pullback preservation check is limited to size 4", max_size);
  PreservationCheck out;
  std::vector<bool> seen(4, false);
  auto record = [&](PullbackShape s, std::size_t nx, std::size_t nb, std::size_t ny,
                    const std::vector<std::size_t>& h, const std::vector<std::size_t>& g,
                    const std::string& detail) {
    switch (s) {
      case PullbackShape::Weak: out.observed.weak_pullbacks = false; break;
      case PullbackShape::InverseImage: out.observed.inverse_images = false; break;
      case PullbackShape::QuarterIso: out.observed.quarter_iso_pullbacks = false; break;
      case PullbackShape::EmptyIntersection: out.observed.empty_intersections = false; break;
    }
    if (seen[static_cast<std::size_t>(s)]) return;
    seen[static_cast<std::size_t>(s)] = true;
    out.counterexamples.push_back(PullbackCounterexample{s, nx, nb, ny, h, g, detail});
  };

  for (std::size_t ny = 0; ny <= max_size; ++ny) {
    if (card(f, ny) > limits.max_card) continue;
    for (std::size_t nx = 0; nx <= max_size; ++nx) {
      if (card(f, nx) > limits.max_card || (ny == 0 && nx > 0)) continue;
      for (std::size_t nb = 0; nb <= max_size; ++nb) {
        if (card(f, nb) > limits.max_card || (ny == 0 && nb > 0)) continue;
        if (card(f, nx * nb) > limits.max_card) continue;
        std::vector<std::size_t> h(nx, 0);
        do {
          std::vector<std::size_t> g(nb, 0);
          do {
            ++out.squares;
            // Shape of the square.
            std::vector<std::size_t> fibre(nx, 0);
            for (std::size_t x = 0; x < nx; ++x)
              for (std::size_t b = 0; b < nb; ++b) fibre[x] += h[x] == g[b];
            bool leg_iso = true;
            for (auto c : fibre) leg_iso = leg_iso && c == 1;
            bool g_mono = true, h_mono = true, disjoint = true;
            for (std::size_t i = 0; i < nb; ++i)
              for (std::size_t j = i + 1; j < nb; ++j) g_mono = g_mono && g[i] != g[j];
            for (std::size_t i = 0; i < nx; ++i)
              for (std::size_t j = i + 1; j < nx; ++j) h_mono = h_mono && h[i] != h[j];
            for (auto c : fibre) disjoint = disjoint && c == 0;

            const auto sq = detail::lift_square(f, nx, nb, ny, h, g);
            const bool iso = sq.injective && sq.surjective;
            if (!sq.surjective) record(PullbackShape::Weak, nx, nb, ny, h, g, sq.detail);
            if (g_mono && !iso) record(PullbackShape::InverseImage, nx, nb, ny, h, g, sq.detail);
            if (leg_iso && !iso) record(PullbackShape::QuarterIso, nx, nb, ny, h, g, sq.detail);
            if (g_mono && h_mono && disjoint && !iso)
              record(PullbackShape::EmptyIntersection, nx, nb, ny, h, g, sq.detail);
          } while (detail::next_function(g, ny));
        } while (detail::next_function(h, ny));
      }
    }
  }
  return out;
}

}  // namespace relsim
