#pragma once

#include <vector>

#include "relsim/relator.hpp"
#include "relsim/submonoid.hpp"

namespace relsim {

/// Index of the identity map A -> A in the enumeration of Exp(A) applied to A.
inline std::size_t exp_identity_index(std::size_t n) {
  std::size_t u = 0, p = 1;
  for (std::size_t i = 0; i < n; ++i) {
    u += i * p;
    p *= n;
  }
  return u;
}

/// {φ : A ⇸ A | 1_A (L φ) 1_A} for a relator over Exp(A).
inline std::vector<EndoMask> s_of_relator(const RelatorSpec& spec, const Limits& limits = {}) {
  const FunctorExpr& f = spec.functor();
  if (f.kind() != FunctorExpr::Kind::Exp) throw SpecError("s_of_relator needs a relator over Exp(A)");
  const FinSet& a = f.set();
  const std::size_t n = a.size();
  if (n > kMaxLabels) throw ResourceError("label sets are limited to four elements", n);
  const std::size_t id = exp_identity_index(n);
  std::vector<EndoMask> out;
  for (std::size_t m = 0; m < endo::universe(n); ++m) {
    const auto phi = static_cast<EndoMask>(m);
    if (Lifting(spec, endo::to_rel(a, phi), limits).relates(id, id)) out.push_back(phi);
  }
  return out;
}

/// The same set as a membership table indexed by mask.
inline std::vector<bool> s_of_relator_table(const RelatorSpec& spec, const Limits& limits = {}) {
  const std::size_t n = spec.functor().set().size();
  std::vector<bool> t(endo::universe(n), false);
  for (EndoMask m : s_of_relator(spec, limits)) t[m] = true;
  return t;
}

/// One relator per lattice node.
inline std::vector<RelatorSpec> nle_relators(const NLELattice& lat) {
  std::vector<RelatorSpec> out;
  for (const auto& s : lat.nodes) out.push_back(RelatorSpec::submonoid_exp(s));
  return out;
}

}  // namespace relsim
