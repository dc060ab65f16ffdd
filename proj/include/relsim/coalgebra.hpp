#pragma once

#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "relsim/errors.hpp"
#include "relsim/finset.hpp"
#include "relsim/functor.hpp"
#include "relsim/functor_io.hpp"

namespace relsim {

/// A finite F-coalgebra: states X and a transition map X -> F X stored as indices
/// into the canonical enumeration of F X.
class Coalgebra {
 public:
  Coalgebra(FunctorExpr f, FinSet states, std::vector<std::size_t> transition, const Limits& limits = {})
      : functor_(std::move(f)), states_(std::move(states)), trans_(std::move(transition)) {
    if (trans_.size() != states_.size())
      throw SpecError("transition map has " + std::to_string(trans_.size()) + " entries for " +
                      std::to_string(states_.size()) + " states");
    fcard_ = checked_card(functor_, states_.size(), limits);
    for (auto t : trans_)
      if (t >= fcard_) throw SpecError("transition value outside F X");
  }

  const FunctorExpr& functor() const noexcept { return functor_; }
  const FinSet& states() const noexcept { return states_; }
  std::size_t size() const noexcept { return states_.size(); }
  std::size_t operator()(std::size_t x) const { return trans_.at(x); }
  const std::vector<std::size_t>& transitions() const noexcept { return trans_; }
  std::size_t fcard() const noexcept { return fcard_; }

  FinFun as_map() const { return FinFun(states_, FinSet::anonymous(fcard_), trans_); }

 private:
  FunctorExpr functor_;
  FinSet states_;
  std::vector<std::size_t> trans_;
  std::size_t fcard_ = 0;
};

/// Uniformly random transitions; the functor image must be enumerable.
template <class Rng>
Coalgebra random_coalgebra(const FunctorExpr& f, std::size_t n, Rng& rng, const Limits& limits = {}) {
  const std::size_t c = checked_card(f, n, limits);
  if (n > 0 && c == 0) throw SpecError("F X is empty; no coalgebra on a non-empty carrier");
  std::uniform_int_distribution<std::size_t> pick(0, c == 0 ? 0 : c - 1);
  std::vector<std::size_t> t(n);
  for (auto& v : t) v = pick(rng);
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back("s" + std::to_string(i));
  return Coalgebra(f, FinSet(std::move(names)), std::move(t), limits);
}

inline nlohmann::json to_json(const Coalgebra& c) {
  nlohmann::json j;
  j["functor"] = to_string(c.functor());
  j["states"] = c.states().names();
  j["transition"] = nlohmann::json::object();
  for (std::size_t x = 0; x < c.size(); ++x)
    j["transition"][c.states().name(x)] = value_to_json(c.functor(), c.states(), c(x));
  return j;
}

inline Coalgebra coalgebra_from_json(const nlohmann::json& j, const Limits& limits = {}) {
  try {
    FunctorExpr f = parse_functor(j.at("functor").get<std::string>());
    FinSet states(j.at("states").get<std::vector<std::string>>());
    const auto& tr = j.at("transition");
    std::vector<std::size_t> t(states.size());
    for (std::size_t x = 0; x < states.size(); ++x) {
      const auto it = tr.find(states.name(x));
      if (it == tr.end()) throw ParseError("no transition for state " + states.name(x), 0);
      t[x] = value_from_json(f, states, *it);
    }
    return Coalgebra(f, states, std::move(t), limits);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad coalgebra JSON: ") + e.what(), 0);
  }
}

}  // namespace relsim
