#ifndef NMODAL_CLOSURE_HPP
#define NMODAL_CLOSURE_HPP

#include "nmodal/formula.hpp"

namespace nmodal {

enum class Logic { N, NP, ND, N4, NP4, ND4 };

constexpr bool isTransitiveLogic(Logic l) {
  return l == Logic::N4 || l == Logic::NP4 || l == Logic::ND4;
}
constexpr bool hasAxiomP(Logic l) { return l == Logic::NP || l == Logic::NP4; }
constexpr bool hasAxiomD(Logic l) { return l == Logic::ND || l == Logic::ND4; }

const char* logicName(Logic l);
Logic logicFromName(const std::string& name);  // throws on unknown names

/// Finite formula set closed under subformulas, built around a root.
struct ClosureSet {
  Formula root;
  FormulaSet members;
};

/// Sub(a): all subformulas including a itself.
FormulaSet sub(const Formula& a);

/// Sub*(a): Sub(a) plus every []B such that []¬^k B is a subformula of a.
FormulaSet subStar(const Formula& a);

/// The closure driving the canonical construction: Sub*(a), its
/// ~-companions, and the constant block {[]false, ~[]false, []true,
/// ~[]true, false, true} together with the companions of false and true.
ClosureSet overlineClosure(const Formula& a);

/// Bounded premise pool for the provability oracle: `depth` rounds of, for
/// each []C in the set, adding ~C-style companions ¬C and []¬C, plus [][]C
/// for transitive logics.
FormulaSet premiseUniverse(Logic l, const ClosureSet& g, unsigned depth);

}  // namespace nmodal

#endif
