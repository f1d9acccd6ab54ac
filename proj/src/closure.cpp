#include "nmodal/closure.hpp"

#include <stdexcept>

namespace nmodal {

const char* logicName(Logic l) {
  switch (l) {
    case Logic::N: return "N";
    case Logic::NP: return "NP";
    case Logic::ND: return "ND";
    case Logic::N4: return "N4";
    case Logic::NP4: return "NP4";
    case Logic::ND4: return "ND4";
  }
  return "?";
}

Logic logicFromName(const std::string& name) {
  if (name == "N") return Logic::N;
  if (name == "NP") return Logic::NP;
  if (name == "ND") return Logic::ND;
  if (name == "N4") return Logic::N4;
  if (name == "NP4") return Logic::NP4;
  if (name == "ND4") return Logic::ND4;
  if (name == "NR" || name == "NR4")
    throw std::invalid_argument("logic " + name +
                                " is frame-class-only; deciding it is not supported");
  throw std::invalid_argument("unknown logic: " + name);
}

static void subInto(const Formula& a, FormulaSet& out) {
  if (!out.insert(a).second) return;
  switch (a.conn()) {
    case Conn::Not:
    case Conn::Box: subInto(a.child(), out); break;
    case Conn::And:
    case Conn::Or:
    case Conn::Imp:
      subInto(a.left(), out);
      subInto(a.right(), out);
      break;
    default: break;
  }
}

FormulaSet sub(const Formula& a) {
  FormulaSet out;
  subInto(a, out);
  return out;
}

FormulaSet subStar(const Formula& a) {
  FormulaSet out = sub(a);
  // For each []D in Sub(a) with D = ¬^k B, every partial strip B of D
  // contributes []B.
  for (const Formula& f : sub(a)) {
    if (!f.isBox()) continue;
    Formula body = f.child();
    while (body.isNot()) {
      body = body.child();
      out.insert(Formula::box(body));
    }
  }
  return out;
}

ClosureSet overlineClosure(const Formula& a) {
  ClosureSet cl{a, subStar(a)};
  FormulaSet companions;
  for (const Formula& f : cl.members) companions.insert(negCompanion(f));
  cl.members.merge(companions);
  // Constant block. The paper's list is extended with ~false and ~true so
  // that every member has its companion inside the closure.
  for (const Formula& c :
       {Formula::bottom(), Formula::top(), Formula::box(Formula::bottom()),
        Formula::box(Formula::top())}) {
    cl.members.insert(c);
    cl.members.insert(Formula::lnot(c));
  }
  return cl;
}

FormulaSet premiseUniverse(Logic l, const ClosureSet& g, unsigned depth) {
  if (depth < 1) throw std::invalid_argument("premiseUniverse: depth >= 1");
  FormulaSet pool = g.members;
  for (unsigned round = 0; round < depth; ++round) {
    FormulaSet added;
    for (const Formula& f : pool) {
      if (!f.isBox()) continue;
      Formula body = f.child();
      added.insert(Formula::lnot(body));
      added.insert(Formula::box(Formula::lnot(body)));
      if (isTransitiveLogic(l)) added.insert(Formula::box(f));
    }
    std::size_t before = pool.size();
    pool.merge(added);
    if (pool.size() == before) break;
  }
  return pool;
}

}  // namespace nmodal
