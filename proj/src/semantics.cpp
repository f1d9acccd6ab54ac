#include "nmodal/semantics.hpp"

#include <algorithm>
#include <random>
#include <sstream>
#include <stdexcept>

namespace nmodal {

const char* defaultPolicyName(DefaultPolicy p) {
  switch (p) {
    case DefaultPolicy::Identity: return "identity";
    case DefaultPolicy::Total: return "total";
    case DefaultPolicy::Empty: return "empty";
  }
  return "?";
}

DefaultPolicy defaultPolicyFromName(const std::string& name) {
  if (name == "identity") return DefaultPolicy::Identity;
  if (name == "total") return DefaultPolicy::Total;
  if (name == "empty") return DefaultPolicy::Empty;
  throw std::invalid_argument("unknown default policy: " + name);
}

bool FrameSpec::hasWorld(WorldId w) const {
  return std::find(worlds.begin(), worlds.end(), w) != worlds.end();
}

const Relation* FrameSpec::find(const Formula& index) const {
  auto it = explicitRels.find(index);
  return it == explicitRels.end() ? nullptr : &it->second;
}

bool FrameSpec::related(const Formula& index, WorldId x, WorldId y) const {
  if (const Relation* r = find(index)) return r->count({x, y}) > 0;
  switch (def) {
    case DefaultPolicy::Identity: return x == y;
    case DefaultPolicy::Total: return true;
    case DefaultPolicy::Empty: return false;
  }
  return false;
}

Relation FrameSpec::materialize(const Formula& index) const {
  if (const Relation* r = find(index)) return *r;
  Relation out;
  switch (def) {
    case DefaultPolicy::Identity:
      for (WorldId w : worlds) out.insert({w, w});
      break;
    case DefaultPolicy::Total:
      for (WorldId x : worlds)
        for (WorldId y : worlds) out.insert({x, y});
      break;
    case DefaultPolicy::Empty: break;
  }
  return out;
}

namespace {

// Box values are memoized per evaluation: nested boxes would otherwise
// re-walk the whole world set once per visiting world.
struct Evaluator {
  const Model& m;
  std::map<std::pair<std::string, WorldId>, bool> boxMemo;

  bool go(WorldId w, const Formula& a) {
    switch (a.conn()) {
      case Conn::Bottom: return false;
      case Conn::Top: return true;
      case Conn::Var: {
        auto it = m.valuation.find(w);
        return it != m.valuation.end() && it->second.count(a.name()) > 0;
      }
      case Conn::Not: return !go(w, a.child());
      case Conn::And: return go(w, a.left()) && go(w, a.right());
      case Conn::Or: return go(w, a.left()) || go(w, a.right());
      case Conn::Imp: return !go(w, a.left()) || go(w, a.right());
      case Conn::Box: {
        auto [it, fresh] = boxMemo.try_emplace({a.ser(), w}, true);
        if (!fresh) return it->second;
        const Formula& b = a.child();
        bool all = true;
        for (WorldId y : m.frame.worlds)
          if (m.frame.related(b, w, y) && !go(y, b)) {
            all = false;
            break;
          }
        return boxMemo[{a.ser(), w}] = all;
      }
    }
    return false;
  }
};

}  // namespace

bool forces(const Model& m, WorldId w, const Formula& a) {
  Evaluator ev{m, {}};
  return ev.go(w, a);
}

namespace {

CheckResult fail(std::string reason, std::vector<Formula> indices,
                 std::vector<WorldId> ws) {
  return {false, std::move(reason), std::move(indices), std::move(ws)};
}

// Does every world have a successor common to both relations?
std::optional<WorldId> noCommonSuccessor(const FrameSpec& f, const Relation& r1,
                                         const Relation& r2) {
  for (WorldId x : f.worlds) {
    bool found = false;
    for (WorldId y : f.worlds)
      if (r1.count({x, y}) && r2.count({x, y})) { found = true; break; }
    if (!found) return x;
  }
  return std::nullopt;
}

CheckResult checkNP(const FrameSpec& f) {
  Relation bot = f.materialize(Formula::bottom());
  for (WorldId x : f.worlds) {
    bool found = false;
    for (WorldId y : f.worlds)
      if (bot.count({x, y})) { found = true; break; }
    if (!found)
      return fail("world has no bottom-successor", {Formula::bottom()}, {x});
  }
  return {};
}

CheckResult checkND(const FrameSpec& f) {
  // Candidate base formulas: every explicit index E yields the pair
  // (E, ~E); if E is itself a negation, also the pair (E', E).
  FormulaSet bases;
  for (const auto& [e, rel] : f.explicitRels) {
    bases.insert(e);
    if (e.isNot()) bases.insert(e.child());
  }
  for (const Formula& a : bases) {
    Relation ra = f.materialize(a);
    Relation rn = f.materialize(Formula::lnot(a));
    if (auto x = noCommonSuccessor(f, ra, rn))
      return fail("no common successor under the pair (A, ~A)",
                  {a, Formula::lnot(a)}, {*x});
  }
  // All-default pairs, by policy.
  if (f.def == DefaultPolicy::Empty)
    return fail("empty default gives no common successor for default index pairs",
                {}, {f.worlds.front()});
  return {};
}

CheckResult checkSerial(const FrameSpec& f) {
  for (const auto& [e, rel] : f.explicitRels) {
    for (WorldId x : f.worlds) {
      bool found = false;
      for (WorldId y : f.worlds)
        if (rel.count({x, y})) { found = true; break; }
      if (!found) return fail("world has no successor", {e}, {x});
    }
  }
  if (f.def == DefaultPolicy::Empty)
    return fail("empty default rows are not serial", {}, {f.worlds.front()});
  return {};
}

CheckResult checkTransitiveIndex(const FrameSpec& f, const Formula& a) {
  Relation rBox = f.materialize(Formula::box(a));
  Relation ra = f.materialize(a);
  for (auto [x, y] : rBox)
    for (WorldId z : f.worlds)
      if (ra.count({y, z}) && !ra.count({x, z}))
        return fail("x rel([]A) y and y rel(A) z but not x rel(A) z",
                    {a, Formula::box(a)}, {x, y, z});
  return {};
}

CheckResult checkTransitive(const FrameSpec& f) {
  FormulaSet candidates;
  for (const auto& [e, rel] : f.explicitRels) {
    candidates.insert(e);
    if (e.isBox()) candidates.insert(e.child());
  }
  for (const Formula& a : candidates)
    if (auto r = checkTransitiveIndex(f, a); !r) return r;
  // All-default indices: identity/total/empty relations are each closed
  // under the composition condition, so nothing further to check.
  return {};
}

}  // namespace

CheckResult checkFrameClass(const FrameSpec& f, const FrameClass& c) {
  if (f.worlds.empty()) return fail("empty world set", {}, {});
  switch (c.tag) {
    case FrameClass::Tag::N: return {};
    case FrameClass::Tag::NP: return checkNP(f);
    case FrameClass::Tag::ND: return checkND(f);
    case FrameClass::Tag::Serial: return checkSerial(f);
    case FrameClass::Tag::Transitive: return checkTransitive(f);
    case FrameClass::Tag::GammaTransitive: {
      for (const Formula& g : c.gamma) {
        if (!(g.isBox() && g.child().isBox())) continue;
        if (auto r = checkTransitiveIndex(f, g.child().child()); !r) return r;
      }
      return {};
    }
  }
  return {};
}

FrameSpec repairTransitive(const FrameSpec& f, const Formula& a) {
  FormulaSet keepStar = subStar(a);
  FormulaSet subA = sub(a);
  auto kept = [&](const Formula& b) {
    if (keepStar.count(Formula::box(b))) return true;
    Formula c = b;
    while (c.isNot()) {
      c = c.child();
      if (subA.count(Formula::box(c))) return true;
    }
    return false;
  };
  FrameSpec out;
  out.worlds = f.worlds;
  out.def = DefaultPolicy::Identity;
  for (const auto& [b, rel] : f.explicitRels)
    if (kept(b)) out.explicitRels.emplace(b, rel);
  // A kept index's neg-partner is kept too; when that partner had no
  // explicit entry its relation came from the old default, which must
  // survive the default switch. Materialize it.
  for (const auto& [b, rel] : f.explicitRels) {
    if (!kept(b)) continue;
    std::vector<Formula> partners{Formula::lnot(b)};
    if (b.isNot()) partners.push_back(b.child());
    for (const Formula& p : partners)
      if (!f.find(p) && kept(p) && !out.find(p))
        out.explicitRels.emplace(p, f.materialize(p));
  }
  return out;
}

FrameSpec randomFrame(const FrameClass& c, std::size_t size,
                      const FormulaSet& indices, std::uint64_t seed) {
  if (size < 1) throw std::invalid_argument("randomFrame: size >= 1");
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution edge(0.4);
  FrameSpec f;
  for (std::size_t i = 0; i < size; ++i) f.worlds.push_back(static_cast<WorldId>(i));
  f.def = DefaultPolicy::Identity;
  for (const Formula& idx : indices) {
    Relation r;
    for (WorldId x : f.worlds)
      for (WorldId y : f.worlds)
        if (edge(rng)) r.insert({x, y});
    f.explicitRels.emplace(idx, std::move(r));
  }

  // Repairs toward the class. Diagonal edges never hurt any of the
  // conditions below and settle the existence ones.
  auto ensureDiagonalPair = [&](const Formula& a) {
    Formula na = Formula::lnot(a);
    for (const Formula& idx : {a, na}) {
      auto it = f.explicitRels.find(idx);
      if (it == f.explicitRels.end()) continue;  // default identity: fine
      Relation withOther = f.materialize(idx == a ? na : a);
      for (WorldId x : f.worlds) {
        bool common = false;
        for (WorldId y : f.worlds)
          if (f.related(a, x, y) && f.related(na, x, y)) { common = true; break; }
        (void)withOther;
        if (!common) {
          if (auto ia = f.explicitRels.find(a); ia != f.explicitRels.end())
            ia->second.insert({x, x});
          if (auto in = f.explicitRels.find(na); in != f.explicitRels.end())
            in->second.insert({x, x});
        }
      }
    }
  };

  switch (c.tag) {
    case FrameClass::Tag::N: break;
    case FrameClass::Tag::NP: {
      auto it = f.explicitRels.find(Formula::bottom());
      if (it != f.explicitRels.end())
        for (WorldId x : f.worlds) {
          bool found = false;
          for (WorldId y : f.worlds)
            if (it->second.count({x, y})) { found = true; break; }
          if (!found) it->second.insert({x, x});
        }
      break;
    }
    case FrameClass::Tag::ND: {
      FormulaSet bases;
      for (const auto& [e, rel] : f.explicitRels) {
        bases.insert(e);
        if (e.isNot()) bases.insert(e.child());
      }
      for (const Formula& a : bases) ensureDiagonalPair(a);
      break;
    }
    case FrameClass::Tag::Serial: {
      for (auto& [e, rel] : f.explicitRels)
        for (WorldId x : f.worlds) {
          bool found = false;
          for (WorldId y : f.worlds)
            if (rel.count({x, y})) { found = true; break; }
          if (!found) rel.insert({x, x});
        }
      break;
    }
    case FrameClass::Tag::Transitive:
    case FrameClass::Tag::GammaTransitive: {
      // Close under the composition rule to a fixpoint.
      bool changed = true;
      while (changed) {
        changed = false;
        FormulaSet candidates;
        for (const auto& [e, rel] : f.explicitRels) {
          candidates.insert(e);
          if (e.isBox()) candidates.insert(e.child());
        }
        for (const Formula& a : candidates) {
          if (c.tag == FrameClass::Tag::GammaTransitive &&
              !c.gamma.count(Formula::box(Formula::box(a))))
            continue;
          Relation rBox = f.materialize(Formula::box(a));
          Relation ra = f.materialize(a);
          auto it = f.explicitRels.find(a);
          for (auto [x, y] : rBox)
            for (WorldId z : f.worlds)
              if (ra.count({y, z}) && !ra.count({x, z})) {
                if (it == f.explicitRels.end()) {
                  it = f.explicitRels.emplace(a, f.materialize(a)).first;
                }
                it->second.insert({x, z});
                ra.insert({x, z});
                changed = true;
              }
        }
      }
      break;
    }
  }

  CheckResult r = checkFrameClass(f, c);
  if (!r) throw std::logic_error("randomFrame: repair failed: " + r.reason);
  return f;
}

nlohmann::json frameToJson(const FrameSpec& f) {
  nlohmann::json j;
  j["worlds"] = f.worlds;
  j["default"] = defaultPolicyName(f.def);
  nlohmann::json rels = nlohmann::json::object();
  for (const auto& [b, rel] : f.explicitRels) {
    nlohmann::json edges = nlohmann::json::array();
    for (auto [x, y] : rel) edges.push_back({x, y});
    rels[b.text()] = std::move(edges);
  }
  j["relations"] = std::move(rels);
  return j;
}

FrameSpec frameFromJson(const nlohmann::json& j) {
  FrameSpec f;
  f.worlds = j.at("worlds").get<std::vector<WorldId>>();
  f.def = defaultPolicyFromName(j.at("default").get<std::string>());
  for (const auto& [text, edges] : j.at("relations").items()) {
    Relation r;
    for (const auto& e : edges) r.insert({e.at(0).get<WorldId>(), e.at(1).get<WorldId>()});
    f.explicitRels.emplace(parse(text), std::move(r));
  }
  return f;
}

nlohmann::json modelToJson(const Model& m) {
  nlohmann::json j = frameToJson(m.frame);
  nlohmann::json val = nlohmann::json::object();
  for (const auto& [w, vars] : m.valuation)
    val[std::to_string(w)] = std::vector<std::string>(vars.begin(), vars.end());
  j["valuation"] = std::move(val);
  return j;
}

Model modelFromJson(const nlohmann::json& j) {
  Model m;
  m.frame = frameFromJson(j);
  if (j.contains("valuation"))
    for (const auto& [w, vars] : j.at("valuation").items()) {
      WorldId id = std::stoi(w);
      if (!m.frame.hasWorld(id))
        throw std::invalid_argument("valuation names unknown world " + w);
      m.valuation[id] = vars.get<std::set<std::string>>();
    }
  return m;
}

std::string modelToDot(const Model& m) {
  std::ostringstream os;
  std::size_t n = 0;
  for (const auto& [b, rel] : m.frame.explicitRels) {
    os << "digraph rel" << n++ << " {\n";
    os << "  label=\"" << b.text() << "\";\n";
    for (WorldId w : m.frame.worlds) {
      os << "  w" << w << " [label=\"" << w;
      auto it = m.valuation.find(w);
      if (it != m.valuation.end() && !it->second.empty()) {
        os << ":";
        bool first = true;
        for (const auto& v : it->second) {
          if (!first) os << ",";
          os << " " << v;
          first = false;
        }
      }
      os << "\"];\n";
    }
    for (auto [x, y] : rel)
      os << "  w" << x << " -> w" << y << " [label=\"" << b.text() << "\"];\n";
    os << "}\n";
  }
  if (n == 0) {
    os << "digraph frame {\n";
    for (WorldId w : m.frame.worlds) os << "  w" << w << ";\n";
    os << "}\n";
  }
  return os.str();
}

}  // namespace nmodal
