#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "nmodal/formula.hpp"

using namespace nmodal;

namespace {

Formula P() { return Formula::var("p"); }
Formula Q() { return Formula::var("q"); }

// Random formula generator for property tests. Weighted toward Not so that
// the star/negation operators see deep negation towers.
Formula randomFormula(std::mt19937& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 9);
  switch (pick(rng)) {
    case 0: return Formula::bottom();
    case 1: return Formula::top();
    case 2: {
      std::uniform_int_distribution<int> v(0, 2);
      static const char* names[] = {"p", "q", "r"};
      return Formula::var(names[v(rng)]);
    }
    case 3:
    case 4:
    case 5: return Formula::lnot(randomFormula(rng, depth - 1));
    case 6: return Formula::land(randomFormula(rng, depth - 1), randomFormula(rng, depth - 1));
    case 7: return Formula::lor(randomFormula(rng, depth - 1), randomFormula(rng, depth - 1));
    case 8: return Formula::imp(randomFormula(rng, depth - 1), randomFormula(rng, depth - 1));
    default: return Formula::box(randomFormula(rng, depth - 1));
  }
}

void registerAtoms(const Formula& a, PropAtomMap& m) {
  if (a.isPropAtomic()) {
    m.atomOf(a);
    return;
  }
  switch (a.conn()) {
    case Conn::Not: registerAtoms(a.child(), m); break;
    case Conn::And:
    case Conn::Or:
    case Conn::Imp:
      registerAtoms(a.left(), m);
      registerAtoms(a.right(), m);
      break;
    default: break;
  }
}

// Independent all-valuations tautology oracle over the translation atoms.
bool bruteForceEntails(const std::vector<Formula>& premises, const Formula& goal) {
  PropAtomMap m;
  for (const auto& f : premises) registerAtoms(f, m);
  registerAtoms(goal, m);
  std::vector<Formula> trans;
  for (const auto& f : premises) trans.push_back(translateI(f, m));
  Formula tg = translateI(goal, m);
  std::vector<std::string> atoms;
  for (std::size_t i = 0; i < m.count(); ++i) atoms.push_back("a" + std::to_string(i));
  REQUIRE(atoms.size() <= 20);
  std::function<bool(const Formula&, const std::map<std::string, bool>&)> ev =
      [&](const Formula& f, const std::map<std::string, bool>& val) -> bool {
    switch (f.conn()) {
      case Conn::Bottom: return false;
      case Conn::Top: return true;
      case Conn::Var: return val.at(f.name());
      case Conn::Not: return !ev(f.child(), val);
      case Conn::And: return ev(f.left(), val) && ev(f.right(), val);
      case Conn::Or: return ev(f.left(), val) || ev(f.right(), val);
      case Conn::Imp: return !ev(f.left(), val) || ev(f.right(), val);
      case Conn::Box: return false;  // unreachable after translation
    }
    return false;
  };
  for (std::uint32_t bits = 0; bits < (1u << atoms.size()); ++bits) {
    std::map<std::string, bool> val;
    for (std::size_t i = 0; i < atoms.size(); ++i) val[atoms[i]] = (bits >> i) & 1;
    bool ok = true;
    for (const auto& t : trans)
      if (!ev(t, val)) { ok = false; break; }
    if (ok && !ev(tg, val)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("parse builds the expected ASTs") {
  CHECK(parse("[]p -> [][]p") ==
        Formula::imp(Formula::box(P()), Formula::box(Formula::box(P()))));
  CHECK(parse("~(([]p) & ([]~p))") ==
        Formula::lnot(Formula::land(Formula::box(P()),
                                    Formula::box(Formula::lnot(P())))));
  CHECK(parse("p <-> q") ==
        Formula::land(Formula::imp(P(), Q()), Formula::imp(Q(), P())));
  CHECK(parse("box p") == Formula::box(P()));
  CHECK(parse("!p") == Formula::lnot(P()));
  CHECK(parse("false | true") == Formula::lor(Formula::bottom(), Formula::top()));
  // -> is right-associative, & binds tighter than |
  CHECK(parse("p -> q -> p") == Formula::imp(P(), Formula::imp(Q(), P())));
  CHECK(parse("p | q & p") == Formula::lor(P(), Formula::land(Q(), P())));
}

TEST_CASE("parse reports position on malformed input") {
  CHECK_THROWS_AS(parse("p ->"), ParseError);
  CHECK_THROWS_AS(parse("(p"), ParseError);
  CHECK_THROWS_AS(parse(""), ParseError);
  try {
    parse("p & & q");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.position == 4);
  }
}

TEST_CASE("parse after print is the identity") {
  std::mt19937 rng(2024);
  for (int i = 0; i < 500; ++i) {
    Formula f = randomFormula(rng, 5);
    CHECK(parse(f.text()) == f);
  }
}

TEST_CASE("negCompanion") {
  CHECK(negCompanion(Formula::lnot(P())) == P());
  CHECK(negCompanion(P()) == Formula::lnot(P()));
  Formula boxNotQ = Formula::box(Formula::lnot(Q()));
  CHECK(negCompanion(boxNotQ) == Formula::lnot(boxNotQ));
  // involution off negations
  std::mt19937 rng(7);
  for (int i = 0; i < 200; ++i) {
    Formula f = randomFormula(rng, 4);
    if (!f.isNot()) CHECK(negCompanion(negCompanion(f)) == f);
    // ~a is propositionally the negation of a
    CHECK(bruteForceEntails({f, negCompanion(f)}, Formula::bottom()));
    CHECK(bruteForceEntails({}, Formula::lor(f, negCompanion(f))));
  }
}

TEST_CASE("iteratedNeg") {
  CHECK(iteratedNeg(0, P()) == P());
  CHECK(iteratedNeg(2, Formula::box(Q())) ==
        Formula::lnot(Formula::lnot(Formula::box(Q()))));
  CHECK(iteratedNeg(1, Formula::lnot(P())) == Formula::lnot(Formula::lnot(P())));
}

TEST_CASE("starNormal") {
  CHECK(starNormal(parse("~~p")) == P());
  CHECK(starNormal(parse("~~~[]q")) == Formula::lnot(Formula::box(Q())));
  CHECK(starNormal(parse("p & q")) == parse("p & q"));
  std::mt19937 rng(99);
  for (int i = 0; i < 300; ++i) {
    Formula f = randomFormula(rng, 5);
    CHECK(starNormal(starNormal(f)) == starNormal(f));
    CHECK(starNormal(Formula::lnot(Formula::lnot(f))) == starNormal(f));
  }
}

TEST_CASE("gn ordering and injectivity") {
  CHECK(gn(P()) < gn(Formula::lnot(P())));
  std::mt19937 rng(4242);
  std::vector<Formula> corpus;
  for (int i = 0; i < 10000; ++i) corpus.push_back(randomFormula(rng, 5));

  std::map<std::string, std::string> byGn;  // decimal gn -> ser
  for (const auto& f : corpus) {
    auto [it, fresh] = byGn.emplace(gn(f).digits, f.ser());
    if (!fresh) CHECK(it->second == f.ser());  // injective
  }
  // subterm monotonicity: gn of every proper subformula is smaller
  std::function<void(const Formula&, const GNumber&)> walk =
      [&](const Formula& f, const GNumber& parent) {
    CHECK(gn(f) < parent);
    switch (f.conn()) {
      case Conn::Not:
      case Conn::Box: walk(f.child(), gn(f)); break;
      case Conn::And:
      case Conn::Or:
      case Conn::Imp:
        walk(f.left(), gn(f));
        walk(f.right(), gn(f));
        break;
      default: break;
    }
  };
  for (int i = 0; i < 500; ++i) {
    const Formula& f = corpus[i];
    GNumber top = gn(f);
    switch (f.conn()) {
      case Conn::Not:
      case Conn::Box: walk(f.child(), top); break;
      case Conn::And:
      case Conn::Or:
      case Conn::Imp:
        walk(f.left(), top);
        walk(f.right(), top);
        break;
      default: break;
    }
  }
}

TEST_CASE("enumeration is gn-sorted and repetition-free") {
  auto first = enumerateFormulas(40, {"p"});
  REQUIRE(first.size() == 40);
  for (std::size_t i = 1; i < first.size(); ++i)
    CHECK(gn(first[i - 1]) < gn(first[i]));
  // cross-check the first five against a brute-force enumeration: generate
  // everything of ser-length <= 3 and sort
  std::vector<Formula> small;
  for (std::size_t len = 1; len <= 3; ++len)
    for (const auto& f : formulasOfSerLength(len, {"p"})) small.push_back(f);
  std::sort(small.begin(), small.end(), GnLess{});
  REQUIRE(small.size() >= 5);
  for (int i = 0; i < 5; ++i) CHECK(first[i] == small[i]);
}

TEST_CASE("translateI keeps box-formulas opaque") {
  PropAtomMap m;
  Formula boxP = Formula::box(P());
  Formula boxNNPpre = Formula::box(parse("~~p"));
  Formula a = parse("~([]p & []~p)");
  registerAtoms(boxP, m);
  registerAtoms(boxNNPpre, m);
  registerAtoms(a, m);
  Formula t1 = translateI(boxP, m);
  CHECK(t1.conn() == Conn::Var);

  Formula t2 = translateI(boxNNPpre, m);
  CHECK(t2.conn() == Conn::Var);
  CHECK(t1.name() != t2.name());  // distinct atoms for distinct box-formulas

  Formula t3 = translateI(a, m);
  CHECK(t3 == Formula::lnot(Formula::land(translateI(Formula::box(P()), m),
                                          translateI(Formula::box(Formula::lnot(P())), m))));
}

TEST_CASE("tcEntails examples") {
  CHECK(tcEntails({P(), parse("p -> q")}, Q()));
  CHECK(tcEntails({parse("~([]p & []~p)"), parse("[]p")}, parse("~[]~p")));
  CHECK_FALSE(tcEntails({parse("[]p")}, parse("[]~~p")));
  CHECK(tcEntails({}, Formula::top()));
  CHECK_FALSE(tcEntails({}, Formula::bottom()));
}

TEST_CASE("tcEntails agrees with all-valuations oracle") {
  std::mt19937 rng(555);
  for (int i = 0; i < 400; ++i) {
    std::vector<Formula> prem;
    int n = i % 3;
    for (int j = 0; j < n; ++j) prem.push_back(randomFormula(rng, 3));
    Formula goal = randomFormula(rng, 4);
    CHECK(tcEntails(prem, goal) == bruteForceEntails(prem, goal));
  }
}

TEST_CASE("ser/deserialize round-trip") {
  std::mt19937 rng(31337);
  for (int i = 0; i < 300; ++i) {
    Formula f = randomFormula(rng, 5);
    CHECK(deserialize(f.ser()) == f);
  }
}
