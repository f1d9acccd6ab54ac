#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nmodal/prover.hpp"

using namespace nmodal;

TEST_CASE("lprovable basics") {
  Prover n(Logic::N);
  CHECK(n.lprovable(parse("true")));
  CHECK(n.lprovable(parse("p -> p")));
  CHECK_FALSE(n.lprovable(parse("~[]false")));
  CHECK_FALSE(n.lprovable(parse("p")));

  Prover nd(Logic::ND);
  std::shared_ptr<Certificate> cert;
  CHECK(nd.lprovable(parse("~[](p & ~p)"), &cert));
  REQUIRE(cert);
  CHECK(verifyCertificate(Logic::ND, *cert));
  // the derivation leans on the necessitation of ~(p & ~p)
  bool sawNec = false;
  for (const auto& e : cert->premises)
    if (e.kind == Certificate::Entry::Kind::Nec) sawNec = true;
  CHECK(sawNec);

  Prover np(Logic::NP);
  CHECK(np.lprovable(parse("~[]false")));
}

TEST_CASE("decide on the signature corpus") {
  struct Row {
    Logic l;
    const char* f;
    bool provable;
  };
  const Row rows[] = {
      {Logic::NP, "~[]false", true},
      {Logic::NP4, "~[]false", true},
      {Logic::ND, "~([]p & []~p)", true},
      {Logic::ND4, "~([]p & []~p)", true},
      {Logic::N4, "[]p -> [][]p", true},
      {Logic::NP4, "[]p -> [][]p", true},
      {Logic::ND4, "[]p -> [][]p", true},
      {Logic::ND, "~[](p & ~p)", true},
      {Logic::N, "~[]false", false},
      {Logic::N, "[]p -> [][]p", false},
      {Logic::NP, "~([]p & []~p)", false},
      {Logic::NP4, "~([]p & []~p)", false},
      {Logic::ND4, "[]~~p <-> []p", false},
  };
  for (const Row& r : rows) {
    CAPTURE(logicName(r.l));
    CAPTURE(r.f);
    Prover p(r.l);
    Verdict v = p.decide(parse(r.f));
    CHECK(v.provable == r.provable);
    if (v.provable) {
      REQUIRE(v.certificate);
      CHECK(verifyCertificate(r.l, *v.certificate));
    } else {
      REQUIRE(v.model);
      CHECK(verifyCountermodel(r.l, *v.model, v.world, parse(r.f)));
    }
  }
}

TEST_CASE("canonical model satisfies the construction claims") {
  for (const char* text : {"~[]false", "[]p -> [][]p", "~([]p & []~p)",
                           "[]~~p <-> []p", "[]p | ~[]p -> p"}) {
    Formula a = parse(text);
    for (Logic l : {Logic::N, Logic::ND, Logic::ND4}) {
      CAPTURE(text);
      CAPTURE(logicName(l));
      Prover p(l);
      CanonicalModel cm = p.buildCanonicalModel(a);
      ClosureSet cl = overlineClosure(a);
      // truth lemma
      for (std::size_t x = 0; x < cm.memberSets.size(); ++x)
        for (const Formula& b : cl.members)
          CHECK(forces(cm.model, static_cast<WorldId>(x), b) ==
                (cm.memberSets[x].count(b) > 0));
      // pre-repair frame shape
      if (l == Logic::ND)
        CHECK(checkFrameClass(cm.model.frame, FrameClass::nd()).ok);
      if (l == Logic::ND4)
        CHECK(checkFrameClass(cm.model.frame,
                              FrameClass::gammaTransitive(subStar(a)))
                  .ok);
    }
  }
}

TEST_CASE("repair preserves forcing of plain subformulas") {
  for (const char* text : {"[]~~p <-> []p", "[]p -> [][]p"}) {
    Formula a = parse(text);
    Prover p(Logic::ND4);
    CanonicalModel cm = p.buildCanonicalModel(a);
    Model repaired = cm.model;
    repaired.frame = repairTransitive(cm.model.frame, a);
    CHECK(checkFrameClass(repaired.frame, FrameClass::transitive()).ok);
    for (WorldId w : cm.model.frame.worlds)
      for (const Formula& b : sub(a))
        CHECK(forces(cm.model, w, b) == forces(repaired, w, b));
  }
}

TEST_CASE("verifyCertificate rejects foreign axioms") {
  Certificate c;
  c.goal = parse("~[]false");
  c.premises.push_back(
      {Certificate::Entry::Kind::Axiom, parse("~[]false"), nullptr});
  CHECK(verifyCertificate(Logic::NP, c));
  CHECK_FALSE(verifyCertificate(Logic::N, c));   // no P axiom in N
  CHECK_FALSE(verifyCertificate(Logic::ND, c));  // nor in ND

  Certificate bad;
  bad.goal = parse("p");
  bad.premises.push_back(
      {Certificate::Entry::Kind::Axiom, parse("~[]false"), nullptr});
  CHECK_FALSE(verifyCertificate(Logic::NP, bad));  // not entailed
}

TEST_CASE("verifyCountermodel rejects a bogus model") {
  FrameSpec f;
  f.worlds = {0};
  f.def = DefaultPolicy::Identity;
  Model m{f, {{0, {"p"}}}};
  CHECK_FALSE(verifyCountermodel(Logic::N, m, 0, parse("p")));  // forced
  CHECK(verifyCountermodel(Logic::N, m, 0, parse("~p")));
  CHECK_FALSE(verifyCountermodel(Logic::N, m, 7, parse("~p")));  // no world
}

TEST_CASE("saturation oracle") {
  CHECK(saturationOracle(Logic::ND, parse("~([]p & []~p)"), 7) ==
        OracleAnswer::Provable);
  CHECK(saturationOracle(Logic::N4, parse("[]p -> [][]p"), 7) ==
        OracleAnswer::Provable);
  CHECK(saturationOracle(Logic::N, parse("[]p -> [][]p"), 7) ==
        OracleAnswer::Unprovable);
  CHECK(saturationOracle(Logic::NP, parse("~[]false"), 7) ==
        OracleAnswer::Provable);
  CHECK(saturationOracle(Logic::N, parse("~[]false"), 7) ==
        OracleAnswer::Unprovable);
  CHECK(saturationOracle(Logic::ND, parse("~[](p & ~p)"), 7) ==
        OracleAnswer::Provable);
}

TEST_CASE("oracle agreement on a small slice") {
  // all 1-variable formulas with <= 5 nodes, all six logics
  std::vector<Formula> pool;
  for (unsigned len = 1; len <= 6; ++len)
    for (const Formula& f : formulasOfSerLength(len, {"p"})) pool.push_back(f);
  for (Logic l : {Logic::N, Logic::NP, Logic::ND, Logic::N4, Logic::NP4,
                  Logic::ND4}) {
    Prover p(l);
    for (const Formula& f : pool) {
      CAPTURE(logicName(l));
      CAPTURE(f.text());
      Verdict v = p.decide(f);
      OracleAnswer o = saturationOracle(l, f, 7);
      REQUIRE(o != OracleAnswer::Unknown);
      CHECK(v.provable == (o == OracleAnswer::Provable));
    }
  }
}

TEST_CASE("hierarchy monotonicity") {
  std::vector<Formula> pool;
  for (unsigned len = 1; len <= 5; ++len)
    for (const Formula& f : formulasOfSerLength(len, {"p"})) pool.push_back(f);
  Prover n(Logic::N), np(Logic::NP), nd(Logic::ND), n4(Logic::N4),
      np4(Logic::NP4), nd4(Logic::ND4);
  for (const Formula& f : pool) {
    CAPTURE(f.text());
    bool inN = n.decide(f).provable;
    bool inNP = np.decide(f).provable;
    bool inND = nd.decide(f).provable;
    if (inN) {
      CHECK(inNP);
      CHECK(inND);
      CHECK(n4.decide(f).provable);
    }
    if (inNP) CHECK(inND);  // NP <= NR <= ND
    if (inNP) CHECK(np4.decide(f).provable);
    if (inND) CHECK(nd4.decide(f).provable);
  }
}

TEST_CASE("verdict json round-trip") {
  Prover nd(Logic::ND);
  Verdict prov = nd.decide(parse("~([]p & []~p)"));
  Verdict back = verdictFromJson(verdictToJson(prov));
  CHECK(back.provable);
  CHECK(back.goal == prov.goal);
  CHECK(verifyCertificate(Logic::ND, *back.certificate));

  Prover n(Logic::N);
  Verdict unprov = n.decide(parse("~[]false"));
  Verdict back2 = verdictFromJson(verdictToJson(unprov));
  CHECK_FALSE(back2.provable);
  CHECK(verifyCountermodel(Logic::N, *back2.model, back2.world, back2.goal));
}
