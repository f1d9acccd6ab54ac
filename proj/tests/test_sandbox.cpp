#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <set>
#include <string>
#include <vector>

#include "nmodal/prover.hpp"
#include "nmodal/sandbox.hpp"

using namespace nmodal;

namespace {

SFormula negDagger(SFormula target) {
  return SFormula::lnot(SFormula::prLit(PrKind::Dagger, std::move(target)));
}

std::vector<SFormula> sampleSentences() {
  const SFormula x = SFormula::atom("x");
  const SFormula y = SFormula::atom("longer_token");
  std::vector<SFormula> out{
      SFormula::bot(),
      x,
      y,
      SFormula::lnot(x),
      SFormula::land(x, y),
      SFormula::lor(SFormula::lnot(x), SFormula::bot()),
      SFormula::imp(x, SFormula::imp(y, x)),
      SFormula::prLit(PrKind::R, x),
      SFormula::prLit(PrKind::A, SFormula::land(x, y)),
      SFormula::prLit(PrKind::Dagger, SFormula::lnot(x)),
      SFormula::lambda(0),
      SFormula::lambda(37),
      SFormula::marker(MarkerKind::AlphaAll, Formula::box(Formula::var("p"))),
      SFormula::marker(MarkerKind::AlphaInst, Formula::var("p"), 3),
      SFormula::marker(MarkerKind::BetaAll, Formula::bottom()),
      SFormula::marker(MarkerKind::BetaInst,
                       Formula::imp(Formula::var("p"), Formula::bottom()), 12),
      SFormula::imp(SFormula::lambda(2),
                    SFormula::prLit(PrKind::Dagger, SFormula::atom("f_p"))),
  };
  return out;
}

// The tail rule, checked formula-by-formula against the unfiltered
// enumeration sequence.
void checkTailWindow(const StagedTrace& tr, const CountermodelLibrary& lib,
                     std::size_t tailStart, std::size_t window) {
  const InterpretationF f;
  REQUIRE(tr.switchStage.has_value());
  REQUIRE(tr.jWorld.has_value());
  CHECK(tr.tailStart == tailStart);
  const CountermodelLibrary::Location loc = lib.locate(*tr.jWorld);
  const Model& m = lib.entry(loc.k).model;
  const std::size_t n = std::min(window, tr.g.size() - tailStart);
  const std::vector<SFormula> xi = tailUniverse(lib, n);
  for (std::size_t t = 0; t < n; ++t) {
    const std::optional<Formula> pre = f.preimage(xi[t]);
    const bool skip = pre && !forces(m, loc.local, Formula::box(*pre));
    if (skip) {
      CHECK(!tr.g[tailStart + t]);
    } else {
      REQUIRE(tr.g[tailStart + t].has_value());
      CHECK(*tr.g[tailStart + t] == xi[t]);
    }
  }
}

}  // namespace

TEST_CASE("sentence formulas print, parse and serialize round-trip") {
  const std::vector<SFormula> batch = sampleSentences();
  std::set<std::string> sers;
  std::set<std::string> texts;
  for (const SFormula& s : batch) {
    CAPTURE(s.text());
    CHECK(parseS(s.text()) == s);
    CHECK(sDeserialize(s.ser()) == s);
    sers.insert(s.ser());
    texts.insert(s.text());
  }
  CHECK(sers.size() == batch.size());
  CHECK(texts.size() == batch.size());

  CHECK(parseS("$x -> $y -> $x") ==
        SFormula::imp(SFormula::atom("x"),
                      SFormula::imp(SFormula::atom("y"), SFormula::atom("x"))));
  CHECK(parseS("~PrD($x) & lam(2)") ==
        SFormula::land(negDagger(SFormula::atom("x")), SFormula::lambda(2)));
  CHECK(parseS("alphaAll([]p)") ==
        SFormula::marker(MarkerKind::AlphaAll, Formula::box(Formula::var("p"))));
  CHECK(parseS("beta(p -> false, 12)") ==
        SFormula::marker(MarkerKind::BetaInst,
                         Formula::imp(Formula::var("p"), Formula::bottom()),
                         12));
  CHECK_THROWS(parseS("lam(x)"));
  CHECK_THROWS(parseS("$x &"));
}

TEST_CASE("star normal form strips negation pairs") {
  const SFormula x = SFormula::atom("x");
  const SFormula n1 = SFormula::lnot(x);
  const SFormula n2 = SFormula::lnot(n1);
  const SFormula n3 = SFormula::lnot(n2);
  CHECK(sStarNormal(x) == x);
  CHECK(sStarNormal(n1) == n1);
  CHECK(sStarNormal(n2) == x);
  CHECK(sStarNormal(n3) == n1);
  CHECK(sStarNormal(SFormula::lnot(n3)) == x);
  const SFormula cmp = SFormula::land(n2, n1);  // no normalization inside
  CHECK(sStarNormal(cmp) == cmp);
}

TEST_CASE("codes order by length then lexicographically") {
  const std::vector<SFormula> batch = sampleSentences();
  const SGnLess less;
  for (const SFormula& a : batch)
    for (const SFormula& b : batch) {
      CHECK(less(a, b) == (sgn(a) < sgn(b)));
      CHECK((sgn(a) == sgn(b)) == (a == b));
    }
  // Codes dominate those of proper subterms.
  const SFormula lit = SFormula::prLit(PrKind::Dagger, batch[3]);
  CHECK(sgn(batch[3]) < sgn(lit));
  CHECK(sgn(lit) < sgn(SFormula::lnot(lit)));
}

TEST_CASE("the interpretation is an injective homomorphism") {
  const InterpretationF f;
  const Formula p = Formula::var("p");
  const Formula q = Formula::var("q");
  const std::vector<Formula> batch{
      Formula::bottom(),
      Formula::top(),
      p,
      q,
      Formula::lnot(p),
      Formula::box(p),
      Formula::box(Formula::box(p)),
      Formula::imp(Formula::box(p), p),
      Formula::land(Formula::box(Formula::lnot(q)), Formula::lor(p, q)),
      Formula::box(Formula::imp(p, Formula::box(q))),
  };
  std::set<std::string> images;
  for (const Formula& a : batch) {
    const SFormula s = f.apply(a);
    CAPTURE(a.text());
    CHECK(f.inImage(s));
    REQUIRE(f.preimage(s).has_value());
    CHECK(*f.preimage(s) == a);
    images.insert(s.ser());
  }
  CHECK(images.size() == batch.size());

  CHECK(f.apply(Formula::box(p)) ==
        SFormula::prLit(PrKind::Dagger, SFormula::atom("f_p")));
  CHECK(f.apply(Formula::top()) == SFormula::atom("0"));

  CHECK(!f.inImage(SFormula::atom("x")));
  CHECK(!f.inImage(SFormula::lambda(1)));
  CHECK(!f.inImage(SFormula::marker(MarkerKind::AlphaAll, p)));
  CHECK(!f.inImage(SFormula::prLit(PrKind::R, SFormula::atom("f_p"))));
  CHECK(!f.inImage(SFormula::prLit(PrKind::Dagger, SFormula::atom("x"))));
}

TEST_CASE("the countermodel library holds verified countermodels in order") {
  for (Logic l : {Logic::ND, Logic::NP4}) {
    CAPTURE(logicName(l));
    const CountermodelLibrary lib = CountermodelLibrary::build(l, 3, {"p"});
    REQUIRE(lib.size() == 3);
    CHECK(lib.logic() == l);

    unsigned long nextBase = 1;
    const GnLess less;
    for (std::size_t k = 1; k <= lib.size(); ++k) {
      const auto& e = lib.entry(k);
      CAPTURE(e.goal.text());
      // blocks are consecutive and disjoint, skipping only 0
      CHECK(e.base == nextBase);
      nextBase += e.model.frame.worlds.size();
      // goals strictly increase in gn order and are genuinely unprovable
      if (k > 1) CHECK(less(lib.entry(k - 1).goal, e.goal));
      CHECK(verifyCountermodel(l, e.model, e.refuting, e.goal));
      // block membership round-trips through locate
      for (std::size_t i = 0; i < e.model.frame.worlds.size(); ++i) {
        const auto loc = lib.locate(e.base + i);
        CHECK(loc.k == k);
        CHECK(loc.local == e.model.frame.worlds[i]);
      }
    }
    CHECK(lib.maxWorld() == nextBase - 1);
    CHECK_THROWS_AS((void)lib.entry(0), LibraryExhausted);
    CHECK_THROWS_AS((void)lib.entry(4), LibraryExhausted);
    CHECK_THROWS_AS((void)lib.locate(0), LibraryExhausted);
    CHECK_THROWS_AS((void)lib.locate(lib.maxWorld() + 1), LibraryExhausted);
  }
}

TEST_CASE("trigger condition: streams without refuted codes never fire") {
  const InterpretationF f;
  std::vector<std::optional<SFormula>> g(20);
  for (std::size_t s = 0; s < 20; ++s)
    g[s] = SFormula::imp(SFormula::atom("x"), SFormula::atom("x"));
  for (std::size_t s = 0; s <= 20; ++s)
    CHECK(!checkPhi(s, g, f).has_value());
}

TEST_CASE("trigger condition: a refuted two-step chain fires") {
  const InterpretationF f;
  const SFormula chi = SFormula::atom("x");
  const SFormula sigma1 = SFormula::prLit(PrKind::Dagger, chi);  // PrD($x)
  const SFormula psi = SFormula::lnot(sigma1);                   // ~PrD($x)

  std::vector<std::optional<SFormula>> g(12);
  g[0] = negDagger(psi);  // ~PrD(~PrD($x))

  // psi has code length 5: stages below that see no witness.
  for (std::size_t s = 0; s <= 4; ++s) CHECK(!checkPhi(s, g, f).has_value());

  const auto w = checkPhi(5, g, f);
  REQUIRE(w.has_value());
  CHECK(w->psi == psi);
  CHECK(w->r == 2);
  REQUIRE(w->iteration.size() == 2);
  CHECK(w->iteration[0] == chi);     // sigma_0: star form is not a PrD code
  CHECK(w->iteration[1] == sigma1);  // sigma_1* = PrD(sigma_0)
  // witness codes strictly increase along the iteration
  CHECK(sgn(w->iteration[0]) < sgn(w->iteration[1]));

  // freshness: once a chain member's star form was emitted, no witness
  std::vector<std::optional<SFormula>> g2 = g;
  g2[1] = chi;
  CHECK(!checkPhi(5, g2, f).has_value());

  // image codes are ignored
  std::vector<std::optional<SFormula>> g3(12);
  g3[0] = negDagger(f.apply(Formula::box(Formula::var("p"))));
  for (std::size_t s = 0; s <= 12; ++s) CHECK(!checkPhi(s, g3, f).has_value());
}

TEST_CASE("avoided worlds: direct route, marker route, inconsistency") {
  const CountermodelLibrary lib = CountermodelLibrary::build(Logic::ND, 3, {"p"});

  SUBCASE("empty prefix") {
    std::vector<std::optional<SFormula>> g(5);
    CHECK(computeJ(0, g, lib).empty());
    CHECK(computeJ(5, g, lib).empty());
  }

  SUBCASE("a refuted lambda atom names its world") {
    std::vector<std::optional<SFormula>> g(6);
    g[2] = SFormula::lnot(SFormula::lambda(3));
    CHECK(computeJ(2, g, lib).empty());
    for (std::size_t s = 3; s <= 6; ++s) CHECK(computeJ(s, g, lib).count(3));
  }

  SUBCASE("marker route through the first library block") {
    const auto& e = lib.entry(1);
    const Formula b = *sub(e.goal).begin();
    const unsigned long j = e.base;
    std::vector<std::optional<SFormula>> g(4);
    g[0] = SFormula::marker(MarkerKind::AlphaAll, b);
    g[1] = SFormula::imp(SFormula::marker(MarkerKind::AlphaInst, b, j),
                         SFormula::lnot(SFormula::lambda(j)));
    CHECK(!computeJ(1, g, lib).count(j));  // implication still missing
    CHECK(computeJ(2, g, lib).count(j));
  }

  SUBCASE("an inconsistent prefix covers every library world") {
    std::vector<std::optional<SFormula>> g(3);
    g[0] = SFormula::atom("x");
    g[1] = SFormula::lnot(SFormula::atom("x"));
    const std::set<unsigned long> j = computeJ(2, g, lib);
    CHECK(j.size() == lib.maxWorld());
    for (unsigned long w = 1; w <= lib.maxWorld(); ++w) CHECK(j.count(w));
  }
}

TEST_CASE("a consistent stream is copied verbatim and never switches") {
  const CountermodelLibrary lib = CountermodelLibrary::build(Logic::ND, 2, {"p"});
  const SFormula x = SFormula::atom("x");
  const SFormula y = SFormula::atom("y");
  const std::vector<SFormula> cycle{
      SFormula::imp(x, x),
      SFormula::lor(x, SFormula::lnot(x)),
      SFormula::imp(SFormula::land(x, y), y),
  };
  const TheoryStream stream{[&](std::size_t s) -> std::optional<SFormula> {
    if (s % 4 == 3) return std::nullopt;  // interleave skips
    return cycle[s % 3];
  }};

  const std::size_t S = 300;
  const StagedTrace tr = runStaged(Logic::ND, stream, lib, S);
  CHECK(!tr.switchStage.has_value());
  CHECK(!tr.phiTrigger.has_value());
  REQUIRE(tr.h.size() == S + 1);
  REQUIRE(tr.g.size() == S);
  for (unsigned long h : tr.h) CHECK(h == 0);
  for (std::size_t s = 0; s < S; ++s) CHECK(tr.g[s] == stream.at(s));

  for (const TraceAssertion& a : assertTraceClaims(tr, Logic::ND)) {
    CAPTURE(a.claim);
    CHECK(a.status != "fail");
  }
}

TEST_CASE("a fired trigger emits the reversed star schedule, then the rest") {
  const CountermodelLibrary lib = CountermodelLibrary::build(Logic::ND, 3, {"p"});
  const SFormula chi = SFormula::atom("x");
  const SFormula sigma1 = SFormula::prLit(PrKind::Dagger, chi);
  const SFormula psi = SFormula::lnot(sigma1);

  const std::size_t S = 120;
  const StagedTrace tr = runStaged(
      Logic::ND, scriptedStream({{0, negDagger(psi)}}), lib, S);

  REQUIRE(tr.switchStage.has_value());
  CHECK(*tr.switchStage == 5);
  REQUIRE(tr.phiTrigger.has_value());
  CHECK(tr.phiTrigger->psi == psi);
  CHECK(tr.phiTrigger->r == 2);
  CHECK(tr.jWorld == 1);
  CHECK(tr.modelIndex == 1);
  for (std::size_t t = 0; t <= 5; ++t) CHECK(tr.h[t] == 0);
  for (std::size_t t = 6; t <= S; ++t) CHECK(tr.h[t] == 1);

  // schedule: flipped star forms in reverse sigma order
  REQUIRE(tr.g[5].has_value());
  CHECK(*tr.g[5] == psi);  // (~sigma_1)* = ~PrD($x)
  REQUIRE(tr.g[6].has_value());
  CHECK(*tr.g[6] == SFormula::lnot(chi));  // (~sigma_0)* = ~$x

  // the refuted code itself was ~PrD-shaped, so its flip follows next
  REQUIRE(tr.g[7].has_value());
  CHECK(*tr.g[7] == sigma1);

  checkTailWindow(tr, lib, 8, 60);

  for (const TraceAssertion& a : assertTraceClaims(tr, Logic::ND)) {
    CAPTURE(a.claim);
    CAPTURE(a.witness);
    CHECK(a.status != "fail");
  }
}

TEST_CASE("a refuted world triggers the filtered tail") {
  for (Logic l : {Logic::ND, Logic::ND4}) {
    CAPTURE(logicName(l));
    const CountermodelLibrary lib = CountermodelLibrary::build(l, 3, {"p"});
    const unsigned long j = lib.entry(2).base;  // world 0 of the second model

    const std::size_t S = 160;
    const StagedTrace tr = runStaged(
        l, scriptedStream({{0, SFormula::lnot(SFormula::lambda(j))}}), lib, S);

    REQUIRE(tr.switchStage.has_value());
    CHECK(*tr.switchStage == 1);
    CHECK(!tr.phiTrigger.has_value());
    CHECK(tr.jWorld == j);
    CHECK(tr.modelIndex == 2);
    CHECK(tr.h[1] == 0);
    CHECK(tr.h[2] == j);
    CHECK(tr.h[S] == j);
    REQUIRE(tr.g[0].has_value());
    CHECK(*tr.g[0] == SFormula::lnot(SFormula::lambda(j)));

    // no refuted codes in the prefix: no Case A block, no extra block
    checkTailWindow(tr, lib, 1, 100);

    for (const TraceAssertion& a : assertTraceClaims(tr, l)) {
      CAPTURE(a.claim);
      CAPTURE(a.witness);
      CHECK(a.status != "fail");
    }
  }
}

TEST_CASE("simplified runs: no trigger search, tail starts immediately") {
  for (Logic l : {Logic::NP, Logic::NP4}) {
    CAPTURE(logicName(l));
    const CountermodelLibrary lib = CountermodelLibrary::build(l, 3, {"p"});

    // a refuted code alone never switches a simplified run
    const SFormula psi = SFormula::lnot(
        SFormula::prLit(PrKind::Dagger, SFormula::atom("x")));
    const StagedTrace quiet =
        runStagedSimple(l, scriptedStream({{0, negDagger(psi)}}), lib, 40);
    CHECK(!quiet.switchStage.has_value());
    for (unsigned long h : quiet.h) CHECK(h == 0);

    const unsigned long j = lib.entry(1).base;
    const std::size_t S = 160;
    const StagedTrace tr = runStagedSimple(
        l, scriptedStream({{0, SFormula::lnot(SFormula::lambda(j))}}), lib, S);
    REQUIRE(tr.switchStage.has_value());
    CHECK(*tr.switchStage == 1);
    CHECK(tr.jWorld == j);
    checkTailWindow(tr, lib, 1, 100);

    // the library models carry a bottom successor everywhere, so the
    // selected world never forces []false and Bot is always filtered out
    for (std::size_t t = 1; t < S; ++t)
      if (tr.g[t]) CHECK(tr.g[t]->conn() != SConn::Bot);

    for (const TraceAssertion& a : assertTraceClaims(tr, l)) {
      CAPTURE(a.claim);
      CAPTURE(a.witness);
      CHECK(a.status != "fail");
    }
  }
}

TEST_CASE("runs that outgrow the library report exhaustion") {
  const CountermodelLibrary lib = CountermodelLibrary::build(Logic::ND, 1, {"p"});
  const unsigned long beyond = lib.maxWorld() + 1;
  CHECK_THROWS_AS(
      (void)runStaged(
          Logic::ND,
          scriptedStream({{0, SFormula::lnot(SFormula::lambda(beyond))}}), lib,
          20),
      LibraryExhausted);
  CHECK_THROWS_AS((void)runStaged(Logic::NP, TheoryStream{}, lib, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)runStagedSimple(Logic::ND, TheoryStream{}, lib, 1),
                  std::invalid_argument);
}

TEST_CASE("witness comparison over a fixed output prefix") {
  const InterpretationF f;
  const SFormula phi = SFormula::atom("x");
  const SFormula nphi = SFormula::lnot(phi);

  StagedTrace tr;
  tr.horizon = 10;
  tr.h.assign(11, 0);
  tr.g.assign(10, std::nullopt);
  tr.g[3] = phi;

  SUBCASE("emission with no earlier refutation") {
    const PrResult r = evalPr(PrfKind::R, phi, tr, 10, f);
    CHECK(r.status == PrStatus::True);
    CHECK(r.witness == 3);
    CHECK(evalPr(PrfKind::Prf, phi, tr, 10, f).status == PrStatus::True);
    CHECK(evalPr(PrfKind::Prf, phi, tr, 3, f).status ==
          PrStatus::FalseAtHorizon);
  }

  SUBCASE("an earlier refutation settles the verdict") {
    tr.g[1] = nphi;
    CHECK(evalPr(PrfKind::R, phi, tr, 10, f).status == PrStatus::SettledFalse);
    // and with only the refutation seen so far, still settled
    CHECK(evalPr(PrfKind::R, phi, tr, 2, f).status == PrStatus::SettledFalse);
  }

  SUBCASE("star-form evaluation ignores double negations") {
    tr.g[5] = nphi;
    const SFormula dn = SFormula::lnot(nphi);
    for (std::size_t h = 0; h <= 10; ++h) {
      const PrResult a = evalPr(PrfKind::A, phi, tr, h, f);
      const PrResult b = evalPr(PrfKind::A, dn, tr, h, f);
      CHECK(a.status == b.status);
      CHECK(a.witness == b.witness);
      const PrResult c = evalPr(PrfKind::A, nphi, tr, h, f);
      const PrResult d =
          evalPr(PrfKind::A, SFormula::lnot(dn), tr, h, f);
      CHECK(c.status == d.status);
    }
  }

  SUBCASE("statuses are monotone in the horizon") {
    tr.g[6] = nphi;
    PrStatus prevR = PrStatus::FalseAtHorizon;
    PrStatus prevA = PrStatus::FalseAtHorizon;
    for (std::size_t h = 0; h <= 10; ++h) {
      const PrStatus r = evalPr(PrfKind::R, phi, tr, h, f).status;
      const PrStatus a = evalPr(PrfKind::A, nphi, tr, h, f).status;
      if (prevR != PrStatus::FalseAtHorizon) CHECK(r == prevR);
      if (prevA != PrStatus::FalseAtHorizon) CHECK(a == prevA);
      prevR = r;
      prevA = a;
    }
  }

  SUBCASE("the combined form dispatches on image membership") {
    const SFormula img = f.apply(Formula::box(Formula::var("p")));
    tr.g[2] = img;
    CHECK(evalPr(PrfKind::Dagger, img, tr, 10, f).status == PrStatus::True);
    // outside the image the star forms decide: ~~x is witnessed by x
    const SFormula dn = SFormula::lnot(nphi);
    CHECK(!f.inImage(dn));
    const PrResult r = evalPr(PrfKind::Dagger, dn, tr, 10, f);
    CHECK(r.status == PrStatus::True);
    CHECK(r.witness == 3);
  }
}

TEST_CASE("scenario files run end to end and serialize") {
  nlohmann::json spec = {
      {"logic", "ND"},
      {"horizon", 60},
      {"library", {{"count", 2}, {"vars", {"p"}}}},
      {"stream", {{"0", "~PrD(~PrD($x))"}}},
  };
  const Scenario sc = scenarioFromJson(spec);
  CHECK(sc.logic == Logic::ND);
  CHECK(sc.horizon == 60);
  CHECK(!sc.simple);
  CHECK(sc.libraryCount == 2);

  const StagedTrace tr = runScenario(sc);
  REQUIRE(tr.switchStage.has_value());
  CHECK(*tr.switchStage == 5);
  REQUIRE(!tr.assertions.empty());
  for (const TraceAssertion& a : tr.assertions) CHECK(a.status != "fail");

  const nlohmann::json out = traceToJson(tr);
  CHECK(out.at("logic") == "ND");
  CHECK(out.at("horizon") == 60);
  CHECK(out.at("switchStage") == 5);
  CHECK(out.at("trigger").at("type") == "phi");
  CHECK(out.at("trigger").at("psi") == "~PrD($x)");
  CHECK(out.at("h").size() == 61);
  REQUIRE(out.at("g").size() == 60);
  CHECK(out.at("g")[0] != "0");
  CHECK(out.at("gText")[1].is_null());
  CHECK(out.at("assertions").size() == tr.assertions.size());

  // simplified runs are the default where the hypothesis set lacks D
  nlohmann::json spec2 = {{"logic", "NP"}, {"horizon", 5}};
  CHECK(scenarioFromJson(spec2).simple);
}
