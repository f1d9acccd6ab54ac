#ifndef NMODAL_SANDBOX_HPP
#define NMODAL_SANDBOX_HPP

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "nmodal/formula.hpp"
#include "nmodal/prover.hpp"
#include "nmodal/semantics.hpp"

namespace nmodal {

// Sentence-level formulas of the staged construction. Provability literals
// and marker atoms are opaque propositional atoms; a PrLit carries the
// formula it codes (so codes are acyclic by construction).
enum class SConn : std::uint8_t { Bot, Atom, Neg, And, Or, Imp, PrLit, Marker };
enum class PrKind : std::uint8_t { R, A, Dagger };
enum class MarkerKind : std::uint8_t {
  Lambda,     // lam(j)            -- "h eventually outputs j"
  AlphaAll,   // alphaAll(B)       -- forall x alpha_B(x), single atom
  AlphaInst,  // alpha(B, j)       -- alpha_B(j)
  BetaAll,    // betaAll(B)
  BetaInst,   // beta(B, j)
};

class SFormula {
 public:
  SFormula() = delete;

  static SFormula bot();
  static SFormula atom(const std::string& token);
  static SFormula lnot(SFormula a);
  static SFormula land(SFormula a, SFormula b);
  static SFormula lor(SFormula a, SFormula b);
  static SFormula imp(SFormula a, SFormula b);
  static SFormula prLit(PrKind k, SFormula target);
  static SFormula lambda(unsigned long j);
  static SFormula marker(MarkerKind k, const Formula& body);            // AlphaAll/BetaAll
  static SFormula marker(MarkerKind k, const Formula& body, unsigned long j);

  SConn conn() const { return node_->conn; }
  const std::string& token() const { return node_->token; }  // Atom only
  SFormula left() const;
  SFormula right() const;
  SFormula child() const { return left(); }
  SFormula target() const { return left(); }  // PrLit: the coded formula
  PrKind prKind() const { return node_->pr; }
  MarkerKind markerKind() const { return node_->marker; }
  const Formula& body() const;     // marker modal parameter B
  unsigned long world() const { return node_->world; }  // Lambda/…Inst

  bool isNeg() const { return conn() == SConn::Neg; }
  bool isPropAtomic() const {
    return conn() == SConn::Atom || conn() == SConn::PrLit ||
           conn() == SConn::Marker;
  }

  bool operator==(const SFormula& o) const { return ser() == o.ser(); }
  bool operator!=(const SFormula& o) const { return !(*this == o); }

  std::string text() const;                 // parseS(text()) == *this
  const std::string& ser() const { return node_->ser; }

 private:
  struct Node {
    SConn conn;
    std::string token;
    PrKind pr = PrKind::R;
    MarkerKind marker = MarkerKind::Lambda;
    std::optional<Formula> mbody;
    unsigned long world = 0;
    std::shared_ptr<const Node> a;
    std::shared_ptr<const Node> b;
    std::string ser;
  };
  explicit SFormula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

SFormula parseS(const std::string& text);
SFormula sDeserialize(const std::string& ser);
GNumber sgn(const SFormula& a);

struct SGnLess {
  bool operator()(const SFormula& a, const SFormula& b) const {
    const std::string& x = a.ser();
    const std::string& y = b.ser();
    if (x.size() != y.size()) return x.size() < y.size();
    return x < y;
  }
};
using SFormulaSet = std::set<SFormula, SGnLess>;

/// Star normal form: strips negation pairs, leaving psi or ~psi.
SFormula sStarNormal(const SFormula& a);

/// The arithmetical interpretation, symbolically: p |-> $f_p, true |-> $0,
/// bottom and connectives homomorphic, []B |-> PrD(f(B)). Injective with a
/// structurally decidable image.
class InterpretationF {
 public:
  SFormula apply(const Formula& a) const;
  bool inImage(const SFormula& s) const { return preimage(s).has_value(); }
  std::optional<Formula> preimage(const SFormula& s) const;
};

/// Deterministic enumeration of theory output: stage -> formula or skip
/// (nullopt encodes the reserved skip-code 0).
struct TheoryStream {
  std::function<std::optional<SFormula>(std::size_t)> at;
};

/// Stream that emits scripted outputs at fixed stages and skips elsewhere.
TheoryStream scriptedStream(std::map<std::size_t, SFormula> script);

struct LibraryExhausted : std::runtime_error {
  explicit LibraryExhausted(const std::string& msg) : std::runtime_error(msg) {}
};

/// Countermodel library <A_k>: unprovable formulas in gn order, each with a
/// verified countermodel, worlds renumbered into consecutive blocks of
/// omega \ {0} (block k starts at 1 + sum of earlier block sizes).
class CountermodelLibrary {
 public:
  struct Entry {
    Formula goal = Formula::bottom();
    Model model;                 // local world ids 0..n-1
    WorldId refuting = 0;        // local world falsifying goal
    unsigned long base = 1;      // global id of local world 0
  };

  static CountermodelLibrary build(Logic l, std::size_t count,
                                   const std::vector<std::string>& vars,
                                   unsigned oracleDepth = 2);

  Logic logic() const { return logic_; }
  std::size_t size() const { return entries_.size(); }
  const Entry& entry(std::size_t k) const;     // k in 1..size()
  unsigned long maxWorld() const;              // largest global id covered

  struct Location {
    std::size_t k;      // model index, from 1
    WorldId local;      // world id inside entry(k).model
  };
  Location locate(unsigned long globalId) const;  // throws LibraryExhausted

 private:
  Logic logic_ = Logic::N;
  std::vector<Entry> entries_;
};

struct PhiWitness {
  SFormula psi;
  std::size_t r = 1;
  std::vector<SFormula> iteration;  // sigma_0 .. sigma_{r-1}
};

struct TraceAssertion {
  std::string claim;
  std::string status;  // "pass" | "fail" | "unsettled"
  std::string witness;
};

struct StagedTrace {
  Logic logic = Logic::ND;
  std::size_t horizon = 0;
  std::vector<unsigned long> h;            // h[0..horizon]
  std::vector<std::optional<SFormula>> g;  // g[0..horizon-1]; nullopt = 0
  std::optional<std::size_t> switchStage;  // s with h(s)=0, h(s+1)!=0
  std::optional<std::size_t> tailStart;    // first stage of the filtered tail
  std::optional<PhiWitness> phiTrigger;
  std::optional<unsigned long> jWorld;     // selected world i = h(s+1)
  std::optional<std::size_t> modelIndex;   // k with i in block k
  std::vector<TraceAssertion> assertions;
};

/// The trigger condition Phi(s) over the prefix {g(0),...,g(s-1)}: a formula
/// psi with ~PrD(psi) already output, psi outside Im(f), whose flipped star
/// form extends backward through coded PrD literals to a starting point that
/// is not itself a PrD literal, none of the chain already output. Returns
/// the gn-least witness.
std::optional<PhiWitness> checkPhi(std::size_t s,
                                   const std::vector<std::optional<SFormula>>& g,
                                   const InterpretationF& f);

/// The set J_s: worlds j provably avoided by h according to tautological
/// consequence over the prefix, via ~lam(j) directly or via the alpha/beta
/// marker route for j in W_k, B in Sub(A_k). Propositionally inconsistent
/// prefixes yield every library-covered world.
std::set<unsigned long> computeJ(std::size_t s,
                                 const std::vector<std::optional<SFormula>>& g,
                                 const CountermodelLibrary& lib);

/// Full staged run (h0/g0) for ND/ND4: Procedure 1 copies the stream while
/// h stays 0; on a Phi trigger, Case A emits the reversed star-iteration
/// schedule; then the X-set, then the filtered enumeration tail.
StagedTrace runStaged(Logic l, const TheoryStream& stream,
                      const CountermodelLibrary& lib, std::size_t S);

/// Simplified run (h1/g1) for NP/NP4: J-triggered only, no Case A, no
/// X-set; the filtered tail starts at the switch stage.
StagedTrace runStagedSimple(Logic l, const TheoryStream& stream,
                            const CountermodelLibrary& lib, std::size_t S);

/// First n formulas of the post-switch enumeration universe for a library,
/// in gn order: the xi sequence before the tail filter is applied.
std::vector<SFormula> tailUniverse(const CountermodelLibrary& lib,
                                   std::size_t n);

enum class PrfKind { Prf, R, A, Dagger };
enum class PrStatus { True, FalseAtHorizon, SettledFalse };

struct PrResult {
  PrStatus status = PrStatus::FalseAtHorizon;
  std::optional<std::size_t> witness;  // least witness stage when True
};

/// Witness-comparison evaluation over g[0..horizon-1]. Prf is plain
/// emission; R compares against the literal negation, A against star forms;
/// Dagger picks R inside Im(f) and A outside.
PrResult evalPr(PrfKind kind, const SFormula& target, const StagedTrace& trace,
                std::size_t horizon, const InterpretationF& f = {});

/// Checks the trace-level claim analogues (switch uniqueness, pre-switch
/// stream fidelity is by construction, the D property, the 4 property on
/// the emitted window for transitive logics, and the switch-stage
/// bookkeeping facts) and returns one report line per claim.
std::vector<TraceAssertion> assertTraceClaims(const StagedTrace& trace, Logic l);

nlohmann::json traceToJson(const StagedTrace& t);

/// Scenario file: {"logic": ..., "horizon": n, "simple": bool?,
///  "library": {"count": k, "vars": [...]}, "stream": {"<stage>": "<text>"}}.
struct Scenario {
  Logic logic = Logic::ND;
  std::size_t horizon = 0;
  bool simple = false;  // forced for NP/NP4
  std::size_t libraryCount = 3;
  std::vector<std::string> libraryVars = {"p"};
  TheoryStream stream;
};
Scenario scenarioFromJson(const nlohmann::json& j);
StagedTrace runScenario(const Scenario& sc, unsigned oracleDepth = 2);

}  // namespace nmodal

#endif
