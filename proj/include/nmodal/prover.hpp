#ifndef NMODAL_PROVER_HPP
#define NMODAL_PROVER_HPP

#include <memory>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "nmodal/semantics.hpp"

namespace nmodal {

/// A checkable proof object: the goal is a tautological consequence of the
/// listed premises, each of which is an axiom instance of the logic or a
/// necessitation of a smaller certified theorem.
struct Certificate {
  struct Entry {
    enum class Kind { Axiom, Nec };
    Kind kind;
    Formula formula;                    // the premise as used
    std::shared_ptr<Certificate> sub;   // for Nec: certificate of the body
  };
  Formula goal = Formula::bottom();
  std::vector<Entry> premises;
};

struct VerdictStats {
  std::size_t closureSize = 0;
  std::size_t worldCount = 0;
  unsigned oracleDepth = 0;
};

struct Verdict {
  Logic logic = Logic::N;
  Formula goal = Formula::bottom();
  bool provable;
  std::shared_ptr<Certificate> certificate;  // when provable
  std::optional<Model> model;                // when unprovable
  WorldId world = 0;                         // falsifying world
  VerdictStats stats;
};

/// Raised when a verdict fails its own verification: the bounded oracle
/// was too weak (or too strong) for this instance. Never a silent wrong
/// answer.
struct InternalCompletenessError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Frame classes a countermodel for the logic must satisfy.
std::vector<FrameClass> logicFrameClasses(Logic l);

bool verifyCertificate(Logic l, const Certificate& c);
bool verifyCountermodel(Logic l, const Model& m, WorldId w, const Formula& a);

/// Canonical model output: the model plus each world's member set, in
/// enumeration order (world id = index).
struct CanonicalModel {
  Model model;
  std::vector<FormulaSet> memberSets;
  std::vector<WorldId> refuting;  // worlds containing ~goal
};

class Prover {
 public:
  explicit Prover(Logic l, unsigned oracleDepth = 2)
      : logic_(l), depth_(oracleDepth) {}

  Logic logic() const { return logic_; }
  unsigned oracleDepth() const { return depth_; }

  /// Bounded-premise provability oracle. When provable and `out` is
  /// given, a verified certificate is stored there.
  bool lprovable(const Formula& a, std::shared_ptr<Certificate>* out = nullptr);

  /// Maximally consistent subsets of the closure, each determined by a
  /// truth assignment to the closure's star-atomic bases; enumeration is
  /// lexicographic in gn order of the bases.
  std::vector<FormulaSet> maxConsSets(const ClosureSet& cl);

  /// Canonical model over the closure of `a` (pre-repair; Total default).
  CanonicalModel buildCanonicalModel(const Formula& a);

  Verdict decide(const Formula& a);

 private:
  Logic logic_;
  unsigned depth_;
  std::unordered_map<std::string, std::shared_ptr<Certificate>> memo_;
  std::unordered_map<std::string, bool> memoKnown_;
};

enum class OracleAnswer { Provable, Unprovable, Unknown };

/// Independent cross-check: forward proof saturation over the pool of
/// formulas with at most `bound` AST nodes over the variables of `a`,
/// raced against exhaustive two-world model search. Results are cached
/// per (logic, variable set, bound) across calls.
OracleAnswer saturationOracle(Logic l, const Formula& a, unsigned bound);

nlohmann::json certificateToJson(const Certificate& c);
Certificate certificateFromJson(const nlohmann::json& j);
nlohmann::json verdictToJson(const Verdict& v);
Verdict verdictFromJson(const nlohmann::json& j);

}  // namespace nmodal

#endif
