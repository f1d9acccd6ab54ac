#ifndef NMODAL_SEMANTICS_HPP
#define NMODAL_SEMANTICS_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "nmodal/closure.hpp"

namespace nmodal {

using WorldId = int;
using Relation = std::set<std::pair<WorldId, WorldId>>;

enum class DefaultPolicy { Identity, Total, Empty };

const char* defaultPolicyName(DefaultPolicy p);
DefaultPolicy defaultPolicyFromName(const std::string& name);

/// A finite N-frame: a relation per index formula, with unlisted indices
/// resolved by the default policy.
struct FrameSpec {
  std::vector<WorldId> worlds;  // non-empty, distinct
  DefaultPolicy def = DefaultPolicy::Identity;
  std::map<Formula, Relation, GnLess> explicitRels;

  bool hasWorld(WorldId w) const;
  const Relation* find(const Formula& index) const;
  bool related(const Formula& index, WorldId x, WorldId y) const;
  /// The index's relation as a concrete edge set (default policies are
  /// materialized over `worlds`).
  Relation materialize(const Formula& index) const;
};

struct Model {
  FrameSpec frame;
  std::map<WorldId, std::set<std::string>> valuation;
};

struct FrameClass {
  enum class Tag { N, NP, ND, Serial, Transitive, GammaTransitive };
  Tag tag = Tag::N;
  FormulaSet gamma;  // only for GammaTransitive

  static FrameClass n() { return {Tag::N, {}}; }
  static FrameClass np() { return {Tag::NP, {}}; }
  static FrameClass nd() { return {Tag::ND, {}}; }
  static FrameClass serial() { return {Tag::Serial, {}}; }
  static FrameClass transitive() { return {Tag::Transitive, {}}; }
  static FrameClass gammaTransitive(FormulaSet g) {
    return {Tag::GammaTransitive, std::move(g)};
  }
};

/// Failure evidence: the offending index formula(s) and world tuple.
struct CheckResult {
  bool ok = true;
  std::string reason;
  std::vector<Formula> indices;
  std::vector<WorldId> witnessWorlds;

  explicit operator bool() const { return ok; }
};

bool forces(const Model& m, WorldId w, const Formula& a);

CheckResult checkFrameClass(const FrameSpec& f, const FrameClass& c);

/// The transitivity repair: keeps the relation of index B exactly when
/// []B is in Sub*(a), or B = ¬^k C with k > 0 and []C in Sub(a); every
/// other index collapses to the identity relation.
FrameSpec repairTransitive(const FrameSpec& f, const Formula& a);

FrameSpec randomFrame(const FrameClass& c, std::size_t size,
                      const FormulaSet& indices, std::uint64_t seed);

nlohmann::json frameToJson(const FrameSpec& f);
FrameSpec frameFromJson(const nlohmann::json& j);
nlohmann::json modelToJson(const Model& m);
Model modelFromJson(const nlohmann::json& j);
std::string modelToDot(const Model& m);

}  // namespace nmodal

#endif
