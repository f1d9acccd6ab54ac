#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nmodal/closure.hpp"
#include "nmodal/formula.hpp"
#include "nmodal/prover.hpp"
#include "nmodal/sandbox.hpp"
#include "nmodal/semantics.hpp"

using namespace nmodal;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kNegative = 1;
constexpr int kUsage = 2;
constexpr int kIncomplete = 3;

struct Options {
  bool pretty = false;
  std::string out;
  std::string dot;
};

void emit(const json& j, const Options& opt) {
  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!opt.out.empty()) {
    file.open(opt.out);
    if (!file) throw std::runtime_error("cannot open " + opt.out);
    os = &file;
  }
  *os << (opt.pretty ? j.dump(2) : j.dump()) << "\n";
}

void emitDot(const Model& m, const Options& opt) {
  if (opt.dot.empty()) return;
  std::ofstream file(opt.dot);
  if (!file) throw std::runtime_error("cannot open " + opt.dot);
  file << modelToDot(m);
}

json loadJson(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  in >> j;
  return j;
}

std::vector<FrameClass> classesFromName(const std::string& name) {
  if (name == "N") return {FrameClass::n()};
  if (name == "NP") return {FrameClass::np()};
  if (name == "ND") return {FrameClass::nd()};
  if (name == "serial") return {FrameClass::serial()};
  if (name == "transitive") return {FrameClass::transitive()};
  if (name == "N4" || name == "NP4" || name == "ND4")
    return logicFrameClasses(logicFromName(name));
  throw CLI::ValidationError(
      "class", "expected one of N, NP, ND, N4, NP4, ND4, serial, transitive");
}

json textArray(const FormulaSet& fs) {
  json arr = json::array();
  for (const Formula& f : fs) arr.push_back(f.text());
  return arr;
}

json checkResultJson(const CheckResult& r) {
  json j;
  j["ok"] = r.ok;
  if (!r.ok) {
    j["reason"] = r.reason;
    json idx = json::array();
    for (const Formula& f : r.indices) idx.push_back(f.text());
    j["indices"] = idx;
    j["worlds"] = r.witnessWorlds;
  }
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"workbench for necessitation-based modal logics"};
  app.require_subcommand(1);

  Options opt;
  std::string logicName_ = "N";
  unsigned oracleDepth = 2;
  std::uint64_t seed = 0;
  std::optional<std::size_t> horizon;
  app.add_flag("--pretty", opt.pretty, "indent JSON output");
  app.add_option("--out", opt.out, "write output to a file instead of stdout");
  app.add_option("--dot", opt.dot, "write the resulting model as DOT");
  app.add_option("--seed", seed, "seed for randomized helpers");
  app.add_option("--oracle-depth", oracleDepth, "premise-universe depth");
  app.add_option("--horizon", horizon, "override the simulation horizon");

  std::string formulaText;
  std::string fileArg;
  std::string classArg;
  int worldArg = 0;
  std::size_t maxSize = 4;

  CLI::App* decide = app.add_subcommand("decide", "decide provability");
  decide->add_option("--logic", logicName_, "logic name")->required();
  decide->add_option("formula", formulaText, "formula text")->required();

  CLI::App* closure = app.add_subcommand("closure", "closure sets of a formula");
  closure->add_option("--logic", logicName_, "logic name");
  closure->add_option("formula", formulaText, "formula text")->required();

  CLI::App* checkModel =
      app.add_subcommand("check-model", "evaluate a formula in a model");
  checkModel->add_option("model", fileArg, "model file")->required();
  checkModel->add_option("formula", formulaText, "formula text")->required();
  checkModel->add_option("world", worldArg, "world id")->required();

  CLI::App* checkFrame =
      app.add_subcommand("check-frame", "check frame-class membership");
  checkFrame->add_option("frame", fileArg, "frame file")->required();
  checkFrame->add_option("class", classArg, "frame class")->required();

  CLI::App* repair = app.add_subcommand("repair", "transitivity repair");
  repair->add_option("frame", fileArg, "frame file")->required();
  repair->add_option("formula", formulaText, "formula text")->required();

  CLI::App* certify = app.add_subcommand("certify", "re-verify a verdict file");
  certify->add_option("verdict", fileArg, "verdict file")->required();

  CLI::App* simulate = app.add_subcommand("simulate", "run a staged scenario");
  simulate->add_option("scenario", fileArg, "scenario file")->required();

  CLI::App* enumerate =
      app.add_subcommand("enumerate", "stream verdicts in gn order");
  enumerate->add_option("--logic", logicName_, "logic name")->required();
  enumerate->add_option("max-size", maxSize, "maximum code length");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return kUsage;
  }

  try {
    if (*decide) {
      const Logic l = logicFromName(logicName_);
      Prover prover(l, oracleDepth);
      const Verdict v = prover.decide(parse(formulaText));
      emit(verdictToJson(v), opt);
      if (!v.provable && v.model) emitDot(*v.model, opt);
      return v.provable ? kOk : kNegative;
    }

    if (*closure) {
      const Formula a = parse(formulaText);
      const ClosureSet cl = overlineClosure(a);
      json j;
      j["root"] = a.text();
      j["sub"] = textArray(sub(a));
      j["subStar"] = textArray(subStar(a));
      j["closure"] = textArray(cl.members);
      if (closure->count("--logic")) {
        const Logic l = logicFromName(logicName_);
        j["logic"] = logicName(l);
        j["premises"] = textArray(premiseUniverse(l, cl, oracleDepth));
      }
      emit(j, opt);
      return kOk;
    }

    if (*checkModel) {
      const Model m = modelFromJson(loadJson(fileArg));
      const Formula a = parse(formulaText);
      if (!m.frame.hasWorld(worldArg))
        throw std::runtime_error("world " + std::to_string(worldArg) +
                                 " is not in the model");
      const bool holds = forces(m, worldArg, a);
      json j;
      j["formula"] = a.text();
      j["world"] = worldArg;
      j["forces"] = holds;
      emit(j, opt);
      emitDot(m, opt);
      return holds ? kOk : kNegative;
    }

    if (*checkFrame) {
      const FrameSpec f = frameFromJson(loadJson(fileArg));
      json checks = json::array();
      bool ok = true;
      for (const FrameClass& c : classesFromName(classArg)) {
        const CheckResult r = checkFrameClass(f, c);
        ok = ok && r.ok;
        checks.push_back(checkResultJson(r));
      }
      json j;
      j["class"] = classArg;
      j["ok"] = ok;
      j["checks"] = checks;
      emit(j, opt);
      return ok ? kOk : kNegative;
    }

    if (*repair) {
      const FrameSpec f = frameFromJson(loadJson(fileArg));
      const Formula a = parse(formulaText);
      const FrameSpec fixed = repairTransitive(f, a);
      json j;
      j["formula"] = a.text();
      j["frame"] = frameToJson(fixed);
      j["transitive"] = bool(checkFrameClass(fixed, FrameClass::transitive()));
      emit(j, opt);
      return kOk;
    }

    if (*certify) {
      const Verdict v = verdictFromJson(loadJson(fileArg));
      bool valid;
      if (v.provable)
        valid = v.certificate && verifyCertificate(v.logic, *v.certificate);
      else
        valid = v.model && verifyCountermodel(v.logic, *v.model, v.world, v.goal);
      json j;
      j["logic"] = logicName(v.logic);
      j["goal"] = v.goal.text();
      j["provable"] = v.provable;
      j["valid"] = valid;
      emit(j, opt);
      return valid ? kOk : kNegative;
    }

    if (*simulate) {
      Scenario sc = scenarioFromJson(loadJson(fileArg));
      if (horizon) sc.horizon = *horizon;
      const StagedTrace tr = runScenario(sc, oracleDepth);
      emit(traceToJson(tr), opt);
      for (const TraceAssertion& a : tr.assertions)
        if (a.status == "fail") return kNegative;
      return kOk;
    }

    if (*enumerate) {
      const Logic l = logicFromName(logicName_);
      Prover prover(l, oracleDepth);
      std::ostream* os = &std::cout;
      std::ofstream file;
      if (!opt.out.empty()) {
        file.open(opt.out);
        if (!file) throw std::runtime_error("cannot open " + opt.out);
        os = &file;
      }
      for (std::size_t len = 1; len <= maxSize; ++len)
        for (const Formula& a : formulasOfSerLength(len, {"p"})) {
          const Verdict v = prover.decide(a);
          json j;
          j["formula"] = a.text();
          j["gn"] = gn(a).toDecimal();
          j["provable"] = v.provable;
          *os << j.dump() << "\n";
        }
      return kOk;
    }
  } catch (const InternalCompletenessError& e) {
    std::cerr << json{{"error", "internal-completeness"}, {"reason", e.what()}}
              << "\n";
    return kIncomplete;
  } catch (const CLI::ValidationError& e) {
    std::cerr << json{{"error", "usage"}, {"reason", e.what()}} << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "usage"}, {"reason", e.what()}} << "\n";
    return kUsage;
  }
  return kUsage;
}
