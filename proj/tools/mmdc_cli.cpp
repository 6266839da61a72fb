// Copyright 2026 The mmdc Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Command-line front end: solve, oracle, verify, gen, dump-gadget, bench.
//
// Exit codes: 0 ok, 1 generic failure (including a failed verify),
// 2 unreadable/invalid input, 3 infeasible instance or impossible generator
// parameters, 4 oracle size cap exceeded, 5 internal invariant failure.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "mmdc/gadget.hpp"
#include "mmdc/hungarian.hpp"
#include "mmdc/instance.hpp"
#include "mmdc/io.hpp"
#include "mmdc/oracle.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFail = 1;
constexpr int kExitParse = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitOracleCap = 4;
constexpr int kExitDefect = 5;

using mmdc::io::json;

void emit(const std::string& outPath, const json& doc) {
  const std::string text = doc.dump(2) + "\n";
  if (outPath.empty() || outPath == "-")
    std::cout << text;
  else
    mmdc::io::writeTextFile(outPath, text);
}

double msSince(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - start)
      .count();
}

void printViolations(const mmdc::FeasibilityReport& report) {
  for (const auto& v : report.violations) std::cerr << "  " << v.detail << "\n";
}

struct SolveFlags {
  std::string instancePath;
  std::string outPath = "-";
  double epsilon = -1.0;  // <0: use the scale-aware default
  bool checkOracle = false;
  bool assertInvariants = false;
};

template <class Scalar>
int runSolveTyped(const mmdc::MmdcInstance<Scalar>& inst, const SolveFlags& flags) {
  const mmdc::FeasibilityReport report = mmdc::validate(inst);
  if (!report.feasible) {
    std::cerr << "infeasible instance:\n";
    printViolations(report);
    return kExitInfeasible;
  }
  const auto norm = mmdc::normalize(inst);
  const auto gadget = mmdc::buildGadget(norm);

  mmdc::AssignmentOptions<Scalar> opt;
  opt.checkInvariants = flags.assertInvariants;
  if (flags.epsilon >= 0) {
    if constexpr (std::is_floating_point_v<Scalar>)
      opt.epsilon = static_cast<Scalar>(flags.epsilon);
    else
      std::cerr << "note: --epsilon ignored in exact integer mode\n";
  }
  const Scalar usedEps = opt.epsilon.value_or(mmdc::defaultEpsilon(gadget.weight));

  const auto start = std::chrono::steady_clock::now();
  const auto result = mmdc::solveAssignment(gadget.weight, opt);
  const double solveMs = msSince(start);
  const auto sol = mmdc::extractSolution(gadget, result.matching);

  json doc = mmdc::io::solutionToJson(sol, usedEps, solveMs);
  if (flags.checkOracle) {
    const auto oracle = mmdc::bruteForceMmdc(inst);
    if (!oracle)
      throw mmdc::DefectError("oracle reports infeasible but validate accepted");
    Scalar tol{0};
    if constexpr (std::is_floating_point_v<Scalar>)
      tol = Scalar(1e-6) * std::max(Scalar{1}, oracle->cost);
    const Scalar gap = sol.cost >= oracle->cost ? sol.cost - oracle->cost
                                                : oracle->cost - sol.cost;
    if (gap > tol)
      throw mmdc::DefectError("solver cost disagrees with the oracle");
    doc["oracle"] = {{"cost", oracle->cost}};
  }
  emit(flags.outPath, doc);
  return kExitOk;
}

int runSolve(const SolveFlags& flags) {
  const auto parsed = mmdc::io::readInstanceFile(flags.instancePath);
  return std::visit([&](const auto& inst) { return runSolveTyped(inst, flags); },
                    parsed.value);
}

template <class Scalar>
int runOracleTyped(const mmdc::MmdcInstance<Scalar>& inst, const std::string& outPath,
                   bool checkSolver) {
  const auto oracle = mmdc::bruteForceMmdc(inst);
  if (!oracle) {
    std::cerr << "infeasible instance (exhaustive search found no pairing)\n";
    return kExitInfeasible;
  }
  mmdc::MmdcSolution<Scalar> sol;
  sol.pairs = oracle->pairs;
  sol.cost = oracle->cost;
  sol.degreeA = mmdc::IntVector::Zero(inst.numA());
  sol.degreeB = mmdc::IntVector::Zero(inst.numB());
  for (const auto& [i, j] : sol.pairs) {
    ++sol.degreeA[i];
    ++sol.degreeB[j];
  }
  json doc = mmdc::io::solutionToJson(sol, Scalar{0}, std::nullopt, "exhaustive");
  if (checkSolver) {
    const auto solved = mmdc::solveMmdc(inst);
    Scalar tol{0};
    if constexpr (std::is_floating_point_v<Scalar>)
      tol = Scalar(1e-6) * std::max(Scalar{1}, oracle->cost);
    const Scalar gap = solved.cost >= oracle->cost ? solved.cost - oracle->cost
                                                   : oracle->cost - solved.cost;
    if (gap > tol)
      throw mmdc::DefectError("solver cost disagrees with the oracle");
    doc["solver_cost"] = solved.cost;
  }
  emit(outPath, doc);
  return kExitOk;
}

template <class Scalar>
int runVerifyTyped(const mmdc::MmdcInstance<Scalar>& inst, const json& solDoc) {
  const auto sol =
      mmdc::io::parseSolution<Scalar>(solDoc, inst.numA(), inst.numB());
  const auto report = mmdc::verifySolution(inst, sol);
  if (report.pass) {
    std::cout << "ok: solution satisfies all bounds and its stated cost\n";
    return kExitOk;
  }
  std::cout << "failed: " << report.issues.size() << " issue(s)\n";
  for (const auto& issue : report.issues) std::cout << "  " << issue.detail << "\n";
  return kExitFail;
}

template <class Scalar>
int runDumpTyped(const mmdc::MmdcInstance<Scalar>& inst, const std::string& outPath) {
  const auto report = mmdc::validate(inst);
  if (!report.feasible) {
    std::cerr << "infeasible instance:\n";
    printViolations(report);
    return kExitInfeasible;
  }
  const auto gadget = mmdc::buildGadget(mmdc::normalize(inst));
  emit(outPath, mmdc::io::gadgetToJson(gadget));
  return kExitOk;
}

struct BenchFlags {
  std::vector<int> sizes = {100, 200, 400};
  int reps = 3;
  std::uint64_t seed = 1;
  std::int64_t costLo = 0, costHi = 9;
  std::string outPath = "-";
};

int runBench(const BenchFlags& flags) {
  std::ostringstream csv;
  csv << "size_target,s,t,gadget_n,rep,wall_ms,solve_ms,label_updates,"
         "augmentations,cost\n";
  for (const int target : flags.sizes) {
    const int side = std::max(1, static_cast<int>(std::llround(std::sqrt(
                                  static_cast<double>(target)))));
    mmdc::io::UniformGenParams p;
    p.s = p.t = side;
    p.demandLo = 1;
    p.boundMax = 1;  // unit bounds: gadget side equals s*t
    p.costLo = flags.costLo;
    p.costHi = flags.costHi;
    p.seed = flags.seed + static_cast<std::uint64_t>(target);
    const auto [inst, meta] = mmdc::io::generateUniform(p);
    (void)meta;
    for (int rep = 0; rep < flags.reps; ++rep) {
      const auto wallStart = std::chrono::steady_clock::now();
      const auto gadget = mmdc::buildGadget(mmdc::normalize(inst));
      const auto solveStart = std::chrono::steady_clock::now();
      const auto result = mmdc::solveAssignment(gadget.weight);
      const double solveMs = msSince(solveStart);
      const auto sol = mmdc::extractSolution(gadget, result.matching);
      const double wallMs = msSince(wallStart);
      csv << target << ',' << inst.numA() << ',' << inst.numB() << ','
          << gadget.size() << ',' << rep << ',' << wallMs << ',' << solveMs
          << ',' << result.stats.labelUpdates << ','
          << result.stats.augmentations << ',' << sol.cost << '\n';
    }
  }
  if (flags.outPath.empty() || flags.outPath == "-")
    std::cout << csv.str();
  else
    mmdc::io::writeTextFile(flags.outPath, csv.str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"minimum-cost many-to-many matching with demands and capacities"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(mmdc::io::kSolverName) + " " +
                                        mmdc::io::kSolverVersion);

  SolveFlags solveFlags;
  auto* solveCmd = app.add_subcommand("solve", "solve an instance file");
  solveCmd->add_option("instance", solveFlags.instancePath, "instance JSON file")
      ->required();
  solveCmd->add_option("-o,--output", solveFlags.outPath, "solution path ('-' = stdout)");
  solveCmd->add_option("--epsilon", solveFlags.epsilon,
                       "tightness tolerance for float mode");
  solveCmd->add_flag("--check-oracle", solveFlags.checkOracle,
                     "cross-check the cost against the exhaustive oracle");
  solveCmd->add_flag("--assert-invariants", solveFlags.assertInvariants,
                     "re-verify labeling and slack invariants while solving");

  std::string oraclePath, oracleOut = "-";
  bool oracleCheckSolver = false;
  auto* oracleCmd = app.add_subcommand("oracle", "exhaustive reference solve");
  oracleCmd->add_option("instance", oraclePath, "instance JSON file")->required();
  oracleCmd->add_option("-o,--output", oracleOut, "solution path ('-' = stdout)");
  oracleCmd->add_flag("--check-solver", oracleCheckSolver,
                      "also run the solver and require matching costs");

  std::string verifyInstance, verifySolution;
  auto* verifyCmd = app.add_subcommand("verify", "check a solution file");
  verifyCmd->add_option("instance", verifyInstance, "instance JSON file")->required();
  verifyCmd->add_option("solution", verifySolution, "solution JSON file")->required();

  std::string genMode = "uniform", genOut = "-";
  mmdc::io::UniformGenParams uniformParams;
  mmdc::io::EuclideanGenParams euclideanParams;
  auto* genCmd = app.add_subcommand("gen", "generate a random instance");
  genCmd->add_option("--mode", genMode, "uniform | euclidean")
      ->check(CLI::IsMember({"uniform", "euclidean"}));
  genCmd->add_option("--s", uniformParams.s, "size of A");
  genCmd->add_option("--t", uniformParams.t, "size of B");
  genCmd->add_option("--seed", uniformParams.seed, "generator seed");
  genCmd->add_option("--demand-lo", uniformParams.demandLo, "smallest demand");
  genCmd->add_option("--bound-max", uniformParams.boundMax, "largest capacity");
  genCmd->add_option("--cost-lo", uniformParams.costLo, "smallest cost (uniform)");
  genCmd->add_option("--cost-hi", uniformParams.costHi, "largest cost (uniform)");
  genCmd->add_option("--box-w", euclideanParams.boxWidth, "box width (euclidean)");
  genCmd->add_option("--box-h", euclideanParams.boxHeight, "box height (euclidean)");
  genCmd->add_option("-o,--output", genOut, "instance path ('-' = stdout)");

  std::string dumpPath, dumpOut = "-";
  auto* dumpCmd = app.add_subcommand("dump-gadget", "write the gadget graph");
  dumpCmd->add_option("instance", dumpPath, "instance JSON file")->required();
  dumpCmd->add_option("-o,--output", dumpOut, "dump path ('-' = stdout)");

  BenchFlags benchFlags;
  auto* benchCmd = app.add_subcommand("bench", "timing sweep over gadget sizes");
  benchCmd->add_option("--sizes", benchFlags.sizes, "target gadget sizes")
      ->delimiter(',');
  benchCmd->add_option("--reps", benchFlags.reps, "repetitions per size");
  benchCmd->add_option("--seed", benchFlags.seed, "generator seed");
  benchCmd->add_option("--cost-lo", benchFlags.costLo, "smallest cost");
  benchCmd->add_option("--cost-hi", benchFlags.costHi, "largest cost");
  benchCmd->add_option("-o,--output", benchFlags.outPath, "CSV path ('-' = stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solveCmd->parsed()) return runSolve(solveFlags);
    if (oracleCmd->parsed()) {
      const auto parsed = mmdc::io::readInstanceFile(oraclePath);
      return std::visit(
          [&](const auto& inst) {
            return runOracleTyped(inst, oracleOut, oracleCheckSolver);
          },
          parsed.value);
    }
    if (verifyCmd->parsed()) {
      const auto parsed = mmdc::io::readInstanceFile(verifyInstance);
      const json solDoc = mmdc::io::readJsonFile(verifySolution);
      return std::visit(
          [&](const auto& inst) { return runVerifyTyped(inst, solDoc); },
          parsed.value);
    }
    if (genCmd->parsed()) {
      json doc;
      if (genMode == "euclidean") {
        euclideanParams.s = uniformParams.s;
        euclideanParams.t = uniformParams.t;
        euclideanParams.seed = uniformParams.seed;
        euclideanParams.demandLo = uniformParams.demandLo;
        euclideanParams.boundMax = uniformParams.boundMax;
        const auto [inst, meta] = mmdc::io::generateEuclidean(euclideanParams);
        doc = mmdc::io::instanceToJson(inst, meta);
      } else {
        const auto [inst, meta] = mmdc::io::generateUniform(uniformParams);
        doc = mmdc::io::instanceToJson(inst, meta);
      }
      emit(genOut, doc);
      return kExitOk;
    }
    if (dumpCmd->parsed()) {
      const auto parsed = mmdc::io::readInstanceFile(dumpPath);
      return std::visit(
          [&](const auto& inst) { return runDumpTyped(inst, dumpOut); },
          parsed.value);
    }
    if (benchCmd->parsed()) return runBench(benchFlags);
  } catch (const mmdc::io::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const mmdc::InfeasibleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const mmdc::io::GenerationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const mmdc::OracleCapError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitOracleCap;
  } catch (const mmdc::DefectError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitDefect;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFail;
  }
  return kExitFail;
}
