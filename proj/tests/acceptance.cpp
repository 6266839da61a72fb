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
// Acceptance suite: one pass/fail line per criterion. Criteria 7-9 drive
// the command-line binary named by the MMDC_CLI environment variable.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mmdc/gadget.hpp"
#include "mmdc/hungarian.hpp"
#include "mmdc/instance.hpp"
#include "mmdc/io.hpp"
#include "mmdc/oracle.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using namespace mmdc;
using I64 = std::int64_t;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double secondsSince(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(3);
  out << std::fixed << v;
  return out.str();
}

// ---------------------------------------------------------------------------
// Criterion 1: assignment solver equals the permutation oracle exactly on
// 1000 random integer matrices for every n in 1..7, in under two minutes.

Outcome criterion1() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(424242);
  long long mismatches = 0;
  for (int n = 1; n <= 7; ++n) {
    for (int round = 0; round < 1000; ++round) {
      MatrixX<I64> w(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) w(i, j) = static_cast<I64>(rng() % 10);
      if (solveAssignment(w).matching.weight != bruteForceAssignment(w).weight)
        ++mismatches;
    }
  }
  const double sec = secondsSince(start);
  Outcome out;
  out.pass = mismatches == 0 && sec < 120.0;
  out.detail = "7000 matrices, " + std::to_string(mismatches) +
               " mismatches, " + fmt(sec) + "s (limit 120s)";
  return out;
}

// ---------------------------------------------------------------------------
// One shared sweep feeds criteria 2-6: every instance with s,t <= 2,
// bounds <= 2, costs in {0,1,2} (exhaustive), plus 500 random feasible
// instances with s,t <= 3, bounds <= 3, costs in [0,9]. Solves run with
// invariant checking enabled throughout.

struct SweepResults {
  bool ran = false;
  long long instances = 0;
  long long feasible = 0;
  long long randomFeasible = 0;
  long long costMismatches = 0;        // criterion 2
  long long verdictDisagreements = 0;  // criterion 3
  long long invariantViolations = 0;   // criterion 4
  long long accountingMismatches = 0;  // criterion 5
  long long verifyFailures = 0;        // criterion 6
  long long duplicatePairs = 0;        // criterion 6
  long long labelUpdates = 0;
  double seconds = 0;
  std::string firstIssue;
};

void noteIssue(SweepResults& r, const std::string& what) {
  if (r.firstIssue.empty()) r.firstIssue = what;
}

bool checkOneInstance(const MmdcInstance<I64>& inst, SweepResults& r) {
  ++r.instances;
  const auto want = bruteForceMmdc(inst);
  if (validate(inst).feasible != want.has_value()) {
    ++r.verdictDisagreements;
    noteIssue(r, "validate verdict disagrees with the oracle");
  }
  if (!want) return false;
  ++r.feasible;
  try {
    const auto g = buildGadget(normalize(inst));
    AssignmentOptions<I64> opt;
    opt.checkInvariants = true;
    const auto res = solveAssignment(g.weight, opt);
    r.labelUpdates += res.stats.labelUpdates;
    const auto sol = extractSolution(g, res.matching);

    if (sol.cost != want->cost) {
      ++r.costMismatches;
      noteIssue(r, "solver cost " + std::to_string(sol.cost) +
                       " != oracle cost " + std::to_string(want->cost));
    }

    const auto& ni = g.source.instance;
    const I64 mainEdges = static_cast<I64>(sol.pairs.size());
    const I64 closedForm =
        (ni.betaCap.cast<I64>().sum() - mainEdges) * g.gammaPrime +
        (mainEdges - ni.beta.cast<I64>().sum()) * g.gammaDoublePrime +
        (ni.alphaCap.cast<I64>().sum() - mainEdges) * g.gammaPrime;
    if (nonmainWeight(g, res.matching) != closedForm) {
      ++r.accountingMismatches;
      noteIssue(r, "non-main edge sum deviates from the closed form");
    }

    const auto verdict = verifySolution(inst, sol);
    if (!verdict.pass) {
      ++r.verifyFailures;
      noteIssue(r, "verifySolution rejected a solver output: " +
                       verdict.issues.front().detail);
      for (const auto& issue : verdict.issues)
        if (issue.kind == VerifyIssue::Kind::kDuplicatePair) ++r.duplicatePairs;
    }
  } catch (const DefectError& e) {
    ++r.invariantViolations;
    noteIssue(r, std::string("invariant violation: ") + e.what());
  }
  return true;
}

const SweepResults& sweep() {
  static SweepResults r;
  if (r.ran) return r;
  const auto start = std::chrono::steady_clock::now();

  // exhaustive tiny sweep
  for (int s = 1; s <= 2; ++s) {
    for (int t = 1; t <= 2; ++t) {
      const int cells = s * t;
      long long costCombos = 1;
      for (int k = 0; k < cells; ++k) costCombos *= 3;
      testutil::forEachBounds(s, 2, [&](const IntVector& alpha,
                                        const IntVector& alphaCap) {
        testutil::forEachBounds(t, 2, [&](const IntVector& beta,
                                          const IntVector& betaCap) {
          MmdcInstance<I64> inst;
          inst.alpha = alpha;
          inst.alphaCap = alphaCap;
          inst.beta = beta;
          inst.betaCap = betaCap;
          inst.cost.resize(s, t);
          for (long long combo = 0; combo < costCombos; ++combo) {
            long long digits = combo;
            for (int k = 0; k < cells; ++k) {
              inst.cost(k / t, k % t) = digits % 3;
              digits /= 3;
            }
            checkOneInstance(inst, r);
          }
        });
      });
    }
  }

  // random sweep: at least 500 feasible draws
  std::mt19937_64 rng(20240817);
  for (long long attempt = 0; r.randomFeasible < 500 && attempt < 100000;
       ++attempt) {
    const int s = 1 + static_cast<int>(rng() % 3);
    const int t = 1 + static_cast<int>(rng() % 3);
    const auto inst = testutil::randomInstance(rng, s, t, 3, 9);
    if (checkOneInstance(inst, r)) ++r.randomFeasible;
  }

  r.seconds = secondsSince(start);
  r.ran = true;
  return r;
}

Outcome criterion2() {
  const auto& r = sweep();
  Outcome out;
  out.pass = r.costMismatches == 0 && r.invariantViolations == 0 &&
             r.randomFeasible >= 500 && r.seconds < 300.0;
  out.detail = std::to_string(r.feasible) + " feasible of " +
               std::to_string(r.instances) + " instances, " +
               std::to_string(r.costMismatches) + " cost mismatches, " +
               fmt(r.seconds) + "s (limit 300s)";
  if (!out.pass && !r.firstIssue.empty()) out.detail += "; first: " + r.firstIssue;
  return out;
}

Outcome criterion3() {
  const auto& r = sweep();
  Outcome out;
  out.pass = r.verdictDisagreements == 0;
  out.detail = std::to_string(r.verdictDisagreements) +
               " validate/oracle disagreements over " +
               std::to_string(r.instances) + " instances";
  return out;
}

Outcome criterion4() {
  const auto& r = sweep();
  Outcome out;
  out.pass = r.invariantViolations == 0 && r.labelUpdates > 0;
  out.detail = std::to_string(r.invariantViolations) +
               " invariant violations with checks enabled (" +
               std::to_string(r.labelUpdates) + " label updates audited)";
  return out;
}

Outcome criterion5() {
  const auto& r = sweep();
  Outcome out;
  out.pass = r.accountingMismatches == 0;
  out.detail = std::to_string(r.accountingMismatches) +
               " non-main accounting mismatches over " +
               std::to_string(r.feasible) + " solves";
  return out;
}

Outcome criterion6() {
  const auto& r = sweep();
  Outcome out;
  out.pass = r.verifyFailures == 0 && r.duplicatePairs == 0;
  out.detail = std::to_string(r.verifyFailures) + " verification failures, " +
               std::to_string(r.duplicatePairs) + " duplicate pairs over " +
               std::to_string(r.feasible) + " solves";
  return out;
}

// ---------------------------------------------------------------------------
// Criteria 7-9 exercise the command-line binary.

const char* cliPath() { return std::getenv("MMDC_CLI"); }

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("mmdc-acceptance-" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

int runCli(const std::string& args) {
  const std::string cmd = std::string("\"") + cliPath() + "\" " + args;
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome criterion7() {
  Outcome out;
  if (!cliPath()) {
    out.detail = "MMDC_CLI is not set";
    return out;
  }
  TempDir dir;
  const fs::path csv = dir.path / "bench.csv";
  const auto start = std::chrono::steady_clock::now();
  if (runCli("bench --sizes 100,200,400 --reps 7 --seed 5 -o " + csv.string()) !=
      0) {
    out.detail = "bench run failed";
    return out;
  }
  const double benchSec = secondsSince(start);

  // median wall time per measured gadget size
  std::istringstream lines(slurp(csv));
  std::string line;
  std::getline(lines, line);  // header
  std::vector<std::pair<double, std::vector<double>>> groups;  // (n, times)
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string item;
    std::vector<std::string> fields;
    while (std::getline(ss, item, ',')) fields.push_back(item);
    const double n = std::stod(fields[3]);
    const double wallMs = std::stod(fields[5]);
    if (groups.empty() || groups.back().first != n) groups.push_back({n, {}});
    groups.back().second.push_back(wallMs);
  }
  if (groups.size() != 3) {
    out.detail = "expected 3 size groups in the CSV";
    return out;
  }
  std::vector<double> medians;
  for (auto& [n, times] : groups) {
    std::sort(times.begin(), times.end());
    medians.push_back(std::max(times[times.size() / 2], 0.05));
  }
  bool exponentsOk = true;
  std::string expText;
  for (std::size_t k = 1; k < groups.size(); ++k) {
    const double e = std::log(medians[k] / medians[k - 1]) /
                     std::log(groups[k].first / groups[k - 1].first);
    exponentsOk = exponentsOk && e >= 2.0 && e <= 4.0;
    expText += (k > 1 ? ", " : "") + fmt(e);
  }
  const bool underMinute =
      *std::max_element(medians.begin(), medians.end()) < 60000.0;
  out.pass = exponentsOk && underMinute;
  out.detail = "medians " + fmt(medians[0]) + "/" + fmt(medians[1]) + "/" +
               fmt(medians[2]) + " ms, growth exponents " + expText +
               " (need within [2,4]), bench took " + fmt(benchSec) + "s";
  return out;
}

Outcome criterion8() {
  Outcome out;
  if (!cliPath()) {
    out.detail = "MMDC_CLI is not set";
    return out;
  }
  TempDir dir;
  const fs::path inst = dir.path / "inst.json";
  const fs::path s1 = dir.path / "s1.json";
  const fs::path s2 = dir.path / "s2.json";
  if (runCli("gen --s 3 --t 3 --seed 911 -o " + inst.string()) != 0 ||
      runCli("solve " + inst.string() + " -o " + s1.string()) != 0 ||
      runCli("solve " + inst.string() + " -o " + s2.string()) != 0) {
    out.detail = "gen/solve run failed";
    return out;
  }
  auto a = mmdc::io::json::parse(slurp(s1));
  auto b = mmdc::io::json::parse(slurp(s2));
  a.erase("timing");
  b.erase("timing");
  out.pass = a.dump() == b.dump();
  out.detail = out.pass ? "two solves byte-identical modulo the timing block"
                        : "solution files differ beyond the timing block";
  return out;
}

Outcome criterion9() {
  Outcome out;
  if (!cliPath()) {
    out.detail = "MMDC_CLI is not set";
    return out;
  }
  TempDir dir;
  long long solved = 0;
  double worstGap = 0;
  for (int seed = 1; seed <= 200; ++seed) {
    const int s = 1 + seed % 3;
    const int t = 1 + (seed / 3) % 3;
    const fs::path file = dir.path / "eu.json";
    if (runCli("gen --mode euclidean --s " + std::to_string(s) + " --t " +
               std::to_string(t) + " --seed " + std::to_string(seed) + " -o " +
               file.string()) != 0) {
      out.detail = "euclidean gen failed at seed " + std::to_string(seed);
      return out;
    }
    const auto parsed = mmdc::io::readInstanceFile(file.string());
    const auto& inst = std::get<MmdcInstance<double>>(parsed.value);
    const auto sol = solveMmdc(inst);
    const auto want = bruteForceMmdc(inst);
    if (!want) {
      out.detail = "oracle found a generated instance infeasible";
      return out;
    }
    const double gap =
        std::abs(sol.cost - want->cost) / std::max(1.0, std::abs(want->cost));
    worstGap = std::max(worstGap, gap);
    ++solved;
  }
  out.pass = solved == 200 && worstGap <= 1e-6;
  out.detail = std::to_string(solved) + " euclidean instances, worst relative gap " +
               std::to_string(worstGap) + " (limit 1e-6)";
  return out;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"assignment oracle equivalence", criterion1},
      {"mmdc oracle equivalence", criterion2},
      {"feasibility verdict agreement", criterion3},
      {"labeling/slack/duality invariants", criterion4},
      {"non-main weight accounting", criterion5},
      {"degree safety and duplicate-free pairs", criterion6},
      {"cubic scaling of the bench sweep", criterion7},
      {"byte-deterministic solve output", criterion8},
      {"float mode agrees with the oracle", criterion9},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome outcome;
    try {
      outcome = criteria[k].second();
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.detail = std::string("unexpected exception: ") + e.what();
    }
    failures += !outcome.pass;
    std::cout << (outcome.pass ? "[PASS]" : "[FAIL]") << " criterion " << k + 1
              << ": " << criteria[k].first << " (" << outcome.detail << ")\n";
  }
  if (failures)
    std::cout << failures << " criterion(s) failed\n";
  else
    std::cout << "all 9 criteria passed\n";
  return failures;
}
