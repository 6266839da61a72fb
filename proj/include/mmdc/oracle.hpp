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
// Exhaustive reference implementations for desk-scale certification. These
// deliberately share no machinery with the solvers they check.

#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mmdc/common.hpp"
#include "mmdc/gadget.hpp"
#include "mmdc/instance.hpp"

namespace mmdc {

class OracleCapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kOracleMaxAssignmentSize = 9;   // n! permutations
inline constexpr int kOracleMaxPairCells = 20;       // 2^(s*t) subsets

template <class Scalar>
struct OracleAssignment {
  Scalar weight{};
  IntVector rowToCol;  // lexicographically smallest optimal permutation
};

/// Exact minimum over all n! permutations.
template <class Scalar>
OracleAssignment<Scalar> bruteForceAssignment(const CostMatrix<Scalar>& w) {
  const int n = static_cast<int>(w.rows());
  if (n < 1 || w.cols() != n)
    throw std::invalid_argument("bruteForceAssignment: matrix must be square");
  if (n > kOracleMaxAssignmentSize)
    throw OracleCapError("bruteForceAssignment: n > " +
                         std::to_string(kOracleMaxAssignmentSize));
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  OracleAssignment<Scalar> best;
  bool first = true;
  do {
    Scalar total{0};
    for (int i = 0; i < n; ++i) total += w(i, perm[i]);
    if (first || total < best.weight) {
      first = false;
      best.weight = total;
      best.rowToCol = Eigen::Map<const IntVector>(perm.data(), n);
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

template <class Scalar>
struct OracleMmdc {
  Scalar cost{};
  std::vector<std::pair<int, int>> pairs;  // lexicographically smallest optimum
};

/// Exact minimum over all subsets of the s*t candidate pairs that satisfy
/// every demand and capacity; nullopt when no subset qualifies.
template <class Scalar>
std::optional<OracleMmdc<Scalar>> bruteForceMmdc(const MmdcInstance<Scalar>& inst) {
  const int s = inst.numA();
  const int t = inst.numB();
  const int cells = s * t;
  if (cells > kOracleMaxPairCells)
    throw OracleCapError("bruteForceMmdc: s*t > " +
                         std::to_string(kOracleMaxPairCells));

  const std::int64_t demandFloor =
      std::max(inst.alpha.template cast<std::int64_t>().sum(),
               inst.beta.template cast<std::int64_t>().sum());
  std::optional<OracleMmdc<Scalar>> best;
  std::vector<std::pair<int, int>> pairs;
  std::vector<int> degA(s), degB(t);
  for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << cells); ++mask) {
    // demand-sum pruning (skips sets that are too small to qualify)
    if (std::popcount(mask) < demandFloor) continue;
    std::fill(degA.begin(), degA.end(), 0);
    std::fill(degB.begin(), degB.end(), 0);
    pairs.clear();
    Scalar cost{0};
    for (int k = 0; k < cells; ++k) {
      if (!(mask >> k & 1u)) continue;
      const int i = k / t;
      const int j = k % t;
      ++degA[i];
      ++degB[j];
      cost += inst.cost(i, j);
      pairs.emplace_back(i, j);
    }
    bool ok = true;
    for (int i = 0; i < s && ok; ++i)
      ok = degA[i] >= inst.alpha[i] && degA[i] <= inst.alphaCap[i];
    for (int j = 0; j < t && ok; ++j)
      ok = degB[j] >= inst.beta[j] && degB[j] <= inst.betaCap[j];
    if (!ok) continue;
    if (!best || cost < best->cost ||
        (cost == best->cost && pairs < best->pairs)) {
      best = OracleMmdc<Scalar>{cost, pairs};
    }
  }
  return best;
}

struct VerifyIssue {
  enum class Kind {
    kPairOutOfRange,
    kDuplicatePair,
    kDemandViolation,
    kCapacityViolation,
    kDegreeMismatch,
    kCostMismatch,
  };
  Kind kind;
  std::string detail;
};

struct VerifyReport {
  bool pass = false;
  std::vector<VerifyIssue> issues;
};

/// Re-derives degrees and cost from the pair list and checks the solution
/// against the MMDC definition and against its own stated fields.
template <class Scalar>
VerifyReport verifySolution(const MmdcInstance<Scalar>& inst,
                            const MmdcSolution<Scalar>& sol) {
  using Kind = VerifyIssue::Kind;
  VerifyReport report;
  const int s = inst.numA();
  const int t = inst.numB();

  std::vector<std::pair<int, int>> seen;
  IntVector degA = IntVector::Zero(s);
  IntVector degB = IntVector::Zero(t);
  Scalar cost{0};
  for (const auto& [i, j] : sol.pairs) {
    if (i < 0 || i >= s || j < 0 || j >= t) {
      report.issues.push_back({Kind::kPairOutOfRange,
                               "pair (" + std::to_string(i) + "," +
                                   std::to_string(j) + ") is out of range"});
      continue;
    }
    seen.emplace_back(i, j);
    ++degA[i];
    ++degB[j];
    cost += inst.cost(i, j);
  }
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
    report.issues.push_back({Kind::kDuplicatePair, "pair list contains a duplicate"});

  for (int i = 0; i < s; ++i) {
    if (degA[i] < inst.alpha[i])
      report.issues.push_back({Kind::kDemandViolation,
                               "a[" + std::to_string(i) + "] matched " +
                                   std::to_string(degA[i]) + " < demand " +
                                   std::to_string(inst.alpha[i])});
    if (degA[i] > inst.alphaCap[i])
      report.issues.push_back({Kind::kCapacityViolation,
                               "a[" + std::to_string(i) + "] matched " +
                                   std::to_string(degA[i]) + " > capacity " +
                                   std::to_string(inst.alphaCap[i])});
  }
  for (int j = 0; j < t; ++j) {
    if (degB[j] < inst.beta[j])
      report.issues.push_back({Kind::kDemandViolation,
                               "b[" + std::to_string(j) + "] matched " +
                                   std::to_string(degB[j]) + " < demand " +
                                   std::to_string(inst.beta[j])});
    if (degB[j] > inst.betaCap[j])
      report.issues.push_back({Kind::kCapacityViolation,
                               "b[" + std::to_string(j) + "] matched " +
                                   std::to_string(degB[j]) + " > capacity " +
                                   std::to_string(inst.betaCap[j])});
  }

  const bool degreesMatch = sol.degreeA.size() == s && sol.degreeB.size() == t &&
                            (sol.degreeA.array() == degA.array()).all() &&
                            (sol.degreeB.array() == degB.array()).all();
  if (!degreesMatch)
    report.issues.push_back(
        {Kind::kDegreeMismatch, "stated degree vectors disagree with the pairs"});

  Scalar tol{0};
  if constexpr (std::is_floating_point_v<Scalar>)
    tol = defaultEpsilon(inst.cost) * Scalar(sol.pairs.size() + 1);
  const Scalar gap = sol.cost >= cost ? sol.cost - cost : cost - sol.cost;
  if (gap > tol)
    report.issues.push_back({Kind::kCostMismatch,
                             "stated cost differs from the pair-sum cost"});

  report.pass = report.issues.empty();
  return report;
}

}  // namespace mmdc
