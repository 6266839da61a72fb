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
// Reduction from MMDC to one minimum-weight perfect matching on a square
// gadget matrix.
//
// Rows (one block family per purpose):
//   demand copies   one per required match of a_i; connect only to a_i's
//                   partner copies, at the real pairing cost;
//   extra copies    one per optional match of a_i above its demand; same
//                   cost edges, plus an escape to a balancer at gammaPrime;
//   quota dummies   one per unit of b_j's capacity above its demand; pair
//                   with a copy of b_j at gammaPrime when that capacity goes
//                   unused, or with a balancer at gammaDoublePrime when it
//                   is used by a real match;
//   filler dummies  one per copy of b_j beyond its capacity; retire those
//                   copies at weight zero.
// Columns:
//   partner copies  one copy of every b_j reserved for each a_i, so a pair
//                   (a_i, b_j) can be picked at most once;
//   balancers       pad the column side so both sides have equal size.
//
// Every pair of vertices not listed above gets a sentinel weight larger
// than any sentinel-free perfect matching, so the complete-matrix solver
// can never prefer a non-edge on a feasible instance.
//
// With gammaDoublePrime = 2 * gammaPrime the total weight of a sentinel-free
// perfect matching is the pairing cost plus a constant that does not depend
// on which pairs were chosen or how many, so the matching minimum and the
// MMDC minimum coincide exactly. Any other ratio biases the solver by pair
// count (see the accounting in nonmainWeight).

#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mmdc/common.hpp"
#include "mmdc/hungarian.hpp"
#include "mmdc/instance.hpp"

namespace mmdc {

enum class VertexKind : std::uint8_t {
  kDemandCopy,   // row: required match slot of an A element
  kExtraCopy,    // row: optional match slot of an A element
  kQuotaDummy,   // row: capacity-above-demand accounting slot of a B element
  kFillerDummy,  // row: zero-weight filler for B copies beyond capacity
  kPartnerCopy,  // column: copy of a B element reserved for one A element
  kBalancer,     // column: side-size equalizer
};

struct VertexRole {
  VertexKind kind;
  int element;  // index of the copied element; kFree for balancers
  int slot;     // copy number; for kPartnerCopy: the A element it is reserved for

  friend bool operator==(const VertexRole&, const VertexRole&) = default;
};

inline bool isMainEdge(const VertexRole& row, const VertexRole& col) {
  return (row.kind == VertexKind::kDemandCopy ||
          row.kind == VertexKind::kExtraCopy) &&
         col.kind == VertexKind::kPartnerCopy;
}

inline bool gadgetEdgeAllowed(const VertexRole& row, const VertexRole& col) {
  switch (row.kind) {
    case VertexKind::kDemandCopy:
      return col.kind == VertexKind::kPartnerCopy && col.slot == row.element;
    case VertexKind::kExtraCopy:
      return (col.kind == VertexKind::kPartnerCopy && col.slot == row.element) ||
             col.kind == VertexKind::kBalancer;
    case VertexKind::kQuotaDummy:
      return (col.kind == VertexKind::kPartnerCopy &&
              col.element == row.element) ||
             col.kind == VertexKind::kBalancer;
    case VertexKind::kFillerDummy:
      return col.kind == VertexKind::kPartnerCopy && col.element == row.element;
    default:
      return false;
  }
}

template <class Scalar>
Scalar gadgetEdgeWeight(const VertexRole& row, const VertexRole& col,
                        const MatrixX<Scalar>& cost, Scalar gammaPrime,
                        Scalar gammaDoublePrime, Scalar forbidden) {
  if (!gadgetEdgeAllowed(row, col)) return forbidden;
  if (isMainEdge(row, col)) return cost(row.element, col.element);
  if (row.kind == VertexKind::kFillerDummy) return Scalar{0};
  if (row.kind == VertexKind::kQuotaDummy &&
      col.kind == VertexKind::kBalancer)
    return gammaDoublePrime;
  return gammaPrime;  // extra copy or quota dummy escaping sideways
}

template <class Scalar>
struct GadgetGraph {
  CostMatrix<Scalar> weight;  // N x N, sentinel on non-edges
  std::vector<VertexRole> rowRole, colRole;
  Scalar gamma{};             // largest real pairing cost
  Scalar gammaPrime{};        // gamma + 1
  Scalar gammaDoublePrime{};  // 2 * gammaPrime
  Scalar forbidden{};         // N * gammaDoublePrime + 1
  NormalizedInstance<Scalar> source;

  int size() const { return static_cast<int>(weight.rows()); }
};

/// Operational ceiling on the gadget side length (the weight matrix is
/// dense, N^2 entries).
inline constexpr std::int64_t kMaxGadgetSize = 4000;

namespace detail {

inline std::pair<std::vector<VertexRole>, std::vector<VertexRole>>
layoutGadgetRoles(const IntVector& alpha, const IntVector& alphaCap,
                  const IntVector& beta, const IntVector& betaCap) {
  const int s = static_cast<int>(alpha.size());
  const int t = static_cast<int>(beta.size());
  std::vector<VertexRole> rows, cols;
  for (int i = 0; i < s; ++i)
    for (int k = 0; k < alpha[i]; ++k)
      rows.push_back({VertexKind::kDemandCopy, i, k});
  for (int i = 0; i < s; ++i)
    for (int k = 0; k < alphaCap[i] - alpha[i]; ++k)
      rows.push_back({VertexKind::kExtraCopy, i, k});
  for (int j = 0; j < t; ++j)
    for (int k = 0; k < betaCap[j] - beta[j]; ++k)
      rows.push_back({VertexKind::kQuotaDummy, j, k});
  for (int j = 0; j < t; ++j)
    for (int k = 0; k < s - betaCap[j]; ++k)
      rows.push_back({VertexKind::kFillerDummy, j, k});
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < t; ++j)
      cols.push_back({VertexKind::kPartnerCopy, j, i});
  const std::int64_t balancers = alphaCap.cast<std::int64_t>().sum() -
                                 beta.cast<std::int64_t>().sum();
  for (int k = 0; k < balancers; ++k)
    cols.push_back({VertexKind::kBalancer, kFree, k});
  return {std::move(rows), std::move(cols)};
}

}  // namespace detail

/// Builds the gadget for a normalized instance. Rejects inputs whose caps
/// are not clamped or whose balancer count would be negative.
template <class Scalar>
GadgetGraph<Scalar> buildGadget(const NormalizedInstance<Scalar>& norm) {
  const MmdcInstance<Scalar>& inst = norm.instance;
  const int s = inst.numA();
  const int t = inst.numB();
  if (s < 1 || t < 1 || inst.alpha.size() != s || inst.alphaCap.size() != s ||
      inst.beta.size() != t || inst.betaCap.size() != t)
    throw std::invalid_argument("buildGadget: malformed instance");
  for (int i = 0; i < s; ++i)
    if (inst.alpha[i] < 0 || inst.alpha[i] > inst.alphaCap[i] ||
        inst.alphaCap[i] > t)
      throw std::invalid_argument("buildGadget: A-side bounds not normalized");
  for (int j = 0; j < t; ++j)
    if (inst.beta[j] < 0 || inst.beta[j] > inst.betaCap[j] ||
        inst.betaCap[j] > s)
      throw std::invalid_argument("buildGadget: B-side bounds not normalized");

  const std::int64_t balancers = inst.alphaCap.template cast<std::int64_t>().sum() -
                                 inst.beta.template cast<std::int64_t>().sum();
  if (balancers < 0)
    throw std::invalid_argument(
        "buildGadget: capacity total below partner demand total (not normalized)");
  const std::int64_t n = static_cast<std::int64_t>(s) * t + balancers;
  if (n > kMaxGadgetSize)
    throw std::invalid_argument("buildGadget: gadget size " + std::to_string(n) +
                                " exceeds the supported maximum " +
                                std::to_string(kMaxGadgetSize));

  GadgetGraph<Scalar> g;
  g.source = norm;
  g.gamma = inst.cost.maxCoeff();
  g.gammaPrime = g.gamma + Scalar{1};
  g.gammaDoublePrime = Scalar{2} * g.gammaPrime;
  g.forbidden = Scalar(n) * g.gammaDoublePrime + Scalar{1};
  if constexpr (std::is_integral_v<Scalar>) {
    // Dual labels stay within O(n * max weight); keep their sums in range.
    if (g.forbidden > std::numeric_limits<Scalar>::max() / Scalar(4 * n * n))
      throw std::invalid_argument(
          "buildGadget: costs too large for exact integer arithmetic at this size");
  }

  auto [rows, cols] = detail::layoutGadgetRoles(inst.alpha, inst.alphaCap,
                                                inst.beta, inst.betaCap);
  g.rowRole = std::move(rows);
  g.colRole = std::move(cols);
  g.weight.resize(n, n);
  for (std::int64_t r = 0; r < n; ++r)
    for (std::int64_t c = 0; c < n; ++c)
      g.weight(r, c) = gadgetEdgeWeight(g.rowRole[r], g.colRole[c], inst.cost,
                                        g.gammaPrime, g.gammaDoublePrime,
                                        g.forbidden);
  return g;
}

/// Recomputes every structural invariant of a gadget from scratch and
/// returns one message per violation (empty means the gadget is sound).
template <class Scalar>
std::vector<std::string> gadgetProblems(const GadgetGraph<Scalar>& g) {
  std::vector<std::string> problems;
  const MmdcInstance<Scalar>& inst = g.source.instance;
  const int s = inst.numA();
  const int t = inst.numB();
  const std::int64_t balancers = inst.alphaCap.template cast<std::int64_t>().sum() -
                                 inst.beta.template cast<std::int64_t>().sum();
  if (balancers < 0) problems.push_back("negative balancer count");
  const std::int64_t n = static_cast<std::int64_t>(s) * t + balancers;
  if (g.weight.rows() != g.weight.cols())
    problems.push_back("weight matrix is not square");
  if (g.weight.rows() != n)
    problems.push_back("side size " + std::to_string(g.weight.rows()) +
                       " does not match s*t + sum(alphaCap) - sum(beta) = " +
                       std::to_string(n));
  if (static_cast<std::int64_t>(g.rowRole.size()) != g.weight.rows() ||
      static_cast<std::int64_t>(g.colRole.size()) != g.weight.cols())
    problems.push_back("role table lengths do not match the matrix");
  if (!problems.empty()) return problems;

  auto [rows, cols] = detail::layoutGadgetRoles(inst.alpha, inst.alphaCap,
                                                inst.beta, inst.betaCap);
  if (g.rowRole != rows) problems.push_back("row role layout is out of order");
  if (g.colRole != cols) problems.push_back("column role layout is out of order");

  if (g.gamma != inst.cost.maxCoeff())
    problems.push_back("gamma is not the largest pairing cost");
  if (!(g.gammaPrime > g.gamma))
    problems.push_back("gammaPrime does not exceed gamma");
  if (g.gammaDoublePrime != Scalar{2} * g.gammaPrime)
    problems.push_back("gammaDoublePrime is not exactly twice gammaPrime");
  if (!(g.forbidden > Scalar(n) * g.gammaDoublePrime))
    problems.push_back("sentinel weight does not dominate a full matching");

  for (std::int64_t r = 0; r < n && problems.size() < 8; ++r)
    for (std::int64_t c = 0; c < n; ++c) {
      const Scalar expect =
          gadgetEdgeWeight(g.rowRole[r], g.colRole[c], inst.cost, g.gammaPrime,
                           g.gammaDoublePrime, g.forbidden);
      if (g.weight(r, c) != expect) {
        problems.push_back("weight(" + std::to_string(r) + "," +
                           std::to_string(c) + ") deviates from its role rule");
        break;
      }
    }
  return problems;
}

template <class Scalar>
struct SolutionCertificate {
  std::int64_t gadgetSize = 0;
  Scalar matchingWeight{};  // total weight of the gadget matching
  Scalar mainWeight{};      // weight of the main (real-pair) edges
  Scalar nonmainWeight{};   // weight of everything else
  Scalar gamma{}, gammaPrime{}, gammaDoublePrime{};
};

template <class Scalar>
struct MmdcSolution {
  std::vector<std::pair<int, int>> pairs;  // 0-based (a, b), sorted
  IntVector degreeA, degreeB;
  Scalar cost{0};
  std::optional<SolutionCertificate<Scalar>> certificate;
};

/// Sum of the weights of the matched non-main edges. For any sentinel-free
/// perfect matching with L main edges this equals
///   (sumBetaCap - L) * gammaPrime + (L - sumBeta) * gammaDoublePrime
///   + (sumAlphaCap - L) * gammaPrime
/// by the block accounting of the construction.
template <class Scalar>
Scalar nonmainWeight(const GadgetGraph<Scalar>& g, const Matching<Scalar>& m) {
  if (m.size() != g.size() || !m.isPerfect())
    throw std::invalid_argument("nonmainWeight: matching is not perfect on this gadget");
  Scalar total{0};
  for (int r = 0; r < g.size(); ++r) {
    const int c = m.rowMate[r];
    if (!gadgetEdgeAllowed(g.rowRole[r], g.colRole[c]))
      throw DefectError("nonmainWeight: sentinel edge in the matching");
    if (!isMainEdge(g.rowRole[r], g.colRole[c])) total += g.weight(r, c);
  }
  return total;
}

/// Reads the MMDC off the main edges of a perfect matching on the gadget.
/// Degrees are re-derived and checked against the bounds; any sentinel edge
/// or bound violation is a defect (the pipeline validates feasibility before
/// ever building a gadget).
template <class Scalar>
MmdcSolution<Scalar> extractSolution(const GadgetGraph<Scalar>& g,
                                     const Matching<Scalar>& m) {
  if (m.size() != g.size() || !m.isPerfect())
    throw std::invalid_argument("extractSolution: matching is not perfect on this gadget");
  const MmdcInstance<Scalar>& inst = g.source.instance;
  const int s = inst.numA();
  const int t = inst.numB();

  MmdcSolution<Scalar> sol;
  Scalar nonmain{0};
  for (int r = 0; r < g.size(); ++r) {
    const int c = m.rowMate[r];
    const VertexRole& rr = g.rowRole[r];
    const VertexRole& cc = g.colRole[c];
    if (!gadgetEdgeAllowed(rr, cc))
      throw DefectError("extractSolution: sentinel edge matched (validate/normalize defect)");
    if (isMainEdge(rr, cc))
      sol.pairs.emplace_back(rr.element, cc.element);
    else
      nonmain += g.weight(r, c);
  }
  std::sort(sol.pairs.begin(), sol.pairs.end());
  if (std::adjacent_find(sol.pairs.begin(), sol.pairs.end()) != sol.pairs.end())
    throw DefectError("extractSolution: duplicate pair");

  IntVector degA = IntVector::Zero(s);
  IntVector degB = IntVector::Zero(t);
  Scalar cost{0};
  for (const auto& [i, j] : sol.pairs) {
    ++degA[i];
    ++degB[j];
    cost += inst.cost(i, j);
  }
  for (int i = 0; i < s; ++i)
    if (degA[i] < inst.alpha[i] || degA[i] > inst.alphaCap[i])
      throw DefectError("extractSolution: degree bound broken for a[" +
                        std::to_string(i) + "]");
  for (int j = 0; j < t; ++j)
    if (degB[j] < inst.beta[j] || degB[j] > inst.betaCap[j])
      throw DefectError("extractSolution: degree bound broken for b[" +
                        std::to_string(j) + "]");

  if (g.source.transposed) {
    for (auto& p : sol.pairs) std::swap(p.first, p.second);
    std::sort(sol.pairs.begin(), sol.pairs.end());
    sol.degreeA = std::move(degB);
    sol.degreeB = std::move(degA);
  } else {
    sol.degreeA = std::move(degA);
    sol.degreeB = std::move(degB);
  }
  sol.cost = cost;

  SolutionCertificate<Scalar> cert;
  cert.gadgetSize = g.size();
  cert.matchingWeight = m.weight;
  cert.mainWeight = cost;
  cert.nonmainWeight = nonmain;
  cert.gamma = g.gamma;
  cert.gammaPrime = g.gammaPrime;
  cert.gammaDoublePrime = g.gammaDoublePrime;
  sol.certificate = cert;
  return sol;
}

/// validate -> normalize -> buildGadget -> solveAssignment -> extractSolution.
template <class Scalar>
MmdcSolution<Scalar> solveMmdc(const MmdcInstance<Scalar>& instance,
                               const AssignmentOptions<Scalar>& opt = {}) {
  FeasibilityReport report = validate(instance);
  if (!report.feasible) throw InfeasibleError(std::move(report));
  const GadgetGraph<Scalar> g = buildGadget(normalize(instance));
  const AssignmentResult<Scalar> res = solveAssignment(g.weight, opt);
  return extractSolution(g, res.matching);
}

}  // namespace mmdc
