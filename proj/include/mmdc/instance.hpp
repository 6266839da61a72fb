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
// Problem instances for many-to-many matching with demands and capacities
// (MMDC): each element a_i of A must be paired with between alpha[i] and
// alphaCap[i] distinct elements of B, and each b_j with between beta[j] and
// betaCap[j] distinct elements of A, at minimum total pairing cost.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "mmdc/common.hpp"

namespace mmdc {

template <class Scalar>
struct MmdcInstance {
  IntVector alpha;     // per-a demand (minimum matches), size s
  IntVector alphaCap;  // per-a capacity (maximum matches), size s
  IntVector beta;      // per-b demand, size t
  IntVector betaCap;   // per-b capacity, size t
  MatrixX<Scalar> cost;  // s x t, nonnegative finite pairing costs

  int numA() const { return static_cast<int>(cost.rows()); }
  int numB() const { return static_cast<int>(cost.cols()); }
};

struct FeasibilityViolation {
  enum class Kind {
    kBadShape,                  // dimension mismatch or negative bound
    kBadCost,                   // negative or non-finite cost entry
    kDemandExceedsCapacity,     // alpha[i] > alphaCap[i] (or beta side)
    kDemandExceedsPartnerCount, // alpha[i] > t (or beta[j] > s)
    kDemandSumMismatch,         // aggregate demand exceeds aggregate capacity
    kNotRealizable,             // no simple pairing meets all degree bounds
  };
  Kind kind;
  char side;    // 'a', 'b', or '-' when not tied to one side
  int index;    // offending element (0-based), or -1
  std::string detail;
};

struct FeasibilityReport {
  bool feasible = false;
  std::vector<FeasibilityViolation> violations;
};

class InfeasibleError : public std::runtime_error {
 public:
  explicit InfeasibleError(FeasibilityReport report)
      : std::runtime_error(summarize(report)), report_(std::move(report)) {}
  const FeasibilityReport& report() const { return report_; }

 private:
  static std::string summarize(const FeasibilityReport& r) {
    std::string msg = "infeasible instance";
    for (const auto& v : r.violations) msg += "; " + v.detail;
    return msg;
  }
  FeasibilityReport report_;
};

/// Result of normalize(): caps clamped to the vacuous bound and, when the
/// clamped A-side capacity total falls short of the B-side demand total, the
/// two sides swapped so the reduction's balancer set has nonnegative size.
template <class Scalar>
struct NormalizedInstance {
  MmdcInstance<Scalar> instance;
  bool transposed = false;
};

namespace detail {

// Dinic max-flow; graphs here have a handful of nodes plus one arc per
// candidate pair, so no scaling tricks are needed.
class MaxFlow {
 public:
  explicit MaxFlow(int n) : head_(n, -1), level_(n), cursor_(n) {}

  void addEdge(int u, int v, std::int64_t cap) {
    edges_.push_back({v, head_[u], cap});
    head_[u] = static_cast<int>(edges_.size()) - 1;
    edges_.push_back({u, head_[v], 0});
    head_[v] = static_cast<int>(edges_.size()) - 1;
  }

  std::int64_t run(int s, int t) {
    std::int64_t total = 0;
    while (bfs(s, t)) {
      cursor_ = head_;
      while (std::int64_t pushed = dfs(s, t, kInf)) total += pushed;
    }
    return total;
  }

 private:
  static constexpr std::int64_t kInf = std::int64_t{1} << 60;
  struct Edge {
    int to;
    int next;
    std::int64_t cap;
  };

  bool bfs(int s, int t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<int> q;
    level_[s] = 0;
    q.push(s);
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int e = head_[u]; e != -1; e = edges_[e].next) {
        if (edges_[e].cap > 0 && level_[edges_[e].to] < 0) {
          level_[edges_[e].to] = level_[u] + 1;
          q.push(edges_[e].to);
        }
      }
    }
    return level_[t] >= 0;
  }

  std::int64_t dfs(int u, int t, std::int64_t limit) {
    if (u == t || limit == 0) return limit;
    for (int& e = cursor_[u]; e != -1; e = edges_[e].next) {
      Edge& fwd = edges_[e];
      if (fwd.cap > 0 && level_[fwd.to] == level_[u] + 1) {
        const std::int64_t pushed =
            dfs(fwd.to, t, std::min(limit, fwd.cap));
        if (pushed > 0) {
          fwd.cap -= pushed;
          edges_[e ^ 1].cap += pushed;
          return pushed;
        }
      }
    }
    level_[u] = -1;
    return 0;
  }

  std::vector<Edge> edges_;
  std::vector<int> head_;
  std::vector<int> level_;
  std::vector<int> cursor_;
};

// Does a simple bipartite graph exist whose A-side degrees lie in
// [loA, hiA] and B-side degrees in [loB, hiB]?  Decided as a feasible
// circulation: source->a_i with bounds [loA,hiA], a_i->b_j with [0,1],
// b_j->sink with [loB,hiB], plus the usual lower-bound transform.
inline bool degreeIntervalsRealizable(const IntVector& loA,
                                      const IntVector& hiA,
                                      const IntVector& loB,
                                      const IntVector& hiB) {
  const int s = static_cast<int>(loA.size());
  const int t = static_cast<int>(loB.size());
  const int src = 0, snk = s + t + 1, superSrc = s + t + 2, superSnk = s + t + 3;
  MaxFlow flow(s + t + 4);
  std::vector<std::int64_t> excess(s + t + 2, 0);
  auto addBounded = [&](int u, int v, std::int64_t lo, std::int64_t hi) {
    flow.addEdge(u, v, hi - lo);
    excess[v] += lo;
    excess[u] -= lo;
  };
  for (int i = 0; i < s; ++i) {
    if (hiA[i] < loA[i]) return false;
    addBounded(src, 1 + i, loA[i], hiA[i]);
  }
  for (int j = 0; j < t; ++j) {
    if (hiB[j] < loB[j]) return false;
    addBounded(1 + s + j, snk, loB[j], hiB[j]);
  }
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < t; ++j) flow.addEdge(1 + i, 1 + s + j, 1);
  flow.addEdge(snk, src, std::int64_t{1} + std::int64_t{s} * t);
  std::int64_t need = 0;
  for (int v = 0; v < s + t + 2; ++v) {
    if (excess[v] > 0) {
      flow.addEdge(superSrc, v, excess[v]);
      need += excess[v];
    } else if (excess[v] < 0) {
      flow.addEdge(v, superSnk, -excess[v]);
    }
  }
  return flow.run(superSrc, superSnk) == need;
}

}  // namespace detail

/// Feasibility check. Always returns a report; `feasible` is true exactly
/// when `violations` is empty. The itemized conditions (per-element and
/// aggregate) are necessary and give pinpointed diagnostics; the final
/// realizability check is the exact verdict.
template <class Scalar>
FeasibilityReport validate(const MmdcInstance<Scalar>& instance) {
  FeasibilityReport report;
  auto& out = report.violations;
  using Kind = FeasibilityViolation::Kind;

  const int s = instance.numA();
  const int t = instance.numB();
  if (s < 1 || t < 1) {
    out.push_back({Kind::kBadShape, '-', -1, "cost matrix must be at least 1x1"});
  }
  if (instance.alpha.size() != s || instance.alphaCap.size() != s ||
      instance.beta.size() != t || instance.betaCap.size() != t) {
    out.push_back({Kind::kBadShape, '-', -1,
                   "bound vector lengths do not match the cost matrix"});
  }
  for (int i = 0; i < s && out.empty(); ++i) {
    if (instance.alpha[i] < 0 || instance.alphaCap[i] < 0)
      out.push_back({Kind::kBadShape, 'a', i,
                     "negative bound for a[" + std::to_string(i) + "]"});
  }
  for (int j = 0; j < t && out.empty(); ++j) {
    if (instance.beta[j] < 0 || instance.betaCap[j] < 0)
      out.push_back({Kind::kBadShape, 'b', j,
                     "negative bound for b[" + std::to_string(j) + "]"});
  }
  if (!out.empty()) return report;

  for (int i = 0; i < s; ++i) {
    for (int j = 0; j < t; ++j) {
      const Scalar c = instance.cost(i, j);
      bool bad = c < Scalar{0};
      if constexpr (std::is_floating_point_v<Scalar>) bad = bad || !std::isfinite(c);
      if (bad) {
        out.push_back({Kind::kBadCost, '-', -1,
                       "cost(" + std::to_string(i) + "," + std::to_string(j) +
                           ") is negative or not finite"});
        i = s;  // one entry per condition is enough
        break;
      }
    }
  }

  for (int i = 0; i < s; ++i) {
    if (instance.alpha[i] > instance.alphaCap[i])
      out.push_back({Kind::kDemandExceedsCapacity, 'a', i,
                     "demand alpha[" + std::to_string(i) + "]=" +
                         std::to_string(instance.alpha[i]) + " exceeds capacity " +
                         std::to_string(instance.alphaCap[i])});
    if (instance.alpha[i] > t)
      out.push_back({Kind::kDemandExceedsPartnerCount, 'a', i,
                     "demand alpha[" + std::to_string(i) + "]=" +
                         std::to_string(instance.alpha[i]) + " exceeds |B|=" +
                         std::to_string(t)});
  }
  for (int j = 0; j < t; ++j) {
    if (instance.beta[j] > instance.betaCap[j])
      out.push_back({Kind::kDemandExceedsCapacity, 'b', j,
                     "demand beta[" + std::to_string(j) + "]=" +
                         std::to_string(instance.beta[j]) + " exceeds capacity " +
                         std::to_string(instance.betaCap[j])});
    if (instance.beta[j] > s)
      out.push_back({Kind::kDemandExceedsPartnerCount, 'b', j,
                     "demand beta[" + std::to_string(j) + "]=" +
                         std::to_string(instance.beta[j]) + " exceeds |A|=" +
                         std::to_string(s)});
  }

  const IntVector hiA = instance.alphaCap.cwiseMin(t);
  const IntVector hiB = instance.betaCap.cwiseMin(s);
  const std::int64_t sumAlpha = instance.alpha.template cast<std::int64_t>().sum();
  const std::int64_t sumBeta = instance.beta.template cast<std::int64_t>().sum();
  const std::int64_t sumHiA = hiA.template cast<std::int64_t>().sum();
  const std::int64_t sumHiB = hiB.template cast<std::int64_t>().sum();
  if (std::max(sumAlpha, sumBeta) > std::min(sumHiA, sumHiB)) {
    out.push_back({Kind::kDemandSumMismatch, '-', -1,
                   "total demand " + std::to_string(std::max(sumAlpha, sumBeta)) +
                       " exceeds total usable capacity " +
                       std::to_string(std::min(sumHiA, sumHiB))});
  }

  if (out.empty() &&
      !detail::degreeIntervalsRealizable(instance.alpha, hiA, instance.beta, hiB)) {
    out.push_back({Kind::kNotRealizable, '-', -1,
                   "no pairing satisfies all per-element degree bounds"});
  }

  report.feasible = out.empty();
  return report;
}

/// Swaps the roles of A and B.
template <class Scalar>
MmdcInstance<Scalar> transposeInstance(const MmdcInstance<Scalar>& instance) {
  MmdcInstance<Scalar> out;
  out.alpha = instance.beta;
  out.alphaCap = instance.betaCap;
  out.beta = instance.alpha;
  out.betaCap = instance.alphaCap;
  out.cost = instance.cost.transpose();
  return out;
}

/// Clamps capacities to the other side's cardinality (a pair can occur at
/// most once, so anything larger is vacuous) and transposes when needed so
/// that sum(alphaCap) >= sum(beta). Purely mechanical; callers that require
/// feasibility must run validate() first.
template <class Scalar>
NormalizedInstance<Scalar> normalize(const MmdcInstance<Scalar>& instance) {
  MmdcInstance<Scalar> work = instance;
  work.alphaCap = work.alphaCap.cwiseMin(work.numB());
  work.betaCap = work.betaCap.cwiseMin(work.numA());
  const std::int64_t capA = work.alphaCap.template cast<std::int64_t>().sum();
  const std::int64_t demB = work.beta.template cast<std::int64_t>().sum();
  const bool flip = capA < demB;
  if (flip) work = transposeInstance(work);
  return {std::move(work), flip};
}

}  // namespace mmdc
