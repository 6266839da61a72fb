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
// Minimum-weight perfect matching on a complete bipartite graph given as a
// square cost matrix, via the Hungarian algorithm with dual labels and slack
// arrays.
//
// Conventions used throughout:
//   * a labeling (rowLabel, colLabel) is feasible when
//     rowLabel[i] + colLabel[j] <= w(i,j) + eps for every entry;
//   * slack(i,j) = w(i,j) - rowLabel[i] - colLabel[j], always >= -eps;
//   * an edge is tight when its slack is <= eps.
// Label updates shift rows in S up and columns in T down by the minimum
// slack crossing from S out of T, so slack outside T decreases.
//
// Ties (several columns at minimum slack, several free rows) are broken by
// lowest index, which makes solves bit-reproducible.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mmdc/common.hpp"

namespace mmdc {

template <class Scalar>
using CostMatrix = MatrixX<Scalar>;

/// Dual values for the rows and columns of a cost matrix.
template <class Scalar>
struct Labeling {
  VectorX<Scalar> rowLabel;
  VectorX<Scalar> colLabel;
};

/// A (possibly partial) matching: mutually inverse mate arrays plus the
/// total weight of the matched edges.
template <class Scalar>
struct Matching {
  IntVector rowMate;  // column matched to each row, or kFree
  IntVector colMate;  // row matched to each column, or kFree
  Scalar weight{0};

  int size() const { return static_cast<int>(rowMate.size()); }
  bool isPerfect() const {
    return rowMate.size() > 0 && (rowMate.array() != kFree).all();
  }
};

/// Alternating-tree bookkeeping for one augmenting search.
template <class Scalar>
struct SearchState {
  int root = kFree;              // free row the tree grows from
  int lastCol = kFree;           // free column that ended the search
  std::vector<bool> inS, inT;    // rows / columns absorbed into the tree
  std::vector<int> rowsInS;      // rows of S in insertion order
  VectorX<Scalar> slack;         // per column j not in T: min over i in S of slack(i,j)
  IntVector slackRow;            // row attaining slack[j]
  IntVector parentRow;           // per column in T: row of the tight edge that reached it
};

struct AssignmentStats {
  std::int64_t labelUpdates = 0;
  std::int64_t augmentations = 0;
};

template <class Scalar>
struct AssignmentOptions {
  std::optional<Scalar> epsilon{};  // tightness tolerance; defaultEpsilon(w) if unset
  bool checkInvariants = false;     // re-verify labeling/slack state as the solve runs
};

template <class Scalar>
struct AssignmentResult {
  Matching<Scalar> matching;
  Labeling<Scalar> labeling;
  AssignmentStats stats;
};

/// All columns at zero, every row at its row minimum. Feasible by
/// construction.
template <class Scalar>
Labeling<Scalar> initialLabeling(const CostMatrix<Scalar>& w) {
  Labeling<Scalar> l;
  l.rowLabel = w.rowwise().minCoeff();
  l.colLabel = VectorX<Scalar>::Zero(w.cols());
  return l;
}

template <class Scalar>
bool labelingIsFeasible(const Labeling<Scalar>& l, const CostMatrix<Scalar>& w,
                        Scalar eps) {
  const MatrixX<Scalar> slack =
      (w.colwise() - l.rowLabel).rowwise() - l.colLabel.transpose();
  return slack.minCoeff() >= -eps;
}

/// Shifts rows in S up and columns in T down by the minimum slack from S to
/// the columns outside T, and returns that minimum. Any tight edge inside
/// S x T or untouched by both stays tight, and a new tight edge appears
/// from S to a column outside T. Requires S nonempty and T != all columns.
/// A negative minimum (beyond eps) means the caller's state is corrupt.
template <class Scalar>
Scalar updateLabels(Labeling<Scalar>& l, const std::vector<bool>& inS,
                    const std::vector<bool>& inT, const CostMatrix<Scalar>& w,
                    Scalar eps) {
  const int n = static_cast<int>(w.rows());
  bool seen = false;
  Scalar shift{};
  for (int i = 0; i < n; ++i) {
    if (!inS[i]) continue;
    for (int j = 0; j < n; ++j) {
      if (inT[j]) continue;
      const Scalar gap = w(i, j) - l.rowLabel[i] - l.colLabel[j];
      if (!seen || gap < shift) {
        shift = gap;
        seen = true;
      }
    }
  }
  if (!seen)
    throw std::invalid_argument(
        "updateLabels: need a row in S and a column outside T");
  if (shift < -eps)
    throw DefectError("updateLabels: negative slack " + std::to_string(shift));
  for (int i = 0; i < n; ++i)
    if (inS[i]) l.rowLabel[i] += shift;
  for (int j = 0; j < n; ++j)
    if (inT[j]) l.colLabel[j] -= shift;
  return shift;
}

template <class Scalar>
Scalar updateLabels(Labeling<Scalar>& l, const std::vector<bool>& inS,
                    const std::vector<bool>& inT, const CostMatrix<Scalar>& w) {
  return updateLabels(l, inS, inT, w, defaultEpsilon(w));
}

/// Flips the recorded alternating path, growing the matching by exactly one
/// edge. The path runs from the free column state.lastCol back through
/// parentRow links to the free root row.
template <class Scalar>
void augment(Matching<Scalar>& m, const SearchState<Scalar>& st,
             const CostMatrix<Scalar>& w) {
  const int n = static_cast<int>(w.rows());
  if (st.lastCol < 0 || st.lastCol >= n)
    throw DefectError("augment: no terminal column recorded");
  if (m.colMate[st.lastCol] != kFree)
    throw DefectError("augment: terminal column is not free");
  int col = st.lastCol;
  for (int steps = 0;; ++steps) {
    if (steps > n) throw DefectError("augment: path longer than n");
    const int row = col >= 0 && st.inT[col] ? st.parentRow[col] : kFree;
    if (row < 0 || row >= n)
      throw DefectError("augment: path is not alternating");
    const int prevCol = m.rowMate[row];
    if (row == st.root && prevCol != kFree)
      throw DefectError("augment: root row is not free");
    if (row != st.root && prevCol == kFree)
      throw DefectError("augment: free row inside the path");
    m.rowMate[row] = col;
    m.colMate[col] = row;
    m.weight += w(row, col) - (prevCol == kFree ? Scalar{0} : w(row, prevCol));
    if (prevCol == kFree) break;  // reached the root
    col = prevCol;
  }
}

namespace detail {

template <class Scalar>
void checkLabelingFeasible(const Labeling<Scalar>& l, const CostMatrix<Scalar>& w,
                           Scalar eps, const char* where) {
  if (!labelingIsFeasible(l, w, eps))
    throw DefectError(std::string("labeling infeasible after ") + where);
}

// slack[j] for j outside T must equal min over i in S of w(i,j)-la[i]-lb[j].
template <class Scalar>
void checkSlackConsistency(const SearchState<Scalar>& st, const Labeling<Scalar>& l,
                           const CostMatrix<Scalar>& w, Scalar eps) {
  const int n = static_cast<int>(w.rows());
  const Scalar tol = eps * Scalar{8};
  for (int j = 0; j < n; ++j) {
    if (st.inT[j]) continue;
    bool seen = false;
    Scalar direct{};
    for (int i : st.rowsInS) {
      const Scalar gap = w(i, j) - l.rowLabel[i] - l.colLabel[j];
      if (!seen || gap < direct) {
        direct = gap;
        seen = true;
      }
    }
    const Scalar diff = st.slack[j] >= direct ? st.slack[j] - direct
                                              : direct - st.slack[j];
    if (!seen || diff > tol)
      throw DefectError("slack[" + std::to_string(j) +
                        "] disagrees with direct recomputation");
    if (st.slack[j] < -tol) throw DefectError("negative slack in search state");
  }
}

template <class Scalar>
void checkMatchedEdgesTight(const Matching<Scalar>& m, const Labeling<Scalar>& l,
                            const CostMatrix<Scalar>& w, Scalar eps) {
  for (int i = 0; i < m.size(); ++i) {
    const int j = m.rowMate[i];
    if (j == kFree) continue;
    const Scalar gap = w(i, j) - l.rowLabel[i] - l.colLabel[j];
    if (gap > eps || gap < -eps)
      throw DefectError("matched edge (" + std::to_string(i) + "," +
                        std::to_string(j) + ") is not tight");
  }
}

}  // namespace detail

/// Minimum-weight perfect matching. Returns the matching, the final dual
/// labels (a Kuhn optimality certificate: every matched edge is tight and
/// the label sum equals the matching weight), and operation counts.
template <class Scalar>
AssignmentResult<Scalar> solveAssignment(const CostMatrix<Scalar>& w,
                                         const AssignmentOptions<Scalar>& opt = {}) {
  static_assert(std::is_arithmetic_v<Scalar>);
  const int n = static_cast<int>(w.rows());
  if (n < 1 || w.cols() != n)
    throw std::invalid_argument("solveAssignment: matrix must be square, n >= 1");
  if constexpr (std::is_floating_point_v<Scalar>) {
    if (!w.allFinite())
      throw std::invalid_argument("solveAssignment: matrix has non-finite entries");
  }
  const Scalar eps = opt.epsilon.value_or(defaultEpsilon(w));

  AssignmentResult<Scalar> res;
  res.labeling = initialLabeling(w);
  Labeling<Scalar>& l = res.labeling;
  Matching<Scalar>& m = res.matching;
  m.rowMate = IntVector::Constant(n, kFree);
  m.colMate = IntVector::Constant(n, kFree);
  m.weight = Scalar{0};

  for (int root = 0; root < n; ++root) {
    SearchState<Scalar> st;
    st.root = root;
    st.inS.assign(n, false);
    st.inT.assign(n, false);
    st.inS[root] = true;
    st.rowsInS = {root};
    st.slack.resize(n);
    st.slackRow = IntVector::Constant(n, root);
    st.parentRow = IntVector::Constant(n, kFree);
    for (int j = 0; j < n; ++j)
      st.slack[j] = w(root, j) - l.rowLabel[root] - l.colLabel[j];

    while (true) {
      int jStar = kFree;
      Scalar best{};
      for (int j = 0; j < n; ++j) {
        if (!st.inT[j] && (jStar == kFree || st.slack[j] < best)) {
          jStar = j;
          best = st.slack[j];
        }
      }
      if (jStar == kFree) throw DefectError("search ran out of columns");
      if (best < -eps) throw DefectError("negative slack during search");

      if (best > eps) {
        // No tight edge leaves the tree: shift labels to create one.
        for (int i : st.rowsInS) l.rowLabel[i] += best;
        for (int j = 0; j < n; ++j) {
          if (st.inT[j])
            l.colLabel[j] -= best;
          else
            st.slack[j] -= best;
        }
        ++res.stats.labelUpdates;
        if (opt.checkInvariants) {
          detail::checkLabelingFeasible(l, w, eps, "updateLabels");
          detail::checkSlackConsistency(st, l, w, eps);
        }
      }

      st.inT[jStar] = true;
      st.parentRow[jStar] = st.slackRow[jStar];
      if (m.colMate[jStar] == kFree) {
        st.lastCol = jStar;
        augment(m, st, w);
        ++res.stats.augmentations;
        break;
      }
      const int grown = m.colMate[jStar];
      st.inS[grown] = true;
      st.rowsInS.push_back(grown);
      for (int j = 0; j < n; ++j) {
        if (st.inT[j]) continue;
        const Scalar gap = w(grown, j) - l.rowLabel[grown] - l.colLabel[j];
        if (gap < st.slack[j]) {
          st.slack[j] = gap;
          st.slackRow[j] = grown;
        }
      }
      if (opt.checkInvariants) detail::checkSlackConsistency(st, l, w, eps);
    }
  }

  // Recompute the weight from the mates so it is an exact sum.
  m.weight = Scalar{0};
  for (int i = 0; i < n; ++i) m.weight += w(i, m.rowMate[i]);

  if (opt.checkInvariants) {
    detail::checkLabelingFeasible(l, w, eps, "termination");
    detail::checkMatchedEdgesTight(m, l, w, eps);
    const Scalar dualSum = l.rowLabel.sum() + l.colLabel.sum();
    const Scalar gap = dualSum >= m.weight ? dualSum - m.weight : m.weight - dualSum;
    if (gap > eps * Scalar(2 * n + 2))
      throw DefectError("dual sum does not certify the matching weight");
  }
  return res;
}

}  // namespace mmdc
