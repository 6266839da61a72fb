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

#include <doctest.h>

#include <cstdint>
#include <random>

#include "mmdc/hungarian.hpp"
#include "mmdc/oracle.hpp"
#include "test_util.hpp"

using namespace mmdc;
using testutil::mat;
using I64 = std::int64_t;

namespace {

MatrixX<I64> randomMatrix(std::mt19937_64& rng, int n, int costMax) {
  MatrixX<I64> w(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) w(i, j) = static_cast<I64>(rng() % (costMax + 1));
  return w;
}

}  // namespace

TEST_CASE("initialLabeling puts rows at their minima and columns at zero") {
  const auto single = initialLabeling<I64>(mat<I64>({{7}}));
  CHECK(single.rowLabel[0] == 7);
  CHECK(single.colLabel[0] == 0);

  const auto three =
      initialLabeling<I64>(mat<I64>({{4, 1, 3}, {2, 0, 5}, {3, 2, 2}}));
  CHECK(three.rowLabel[0] == 1);
  CHECK(three.rowLabel[1] == 0);
  CHECK(three.rowLabel[2] == 2);
  CHECK((three.colLabel.array() == 0).all());
}

TEST_CASE("initialLabeling is feasible on random matrices") {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 40; ++round) {
    const int n = 1 + static_cast<int>(rng() % 6);
    const auto w = randomMatrix(rng, n, 20);
    CHECK(labelingIsFeasible(initialLabeling(w), w, I64{0}));
  }
}

TEST_CASE("updateLabels with a tight edge already crossing is the identity") {
  const auto w = mat<I64>({{0, 5}, {5, 0}});
  auto l = initialLabeling(w);
  const std::vector<bool> inS = {true, false};
  const std::vector<bool> inT = {false, false};
  const I64 shift = updateLabels(l, inS, inT, w);
  CHECK(shift == 0);
  CHECK(l.rowLabel[0] == 0);
  CHECK(l.colLabel[0] == 0);
}

TEST_CASE("updateLabels shifts by the minimum slack out of the tree") {
  const auto w = mat<I64>({{0, 5}, {5, 0}});
  auto l = initialLabeling(w);
  const std::vector<bool> inS = {true, false};
  const std::vector<bool> inT = {true, false};
  const I64 shift = updateLabels(l, inS, inT, w);
  CHECK(shift == 5);
  CHECK(l.rowLabel[0] == 5);
  CHECK(l.rowLabel[1] == 0);
  CHECK(l.colLabel[0] == -5);
  CHECK(l.colLabel[1] == 0);
  CHECK(labelingIsFeasible(l, w, I64{0}));
}

TEST_CASE("updateLabels keeps feasibility and grows the equality graph") {
  std::mt19937_64 rng(23);
  int updatesChecked = 0;
  for (int round = 0; round < 200; ++round) {
    const int n = 2 + static_cast<int>(rng() % 5);
    const auto w = randomMatrix(rng, n, 9);
    auto l = initialLabeling(w);
    std::vector<bool> inS(n, false), inT(n, false);
    const int sCount = 1 + static_cast<int>(rng() % n);
    for (int k = 0; k < sCount; ++k) inS[rng() % n] = true;
    // T = tight neighborhood of S under l
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        if (inS[i] && w(i, j) - l.rowLabel[i] - l.colLabel[j] == 0) inT[j] = true;
    int tCount = 0;
    for (int j = 0; j < n; ++j) tCount += inT[j];
    if (tCount == n) continue;

    auto before = l;
    const I64 shift = updateLabels(l, inS, inT, w);
    CHECK(shift > 0);  // no tight edge crossed, so the minimum is positive
    CHECK(labelingIsFeasible(l, w, I64{0}));
    bool crossingTight = false;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const bool wasTight =
            w(i, j) - before.rowLabel[i] - before.colLabel[j] == 0;
        const bool nowTight = w(i, j) - l.rowLabel[i] - l.colLabel[j] == 0;
        if (inS[i] && !inT[j] && nowTight) crossingTight = true;
        // tight edges inside SxT and outside both survive the shift
        if (wasTight && (inS[i] == inT[j])) CHECK(nowTight);
      }
    CHECK(crossingTight);
    ++updatesChecked;
  }
  CHECK(updatesChecked > 50);
}

TEST_CASE("updateLabels signals a defect on corrupted labels") {
  const auto w = mat<I64>({{0}});
  Labeling<I64> broken;
  broken.rowLabel = VectorX<I64>::Constant(1, 10);
  broken.colLabel = VectorX<I64>::Zero(1);
  const std::vector<bool> inS = {true};
  const std::vector<bool> inT = {false};
  CHECK_THROWS_AS(updateLabels(broken, inS, inT, w), DefectError);
}

TEST_CASE("solveAssignment on hand-checked matrices") {
  AssignmentOptions<I64> opt;
  opt.checkInvariants = true;

  const auto single = solveAssignment(mat<I64>({{7}}), opt);
  CHECK(single.matching.weight == 7);
  CHECK(single.matching.rowMate[0] == 0);

  const auto diag = solveAssignment(mat<I64>({{0, 1}, {1, 0}}), opt);
  CHECK(diag.matching.weight == 0);
  CHECK(diag.matching.rowMate[0] == 0);
  CHECK(diag.matching.rowMate[1] == 1);

  const auto three =
      solveAssignment(mat<I64>({{4, 1, 3}, {2, 0, 5}, {3, 2, 2}}), opt);
  CHECK(three.matching.weight == 5);
  CHECK(three.matching.rowMate[0] == 1);
  CHECK(three.matching.rowMate[1] == 0);
  CHECK(three.matching.rowMate[2] == 2);
}

TEST_CASE("solveAssignment matches the permutation oracle exactly") {
  std::mt19937_64 rng(37);
  AssignmentOptions<I64> opt;
  opt.checkInvariants = true;
  for (int n = 1; n <= 6; ++n) {
    for (int round = 0; round < 100; ++round) {
      const auto w = randomMatrix(rng, n, 9);
      const auto got = solveAssignment(w, opt);
      const auto want = bruteForceAssignment(w);
      CHECK(got.matching.weight == want.weight);
      CHECK(got.matching.isPerfect());
      CHECK(got.stats.augmentations == n);
      // duality certificate
      CHECK(got.labeling.rowLabel.sum() + got.labeling.colLabel.sum() ==
            got.matching.weight);
    }
  }
}

TEST_CASE("solveAssignment handles negative entries") {
  std::mt19937_64 rng(47);
  AssignmentOptions<I64> opt;
  opt.checkInvariants = true;
  for (int round = 0; round < 50; ++round) {
    const int n = 1 + static_cast<int>(rng() % 5);
    MatrixX<I64> w(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) w(i, j) = static_cast<I64>(rng() % 21) - 10;
    CHECK(solveAssignment(w, opt).matching.weight ==
          bruteForceAssignment(w).weight);
  }
}

TEST_CASE("solveAssignment is deterministic") {
  std::mt19937_64 rng(41);
  const auto w = randomMatrix(rng, 6, 3);  // low range forces many ties
  const auto a = solveAssignment(w);
  const auto b = solveAssignment(w);
  CHECK((a.matching.rowMate.array() == b.matching.rowMate.array()).all());
  CHECK((a.labeling.rowLabel.array() == b.labeling.rowLabel.array()).all());
  CHECK((a.labeling.colLabel.array() == b.labeling.colLabel.array()).all());
  CHECK(a.stats.labelUpdates == b.stats.labelUpdates);
}

TEST_CASE("solveAssignment float mode stays within tolerance of the oracle") {
  std::mt19937_64 rng(43);
  AssignmentOptions<double> opt;
  opt.checkInvariants = true;
  for (int round = 0; round < 60; ++round) {
    const int n = 1 + static_cast<int>(rng() % 5);
    MatrixX<double> w(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        w(i, j) = static_cast<double>(rng() >> 11) * 0x1.0p-53 * 10.0;
    const auto got = solveAssignment(w, opt);
    const auto want = bruteForceAssignment(w);
    CHECK(got.matching.weight ==
          doctest::Approx(want.weight).epsilon(1e-9));
  }
}

TEST_CASE("augment flips a single tight edge onto an empty matching") {
  const auto w = mat<I64>({{2, 3}, {4, 5}});
  Matching<I64> m;
  m.rowMate = IntVector::Constant(2, kFree);
  m.colMate = IntVector::Constant(2, kFree);
  SearchState<I64> st;
  st.root = 0;
  st.lastCol = 1;
  st.inT = {false, true};
  st.parentRow = testutil::vec({kFree, 0});
  augment(m, st, w);
  CHECK(m.rowMate[0] == 1);
  CHECK(m.colMate[1] == 0);
  CHECK(m.weight == 3);
}

TEST_CASE("augment flips a length-three alternating path") {
  const auto w = mat<I64>({{1, 0}, {2, 0}});
  Matching<I64> m;
  m.rowMate = testutil::vec({kFree, 0});
  m.colMate = testutil::vec({1, kFree});
  m.weight = 2;
  SearchState<I64> st;
  st.root = 0;
  st.lastCol = 1;
  st.inT = {true, true};
  st.parentRow = testutil::vec({0, 1});  // col0 reached from row0, col1 from row1
  augment(m, st, w);
  CHECK(m.rowMate[0] == 0);
  CHECK(m.rowMate[1] == 1);
  CHECK(m.colMate[0] == 0);
  CHECK(m.colMate[1] == 1);
  CHECK(m.weight == 1);
}

TEST_CASE("augment rejects a non-free terminal column") {
  const auto w = mat<I64>({{1, 0}, {2, 0}});
  Matching<I64> m;
  m.rowMate = testutil::vec({kFree, 0});
  m.colMate = testutil::vec({1, kFree});
  SearchState<I64> st;
  st.root = 0;
  st.lastCol = 0;  // column 0 is matched
  st.inT = {true, false};
  st.parentRow = testutil::vec({0, kFree});
  CHECK_THROWS_AS(augment(m, st, w), DefectError);
}
