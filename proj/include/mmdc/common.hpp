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

#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <type_traits>

namespace mmdc {

template <class Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <class Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using IntVector = Eigen::VectorXi;

/// Sentinel index for an unmatched row/column slot.
inline constexpr int kFree = -1;

/// Raised when an internal invariant is observed broken (a bug, never a
/// property of the input).
class DefectError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Tightness tolerance used when comparing edge weights against dual labels.
/// Integral scalars compare exactly; floating scalars get a scale-aware slop.
template <class Scalar>
Scalar defaultEpsilon(const MatrixX<Scalar>& w) {
  static_assert(std::is_arithmetic_v<Scalar>);
  if constexpr (std::is_integral_v<Scalar>) {
    return Scalar{0};
  } else {
    const Scalar peak = w.size() > 0 ? w.cwiseAbs().maxCoeff() : Scalar{0};
    return Scalar(1e-9) * (Scalar{1} + peak);
  }
}

}  // namespace mmdc
