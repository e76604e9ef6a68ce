// Copyright 2026 The avcqc Authors
//
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

#include <span>
#include <vector>

#include "avcqc/operator_core.hpp"

namespace avcqc {

/// Euclidean projection of `v` onto the probability simplex, in place.
void project_to_simplex(std::span<double> v);

/// Projects each consecutive block of `y` onto its simplex.
void project_to_simplices(std::vector<double>& y, const std::vector<int>& blocks);

struct SimplexQpOptions {
  int max_iterations = 20000;
  double step_tolerance = 1e-14;
  int max_polish_steps = 400;
};

struct SimplexQpResult {
  std::vector<double> y;
  double distance = 0.0;  ///< || M y - t ||
  int iterations = 0;
  bool polished = false;  ///< exact active-set refinement accepted
};

/// Minimizes || M y - t ||_2 over y in a product of probability simplices
/// whose sizes are listed in `blocks` (sum(blocks) == M.cols()).
///
/// Accelerated projected gradient with adaptive restart from `start`,
/// followed by a primal active-set refinement that solves the equality
/// constrained subproblems exactly.
SimplexQpResult minimize_on_simplices(const RealMatrix& m, const RealVector& t,
                                      const std::vector<int>& blocks, std::vector<double> start,
                                      const SimplexQpOptions& opts = {});

/// Distance between the convex hulls of the columns of `a` and of `b`.
/// Returns the distance and fills the hull weights when requested.
double hull_distance(const RealMatrix& a, const RealMatrix& b, std::vector<double>* wa = nullptr,
                     std::vector<double>* wb = nullptr);

}  // namespace avcqc
