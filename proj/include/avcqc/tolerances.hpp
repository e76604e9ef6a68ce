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

#include <cstdint>

namespace avcqc {

/// Numerical tolerances and enumeration caps shared by every module.
///
/// Validation errors quote the field that was violated, so overriding a value
/// here (or from the CLI's --tol flags) changes both the check and the report.
struct Tolerances {
  double hermitian = 1e-12;        ///< |m_ij - conj(m_ji)|
  double psd_floor = 1e-10;        ///< eigenvalues in [-psd_floor, 0) are clamped to 0
  double trace = 1e-10;            ///< |tr(rho) - 1|
  double probability_sum = 1e-12;  ///< |sum(p) - 1|
  double povm = 1e-9;              ///< POVM positivity / completeness
  double separation_lower = 1e-7;  ///< set distance at or below: not separable
  double separation_upper = 1e-6;  ///< set distance above: separable
  double case_tie_band = 1e-6;     ///< I(V';V) <= C* + band selects the small-correlation case
};

struct Caps {
  std::uint64_t max_dim = 4096;             ///< d^n for product outputs / ensemble blocks
  std::uint64_t max_enumeration = 1 << 20;  ///< labels enumerated by typicality
  std::uint64_t max_jammer = 1 << 16;       ///< |S|^n per codeword
  std::uint64_t max_functions = 1 << 22;    ///< brute-force jammer functions
};

inline const Tolerances& default_tolerances() {
  static const Tolerances tol{};
  return tol;
}

inline const Caps& default_caps() {
  static const Caps caps{};
  return caps;
}

}  // namespace avcqc
