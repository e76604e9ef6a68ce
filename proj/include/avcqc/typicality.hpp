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

#include <optional>
#include <string>
#include <vector>

#include "avcqc/channel_model.hpp"

namespace avcqc {

/// |N(a|x)/n - p(a)| <= delta/|X| for every letter a (with 1e-12 slack for
/// rounding in the comparison).
bool is_typical(const Sequence& x, const std::vector<double>& p, double delta);

/// Exact enumeration in lexicographic order. Throws EnumerationOverflow when
/// |X|^n exceeds caps.max_enumeration.
std::vector<Sequence> typical_set(const ProbabilityVector& p, int n, double delta,
                                  const Caps& caps = default_caps());

/// Eigen-decomposition with eigenvalues in descending order. Eigenvectors of
/// clusters closer than 1e-9 are rebuilt from the standard basis by
/// Gram-Schmidt, and every column has its first nonnegligible entry real and
/// positive.
struct Eigenbasis {
  RealVector values;
  Matrix vectors;
};
Eigenbasis canonical_eigenbasis(const Matrix& rho);

struct TypicalProjector {
  int n = 0;
  double alpha = 0.0;
  int local_dim = 0;
  std::vector<Matrix> local_bases;  ///< eigenbasis used at each position
  std::vector<Sequence> basis_labels;
  std::optional<HermitianOperator> projector;  ///< materialized when local_dim^n is small

  int rank() const { return static_cast<int>(basis_labels.size()); }
  /// Builds the dense projector (throws DimOverflow above caps.max_dim).
  Matrix dense(const Caps& caps = default_caps()) const;
};

constexpr std::uint64_t kMaterializeLimit = 256;

TypicalProjector typical_projector(const DensityOperator& rho, int n, double alpha,
                                   const Caps& caps = default_caps());

/// Product over the indicator sets I_a = {i : x_i = a} of the typical
/// projectors of W(a) on those positions.
TypicalProjector conditional_typical_projector(const CqChannel& w, const Sequence& xs, double alpha,
                                               const Caps& caps = default_caps());

struct BoundRecord {
  std::string bound_id;  ///< te1, te2_lower, te2_upper, ..., te7
  int n = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  double fitted_constant = 0.0;
  bool pass = false;
  bool vacuous = false;  ///< no typical input sequence at this n
};

struct TypicalityReport {
  double alpha = 0.0;
  std::vector<BoundRecord> records;
  double beta = 0.0;
  double delta = 0.0;
  double gamma = 0.0;
  double beta_cond = 0.0;
  double gamma_cond = 0.0;
  double delta_cond = 0.0;
  double beta_pw = 0.0;

  /// All records of one family ("te1" .. "te7") pass.
  bool family_pass(const std::string& family) const;
  bool all_pass() const;
  /// bound_id,n,lhs,rhs,slack,fitted_constant
  std::string to_csv() const;
};

/// Evaluates the seven typical-subspace bounds for sigma = PW, the
/// conditional projector of a representative P-typical input, and the
/// projector of PW applied to that input's output.
TypicalityReport verify_typicality_bounds(const CqChannel& w, const ProbabilityVector& p,
                                          const std::vector<int>& n_values, double alpha,
                                          const Caps& caps = default_caps());

/// Lexicographically smallest P-typical sequence among those whose type is
/// closest (l1) to P; empty when the typical set is empty.
std::optional<Sequence> representative_typical_sequence(const ProbabilityVector& p, int n, double delta,
                                                        const Caps& caps = default_caps());

}  // namespace avcqc
