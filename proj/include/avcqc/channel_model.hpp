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
#include <string>
#include <vector>

#include "avcqc/operator_core.hpp"

namespace avcqc {

using Sequence = std::vector<int>;

/// Mixed-radix helpers for sequences over an alphabet of size `base`; the
/// first letter is the most significant digit.
std::uint64_t checked_power(std::uint64_t base, int exponent, std::uint64_t cap, ErrorKind on_overflow);
std::uint64_t sequence_index(const Sequence& seq, int base);
Sequence sequence_at(std::uint64_t index, int base, int length);

/// Memoryless classical-quantum channel x -> W(x).
class CqChannel {
 public:
  CqChannel() = default;
  CqChannel(std::vector<std::string> x_labels, std::vector<DensityOperator> states);

  int num_inputs() const { return static_cast<int>(states_.size()); }
  int dim() const { return states_.empty() ? 0 : states_.front().dim(); }
  const DensityOperator& state(int x) const { return states_[static_cast<std::size_t>(x)]; }
  const std::vector<DensityOperator>& states() const { return states_; }
  const std::vector<std::string>& x_labels() const { return x_labels_; }

 private:
  std::vector<std::string> x_labels_;
  std::vector<DensityOperator> states_;
};

/// Arbitrarily varying cq channel: a full table rho(x, s).
class Avcqc {
 public:
  Avcqc() = default;
  /// `states` is row-major in (x, s). Throws AlphabetMismatch / DimensionMismatch.
  Avcqc(std::vector<std::string> x_labels, std::vector<std::string> s_labels,
        std::vector<DensityOperator> states);

  int num_inputs() const { return static_cast<int>(x_labels_.size()); }
  int num_states() const { return static_cast<int>(s_labels_.size()); }
  int dim() const { return states_.front().dim(); }
  const DensityOperator& state(int x, int s) const {
    return states_[static_cast<std::size_t>(x * num_states() + s)];
  }
  const std::vector<std::string>& x_labels() const { return x_labels_; }
  const std::vector<std::string>& s_labels() const { return s_labels_; }

  /// Copy with one more jammer state whose column is `column[x]`.
  Avcqc with_extra_state(const std::vector<DensityOperator>& column, std::string label) const;

 private:
  std::vector<std::string> x_labels_;
  std::vector<std::string> s_labels_;
  std::vector<DensityOperator> states_;
};

/// Jammer kernel Q(s|x): one distribution over S per input letter.
class JammerKernel {
 public:
  JammerKernel() = default;
  /// `rows[x][s]`; every row is validated as a distribution.
  explicit JammerKernel(const std::vector<std::vector<double>>& rows,
                        const Tolerances& tol = default_tolerances());
  static JammerKernel uniform(int num_inputs, int num_states);
  static JammerKernel deterministic(const std::vector<int>& state_per_input, int num_states);

  int num_inputs() const { return nx_; }
  int num_states() const { return ns_; }
  double operator()(int x, int s) const { return q_[static_cast<std::size_t>(x * ns_ + s)]; }
  std::vector<double> row(int x) const;
  /// Flattened row-major (x, s) weights.
  const std::vector<double>& flat() const { return q_; }

 private:
  int nx_ = 0;
  int ns_ = 0;
  std::vector<double> q_;
};

/// Joint distribution P_{V'V} with rows indexed by V' (sender) and columns by V
/// (receiver).
class CorrelatedSource {
 public:
  CorrelatedSource() = default;
  CorrelatedSource(std::vector<std::string> v_prime_labels, std::vector<std::string> v_labels,
                   RealMatrix joint, const Tolerances& tol = default_tolerances());

  /// [[1/2 - e/2, e/2], [e/2, 1/2 - e/2]]: uniform marginals, crossover e.
  static CorrelatedSource binary_symmetric(double crossover);
  /// Sequence from the discontinuity example: off-diagonal 1/2^n.
  static CorrelatedSource dyadic_sequence(int n);
  static CorrelatedSource perfectly_correlated();

  int sender_size() const { return static_cast<int>(joint_.rows()); }
  int receiver_size() const { return static_cast<int>(joint_.cols()); }
  const RealMatrix& joint() const { return joint_; }
  double joint(int v_prime, int v) const { return joint_(v_prime, v); }
  const RealVector& sender_marginal() const { return p_sender_; }
  const RealVector& receiver_marginal() const { return p_receiver_; }
  /// Transition matrix entries P_{V'|V}(v'|v); zero columns where P_V(v) = 0.
  double conditional(int v_prime, int v) const { return conditional_(v_prime, v); }
  const RealMatrix& conditional() const { return conditional_; }
  double mutual_information() const { return mi_; }
  const std::vector<std::string>& v_prime_labels() const { return vp_labels_; }
  const std::vector<std::string>& v_labels() const { return v_labels_; }

  /// Joint probability of block sequences (i.i.d. product).
  double block_joint(const Sequence& v_prime, const Sequence& v) const;

 private:
  std::vector<std::string> vp_labels_;
  std::vector<std::string> v_labels_;
  RealMatrix joint_;
  RealMatrix conditional_;
  RealVector p_sender_;
  RealVector p_receiver_;
  double mi_ = 0.0;
};

/// Informed jammer strategy s^n(.) as an explicit table over X^n (row index is
/// the mixed-radix index of the codeword).
struct JammerStrategy {
  int n = 0;
  std::vector<Sequence> table;
};

/// rho_Q(x) = sum_s Q(s|x) rho(x, s). Throws AlphabetMismatch.
CqChannel averaged_channel(const Avcqc& w, const JammerKernel& q);

/// Same mixture as raw matrices (no validation), used by solver inner loops.
std::vector<Matrix> averaged_states(const Avcqc& w, const std::vector<double>& q_flat);

/// rho(x1,s1) (x) ... (x) rho(xn,sn). Throws LengthMismatch / DimOverflow.
DensityOperator product_output(const Avcqc& w, const Sequence& xs, const Sequence& ss,
                               const Caps& caps = default_caps());
Matrix product_output_matrix(const Avcqc& w, const Sequence& xs, const Sequence& ss);

/// max_x || w1(x) - w2(x) ||_1. For channels with classical inputs the
/// stabilized diamond norm of the difference is attained on a single letter.
double cq_diamond_distance(const CqChannel& w1, const CqChannel& w2);

/// Entrywise l1 distance of the joints. Throws AlphabetMismatch.
double source_distance(const CorrelatedSource& s1, const CorrelatedSource& s2);

/// True iff, for every pair of distinct inputs in X^n, the convex hulls of the
/// jammer-reachable product outputs intersect (set distance <= 1e-7). This is
/// evidence at the tested n only.
bool zero_capacity_condition(const Avcqc& w, int n, const Caps& caps = default_caps());

}  // namespace avcqc
