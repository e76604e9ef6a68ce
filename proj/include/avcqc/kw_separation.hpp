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
#include <optional>
#include <vector>

#include "avcqc/channel_model.hpp"

namespace avcqc {

/// Encoder pair g0, g1 : V'^iota -> X as explicit lookup tables indexed by the
/// mixed-radix index of the V' block (binary V', first letter most significant).
struct GPair {
  int iota = 0;
  int x_size = 0;
  std::vector<int> g0;
  std::vector<int> g1;
  std::vector<int> group;    ///< 1, 2 or 3 per sequence
  std::vector<int> label_m;  ///< pair label m of groups 1/2, -1 for group 3
  std::vector<char> half;    ///< 'a', 'b' or '*'
};

/// Smallest kappa with sum_tau floor(C(kappa, tau) / 2) >= x_size.
int minimal_iota(int x_size);

/// Three-group construction. Throws NonBinarySource, ZeroMutualInformation,
/// InvalidArgument (|X| < 2).
GPair build_g_pair(const CorrelatedSource& src, int x_size);

/// sum over the preimage g^{-1}(x) of the i.i.d. sender weights.
std::vector<double> preimage_weights(const std::vector<int>& g, int iota, int x_size,
                                     const RealVector& sender_marginal);

/// Block weights omega_g(v^iota, x) = sum_{u : g(u) = x} P^iota(u, v^iota).
RealMatrix ensemble_weights(const CorrelatedSource& src, const std::vector<int>& g, int iota, int x_size);

/// Linear parameterization sigma_{Q,g} = sum_{x,s} Q(s|x) B_g(x,s) of the
/// ensemble state on C^{|V|^iota} (x) C^d (block diagonal in v^iota).
struct EnsembleBasis {
  int iota = 0;
  int num_inputs = 0;
  int num_states = 0;
  int block_count = 0;        ///< |V|^iota
  int dim = 0;                ///< block_count * d
  std::vector<Matrix> terms;  ///< row-major (x, s)
  Matrix evaluate(const std::vector<double>& q_flat) const;
};

/// Throws AlphabetMismatch, DimOverflow.
EnsembleBasis ensemble_basis(const CorrelatedSource& src, const std::vector<int>& g, int iota, const Avcqc& w,
                             const Caps& caps = default_caps());

DensityOperator ensemble_state(const CorrelatedSource& src, const std::vector<int>& g, int iota,
                               const JammerKernel& q, const Avcqc& w, const Caps& caps = default_caps());

/// Real coordinates with <embed(A), embed(B)> = tr(AB): diagonal entries,
/// then sqrt(2) Re and sqrt(2) Im of each upper off-diagonal entry.
RealVector embed_hermitian(const Matrix& h);
RealVector embed_hermitian(const HermitianOperator& h);
HermitianOperator unembed_hermitian(const RealVector& v, int dim);

struct SeparationCertificate {
  HermitianOperator a;
  double threshold_b = 0.0;
  HermitianOperator m0;
  HermitianOperator m1;
  double margin = 0.0;       ///< half of the exact gap inf_1 - sup_0
  double sup0 = 0.0;         ///< max_Q tr(sigma_{Q,g0} A)
  double inf1 = 0.0;         ///< min_Q tr(sigma_{Q,g1} A)
  double lambda_low = 0.0;   ///< min(0, smallest eigenvalue of A)
  double lambda_high = 0.0;  ///< largest eigenvalue of A
};

struct SeparationOutcome {
  bool separable = false;
  double distance = 0.0;  ///< min over (Q0, Q1) of || sigma_{Q0,g0} - sigma_{Q1,g1} ||_2
  JammerKernel q0;        ///< closest pair (witness kernels when not separable)
  JammerKernel q1;
  std::optional<SeparationCertificate> certificate;
};

struct SeparationOptions {
  int restarts = 16;
  std::uint64_t seed = 0;
};

/// Decides whether {sigma_{Q,g0}} and {sigma_{Q,g1}} intersect. Throws
/// Indeterminate when the distance lies in (separation_lower, separation_upper].
SeparationOutcome separation_test(const Avcqc& w, const CorrelatedSource& src, const GPair& gp,
                                  const SeparationOptions& opts = {},
                                  const Tolerances& tol = default_tolerances(),
                                  const Caps& caps = default_caps());

/// Induced classical binary AVC V_Q(j|i) = tr(sigma_{Q,g_i} M_j).
struct BinaryAvc {
  int grid_k = 0;
  /// Per-(x,s) coefficients: V_Q(0|0) = sum Q(s|x) c00[x,s], V_Q(1|1) likewise.
  std::vector<double> c00;
  std::vector<double> c11;
  int num_inputs = 0;
  int num_states = 0;
  /// Grid tables (one entry per grid kernel), empty when not materialized.
  std::vector<double> v00;
  std::vector<double> v11;
  std::uint64_t grid_size = 0;
  double min_v00 = 0.0;
  double max_v00 = 0.0;
  double min_v11 = 0.0;
  double max_v11 = 0.0;
  JammerKernel worst_q0;  ///< attains min V(0|0)
  JammerKernel worst_q1;  ///< attains min V(1|1)

  /// Binary AVC given directly by its grid rows (V(0|0), V(1|1)). Throws EmptyGrid.
  static BinaryAvc from_rows(const std::vector<double>& v00, const std::vector<double>& v11);
};

/// Number of kernels on the 1/k grid: C(k + |S| - 1, |S| - 1)^|X|.
std::uint64_t kernel_grid_size(int num_inputs, int num_states, int k);

/// The index-th kernel of the 1/k grid (inputs most significant).
JammerKernel kernel_grid_point(int num_inputs, int num_states, int k, std::uint64_t index);

BinaryAvc induced_binary_avc(const SeparationCertificate& cert, const Avcqc& w, const CorrelatedSource& src,
                             const GPair& gp, int grid_k = 16, const Caps& caps = default_caps());

struct PositivityResult {
  bool positive = false;
  double rate_r = 0.0;
};

/// Positivity iff min V(0|0) + min V(1|1) > 1 + 1e-9; rate from the informed
/// jammer capacity of the induced binary channel family. Throws EmptyGrid.
PositivityResult binary_avc_positivity(const BinaryAvc& b);

}  // namespace avcqc
