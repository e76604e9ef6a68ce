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
#include <span>
#include <vector>

#include "avcqc/channel_model.hpp"

namespace avcqc {

// --- Holevo quantity --------------------------------------------------------

/// chi(P, W) = S(sum_x P(x) W(x)) - sum_x P(x) S(W(x)). Throws AlphabetMismatch.
double holevo_chi(const ProbabilityVector& p, const CqChannel& w);
double holevo_chi(std::span<const double> p, const std::vector<Matrix>& states);

struct HolevoCapacity {
  double value = 0.0;        ///< chi at the returned distribution (lower bound)
  double upper_bound = 0.0;  ///< max_x D(W(x) || W(P))
  std::vector<double> p;
  int iterations = 0;
};

/// Blahut-Arimoto fixed point for max_P chi(P, W); stops when the upper and
/// lower bounds agree to `tol`.
HolevoCapacity holevo_capacity(const std::vector<Matrix>& states, double tol = 1e-9,
                               int max_iterations = 200000);
HolevoCapacity holevo_capacity(const CqChannel& w, double tol = 1e-9);

// --- max-min capacity with an informed jammer -------------------------------

struct SolverOptions {
  std::uint64_t seed = 0;
  int outer_restarts = 32;
  int inner_restarts = 3;
  int stall_window = 20;  ///< outer convergence: change < outer_tol over this many iterations
  double outer_tol = 1e-9;
  int max_outer_iterations = 2000;
  int max_inner_iterations = 5000;
  int divergence_window = 50;  ///< consecutive increases that raise SolverDiverged
  bool run_oracle = true;
  int oracle_resolution = 32;
  std::uint64_t oracle_max_evaluations = 4000000;
};

struct InnerMinimum {
  double value = 0.0;
  JammerKernel q;
  int iterations = 0;
};

/// min over Q of chi(p, averaged_channel(w, Q)) by projected gradient with
/// Armijo backtracking on the product of simplices. Throws SolverDiverged.
InnerMinimum min_chi_over_jammer(const Avcqc& w, const ProbabilityVector& p, const SolverOptions& opts = {});

struct CapacityResult {
  double value = 0.0;
  ProbabilityVector argmax_p;
  JammerKernel argmin_q;
  std::vector<double> solver_trace;  ///< objective per outer iteration of the selected restart
  bool certified = false;            ///< grid oracle was feasible
  double certified_gap = 0.0;        ///< |value - oracle_value| when certified
  double oracle_value = 0.0;
  double upper_bound = 0.0;  ///< Holevo capacity of the averaged channel at argmin_q
  double duality_gap = 0.0;  ///< upper_bound - value, clamped at 0
};

/// max_P min_Q chi(P, averaged_channel(w, Q)). Throws SolverDiverged.
CapacityResult capacity_informed_jammer(const Avcqc& w, const SolverOptions& opts = {});

struct GridOracleResult {
  bool feasible = false;
  double value = 0.0;
  std::vector<double> p;
  std::vector<double> q;
  std::uint64_t evaluations = 0;
};

/// Grid search over P and Q (resolution 1/k per coordinate) with local
/// refinement around the incumbent. Infeasible when the evaluation budget is
/// exceeded.
GridOracleResult grid_oracle_capacity(const Avcqc& w, int resolution = 32,
                                      std::uint64_t max_evaluations = 4000000);

/// Integer compositions of `total` into `parts` nonnegative summands, in
/// lexicographic order.
std::vector<std::vector<int>> simplex_grid(int parts, int total);

// --- common randomness ------------------------------------------------------

enum class CrCase { SmallCorrelation, LargeCorrelation };
const char* to_string(CrCase c);

struct CrOptions {
  SolverOptions solver;
  int aux_restarts = 64;
  int aux_max_iterations = 3000;
  bool run_oracle = true;
  int oracle_resolution = 16;
  double constraint_slack = 1e-9;
};

struct CrCapacityResult {
  double value = 0.0;
  CrCase case_tag = CrCase::SmallCorrelation;
  double c_star = 0.0;
  double source_mi = 0.0;
  /// aux(u, v') = P(u | v'); present in the large-correlation case.
  std::optional<RealMatrix> aux_channel;
  double search_value = 0.0;
  double oracle_value = 0.0;
  bool oracle_used = false;
};

/// I(U;V') and I(U;V) for the chain U - V' - V with aux(u, v') = P(u|v').
double aux_information_sender(const RealMatrix& aux, const CorrelatedSource& src);
double aux_information_receiver(const RealMatrix& aux, const CorrelatedSource& src);

CrCapacityResult cr_capacity(const Avcqc& w, const CorrelatedSource& src, const CrOptions& opts = {},
                             const Tolerances& tol = default_tolerances());

/// Same decision and optimization with a precomputed max-min value.
CrCapacityResult cr_capacity_from_value(double c_star, const CorrelatedSource& src,
                                        const CrOptions& opts = {},
                                        const Tolerances& tol = default_tolerances());

/// Largest I(U;V') over the binary-V' grid at resolution 1/k that meets the
/// case-2 constraint. Throws NonBinarySource.
double cr_case2_grid_oracle(double c_star, const CorrelatedSource& src, int resolution, double slack,
                            RealMatrix* best_aux = nullptr);

struct LnProfile {
  double a = 0.0;                    ///< liminf l_n / log n
  double b = 0.0;                    ///< limsup l_n / log n
  double asymptotic_fraction = 0.0;  ///< lim l_n / n
};

struct RateLimitedBound {
  double value = 0.0;
  double c_star = 0.0;
  double rate_r = 0.0;
  double r_double_prime = 0.0;  ///< 3 / r, infinity when r = 0
  bool zero_rate = false;       ///< r = 0: the correlation term contributes nothing
};

/// (1 - f) C* + f r'' with r'' = 3 / r. Throws ProfileOutOfRange when r > 0 and
/// the profile violates r'' < a <= b < infinity or f is outside [0, 1].
RateLimitedBound cr_rate_limited_lower_bound(const Avcqc& w, const CorrelatedSource& src,
                                             const LnProfile& profile, const SolverOptions& opts = {},
                                             const Tolerances& tol = default_tolerances());

/// The same evaluation from precomputed C* and r.
RateLimitedBound rate_limited_from_values(double c_star, double rate_r, const LnProfile& profile);

/// Binary AVC rate r of the separation pipeline; 0 when no separating pair
/// exists (non-binary source, zero correlation, not separable).
double separation_rate(const Avcqc& w, const CorrelatedSource& src, std::uint64_t seed,
                       const Tolerances& tol = default_tolerances());

}  // namespace avcqc
