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

#include <Eigen/Dense>
#include <complex>
#include <span>
#include <vector>

#include "avcqc/errors.hpp"
#include "avcqc/tolerances.hpp"

namespace avcqc {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Dense Hermitian operator on a finite-dimensional space.
class HermitianOperator {
 public:
  HermitianOperator() = default;

  /// Validates the Hermitian property; throws NotSquare / NotHermitian.
  static HermitianOperator from_matrix(Matrix m, const Tolerances& tol = default_tolerances());

  /// Trusted constructor for operators produced by internal arithmetic: the
  /// input is replaced by its Hermitian part (m + m^dagger) / 2.
  static HermitianOperator hermitian_part(const Matrix& m);

  static HermitianOperator identity(int dim);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }
  double trace() const { return m_.trace().real(); }

  /// Eigenvalues in ascending order.
  RealVector eigenvalues() const;

 private:
  explicit HermitianOperator(Matrix m) : m_(std::move(m)) {}
  Matrix m_;
};

/// Positive semidefinite, unit-trace Hermitian operator.
class DensityOperator {
 public:
  DensityOperator() = default;

  /// Throws NotSquare, NotHermitian, NotPositive or TraceNotOne.
  static DensityOperator validate(const Matrix& m, const Tolerances& tol = default_tolerances());

  /// Trusted constructor for convex combinations and tensor products of valid
  /// states. Still checks the invariants, with a looser floor for round-off.
  static DensityOperator from_trusted(const Matrix& m);

  static DensityOperator maximally_mixed(int dim);
  /// |k><k| in the computational basis.
  static DensityOperator basis_state(int dim, int k);
  /// |psi><psi| for a (not necessarily normalized) vector.
  static DensityOperator pure(const Eigen::VectorXcd& psi);

  int dim() const { return base_.dim(); }
  const Matrix& matrix() const { return base_.matrix(); }
  const HermitianOperator& hermitian() const { return base_; }
  /// Eigenvalues in ascending order, with the psd floor clamped to zero.
  RealVector spectrum() const;

 private:
  explicit DensityOperator(HermitianOperator base) : base_(std::move(base)) {}
  HermitianOperator base_;
};

/// Finite distribution; weights nonnegative and summing to one.
class ProbabilityVector {
 public:
  ProbabilityVector() = default;

  /// Throws InvalidDistribution on negative weights or a bad total.
  static ProbabilityVector from_weights(std::vector<double> w, const Tolerances& tol = default_tolerances());
  static ProbabilityVector uniform(int size);
  static ProbabilityVector point_mass(int size, int at);

  int size() const { return static_cast<int>(w_.size()); }
  double operator[](int i) const { return w_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& weights() const { return w_; }

 private:
  explicit ProbabilityVector(std::vector<double> w) : w_(std::move(w)) {}
  std::vector<double> w_;
};

// --- entropies --------------------------------------------------------------

/// Shannon entropy in bits of a nonnegative weight list, 0 log 0 := 0.
double entropy_bits(std::span<const double> weights);

double shannon_entropy(const ProbabilityVector& p);

/// Von Neumann entropy in bits.
double von_neumann_entropy(const DensityOperator& rho);

/// Entropy of the Hermitian matrix `m`, assumed PSD up to round-off.
double von_neumann_entropy(const Matrix& m);

/// Mutual information in bits of a joint table (rows x cols).
/// Throws InvalidJoint when entries are negative or do not sum to one.
double mutual_information(const RealMatrix& joint, const Tolerances& tol = default_tolerances());

// --- distances -------------------------------------------------------------

/// Sum of absolute eigenvalues of a Hermitian matrix.
double trace_norm(const Matrix& hermitian);

/// (1/2) ||rho - sigma||_1. Throws DimensionMismatch.
double trace_distance(const DensityOperator& rho, const DensityOperator& sigma);

// --- tensor structure ------------------------------------------------------

Matrix kron(const Matrix& a, const Matrix& b);
HermitianOperator tensor(const HermitianOperator& a, const HermitianOperator& b);
DensityOperator tensor(const DensityOperator& a, const DensityOperator& b);

/// Traces out subsystem `traced` of an operator on the product space with the
/// given local dimensions. Throws BadSubsystemIndex / DimensionMismatch.
Matrix partial_trace(const Matrix& op, std::span<const int> dims, int traced);
HermitianOperator partial_trace(const HermitianOperator& op, std::span<const int> dims, int traced);

// --- matrix functions -------------------------------------------------------

/// log2 of a PSD matrix with eigenvalues floored at `floor`.
Matrix log2_psd(const Matrix& m, double floor = 1e-300);

/// Quantum relative entropy D(rho || sigma) in bits; +inf when the support of
/// rho is not contained in that of sigma.
double relative_entropy(const Matrix& rho, const Matrix& sigma);

/// Real trace tr(a b) for Hermitian a, b.
inline double trace_product(const Matrix& a, const Matrix& b) {
  return (a.cwiseProduct(b.transpose())).sum().real();
}

}  // namespace avcqc
