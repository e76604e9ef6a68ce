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

#include "avcqc/operator_core.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace avcqc {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

Eigen::SelfAdjointEigenSolver<Matrix> eig(const Matrix& m, bool vectors) {
  return Eigen::SelfAdjointEigenSolver<Matrix>(m,
                                               vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
}

}  // namespace

// --- HermitianOperator ------------------------------------------------------

HermitianOperator HermitianOperator::from_matrix(Matrix m, const Tolerances& tol) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw Error(ErrorKind::NotSquare, "operator must be a nonempty square matrix, got " +
                                          std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
  const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (asym > tol.hermitian) {
    throw Error(ErrorKind::NotHermitian, "max |m_ij - conj(m_ji)| = " + fmt(asym) +
                                             " exceeds hermitian tolerance " + fmt(tol.hermitian));
  }
  Matrix h = 0.5 * (m + m.adjoint());
  return HermitianOperator(std::move(h));
}

HermitianOperator HermitianOperator::hermitian_part(const Matrix& m) {
  return HermitianOperator(0.5 * (m + m.adjoint()));
}

HermitianOperator HermitianOperator::identity(int dim) {
  return HermitianOperator(Matrix::Identity(dim, dim));
}

RealVector HermitianOperator::eigenvalues() const { return eig(m_, false).eigenvalues(); }

// --- DensityOperator --------------------------------------------------------

DensityOperator DensityOperator::validate(const Matrix& m, const Tolerances& tol) {
  HermitianOperator h = HermitianOperator::from_matrix(m, tol);
  const RealVector ev = h.eigenvalues();
  if (ev(0) < -tol.psd_floor) {
    throw Error(ErrorKind::NotPositive,
                "minimum eigenvalue " + fmt(ev(0)) + " is below the psd floor -" + fmt(tol.psd_floor));
  }
  const double tr = h.trace();
  if (std::abs(tr - 1.0) > tol.trace) {
    throw Error(ErrorKind::TraceNotOne,
                "trace " + fmt(tr) + " differs from 1 by more than " + fmt(tol.trace));
  }
  return DensityOperator(std::move(h));
}

DensityOperator DensityOperator::from_trusted(const Matrix& m) {
  Tolerances loose;
  loose.hermitian = 1e-9;
  loose.psd_floor = 1e-9;
  loose.trace = 1e-9;
  return validate(0.5 * (m + m.adjoint()), loose);
}

DensityOperator DensityOperator::maximally_mixed(int dim) {
  return DensityOperator(
      HermitianOperator::hermitian_part(Matrix::Identity(dim, dim) / static_cast<double>(dim)));
}

DensityOperator DensityOperator::basis_state(int dim, int k) {
  Matrix m = Matrix::Zero(dim, dim);
  m(k, k) = 1.0;
  return DensityOperator(HermitianOperator::hermitian_part(m));
}

DensityOperator DensityOperator::pure(const Eigen::VectorXcd& psi) {
  const Eigen::VectorXcd v = psi / psi.norm();
  return DensityOperator(HermitianOperator::hermitian_part(v * v.adjoint()));
}

RealVector DensityOperator::spectrum() const {
  RealVector ev = base_.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) ev(i) = std::max(ev(i), 0.0);
  return ev;
}

// --- ProbabilityVector ------------------------------------------------------

ProbabilityVector ProbabilityVector::from_weights(std::vector<double> w, const Tolerances& tol) {
  if (w.empty()) throw Error(ErrorKind::InvalidDistribution, "empty support");
  double total = 0.0;
  for (double x : w) {
    if (!(x >= 0.0)) {
      throw Error(ErrorKind::InvalidDistribution, "negative or NaN weight " + fmt(x));
    }
    total += x;
  }
  if (std::abs(total - 1.0) > tol.probability_sum) {
    throw Error(ErrorKind::InvalidDistribution,
                "weights sum to " + fmt(total) + ", off by more than " + fmt(tol.probability_sum));
  }
  return ProbabilityVector(std::move(w));
}

ProbabilityVector ProbabilityVector::uniform(int size) {
  return ProbabilityVector(std::vector<double>(static_cast<std::size_t>(size), 1.0 / size));
}

ProbabilityVector ProbabilityVector::point_mass(int size, int at) {
  std::vector<double> w(static_cast<std::size_t>(size), 0.0);
  w[static_cast<std::size_t>(at)] = 1.0;
  return ProbabilityVector(std::move(w));
}

// --- entropies --------------------------------------------------------------

double entropy_bits(std::span<const double> weights) {
  double h = 0.0;
  for (double p : weights) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

double shannon_entropy(const ProbabilityVector& p) { return entropy_bits(p.weights()); }

double von_neumann_entropy(const Matrix& m) {
  const RealVector ev = eig(m, false).eigenvalues();
  double h = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    const double l = ev(i);
    if (l > 0.0) h -= l * std::log2(l);
  }
  return std::max(h, 0.0);
}

double von_neumann_entropy(const DensityOperator& rho) {
  const RealVector ev = rho.spectrum();
  return std::max(entropy_bits(std::span<const double>(ev.data(), static_cast<std::size_t>(ev.size()))), 0.0);
}

double mutual_information(const RealMatrix& joint, const Tolerances& tol) {
  if (joint.size() == 0) throw Error(ErrorKind::InvalidJoint, "empty joint table");
  if (joint.minCoeff() < 0.0) {
    throw Error(ErrorKind::InvalidJoint, "negative entry " + fmt(joint.minCoeff()));
  }
  const double total = joint.sum();
  if (std::abs(total - 1.0) > tol.probability_sum) {
    throw Error(ErrorKind::InvalidJoint, "entries sum to " + fmt(total));
  }
  const RealVector rows = joint.rowwise().sum();
  const RealVector cols = joint.colwise().sum().transpose();
  double mi = 0.0;
  for (Eigen::Index i = 0; i < joint.rows(); ++i) {
    for (Eigen::Index j = 0; j < joint.cols(); ++j) {
      const double p = joint(i, j);
      if (p > 0.0) mi += p * std::log2(p / (rows(i) * cols(j)));
    }
  }
  return std::max(mi, 0.0);
}

// --- distances -------------------------------------------------------------

double trace_norm(const Matrix& hermitian) {
  return eig(0.5 * (hermitian + hermitian.adjoint()), false).eigenvalues().cwiseAbs().sum();
}

double trace_distance(const DensityOperator& rho, const DensityOperator& sigma) {
  if (rho.dim() != sigma.dim()) {
    throw Error(ErrorKind::DimensionMismatch,
                "dimensions " + std::to_string(rho.dim()) + " and " + std::to_string(sigma.dim()));
  }
  return 0.5 * trace_norm(rho.matrix() - sigma.matrix());
}

// --- tensor structure ------------------------------------------------------

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

HermitianOperator tensor(const HermitianOperator& a, const HermitianOperator& b) {
  return HermitianOperator::hermitian_part(kron(a.matrix(), b.matrix()));
}

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b) {
  return DensityOperator::from_trusted(kron(a.matrix(), b.matrix()));
}

Matrix partial_trace(const Matrix& op, std::span<const int> dims, int traced) {
  if (traced < 0 || traced >= static_cast<int>(dims.size())) {
    throw Error(ErrorKind::BadSubsystemIndex, "subsystem " + std::to_string(traced) + " out of range for " +
                                                  std::to_string(dims.size()) + " subsystems");
  }
  Eigen::Index total = 1;
  for (int d : dims) total *= d;
  if (op.rows() != total || op.cols() != total) {
    throw Error(ErrorKind::DimensionMismatch, "operator dimension " + std::to_string(op.rows()) +
                                                  " does not match product " + std::to_string(total));
  }
  // Index layout: (before, traced, after), row-major with the first subsystem most significant.
  Eigen::Index before = 1;
  for (int k = 0; k < traced; ++k) before *= dims[static_cast<std::size_t>(k)];
  const Eigen::Index mid = dims[static_cast<std::size_t>(traced)];
  const Eigen::Index after = total / (before * mid);
  const Eigen::Index out_dim = before * after;
  Matrix out = Matrix::Zero(out_dim, out_dim);
  for (Eigen::Index b1 = 0; b1 < before; ++b1) {
    for (Eigen::Index a1 = 0; a1 < after; ++a1) {
      for (Eigen::Index b2 = 0; b2 < before; ++b2) {
        for (Eigen::Index a2 = 0; a2 < after; ++a2) {
          Complex acc = 0.0;
          for (Eigen::Index m = 0; m < mid; ++m) {
            acc += op((b1 * mid + m) * after + a1, (b2 * mid + m) * after + a2);
          }
          out(b1 * after + a1, b2 * after + a2) = acc;
        }
      }
    }
  }
  return out;
}

HermitianOperator partial_trace(const HermitianOperator& op, std::span<const int> dims, int traced) {
  return HermitianOperator::hermitian_part(partial_trace(op.matrix(), dims, traced));
}

// --- matrix functions -------------------------------------------------------

Matrix log2_psd(const Matrix& m, double floor) {
  const auto es = eig(m, true);
  RealVector l = es.eigenvalues();
  for (Eigen::Index i = 0; i < l.size(); ++i) l(i) = std::log2(std::max(l(i), floor));
  return es.eigenvectors() * l.asDiagonal() * es.eigenvectors().adjoint();
}

double relative_entropy(const Matrix& rho, const Matrix& sigma) {
  constexpr double kZero = 1e-14;
  const auto es = eig(sigma, true);
  const Matrix& v = es.eigenvectors();
  const Matrix rho_in_sigma = v.adjoint() * rho * v;
  double cross = 0.0;
  for (Eigen::Index i = 0; i < v.cols(); ++i) {
    const double w = rho_in_sigma(i, i).real();
    const double l = es.eigenvalues()(i);
    if (l <= kZero) {
      if (w > kZero) return std::numeric_limits<double>::infinity();
      continue;
    }
    cross += w * std::log2(l);
  }
  return std::max(-von_neumann_entropy(rho) - cross, 0.0);
}

}  // namespace avcqc
