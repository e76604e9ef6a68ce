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

#include "avcqc/channel_model.hpp"

#include <cmath>

#include "avcqc/kw_separation.hpp"
#include "avcqc/simplex_qp.hpp"

namespace avcqc {

std::uint64_t checked_power(std::uint64_t base, int exponent, std::uint64_t cap, ErrorKind on_overflow) {
  std::uint64_t out = 1;
  for (int i = 0; i < exponent; ++i) {
    if (base != 0 && out > cap / base) {
      throw Error(on_overflow, std::to_string(base) + "^" + std::to_string(exponent) + " exceeds the cap " +
                                   std::to_string(cap));
    }
    out *= base;
  }
  if (out > cap) {
    throw Error(on_overflow, std::to_string(base) + "^" + std::to_string(exponent) + " exceeds the cap " +
                                 std::to_string(cap));
  }
  return out;
}

std::uint64_t sequence_index(const Sequence& seq, int base) {
  std::uint64_t idx = 0;
  for (int c : seq) idx = idx * static_cast<std::uint64_t>(base) + static_cast<std::uint64_t>(c);
  return idx;
}

Sequence sequence_at(std::uint64_t index, int base, int length) {
  Sequence out(static_cast<std::size_t>(length));
  for (int i = length - 1; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = static_cast<int>(index % static_cast<std::uint64_t>(base));
    index /= static_cast<std::uint64_t>(base);
  }
  return out;
}

// --- CqChannel / Avcqc -----------------------------------------------------

CqChannel::CqChannel(std::vector<std::string> x_labels, std::vector<DensityOperator> states)
    : x_labels_(std::move(x_labels)), states_(std::move(states)) {
  if (x_labels_.size() != states_.size() || states_.empty()) {
    throw Error(ErrorKind::AlphabetMismatch, "cq channel needs one state per input letter (" +
                                                 std::to_string(x_labels_.size()) + " labels, " +
                                                 std::to_string(states_.size()) + " states)");
  }
  for (const auto& s : states_) {
    if (s.dim() != states_.front().dim()) {
      throw Error(ErrorKind::DimensionMismatch, "cq channel outputs have different dimensions");
    }
  }
}

Avcqc::Avcqc(std::vector<std::string> x_labels, std::vector<std::string> s_labels,
             std::vector<DensityOperator> states)
    : x_labels_(std::move(x_labels)), s_labels_(std::move(s_labels)), states_(std::move(states)) {
  if (x_labels_.empty() || s_labels_.empty() || states_.size() != x_labels_.size() * s_labels_.size()) {
    throw Error(ErrorKind::AlphabetMismatch, "state table has " + std::to_string(states_.size()) +
                                                 " entries for |X|=" + std::to_string(x_labels_.size()) +
                                                 ", |S|=" + std::to_string(s_labels_.size()));
  }
  for (const auto& s : states_) {
    if (s.dim() != states_.front().dim()) {
      throw Error(ErrorKind::DimensionMismatch, "channel outputs have different dimensions");
    }
  }
}

Avcqc Avcqc::with_extra_state(const std::vector<DensityOperator>& column, std::string label) const {
  if (static_cast<int>(column.size()) != num_inputs()) {
    throw Error(ErrorKind::AlphabetMismatch, "new jammer column must have one state per input");
  }
  std::vector<std::string> s = s_labels_;
  s.push_back(std::move(label));
  std::vector<DensityOperator> states;
  for (int x = 0; x < num_inputs(); ++x) {
    for (int k = 0; k < num_states(); ++k) states.push_back(state(x, k));
    states.push_back(column[static_cast<std::size_t>(x)]);
  }
  return Avcqc(x_labels_, std::move(s), std::move(states));
}

// --- JammerKernel -----------------------------------------------------------

JammerKernel::JammerKernel(const std::vector<std::vector<double>>& rows, const Tolerances& tol) {
  if (rows.empty() || rows.front().empty()) {
    throw Error(ErrorKind::InvalidDistribution, "jammer kernel needs at least one row and state");
  }
  nx_ = static_cast<int>(rows.size());
  ns_ = static_cast<int>(rows.front().size());
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != ns_) {
      throw Error(ErrorKind::AlphabetMismatch, "jammer kernel rows have different lengths");
    }
    const ProbabilityVector p = ProbabilityVector::from_weights(r, tol);
    q_.insert(q_.end(), p.weights().begin(), p.weights().end());
  }
}

JammerKernel JammerKernel::uniform(int num_inputs, int num_states) {
  return JammerKernel(std::vector<std::vector<double>>(
      static_cast<std::size_t>(num_inputs),
      std::vector<double>(static_cast<std::size_t>(num_states), 1.0 / num_states)));
}

JammerKernel JammerKernel::deterministic(const std::vector<int>& state_per_input, int num_states) {
  std::vector<std::vector<double>> rows;
  for (int s : state_per_input) {
    std::vector<double> r(static_cast<std::size_t>(num_states), 0.0);
    r.at(static_cast<std::size_t>(s)) = 1.0;
    rows.push_back(std::move(r));
  }
  return JammerKernel(rows);
}

std::vector<double> JammerKernel::row(int x) const {
  return std::vector<double>(q_.begin() + x * ns_, q_.begin() + (x + 1) * ns_);
}

// --- CorrelatedSource -------------------------------------------------------

namespace {

std::vector<std::string> default_labels(Eigen::Index n) {
  std::vector<std::string> out;
  for (Eigen::Index i = 0; i < n; ++i) out.push_back(std::to_string(i));
  return out;
}

}  // namespace

CorrelatedSource::CorrelatedSource(std::vector<std::string> v_prime_labels, std::vector<std::string> v_labels,
                                   RealMatrix joint, const Tolerances& tol)
    : vp_labels_(std::move(v_prime_labels)), v_labels_(std::move(v_labels)), joint_(std::move(joint)) {
  if (static_cast<Eigen::Index>(vp_labels_.size()) != joint_.rows() ||
      static_cast<Eigen::Index>(v_labels_.size()) != joint_.cols()) {
    throw Error(ErrorKind::AlphabetMismatch, "joint table shape " + std::to_string(joint_.rows()) + "x" +
                                                 std::to_string(joint_.cols()) +
                                                 " does not match the alphabets");
  }
  mi_ = avcqc::mutual_information(joint_, tol);
  p_sender_ = joint_.rowwise().sum();
  p_receiver_ = joint_.colwise().sum().transpose();
  conditional_ = RealMatrix::Zero(joint_.rows(), joint_.cols());
  for (Eigen::Index v = 0; v < joint_.cols(); ++v) {
    if (p_receiver_(v) <= 0.0) continue;
    for (Eigen::Index u = 0; u < joint_.rows(); ++u) conditional_(u, v) = joint_(u, v) / p_receiver_(v);
  }
}

CorrelatedSource CorrelatedSource::binary_symmetric(double crossover) {
  RealMatrix j(2, 2);
  j << 0.5 * (1.0 - crossover), 0.5 * crossover, 0.5 * crossover, 0.5 * (1.0 - crossover);
  return CorrelatedSource(default_labels(2), default_labels(2), j);
}

CorrelatedSource CorrelatedSource::dyadic_sequence(int n) {
  const double e = std::ldexp(1.0, -n);
  RealMatrix j(2, 2);
  j << 0.5 - e, e, e, 0.5 - e;
  return CorrelatedSource(default_labels(2), default_labels(2), j);
}

CorrelatedSource CorrelatedSource::perfectly_correlated() { return binary_symmetric(0.0); }

double CorrelatedSource::block_joint(const Sequence& v_prime, const Sequence& v) const {
  if (v_prime.size() != v.size()) {
    throw Error(ErrorKind::LengthMismatch, "source blocks of different lengths");
  }
  double p = 1.0;
  for (std::size_t i = 0; i < v.size(); ++i) p *= joint_(v_prime[i], v[i]);
  return p;
}

// --- operations -------------------------------------------------------------

CqChannel averaged_channel(const Avcqc& w, const JammerKernel& q) {
  if (q.num_inputs() != w.num_inputs() || q.num_states() != w.num_states()) {
    throw Error(ErrorKind::AlphabetMismatch, "kernel is " + std::to_string(q.num_inputs()) + "x" +
                                                 std::to_string(q.num_states()) +
                                                 ", channel has |X|=" + std::to_string(w.num_inputs()) +
                                                 ", |S|=" + std::to_string(w.num_states()));
  }
  std::vector<DensityOperator> out;
  for (const Matrix& m : averaged_states(w, q.flat())) out.push_back(DensityOperator::from_trusted(m));
  return CqChannel(w.x_labels(), std::move(out));
}

std::vector<Matrix> averaged_states(const Avcqc& w, const std::vector<double>& q_flat) {
  std::vector<Matrix> out;
  const int ns = w.num_states();
  for (int x = 0; x < w.num_inputs(); ++x) {
    Matrix m = Matrix::Zero(w.dim(), w.dim());
    for (int s = 0; s < ns; ++s) {
      const double q = q_flat[static_cast<std::size_t>(x * ns + s)];
      if (q != 0.0) m += q * w.state(x, s).matrix();
    }
    out.push_back(std::move(m));
  }
  return out;
}

Matrix product_output_matrix(const Avcqc& w, const Sequence& xs, const Sequence& ss) {
  Matrix out = Matrix::Identity(1, 1);
  for (std::size_t i = 0; i < xs.size(); ++i) out = kron(out, w.state(xs[i], ss[i]).matrix());
  return out;
}

DensityOperator product_output(const Avcqc& w, const Sequence& xs, const Sequence& ss, const Caps& caps) {
  if (xs.size() != ss.size() || xs.empty()) {
    throw Error(ErrorKind::LengthMismatch,
                "input length " + std::to_string(xs.size()) + ", state length " + std::to_string(ss.size()));
  }
  checked_power(static_cast<std::uint64_t>(w.dim()), static_cast<int>(xs.size()), caps.max_dim,
                ErrorKind::DimOverflow);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] < 0 || xs[i] >= w.num_inputs() || ss[i] < 0 || ss[i] >= w.num_states()) {
      throw Error(ErrorKind::AlphabetMismatch, "letter out of range at position " + std::to_string(i));
    }
  }
  return DensityOperator::from_trusted(product_output_matrix(w, xs, ss));
}

double cq_diamond_distance(const CqChannel& w1, const CqChannel& w2) {
  if (w1.num_inputs() != w2.num_inputs()) {
    throw Error(ErrorKind::AlphabetMismatch, "channels have different input alphabets");
  }
  if (w1.dim() != w2.dim()) {
    throw Error(ErrorKind::AlphabetMismatch, "channels have different output dimensions");
  }
  double best = 0.0;
  for (int x = 0; x < w1.num_inputs(); ++x) {
    best = std::max(best, trace_norm(w1.state(x).matrix() - w2.state(x).matrix()));
  }
  return best;
}

double source_distance(const CorrelatedSource& s1, const CorrelatedSource& s2) {
  if (s1.sender_size() != s2.sender_size() || s1.receiver_size() != s2.receiver_size()) {
    throw Error(ErrorKind::AlphabetMismatch, "sources have different alphabets");
  }
  return (s1.joint() - s2.joint()).cwiseAbs().sum();
}

bool zero_capacity_condition(const Avcqc& w, int n, const Caps& caps) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "block length must be positive");
  checked_power(static_cast<std::uint64_t>(w.dim()), n, caps.max_dim, ErrorKind::DimOverflow);
  const std::uint64_t nx = checked_power(static_cast<std::uint64_t>(w.num_inputs()), n, caps.max_enumeration,
                                         ErrorKind::EnumerationOverflow);
  const std::uint64_t ns = checked_power(static_cast<std::uint64_t>(w.num_states()), n, caps.max_jammer,
                                         ErrorKind::EnumerationOverflow);
  std::vector<RealMatrix> hulls;
  for (std::uint64_t xi = 0; xi < nx; ++xi) {
    const Sequence xs = sequence_at(xi, w.num_inputs(), n);
    RealMatrix pts;
    for (std::uint64_t si = 0; si < ns; ++si) {
      const RealVector e = embed_hermitian(product_output_matrix(w, xs, sequence_at(si, w.num_states(), n)));
      if (si == 0) pts.resize(e.size(), static_cast<Eigen::Index>(ns));
      pts.col(static_cast<Eigen::Index>(si)) = e;
    }
    hulls.push_back(std::move(pts));
  }
  const double gap = default_tolerances().separation_lower;
  for (std::size_t a = 0; a < hulls.size(); ++a) {
    for (std::size_t b = a + 1; b < hulls.size(); ++b) {
      if (hull_distance(hulls[a], hulls[b]) > gap) return false;
    }
  }
  return true;
}

}  // namespace avcqc
