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

#include "avcqc/typicality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace avcqc {

namespace {

constexpr double kCountSlack = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<int> counts_of(const Sequence& x, int alphabet) {
  std::vector<int> c(static_cast<std::size_t>(alphabet), 0);
  for (int a : x) ++c[static_cast<std::size_t>(a)];
  return c;
}

std::vector<double> clamp_distribution(const RealVector& v) {
  std::vector<double> p(static_cast<std::size_t>(v.size()));
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    p[static_cast<std::size_t>(i)] = std::max(v(i), 0.0);
    s += p[static_cast<std::size_t>(i)];
  }
  for (double& x : p) x /= s;
  return p;
}

std::vector<Sequence> enumerate_typical(const std::vector<double>& p, int n, double delta, const Caps& caps) {
  const int base = static_cast<int>(p.size());
  const std::uint64_t total = checked_power(static_cast<std::uint64_t>(base), n, caps.max_enumeration,
                                            ErrorKind::EnumerationOverflow);
  std::vector<Sequence> out;
  for (std::uint64_t i = 0; i < total; ++i) {
    Sequence x = sequence_at(i, base, n);
    if (is_typical(x, p, delta)) out.push_back(std::move(x));
  }
  return out;
}

Eigen::VectorXcd product_vector(const std::vector<Matrix>& bases, const Sequence& labels) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Ones(1);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const Eigen::VectorXcd col = bases[i].col(labels[i]);
    Eigen::VectorXcd next(v.size() * col.size());
    for (Eigen::Index a = 0; a < v.size(); ++a) next.segment(a * col.size(), col.size()) = v(a) * col;
    v = std::move(next);
  }
  return v;
}

Matrix support_basis(const TypicalProjector& tp) {
  const auto dim = static_cast<Eigen::Index>(std::pow(tp.local_dim, tp.n) + 0.5);
  Matrix v(dim, tp.rank());
  for (int k = 0; k < tp.rank(); ++k)
    v.col(k) = product_vector(tp.local_bases, tp.basis_labels[static_cast<std::size_t>(k)]);
  return v;
}

Matrix tensor_power_of(const std::vector<Matrix>& factors) {
  Matrix out = Matrix::Identity(1, 1);
  for (const Matrix& f : factors) out = kron(out, f);
  return out;
}

void attach_dense(TypicalProjector& tp) {
  const double dim = std::pow(tp.local_dim, tp.n);
  if (dim <= static_cast<double>(kMaterializeLimit)) {
    tp.projector = HermitianOperator::hermitian_part(tp.dense());
  }
}

}  // namespace

bool is_typical(const Sequence& x, const std::vector<double>& p, double delta) {
  const int alphabet = static_cast<int>(p.size());
  const std::vector<int> c = counts_of(x, alphabet);
  const double n = static_cast<double>(x.size());
  const double bound = delta / alphabet + kCountSlack;
  for (int a = 0; a < alphabet; ++a) {
    const double freq = n > 0 ? c[static_cast<std::size_t>(a)] / n : p[static_cast<std::size_t>(a)];
    if (std::abs(freq - p[static_cast<std::size_t>(a)]) > bound) return false;
  }
  return true;
}

std::vector<Sequence> typical_set(const ProbabilityVector& p, int n, double delta, const Caps& caps) {
  if (n < 0) throw Error(ErrorKind::InvalidArgument, "block length must be nonnegative");
  return enumerate_typical(p.weights(), n, delta, caps);
}

Eigenbasis canonical_eigenbasis(const Matrix& rho) {
  const Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho + rho.adjoint()));
  const Eigen::Index d = rho.rows();
  Eigenbasis out;
  out.values.resize(d);
  out.vectors.resize(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    out.values(i) = es.eigenvalues()(d - 1 - i);
    out.vectors.col(i) = es.eigenvectors().col(d - 1 - i);
  }
  Eigen::Index start = 0;
  while (start < d) {
    Eigen::Index end = start + 1;
    while (end < d && std::abs(out.values(end - 1) - out.values(end)) < 1e-9) ++end;
    const Eigen::Index m = end - start;
    if (m > 1) {
      const Matrix block = out.vectors.middleCols(start, m);
      const Matrix proj = block * block.adjoint();
      std::vector<Eigen::VectorXcd> chosen;
      for (Eigen::Index k = 0; k < d && static_cast<Eigen::Index>(chosen.size()) < m; ++k) {
        Eigen::VectorXcd v = proj.col(k);
        for (const auto& c : chosen) v -= c.dot(v) * c;
        for (const auto& c : chosen) v -= c.dot(v) * c;
        const double nv = v.norm();
        if (nv > 1e-6) chosen.push_back(v / nv);
      }
      for (Eigen::Index k = 0; k < m; ++k) out.vectors.col(start + k) = chosen[static_cast<std::size_t>(k)];
    }
    start = end;
  }
  for (Eigen::Index c = 0; c < d; ++c) {
    for (Eigen::Index r = 0; r < d; ++r) {
      const Complex z = out.vectors(r, c);
      if (std::abs(z) > 1e-12) {
        out.vectors.col(c) *= std::conj(z) / std::abs(z);
        break;
      }
    }
  }
  return out;
}

Matrix TypicalProjector::dense(const Caps& caps) const {
  const std::uint64_t dim =
      checked_power(static_cast<std::uint64_t>(local_dim), n, caps.max_dim, ErrorKind::DimOverflow);
  const Matrix v = support_basis(*this);
  if (v.cols() == 0) return Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  return v * v.adjoint();
}

TypicalProjector typical_projector(const DensityOperator& rho, int n, double alpha, const Caps& caps) {
  const Eigenbasis eb = canonical_eigenbasis(rho.matrix());
  TypicalProjector tp;
  tp.n = n;
  tp.alpha = alpha;
  tp.local_dim = rho.dim();
  tp.local_bases.assign(static_cast<std::size_t>(n), eb.vectors);
  tp.basis_labels = enumerate_typical(clamp_distribution(eb.values), n, alpha, caps);
  attach_dense(tp);
  return tp;
}

TypicalProjector conditional_typical_projector(const CqChannel& w, const Sequence& xs, double alpha,
                                               const Caps& caps) {
  const int n = static_cast<int>(xs.size());
  TypicalProjector tp;
  tp.n = n;
  tp.alpha = alpha;
  tp.local_dim = w.dim();
  std::vector<Eigenbasis> bases;
  for (int a = 0; a < w.num_inputs(); ++a) bases.push_back(canonical_eigenbasis(w.state(a).matrix()));
  std::vector<std::vector<int>> positions(static_cast<std::size_t>(w.num_inputs()));
  for (int i = 0; i < n; ++i) {
    if (xs[static_cast<std::size_t>(i)] < 0 || xs[static_cast<std::size_t>(i)] >= w.num_inputs()) {
      throw Error(ErrorKind::AlphabetMismatch, "input letter out of range at position " + std::to_string(i));
    }
    positions[static_cast<std::size_t>(xs[static_cast<std::size_t>(i)])].push_back(i);
    tp.local_bases.push_back(bases[static_cast<std::size_t>(xs[static_cast<std::size_t>(i)])].vectors);
  }
  std::vector<std::vector<Sequence>> blocks;
  std::uint64_t total = 1;
  for (int a = 0; a < w.num_inputs(); ++a) {
    const int m = static_cast<int>(positions[static_cast<std::size_t>(a)].size());
    blocks.push_back(
        enumerate_typical(clamp_distribution(bases[static_cast<std::size_t>(a)].values), m, alpha, caps));
    total *= blocks.back().size();
    if (total > caps.max_enumeration) {
      throw Error(ErrorKind::EnumerationOverflow,
                  "conditional typical labels exceed the cap " + std::to_string(caps.max_enumeration));
    }
  }
  if (total > 0) {
    std::vector<std::size_t> pick(blocks.size(), 0);
    for (std::uint64_t c = 0; c < total; ++c) {
      Sequence labels(static_cast<std::size_t>(n), 0);
      for (std::size_t a = 0; a < blocks.size(); ++a) {
        const Sequence& t = blocks[a][pick[a]];
        for (std::size_t k = 0; k < t.size(); ++k) labels[static_cast<std::size_t>(positions[a][k])] = t[k];
      }
      tp.basis_labels.push_back(std::move(labels));
      for (std::size_t a = blocks.size(); a-- > 0;) {
        if (++pick[a] < blocks[a].size()) break;
        pick[a] = 0;
      }
    }
    std::sort(tp.basis_labels.begin(), tp.basis_labels.end());
  }
  attach_dense(tp);
  return tp;
}

std::optional<Sequence> representative_typical_sequence(const ProbabilityVector& p, int n, double delta,
                                                        const Caps& caps) {
  const std::vector<Sequence> all = typical_set(p, n, delta, caps);
  std::optional<Sequence> best;
  double best_dist = kInf;
  for (const Sequence& x : all) {
    const std::vector<int> c = counts_of(x, p.size());
    double dist = 0.0;
    for (int a = 0; a < p.size(); ++a)
      dist += std::abs(c[static_cast<std::size_t>(a)] / static_cast<double>(n) - p[a]);
    if (dist < best_dist - 1e-12) {
      best_dist = dist;
      best = x;
    }
  }
  return best;
}

// --- bound verification -----------------------------------------------------

namespace {

struct SideValues {
  double trace = 0.0;  // tr(state Pi)
  int rank = 0;
  double min_eig = 0.0;  // extremal eigenvalues of the compressed state on the support
  double max_eig = 0.0;
};

SideValues compressed_values(const TypicalProjector& tp, const std::vector<Matrix>& factors,
                             const std::vector<RealVector>& local_diag) {
  SideValues sv;
  sv.rank = tp.rank();
  if (sv.rank == 0) return sv;
  const double dim = std::pow(tp.local_dim, tp.n);
  if (dim <= static_cast<double>(kMaterializeLimit)) {
    const Matrix v = support_basis(tp);
    const Matrix state = tensor_power_of(factors);
    const Matrix comp = v.adjoint() * state * v;
    const RealVector ev =
        Eigen::SelfAdjointEigenSolver<Matrix>(0.5 * (comp + comp.adjoint()), Eigen::EigenvaluesOnly)
            .eigenvalues();
    sv.trace = comp.trace().real();
    sv.min_eig = ev(0);
    sv.max_eig = ev(ev.size() - 1);
    return sv;
  }
  // The state is diagonal in the product label basis: use label weights.
  sv.min_eig = kInf;
  sv.max_eig = 0.0;
  for (const Sequence& l : tp.basis_labels) {
    double w = 1.0;
    for (std::size_t i = 0; i < l.size(); ++i) w *= local_diag[i](l[i]);
    sv.trace += w;
    sv.min_eig = std::min(sv.min_eig, w);
    sv.max_eig = std::max(sv.max_eig, w);
  }
  return sv;
}

// tr(prod_i W(x_i) Pi) for a projector diagonal in a fixed product basis that
// need not diagonalize the W(x_i).
double cross_trace(const TypicalProjector& tp, const std::vector<Matrix>& factors) {
  if (tp.rank() == 0) return 0.0;
  std::vector<RealVector> w(factors.size());
  for (std::size_t i = 0; i < factors.size(); ++i) {
    const Matrix& b = tp.local_bases[i];
    w[i] = (b.adjoint() * factors[i] * b).diagonal().real();
  }
  double total = 0.0;
  for (const Sequence& l : tp.basis_labels) {
    double p = 1.0;
    for (std::size_t i = 0; i < l.size(); ++i) p *= w[i](l[i]);
    total += p;
  }
  return total;
}

struct PerN {
  int n = 0;
  SideValues sigma;
  bool has_x = false;
  SideValues cond;
  double te7 = 0.0;
};

double beta_limit(double lhs, int n) {
  if (lhs >= 1.0) return kInf;
  if (lhs <= 0.0) return 0.0;
  return -std::log2(1.0 - lhs) / n;
}

double fit_beta(const std::vector<std::pair<double, int>>& samples) {
  double b = kInf;
  for (const auto& [lhs, n] : samples) b = std::min(b, beta_limit(lhs, n));
  if (b == kInf) return 1.0;  // every positive constant is admissible
  return 0.5 * b;
}

}  // namespace

bool TypicalityReport::family_pass(const std::string& family) const {
  bool any = false;
  for (const auto& r : records) {
    if (r.bound_id.rfind(family, 0) != 0) continue;
    any = true;
    if (!r.pass) return false;
  }
  return any;
}

bool TypicalityReport::all_pass() const {
  for (const auto& r : records) {
    if (!r.pass) return false;
  }
  return !records.empty();
}

std::string TypicalityReport::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "bound_id,n,lhs,rhs,slack,fitted_constant\n";
  for (const auto& r : records) {
    os << r.bound_id << ',' << r.n << ',' << r.lhs << ',' << r.rhs << ',' << r.slack << ','
       << r.fitted_constant << '\n';
  }
  return os.str();
}

TypicalityReport verify_typicality_bounds(const CqChannel& w, const ProbabilityVector& p,
                                          const std::vector<int>& n_values, double alpha, const Caps& caps) {
  if (p.size() != w.num_inputs()) {
    throw Error(ErrorKind::AlphabetMismatch, "input distribution does not match the channel");
  }
  const int d = w.dim();
  Matrix pw = Matrix::Zero(d, d);
  double s_cond = 0.0;
  for (int x = 0; x < w.num_inputs(); ++x) {
    pw += p[x] * w.state(x).matrix();
    s_cond += p[x] * von_neumann_entropy(w.state(x));
  }
  const DensityOperator sigma = DensityOperator::from_trusted(pw);
  const double s_sigma = von_neumann_entropy(sigma);
  const Eigenbasis sigma_eb = canonical_eigenbasis(sigma.matrix());
  std::vector<Eigenbasis> w_eb;
  for (int x = 0; x < w.num_inputs(); ++x) w_eb.push_back(canonical_eigenbasis(w.state(x).matrix()));

  std::vector<PerN> rows;
  for (int n : n_values) {
    PerN r;
    r.n = n;
    const TypicalProjector pi = typical_projector(sigma, n, alpha, caps);
    r.sigma = compressed_values(pi, std::vector<Matrix>(static_cast<std::size_t>(n), pw),
                                std::vector<RealVector>(static_cast<std::size_t>(n), sigma_eb.values));
    const std::optional<Sequence> x = representative_typical_sequence(p, n, alpha, caps);
    if (x) {
      r.has_x = true;
      const TypicalProjector cond = conditional_typical_projector(w, *x, alpha, caps);
      std::vector<Matrix> factors;
      std::vector<RealVector> diag;
      for (int a : *x) {
        factors.push_back(w.state(a).matrix());
        diag.push_back(w_eb[static_cast<std::size_t>(a)].values);
      }
      r.cond = compressed_values(cond, factors, diag);
      r.te7 = cross_trace(pi, factors);
    }
    rows.push_back(r);
  }

  TypicalityReport rep;
  rep.alpha = alpha;
  // Fitted constants over all tested n.
  std::vector<std::pair<double, int>> s1;
  std::vector<std::pair<double, int>> s4;
  std::vector<std::pair<double, int>> s7;
  double delta = -kInf;
  double gamma = -kInf;
  double delta_c = -kInf;
  double gamma_c = -kInf;
  for (const PerN& r : rows) {
    s1.emplace_back(r.sigma.trace, r.n);
    if (r.sigma.rank == 0) {
      delta = kInf;
    } else {
      const double lr = std::log2(static_cast<double>(r.sigma.rank)) / r.n;
      delta = std::max({delta, s_sigma - lr, lr - s_sigma});
      gamma = std::max(
          {gamma, -std::log2(r.sigma.min_eig) / r.n - s_sigma, s_sigma + std::log2(r.sigma.max_eig) / r.n});
    }
    if (!r.has_x) continue;
    s4.emplace_back(r.cond.trace, r.n);
    s7.emplace_back(r.te7, r.n);
    if (r.cond.rank == 0) {
      delta_c = kInf;
    } else {
      const double lr = std::log2(static_cast<double>(r.cond.rank)) / r.n;
      delta_c = std::max({delta_c, s_cond - lr, lr - s_cond});
      gamma_c = std::max(
          {gamma_c, -std::log2(r.cond.min_eig) / r.n - s_cond, s_cond + std::log2(r.cond.max_eig) / r.n});
    }
  }
  rep.beta = fit_beta(s1);
  rep.beta_cond = fit_beta(s4);
  rep.beta_pw = fit_beta(s7);
  rep.delta = std::max(delta, 0.0);
  rep.gamma = std::max(gamma, 0.0);
  rep.delta_cond = std::max(delta_c, 0.0);
  rep.gamma_cond = std::max(gamma_c, 0.0);

  constexpr double kTol = 1e-9;
  auto push = [&](const std::string& id, int n, double lhs, double rhs, double slack, double c,
                  bool admissible, bool vacuous) {
    BoundRecord b{id, n, lhs, rhs, slack, c, false, vacuous};
    b.pass = vacuous || (admissible && std::isfinite(c) && slack >= -kTol * std::max(1.0, std::abs(rhs)));
    rep.records.push_back(std::move(b));
  };
  auto strict_pass = [&](const std::string& id, int n, double lhs, double beta, bool vacuous) {
    const double rhs = 1.0 - std::exp2(-n * beta);
    BoundRecord b{id, n, lhs, rhs, lhs - rhs, beta, false, vacuous};
    b.pass = vacuous || (beta > 0.0 && lhs > rhs);
    rep.records.push_back(std::move(b));
  };

  for (const PerN& r : rows) {
    const int n = r.n;
    strict_pass("te1", n, r.sigma.trace, rep.beta, false);
    {
      const double lo = std::exp2(n * (s_sigma - rep.delta));
      const double hi = std::exp2(n * (s_sigma + rep.delta));
      const double rank = r.sigma.rank;
      push("te2_lower", n, rank, lo, rank - lo, rep.delta, std::isfinite(rep.delta), false);
      push("te2_upper", n, rank, hi, hi - rank, rep.delta, std::isfinite(rep.delta), false);
    }
    {
      const double lo = std::exp2(-n * (s_sigma + rep.gamma));
      const double hi = std::exp2(-n * (s_sigma - rep.gamma));
      if (r.sigma.rank == 0) {
        push("te3_lower", n, 0.0, 0.0, 0.0, rep.gamma, true, false);
        push("te3_upper", n, 0.0, 0.0, 0.0, rep.gamma, true, false);
      } else {
        push("te3_lower", n, r.sigma.min_eig, lo, r.sigma.min_eig - lo, rep.gamma, true, false);
        push("te3_upper", n, r.sigma.max_eig, hi, hi - r.sigma.max_eig, rep.gamma, true, false);
      }
    }
    if (!r.has_x) {
      for (const char* id : {"te4", "te5_lower", "te5_upper", "te6_lower", "te6_upper", "te7"}) {
        push(id, n, 0.0, 0.0, 0.0, 0.0, true, true);
      }
      continue;
    }
    strict_pass("te4", n, r.cond.trace, rep.beta_cond, false);
    {
      const double lo = std::exp2(-n * (s_cond + rep.gamma_cond));
      const double hi = std::exp2(-n * (s_cond - rep.gamma_cond));
      if (r.cond.rank == 0) {
        push("te5_lower", n, 0.0, 0.0, 0.0, rep.gamma_cond, true, false);
        push("te5_upper", n, 0.0, 0.0, 0.0, rep.gamma_cond, true, false);
      } else {
        push("te5_lower", n, r.cond.min_eig, lo, r.cond.min_eig - lo, rep.gamma_cond, true, false);
        push("te5_upper", n, r.cond.max_eig, hi, hi - r.cond.max_eig, rep.gamma_cond, true, false);
      }
    }
    {
      const double lo = std::exp2(n * (s_cond - rep.delta_cond));
      const double hi = std::exp2(n * (s_cond + rep.delta_cond));
      const double rank = r.cond.rank;
      push("te6_lower", n, rank, lo, rank - lo, rep.delta_cond, std::isfinite(rep.delta_cond), false);
      push("te6_upper", n, rank, hi, hi - rank, rep.delta_cond, std::isfinite(rep.delta_cond), false);
    }
    {
      const double rhs = 1.0 - std::exp2(-n * rep.beta_pw);
      BoundRecord b{"te7", n, r.te7, rhs, r.te7 - rhs, rep.beta_pw, false, false};
      b.pass = rep.beta_pw > 0.0 && b.slack >= -kTol;
      rep.records.push_back(std::move(b));
    }
  }
  return rep;
}

}  // namespace avcqc
