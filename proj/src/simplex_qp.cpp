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

#include "avcqc/simplex_qp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace avcqc {

void project_to_simplex(std::span<double> v) {
  const std::size_t n = v.size();
  if (n == 0) return;
  std::vector<double> u(v.begin(), v.end());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    cumulative += u[i];
    const double t = (cumulative - 1.0) / static_cast<double>(i + 1);
    if (u[i] - t > 0.0) theta = t;
  }
  for (double& x : v) x = std::max(x - theta, 0.0);
}

void project_to_simplices(std::vector<double>& y, const std::vector<int>& blocks) {
  std::size_t offset = 0;
  for (int b : blocks) {
    project_to_simplex(std::span<double>(y.data() + offset, static_cast<std::size_t>(b)));
    offset += static_cast<std::size_t>(b);
  }
}

namespace {

struct Problem {
  const RealMatrix& m;
  const RealVector& t;
  const std::vector<int>& blocks;
  RealMatrix gram;
  RealVector lin;  // M^T t
  std::vector<int> block_of;
};

double residual(const Problem& p, const RealVector& y) { return (p.m * y - p.t).norm(); }

double objective(const Problem& p, const RealVector& y) { return y.dot(p.gram * y) - 2.0 * p.lin.dot(y); }

RealVector to_vec(const std::vector<double>& y) {
  return Eigen::Map<const RealVector>(y.data(), static_cast<Eigen::Index>(y.size()));
}

std::vector<double> to_std(const RealVector& y) { return std::vector<double>(y.data(), y.data() + y.size()); }

// Exact solution of the equality-constrained problem on the working set:
// min y^T G y - 2 h^T y with one sum-to-one constraint per block.
RealVector solve_working_set(const Problem& p, const std::vector<int>& work) {
  const int nb = static_cast<int>(p.blocks.size());
  const int k = static_cast<int>(work.size());
  RealMatrix kkt = RealMatrix::Zero(k + nb, k + nb);
  RealVector rhs = RealVector::Zero(k + nb);
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) kkt(a, b) = 2.0 * p.gram(work[a], work[b]);
    rhs(a) = 2.0 * p.lin(work[a]);
    const int blk = p.block_of[static_cast<std::size_t>(work[a])];
    kkt(a, k + blk) = 1.0;
    kkt(k + blk, a) = 1.0;
  }
  for (int b = 0; b < nb; ++b) rhs(k + b) = 1.0;
  Eigen::CompleteOrthogonalDecomposition<RealMatrix> cod(kkt);
  cod.setThreshold(1e-13);
  const RealVector sol = cod.solve(rhs);
  RealVector y = RealVector::Zero(p.m.cols());
  for (int a = 0; a < k; ++a) y(work[a]) = sol(a);
  return y;
}

RealVector active_set_polish(const Problem& p, RealVector y, int max_steps, bool* converged) {
  const Eigen::Index n = y.size();
  std::vector<char> in(static_cast<std::size_t>(n), 0);
  // Start from the numerical support, renormalized per block.
  std::size_t offset = 0;
  for (int b : p.blocks) {
    double total = 0.0;
    for (int i = 0; i < b; ++i) {
      auto idx = static_cast<Eigen::Index>(offset) + i;
      if (y(idx) <= 1e-10) y(idx) = 0.0;
      total += y(idx);
    }
    if (total <= 0.0) {
      // Keep the block feasible by pinning its largest entry.
      y(static_cast<Eigen::Index>(offset)) = 1.0;
      total = 1.0;
    }
    for (int i = 0; i < b; ++i) {
      auto idx = static_cast<Eigen::Index>(offset) + i;
      y(idx) /= total;
      in[static_cast<std::size_t>(idx)] = y(idx) > 0.0;
    }
    offset += static_cast<std::size_t>(b);
  }

  *converged = false;
  for (int step = 0; step < max_steps; ++step) {
    std::vector<int> work;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (in[static_cast<std::size_t>(i)]) work.push_back(static_cast<int>(i));
    }
    const RealVector cand = solve_working_set(p, work);
    bool feasible = true;
    for (int i : work) {
      if (cand(i) < -1e-15) feasible = false;
    }
    if (feasible) {
      y = cand.cwiseMax(0.0);
      const RealVector g = 2.0 * (p.gram * y - p.lin);
      std::vector<double> nu(p.blocks.size(), 0.0);
      std::vector<int> cnt(p.blocks.size(), 0);
      for (int i : work) {
        const auto blk = static_cast<std::size_t>(p.block_of[static_cast<std::size_t>(i)]);
        nu[blk] += g(i);
        cnt[blk] += 1;
      }
      for (std::size_t b = 0; b < nu.size(); ++b) nu[b] /= std::max(cnt[b], 1);
      const double scale = 1.0 + g.cwiseAbs().maxCoeff();
      int enter = -1;
      double worst = -1e-12 * scale;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (in[static_cast<std::size_t>(i)]) continue;
        const double red = g(i) - nu[static_cast<std::size_t>(p.block_of[static_cast<std::size_t>(i)])];
        if (red < worst) {
          worst = red;
          enter = static_cast<int>(i);
        }
      }
      if (enter < 0) {
        *converged = true;
        return y;
      }
      in[static_cast<std::size_t>(enter)] = 1;
      continue;
    }
    // Step toward the candidate until the first coordinate hits zero.
    double alpha = 1.0;
    for (int i : work) {
      if (cand(i) < 0.0) alpha = std::min(alpha, y(i) / (y(i) - cand(i)));
    }
    y = y + alpha * (cand - y);
    for (int i : work) {
      if (y(i) <= 1e-15) {
        y(i) = 0.0;
        in[static_cast<std::size_t>(i)] = 0;
      }
    }
  }
  return y;
}

}  // namespace

SimplexQpResult minimize_on_simplices(const RealMatrix& m, const RealVector& t,
                                      const std::vector<int>& blocks, std::vector<double> start,
                                      const SimplexQpOptions& opts) {
  const int total = std::accumulate(blocks.begin(), blocks.end(), 0);
  if (total != m.cols() || static_cast<int>(start.size()) != total || t.size() != m.rows()) {
    throw Error(ErrorKind::DimensionMismatch, "simplex QP: blocks sum to " + std::to_string(total) +
                                                  ", matrix has " + std::to_string(m.cols()) + " columns");
  }
  Problem p{m, t, blocks, m.transpose() * m, m.transpose() * t, {}};
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    for (int i = 0; i < blocks[b]; ++i) p.block_of.push_back(static_cast<int>(b));
  }

  project_to_simplices(start, blocks);
  RealVector y = to_vec(start);
  const double lip =
      2.0 *
      std::max(
          Eigen::SelfAdjointEigenSolver<RealMatrix>(p.gram, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff(),
          1e-12);
  RealVector z = y;
  double tk = 1.0;
  double fy = objective(p, y);
  int it = 0;
  for (; it < opts.max_iterations; ++it) {
    const RealVector grad = 2.0 * (p.gram * z - p.lin);
    std::vector<double> next = to_std(z - grad / lip);
    project_to_simplices(next, blocks);
    const RealVector yn = to_vec(next);
    const double fn = objective(p, yn);
    if (fn > fy) {
      // Adaptive restart: drop momentum and retry from the last iterate.
      if (tk == 1.0) break;
      z = y;
      tk = 1.0;
      continue;
    }
    const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
    z = yn + ((tk - 1.0) / tn) * (yn - y);
    const double move = (yn - y).cwiseAbs().maxCoeff();
    y = yn;
    fy = fn;
    tk = tn;
    if (move < opts.step_tolerance) break;
  }

  SimplexQpResult out;
  out.iterations = it;
  out.distance = residual(p, y);
  out.y = to_std(y);

  bool converged = false;
  const RealVector polished = active_set_polish(p, y, opts.max_polish_steps, &converged);
  bool ok = true;
  std::size_t offset = 0;
  for (int b : blocks) {
    double s = 0.0;
    for (int i = 0; i < b; ++i) {
      const double v = polished(static_cast<Eigen::Index>(offset) + i);
      if (v < 0.0 || !std::isfinite(v)) ok = false;
      s += v;
    }
    if (std::abs(s - 1.0) > 1e-12) ok = false;
    offset += static_cast<std::size_t>(b);
  }
  if (ok) {
    const double d = residual(p, polished);
    if (d <= out.distance) {
      out.distance = d;
      out.y = to_std(polished);
      out.polished = converged;
    }
  }
  return out;
}

double hull_distance(const RealMatrix& a, const RealMatrix& b, std::vector<double>* wa,
                     std::vector<double>* wb) {
  if (a.rows() != b.rows()) {
    throw Error(ErrorKind::DimensionMismatch, "hull_distance: point dimensions differ");
  }
  RealMatrix m(a.rows(), a.cols() + b.cols());
  m << a, -b;
  const std::vector<int> blocks{static_cast<int>(a.cols()), static_cast<int>(b.cols())};
  std::vector<double> start;
  for (Eigen::Index i = 0; i < a.cols(); ++i) start.push_back(1.0 / static_cast<double>(a.cols()));
  for (Eigen::Index i = 0; i < b.cols(); ++i) start.push_back(1.0 / static_cast<double>(b.cols()));
  const SimplexQpResult r = minimize_on_simplices(m, RealVector::Zero(a.rows()), blocks, start);
  if (wa) wa->assign(r.y.begin(), r.y.begin() + a.cols());
  if (wb) wb->assign(r.y.begin() + a.cols(), r.y.end());
  return r.distance;
}

}  // namespace avcqc
