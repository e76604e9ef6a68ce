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

#include "avcqc/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "avcqc/kw_separation.hpp"
#include "avcqc/random.hpp"
#include "avcqc/simplex_qp.hpp"

namespace avcqc {

namespace {

constexpr double kLogFloor = 1e-15;

double entropy_of(const Matrix& m) { return von_neumann_entropy(m); }

}  // namespace

// --- Holevo quantity --------------------------------------------------------

double holevo_chi(std::span<const double> p, const std::vector<Matrix>& states) {
  if (p.size() != states.size()) {
    throw Error(ErrorKind::AlphabetMismatch, "distribution has " + std::to_string(p.size()) +
                                                 " entries for " + std::to_string(states.size()) + " inputs");
  }
  Matrix avg = Matrix::Zero(states.front().rows(), states.front().cols());
  double cond = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) {
    if (p[x] == 0.0) continue;
    avg += p[x] * states[x];
    cond += p[x] * entropy_of(states[x]);
  }
  return std::max(entropy_of(avg) - cond, 0.0);
}

double holevo_chi(const ProbabilityVector& p, const CqChannel& w) {
  std::vector<Matrix> states;
  for (const auto& s : w.states()) states.push_back(s.matrix());
  return holevo_chi(p.weights(), states);
}

HolevoCapacity holevo_capacity(const std::vector<Matrix>& states, double tol, int max_iterations) {
  const std::size_t nx = states.size();
  std::vector<double> p(nx, 1.0 / static_cast<double>(nx));
  HolevoCapacity out;
  std::vector<double> div(nx);
  for (int it = 0; it < max_iterations; ++it) {
    Matrix avg = Matrix::Zero(states.front().rows(), states.front().cols());
    for (std::size_t x = 0; x < nx; ++x) avg += p[x] * states[x];
    double lower = 0.0;
    double upper = 0.0;
    for (std::size_t x = 0; x < nx; ++x) {
      div[x] = relative_entropy(states[x], avg);
      lower += p[x] * div[x];
      upper = std::max(upper, div[x]);
    }
    out.value = std::max(lower, 0.0);
    out.upper_bound = std::max(upper, out.value);
    out.p = p;
    out.iterations = it;
    if (upper - lower <= tol) break;
    double z = 0.0;
    for (std::size_t x = 0; x < nx; ++x) {
      p[x] *= std::exp2(div[x] - upper);
      z += p[x];
    }
    for (double& v : p) v /= z;
  }
  return out;
}

HolevoCapacity holevo_capacity(const CqChannel& w, double tol) {
  std::vector<Matrix> states;
  for (const auto& s : w.states()) states.push_back(s.matrix());
  return holevo_capacity(states, tol);
}

// --- inner minimization over jammer kernels ---------------------------------

namespace {

struct InnerEval {
  double chi = 0.0;
  std::vector<double> grad;
};

InnerEval evaluate_inner(const Avcqc& w, const std::vector<double>& p, const std::vector<double>& q,
                         bool with_gradient) {
  const int nx = w.num_inputs();
  const int ns = w.num_states();
  const std::vector<Matrix> avg_x = averaged_states(w, q);
  Matrix avg = Matrix::Zero(w.dim(), w.dim());
  double cond = 0.0;
  for (int x = 0; x < nx; ++x) {
    if (p[static_cast<std::size_t>(x)] == 0.0) continue;
    avg += p[static_cast<std::size_t>(x)] * avg_x[static_cast<std::size_t>(x)];
    cond += p[static_cast<std::size_t>(x)] * entropy_of(avg_x[static_cast<std::size_t>(x)]);
  }
  InnerEval out;
  out.chi = std::max(entropy_of(avg) - cond, 0.0);
  if (!with_gradient) return out;
  out.grad.assign(static_cast<std::size_t>(nx * ns), 0.0);
  const Matrix log_avg = log2_psd(avg, kLogFloor);
  for (int x = 0; x < nx; ++x) {
    const double px = p[static_cast<std::size_t>(x)];
    if (px == 0.0) continue;
    const Matrix diff = log2_psd(avg_x[static_cast<std::size_t>(x)], kLogFloor) - log_avg;
    for (int s = 0; s < ns; ++s) {
      out.grad[static_cast<std::size_t>(x * ns + s)] = px * trace_product(w.state(x, s).matrix(), diff);
    }
  }
  return out;
}

struct InnerRun {
  double value = 0.0;
  std::vector<double> q;
  int iterations = 0;
};

InnerRun inner_descent(const Avcqc& w, const std::vector<double>& p, std::vector<double> q,
                       const SolverOptions& opts) {
  const std::vector<int> blocks(static_cast<std::size_t>(w.num_inputs()), w.num_states());
  project_to_simplices(q, blocks);
  InnerEval cur = evaluate_inner(w, p, q, true);
  double step = 1.0;
  int increases = 0;
  int small = 0;
  int it = 0;
  for (; it < opts.max_inner_iterations; ++it) {
    bool accepted = false;
    std::vector<double> cand;
    InnerEval next;
    for (int bt = 0; bt < 60; ++bt) {
      cand = q;
      for (std::size_t i = 0; i < cand.size(); ++i) cand[i] -= step * cur.grad[i];
      project_to_simplices(cand, blocks);
      double decrease = 0.0;
      for (std::size_t i = 0; i < cand.size(); ++i) decrease += cur.grad[i] * (cand[i] - q[i]);
      next = evaluate_inner(w, p, cand, false);
      if (next.chi <= cur.chi + 1e-4 * decrease + 1e-15) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    double move = 0.0;
    for (std::size_t i = 0; i < cand.size(); ++i) move = std::max(move, std::abs(cand[i] - q[i]));
    if (next.chi > cur.chi) {
      if (++increases >= opts.divergence_window) {
        throw Error(ErrorKind::SolverDiverged,
                    "inner objective increased for " + std::to_string(increases) + " consecutive iterations");
      }
    } else {
      increases = 0;
    }
    const double change = std::abs(cur.chi - next.chi);
    q = std::move(cand);
    cur = evaluate_inner(w, p, q, true);
    step = std::min(step * 2.0, 1e6);
    small = change < 1e-14 ? small + 1 : 0;
    if (move < 1e-12 || small >= 10) break;
  }
  return {cur.chi, std::move(q), it};
}

std::vector<double> uniform_kernel(int nx, int ns) {
  return std::vector<double>(static_cast<std::size_t>(nx * ns), 1.0 / ns);
}

std::vector<double> random_kernel(Rng& rng, int nx, int ns) {
  std::vector<double> q;
  for (int x = 0; x < nx; ++x) {
    const std::vector<double> row = rng.simplex_point(ns);
    q.insert(q.end(), row.begin(), row.end());
  }
  return q;
}

JammerKernel to_kernel(const std::vector<double>& q, int nx, int ns) {
  std::vector<std::vector<double>> rows;
  for (int x = 0; x < nx; ++x) {
    std::vector<double> r(q.begin() + x * ns, q.begin() + (x + 1) * ns);
    double s = 0.0;
    for (double v : r) s += v;
    for (double& v : r) v /= s;
    rows.push_back(std::move(r));
  }
  return JammerKernel(rows);
}

ProbabilityVector to_distribution(std::vector<double> p) {
  double s = 0.0;
  for (double v : p) s += v;
  for (double& v : p) v /= s;
  return ProbabilityVector::from_weights(std::move(p));
}

InnerRun inner_with_restarts(const Avcqc& w, const std::vector<double>& p, const SolverOptions& opts,
                             std::uint64_t stream) {
  const int nx = w.num_inputs();
  const int ns = w.num_states();
  InnerRun best;
  best.value = std::numeric_limits<double>::infinity();
  Rng rng = Rng::stream(opts.seed, stream);
  for (int r = 0; r < std::max(opts.inner_restarts, 1); ++r) {
    std::vector<double> start = r == 0 ? uniform_kernel(nx, ns) : random_kernel(rng, nx, ns);
    InnerRun run = inner_descent(w, p, std::move(start), opts);
    if (run.value < best.value) best = std::move(run);
  }
  return best;
}

}  // namespace

InnerMinimum min_chi_over_jammer(const Avcqc& w, const ProbabilityVector& p, const SolverOptions& opts) {
  if (p.size() != w.num_inputs()) {
    throw Error(ErrorKind::AlphabetMismatch, "input distribution has " + std::to_string(p.size()) +
                                                 " entries, channel has " + std::to_string(w.num_inputs()) +
                                                 " inputs");
  }
  const InnerRun run = inner_with_restarts(w, p.weights(), opts, 0x1000);
  return {run.value, to_kernel(run.q, w.num_inputs(), w.num_states()), run.iterations};
}

// --- outer maximization -----------------------------------------------------

namespace {

struct OuterRun {
  double value = -1.0;
  std::vector<double> p;
  std::vector<double> q;
  std::vector<double> trace;
};

// Supergradient of P -> min_Q chi(P, Q) at the current minimizer.
std::vector<double> outer_gradient(const Avcqc& w, const std::vector<double>& p,
                                   const std::vector<double>& q) {
  const std::vector<Matrix> avg_x = averaged_states(w, q);
  Matrix avg = Matrix::Zero(w.dim(), w.dim());
  for (std::size_t x = 0; x < avg_x.size(); ++x) avg += p[x] * avg_x[x];
  std::vector<double> g(avg_x.size());
  for (std::size_t x = 0; x < avg_x.size(); ++x) {
    const double d = relative_entropy(avg_x[x], avg);
    g[x] = std::isfinite(d) ? d : 64.0;
  }
  return g;
}

OuterRun outer_ascent(const Avcqc& w, std::vector<double> p, const SolverOptions& opts) {
  const int nx = w.num_inputs();
  const int ns = w.num_states();
  OuterRun run;
  InnerRun inner = inner_descent(w, p, uniform_kernel(nx, ns), opts);
  run.p = p;
  run.q = inner.q;
  run.value = inner.value;
  run.trace.push_back(inner.value);
  double eta = 1.0;
  for (int it = 0; it < opts.max_outer_iterations; ++it) {
    const std::vector<double> g = outer_gradient(w, run.p, run.q);
    double gmax = *std::max_element(g.begin(), g.end());
    bool improved = false;
    for (int bt = 0; bt < 40 && !improved; ++bt) {
      std::vector<double> cand(run.p.size());
      double z = 0.0;
      for (std::size_t x = 0; x < cand.size(); ++x) {
        cand[x] = run.p[x] * std::exp2(eta * (g[x] - gmax));
        z += cand[x];
      }
      for (double& v : cand) v /= z;
      InnerRun ci = inner_descent(w, cand, run.q, opts);
      const InnerRun cu = inner_descent(w, cand, uniform_kernel(nx, ns), opts);
      if (cu.value < ci.value) ci = cu;
      if (ci.value > run.value) {
        run.p = std::move(cand);
        run.q = std::move(ci.q);
        run.value = ci.value;
        eta = std::min(eta * 1.5, 1e4);
        improved = true;
      } else {
        eta *= 0.5;
      }
    }
    run.trace.push_back(run.value);
    if (!improved) break;
    const std::size_t len = run.trace.size();
    const auto window = static_cast<std::size_t>(opts.stall_window);
    if (len > window && run.trace[len - 1] - run.trace[len - 1 - window] < opts.outer_tol) break;
  }
  return run;
}

}  // namespace

CapacityResult capacity_informed_jammer(const Avcqc& w, const SolverOptions& opts) {
  const int nx = w.num_inputs();
  const int ns = w.num_states();
  OuterRun best;
  for (int r = 0; r < std::max(opts.outer_restarts, 1); ++r) {
    std::vector<double> p0;
    if (r == 0) {
      p0.assign(static_cast<std::size_t>(nx), 1.0 / nx);
    } else {
      Rng rng = Rng::stream(opts.seed, static_cast<std::uint64_t>(r));
      p0 = rng.simplex_point(nx);
    }
    OuterRun run = outer_ascent(w, std::move(p0), opts);
    if (run.value > best.value) best = std::move(run);
  }
  // Final polish of the inner problem at the selected input distribution.
  const InnerRun final_inner = inner_with_restarts(w, best.p, opts, 0x2000);
  if (final_inner.value < best.value) {
    best.value = final_inner.value;
    best.q = final_inner.q;
  }

  CapacityResult out;
  out.value = std::clamp(best.value, 0.0, std::log2(static_cast<double>(w.dim())));
  out.argmax_p = to_distribution(best.p);
  out.argmin_q = to_kernel(best.q, nx, ns);
  out.solver_trace = std::move(best.trace);
  out.upper_bound = holevo_capacity(averaged_states(w, best.q)).upper_bound;
  out.duality_gap = std::max(out.upper_bound - out.value, 0.0);
  if (opts.run_oracle) {
    const GridOracleResult oracle =
        grid_oracle_capacity(w, opts.oracle_resolution, opts.oracle_max_evaluations);
    if (oracle.feasible) {
      out.certified = true;
      out.oracle_value = oracle.value;
      out.certified_gap = std::abs(out.value - oracle.value);
    }
  }
  return out;
}

// --- grid oracle ------------------------------------------------------------

std::vector<std::vector<int>> simplex_grid(int parts, int total) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(static_cast<std::size_t>(parts), 0);
  // Recursive fill: first coordinate most significant, descending from total.
  auto rec = [&](auto&& self, int pos, int left) -> void {
    if (pos == parts - 1) {
      cur[static_cast<std::size_t>(pos)] = left;
      out.push_back(cur);
      return;
    }
    for (int v = 0; v <= left; ++v) {
      cur[static_cast<std::size_t>(pos)] = v;
      self(self, pos + 1, left - v);
    }
  };
  rec(rec, 0, total);
  return out;
}

namespace {

struct GridChi {
  const Avcqc& w;
  std::uint64_t evaluations = 0;

  double operator()(const std::vector<double>& p, const std::vector<double>& q) {
    ++evaluations;
    return evaluate_inner(w, p, q, false).chi;
  }
};

// Pairwise mass-transfer pattern search on a product of simplices.
template <typename F>
double pattern_search(std::vector<double>& y, const std::vector<int>& blocks, double start_step,
                      double min_step, F&& f, bool maximize) {
  double best = f(y);
  const auto better = [&](double a, double b) { return maximize ? a > b : a < b; };
  for (double step = start_step; step >= min_step; step *= 0.5) {
    bool moved = true;
    int rounds = 0;
    while (moved && rounds++ < 200) {
      moved = false;
      std::size_t offset = 0;
      for (int b : blocks) {
        for (int i = 0; i < b; ++i) {
          for (int j = 0; j < b; ++j) {
            if (i == j) continue;
            const std::size_t a = offset + static_cast<std::size_t>(i);
            const std::size_t c = offset + static_cast<std::size_t>(j);
            const double delta = std::min(step, y[a]);
            if (delta <= 0.0) continue;
            y[a] -= delta;
            y[c] += delta;
            const double v = f(y);
            if (better(v, best)) {
              best = v;
              moved = true;
            } else {
              y[a] += delta;
              y[c] -= delta;
            }
          }
        }
        offset += static_cast<std::size_t>(b);
      }
    }
  }
  return best;
}

}  // namespace

GridOracleResult grid_oracle_capacity(const Avcqc& w, int resolution, std::uint64_t max_evaluations) {
  GridOracleResult out;
  const int nx = w.num_inputs();
  const int ns = w.num_states();
  const auto p_grid = simplex_grid(nx, resolution);
  const auto row_grid = simplex_grid(ns, resolution);
  std::uint64_t q_count = 1;
  for (int x = 0; x < nx; ++x) {
    if (q_count > max_evaluations / row_grid.size() + 1) return out;
    q_count *= row_grid.size();
  }
  if (q_count > max_evaluations / p_grid.size()) return out;

  const double k = static_cast<double>(resolution);
  // Precompute per-input averaged states and entropies for each grid row.
  std::vector<std::vector<Matrix>> rows(static_cast<std::size_t>(nx));
  std::vector<std::vector<double>> row_entropy(static_cast<std::size_t>(nx));
  for (int x = 0; x < nx; ++x) {
    for (const auto& r : row_grid) {
      Matrix m = Matrix::Zero(w.dim(), w.dim());
      for (int s = 0; s < ns; ++s) m += (r[static_cast<std::size_t>(s)] / k) * w.state(x, s).matrix();
      row_entropy[static_cast<std::size_t>(x)].push_back(von_neumann_entropy(m));
      rows[static_cast<std::size_t>(x)].push_back(std::move(m));
    }
  }
  GridChi chi{w};
  const std::vector<int> q_blocks(static_cast<std::size_t>(nx), ns);
  const std::vector<int> p_blocks{nx};

  // Grid min over Q followed by local refinement.
  auto grid_min = [&](const std::vector<double>& p, std::vector<double>* q_out) {
    double best = std::numeric_limits<double>::infinity();
    std::uint64_t best_idx = 0;
    for (std::uint64_t qi = 0; qi < q_count; ++qi) {
      std::uint64_t rem = qi;
      Matrix avg = Matrix::Zero(w.dim(), w.dim());
      double cond = 0.0;
      for (int x = nx - 1; x >= 0; --x) {
        const std::size_t ri = rem % row_grid.size();
        rem /= row_grid.size();
        const double px = p[static_cast<std::size_t>(x)];
        if (px == 0.0) continue;
        avg += px * rows[static_cast<std::size_t>(x)][ri];
        cond += px * row_entropy[static_cast<std::size_t>(x)][ri];
      }
      ++chi.evaluations;
      const double v = von_neumann_entropy(avg) - cond;
      if (v < best) {
        best = v;
        best_idx = qi;
      }
    }
    if (q_out) {
      q_out->assign(static_cast<std::size_t>(nx * ns), 0.0);
      std::uint64_t rem = best_idx;
      for (int x = nx - 1; x >= 0; --x) {
        const auto& r = row_grid[rem % row_grid.size()];
        rem /= row_grid.size();
        for (int s = 0; s < ns; ++s)
          (*q_out)[static_cast<std::size_t>(x * ns + s)] = r[static_cast<std::size_t>(s)] / k;
      }
    }
    return best;
  };
  auto refined_min = [&](const std::vector<double>& p, std::vector<double>* q_out) {
    std::vector<double> q;
    grid_min(p, &q);
    const double v = pattern_search(
        q, q_blocks, 0.5 / k, 1.0 / (k * 256.0), [&](const std::vector<double>& qq) { return chi(p, qq); },
        false);
    if (q_out) *q_out = q;
    return v;
  };

  double best = -1.0;
  std::vector<double> best_p;
  for (const auto& pg : p_grid) {
    std::vector<double> p(pg.size());
    for (std::size_t i = 0; i < pg.size(); ++i) p[i] = pg[i] / k;
    const double v = grid_min(p, nullptr);
    if (v > best) {
      best = v;
      best_p = p;
    }
  }
  std::vector<double> p = best_p;
  const double value = pattern_search(
      p, p_blocks, 0.5 / k, 1.0 / (k * 64.0),
      [&](const std::vector<double>& pp) { return refined_min(pp, nullptr); }, true);
  out.feasible = true;
  out.value = std::max(value, 0.0);
  out.p = p;
  refined_min(p, &out.q);
  out.evaluations = chi.evaluations;
  return out;
}

// --- common randomness ------------------------------------------------------

const char* to_string(CrCase c) {
  return c == CrCase::SmallCorrelation ? "SmallCorrelation" : "LargeCorrelation";
}

namespace {

RealMatrix aux_joint_sender(const RealMatrix& aux, const CorrelatedSource& src) {
  RealMatrix j(aux.rows(), aux.cols());
  for (Eigen::Index u = 0; u < aux.rows(); ++u) {
    for (Eigen::Index v = 0; v < aux.cols(); ++v) j(u, v) = aux(u, v) * src.sender_marginal()(v);
  }
  return j;
}

RealMatrix aux_joint_receiver(const RealMatrix& aux, const CorrelatedSource& src) {
  return aux * src.joint();
}

double mi_loose(const RealMatrix& joint) {
  Tolerances loose;
  loose.probability_sum = 1e-9;
  return mutual_information(joint.cwiseMax(0.0), loose);
}

struct AuxEval {
  double i_sender = 0.0;
  double i_receiver = 0.0;
};

AuxEval aux_eval(const RealMatrix& aux, const CorrelatedSource& src) {
  return {mi_loose(aux_joint_sender(aux, src)), mi_loose(aux_joint_receiver(aux, src))};
}

// Gradients of I(U;V') and I(U;V) with respect to aux(u, v'), up to
// per-column constants (irrelevant on the simplex).
void aux_gradients(const RealMatrix& aux, const CorrelatedSource& src, RealMatrix& g_sender,
                   RealMatrix& g_receiver) {
  constexpr double floor = 1e-12;
  const RealVector& pv = src.sender_marginal();
  const RealVector pu = aux * pv;
  const RealMatrix puv = aux_joint_receiver(aux, src);
  g_sender.resize(aux.rows(), aux.cols());
  g_receiver.resize(aux.rows(), aux.cols());
  for (Eigen::Index u = 0; u < aux.rows(); ++u) {
    const double lpu = std::log2(std::max(pu(u), floor));
    for (Eigen::Index vp = 0; vp < aux.cols(); ++vp) {
      g_sender(u, vp) = pv(vp) * (std::log2(std::max(aux(u, vp), floor)) - lpu);
      double acc = -pv(vp) * lpu;
      for (Eigen::Index v = 0; v < puv.cols(); ++v) {
        acc += src.joint(static_cast<int>(vp), static_cast<int>(v)) * std::log2(std::max(puv(u, v), floor));
      }
      g_receiver(u, vp) = acc;
    }
  }
}

void project_columns(RealMatrix& aux) {
  for (Eigen::Index c = 0; c < aux.cols(); ++c) {
    std::vector<double> col(aux.rows());
    for (Eigen::Index r = 0; r < aux.rows(); ++r) col[static_cast<std::size_t>(r)] = aux(r, c);
    project_to_simplex(col);
    for (Eigen::Index r = 0; r < aux.rows(); ++r) aux(r, c) = col[static_cast<std::size_t>(r)];
  }
}

// Moves aux toward the v'-independent channel with the same U marginal until
// the constraint holds; returns the feasible point.
RealMatrix repair_feasibility(const RealMatrix& aux, const CorrelatedSource& src, double bound) {
  auto feasible = [&](const RealMatrix& a) {
    const AuxEval e = aux_eval(a, src);
    return e.i_sender - e.i_receiver <= bound;
  };
  if (feasible(aux)) return aux;
  const RealVector pu = aux * src.sender_marginal();
  RealMatrix indep(aux.rows(), aux.cols());
  for (Eigen::Index c = 0; c < aux.cols(); ++c) indep.col(c) = pu;
  double lo = 0.0;  // weight on aux that is feasible
  double hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (feasible(mid * aux + (1.0 - mid) * indep)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo * aux + (1.0 - lo) * indep;
}

struct AuxSearch {
  double value = 0.0;
  RealMatrix aux;
};

AuxSearch aux_local_search(RealMatrix aux, const CorrelatedSource& src, double bound, int max_iter) {
  project_columns(aux);
  const double mus[] = {10.0, 1e2, 1e3, 1e4, 1e5, 1e6};
  auto objective = [&](const RealMatrix& a, double mu) {
    const AuxEval e = aux_eval(a, src);
    const double excess = std::max(0.0, e.i_sender - e.i_receiver - bound);
    return e.i_sender - mu * excess * excess;
  };
  for (double mu : mus) {
    double step = 0.5;
    double cur = objective(aux, mu);
    for (int it = 0; it < max_iter / 6; ++it) {
      RealMatrix gs;
      RealMatrix gr;
      aux_gradients(aux, src, gs, gr);
      const AuxEval e = aux_eval(aux, src);
      const double excess = std::max(0.0, e.i_sender - e.i_receiver - bound);
      const RealMatrix grad = gs - 2.0 * mu * excess * (gs - gr);
      bool accepted = false;
      RealMatrix cand;
      double cv = cur;
      for (int bt = 0; bt < 40; ++bt) {
        cand = aux + step * grad;
        project_columns(cand);
        cv = objective(cand, mu);
        if (cv > cur + 1e-15) {
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) break;
      const double move = (cand - aux).cwiseAbs().maxCoeff();
      aux = std::move(cand);
      cur = cv;
      step = std::min(step * 2.0, 64.0);
      if (move < 1e-13) break;
    }
  }
  aux = repair_feasibility(aux, src, bound);
  return {aux_eval(aux, src).i_sender, aux};
}

}  // namespace

double aux_information_sender(const RealMatrix& aux, const CorrelatedSource& src) {
  return aux_eval(aux, src).i_sender;
}

double aux_information_receiver(const RealMatrix& aux, const CorrelatedSource& src) {
  return aux_eval(aux, src).i_receiver;
}

double cr_case2_grid_oracle(double c_star, const CorrelatedSource& src, int resolution, double slack,
                            RealMatrix* best_aux) {
  if (src.sender_size() != 2) {
    throw Error(ErrorKind::NonBinarySource,
                "grid oracle needs a binary sender alphabet, got " + std::to_string(src.sender_size()));
  }
  const auto cols = simplex_grid(3, resolution);
  const double k = static_cast<double>(resolution);
  double best = 0.0;
  RealMatrix best_a = RealMatrix::Constant(3, 2, 1.0 / 3.0);
  RealMatrix a(3, 2);
  for (const auto& c0 : cols) {
    for (const auto& c1 : cols) {
      for (int u = 0; u < 3; ++u) {
        a(u, 0) = c0[static_cast<std::size_t>(u)] / k;
        a(u, 1) = c1[static_cast<std::size_t>(u)] / k;
      }
      const AuxEval e = aux_eval(a, src);
      if (e.i_sender - e.i_receiver <= c_star + slack && e.i_sender > best) {
        best = e.i_sender;
        best_a = a;
      }
    }
  }
  if (best_aux) *best_aux = best_a;
  return best;
}

CrCapacityResult cr_capacity_from_value(double c_star, const CorrelatedSource& src, const CrOptions& opts,
                                        const Tolerances& tol) {
  CrCapacityResult out;
  out.c_star = std::max(c_star, 0.0);
  out.source_mi = src.mutual_information();
  if (out.source_mi <= out.c_star + tol.case_tie_band) {
    out.case_tag = CrCase::SmallCorrelation;
    out.value = out.c_star + out.source_mi;
    return out;
  }
  out.case_tag = CrCase::LargeCorrelation;
  const double bound = out.c_star + opts.constraint_slack;
  const int nu = src.sender_size() + 1;
  const int nv = src.sender_size();

  AuxSearch best;
  best.value = -1.0;
  for (int r = 0; r < std::max(opts.aux_restarts, 1); ++r) {
    RealMatrix start = RealMatrix::Zero(nu, nv);
    if (r == 0) {
      for (int v = 0; v < nv; ++v) start(v, v) = 1.0;
    } else {
      Rng rng = Rng::stream(opts.solver.seed ^ 0xc0ffeeULL, static_cast<std::uint64_t>(r));
      for (int v = 0; v < nv; ++v) {
        const std::vector<double> col = rng.simplex_point(nu);
        for (int u = 0; u < nu; ++u) start(u, v) = col[static_cast<std::size_t>(u)];
      }
    }
    AuxSearch run = aux_local_search(std::move(start), src, bound, opts.aux_max_iterations);
    if (run.value > best.value) best = std::move(run);
  }
  out.search_value = best.value;
  out.value = best.value;
  out.aux_channel = best.aux;
  if (opts.run_oracle && src.sender_size() == 2) {
    RealMatrix oracle_aux;
    out.oracle_value =
        cr_case2_grid_oracle(out.c_star, src, opts.oracle_resolution, opts.constraint_slack, &oracle_aux);
    out.oracle_used = true;
    if (out.oracle_value > out.value) {
      out.value = out.oracle_value;
      out.aux_channel = oracle_aux;
    }
  }
  out.value = std::max(out.value, 0.0);
  return out;
}

CrCapacityResult cr_capacity(const Avcqc& w, const CorrelatedSource& src, const CrOptions& opts,
                             const Tolerances& tol) {
  const CapacityResult cap = capacity_informed_jammer(w, opts.solver);
  return cr_capacity_from_value(cap.value, src, opts, tol);
}

// --- rate-limited correlation -----------------------------------------------

RateLimitedBound rate_limited_from_values(double c_star, double rate_r, const LnProfile& profile) {
  RateLimitedBound out;
  out.c_star = std::max(c_star, 0.0);
  out.rate_r = std::max(rate_r, 0.0);
  const double f = profile.asymptotic_fraction;
  if (!(f >= 0.0 && f <= 1.0)) {
    throw Error(ErrorKind::ProfileOutOfRange,
                "asymptotic fraction " + std::to_string(f) + " is outside [0, 1]");
  }
  if (out.rate_r <= 0.0) {
    out.zero_rate = true;
    out.r_double_prime = std::numeric_limits<double>::infinity();
    out.value = (1.0 - f) * out.c_star;
    return out;
  }
  out.r_double_prime = 3.0 / out.rate_r;
  if (!(out.r_double_prime < profile.a && profile.a <= profile.b && std::isfinite(profile.b))) {
    throw Error(ErrorKind::ProfileOutOfRange,
                "profile needs r'' < a <= b < inf with r'' = " + std::to_string(out.r_double_prime) +
                    ", got a = " + std::to_string(profile.a) + ", b = " + std::to_string(profile.b));
  }
  out.value = (1.0 - f) * out.c_star + f * out.r_double_prime;
  return out;
}

double separation_rate(const Avcqc& w, const CorrelatedSource& src, std::uint64_t seed,
                       const Tolerances& tol) {
  GPair gp;
  try {
    gp = build_g_pair(src, w.num_inputs());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::NonBinarySource || e.kind() == ErrorKind::ZeroMutualInformation ||
        e.kind() == ErrorKind::InvalidArgument) {
      return 0.0;
    }
    throw;
  }
  SeparationOptions sopts;
  sopts.seed = seed;
  const SeparationOutcome sep = separation_test(w, src, gp, sopts, tol);
  if (!sep.separable) return 0.0;
  const BinaryAvc avc = induced_binary_avc(*sep.certificate, w, src, gp, 16);
  const PositivityResult pos = binary_avc_positivity(avc);
  return pos.positive ? pos.rate_r : 0.0;
}

RateLimitedBound cr_rate_limited_lower_bound(const Avcqc& w, const CorrelatedSource& src,
                                             const LnProfile& profile, const SolverOptions& opts,
                                             const Tolerances& tol) {
  const CapacityResult cap = capacity_informed_jammer(w, opts);
  const double r = separation_rate(w, src, opts.seed, tol);
  return rate_limited_from_values(cap.value, r, profile);
}

}  // namespace avcqc
