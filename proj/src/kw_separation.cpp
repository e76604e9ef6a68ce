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

#include "avcqc/kw_separation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "avcqc/capacity.hpp"
#include "avcqc/random.hpp"
#include "avcqc/simplex_qp.hpp"

namespace avcqc {

namespace {

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return r;
}

int popcount_seq(std::uint64_t idx) { return __builtin_popcountll(idx); }

}  // namespace

// --- g pair -----------------------------------------------------------------

int minimal_iota(int x_size) {
  for (int kappa = 1; kappa < 62; ++kappa) {
    std::uint64_t total = 0;
    for (int tau = 0; tau <= kappa; ++tau) total += binomial(kappa, tau) / 2;
    if (total >= static_cast<std::uint64_t>(x_size)) return kappa;
  }
  throw Error(ErrorKind::InvalidArgument, "input alphabet too large: " + std::to_string(x_size));
}

GPair build_g_pair(const CorrelatedSource& src, int x_size) {
  if (src.sender_size() != 2) {
    throw Error(ErrorKind::NonBinarySource,
                "encoder pair needs |V'| = 2, got " + std::to_string(src.sender_size()));
  }
  if (src.mutual_information() < 1e-12) {
    throw Error(ErrorKind::ZeroMutualInformation,
                "I(V';V) = " + std::to_string(src.mutual_information()) + " leaves nothing to separate");
  }
  if (x_size < 2) {
    throw Error(ErrorKind::InvalidArgument, "encoder pair needs |X| >= 2, got " + std::to_string(x_size));
  }
  GPair gp;
  gp.iota = minimal_iota(x_size);
  gp.x_size = x_size;
  const std::uint64_t count = 1ULL << gp.iota;
  gp.g0.assign(count, 0);
  gp.g1.assign(count, 0);
  gp.group.assign(count, 3);
  gp.label_m.assign(count, -1);
  gp.half.assign(count, '*');

  int m = 0;
  for (int h = 0; h <= gp.iota; ++h) {
    // Sequence indices in numeric order coincide with lexicographic order.
    std::vector<std::uint64_t> cls;
    for (std::uint64_t i = 0; i < count; ++i) {
      if (popcount_seq(i) == h) cls.push_back(i);
    }
    const std::size_t half = cls.size() / 2;
    for (std::size_t k = 0; k < half; ++k) {
      ++m;
      const std::uint64_t ia = cls[k];
      const std::uint64_t ib = cls[half + k];
      int za = 0;
      int zb = 0;
      int grp = 0;
      if (m <= x_size - 1) {
        grp = 1;
        za = 0;
        zb = m;
      } else {
        grp = 2;
        za = m % x_size;
        zb = (m + 1) % x_size;
        if (za > zb) std::swap(za, zb);
      }
      gp.g0[ia] = za;
      gp.g1[ib] = za;
      gp.g0[ib] = zb;
      gp.g1[ia] = zb;
      gp.group[ia] = gp.group[ib] = grp;
      gp.label_m[ia] = gp.label_m[ib] = m;
      gp.half[ia] = 'a';
      gp.half[ib] = 'b';
    }
  }
  return gp;
}

std::vector<double> preimage_weights(const std::vector<int>& g, int iota, int x_size,
                                     const RealVector& sender_marginal) {
  std::vector<double> out(static_cast<std::size_t>(x_size), 0.0);
  const int base = static_cast<int>(sender_marginal.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Sequence u = sequence_at(i, base, iota);
    double p = 1.0;
    for (int c : u) p *= sender_marginal(c);
    out[static_cast<std::size_t>(g[i])] += p;
  }
  return out;
}

RealMatrix ensemble_weights(const CorrelatedSource& src, const std::vector<int>& g, int iota, int x_size) {
  const int nvp = src.sender_size();
  const int nv = src.receiver_size();
  const std::uint64_t nu =
      checked_power(static_cast<std::uint64_t>(nvp), iota, 1ULL << 40, ErrorKind::DimOverflow);
  if (g.size() != nu) {
    throw Error(ErrorKind::AlphabetMismatch,
                "encoder table has " + std::to_string(g.size()) + " entries, expected " + std::to_string(nu));
  }
  const std::uint64_t nvb =
      checked_power(static_cast<std::uint64_t>(nv), iota, 1ULL << 40, ErrorKind::DimOverflow);
  RealMatrix out = RealMatrix::Zero(static_cast<Eigen::Index>(nvb), x_size);
  for (std::uint64_t vi = 0; vi < nvb; ++vi) {
    const Sequence v = sequence_at(vi, nv, iota);
    for (std::uint64_t ui = 0; ui < nu; ++ui) {
      const int x = g[ui];
      if (x < 0 || x >= x_size) {
        throw Error(ErrorKind::AlphabetMismatch, "encoder output " + std::to_string(x) + " outside X");
      }
      out(static_cast<Eigen::Index>(vi), x) += src.block_joint(sequence_at(ui, nvp, iota), v);
    }
  }
  return out;
}

Matrix EnsembleBasis::evaluate(const std::vector<double>& q_flat) const {
  Matrix out = Matrix::Zero(dim, dim);
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (q_flat[i] != 0.0) out += q_flat[i] * terms[i];
  }
  return out;
}

EnsembleBasis ensemble_basis(const CorrelatedSource& src, const std::vector<int>& g, int iota, const Avcqc& w,
                             const Caps& caps) {
  const std::uint64_t blocks = checked_power(static_cast<std::uint64_t>(src.receiver_size()), iota,
                                             caps.max_dim, ErrorKind::DimOverflow);
  if (blocks * static_cast<std::uint64_t>(w.dim()) > caps.max_dim) {
    throw Error(ErrorKind::DimOverflow, "ensemble dimension " +
                                            std::to_string(blocks * static_cast<std::uint64_t>(w.dim())) +
                                            " exceeds the cap " + std::to_string(caps.max_dim));
  }
  const RealMatrix weights = ensemble_weights(src, g, iota, w.num_inputs());
  EnsembleBasis b;
  b.iota = iota;
  b.num_inputs = w.num_inputs();
  b.num_states = w.num_states();
  b.block_count = static_cast<int>(blocks);
  b.dim = b.block_count * w.dim();
  const int d = w.dim();
  for (int x = 0; x < w.num_inputs(); ++x) {
    for (int s = 0; s < w.num_states(); ++s) {
      Matrix t = Matrix::Zero(b.dim, b.dim);
      for (int v = 0; v < b.block_count; ++v) {
        const double wt = weights(v, x);
        if (wt != 0.0) t.block(v * d, v * d, d, d) = wt * w.state(x, s).matrix();
      }
      b.terms.push_back(std::move(t));
    }
  }
  return b;
}

DensityOperator ensemble_state(const CorrelatedSource& src, const std::vector<int>& g, int iota,
                               const JammerKernel& q, const Avcqc& w, const Caps& caps) {
  if (q.num_inputs() != w.num_inputs() || q.num_states() != w.num_states()) {
    throw Error(ErrorKind::AlphabetMismatch, "kernel shape does not match the channel");
  }
  return DensityOperator::from_trusted(ensemble_basis(src, g, iota, w, caps).evaluate(q.flat()));
}

// --- embedding --------------------------------------------------------------

RealVector embed_hermitian(const Matrix& h) {
  const Eigen::Index n = h.rows();
  RealVector out(n * n);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i) out(k++) = h(i, i).real();
  const double r2 = std::sqrt(2.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      out(k++) = r2 * h(i, j).real();
      out(k++) = r2 * h(i, j).imag();
    }
  }
  return out;
}

RealVector embed_hermitian(const HermitianOperator& h) { return embed_hermitian(h.matrix()); }

HermitianOperator unembed_hermitian(const RealVector& v, int dim) {
  if (v.size() != static_cast<Eigen::Index>(dim) * dim) {
    throw Error(ErrorKind::DimensionMismatch, "embedding has " + std::to_string(v.size()) +
                                                  " coordinates, expected " + std::to_string(dim * dim));
  }
  Matrix m = Matrix::Zero(dim, dim);
  Eigen::Index k = 0;
  for (int i = 0; i < dim; ++i) m(i, i) = v(k++);
  const double r2 = std::sqrt(2.0);
  for (int i = 0; i < dim; ++i) {
    for (int j = i + 1; j < dim; ++j) {
      const Complex z(v(k) / r2, v(k + 1) / r2);
      k += 2;
      m(i, j) = z;
      m(j, i) = std::conj(z);
    }
  }
  return HermitianOperator::hermitian_part(m);
}

// --- separation -------------------------------------------------------------

namespace {

RealMatrix embedded_columns(const EnsembleBasis& b) {
  RealMatrix out(static_cast<Eigen::Index>(b.dim) * b.dim, static_cast<Eigen::Index>(b.terms.size()));
  for (std::size_t i = 0; i < b.terms.size(); ++i)
    out.col(static_cast<Eigen::Index>(i)) = embed_hermitian(b.terms[i]);
  return out;
}

JammerKernel kernel_from_flat(const std::vector<double>& q, int nx, int ns) {
  std::vector<std::vector<double>> rows;
  for (int x = 0; x < nx; ++x) {
    std::vector<double> r(q.begin() + x * ns, q.begin() + (x + 1) * ns);
    double s = 0.0;
    for (double& v : r) {
      v = std::max(v, 0.0);
      s += v;
    }
    for (double& v : r) v /= s;
    rows.push_back(std::move(r));
  }
  return JammerKernel(rows);
}

}  // namespace

SeparationOutcome separation_test(const Avcqc& w, const CorrelatedSource& src, const GPair& gp,
                                  const SeparationOptions& opts, const Tolerances& tol, const Caps& caps) {
  const EnsembleBasis b0 = ensemble_basis(src, gp.g0, gp.iota, w, caps);
  const EnsembleBasis b1 = ensemble_basis(src, gp.g1, gp.iota, w, caps);
  const RealMatrix e0 = embedded_columns(b0);
  const RealMatrix e1 = embedded_columns(b1);
  const int nx = w.num_inputs();
  const int ns = w.num_states();
  const Eigen::Index nk = static_cast<Eigen::Index>(nx) * ns;
  RealMatrix m(e0.rows(), 2 * nk);
  m << e0, -e1;
  const std::vector<int> blocks(static_cast<std::size_t>(2 * nx), ns);
  const RealVector zero = RealVector::Zero(e0.rows());

  SimplexQpResult best;
  best.distance = std::numeric_limits<double>::infinity();
  for (int r = 0; r < std::max(opts.restarts, 1); ++r) {
    std::vector<double> start;
    if (r == 0) {
      start.assign(static_cast<std::size_t>(2 * nk), 1.0 / ns);
    } else {
      Rng rng = Rng::stream(opts.seed, static_cast<std::uint64_t>(r));
      for (int k = 0; k < 2 * nx; ++k) {
        const std::vector<double> row = rng.simplex_point(ns);
        start.insert(start.end(), row.begin(), row.end());
      }
    }
    SimplexQpResult run = minimize_on_simplices(m, zero, blocks, std::move(start));
    if (run.distance < best.distance) best = std::move(run);
  }

  SeparationOutcome out;
  out.distance = best.distance;
  const std::vector<double> q0(best.y.begin(), best.y.begin() + nk);
  const std::vector<double> q1(best.y.begin() + nk, best.y.end());
  out.q0 = kernel_from_flat(q0, nx, ns);
  out.q1 = kernel_from_flat(q1, nx, ns);
  if (best.distance <= tol.separation_lower) {
    out.separable = false;
    return out;
  }
  if (best.distance <= tol.separation_upper) {
    throw Error(ErrorKind::Indeterminate,
                "set distance " + std::to_string(best.distance) + " lies in the dead band (" +
                    std::to_string(tol.separation_lower) + ", " + std::to_string(tol.separation_upper) + "]");
  }

  const RealVector dir =
      e1 * Eigen::Map<const RealVector>(q1.data(), nk) - e0 * Eigen::Map<const RealVector>(q0.data(), nk);
  SeparationCertificate cert;
  cert.a = unembed_hermitian(dir, b0.dim);
  double sup0 = 0.0;
  double inf1 = 0.0;
  for (int x = 0; x < nx; ++x) {
    double hi = -std::numeric_limits<double>::infinity();
    double lo = std::numeric_limits<double>::infinity();
    for (int s = 0; s < ns; ++s) {
      const auto i = static_cast<std::size_t>(x * ns + s);
      hi = std::max(hi, trace_product(b0.terms[i], cert.a.matrix()));
      lo = std::min(lo, trace_product(b1.terms[i], cert.a.matrix()));
    }
    sup0 += hi;
    inf1 += lo;
  }
  if (!(inf1 > sup0)) {
    throw Error(ErrorKind::Indeterminate, "closest-pair direction does not separate the sets (gap " +
                                              std::to_string(inf1 - sup0) + ")");
  }
  cert.sup0 = sup0;
  cert.inf1 = inf1;
  cert.threshold_b = 0.5 * (sup0 + inf1);
  cert.margin = 0.5 * (inf1 - sup0);
  const RealVector ev = cert.a.eigenvalues();
  cert.lambda_high = ev(ev.size() - 1);
  cert.lambda_low = std::min(0.0, ev(0));
  const double span = cert.lambda_high - cert.lambda_low;
  const Matrix id = Matrix::Identity(b0.dim, b0.dim);
  cert.m1 = HermitianOperator::hermitian_part((cert.a.matrix() - cert.lambda_low * id) / span);
  cert.m0 = HermitianOperator::hermitian_part(id - cert.m1.matrix());
  out.separable = true;
  out.certificate = std::move(cert);
  return out;
}

// --- induced binary AVC -----------------------------------------------------

std::uint64_t kernel_grid_size(int num_inputs, int num_states, int k) {
  const std::uint64_t row = binomial(k + num_states - 1, num_states - 1);
  std::uint64_t total = 1;
  for (int x = 0; x < num_inputs; ++x) {
    if (total > (std::numeric_limits<std::uint64_t>::max() / row)) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    total *= row;
  }
  return total;
}

JammerKernel kernel_grid_point(int num_inputs, int num_states, int k, std::uint64_t index) {
  const auto rows = simplex_grid(num_states, k);
  std::vector<std::vector<double>> q(static_cast<std::size_t>(num_inputs));
  for (int x = num_inputs - 1; x >= 0; --x) {
    const auto& r = rows[index % rows.size()];
    index /= rows.size();
    for (int c : r) q[static_cast<std::size_t>(x)].push_back(c / static_cast<double>(k));
  }
  return JammerKernel(q);
}

BinaryAvc BinaryAvc::from_rows(const std::vector<double>& v00, const std::vector<double>& v11) {
  if (v00.empty() || v00.size() != v11.size()) {
    throw Error(ErrorKind::EmptyGrid, "binary AVC needs a nonempty list of row pairs");
  }
  BinaryAvc b;
  b.v00 = v00;
  b.v11 = v11;
  b.grid_size = v00.size();
  b.min_v00 = *std::min_element(v00.begin(), v00.end());
  b.max_v00 = *std::max_element(v00.begin(), v00.end());
  b.min_v11 = *std::min_element(v11.begin(), v11.end());
  b.max_v11 = *std::max_element(v11.begin(), v11.end());
  return b;
}

BinaryAvc induced_binary_avc(const SeparationCertificate& cert, const Avcqc& w, const CorrelatedSource& src,
                             const GPair& gp, int grid_k, const Caps& caps) {
  if (grid_k < 1) throw Error(ErrorKind::EmptyGrid, "grid resolution must be positive");
  const EnsembleBasis b0 = ensemble_basis(src, gp.g0, gp.iota, w, caps);
  const EnsembleBasis b1 = ensemble_basis(src, gp.g1, gp.iota, w, caps);
  const int nx = w.num_inputs();
  const int ns = w.num_states();
  BinaryAvc out;
  out.grid_k = grid_k;
  out.num_inputs = nx;
  out.num_states = ns;
  for (std::size_t i = 0; i < b0.terms.size(); ++i) {
    out.c00.push_back(trace_product(b0.terms[i], cert.m0.matrix()));
    out.c11.push_back(trace_product(b1.terms[i], cert.m1.matrix()));
  }
  std::vector<int> worst0(static_cast<std::size_t>(nx));
  std::vector<int> worst1(static_cast<std::size_t>(nx));
  for (int x = 0; x < nx; ++x) {
    double lo0 = std::numeric_limits<double>::infinity();
    double hi0 = -lo0;
    double lo1 = lo0;
    double hi1 = -lo0;
    for (int s = 0; s < ns; ++s) {
      const auto i = static_cast<std::size_t>(x * ns + s);
      if (out.c00[i] < lo0) {
        lo0 = out.c00[i];
        worst0[static_cast<std::size_t>(x)] = s;
      }
      if (out.c11[i] < lo1) {
        lo1 = out.c11[i];
        worst1[static_cast<std::size_t>(x)] = s;
      }
      hi0 = std::max(hi0, out.c00[i]);
      hi1 = std::max(hi1, out.c11[i]);
    }
    out.min_v00 += lo0;
    out.max_v00 += hi0;
    out.min_v11 += lo1;
    out.max_v11 += hi1;
  }
  out.worst_q0 = JammerKernel::deterministic(worst0, ns);
  out.worst_q1 = JammerKernel::deterministic(worst1, ns);
  out.grid_size = kernel_grid_size(nx, ns, grid_k);
  if (out.grid_size <= (1ULL << 16)) {
    const auto rows = simplex_grid(ns, grid_k);
    for (std::uint64_t gi = 0; gi < out.grid_size; ++gi) {
      std::uint64_t rem = gi;
      double v0 = 0.0;
      double v1 = 0.0;
      for (int x = nx - 1; x >= 0; --x) {
        const auto& r = rows[rem % rows.size()];
        rem /= rows.size();
        for (int s = 0; s < ns; ++s) {
          const double q = r[static_cast<std::size_t>(s)] / static_cast<double>(grid_k);
          v0 += q * out.c00[static_cast<std::size_t>(x * ns + s)];
          v1 += q * out.c11[static_cast<std::size_t>(x * ns + s)];
        }
      }
      out.v00.push_back(v0);
      out.v11.push_back(v1);
    }
  }
  return out;
}

PositivityResult binary_avc_positivity(const BinaryAvc& b) {
  if (b.grid_size == 0 || (b.v00.empty() && b.c00.empty())) {
    throw Error(ErrorKind::EmptyGrid, "binary AVC has no grid rows");
  }
  PositivityResult out;
  out.positive = b.min_v00 + b.min_v11 > 1.0 + 1e-9;
  auto diag = [](double p0) {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = std::clamp(p0, 0.0, 1.0);
    m(1, 1) = 1.0 - m(0, 0).real();
    return DensityOperator::from_trusted(m);
  };
  // Input i emits outcome i with probability anywhere in [min V(i|i), max V(i|i)].
  const Avcqc avc({"0", "1"}, {"lo", "hi"},
                  {diag(b.min_v00), diag(b.max_v00), diag(1.0 - b.min_v11), diag(1.0 - b.max_v11)});
  SolverOptions opts;
  opts.run_oracle = false;
  opts.outer_restarts = 4;
  out.rate_r = capacity_informed_jammer(avc, opts).value;
  return out;
}

}  // namespace avcqc
