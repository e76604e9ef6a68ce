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

#include <gtest/gtest.h>

#include <random>

#include "avcqc/capacity.hpp"
#include "avcqc/cli.hpp"
#include "avcqc/kw_separation.hpp"
#include "avcqc/random.hpp"
#include "oracles.hpp"

namespace avcqc {
namespace {

Avcqc family(int (*f)(int, int)) {
  std::vector<DensityOperator> st;
  for (int x = 0; x < 2; ++x) {
    for (int s = 0; s < 2; ++s) st.push_back(DensityOperator::basis_state(2, f(x, s)));
  }
  return Avcqc({"0", "1"}, {"0", "1"}, st);
}

Avcqc orthogonal() {
  return family([](int x, int) { return x; });
}
Avcqc bit_flip() {
  return family([](int x, int s) { return x ^ s; });
}

// sigma_{Q,g} written out from its defining sum.
Matrix reference_ensemble(const CorrelatedSource& src, const std::vector<int>& g, int iota, const Avcqc& w,
                          const std::vector<std::vector<double>>& q) {
  const int nv = 1 << iota;
  const int d = w.dim();
  Matrix out = Matrix::Zero(nv * d, nv * d);
  for (int v = 0; v < nv; ++v) {
    for (int u = 0; u < (1 << iota); ++u) {
      double p = 1.0;
      for (int t = 0; t < iota; ++t) {
        const int ub = (u >> (iota - 1 - t)) & 1;
        const int vb = (v >> (iota - 1 - t)) & 1;
        p *= src.joint(ub, vb);
      }
      const int x = g[static_cast<std::size_t>(u)];
      for (int s = 0; s < w.num_states(); ++s) {
        out.block(v * d, v * d, d, d) +=
            p * q[static_cast<std::size_t>(x)][static_cast<std::size_t>(s)] * w.state(x, s).matrix();
      }
    }
  }
  return out;
}

TEST(GPair, MinimalIota) {
  EXPECT_EQ(minimal_iota(2), 3);
  EXPECT_EQ(minimal_iota(3), 4);
  EXPECT_EQ(minimal_iota(4), 4);
}

TEST(GPair, Errors) {
  RealMatrix three(3, 2);
  three << 0.2, 0.1, 0.2, 0.1, 0.2, 0.2;
  EXPECT_THROW(build_g_pair(CorrelatedSource({"0", "1", "2"}, {"0", "1"}, three), 2), Error);
  RealMatrix indep(2, 2);
  indep << 0.25, 0.25, 0.25, 0.25;
  try {
    build_g_pair(CorrelatedSource({"0", "1"}, {"0", "1"}, indep), 2);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ZeroMutualInformation);
  }
}

TEST(GPair, MarginalMatching) {
  for (int nx : {2, 3, 4, 5}) {
    for (double e : {0.1, 0.3}) {
      RealMatrix j(2, 2);
      j << 0.6 - e / 2, e / 2, e / 2, 0.4 - e / 2;
      const CorrelatedSource src({"0", "1"}, {"0", "1"}, j);
      const GPair gp = build_g_pair(src, nx);
      const auto w0 = preimage_weights(gp.g0, gp.iota, nx, src.sender_marginal());
      const auto w1 = preimage_weights(gp.g1, gp.iota, nx, src.sender_marginal());
      double total = 0.0;
      for (int x = 0; x < nx; ++x) {
        EXPECT_NEAR(w0[static_cast<std::size_t>(x)], w1[static_cast<std::size_t>(x)], 1e-12);
        total += w0[static_cast<std::size_t>(x)];
      }
      EXPECT_NEAR(total, 1.0, 1e-12);
    }
  }
}

TEST(GPair, PreimageCountsMatchPerHammingClass) {
  const GPair gp = build_g_pair(CorrelatedSource::binary_symmetric(0.1), 3);
  const int n = 1 << gp.iota;
  for (int weight = 0; weight <= gp.iota; ++weight) {
    for (int x = 0; x < 3; ++x) {
      int c0 = 0;
      int c1 = 0;
      for (int u = 0; u < n; ++u) {
        if (__builtin_popcount(static_cast<unsigned>(u)) != weight) continue;
        c0 += gp.g0[static_cast<std::size_t>(u)] == x;
        c1 += gp.g1[static_cast<std::size_t>(u)] == x;
      }
      EXPECT_EQ(c0, c1) << "weight " << weight << " letter " << x;
    }
  }
}

TEST(GPair, GroupOneDiffers) {
  const GPair gp = build_g_pair(CorrelatedSource::binary_symmetric(0.1), 2);
  EXPECT_EQ(gp.iota, 3);
  int differing = 0;
  for (std::size_t u = 0; u < gp.g0.size(); ++u) differing += gp.g0[u] != gp.g1[u];
  EXPECT_GT(differing, 0);
}

TEST(Embedding, PreservesTraceInnerProduct) {
  Matrix id = Matrix::Identity(2, 2);
  EXPECT_NEAR(embed_hermitian(id).squaredNorm(), 2.0, 1e-15);
  Matrix x(2, 2);
  x << 0, 1, 1, 0;
  Matrix z(2, 2);
  z << 1, 0, 0, -1;
  EXPECT_NEAR(embed_hermitian(x).dot(embed_hermitian(z)), 0.0, 1e-15);
  std::mt19937_64 gen(31);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    Matrix a(3, 3);
    Matrix b(3, 3);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        a(i, j) = Complex(n(gen), n(gen));
        b(i, j) = Complex(n(gen), n(gen));
      }
    }
    a = 0.5 * (a + a.adjoint()).eval();
    b = 0.5 * (b + b.adjoint()).eval();
    EXPECT_NEAR(embed_hermitian(a).dot(embed_hermitian(b)), (a * b).trace().real(), 1e-12);
    EXPECT_LT((unembed_hermitian(embed_hermitian(a), 3).matrix() - a).norm(), 1e-12);
  }
}

TEST(Ensemble, MatchesDefiningSum) {
  std::mt19937_64 gen(32);
  std::vector<DensityOperator> st;
  for (int i = 0; i < 4; ++i) st.push_back(DensityOperator::validate(oracle::random_qubit(gen)));
  const Avcqc w({"0", "1"}, {"0", "1"}, st);
  const CorrelatedSource src = CorrelatedSource::binary_symmetric(0.2);
  const GPair gp = build_g_pair(src, 2);
  const JammerKernel q({{0.3, 0.7}, {0.9, 0.1}});
  for (const auto* g : {&gp.g0, &gp.g1}) {
    const DensityOperator s = ensemble_state(src, *g, gp.iota, q, w);
    const Matrix ref = reference_ensemble(src, *g, gp.iota, w, {q.row(0), q.row(1)});
    EXPECT_LT((s.matrix() - ref).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(Ensemble, IndependentSourceFactorizes) {
  RealMatrix j(2, 2);
  j << 0.3 * 0.4, 0.3 * 0.6, 0.7 * 0.4, 0.7 * 0.6;
  const CorrelatedSource src({"0", "1"}, {"0", "1"}, j);
  const std::vector<int> g = {0, 1, 1, 0, 1, 0, 0, 1};
  const RealMatrix wts = ensemble_weights(src, g, 3, 2);
  const auto pre = preimage_weights(g, 3, 2, src.sender_marginal());
  for (int v = 0; v < 8; ++v) {
    double pv = 1.0;
    for (int t = 0; t < 3; ++t) pv *= ((v >> (2 - t)) & 1) ? 0.6 : 0.4;
    for (int x = 0; x < 2; ++x) EXPECT_NEAR(wts(v, x), pv * pre[static_cast<std::size_t>(x)], 1e-15);
  }
}

TEST(Ensemble, ConstantMapSingleState) {
  const CorrelatedSource src = CorrelatedSource::binary_symmetric(0.1);
  std::vector<DensityOperator> st = {DensityOperator::basis_state(2, 0), DensityOperator::basis_state(2, 1)};
  const Avcqc w({"0", "1"}, {"0"}, st);
  const std::vector<int> g(8, 1);
  const DensityOperator s = ensemble_state(src, g, 3, JammerKernel::uniform(2, 1), w);
  for (int v = 0; v < 8; ++v) {
    EXPECT_NEAR(s.matrix()(2 * v + 1, 2 * v + 1).real(), 1.0 / 8.0, 1e-15);
    EXPECT_NEAR(s.matrix()(2 * v, 2 * v).real(), 0.0, 1e-15);
  }
}

TEST(Separation, ConstantChannelIsNotSeparable) {
  const CorrelatedSource src = CorrelatedSource::binary_symmetric(0.1);
  const auto out = separation_test(constant_channel(), src, build_g_pair(src, 2));
  EXPECT_FALSE(out.separable);
  EXPECT_LE(out.distance, 1e-10);
}

TEST(Separation, BitFlipIsNotSeparable) {
  const CorrelatedSource src = CorrelatedSource::binary_symmetric(0.1);
  const auto out = separation_test(bit_flip(), src, build_g_pair(src, 2));
  EXPECT_FALSE(out.separable);
  EXPECT_LE(out.distance, 1e-7);
}

TEST(Separation, OrthogonalChannelDistanceMatchesGrid) {
  const CorrelatedSource src = CorrelatedSource::binary_symmetric(0.1);
  const GPair gp = build_g_pair(src, 2);
  const Avcqc w = orthogonal();
  const auto out = separation_test(w, src, gp);
  ASSERT_TRUE(out.separable);
  ASSERT_TRUE(out.certificate.has_value());
  EXPECT_GT(out.certificate->margin, 0.0);
  double grid_min = 1e9;
  for (int a = 0; a <= 16; ++a) {
    for (int b = 0; b <= 16; ++b) {
      const std::vector<std::vector<double>> q0 = {{a / 16.0, 1 - a / 16.0}, {b / 16.0, 1 - b / 16.0}};
      const Matrix s0 = reference_ensemble(src, gp.g0, gp.iota, w, q0);
      const Matrix s1 = reference_ensemble(src, gp.g1, gp.iota, w, q0);
      grid_min = std::min(grid_min, (s0 - s1).norm());
    }
  }
  EXPECT_NEAR(out.distance, grid_min, 1e-7);
}

TEST(Separation, CertificateSoundOnRandomKernels) {
  const CorrelatedSource src = CorrelatedSource::binary_symmetric(0.1);
  const GPair gp = build_g_pair(src, 2);
  std::mt19937_64 gen(33);
  std::vector<DensityOperator> st;
  st.push_back(DensityOperator::basis_state(2, 0));
  st.push_back(DensityOperator::validate(0.9 * DensityOperator::basis_state(2, 0).matrix() +
                                         0.1 * DensityOperator::basis_state(2, 1).matrix()));
  st.push_back(DensityOperator::basis_state(2, 1));
  st.push_back(DensityOperator::validate(0.2 * DensityOperator::basis_state(2, 0).matrix() +
                                         0.8 * DensityOperator::basis_state(2, 1).matrix()));
  const Avcqc w({"0", "1"}, {"0", "1"}, st);
  const auto out = separation_test(w, src, gp);
  ASSERT_TRUE(out.certificate.has_value());
  const auto& c = *out.certificate;
  EXPECT_GT(c.margin, 0.0);
  const Matrix a = c.a.matrix();
  for (int t = 0; t < 200; ++t) {
    Rng rng(static_cast<std::uint64_t>(t));
    const JammerKernel q({rng.simplex_point(2), rng.simplex_point(2)});
    EXPECT_LT(trace_product(ensemble_state(src, gp.g0, gp.iota, q, w).matrix(), a),
              c.threshold_b - c.margin / 2);
    EXPECT_GT(trace_product(ensemble_state(src, gp.g1, gp.iota, q, w).matrix(), a),
              c.threshold_b + c.margin / 2);
  }
  const Matrix sum = c.m0.matrix() + c.m1.matrix();
  EXPECT_LT((sum - Matrix::Identity(sum.rows(), sum.cols())).norm(), 1e-12);
  EXPECT_GE(c.m1.eigenvalues().minCoeff(), -1e-12);
  EXPECT_LE(c.m1.eigenvalues().maxCoeff(), 1.0 + 1e-12);
}

TEST(Separation, SwappingPairFlipsOperator) {
  const CorrelatedSource src = CorrelatedSource::binary_symmetric(0.1);
  GPair gp = build_g_pair(src, 2);
  const auto a = separation_test(orthogonal(), src, gp);
  std::swap(gp.g0, gp.g1);
  const auto b = separation_test(orthogonal(), src, gp);
  ASSERT_TRUE(a.certificate && b.certificate);
  EXPECT_NEAR(a.certificate->margin, b.certificate->margin, 1e-9);
  const Matrix ida = Matrix::Identity(a.certificate->a.dim(), a.certificate->a.dim());
  const Matrix ha = a.certificate->a.matrix() - a.certificate->threshold_b * ida;
  const Matrix hb = b.certificate->a.matrix() - b.certificate->threshold_b * ida;
  EXPECT_LT((ha + hb).norm(), 1e-6 * ha.norm());
}

TEST(BinaryAvc, OrthogonalCertificate) {
  const CorrelatedSource src = CorrelatedSource::binary_symmetric(0.1);
  const GPair gp = build_g_pair(src, 2);
  const auto out = separation_test(orthogonal(), src, gp);
  ASSERT_TRUE(out.certificate);
  const BinaryAvc avc = induced_binary_avc(*out.certificate, orthogonal(), src, gp, 16);
  ASSERT_FALSE(avc.v00.empty());
  const auto& c = *out.certificate;
  const double bound = 1.0 + c.margin / (c.lambda_high - c.lambda_low);
  for (std::size_t i = 0; i < avc.v00.size(); ++i) {
    EXPECT_GE(avc.v00[i], -1e-12);
    EXPECT_LE(avc.v00[i], 1.0 + 1e-12);
  }
  EXPECT_GE(avc.min_v00 + avc.min_v11, bound - 1e-12);
  EXPECT_GT(avc.min_v00 + avc.min_v11, 1.0);
  EXPECT_TRUE(binary_avc_positivity(avc).positive);
}

TEST(BinaryAvc, PositivityExamples) {
  const auto noiseless = binary_avc_positivity(BinaryAvc::from_rows({1.0}, {1.0}));
  EXPECT_TRUE(noiseless.positive);
  EXPECT_NEAR(noiseless.rate_r, 1.0, 1e-6);
  const auto bsc = binary_avc_positivity(BinaryAvc::from_rows({0.6, 0.8}, {0.6, 0.7}));
  EXPECT_TRUE(bsc.positive);
  EXPECT_NEAR(bsc.rate_r, 1.0 - oracle::h(0.4), 1e-4);
  EXPECT_FALSE(binary_avc_positivity(BinaryAvc::from_rows({0.5}, {0.5})).positive);
  EXPECT_THROW(BinaryAvc::from_rows({}, {}), Error);
}

TEST(BinaryAvc, GridPairsSatisfyHypothesisWhenPositive) {
  const CorrelatedSource src = CorrelatedSource::binary_symmetric(0.1);
  const GPair gp = build_g_pair(src, 2);
  const auto out = separation_test(orthogonal(), src, gp);
  const BinaryAvc avc = induced_binary_avc(*out.certificate, orthogonal(), src, gp, 8);
  ASSERT_TRUE(binary_avc_positivity(avc).positive);
  for (double a : avc.v00) {
    for (double b : avc.v11) EXPECT_GT(a + b, 1.0);
  }
}

TEST(KernelGrid, SizeAndPoints) {
  EXPECT_EQ(kernel_grid_size(2, 2, 16), 17U * 17U);
  const JammerKernel q = kernel_grid_point(2, 2, 4, 6);
  double total = q(0, 0) + q(0, 1);
  EXPECT_NEAR(total, 1.0, 1e-15);
}

}  // namespace
}  // namespace avcqc
