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

#include <cmath>
#include <random>

#include "avcqc/cli.hpp"
#include "avcqc/coding_sim.hpp"
#include "fixtures.hpp"

namespace avcqc {
namespace {

using fixtures::bit_flip;
using fixtures::orthogonal;

DeterministicCode identity_code() {
  DeterministicCode c;
  c.n = 1;
  c.codebook = {{0}, {1}};
  c.decoders = {DensityOperator::basis_state(2, 0).matrix(), DensityOperator::basis_state(2, 1).matrix()};
  return c;
}

Avcqc zero_plus_channel() {
  const double s = 1.0 / std::sqrt(2.0);
  Eigen::VectorXcd plus(2);
  plus << s, s;
  return Avcqc({"0", "1"}, {"0"}, {DensityOperator::basis_state(2, 0), DensityOperator::pure(plus)});
}

TEST(DeterministicCode, Validation) {
  DeterministicCode c = identity_code();
  EXPECT_NO_THROW(c.validate(orthogonal()));
  c.decoders[1] = 2.0 * c.decoders[1];
  EXPECT_THROW(c.validate(orthogonal()), Error);
  DeterministicCode d = identity_code();
  d.codebook[0] = {0, 1};
  EXPECT_THROW(d.validate(orthogonal()), Error);
  EXPECT_LT(identity_code().fail_element().norm(), 1e-15);
}

TEST(WorstCaseError, Examples) {
  EXPECT_NEAR(worst_case_error_informed(identity_code(), orthogonal()), 0.0, 1e-15);
  EXPECT_NEAR(worst_case_error_informed(identity_code(), bit_flip()), 1.0, 1e-15);
  EXPECT_NEAR(brute_force_error_informed(identity_code(), bit_flip()), 1.0, 1e-15);

  std::mt19937_64 gen(41);
  const Avcqc w = fixtures::random_qubit_channel(gen, 2, 1);
  const DeterministicCode c = fixtures::random_deterministic_code(gen, 2, 2, 2, 3);
  double avg = 0.0;
  for (int j = 0; j < 3; ++j) {
    const Matrix out = product_output_matrix(w, c.codebook[static_cast<std::size_t>(j)], {0, 0});
    avg += (1.0 - trace_product(out, c.decoders[static_cast<std::size_t>(j)])) / 3.0;
  }
  EXPECT_NEAR(worst_case_error_informed(c, w), avg, 1e-12);
}

TEST(WorstCaseError, ConstantChannelTwoMessages) {
  std::mt19937_64 gen(42);
  for (int t = 0; t < 20; ++t) {
    const DeterministicCode c = fixtures::random_deterministic_code(gen, 2, 2, 1, 2);
    EXPECT_GE(worst_case_error_informed(c, constant_channel()), 0.5 - 1e-12);
  }
}

TEST(WorstCaseError, EnumerationCap) {
  DeterministicCode c;
  c.n = 17;
  c.codebook = {Sequence(17, 0)};
  c.decoders = {Matrix::Zero(1, 1)};
  try {
    worst_case_error_informed(c, orthogonal());
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_TRUE(e.kind() == ErrorKind::EnumerationOverflow || e.kind() == ErrorKind::DimOverflow);
  }
}

TEST(WorstCaseError, MoreJammerStatesNeverHelp) {
  std::mt19937_64 gen(43);
  for (int t = 0; t < 20; ++t) {
    const Avcqc w = fixtures::random_qubit_channel(gen, 2, 2);
    const Avcqc bigger = w.with_extra_state({DensityOperator::validate(oracle::random_qubit(gen)),
                                             DensityOperator::validate(oracle::random_qubit(gen))},
                                            "2");
    const DeterministicCode c = fixtures::random_deterministic_code(gen, 2, 2, 2, 2);
    EXPECT_GE(worst_case_error_informed(c, bigger), worst_case_error_informed(c, w) - 1e-12);
  }
}

TEST(DecompositionMatchesBruteForce, DeterministicCodes) {
  std::mt19937_64 gen(44);
  for (int t = 0; t < 10; ++t) {
    const Avcqc w = fixtures::random_qubit_channel(gen, 2, 2);
    const DeterministicCode c = fixtures::random_deterministic_code(gen, 2, 2, 2, 3);
    EXPECT_NEAR(worst_case_error_informed(c, w), brute_force_error_informed(c, w), 1e-12);
  }
}

TEST(DecompositionMatchesBruteForce, RandomAndCorrelationCodes) {
  std::mt19937_64 gen(45);
  for (int t = 0; t < 5; ++t) {
    const Avcqc w = fixtures::random_qubit_channel(gen, 2, 2);
    RandomCode rc;
    for (int k = 0; k < 2; ++k) rc.keyed.push_back(fixtures::random_deterministic_code(gen, 2, 2, 2, 2));
    EXPECT_NEAR(random_code_error_informed(rc, w), brute_force_error_informed(rc, w), 1e-12);

    const CorrelationCode cc = fixtures::random_correlation_code(gen, 2, 2, 1, 2, 2);
    const CorrelatedSource src = CorrelatedSource::binary_symmetric(0.2);
    EXPECT_NEAR(correlation_code_error_informed(cc, w, src), brute_force_error_informed(cc, w, src), 1e-12);
  }
}

TEST(RandomCodeError, SingleKeyEqualsDeterministic) {
  std::mt19937_64 gen(46);
  const Avcqc w = fixtures::random_qubit_channel(gen, 2, 2);
  const DeterministicCode c = fixtures::random_deterministic_code(gen, 2, 2, 2, 3);
  RandomCode rc;
  rc.keyed.push_back(c);
  EXPECT_NEAR(random_code_error_informed(rc, w), worst_case_error_informed(c, w), 1e-15);
}

TEST(RandomCodeError, TwoBasesBeatWorseKey) {
  const double s = 1.0 / std::sqrt(2.0);
  Eigen::VectorXcd plus(2);
  plus << s, s;
  Eigen::VectorXcd minus(2);
  minus << s, -s;
  const Avcqc w({"0", "1", "+", "-"}, {"0"},
                {DensityOperator::basis_state(2, 0), DensityOperator::basis_state(2, 1),
                 DensityOperator::pure(plus), DensityOperator::pure(minus)});
  DeterministicCode z;
  z.n = 1;
  z.codebook = {{0}, {1}};
  z.decoders = {DensityOperator::pure(plus).matrix(), DensityOperator::pure(minus).matrix()};
  DeterministicCode x = z;
  x.codebook = {{2}, {3}};
  RandomCode rc;
  rc.keyed = {z, x};
  const double worse = std::max(worst_case_error_informed(z, w), worst_case_error_informed(x, w));
  EXPECT_NEAR(worse, 0.5, 1e-12);
  EXPECT_LT(random_code_error_informed(rc, w), worse - 0.1);
}

TEST(RandomCodeError, ConstantChannelAtLeastHalf) {
  std::mt19937_64 gen(47);
  RandomCode rc;
  for (int k = 0; k < 3; ++k) rc.keyed.push_back(fixtures::random_deterministic_code(gen, 2, 2, 1, 2));
  EXPECT_GE(random_code_error_informed(rc, constant_channel()), 0.5 - 1e-12);
}

TEST(CorrelationCodeError, TrivialSourceReducesToDeterministic) {
  std::mt19937_64 gen(48);
  const Avcqc w = fixtures::random_qubit_channel(gen, 2, 2);
  const DeterministicCode c = fixtures::random_deterministic_code(gen, 2, 2, 2, 2);
  CorrelationCode cc;
  cc.n = 2;
  cc.l = 2;
  cc.num_messages = 2;
  cc.sender_alphabet = 1;
  cc.receiver_alphabet = 1;
  cc.encoders = {{c.codebook}};
  cc.decoders = {c.decoders};
  const CorrelatedSource one({"0"}, {"0"}, RealMatrix::Ones(1, 1));
  EXPECT_NEAR(correlation_code_error_informed(cc, w, one), worst_case_error_informed(c, w), 1e-15);
  EXPECT_NEAR(correlation_code_error_informed(as_correlation_code(c), w, one),
              worst_case_error_informed(c, w), 1e-15);
}

TEST(CorrelationCodeError, PerfectCorrelationSelectsMatchingBasis) {
  const double s = 1.0 / std::sqrt(2.0);
  Eigen::VectorXcd plus(2);
  plus << s, s;
  Eigen::VectorXcd minus(2);
  minus << s, -s;
  const Avcqc w({"0", "1", "+", "-"}, {"0"},
                {DensityOperator::basis_state(2, 0), DensityOperator::basis_state(2, 1),
                 DensityOperator::pure(plus), DensityOperator::pure(minus)});
  CorrelationCode cc;
  cc.n = 1;
  cc.l = 1;
  cc.num_messages = 2;
  cc.sender_alphabet = 2;
  cc.receiver_alphabet = 2;
  cc.encoders = {{{{0}, {1}}}, {{{2}, {3}}}};
  cc.decoders = {{DensityOperator::basis_state(2, 0).matrix(), DensityOperator::basis_state(2, 1).matrix()},
                 {DensityOperator::pure(plus).matrix(), DensityOperator::pure(minus).matrix()}};
  EXPECT_NEAR(correlation_code_error_informed(cc, w, CorrelatedSource::perfectly_correlated()), 0.0, 1e-15);
}

TEST(CorrelationCodeError, IndependentSourceNoBetterThanHelstrom) {
  const double helstrom = 0.5 * (1.0 - std::sqrt(0.5));
  RealMatrix u(2, 2);
  u << 0.25, 0.25, 0.25, 0.25;
  const CorrelatedSource indep({"0", "1"}, {"0", "1"}, u);
  std::mt19937_64 gen(49);
  for (int t = 0; t < 50; ++t) {
    CorrelationCode cc = fixtures::random_correlation_code(gen, 2, 2, 1, 2, 1);
    EXPECT_GE(correlation_code_error_informed(cc, zero_plus_channel(), indep), helstrom - 1e-9);
  }
}

TEST(Pgm, ValidPovmAndOrthogonalStates) {
  const auto d = pretty_good_measurement(
      {DensityOperator::basis_state(2, 0).matrix(), DensityOperator::basis_state(2, 1).matrix()});
  EXPECT_LT((d[0] - DensityOperator::basis_state(2, 0).matrix()).norm(), 1e-12);
  std::mt19937_64 gen(50);
  const auto e = pretty_good_measurement(
      {oracle::random_qubit(gen), oracle::random_qubit(gen), oracle::random_qubit(gen)});
  Matrix sum = Matrix::Zero(2, 2);
  for (const auto& m : e) {
    EXPECT_GE(Eigen::SelfAdjointEigenSolver<Matrix>(m).eigenvalues().minCoeff(), -1e-12);
    sum += m;
  }
  EXPECT_LT((sum - Matrix::Identity(2, 2)).norm(), 1e-10);
}

TEST(KeyBits, CyclicPattern) {
  EXPECT_EQ(key_bits(0, 2, 3), (std::vector<int>{0, 0, 0}));
  EXPECT_EQ(key_bits(1, 2, 3), (std::vector<int>{1, 1, 1}));
  EXPECT_EQ(key_bits(2, 4, 5), (std::vector<int>{1, 0, 1, 0, 1}));
}

TEST(TwoPart, KeySetMismatch) {
  const TwoPartCode toy = fixtures::toy_two_part();
  RandomCode three = toy.inner;
  three.keyed.push_back(three.keyed.front());
  try {
    assemble_two_part(toy.pre, three);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::KeySetMismatch);
  }
}

TEST(TwoPart, AssembledIsValidAndStructured) {
  const TwoPartCode toy = fixtures::toy_two_part();
  const Avcqc w = orthogonal();
  const CorrelatedSource src = CorrelatedSource::binary_symmetric(0.1);
  EXPECT_NO_THROW(toy.assembled.validate(w, src));
  EXPECT_EQ(toy.assembled.n, 6);
  EXPECT_EQ(toy.assembled.l, 9);
  // First part depends only on (v', k), second only on (k, j).
  for (std::size_t vp = 0; vp < toy.assembled.encoders.size(); ++vp) {
    for (int k = 0; k < 2; ++k) {
      const auto& a = toy.assembled.encoders[vp][static_cast<std::size_t>(k)];
      EXPECT_TRUE(std::equal(a[0].begin(), a[0].begin() + 3, a[1].begin()));
      for (int j = 0; j < 2; ++j) {
        EXPECT_TRUE(std::equal(
            a[static_cast<std::size_t>(j)].begin() + 3, a[static_cast<std::size_t>(j)].end(),
            toy.inner.keyed[static_cast<std::size_t>(k)].codebook[static_cast<std::size_t>(j)].begin()));
      }
    }
  }
}

TEST(TwoPart, ToyChainIsStrict) {
  const TwoPartCode toy = fixtures::toy_two_part();
  const auto chain = two_part_error_chain(toy, orthogonal(), CorrelatedSource::binary_symmetric(0.1));
  EXPECT_TRUE(chain.holds);
  EXPECT_NEAR(chain.inner_error, 0.1, 1e-12);
  EXPECT_GT(chain.pre_error, 0.0);
  EXPECT_NEAR(chain.assembled_error, 0.1 + 0.8 * chain.pre_error, 1e-10);
  EXPECT_LT(chain.assembled_error, chain.pre_error + chain.inner_error);
}

TEST(TwoPart, PerfectPartsCompose) {
  const Avcqc w = orthogonal();
  const CorrelatedSource perfect = CorrelatedSource::perfectly_correlated();
  // Perfect pre-code: v' = v decides the key directly.
  CorrelationCode pre;
  pre.n = 1;
  pre.l = 1;
  pre.num_messages = 2;
  pre.sender_alphabet = 2;
  pre.receiver_alphabet = 2;
  pre.encoders = {{{{0}, {1}}}, {{{1}, {0}}}};
  const Matrix p0 = DensityOperator::basis_state(2, 0).matrix();
  const Matrix p1 = DensityOperator::basis_state(2, 1).matrix();
  pre.decoders = {{p0, p1}, {p1, p0}};
  const RandomCode inner = fixtures::noisy_keyed_repetition(2);
  const auto chain = two_part_error_chain(assemble_two_part(pre, inner), w, perfect);
  EXPECT_NEAR(chain.pre_error, 0.0, 1e-15);
  EXPECT_NEAR(chain.assembled_error, chain.inner_error, 1e-9);

  RandomCode exact;
  for (int k = 0; k < 2; ++k) {
    DeterministicCode c;
    c.n = 1;
    c.codebook = {{k}, {1 - k}};
    c.decoders = {k == 0 ? p0 : p1, k == 0 ? p1 : p0};
    exact.keyed.push_back(c);
  }
  const TwoPartCode toy = fixtures::toy_two_part();
  const CorrelatedSource bsc = CorrelatedSource::binary_symmetric(0.1);
  const auto chain2 = two_part_error_chain(assemble_two_part(toy.pre, exact), w, bsc);
  EXPECT_NEAR(chain2.inner_error, 0.0, 1e-15);
  EXPECT_LE(chain2.assembled_error, chain2.pre_error + 1e-9);
}

TEST(CrRun, NoiselessPerfectCorrelationAgrees) {
  CorrelationCode cc = as_correlation_code(identity_code());
  const CorrelatedSource one({"0"}, {"0"}, RealMatrix::Ones(1, 1));
  const CrRun run = cr_generation_run(orthogonal(), one, cc, 200, 7);
  EXPECT_EQ(run.agreement_rate, 1.0);
  EXPECT_NEAR(run.empirical_entropy, 1.0, 0.02);
}

TEST(CrRun, ConstantChannelGuesses) {
  DeterministicCode c;
  c.n = 1;
  c.codebook = {{0}, {1}};
  c.decoders = {0.5 * Matrix::Identity(2, 2), 0.5 * Matrix::Identity(2, 2)};
  const int trials = 2000;
  const CorrelatedSource one({"0"}, {"0"}, RealMatrix::Ones(1, 1));
  const CrRun run = cr_generation_run(constant_channel(), one, as_correlation_code(c), trials, 3);
  const double sigma = std::sqrt(0.25 / trials);
  EXPECT_NEAR(run.agreement_rate, 0.5, 3 * sigma);
}

TEST(CrRun, TwoPartAgreementMatchesExactError) {
  const TwoPartCode toy = fixtures::toy_two_part();
  const Avcqc w = orthogonal();
  const CorrelatedSource src = CorrelatedSource::binary_symmetric(0.1);
  const auto chain = two_part_error_chain(toy, w, src);
  const int trials = 2000;
  const CrRun run = cr_generation_run(w, src, toy.assembled, trials, 11);
  const double p = 1.0 - chain.pre_error - chain.inner_error;
  const double sigma = std::sqrt(0.25 / trials);
  EXPECT_GE(run.agreement_rate, p - 3 * sigma);
}

TEST(CrRun, DeterministicUnderSeed) {
  const TwoPartCode toy = fixtures::toy_two_part();
  const Avcqc w = orthogonal();
  const CorrelatedSource src = CorrelatedSource::binary_symmetric(0.1);
  const CrRun a = cr_generation_run(w, src, toy.assembled, 50, 5);
  const CrRun b = cr_generation_run(w, src, toy.assembled, 50, 5);
  EXPECT_EQ(a.to_csv(toy.assembled), b.to_csv(toy.assembled));
  const std::string csv = a.to_csv(toy.assembled);
  EXPECT_EQ(csv.rfind("trial,v_prime,v,j,decoded,jammer_choice\n", 0), 0U);
}

TEST(InformedJammer, BestResponseOnBitFlip) {
  const CorrelatedSource one({"0"}, {"0"}, RealMatrix::Ones(1, 1));
  const InformedJammer jam = informed_jammer(as_correlation_code(identity_code()), bit_flip(), one);
  ASSERT_EQ(jam.codewords.size(), 2U);
  EXPECT_EQ(jam.states[0], Sequence{1});
  EXPECT_EQ(jam.states[1], Sequence{1});
  EXPECT_NEAR(jam.error, 1.0, 1e-15);
}

}  // namespace
}  // namespace avcqc
