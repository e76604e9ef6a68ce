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

// Channels and codes shared by the unit and acceptance tests.

#pragma once

#include <random>
#include <string>
#include <vector>

#include "avcqc/coding_sim.hpp"
#include "avcqc/kw_separation.hpp"
#include "oracles.hpp"

namespace avcqc::fixtures {

inline Avcqc basis_family(int (*f)(int, int), int nx = 2, int ns = 2, int dim = 2) {
  std::vector<std::string> xs;
  std::vector<std::string> ss;
  for (int i = 0; i < nx; ++i) xs.push_back(std::to_string(i));
  for (int i = 0; i < ns; ++i) ss.push_back(std::to_string(i));
  std::vector<DensityOperator> st;
  for (int x = 0; x < nx; ++x) {
    for (int s = 0; s < ns; ++s) st.push_back(DensityOperator::basis_state(dim, f(x, s)));
  }
  return Avcqc(xs, ss, st);
}

/// rho(x, s) = |x><x|: the jammer has no effect.
inline Avcqc orthogonal() {
  return basis_family([](int x, int) { return x; });
}

/// rho(x, s) = |x xor s><x xor s|.
inline Avcqc bit_flip() {
  return basis_family([](int x, int s) { return x ^ s; });
}

inline Avcqc random_qubit_channel(std::mt19937_64& gen, int nx, int ns) {
  std::vector<std::string> xs;
  std::vector<std::string> ss;
  for (int i = 0; i < nx; ++i) xs.push_back(std::to_string(i));
  for (int i = 0; i < ns; ++i) ss.push_back(std::to_string(i));
  std::vector<DensityOperator> st;
  for (int i = 0; i < nx * ns; ++i) st.push_back(DensityOperator::validate(oracle::random_qubit(gen)));
  return Avcqc(xs, ss, st);
}

/// Random POVM with `outcomes` elements (the last one plays the completion).
inline std::vector<Matrix> random_povm(std::mt19937_64& gen, int dim, int outcomes) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<Matrix> g;
  Matrix total = Matrix::Zero(dim, dim);
  for (int k = 0; k < outcomes; ++k) {
    Matrix a(dim, dim);
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) a(i, j) = Complex(n(gen), n(gen));
    }
    g.push_back(a * a.adjoint());
    total += g.back();
  }
  const Eigen::SelfAdjointEigenSolver<Matrix> es(total);
  const Matrix root = es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                      es.eigenvectors().adjoint();
  std::vector<Matrix> out;
  for (const Matrix& e : g) {
    const Matrix m = root * e * root;
    out.push_back(0.5 * (m + m.adjoint()));
  }
  return out;
}

inline Sequence random_word(std::mt19937_64& gen, int nx, int n) {
  std::uniform_int_distribution<int> u(0, nx - 1);
  Sequence x(static_cast<std::size_t>(n));
  for (auto& a : x) a = u(gen);
  return x;
}

inline DeterministicCode random_deterministic_code(std::mt19937_64& gen, int nx, int dim, int n, int j) {
  DeterministicCode c;
  c.n = n;
  for (int m = 0; m < j; ++m) c.codebook.push_back(random_word(gen, nx, n));
  int d = 1;
  for (int i = 0; i < n; ++i) d *= dim;
  auto povm = random_povm(gen, d, j + 1);
  povm.pop_back();
  c.decoders = povm;
  return c;
}

inline CorrelationCode random_correlation_code(std::mt19937_64& gen, int nx, int dim, int n, int j,
                                               int keys) {
  CorrelationCode c;
  c.n = n;
  c.l = 1;
  c.num_messages = j;
  c.num_private_keys = keys;
  c.sender_alphabet = 2;
  c.receiver_alphabet = 2;
  int d = 1;
  for (int i = 0; i < n; ++i) d *= dim;
  for (int vp = 0; vp < 2; ++vp) {
    std::vector<std::vector<Sequence>> per_r;
    for (int r = 0; r < keys; ++r) {
      std::vector<Sequence> words;
      for (int m = 0; m < j; ++m) words.push_back(random_word(gen, nx, n));
      per_r.push_back(words);
    }
    c.encoders.push_back(per_r);
  }
  for (int v = 0; v < 2; ++v) {
    auto povm = random_povm(gen, d, j + 1);
    povm.pop_back();
    c.decoders.push_back(povm);
  }
  return c;
}

/// Projector onto |c...c> for a repeated letter c on n qubits.
inline Matrix repeated_projector(int letter, int n) {
  Matrix m = Matrix::Identity(1, 1);
  for (int i = 0; i < n; ++i) m = kron(m, DensityOperator::basis_state(2, letter).matrix());
  return m;
}

/// Keyed repetition code of length n: key k sends j xor k repeated, and the
/// decoder answers correctly with probability 0.9 on either codeword.
inline RandomCode noisy_keyed_repetition(int n) {
  RandomCode rc;
  for (int k = 0; k < 2; ++k) {
    DeterministicCode c;
    c.n = n;
    for (int j = 0; j < 2; ++j) c.codebook.push_back(Sequence(static_cast<std::size_t>(n), j ^ k));
    for (int j = 0; j < 2; ++j) {
      c.decoders.push_back(0.9 * repeated_projector(j ^ k, n) + 0.1 * repeated_projector(1 - (j ^ k), n));
    }
    rc.keyed.push_back(c);
  }
  return rc;
}

/// The toy two-part code: key pre-code over nu = 3 uses of the orthogonal
/// channel with BSC(0.1) correlation, then the noisy keyed repetition code
/// over n = 3 uses.
inline TwoPartCode toy_two_part() {
  const Avcqc w = orthogonal();
  const CorrelatedSource src = CorrelatedSource::binary_symmetric(0.1);
  const GPair gp = build_g_pair(src, 2);
  const CorrelationCode pre = build_key_precode(w, src, gp, 3, 2, JammerKernel::uniform(2, 2));
  return assemble_two_part(pre, noisy_keyed_repetition(3));
}

}  // namespace avcqc::fixtures
