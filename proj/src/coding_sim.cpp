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

#include "avcqc/coding_sim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <sstream>

#include "avcqc/random.hpp"

namespace avcqc {

namespace {

double min_eigenvalue(const Matrix& m) {
  return Eigen::SelfAdjointEigenSolver<Matrix>(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly)
      .eigenvalues()(0);
}

void check_povm(const std::vector<Matrix>& elements, int dim, const Tolerances& tol,
                const std::string& where) {
  Matrix sum = Matrix::Zero(dim, dim);
  for (std::size_t j = 0; j < elements.size(); ++j) {
    const Matrix& e = elements[j];
    if (e.rows() != dim || e.cols() != dim) {
      throw Error(ErrorKind::InvalidCode, where + ": decoder " + std::to_string(j) + " is " +
                                              std::to_string(e.rows()) + "x" + std::to_string(e.cols()) +
                                              ", expected dimension " + std::to_string(dim));
    }
    const double lo = min_eigenvalue(e);
    if (lo < -tol.povm) {
      throw Error(ErrorKind::InvalidCode,
                  where + ": decoder " + std::to_string(j) + " has eigenvalue " + std::to_string(lo));
    }
    sum += e;
  }
  const double lo = min_eigenvalue(Matrix::Identity(dim, dim) - sum);
  if (lo < -tol.povm) {
    throw Error(ErrorKind::InvalidCode, where + ": decoders sum beyond the identity (completion eigenvalue " +
                                            std::to_string(lo) + ")");
  }
}

std::uint64_t block_count(int alphabet, int l) {
  return checked_power(static_cast<std::uint64_t>(alphabet), l, 1ULL << 32, ErrorKind::EnumerationOverflow);
}

double block_probability(const CorrelatedSource& src, const CorrelationCode& code, std::uint64_t vp,
                         std::uint64_t v) {
  if (code.l == 0) return 1.0;
  return src.block_joint(sequence_at(vp, code.sender_alphabet, code.l),
                         sequence_at(v, code.receiver_alphabet, code.l));
}

void check_source(const CorrelationCode& code, const CorrelatedSource& src) {
  if (code.l == 0) return;
  if (src.sender_size() != code.sender_alphabet || src.receiver_size() != code.receiver_alphabet) {
    throw Error(ErrorKind::AlphabetMismatch,
                "code is indexed by alphabets of size " + std::to_string(code.sender_alphabet) + "/" +
                    std::to_string(code.receiver_alphabet) + ", source has " +
                    std::to_string(src.sender_size()) + "/" + std::to_string(src.receiver_size()));
  }
}

// Weighted decoding operators grouped by the codeword the jammer observes.
struct CodewordTerm {
  double weight = 0.0;  // total probability of sending this codeword
  Matrix effect;        // sum of weight * correct-decoding element
};

std::map<std::uint64_t, CodewordTerm> aggregate(const CorrelationCode& code, const Avcqc& w,
                                                const CorrelatedSource& src) {
  const std::uint64_t nvp = code.encoders.size();
  const std::uint64_t nv = code.decoders.size();
  const double scale = 1.0 / (static_cast<double>(code.num_messages) * code.num_private_keys);
  // coef[x][v][j] first, then one matrix sum per codeword.
  std::map<std::uint64_t, std::vector<double>> coef;
  const std::size_t stride = static_cast<std::size_t>(code.num_messages);
  for (std::uint64_t vp = 0; vp < nvp; ++vp) {
    for (std::uint64_t v = 0; v < nv; ++v) {
      const double p = block_probability(src, code, vp, v);
      if (p == 0.0) continue;
      for (int r = 0; r < code.num_private_keys; ++r) {
        for (int j = 0; j < code.num_messages; ++j) {
          const Sequence& x = code.encoders[vp][static_cast<std::size_t>(r)][static_cast<std::size_t>(j)];
          auto& c = coef[sequence_index(x, w.num_inputs())];
          if (c.empty()) c.assign(static_cast<std::size_t>(nv) * stride, 0.0);
          c[static_cast<std::size_t>(v) * stride + static_cast<std::size_t>(j)] += p * scale;
        }
      }
    }
  }
  const auto dim = static_cast<Eigen::Index>(code.decoders.front().front().rows());
  std::map<std::uint64_t, CodewordTerm> out;
  for (const auto& [xi, c] : coef) {
    CodewordTerm t;
    t.effect = Matrix::Zero(dim, dim);
    for (std::uint64_t v = 0; v < nv; ++v) {
      for (std::size_t j = 0; j < stride; ++j) {
        const double a = c[static_cast<std::size_t>(v) * stride + j];
        if (a == 0.0) continue;
        t.weight += a;
        t.effect += a * code.decoders[v][j];
      }
    }
    out.emplace(xi, std::move(t));
  }
  return out;
}

struct BestResponse {
  double value = 0.0;
  Sequence states;
};

BestResponse best_response(const Avcqc& w, const Sequence& x, const CodewordTerm& t,
                           std::uint64_t num_state_seqs) {
  BestResponse best;
  best.value = -1.0;
  const int n = static_cast<int>(x.size());
  for (std::uint64_t si = 0; si < num_state_seqs; ++si) {
    const Sequence s = sequence_at(si, w.num_states(), n);
    const double v = t.weight - trace_product(product_output_matrix(w, x, s), t.effect);
    if (v > best.value) {
      best.value = v;
      best.states = s;
    }
  }
  return best;
}

std::uint64_t jammer_count(const Avcqc& w, int n, const Caps& caps) {
  return checked_power(static_cast<std::uint64_t>(w.num_states()), n, caps.max_jammer,
                       ErrorKind::EnumerationOverflow);
}

}  // namespace

// --- code structures --------------------------------------------------------

Matrix DeterministicCode::fail_element() const {
  const Eigen::Index dim = decoders.empty() ? 1 : decoders.front().rows();
  Matrix f = Matrix::Identity(dim, dim);
  for (const Matrix& d : decoders) f -= d;
  return f;
}

void DeterministicCode::validate(const Avcqc& w, const Tolerances& tol) const {
  if (codebook.empty() || codebook.size() != decoders.size()) {
    throw Error(ErrorKind::InvalidCode, "codebook has " + std::to_string(codebook.size()) + " words and " +
                                            std::to_string(decoders.size()) + " decoders");
  }
  for (const Sequence& x : codebook) {
    if (static_cast<int>(x.size()) != n) {
      throw Error(ErrorKind::InvalidCode, "codeword length " + std::to_string(x.size()) +
                                              " differs from block length " + std::to_string(n));
    }
    for (int a : x) {
      if (a < 0 || a >= w.num_inputs()) throw Error(ErrorKind::InvalidCode, "codeword letter out of range");
    }
  }
  const std::uint64_t dim =
      checked_power(static_cast<std::uint64_t>(w.dim()), n, default_caps().max_dim, ErrorKind::DimOverflow);
  check_povm(decoders, static_cast<int>(dim), tol, "deterministic code");
}

void RandomCode::validate(const Avcqc& w, const Tolerances& tol) const {
  if (keyed.empty()) throw Error(ErrorKind::InvalidCode, "random code needs at least one key");
  for (const auto& c : keyed) {
    if (c.n != keyed.front().n || c.num_messages() != keyed.front().num_messages()) {
      throw Error(ErrorKind::InvalidCode, "keyed codes differ in block length or message count");
    }
    c.validate(w, tol);
  }
}

void CorrelationCode::validate(const Avcqc& w, const CorrelatedSource& src, const Tolerances& tol) const {
  check_source(*this, src);
  const int sa = l == 0 ? 1 : sender_alphabet;
  const int ra = l == 0 ? 1 : receiver_alphabet;
  if (num_messages < 1 || num_private_keys < 1) {
    throw Error(ErrorKind::InvalidCode, "message and key counts must be positive");
  }
  if (encoders.size() != block_count(sa, l) || decoders.size() != block_count(ra, l)) {
    throw Error(ErrorKind::InvalidCode, "encoder/decoder families do not cover the source blocks");
  }
  const std::uint64_t dim =
      checked_power(static_cast<std::uint64_t>(w.dim()), n, default_caps().max_dim, ErrorKind::DimOverflow);
  for (const auto& per_v : encoders) {
    if (static_cast<int>(per_v.size()) != num_private_keys) {
      throw Error(ErrorKind::InvalidCode, "encoder family has the wrong number of private keys");
    }
    for (const auto& per_r : per_v) {
      if (static_cast<int>(per_r.size()) != num_messages) {
        throw Error(ErrorKind::InvalidCode, "encoder has the wrong number of messages");
      }
      for (const Sequence& x : per_r) {
        if (static_cast<int>(x.size()) != n) throw Error(ErrorKind::InvalidCode, "codeword length mismatch");
        for (int a : x) {
          if (a < 0 || a >= w.num_inputs())
            throw Error(ErrorKind::InvalidCode, "codeword letter out of range");
        }
      }
    }
  }
  for (std::size_t v = 0; v < decoders.size(); ++v) {
    if (static_cast<int>(decoders[v].size()) != num_messages) {
      throw Error(ErrorKind::InvalidCode, "decoder family " + std::to_string(v) + " has the wrong size");
    }
    check_povm(decoders[v], static_cast<int>(dim), tol, "decoder family " + std::to_string(v));
  }
}

CorrelationCode as_correlation_code(const DeterministicCode& code) {
  CorrelationCode c;
  c.n = code.n;
  c.l = 0;
  c.num_messages = code.num_messages();
  c.num_private_keys = 1;
  c.sender_alphabet = 1;
  c.receiver_alphabet = 1;
  c.encoders = {{code.codebook}};
  c.decoders = {code.decoders};
  return c;
}

// --- error evaluation -------------------------------------------------------

namespace {

std::map<std::uint64_t, CodewordTerm> aggregate_keyed(const RandomCode& code, const Avcqc& w) {
  const double scale = 1.0 / (static_cast<double>(code.num_messages()) * code.num_keys());
  const auto dim = static_cast<Eigen::Index>(code.keyed.front().decoders.front().rows());
  std::map<std::uint64_t, CodewordTerm> out;
  for (const auto& k : code.keyed) {
    for (int j = 0; j < k.num_messages(); ++j) {
      auto& t = out[sequence_index(k.codebook[static_cast<std::size_t>(j)], w.num_inputs())];
      if (t.effect.size() == 0) t.effect = Matrix::Zero(dim, dim);
      t.weight += scale;
      t.effect += scale * k.decoders[static_cast<std::size_t>(j)];
    }
  }
  return out;
}

double evaluate_terms(const std::map<std::uint64_t, CodewordTerm>& terms, const Avcqc& w, int n,
                      const Caps& caps, InformedJammer* jam) {
  const std::uint64_t ns = jammer_count(w, n, caps);
  double total = 0.0;
  for (const auto& [xi, t] : terms) {
    const BestResponse br = best_response(w, sequence_at(xi, w.num_inputs(), n), t, ns);
    total += br.value;
    if (jam) {
      jam->codewords.push_back(xi);
      jam->states.push_back(br.states);
    }
  }
  if (jam) {
    jam->n = n;
    jam->error = total;
  }
  return total;
}

}  // namespace

double worst_case_error_informed(const DeterministicCode& code, const Avcqc& w, const Caps& caps) {
  RandomCode rc;
  rc.keyed.push_back(code);
  return random_code_error_informed(rc, w, caps);
}

double random_code_error_informed(const RandomCode& code, const Avcqc& w, const Caps& caps) {
  code.validate(w);
  return evaluate_terms(aggregate_keyed(code, w), w, code.n(), caps, nullptr);
}

double correlation_code_error_informed(const CorrelationCode& code, const Avcqc& w,
                                       const CorrelatedSource& src, const Caps& caps) {
  code.validate(w, src);
  return evaluate_terms(aggregate(code, w, src), w, code.n, caps, nullptr);
}

InformedJammer informed_jammer(const CorrelationCode& code, const Avcqc& w, const CorrelatedSource& src,
                               const Caps& caps) {
  code.validate(w, src);
  InformedJammer jam;
  evaluate_terms(aggregate(code, w, src), w, code.n, caps, &jam);
  return jam;
}

// --- brute force ------------------------------------------------------------

namespace {

// A use of the code: probability weight, the codeword sent, and the decoding
// element that counts as success.
struct Use {
  double weight;
  std::size_t codeword;  // position in the distinct-codeword list
  const Matrix* success;
};

double brute_force(const std::vector<Sequence>& distinct, const std::vector<Use>& uses, const Avcqc& w, int n,
                   const Caps& caps) {
  const std::uint64_t ns = jammer_count(w, n, caps);
  std::uint64_t functions = 1;
  for (std::size_t i = 0; i < distinct.size(); ++i) {
    if (functions > caps.max_functions / ns) {
      throw Error(ErrorKind::EnumerationOverflow,
                  "jammer functions exceed the cap " + std::to_string(caps.max_functions));
    }
    functions *= ns;
  }
  // Success probability of every use under every state sequence.
  std::vector<std::vector<double>> success(uses.size(), std::vector<double>(ns));
  for (std::uint64_t si = 0; si < ns; ++si) {
    const Sequence s = sequence_at(si, w.num_states(), n);
    std::vector<Matrix> out;
    for (const Sequence& x : distinct) out.push_back(product_output_matrix(w, x, s));
    for (std::size_t u = 0; u < uses.size(); ++u) {
      success[u][si] = trace_product(out[uses[u].codeword], *uses[u].success);
    }
  }
  double worst = -1.0;
  std::vector<std::uint64_t> f(distinct.size(), 0);
  for (std::uint64_t fi = 0; fi < functions; ++fi) {
    std::uint64_t rem = fi;
    for (std::size_t i = distinct.size(); i-- > 0;) {
      f[i] = rem % ns;
      rem /= ns;
    }
    double err = 0.0;
    for (std::size_t u = 0; u < uses.size(); ++u) {
      err += uses[u].weight * (1.0 - success[u][f[uses[u].codeword]]);
    }
    worst = std::max(worst, err);
  }
  return worst;
}

std::size_t intern(std::vector<Sequence>& distinct, const Sequence& x) {
  const auto it = std::find(distinct.begin(), distinct.end(), x);
  if (it != distinct.end()) return static_cast<std::size_t>(it - distinct.begin());
  distinct.push_back(x);
  return distinct.size() - 1;
}

}  // namespace

double brute_force_error_informed(const DeterministicCode& code, const Avcqc& w, const Caps& caps) {
  RandomCode rc;
  rc.keyed.push_back(code);
  return brute_force_error_informed(rc, w, caps);
}

double brute_force_error_informed(const RandomCode& code, const Avcqc& w, const Caps& caps) {
  code.validate(w);
  std::vector<Sequence> distinct;
  std::vector<Use> uses;
  const double scale = 1.0 / (static_cast<double>(code.num_messages()) * code.num_keys());
  for (const auto& k : code.keyed) {
    for (int j = 0; j < k.num_messages(); ++j) {
      uses.push_back({scale, intern(distinct, k.codebook[static_cast<std::size_t>(j)]),
                      &k.decoders[static_cast<std::size_t>(j)]});
    }
  }
  return brute_force(distinct, uses, w, code.n(), caps);
}

double brute_force_error_informed(const CorrelationCode& code, const Avcqc& w, const CorrelatedSource& src,
                                  const Caps& caps) {
  code.validate(w, src);
  std::vector<Sequence> distinct;
  std::vector<Use> uses;
  const double scale = 1.0 / (static_cast<double>(code.num_messages) * code.num_private_keys);
  for (std::uint64_t vp = 0; vp < code.encoders.size(); ++vp) {
    for (std::uint64_t v = 0; v < code.decoders.size(); ++v) {
      const double p = block_probability(src, code, vp, v);
      if (p == 0.0) continue;
      for (int r = 0; r < code.num_private_keys; ++r) {
        for (int j = 0; j < code.num_messages; ++j) {
          uses.push_back(
              {p * scale,
               intern(distinct, code.encoders[vp][static_cast<std::size_t>(r)][static_cast<std::size_t>(j)]),
               &code.decoders[v][static_cast<std::size_t>(j)]});
        }
      }
    }
  }
  return brute_force(distinct, uses, w, code.n, caps);
}

// --- constructions ----------------------------------------------------------

std::vector<Matrix> pretty_good_measurement(const std::vector<Matrix>& states) {
  const auto k = static_cast<double>(states.size());
  const Eigen::Index dim = states.front().rows();
  Matrix omega = Matrix::Zero(dim, dim);
  for (const Matrix& s : states) omega += s / k;
  const Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (omega + omega.adjoint()));
  const double top = std::max(es.eigenvalues().maxCoeff(), 0.0);
  RealVector inv_sqrt(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double l = es.eigenvalues()(i);
    inv_sqrt(i) = l > 1e-12 * std::max(top, 1e-300) ? 1.0 / std::sqrt(l) : 0.0;
  }
  const Matrix root = es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().adjoint();
  std::vector<Matrix> out;
  for (const Matrix& s : states) {
    const Matrix e = root * (s / k) * root;
    out.push_back(0.5 * (e + e.adjoint()));
  }
  return out;
}

TwoPartCode assemble_two_part(const CorrelationCode& pre, const RandomCode& inner) {
  if (pre.num_messages != inner.num_keys()) {
    throw Error(ErrorKind::KeySetMismatch, "pre-code carries " + std::to_string(pre.num_messages) +
                                               " keys, inner code has " + std::to_string(inner.num_keys()));
  }
  TwoPartCode tp;
  tp.pre = pre;
  tp.inner = inner;
  CorrelationCode& a = tp.assembled;
  a.n = pre.n + inner.n();
  a.l = pre.l;
  a.num_messages = inner.num_messages();
  a.num_private_keys = inner.num_keys() * pre.num_private_keys;
  a.sender_alphabet = pre.sender_alphabet;
  a.receiver_alphabet = pre.receiver_alphabet;
  a.encoders.resize(pre.encoders.size());
  for (std::size_t vp = 0; vp < pre.encoders.size(); ++vp) {
    for (int k = 0; k < inner.num_keys(); ++k) {
      for (int r = 0; r < pre.num_private_keys; ++r) {
        std::vector<Sequence> words;
        for (int j = 0; j < a.num_messages; ++j) {
          Sequence x = pre.encoders[vp][static_cast<std::size_t>(r)][static_cast<std::size_t>(k)];
          const Sequence& tail =
              inner.keyed[static_cast<std::size_t>(k)].codebook[static_cast<std::size_t>(j)];
          x.insert(x.end(), tail.begin(), tail.end());
          words.push_back(std::move(x));
        }
        a.encoders[vp].push_back(std::move(words));
      }
    }
  }
  a.decoders.resize(pre.decoders.size());
  for (std::size_t v = 0; v < pre.decoders.size(); ++v) {
    for (int j = 0; j < a.num_messages; ++j) {
      Matrix d;
      for (int k = 0; k < inner.num_keys(); ++k) {
        const Matrix term =
            kron(pre.decoders[v][static_cast<std::size_t>(k)],
                 inner.keyed[static_cast<std::size_t>(k)].decoders[static_cast<std::size_t>(j)]);
        if (k == 0) {
          d = term;
        } else {
          d += term;
        }
      }
      a.decoders[v].push_back(std::move(d));
    }
  }
  return tp;
}

TwoPartChain two_part_error_chain(const TwoPartCode& code, const Avcqc& w, const CorrelatedSource& src,
                                  const Caps& caps) {
  TwoPartChain c;
  c.pre_error = correlation_code_error_informed(code.pre, w, src, caps);
  c.inner_error = random_code_error_informed(code.inner, w, caps);
  c.assembled_error = correlation_code_error_informed(code.assembled, w, src, caps);
  c.holds = c.assembled_error <= c.pre_error + c.inner_error + 1e-12;
  return c;
}

std::vector<int> key_bits(int key, int num_keys, int nu) {
  int width = 1;
  while ((1 << width) < num_keys) ++width;
  std::vector<int> bits;
  for (int b = width - 1; b >= 0; --b) bits.push_back((key >> b) & 1);
  std::vector<int> out;
  for (int t = 0; t < nu; ++t) out.push_back(bits[static_cast<std::size_t>(t % width)]);
  return out;
}

CorrelationCode build_key_precode(const Avcqc& w, const CorrelatedSource& src, const GPair& gp, int nu,
                                  int num_keys, const JammerKernel& reference, const Caps& caps) {
  if (nu < 1 || num_keys < 2) {
    throw Error(ErrorKind::InvalidArgument, "pre-code needs nu >= 1 and at least two keys");
  }
  if (num_keys > (1 << std::min(nu, 30))) {
    throw Error(ErrorKind::InvalidArgument,
                "nu = " + std::to_string(nu) + " cannot carry " + std::to_string(num_keys) + " keys");
  }
  checked_power(static_cast<std::uint64_t>(w.dim()), nu, caps.max_dim, ErrorKind::DimOverflow);
  CorrelationCode c;
  c.n = nu;
  c.l = nu * gp.iota;
  c.num_messages = num_keys;
  c.num_private_keys = 1;
  c.sender_alphabet = src.sender_size();
  c.receiver_alphabet = src.receiver_size();
  const std::uint64_t nvp = checked_power(static_cast<std::uint64_t>(c.sender_alphabet), c.l,
                                          caps.max_enumeration, ErrorKind::EnumerationOverflow);
  const std::uint64_t nv = checked_power(static_cast<std::uint64_t>(c.receiver_alphabet), c.l,
                                         caps.max_enumeration, ErrorKind::EnumerationOverflow);
  std::vector<std::vector<int>> bits;
  for (int k = 0; k < num_keys; ++k) bits.push_back(key_bits(k, num_keys, nu));

  c.encoders.resize(nvp);
  for (std::uint64_t vp = 0; vp < nvp; ++vp) {
    const Sequence seq = sequence_at(vp, c.sender_alphabet, c.l);
    std::vector<Sequence> words;
    for (int k = 0; k < num_keys; ++k) {
      Sequence x;
      for (int t = 0; t < nu; ++t) {
        const Sequence part(seq.begin() + t * gp.iota, seq.begin() + (t + 1) * gp.iota);
        const std::uint64_t bi = sequence_index(part, c.sender_alphabet);
        const std::vector<int>& g =
            bits[static_cast<std::size_t>(k)][static_cast<std::size_t>(t)] == 0 ? gp.g0 : gp.g1;
        x.push_back(g[bi]);
      }
      words.push_back(std::move(x));
    }
    c.encoders[vp].push_back(std::move(words));
  }

  // Conditional output state of one iota-block given the receiver block.
  const std::vector<Matrix> avg = averaged_states(w, reference.flat());
  const RealMatrix w0 = ensemble_weights(src, gp.g0, gp.iota, w.num_inputs());
  const RealMatrix w1 = ensemble_weights(src, gp.g1, gp.iota, w.num_inputs());
  std::vector<std::array<Matrix, 2>> tau(static_cast<std::size_t>(w0.rows()));
  for (Eigen::Index vb = 0; vb < w0.rows(); ++vb) {
    const double pv = w0.row(vb).sum();
    for (int i = 0; i < 2; ++i) {
      const RealMatrix& wt = i == 0 ? w0 : w1;
      Matrix m = Matrix::Zero(w.dim(), w.dim());
      for (int x = 0; x < w.num_inputs(); ++x) {
        if (wt(vb, x) != 0.0) m += (wt(vb, x) / pv) * avg[static_cast<std::size_t>(x)];
      }
      if (pv <= 0.0) m = Matrix::Identity(w.dim(), w.dim()) / static_cast<double>(w.dim());
      tau[static_cast<std::size_t>(vb)][static_cast<std::size_t>(i)] = std::move(m);
    }
  }
  c.decoders.resize(nv);
  for (std::uint64_t v = 0; v < nv; ++v) {
    const Sequence seq = sequence_at(v, c.receiver_alphabet, c.l);
    std::vector<Matrix> states;
    for (int k = 0; k < num_keys; ++k) {
      Matrix s = Matrix::Identity(1, 1);
      for (int t = 0; t < nu; ++t) {
        const Sequence part(seq.begin() + t * gp.iota, seq.begin() + (t + 1) * gp.iota);
        const std::uint64_t bi = sequence_index(part, c.receiver_alphabet);
        s = kron(s, tau[bi][static_cast<std::size_t>(
                        bits[static_cast<std::size_t>(k)][static_cast<std::size_t>(t)])]);
      }
      states.push_back(std::move(s));
    }
    c.decoders[v] = pretty_good_measurement(states);
  }
  return c;
}

// --- common randomness generation -------------------------------------------

std::string CrRun::to_csv(const CorrelationCode& code) const {
  auto digits = [](std::uint64_t idx, int base, int len) {
    std::string s;
    for (int d : sequence_at(idx, base, len)) s += std::to_string(d);
    return s;
  };
  std::ostringstream os;
  os << "trial,v_prime,v,j,decoded,jammer_choice\n";
  for (const auto& t : trials) {
    os << t.trial << ',' << digits(t.v_prime, std::max(code.sender_alphabet, 1), code.l) << ','
       << digits(t.v, std::max(code.receiver_alphabet, 1), code.l) << ',' << t.message << ',' << t.decoded
       << ',' << t.jammer_choice << '\n';
  }
  return os.str();
}

CrRun cr_generation_run(const Avcqc& w, const CorrelatedSource& src, const CorrelationCode& code, int trials,
                        std::uint64_t seed, const Caps& caps) {
  if (trials < 1) throw Error(ErrorKind::InvalidArgument, "trials must be at least 1");
  const InformedJammer jam = informed_jammer(code, w, src, caps);
  std::map<std::uint64_t, std::size_t> response;
  for (std::size_t i = 0; i < jam.codewords.size(); ++i) response[jam.codewords[i]] = i;

  const int nvp_letters = code.l == 0 ? 1 : src.sender_size();
  const int nv_letters = code.l == 0 ? 1 : src.receiver_size();
  std::vector<double> cumulative;
  double acc = 0.0;
  for (int a = 0; a < nvp_letters; ++a) {
    for (int b = 0; b < nv_letters; ++b) {
      acc += code.l == 0 ? 1.0 : src.joint(a, b);
      cumulative.push_back(acc);
    }
  }

  CrRun run;
  std::map<int, int> agreed;
  int agree = 0;
  for (int t = 0; t < trials; ++t) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(t));
    Sequence vp(static_cast<std::size_t>(code.l));
    Sequence v(static_cast<std::size_t>(code.l));
    for (int i = 0; i < code.l; ++i) {
      const double u = rng.uniform() * acc;
      std::size_t cell = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) -
                                                  cumulative.begin());
      cell = std::min(cell, cumulative.size() - 1);
      vp[static_cast<std::size_t>(i)] = static_cast<int>(cell) / nv_letters;
      v[static_cast<std::size_t>(i)] = static_cast<int>(cell) % nv_letters;
    }
    TrialRecord rec;
    rec.trial = t;
    rec.v_prime = sequence_index(vp, nvp_letters);
    rec.v = sequence_index(v, nv_letters);
    const int r = static_cast<int>(rng.below(static_cast<std::uint64_t>(code.num_private_keys)));
    rec.message = static_cast<int>(rng.below(static_cast<std::uint64_t>(code.num_messages)));
    const Sequence& x =
        code.encoders[rec.v_prime][static_cast<std::size_t>(r)][static_cast<std::size_t>(rec.message)];
    const std::uint64_t xi = sequence_index(x, w.num_inputs());
    const Sequence& s = jam.states[response.at(xi)];
    rec.jammer_choice = sequence_index(s, w.num_states());
    const Matrix out = product_output_matrix(w, x, s);
    const double u = rng.uniform();
    double c = 0.0;
    rec.decoded = -1;
    for (int j = 0; j < code.num_messages; ++j) {
      c += std::max(trace_product(out, code.decoders[rec.v][static_cast<std::size_t>(j)]), 0.0);
      if (u < c) {
        rec.decoded = j;
        break;
      }
    }
    if (rec.decoded == rec.message) {
      ++agree;
      ++agreed[rec.message];
    }
    run.trials.push_back(rec);
  }
  run.agreement_rate = static_cast<double>(agree) / trials;
  if (agree > 0) {
    std::vector<double> freq;
    for (const auto& [j, cnt] : agreed) freq.push_back(static_cast<double>(cnt) / agree);
    run.empirical_entropy = entropy_bits(freq);
  }
  return run;
}

}  // namespace avcqc
