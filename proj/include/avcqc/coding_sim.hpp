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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "avcqc/channel_model.hpp"
#include "avcqc/kw_separation.hpp"

namespace avcqc {

/// Codebook j -> X^n and decoding POVM {D_j}; the completion
/// D_fail = id - sum_j D_j is the "no decision" outcome.
struct DeterministicCode {
  int n = 0;
  std::vector<Sequence> codebook;
  std::vector<Matrix> decoders;

  int num_messages() const { return static_cast<int>(codebook.size()); }
  Matrix fail_element() const;
  /// Throws InvalidCode on shape errors or when an element (or the
  /// completion) has an eigenvalue below -povm.
  void validate(const Avcqc& w, const Tolerances& tol = default_tolerances()) const;
};

/// Uniform key over a family of deterministic codes sharing the message set.
struct RandomCode {
  std::vector<DeterministicCode> keyed;

  int num_keys() const { return static_cast<int>(keyed.size()); }
  int num_messages() const { return keyed.empty() ? 0 : keyed.front().num_messages(); }
  int n() const { return keyed.empty() ? 0 : keyed.front().n; }
  void validate(const Avcqc& w, const Tolerances& tol = default_tolerances()) const;
};

/// Correlation-assisted code: encoders indexed by V'^l (and an optional
/// uniform private key r), decoders indexed by V^l.
struct CorrelationCode {
  int n = 0;
  int l = 0;
  int num_messages = 0;
  int num_private_keys = 1;
  int sender_alphabet = 0;
  int receiver_alphabet = 0;
  /// encoders[v'-block index][r][j] -> X^n
  std::vector<std::vector<std::vector<Sequence>>> encoders;
  /// decoders[v-block index][j]
  std::vector<std::vector<Matrix>> decoders;

  void validate(const Avcqc& w, const CorrelatedSource& src,
                const Tolerances& tol = default_tolerances()) const;
};

struct TwoPartCode {
  CorrelationCode pre;
  RandomCode inner;
  CorrelationCode assembled;
};

/// max over s^n(.) of the average error, evaluated per distinct codeword.
double worst_case_error_informed(const DeterministicCode& code, const Avcqc& w,
                                 const Caps& caps = default_caps());

/// Jammer sees the codeword but not the key.
double random_code_error_informed(const RandomCode& code, const Avcqc& w, const Caps& caps = default_caps());

/// Jammer sees the codeword but neither the source realization nor the
/// private key.
double correlation_code_error_informed(const CorrelationCode& code, const Avcqc& w,
                                       const CorrelatedSource& src, const Caps& caps = default_caps());

/// Same three quantities by direct enumeration of all jammer functions on the
/// codebook image. Throws EnumerationOverflow above caps.max_functions.
double brute_force_error_informed(const DeterministicCode& code, const Avcqc& w,
                                  const Caps& caps = default_caps());
double brute_force_error_informed(const RandomCode& code, const Avcqc& w, const Caps& caps = default_caps());
double brute_force_error_informed(const CorrelationCode& code, const Avcqc& w, const CorrelatedSource& src,
                                  const Caps& caps = default_caps());

/// Wraps a code as a correlation code with l = 0 (one trivial source block).
CorrelationCode as_correlation_code(const DeterministicCode& code);

/// The jammer's best response: for each codeword (mixed-radix index over X^n)
/// the maximizing state sequence, restricted to the codebook image.
struct InformedJammer {
  int n = 0;
  std::vector<std::uint64_t> codewords;  ///< distinct codeword indices, ascending
  std::vector<Sequence> states;          ///< best response per codeword
  double error = 0.0;
};
InformedJammer informed_jammer(const CorrelationCode& code, const Avcqc& w, const CorrelatedSource& src,
                               const Caps& caps = default_caps());

/// Pretty-good measurement for equiprobable states; the elements act on the
/// support of the average and the kernel is left to the completion.
std::vector<Matrix> pretty_good_measurement(const std::vector<Matrix>& states);

/// Two-part composition: encoders (pre(k), inner_k(j)), decoders
/// sum_k D^{pre}_{v,k} (x) D^{inner}_{k,j}; the key k becomes the assembled
/// code's private randomness. Throws KeySetMismatch.
TwoPartCode assemble_two_part(const CorrelationCode& pre, const RandomCode& inner);

struct TwoPartChain {
  double pre_error = 0.0;
  double inner_error = 0.0;
  double assembled_error = 0.0;
  bool holds = false;  ///< assembled <= pre + inner
};
TwoPartChain two_part_error_chain(const TwoPartCode& code, const Avcqc& w, const CorrelatedSource& src,
                                  const Caps& caps = default_caps());

/// Pre-code that carries key k in nu channel uses: position t sends
/// g_{b_t(k)} of the t-th iota-block of V', where b(k) repeats the binary
/// digits of k cyclically. Decoded per V-block by a pretty-good measurement on
/// the conditional ensemble states under the reference kernel.
CorrelationCode build_key_precode(const Avcqc& w, const CorrelatedSource& src, const GPair& gp, int nu,
                                  int num_keys, const JammerKernel& reference,
                                  const Caps& caps = default_caps());

/// Bit pattern b(k) of length nu.
std::vector<int> key_bits(int key, int num_keys, int nu);

struct TrialRecord {
  int trial = 0;
  std::uint64_t v_prime = 0;
  std::uint64_t v = 0;
  int message = 0;
  int decoded = -1;  ///< -1 for the completion outcome
  std::uint64_t jammer_choice = 0;
};

struct CrRun {
  double agreement_rate = 0.0;
  double empirical_entropy = 0.0;
  std::vector<TrialRecord> trials;
  /// trial,v_prime,v,j,decoded,jammer_choice with blocks as digit strings
  std::string to_csv(const CorrelationCode& code) const;
};

/// Monte-Carlo common-randomness generation against the exact informed
/// jammer; trial t uses the counter-based stream (seed, t).
CrRun cr_generation_run(const Avcqc& w, const CorrelatedSource& src, const CorrelationCode& code, int trials,
                        std::uint64_t seed, const Caps& caps = default_caps());

}  // namespace avcqc
