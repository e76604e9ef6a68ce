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

// Acceptance checks. `avcqc_acceptance N` runs check N, `avcqc_acceptance`
// runs all of them; each prints one PASS/FAIL line and detail lines prefixed
// with "  ".

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "avcqc/capacity.hpp"
#include "avcqc/cli.hpp"
#include "avcqc/json_io.hpp"
#include "avcqc/random.hpp"
#include "avcqc/typicality.hpp"
#include "fixtures.hpp"

namespace avcqc {
namespace {

namespace fs = std::filesystem;

struct Check {
  bool ok = true;
  std::ostringstream log;

  void expect(bool cond, const std::string& what) {
    if (!cond) ok = false;
    log << "  " << (cond ? "ok   " : "FAIL ") << what << '\n';
  }
};

std::string num(double v, int prec = 9) {
  std::ostringstream os;
  os.precision(prec);
  os << v;
  return os.str();
}

Eigen::VectorXcd plus_vector() {
  Eigen::VectorXcd v(2);
  v << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  return v;
}

DensityOperator rotated_diag(double top, double theta) {
  Matrix u(2, 2);
  u << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = top;
  d(1, 1) = 1.0 - top;
  return DensityOperator::validate(u * d * u.adjoint());
}

void criterion1(Check& c) {
  c.expect(std::abs(von_neumann_entropy(DensityOperator::maximally_mixed(2)) - 1.0) < 1e-12,
           "S(maximally mixed qubit) = 1");
  const std::vector<oracle::Qubit> qs = {oracle::from_matrix(DensityOperator::basis_state(2, 0).matrix()),
                                         oracle::from_matrix(DensityOperator::pure(plus_vector()).matrix())};
  const double closed = oracle::chi({0.5, 0.5}, qs);
  const CqChannel w({"0", "+"}, {DensityOperator::basis_state(2, 0), DensityOperator::pure(plus_vector())});
  const double chi = holevo_chi(ProbabilityVector::uniform(2), w);
  c.expect(std::abs(chi - closed) < 1e-6, "chi = " + num(chi) + ", closed form " + num(closed));
  c.expect(std::abs(closed - 0.600876) < 1e-6, "closed form matches 0.600876");
}

void criterion2(Check& c) {
  std::mt19937_64 gen(2026);
  double worst = 0.0;
  double worst_lib_oracle = 0.0;
  for (int t = 0; t < 25; ++t) {
    const Avcqc w = fixtures::random_qubit_channel(gen, 2, 2);
    const CapacityResult r = capacity_informed_jammer(w);
    const double ref = oracle::capacity_2x2(w);
    worst = std::max(worst, std::abs(r.value - ref));
    if (r.certified) worst_lib_oracle = std::max(worst_lib_oracle, r.certified_gap);
  }
  c.expect(worst <= 5e-3, "max |solver - oracle| over 25 instances = " + num(worst));
  c.log << "  info max certified_gap (built-in grid) = " << num(worst_lib_oracle) << '\n';
  const double flip = capacity_informed_jammer(fixtures::bit_flip()).value;
  c.expect(flip <= 1e-6, "bit-flip capacity = " + num(flip));
  const double orth = capacity_informed_jammer(fixtures::orthogonal()).value;
  c.expect(std::abs(orth - 1.0) <= 1e-6, "orthogonal capacity = " + num(orth, 12));
}

void criterion3(Check& c) {
  const CorrelatedSource src = CorrelatedSource::binary_symmetric(0.1);
  const GPair gp = build_g_pair(src, 2);
  const SeparationOutcome cst = separation_test(constant_channel(), src, gp);
  c.expect(!cst.separable && cst.distance <= 1e-10,
           "constant channel not separable, distance " + num(cst.distance));

  const Avcqc w = fixtures::orthogonal();
  const SeparationOutcome sep = separation_test(w, src, gp);
  c.expect(sep.separable && sep.certificate && sep.certificate->margin > 0.0,
           "orthogonal channel certificate, margin " + num(sep.certificate ? sep.certificate->margin : 0.0));
  if (!sep.certificate) return;
  const auto& cert = *sep.certificate;
  const Matrix a = cert.a.matrix();
  int violations = 0;
  for (int t = 0; t < 1000; ++t) {
    Rng rng = Rng::stream(3, static_cast<std::uint64_t>(t));
    const JammerKernel q({rng.simplex_point(2), rng.simplex_point(2)});
    const double t0 = trace_product(ensemble_state(src, gp.g0, gp.iota, q, w).matrix(), a);
    const double t1 = trace_product(ensemble_state(src, gp.g1, gp.iota, q, w).matrix(), a);
    if (!(t0 <= cert.threshold_b - cert.margin + 1e-12 && t1 >= cert.threshold_b + cert.margin - 1e-12)) {
      ++violations;
    }
  }
  c.expect(violations == 0, "soundness sweep over 1000 kernels, violations = " + std::to_string(violations));

  const BinaryAvc avc = induced_binary_avc(cert, w, src, gp, 16);
  const PositivityResult pos = binary_avc_positivity(avc);
  c.expect(avc.grid_size == kernel_grid_size(2, 2, 16) && avc.min_v00 + avc.min_v11 > 1.0 && pos.positive,
           "k=16 grid (" + std::to_string(avc.grid_size) +
               " kernels): min V(0|0) + min V(1|1) = " + num(avc.min_v00 + avc.min_v11));
}

void criterion4(Check& c) {
  std::mt19937_64 gen(404);
  double worst = 0.0;
  int count = 0;
  for (int t = 0; t < 8; ++t) {
    const int n = 1 + t % 4;
    const Avcqc w = fixtures::random_qubit_channel(gen, 2, 2);
    const DeterministicCode code = fixtures::random_deterministic_code(gen, 2, 2, n, 2 + t % 2);
    worst =
        std::max(worst, std::abs(worst_case_error_informed(code, w) - brute_force_error_informed(code, w)));
    ++count;
  }
  for (int t = 0; t < 6; ++t) {
    const int n = 1 + t % 3;
    const Avcqc w = fixtures::random_qubit_channel(gen, 2, 2);
    RandomCode rc;
    for (int k = 0; k < 2; ++k) rc.keyed.push_back(fixtures::random_deterministic_code(gen, 2, 2, n, 2));
    worst = std::max(worst, std::abs(random_code_error_informed(rc, w) - brute_force_error_informed(rc, w)));
    ++count;
  }
  for (int t = 0; t < 6; ++t) {
    const int n = 1 + t % 2;
    const Avcqc w = fixtures::random_qubit_channel(gen, 2, 2);
    const CorrelationCode cc = fixtures::random_correlation_code(gen, 2, 2, n, 2, 1 + t % 2);
    const CorrelatedSource src = CorrelatedSource::binary_symmetric(0.05 * (t + 1));
    worst = std::max(worst, std::abs(correlation_code_error_informed(cc, w, src) -
                                     brute_force_error_informed(cc, w, src)));
    ++count;
  }
  c.expect(count == 20 && worst <= 1e-12,
           std::to_string(count) + " codes, max |decomposition - brute force| = " + num(worst, 3));
}

void criterion5(Check& c) {
  const TwoPartCode toy = fixtures::toy_two_part();
  const auto chain =
      two_part_error_chain(toy, fixtures::orthogonal(), CorrelatedSource::binary_symmetric(0.1));
  c.log << "  info pre = " << num(chain.pre_error, 12) << ", inner = " << num(chain.inner_error, 12)
        << ", assembled = " << num(chain.assembled_error, 12) << '\n';
  c.expect(chain.holds && chain.assembled_error <= chain.pre_error + chain.inner_error,
           "assembled <= pre + inner");
}

void report_typicality(Check& c, const std::string& name, const TypicalityReport& rep) {
  for (const char* f : {"te1", "te2", "te3", "te4", "te5", "te6", "te7"}) {
    std::string failed;
    for (const auto& r : rep.records) {
      if (r.bound_id.rfind(f, 0) == 0 && !r.pass) failed += " " + r.bound_id + "@n=" + std::to_string(r.n);
    }
    c.expect(failed.empty(), name + " " + f + (failed.empty() ? "" : ": failing" + failed));
  }
  c.expect(rep.beta > 0.0 && rep.beta_cond > 0.0 && rep.beta_pw > 0.0,
           name + " fitted beta = " + num(rep.beta, 4) + ", beta_cond = " + num(rep.beta_cond, 4) +
               ", beta_pw = " + num(rep.beta_pw, 4));
  c.log << "  info " << name << " delta = " << num(rep.delta, 4) << ", gamma = " << num(rep.gamma, 4)
        << ", delta_cond = " << num(rep.delta_cond, 4) << ", gamma_cond = " << num(rep.gamma_cond, 4) << '\n';
}

void criterion6(Check& c) {
  std::vector<int> ns;
  for (int n = 4; n <= 12; ++n) ns.push_back(n);
  const CqChannel source({"0"}, {rotated_diag(0.75, 0.0)});
  std::string empty;
  for (int n : ns) {
    if (typical_projector(source.state(0), n, 0.1).rank() == 0) empty += " " + std::to_string(n);
  }
  if (!empty.empty()) c.log << "  info diag(3/4,1/4) typical subspace is empty at n =" << empty << '\n';
  report_typicality(c, "diag(3/4,1/4)",
                    verify_typicality_bounds(source, ProbabilityVector::uniform(1), ns, 0.1));
  const CqChannel mixed({"0", "1"}, {rotated_diag(0.99, 0.05), rotated_diag(0.99, -0.05)});
  report_typicality(c, "binary-input channel",
                    verify_typicality_bounds(mixed, ProbabilityVector::from_weights({0.45, 0.55}), ns, 0.1));
}

void criterion7(Check& c) {
  const Avcqc w = constant_channel();
  const CorrelatedSource limit = CorrelatedSource::perfectly_correlated();
  const CrCapacityResult at_limit = cr_capacity(w, limit);
  c.expect(std::abs(at_limit.value - 1.0) <= 1e-6, "limit source: " + num(at_limit.value, 12));
  double prev = 1.0;
  for (int n : {3, 4, 5}) {
    const CorrelatedSource s = CorrelatedSource::dyadic_sequence(n);
    const double d = source_distance(s, limit);
    const double v = cr_capacity(w, s).value;
    c.expect(v <= 1e-3 && std::abs(d - std::ldexp(1.0, 2 - n)) < 1e-15 && d < prev,
             "n = " + std::to_string(n) + ": distance " + num(d) + ", capacity " + num(v, 4));
    prev = d;
  }
}

double bsc_half_bit_crossover() {
  double lo = 0.0;
  double hi = 0.5;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (oracle::h(mid) < 0.5 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

void criterion8(Check& c) {
  const CorrelatedSource half = CorrelatedSource::binary_symmetric(bsc_half_bit_crossover());
  const CrCapacityResult r1 = cr_capacity(fixtures::orthogonal(), half);
  c.expect(std::abs(half.mutual_information() - 0.5) < 1e-9,
           "source I(V';V) = " + num(half.mutual_information()));
  c.expect(r1.case_tag == CrCase::SmallCorrelation && std::abs(r1.value - 1.5) <= 5e-3,
           std::string("orthogonal channel: ") + to_string(r1.case_tag) + ", value " + num(r1.value));

  const Avcqc cst = constant_channel();
  const double c_star = oracle::capacity_2x2(cst);
  const std::array<std::array<double, 2>, 2> z = {{{0.5, 0.0}, {0.25, 0.25}}};
  const std::array<std::array<double, 2>, 2> skew = {{{0.4, 0.1}, {0.05, 0.45}}};
  const std::array<std::array<double, 2>, 2> aligned = {{{0.7, 0.0}, {0.0, 0.3}}};
  const std::array<std::array<double, 2>, 2> partial = {{{0.6, 0.1}, {0.0, 0.3}}};
  for (const auto& joint : {z, skew, aligned, partial}) {
    RealMatrix m(2, 2);
    m << joint[0][0], joint[0][1], joint[1][0], joint[1][1];
    const CorrelatedSource src({"0", "1"}, {"0", "1"}, m);
    const CrCapacityResult r = cr_capacity(cst, src);
    const double ref = oracle::cr_case2_grid(c_star, joint, 32, 1e-9);
    c.expect(r.case_tag == CrCase::LargeCorrelation && std::abs(r.value - ref) <= 5e-3,
             std::string("constant channel: ") + to_string(r.case_tag) + ", value " + num(r.value) +
                 ", grid oracle " + num(ref));
  }
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

void criterion9(Check& c) {
  const fs::path dir = fs::temp_directory_path() / "avcqc_acceptance_9";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string channel = (dir / "channel.json").string();
  const std::string source = (dir / "source.json").string();
  std::ofstream(channel) << avcqc_to_json(fixtures::orthogonal()).dump(2);
  std::ofstream(source) << source_to_json(CorrelatedSource::binary_symmetric(0.1)).dump(2);
  const std::string cw = " --channel " + channel;
  const std::string cs = cw + " --source " + source;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"capacity", "capacity" + cw + " --seed 5"},
      {"cr-capacity", "cr-capacity" + cs + " --seed 5"},
      {"separate", "separate" + cs + " --seed 5"},
      {"typicality", "typicality" + cw + " --n-list 4,5,6 --alpha 0.3"},
      {"simulate", "simulate" + cs + " --trials 200 --seed 5"},
      {"discontinuity", "discontinuity --seed 5"},
  };
  for (const auto& [name, args] : commands) {
    std::string outputs[2];
    bool ran = true;
    for (int i = 0; i < 2; ++i) {
      const fs::path out = dir / (name + std::to_string(i) + ".out");
      const fs::path trace = dir / (name + std::to_string(i) + ".trace");
      std::string cmd = std::string(AVCQC_CLI_PATH) + " " + args + " --out " + out.string();
      if (name == "capacity") cmd += " --trace-csv " + trace.string();
      ran = ran && std::system(cmd.c_str()) == 0;
      outputs[i] = slurp(out) + (name == "capacity" ? slurp(trace) : "");
    }
    c.expect(ran && !outputs[0].empty() && outputs[0] == outputs[1], name + " byte-identical across runs");
  }
  fs::remove_all(dir);
}

struct Criterion {
  const char* title;
  double limit_seconds;
  std::function<void(Check&)> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {"entropy and Holevo kernel", 1.0, criterion1},
      {"capacity solver against the grid oracle", 120.0, criterion2},
      {"separation suite", 60.0, criterion3},
      {"informed-jammer decomposition exactness", 60.0, criterion4},
      {"two-part code error chain", 60.0, criterion5},
      {"typical subspace bounds", 120.0, criterion6},
      {"discontinuity along the dyadic sources", 60.0, criterion7},
      {"common randomness case split", 60.0, criterion8},
      {"determinism of every command", 0.0, criterion9},
  };
  return all;
}

bool run_one(int id) {
  const Criterion& crit = criteria()[static_cast<std::size_t>(id - 1)];
  Check c;
  const auto start = std::chrono::steady_clock::now();
  try {
    crit.run(c);
  } catch (const std::exception& e) {
    c.expect(false, std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (crit.limit_seconds > 0.0) {
    c.expect(secs < crit.limit_seconds,
             "runtime " + num(secs, 3) + " s < " + num(crit.limit_seconds, 3) + " s");
  }
  std::cout << (c.ok ? "PASS" : "FAIL") << " criterion " << id << ": " << crit.title << " (" << num(secs, 3)
            << " s)\n"
            << c.log.str() << std::flush;
  return c.ok;
}

}  // namespace
}  // namespace avcqc

int main(int argc, char** argv) {
  const int total = static_cast<int>(avcqc::criteria().size());
  if (argc > 1) {
    const int id = std::atoi(argv[1]);
    if (id < 1 || id > total) {
      std::cerr << "usage: avcqc_acceptance [1-" << total << "]\n";
      return 2;
    }
    return avcqc::run_one(id) ? 0 : 1;
  }
  bool ok = true;
  for (int id = 1; id <= total; ++id) ok = avcqc::run_one(id) && ok;
  return ok ? 0 : 1;
}
