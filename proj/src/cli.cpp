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

#include "avcqc/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "avcqc/capacity.hpp"
#include "avcqc/json_io.hpp"
#include "avcqc/kw_separation.hpp"
#include "avcqc/typicality.hpp"

namespace avcqc {

namespace {

struct RunConfig {
  std::string channel;
  std::string source;
  std::string code;
  std::string out;
  std::string trace_csv;
  std::uint64_t seed = 0;
  bool seed_given = false;

  int restarts = 32;
  bool no_oracle = false;

  std::vector<int> n_list;
  std::vector<double> prior;
  double alpha = 0.1;

  int trials = 1000;
  int keys = 2;
  int nu = 3;
  int inner_n = 1;
  int grid = 16;

  Tolerances tol;
  Caps caps;
};

void add_io(CLI::App* cmd, RunConfig& cfg, bool channel, bool source, bool seed) {
  if (channel) cmd->add_option("--channel", cfg.channel, "channel spec (JSON)")->required();
  if (source) cmd->add_option("--source", cfg.source, "correlated source spec (JSON)")->required();
  auto* s = cmd->add_option("--seed", cfg.seed, "64-bit seed");
  if (seed) s->required();
  cmd->add_option("--out", cfg.out, "output file")->required();
  cmd->add_option("--tol-hermitian", cfg.tol.hermitian);
  cmd->add_option("--tol-psd", cfg.tol.psd_floor);
  cmd->add_option("--tol-trace", cfg.tol.trace);
  cmd->add_option("--tol-probability", cfg.tol.probability_sum);
  cmd->add_option("--tol-povm", cfg.tol.povm);
  cmd->add_option("--tol-separation-lower", cfg.tol.separation_lower);
  cmd->add_option("--tol-separation-upper", cfg.tol.separation_upper);
  cmd->add_option("--tol-case-band", cfg.tol.case_tie_band);
  cmd->add_option("--max-dim", cfg.caps.max_dim)->check(CLI::PositiveNumber);
  cmd->add_option("--max-enumeration", cfg.caps.max_enumeration)->check(CLI::PositiveNumber);
  cmd->add_option("--max-jammer", cfg.caps.max_jammer)->check(CLI::PositiveNumber);
  cmd->add_option("--max-functions", cfg.caps.max_functions)->check(CLI::PositiveNumber);
}

SolverOptions solver_options(const RunConfig& cfg) {
  SolverOptions o;
  o.seed = cfg.seed;
  o.outer_restarts = cfg.restarts;
  o.run_oracle = !cfg.no_oracle;
  return o;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string cmd_capacity(const RunConfig& cfg, std::string* trace) {
  const Avcqc w = avcqc_from_json(read_json_file(cfg.channel), cfg.tol);
  const CapacityResult r = capacity_informed_jammer(w, solver_options(cfg));
  if (trace) {
    std::ostringstream os;
    os << "iteration,objective\n";
    for (std::size_t i = 0; i < r.solver_trace.size(); ++i) os << i << ',' << fmt(r.solver_trace[i]) << '\n';
    *trace = os.str();
  }
  return dump(to_json(r));
}

std::string cmd_cr_capacity(const RunConfig& cfg) {
  const Avcqc w = avcqc_from_json(read_json_file(cfg.channel), cfg.tol);
  const CorrelatedSource src = source_from_json(read_json_file(cfg.source), cfg.tol);
  CrOptions o;
  o.solver = solver_options(cfg);
  o.run_oracle = !cfg.no_oracle;
  return dump(to_json(cr_capacity(w, src, o, cfg.tol)));
}

std::string cmd_separate(const RunConfig& cfg) {
  const Avcqc w = avcqc_from_json(read_json_file(cfg.channel), cfg.tol);
  const CorrelatedSource src = source_from_json(read_json_file(cfg.source), cfg.tol);
  const GPair gp = build_g_pair(src, w.num_inputs());
  SeparationOptions so;
  so.seed = cfg.seed;
  const SeparationOutcome sep = separation_test(w, src, gp, so, cfg.tol, cfg.caps);
  Json j;
  j["g_pair"] = to_json(gp);
  j["separation"] = to_json(sep);
  if (sep.certificate) {
    const BinaryAvc avc = induced_binary_avc(*sep.certificate, w, src, gp, cfg.grid, cfg.caps);
    const PositivityResult pos = binary_avc_positivity(avc);
    Json b;
    b["grid_k"] = avc.grid_k;
    b["grid_size"] = avc.grid_size;
    b["min_v00"] = avc.min_v00;
    b["max_v00"] = avc.max_v00;
    b["min_v11"] = avc.min_v11;
    b["max_v11"] = avc.max_v11;
    b["positive"] = pos.positive;
    b["rate_r"] = pos.rate_r;
    j["binary_avc"] = std::move(b);
  } else {
    j["binary_avc"] = nullptr;
  }
  return dump(j);
}

std::string cmd_typicality(const RunConfig& cfg) {
  const Avcqc w = avcqc_from_json(read_json_file(cfg.channel), cfg.tol);
  const CqChannel cq = averaged_channel(w, JammerKernel::uniform(w.num_inputs(), w.num_states()));
  const ProbabilityVector p = cfg.prior.empty() ? ProbabilityVector::uniform(w.num_inputs())
                                                : ProbabilityVector::from_weights(cfg.prior, cfg.tol);
  if (p.size() != w.num_inputs()) {
    throw Error(ErrorKind::AlphabetMismatch, "prior has " + std::to_string(p.size()) +
                                                 " weights, channel has " + std::to_string(w.num_inputs()) +
                                                 " inputs");
  }
  std::vector<int> ns = cfg.n_list;
  if (ns.empty()) {
    for (int n = 4; n <= 12; ++n) ns.push_back(n);
  }
  return verify_typicality_bounds(cq, p, ns, cfg.alpha, cfg.caps).to_csv();
}

std::string cmd_simulate(const RunConfig& cfg, std::string* code_json) {
  const Avcqc w = avcqc_from_json(read_json_file(cfg.channel), cfg.tol);
  const CorrelatedSource src = source_from_json(read_json_file(cfg.source), cfg.tol);
  CorrelationCode code;
  if (!cfg.code.empty()) {
    code = code_from_json(read_json_file(cfg.code));
  } else {
    code = default_simulation_code(w, src, cfg.nu, cfg.keys, cfg.inner_n, cfg.caps).assembled;
  }
  code.validate(w, src, cfg.tol);
  if (code_json) *code_json = dump(code_to_json(code));
  const CrRun run = cr_generation_run(w, src, code, cfg.trials, cfg.seed, cfg.caps);
  return run.to_csv(code);
}

std::string cmd_discontinuity(const RunConfig& cfg) {
  std::vector<int> ns = cfg.n_list.empty() ? std::vector<int>{3, 4, 5} : cfg.n_list;
  for (int n : ns) {
    if (n < 3 || n > 60) throw Error(ErrorKind::InvalidArgument, "n_list entries must lie in [3, 60]");
  }
  const Avcqc w = constant_channel();
  const CapacityResult c = capacity_informed_jammer(w, solver_options(cfg));
  CrOptions o;
  o.solver = solver_options(cfg);
  const CorrelatedSource limit = CorrelatedSource::perfectly_correlated();
  std::ostringstream os;
  os << "n,source_distance_to_limit,cr_capacity\n";
  for (int n : ns) {
    const CorrelatedSource s = CorrelatedSource::dyadic_sequence(n);
    const CrCapacityResult r = cr_capacity_from_value(c.value, s, o, cfg.tol);
    os << n << ',' << fmt(source_distance(s, limit)) << ',' << fmt(r.value) << '\n';
  }
  const CrCapacityResult r = cr_capacity_from_value(c.value, limit, o, cfg.tol);
  os << "limit," << fmt(0.0) << ',' << fmt(r.value) << '\n';
  return os.str();
}

}  // namespace

Avcqc constant_channel(int num_inputs, int num_states) {
  std::vector<std::string> xs;
  std::vector<std::string> ss;
  for (int x = 0; x < num_inputs; ++x) xs.push_back(std::to_string(x));
  for (int s = 0; s < num_states; ++s) ss.push_back(std::to_string(s));
  std::vector<DensityOperator> states(static_cast<std::size_t>(num_inputs * num_states),
                                      DensityOperator::basis_state(2, 0));
  return Avcqc(xs, ss, states);
}

TwoPartCode default_simulation_code(const Avcqc& w, const CorrelatedSource& src, int nu, int num_keys,
                                    int inner_n, const Caps& caps) {
  if (inner_n < 1) throw Error(ErrorKind::InvalidArgument, "inner block length must be positive");
  const GPair gp = build_g_pair(src, w.num_inputs());
  const JammerKernel uniform = JammerKernel::uniform(w.num_inputs(), w.num_states());
  const CorrelationCode pre = build_key_precode(w, src, gp, nu, num_keys, uniform, caps);
  checked_power(static_cast<std::uint64_t>(w.dim()), inner_n, caps.max_dim, ErrorKind::DimOverflow);
  const std::vector<Matrix> avg = averaged_states(w, uniform.flat());
  const int nx = w.num_inputs();
  RandomCode inner;
  for (int k = 0; k < num_keys; ++k) {
    DeterministicCode dc;
    dc.n = inner_n;
    std::vector<Matrix> outputs;
    for (int j = 0; j < nx; ++j) {
      const int letter = (j + k) % nx;
      dc.codebook.push_back(Sequence(static_cast<std::size_t>(inner_n), letter));
      Matrix s = Matrix::Identity(1, 1);
      for (int t = 0; t < inner_n; ++t) s = kron(s, avg[static_cast<std::size_t>(letter)]);
      outputs.push_back(std::move(s));
    }
    dc.decoders = pretty_good_measurement(outputs);
    inner.keyed.push_back(std::move(dc));
  }
  return assemble_two_part(pre, inner);
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorKind::InvalidArgument, "cannot write " + tmp);
    f << contents;
    if (!f) throw Error(ErrorKind::InvalidArgument, "write failed for " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorKind::InvalidArgument, "cannot move output into place at " + path);
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Arbitrarily varying classical-quantum channel toolkit", "avcqc"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* cap = app.add_subcommand("capacity", "max-min Holevo capacity with an informed jammer");
  add_io(cap, cfg, true, false, true);
  cap->add_option("--trace-csv", cfg.trace_csv, "solver trace output (CSV)");
  cap->add_option("--restarts", cfg.restarts)->check(CLI::PositiveNumber);
  cap->add_flag("--no-oracle", cfg.no_oracle);

  auto* cr = app.add_subcommand("cr-capacity", "common randomness capacity with a correlated source");
  add_io(cr, cfg, true, true, true);
  cr->add_option("--restarts", cfg.restarts)->check(CLI::PositiveNumber);
  cr->add_flag("--no-oracle", cfg.no_oracle);

  auto* sep = app.add_subcommand("separate", "separation test for the encoder pair of a source");
  add_io(sep, cfg, true, true, true);
  sep->add_option("--grid", cfg.grid, "kernel grid resolution")->check(CLI::PositiveNumber);

  auto* typ = app.add_subcommand("typicality", "typical-subspace bound report (CSV)");
  add_io(typ, cfg, true, false, false);
  typ->add_option("--prior", cfg.prior, "input distribution")->delimiter(',');
  typ->add_option("--n-list", cfg.n_list, "block lengths")->delimiter(',');
  typ->add_option("--alpha", cfg.alpha)->check(CLI::PositiveNumber);

  auto* sim = app.add_subcommand("simulate", "common randomness generation trials (CSV)");
  add_io(sim, cfg, true, true, true);
  sim->add_option("--code", cfg.code, "correlation code (JSON); default two-part code otherwise");
  sim->add_option("--trials", cfg.trials)->check(CLI::PositiveNumber);
  sim->add_option("--keys", cfg.keys)->check(CLI::Range(2, 64));
  sim->add_option("--nu", cfg.nu)->check(CLI::Range(1, 12));
  sim->add_option("--inner-n", cfg.inner_n)->check(CLI::Range(1, 8));

  auto* dis = app.add_subcommand("discontinuity", "capacity along a converging source sequence (CSV)");
  add_io(dis, cfg, false, false, true);
  dis->add_option("--n-list", cfg.n_list, "sequence indices (>= 3)")->delimiter(',');

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }

  try {
    std::string result;
    std::string side;
    std::string side_path;
    if (cap->parsed()) {
      result = cmd_capacity(cfg, cfg.trace_csv.empty() ? nullptr : &side);
      side_path = cfg.trace_csv;
    } else if (cr->parsed()) {
      result = cmd_cr_capacity(cfg);
    } else if (sep->parsed()) {
      result = cmd_separate(cfg);
    } else if (typ->parsed()) {
      result = cmd_typicality(cfg);
    } else if (sim->parsed()) {
      result = cmd_simulate(cfg, nullptr);
    } else if (dis->parsed()) {
      result = cmd_discontinuity(cfg);
    }
    write_file_atomic(cfg.out, result);
    if (!side_path.empty()) write_file_atomic(side_path, side);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::Indeterminate ? kExitIndeterminate : kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitOk;
}

}  // namespace avcqc
