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

#include <iosfwd>
#include <string>
#include <vector>

#include "avcqc/coding_sim.hpp"

namespace avcqc {

/// Exit codes of the command-line front end.
enum ExitCode : int { kExitOk = 0, kExitError = 1, kExitIndeterminate = 2 };

/// Runs one command line. Diagnostics go to `err`; results are written to the
/// --out file only after the whole computation succeeded.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Two-part code used by `simulate` when no --code is given: the key pre-code
/// over nu uses, then an inner code of block length inner_n whose key-k
/// codebook sends letter (j + k) mod |X| repeatedly, decoded by a
/// pretty-good measurement under the uniform jammer.
TwoPartCode default_simulation_code(const Avcqc& w, const CorrelatedSource& src, int nu, int num_keys,
                                    int inner_n, const Caps& caps = default_caps());

/// Constant qubit channel: every (x, s) yields |0><0|.
Avcqc constant_channel(int num_inputs = 2, int num_states = 2);

/// Writes `contents` to `path` through a temporary file and a rename.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace avcqc
