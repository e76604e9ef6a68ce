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

#include <json.hpp>
#include <string>

#include "avcqc/capacity.hpp"
#include "avcqc/coding_sim.hpp"
#include "avcqc/kw_separation.hpp"

namespace avcqc {

using Json = nlohmann::ordered_json;

/// Parses JSON text; syntax errors become SpecParseError naming line and column.
Json parse_json(const std::string& text, const std::string& origin);
Json read_json_file(const std::string& path);

/// Complex matrices are arrays of rows; an entry is [re, im] or a bare real.
Matrix matrix_from_json(const Json& j, const std::string& where);
Json matrix_to_json(const Matrix& m);

/// {"x_alphabet": [...], "s_alphabet": [...], "dim": d, "states": {"x,s": matrix}}
Avcqc avcqc_from_json(const Json& j, const Tolerances& tol = default_tolerances());
Json avcqc_to_json(const Avcqc& w);

/// {"v_prime": [...], "v": [...], "joint": [[...]]}
CorrelatedSource source_from_json(const Json& j, const Tolerances& tol = default_tolerances());
Json source_to_json(const CorrelatedSource& src);

/// {"n", "l", "num_messages", "num_private_keys", "sender_alphabet",
///  "receiver_alphabet", "encoders": [v'][r][j] -> [letters], "decoders": [v][j] -> matrix}
CorrelationCode code_from_json(const Json& j);
Json code_to_json(const CorrelationCode& code);

Json to_json(const CapacityResult& r);
Json to_json(const CrCapacityResult& r);
Json to_json(const GPair& gp);
Json to_json(const SeparationOutcome& s);

}  // namespace avcqc
