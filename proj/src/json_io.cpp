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

#include "avcqc/json_io.hpp"

#include <fstream>
#include <sstream>

namespace avcqc {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorKind::SpecParseError, msg); }

const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) fail(where + ": expected an object");
  const auto it = j.find(key);
  if (it == j.end()) fail(where + ": missing field \"" + key + "\"");
  return *it;
}

std::vector<std::string> labels(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where + ": expected a nonempty array of labels");
  std::vector<std::string> out;
  for (const auto& e : j) {
    if (e.is_string()) {
      out.push_back(e.get<std::string>());
    } else if (e.is_number_integer()) {
      out.push_back(std::to_string(e.get<long long>()));
    } else {
      fail(where + ": labels must be strings or integers");
    }
  }
  return out;
}

double number(const Json& j, const std::string& where) {
  if (!j.is_number()) fail(where + ": expected a number");
  return j.get<double>();
}

int integer(const Json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where + ": expected an integer");
  return j.get<int>();
}

Json kernel_to_json(const JammerKernel& q) {
  Json rows = Json::array();
  for (int x = 0; x < q.num_inputs(); ++x) rows.push_back(q.row(x));
  return rows;
}

Json real_matrix_to_json(const RealMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

Json parse_json(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t end = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    fail(origin + ": line " + std::to_string(line) + ", column " + std::to_string(column) +
         ": malformed JSON");
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path + ": cannot open file");
  std::ostringstream os;
  os << in.rdbuf();
  return parse_json(os.str(), path);
}

Matrix matrix_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where + ": expected a nonempty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  Eigen::Index cols = -1;
  Matrix m;
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array()) fail(where + ": row " + std::to_string(r) + " is not an array");
    if (cols < 0) {
      cols = static_cast<Eigen::Index>(row.size());
      m = Matrix::Zero(rows, cols);
    } else if (static_cast<Eigen::Index>(row.size()) != cols) {
      fail(where + ": ragged rows");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      const Json& e = row[static_cast<std::size_t>(c)];
      if (e.is_number()) {
        m(r, c) = Complex(e.get<double>(), 0.0);
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        m(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
      } else {
        fail(where + ": entry (" + std::to_string(r) + "," + std::to_string(c) +
             ") must be a number or [re, im]");
      }
    }
  }
  return m;
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

Avcqc avcqc_from_json(const Json& j, const Tolerances& tol) {
  const std::string where = "channel";
  const auto xs = labels(field(j, "x_alphabet", where), where + ".x_alphabet");
  const auto ss = labels(field(j, "s_alphabet", where), where + ".s_alphabet");
  const int dim = integer(field(j, "dim", where), where + ".dim");
  if (dim < 1) fail(where + ".dim: must be positive");
  const Json& states = field(j, "states", where);
  if (!states.is_object()) fail(where + ".states: expected an object keyed by \"x,s\"");
  if (states.size() != xs.size() * ss.size()) {
    fail(where + ".states: expected " + std::to_string(xs.size() * ss.size()) + " entries, found " +
         std::to_string(states.size()));
  }
  std::vector<DensityOperator> out;
  for (const auto& x : xs) {
    for (const auto& s : ss) {
      const std::string key = x + "," + s;
      const auto it = states.find(key);
      if (it == states.end()) fail(where + ".states: missing entry \"" + key + "\"");
      const Matrix m = matrix_from_json(*it, where + ".states[" + key + "]");
      if (m.rows() != dim || m.cols() != dim) {
        fail(where + ".states[" + key + "]: expected " + std::to_string(dim) + "x" + std::to_string(dim));
      }
      out.push_back(DensityOperator::validate(m, tol));
    }
  }
  return Avcqc(xs, ss, std::move(out));
}

Json avcqc_to_json(const Avcqc& w) {
  Json j;
  j["x_alphabet"] = w.x_labels();
  j["s_alphabet"] = w.s_labels();
  j["dim"] = w.dim();
  Json states = Json::object();
  for (int x = 0; x < w.num_inputs(); ++x) {
    for (int s = 0; s < w.num_states(); ++s) {
      states[w.x_labels()[static_cast<std::size_t>(x)] + "," + w.s_labels()[static_cast<std::size_t>(s)]] =
          matrix_to_json(w.state(x, s).matrix());
    }
  }
  j["states"] = std::move(states);
  return j;
}

CorrelatedSource source_from_json(const Json& j, const Tolerances& tol) {
  const std::string where = "source";
  const auto vp = labels(field(j, "v_prime", where), where + ".v_prime");
  const auto v = labels(field(j, "v", where), where + ".v");
  const Json& joint = field(j, "joint", where);
  if (!joint.is_array() || joint.size() != vp.size())
    fail(where + ".joint: expected one row per v_prime label");
  RealMatrix m(static_cast<Eigen::Index>(vp.size()), static_cast<Eigen::Index>(v.size()));
  for (std::size_t r = 0; r < vp.size(); ++r) {
    if (!joint[r].is_array() || joint[r].size() != v.size()) {
      fail(where + ".joint: row " + std::to_string(r) + " needs one entry per v label");
    }
    for (std::size_t c = 0; c < v.size(); ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = number(joint[r][c], where + ".joint");
    }
  }
  return CorrelatedSource(vp, v, m, tol);
}

Json source_to_json(const CorrelatedSource& src) {
  Json j;
  j["v_prime"] = src.v_prime_labels();
  j["v"] = src.v_labels();
  j["joint"] = real_matrix_to_json(src.joint());
  return j;
}

CorrelationCode code_from_json(const Json& j) {
  const std::string where = "code";
  CorrelationCode c;
  c.n = integer(field(j, "n", where), where + ".n");
  c.l = integer(field(j, "l", where), where + ".l");
  c.num_messages = integer(field(j, "num_messages", where), where + ".num_messages");
  c.num_private_keys =
      j.contains("num_private_keys") ? integer(j["num_private_keys"], where + ".num_private_keys") : 1;
  c.sender_alphabet = integer(field(j, "sender_alphabet", where), where + ".sender_alphabet");
  c.receiver_alphabet = integer(field(j, "receiver_alphabet", where), where + ".receiver_alphabet");
  const Json& enc = field(j, "encoders", where);
  if (!enc.is_array()) fail(where + ".encoders: expected an array");
  for (const auto& per_v : enc) {
    if (!per_v.is_array()) fail(where + ".encoders: expected [v'][r][j] nesting");
    std::vector<std::vector<Sequence>> rs;
    for (const auto& per_r : per_v) {
      if (!per_r.is_array()) fail(where + ".encoders: expected [v'][r][j] nesting");
      std::vector<Sequence> words;
      for (const auto& word : per_r) {
        if (!word.is_array()) fail(where + ".encoders: codewords are arrays of letters");
        Sequence x;
        for (const auto& a : word) x.push_back(integer(a, where + ".encoders"));
        words.push_back(std::move(x));
      }
      rs.push_back(std::move(words));
    }
    c.encoders.push_back(std::move(rs));
  }
  const Json& dec = field(j, "decoders", where);
  if (!dec.is_array()) fail(where + ".decoders: expected an array");
  for (std::size_t v = 0; v < dec.size(); ++v) {
    if (!dec[v].is_array()) fail(where + ".decoders: expected [v][j] nesting");
    std::vector<Matrix> family;
    for (std::size_t k = 0; k < dec[v].size(); ++k) {
      family.push_back(matrix_from_json(
          dec[v][k], where + ".decoders[" + std::to_string(v) + "][" + std::to_string(k) + "]"));
    }
    c.decoders.push_back(std::move(family));
  }
  return c;
}

Json code_to_json(const CorrelationCode& code) {
  Json j;
  j["n"] = code.n;
  j["l"] = code.l;
  j["num_messages"] = code.num_messages;
  j["num_private_keys"] = code.num_private_keys;
  j["sender_alphabet"] = code.sender_alphabet;
  j["receiver_alphabet"] = code.receiver_alphabet;
  j["encoders"] = code.encoders;
  Json dec = Json::array();
  for (const auto& family : code.decoders) {
    Json f = Json::array();
    for (const auto& d : family) f.push_back(matrix_to_json(d));
    dec.push_back(std::move(f));
  }
  j["decoders"] = std::move(dec);
  return j;
}

Json to_json(const CapacityResult& r) {
  Json j;
  j["value"] = r.value;
  j["argmax_p"] = r.argmax_p.weights();
  j["argmin_q"] = kernel_to_json(r.argmin_q);
  j["certified"] = r.certified;
  j["certified_gap"] = r.certified_gap;
  j["oracle_value"] = r.oracle_value;
  j["upper_bound"] = r.upper_bound;
  j["duality_gap"] = r.duality_gap;
  j["outer_iterations"] = r.solver_trace.size();
  return j;
}

Json to_json(const CrCapacityResult& r) {
  Json j;
  j["value"] = r.value;
  j["case"] = to_string(r.case_tag);
  j["c_star"] = r.c_star;
  j["source_mutual_information"] = r.source_mi;
  j["search_value"] = r.search_value;
  j["oracle_value"] = r.oracle_value;
  j["oracle_used"] = r.oracle_used;
  j["aux_channel"] = r.aux_channel ? real_matrix_to_json(*r.aux_channel) : Json(nullptr);
  return j;
}

Json to_json(const GPair& gp) {
  Json j;
  j["iota"] = gp.iota;
  j["x_size"] = gp.x_size;
  j["g0"] = gp.g0;
  j["g1"] = gp.g1;
  j["group"] = gp.group;
  j["label_m"] = gp.label_m;
  std::string half(gp.half.begin(), gp.half.end());
  j["half"] = half;
  return j;
}

Json to_json(const SeparationOutcome& s) {
  Json j;
  j["separable"] = s.separable;
  j["distance"] = s.distance;
  j["q0"] = kernel_to_json(s.q0);
  j["q1"] = kernel_to_json(s.q1);
  if (s.certificate) {
    const auto& c = *s.certificate;
    Json cert;
    cert["operator"] = matrix_to_json(c.a.matrix());
    cert["threshold_b"] = c.threshold_b;
    cert["margin"] = c.margin;
    cert["sup0"] = c.sup0;
    cert["inf1"] = c.inf1;
    cert["m0"] = matrix_to_json(c.m0.matrix());
    cert["m1"] = matrix_to_json(c.m1.matrix());
    j["certificate"] = std::move(cert);
  } else {
    j["certificate"] = nullptr;
  }
  return j;
}

}  // namespace avcqc
