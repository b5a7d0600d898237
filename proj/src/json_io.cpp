// Copyright 2026 The instrument-rt Authors
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

#include "irt/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace irt::json {

namespace {

Eigen::Index idx(std::size_t v) { return static_cast<Eigen::Index>(v); }

const Json& field(const Json& j, const char* key, const char* what) {
  if (!j.is_object() || !j.contains(key)) throw FormatError(std::string(what) + ": missing \"" + key + "\"");
  return j.at(key);
}

double number(const Json& j, const char* what) {
  if (!j.is_number()) throw FormatError(std::string(what) + ": expected a number");
  return j.get<double>();
}

std::size_t count(const Json& j, const char* what) {
  if (!j.is_number_integer() && !j.is_number_unsigned()) throw FormatError(std::string(what) + ": expected an integer");
  const auto v = j.get<long long>();
  if (v < 1) throw FormatError(std::string(what) + ": must be positive");
  return static_cast<std::size_t>(v);
}

void require_side(const ComplexMatrix& m, std::size_t side, const std::string& what) {
  if (m.rows() != idx(side) || m.cols() != idx(side)) {
    throw FormatError(what + ": expected " + std::to_string(side) + "x" + std::to_string(side) + ", got " +
                      describe_shape(m));
  }
}

void write_number(std::string& out, double v) {
  if (!std::isfinite(v)) {
    out += "null";
    return;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

void write(const Json& j, int indent, int depth, std::string& out) {
  const bool pretty = indent >= 0;
  auto newline = [&](int d) {
    if (!pretty) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += Json(it.key()).dump();
        out += pretty ? ": " : ":";
        write(it.value(), indent, depth + 1, out);
      }
      newline(depth);
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      const bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += flat && pretty ? ", " : ",";
        if (!flat) newline(depth + 1);
        write(j[i], indent, depth + 1, out);
      }
      if (!flat) newline(depth);
      out += ']';
      return;
    }
    case Json::value_t::number_float:
      write_number(out, j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

}  // namespace

Json to_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

ComplexMatrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw FormatError("matrix: expected a non-empty array of rows");
  const std::size_t rows = j.size();
  if (!j[0].is_array() || j[0].empty()) throw FormatError("matrix: rows must be non-empty arrays");
  const std::size_t cols = j[0].size();
  ComplexMatrix m(idx(rows), idx(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) throw FormatError("matrix: ragged rows");
    for (std::size_t c = 0; c < cols; ++c) {
      const Json& e = j[r][c];
      if (e.is_number()) {
        m(idx(r), idx(c)) = e.get<double>();
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        m(idx(r), idx(c)) = Complex(e[0].get<double>(), e[1].get<double>());
      } else {
        throw FormatError("matrix: entries must be [re, im] pairs");
      }
    }
  }
  return m;
}

Json to_json(const RealMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

RealMatrix real_matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array() || j[0].empty()) {
    throw FormatError("real matrix: expected a non-empty array of rows");
  }
  const std::size_t rows = j.size(), cols = j[0].size();
  RealMatrix m(idx(rows), idx(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) throw FormatError("real matrix: ragged rows");
    for (std::size_t c = 0; c < cols; ++c) m(idx(r), idx(c)) = number(j[r][c], "real matrix");
  }
  return m;
}

Json to_json(const Instrument& inst) {
  Json outcomes = Json::array();
  for (const auto& o : inst.outcomes()) outcomes.push_back({{"label", o.label}, {"choi", to_json(o.choi)}});
  return {{"d_in", inst.d_in()}, {"d_out", inst.d_out()}, {"outcomes", std::move(outcomes)}};
}

Instrument instrument_from_json(const Json& j) {
  const std::size_t da = count(field(j, "d_in", "instrument"), "d_in");
  const std::size_t db = count(field(j, "d_out", "instrument"), "d_out");
  const Json& list = field(j, "outcomes", "instrument");
  if (!list.is_array() || list.empty()) throw FormatError("instrument: \"outcomes\" must be a non-empty array");
  std::vector<Outcome> outcomes;
  for (std::size_t a = 0; a < list.size(); ++a) {
    const Json& o = list[a];
    if (!o.is_object()) throw FormatError("instrument: outcome entries must be objects");
    std::string label = std::to_string(a);
    if (o.contains("label")) {
      if (!o["label"].is_string()) throw FormatError("instrument: labels must be strings");
      label = o["label"].get<std::string>();
    }
    const bool has_choi = o.contains("choi"), has_kraus = o.contains("kraus");
    if (has_choi == has_kraus) throw FormatError("instrument: outcome \"" + label + "\" needs exactly one of choi, kraus");
    if (has_choi) {
      ComplexMatrix choi = matrix_from_json(o["choi"]);
      require_side(choi, da * db, "instrument: choi of \"" + label + "\"");
      outcomes.push_back({label, std::move(choi)});
    } else {
      const Json& ks = o["kraus"];
      if (!ks.is_array() || ks.empty()) throw FormatError("instrument: \"kraus\" must be a non-empty array");
      std::vector<ComplexMatrix> kraus;
      for (const auto& k : ks) {
        kraus.push_back(matrix_from_json(k));
        if (kraus.back().rows() != idx(db) || kraus.back().cols() != idx(da)) {
          throw FormatError("instrument: Kraus operators of \"" + label + "\" must be d_out x d_in");
        }
      }
      outcomes.push_back({label, choi_of_kraus(kraus, da, db)});
    }
  }
  return Instrument({da, db}, std::move(outcomes));
}

Json to_json(const RobustnessCertificate& cert) {
  Json kappa = Json::array(), omega = Json::array();
  for (const auto& k : cert.kappa) kappa.push_back(to_json(k));
  for (const auto& w : cert.omega) omega.push_back(to_json(w));
  return {{"R", cert.value}, {"gap", cert.gap}, {"kappa", std::move(kappa)}, {"omega", std::move(omega)}};
}

Json to_json(const DiscriminationStrategy& strat) {
  Json effects = Json::array();
  for (std::size_t m = 0; m < strat.size(); ++m) {
    const std::string label = m < strat.labels.size() ? strat.labels[m] : std::to_string(m);
    effects.push_back({{"label", label}, {"matrix", to_json(strat.effects[m])}});
  }
  return {{"effects", std::move(effects)}, {"inconclusive", to_json(strat.inconclusive)}};
}

DiscriminationStrategy strategy_from_json(const Json& j, BipartiteShape shape) {
  const Json& list = field(j, "effects", "strategy");
  if (!list.is_array() || list.empty()) throw FormatError("strategy: \"effects\" must be a non-empty array");
  DiscriminationStrategy strat;
  strat.shape = shape;
  for (std::size_t m = 0; m < list.size(); ++m) {
    const Json& e = list[m];
    strat.labels.push_back(e.contains("label") && e["label"].is_string() ? e["label"].get<std::string>()
                                                                          : std::to_string(m));
    strat.effects.push_back(matrix_from_json(field(e, "matrix", "strategy effect")));
    require_side(strat.effects.back(), shape.total(), "strategy: effect \"" + strat.labels.back() + "\"");
  }
  strat.inconclusive = matrix_from_json(field(j, "inconclusive", "strategy"));
  require_side(strat.inconclusive, shape.total(), "strategy: inconclusive effect");
  return strat;
}

Json to_json(const AllowedOperation& op) {
  Json branches = Json::array();
  for (const auto& b : op.branches) {
    Json post = Json::array();
    for (const auto& d : b.post_chois) post.push_back(to_json(d));
    branches.push_back({{"weight", b.weight},
                        {"pre_choi", to_json(b.pre_choi)},
                        {"post_chois", std::move(post)},
                        {"classical_map", to_json(b.classical_map)}});
  }
  return {{"output_labels", op.output_labels}, {"branches", std::move(branches)}};
}

AllowedOperation operation_from_json(const Json& j) {
  AllowedOperation op;
  if (j.contains("output_labels")) {
    for (const auto& l : j["output_labels"]) {
      if (!l.is_string()) throw FormatError("operation: labels must be strings");
      op.output_labels.push_back(l.get<std::string>());
    }
  }
  const Json& list = field(j, "branches", "operation");
  if (!list.is_array() || list.empty()) throw FormatError("operation: \"branches\" must be a non-empty array");
  for (const auto& b : list) {
    OperationBranch branch;
    branch.weight = number(field(b, "weight", "operation branch"), "weight");
    branch.pre_choi = matrix_from_json(field(b, "pre_choi", "operation branch"));
    const Json& post = field(b, "post_chois", "operation branch");
    if (!post.is_array()) throw FormatError("operation: \"post_chois\" must be an array");
    for (const auto& d : post) branch.post_chois.push_back(matrix_from_json(d));
    branch.classical_map = real_matrix_from_json(field(b, "classical_map", "operation branch"));
    op.branches.push_back(std::move(branch));
  }
  return op;
}

Json to_json(const ConversionReport& report) {
  return {{"verdict", to_string(report.verdict)},
          {"residual", report.residual},
          {"witness", report.witness ? to_json(*report.witness) : Json(nullptr)},
          {"certificate", report.certificate ? to_json(*report.certificate) : Json(nullptr)},
          {"bounds", {{"lower", report.lower}, {"upper", report.upper}}},
          {"padded_outcomes", report.padded_outcomes}};
}

std::string dump(const Json& j, int indent) {
  std::string out;
  write(j, indent, 0, out);
  return out;
}

Json parse(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw FormatError(std::string("malformed JSON: ") + e.what());
  }
}

Json load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse(buf.str());
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

}  // namespace irt::json
