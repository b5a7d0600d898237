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

#pragma once

// JSON formats. Complex numbers are [re, im] pairs and matrices are row-major
// nested arrays of them. Floats are written with 17 significant digits.

#include <stdexcept>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "irt/instruments.hpp"
#include "irt/operations.hpp"
#include "irt/robustness.hpp"
#include "irt/tasks.hpp"

namespace irt::json {

using Json = nlohmann::json;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Json to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const Json& j);
Json to_json(const RealMatrix& m);  ///< plain nested arrays of numbers
RealMatrix real_matrix_from_json(const Json& j);

/// { "d_in", "d_out", "outcomes": [ {"label", "choi"} ] }.
Json to_json(const Instrument& inst);
/// Outcomes may give "choi" or "kraus" (a list of d_out × d_in matrices).
/// Shapes are checked; physical validity is left to validate().
Instrument instrument_from_json(const Json& j);

/// { "R", "gap", "kappa": [...], "omega": [...] }.
Json to_json(const RobustnessCertificate& cert);

/// { "effects": [ {"label", "matrix"} ], "inconclusive": matrix }.
Json to_json(const DiscriminationStrategy& strat);
/// The file carries no dimensions; the shape comes from the instrument the
/// strategy is meant for.
DiscriminationStrategy strategy_from_json(const Json& j, BipartiteShape shape);

/// { "output_labels": [...], "branches": [ {"weight", "pre_choi",
///   "post_chois": [...], "classical_map": [[...]]} ] }.
Json to_json(const AllowedOperation& op);
AllowedOperation operation_from_json(const Json& j);

/// { "verdict", "residual", "witness", "certificate", "bounds": {"lower", "upper"} }.
Json to_json(const ConversionReport& report);

/// Serialises with every float printed as %.17g; non-finite values become null.
std::string dump(const Json& j, int indent = 2);
Json parse(std::string_view text);
/// Throws FormatError when the file is missing or malformed.
Json load_file(const std::string& path);

}  // namespace irt::json
