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

#include <cstdio>
#include <fstream>

#include "test_util.hpp"

namespace irt::json {
namespace {

using testing::MatrixNear;

TEST(JsonMatrix, ComplexEntriesArePairs) {
  ComplexMatrix m(1, 2);
  m << Complex(0.5, -1), Complex(0, 0.25);
  EXPECT_EQ(dump(to_json(m), -1), "[[[0.5,-1],[0,0.25]]]");
  EXPECT_TRUE(MatrixNear(matrix_from_json(parse("[[[0.5,-1],[0,0.25]]]")), m, 0.0));
}

TEST(JsonMatrix, SeventeenDigits) {
  EXPECT_EQ(dump(Json(0.1), -1), "0.10000000000000001");
  EXPECT_EQ(dump(Json(std::nan("")), -1), "null");
}

TEST(JsonMatrix, RejectsMalformed) {
  EXPECT_THROW(matrix_from_json(parse("[[1,2],[3]]")), FormatError);
  EXPECT_THROW(matrix_from_json(parse("[[[1,2,3]]]")), FormatError);
  EXPECT_THROW(parse("{"), FormatError);
}

TEST(JsonInstrument, RoundTripIsBitwise) {
  CounterRng rng(1);
  const Instrument inst = random_instrument(2, 3, 3, rng);
  const std::string text = dump(to_json(inst));
  const Instrument back = instrument_from_json(parse(text));
  ASSERT_EQ(back.size(), inst.size());
  EXPECT_EQ(back.labels(), inst.labels());
  for (std::size_t a = 0; a < inst.size(); ++a) EXPECT_TRUE(MatrixNear(back.choi(a), inst.choi(a), 0.0));
  EXPECT_EQ(dump(to_json(back)), text);
}

TEST(JsonInstrument, KrausOutcomes) {
  const Json j = parse(R"({"d_in": 2, "d_out": 2, "outcomes": [
      {"label": "0", "kraus": [[[[1,0],[0,0]],[[0,0],[0,0]]]]},
      {"label": "1", "choi": [[[0,0],[0,0],[0,0],[0,0]],[[0,0],[0,0],[0,0],[0,0]],
                               [[0,0],[0,0],[0,0],[0,0]],[[0,0],[0,0],[0,0],[0.5,0]]]}]})");
  const Instrument inst = instrument_from_json(j);
  EXPECT_TRUE(validate(inst).valid());
  EXPECT_TRUE(MatrixNear(inst.choi(0), 0.5 * basis_op(4, 0, 0), 1e-15));
}

TEST(JsonInstrument, ShapeErrors) {
  EXPECT_THROW(instrument_from_json(parse(R"({"d_in": 2, "d_out": 2, "outcomes": [{"choi": [[1]]}]})")), FormatError);
  EXPECT_THROW(instrument_from_json(parse(R"({"d_in": 2, "outcomes": []})")), FormatError);
  EXPECT_THROW(instrument_from_json(parse(R"({"d_in": 2, "d_out": 1, "outcomes": [{"kraus": [[[1,0],[0,0]]]}]})")),
               FormatError);
}

TEST(JsonStrategy, RoundTrip) {
  const auto strat = bell_strategy();
  const auto back = strategy_from_json(parse(dump(to_json(strat))), strat.shape);
  EXPECT_EQ(back.labels, strat.labels);
  EXPECT_TRUE(validate(back).valid());
  for (std::size_t m = 0; m < strat.size(); ++m) EXPECT_TRUE(MatrixNear(back.effects[m], strat.effects[m], 0.0));
  EXPECT_THROW(strategy_from_json(parse(dump(to_json(strat))), {2, 3}), FormatError);
}

TEST(JsonOperation, RoundTripValidates) {
  CounterRng rng(2);
  const auto op = random_allowed_operation({2, 2}, 3, 2, rng);
  const auto back = operation_from_json(parse(dump(to_json(op))));
  EXPECT_TRUE(validate(back, {2, 2}).valid());
  EXPECT_EQ(dump(to_json(back)), dump(to_json(op)));
}

TEST(JsonReport, Fields) {
  ConversionReport report;
  report.verdict = Verdict::impossible;
  report.witness = bell_strategy();
  report.lower = 1.0;
  report.upper = 0.25;
  const Json j = to_json(report);
  EXPECT_EQ(j["verdict"], "impossible");
  EXPECT_TRUE(j["certificate"].is_null());
  EXPECT_EQ(j["bounds"]["upper"].get<double>(), 0.25);
  EXPECT_EQ(j["witness"]["effects"].size(), 4u);
}

TEST(JsonCertificate, Fields) {
  RobustnessCertificate cert;
  cert.value = 1.0;
  cert.kappa = {identity(2)};
  const Json j = to_json(cert);
  EXPECT_EQ(j["R"].get<double>(), 1.0);
  EXPECT_EQ(j["kappa"].size(), 1u);
  EXPECT_TRUE(j["omega"].empty());
}

TEST(JsonFile, MissingFile) { EXPECT_THROW(load_file("/nonexistent/instrument.json"), FormatError); }

}  // namespace
}  // namespace irt::json
