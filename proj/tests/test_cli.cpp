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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "irt/cli.hpp"
#include "irt/json_io.hpp"
#include "irt/robustness.hpp"
#include "irt/tasks.hpp"

namespace irt {
namespace {

namespace fs = std::filesystem;
using json::Json;

std::string fixture(const std::string& name) { return std::string(IRT_FIXTURE_DIR) + "/" + name; }

struct Invocation {
  int code;
  std::string out;
  std::string err;
};

Invocation invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

Json invoke_json(std::vector<std::string> args) {
  args.push_back("--output");
  args.push_back("json");
  const Invocation r = invoke(args);
  EXPECT_EQ(r.code, cli::kExitOk) << r.err;
  return json::parse(r.out);
}

TEST(Cli, RobustnessOfLuedersQubitIsOne) {
  const Json j = invoke_json({"robustness", "--input", fixture("lueders_qubit.json")});
  EXPECT_NEAR(j["R"].get<double>(), 1.0, 1e-6);
  EXPECT_LT(j["gap"].get<double>(), 1e-6);
  EXPECT_EQ(j["omega"].size(), 2u);
  EXPECT_EQ(j["kappa"].size(), 2u);
}

TEST(Cli, TextOutputIsReadable) {
  const Invocation r = invoke({"robustness", "--input", fixture("identity_qubit.json")});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_EQ(r.out.rfind("R = ", 0), 0u);
}

TEST(Cli, FplusOfIdentityIsOne) {
  const Json j = invoke_json({"fplus", "--input", fixture("identity_qubit.json")});
  EXPECT_NEAR(j["f_plus"].get<double>(), 1.0, 1e-6);
  ASSERT_EQ(j["recovery_chois"].size(), 1u);
  const ComplexMatrix choi = json::matrix_from_json(j["recovery_chois"][0]);
  EXPECT_LT(channel_choi_violation(choi, {2, 2}), 1e-6);
}

TEST(Cli, FavgFormulaAndMonteCarloAgree) {
  const Json j = invoke_json({"favg", "--input", fixture("lueders_qubit.json"), "--samples", "20000", "--seed", "3"});
  const double formula = j["formula"].get<double>();
  EXPECT_NEAR(formula, j["formula_fplus"].get<double>(), 1e-6);
  // Lueders qubit: R = 1 gives F+ = 1/2 and F_ave = 2/3.
  EXPECT_NEAR(formula, 2.0 / 3.0, 1e-6);
  const auto& mc = j["monte_carlo"];
  EXPECT_EQ(mc["samples"].get<std::size_t>(), 20000u);
  EXPECT_LE(std::abs(mc["mean"].get<double>() - formula), 3.0 * mc["std_error"].get<double>() + 1e-6);
}

TEST(Cli, ValidateAcceptsPhysicalInstrument) {
  const Json j = invoke_json({"validate", "--input", fixture("pauli_mixture.json")});
  EXPECT_TRUE(j["valid"].get<bool>());
  EXPECT_TRUE(j["issues"].empty());
}

TEST(Cli, ValidateRejectsBrokenInstrumentAndNamesConstraint) {
  const Invocation r = invoke({"validate", "--input", fixture("broken.json"), "--output", "json"});
  EXPECT_EQ(r.code, cli::kExitInvalid);
  const Json j = json::parse(r.out);
  EXPECT_FALSE(j["valid"].get<bool>());
  ASSERT_FALSE(j["issues"].empty());
  EXPECT_FALSE(j["issues"][0]["constraint"].get<std::string>().empty());
  EXPECT_GT(j["issues"][0]["residual"].get<double>(), 0.1);

  const Invocation text = invoke({"validate", "--input", fixture("broken.json")});
  EXPECT_EQ(text.code, cli::kExitInvalid);
  EXPECT_NE(text.out.find(j["issues"][0]["constraint"].get<std::string>()), std::string::npos);
}

TEST(Cli, UnknownCommandIsUsageError) {
  const Invocation r = invoke({"frobnicate"});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_FALSE(r.err.empty());
}

TEST(Cli, MissingCommandIsUsageError) { EXPECT_EQ(invoke({}).code, cli::kExitUsage); }

TEST(Cli, MissingInputIsUsageError) { EXPECT_EQ(invoke({"robustness"}).code, cli::kExitUsage); }

TEST(Cli, BadOptionValuesAreUsageErrors) {
  EXPECT_EQ(invoke({"favg", "--input", fixture("lueders_qubit.json"), "--samples", "0"}).code, cli::kExitUsage);
  EXPECT_EQ(invoke({"robustness", "--input", fixture("lueders_qubit.json"), "--tol", "-1"}).code, cli::kExitUsage);
  EXPECT_EQ(invoke({"robustness", "--input", fixture("lueders_qubit.json"), "--output", "xml"}).code,
            cli::kExitUsage);
}

TEST(Cli, HelpExitsZero) {
  const Invocation r = invoke({"--help"});
  EXPECT_EQ(r.code, cli::kExitOk);
  EXPECT_NE(r.out.find("robustness"), std::string::npos);
  EXPECT_NE(r.out.find("convert"), std::string::npos);
}

TEST(Cli, MissingFileIsInvalidInput) {
  EXPECT_EQ(invoke({"robustness", "--input", fixture("does_not_exist.json")}).code, cli::kExitInvalid);
}

TEST(Cli, MalformedJsonIsInvalidInput) {
  const fs::path path = fs::temp_directory_path() / "irt_cli_malformed.json";
  std::ofstream(path) << "{\"d_in\": 2, \"d_out\": 2, \"outcomes\": [";
  EXPECT_EQ(invoke({"robustness", "--input", path.string()}).code, cli::kExitInvalid);
  fs::remove(path);
}

TEST(Cli, DiscriminateBellStrategyOnPauliMixture) {
  const Json j = invoke_json({"discriminate", "--input", fixture("pauli_mixture.json"), "--strategy",
                              fixture("bell_strategy.json")});
  EXPECT_NEAR(j["p_succ"].get<double>(), 1.0, 1e-9);
  EXPECT_NEAR(j["beta"].get<double>(), 0.25, 1e-9);
  EXPECT_NEAR(j["ratio"].get<double>(), 4.0, 1e-8);
  EXPECT_LT(j["unambiguity_residual"].get<double>(), 1e-10);
  EXPECT_NEAR(j["p_max_upper"].get<double>(), 1.0, 1e-6);
}

TEST(Cli, DiscriminateWithoutStrategyUsesCertificate) {
  const Json j = invoke_json({"discriminate", "--input", fixture("lueders_qubit.json")});
  EXPECT_NEAR(j["ratio"].get<double>(), 1.0 + j["R"].get<double>(), 1e-5);
  const DiscriminationStrategy strat = json::strategy_from_json(j["strategy"], {2, 2});
  EXPECT_TRUE(validate(strat).valid()) << validate(strat).to_string();
}

TEST(Cli, ConvertSelfAndImpossibleDirections) {
  const Json self = invoke_json({"convert", "--input", fixture("lueders_qubit.json"), "--input",
                                 fixture("lueders_qubit.json")});
  EXPECT_EQ(self["verdict"].get<std::string>(), "converted");
  EXPECT_TRUE(self["witness"].is_null());
  ASSERT_FALSE(self["certificate"].is_null());

  const Json up = invoke_json({"convert", "--input", fixture("lueders_qubit.json"), "--input",
                               fixture("pauli_mixture.json")});
  EXPECT_EQ(up["verdict"].get<std::string>(), "impossible");
  EXPECT_GT(up["bounds"]["lower"].get<double>(), up["bounds"]["upper"].get<double>());
  ASSERT_FALSE(up["witness"].is_null());
  const DiscriminationStrategy witness = json::strategy_from_json(up["witness"], {2, 2});
  EXPECT_TRUE(validate(witness).valid());
}

TEST(Cli, ConvertNeedsTwoInputs) {
  EXPECT_EQ(invoke({"convert", "--input", fixture("lueders_qubit.json")}).code, cli::kExitUsage);
}

TEST(Cli, ConvertRejectsInvalidInstrument) {
  EXPECT_EQ(invoke({"convert", "--input", fixture("broken.json"), "--input", fixture("lueders_qubit.json")}).code,
            cli::kExitInvalid);
}

TEST(Cli, OutputIsDeterministic) {
  const std::vector<std::string> args{"favg", "--input", fixture("pauli_mixture.json"), "--samples", "5000",
                                      "--seed", "11", "--output", "json"};
  const Invocation a = invoke(args), b = invoke(args);
  ASSERT_EQ(a.code, cli::kExitOk);
  EXPECT_EQ(a.out, b.out);
}

TEST(Cli, CertificateJsonReloadsAndRevalidates) {
  const Instrument inst = json::instrument_from_json(json::load_file(fixture("lueders_qubit.json")));
  const Json j = invoke_json({"robustness", "--input", fixture("lueders_qubit.json")});
  std::vector<ComplexMatrix> omegas;
  for (const auto& w : j["omega"]) omegas.push_back(json::matrix_from_json(w));
  // A reloaded dual certificate still reproduces R through d_A Σ tr(ω_a J_a) - 1.
  double value = 0.0;
  for (std::size_t a = 0; a < omegas.size(); ++a) value += real_trace(omegas[a] * inst.outcomes()[a].choi);
  EXPECT_NEAR(2.0 * value - 1.0, j["R"].get<double>(), 1e-6);
  const auto recovery = recovery_channels_from_dual(omegas, inst.shape());
  for (const auto& c : recovery) EXPECT_LT(channel_choi_violation(c, {2, 2}), 1e-6);
}

TEST(Cli, InstrumentRoundTripThroughFile) {
  const Instrument inst = json::instrument_from_json(json::load_file(fixture("pauli_mixture.json")));
  const fs::path path = fs::temp_directory_path() / "irt_cli_roundtrip.json";
  std::ofstream(path) << json::dump(json::to_json(inst));
  const Json j = invoke_json({"validate", "--input", path.string()});
  EXPECT_TRUE(j["valid"].get<bool>());
  EXPECT_EQ(j["outcomes"].get<std::size_t>(), 4u);
  fs::remove(path);
}

}  // namespace
}  // namespace irt
