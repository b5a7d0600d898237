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

#include "irt/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdint>
#include <cstdio>

#include "irt/acceptance.hpp"
#include "irt/json_io.hpp"
#include "irt/operations.hpp"
#include "irt/robustness.hpp"
#include "irt/tasks.hpp"

namespace irt::cli {

namespace {

using json::Json;

struct RunConfig {
  std::string command;
  std::vector<std::string> inputs;
  std::string strategy;
  double tol = 1e-8;
  std::size_t samples = 100000;
  std::uint64_t seed = 0;
  std::string output = "text";

  bool as_json() const { return output == "json"; }
  sdp::SolveOptions solver() const {
    sdp::SolveOptions o;
    o.tol = tol;
    return o;
  }
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

const std::string& single_input(const RunConfig& cfg) {
  if (cfg.inputs.size() != 1) throw UsageError(cfg.command + " takes exactly one --input");
  return cfg.inputs.front();
}

Instrument load_instrument(const std::string& path) {
  try {
    return json::instrument_from_json(json::load_file(path));
  } catch (const DimensionError& e) {
    throw json::FormatError(path + ": " + e.what());
  }
}

void emit(const RunConfig& cfg, std::ostream& out, const Json& j, const std::string& text) {
  if (cfg.as_json()) {
    out << json::dump(j) << '\n';
  } else {
    out << text;
  }
}

int cmd_validate(const RunConfig& cfg, std::ostream& out) {
  const Instrument inst = load_instrument(single_input(cfg));
  const ValidationReport report = validate(inst);
  Json issues = Json::array();
  std::string text = report.valid() ? "valid\n" : "";
  for (const auto& i : report.issues) {
    issues.push_back({{"constraint", i.constraint}, {"where", i.where}, {"residual", i.residual}});
    text += i.constraint + (i.where.empty() ? "" : " [" + i.where + "]") + ": residual " + num(i.residual) + "\n";
  }
  emit(cfg, out,
       {{"valid", report.valid()},
        {"d_in", inst.d_in()},
        {"d_out", inst.d_out()},
        {"outcomes", inst.size()},
        {"issues", std::move(issues)}},
       text);
  return report.valid() ? kExitOk : kExitInvalid;
}

int cmd_robustness(const RunConfig& cfg, std::ostream& out) {
  const Instrument inst = load_instrument(single_input(cfg));
  const RobustnessCertificate cert = robustness(inst, cfg.solver());
  emit(cfg, out, json::to_json(cert), "R = " + num(cert.value) + "\ngap = " + num(cert.gap) + "\n");
  return kExitOk;
}

int cmd_fplus(const RunConfig& cfg, std::ostream& out) {
  const Instrument inst = load_instrument(single_input(cfg));
  const EntangledFractionResult f = entangled_fraction(inst, cfg.solver());
  Json recovery = Json::array();
  for (const auto& c : f.recovery_chois) recovery.push_back(json::to_json(c));
  emit(cfg, out, {{"f_plus", f.f_plus}, {"recovery_chois", std::move(recovery)}}, "F+ = " + num(f.f_plus) + "\n");
  return kExitOk;
}

int cmd_favg(const RunConfig& cfg, std::ostream& out) {
  const Instrument inst = load_instrument(single_input(cfg));
  const AverageFidelity formula = average_fidelity_formula(inst, cfg.solver());
  const RobustnessCertificate cert = robustness_dual(inst, cfg.solver());
  const auto recovery = recovery_channels_from_dual(cert.omega, inst.shape());
  const FidelityEstimate mc = average_fidelity_monte_carlo(inst, recovery, cfg.samples, cfg.seed);
  const double sigmas = mc.std_error > 0.0 ? std::abs(mc.mean - formula.value()) / mc.std_error : 0.0;
  const Json j{{"formula", formula.from_robustness},
               {"formula_fplus", formula.from_fplus},
               {"R", formula.robustness},
               {"f_plus", formula.f_plus},
               {"monte_carlo", {{"mean", mc.mean}, {"std_error", mc.std_error}, {"samples", mc.samples}, {"seed", cfg.seed}}},
               {"deviation_std_errors", sigmas}};
  emit(cfg, out, j,
       "F_ave (formula) = " + num(formula.from_robustness) + "\nF_ave (from F+) = " + num(formula.from_fplus) +
           "\nF_ave (Monte Carlo) = " + num(mc.mean) + " +/- " + num(mc.std_error) + " (" +
           std::to_string(mc.samples) + " samples, " + num(sigmas) + " std errors from formula)\n");
  return kExitOk;
}

int cmd_discriminate(const RunConfig& cfg, std::ostream& out) {
  const Instrument inst = load_instrument(single_input(cfg));
  if (cfg.strategy.empty()) {
    const CertificateStrategyCheck check = check_certificate_strategy(inst, cfg.solver());
    emit(cfg, out,
         {{"ratio", check.ratio},
          {"residual", check.residual},
          {"R", check.robustness},
          {"p_succ", check.p_succ},
          {"beta", check.beta},
          {"unambiguity_residual", unambiguity_residual(inst, check.strategy)},
          {"strategy", json::to_json(check.strategy)}},
         "strategy: dual certificate\np_succ = " + num(check.p_succ) + "\nbeta = " + num(check.beta) +
             "\nratio = " + num(check.ratio) + "\n1 + R = " + num(1.0 + check.robustness) + "\n");
    return kExitOk;
  }
  DiscriminationStrategy strat;
  try {
    strat = json::strategy_from_json(json::load_file(cfg.strategy), inst.shape());
  } catch (const json::FormatError& e) {
    throw json::FormatError(cfg.strategy + ": " + e.what());
  }
  if (const auto report = validate(strat); !report) throw InvalidInstrumentError("strategy: " + report.to_string());
  const double ps = p_succ(inst, strat);
  const double beta = beta_noninteractive(strat);
  const double upper = p_max_upper_bound(inst, strat, cfg.solver());
  emit(cfg, out,
       {{"p_succ", ps},
        {"beta", beta},
        {"ratio", beta > 0.0 ? Json(ps / beta) : Json(nullptr)},
        {"unambiguity_residual", unambiguity_residual(inst, strat)},
        {"p_max_upper", upper}},
       "p_succ = " + num(ps) + "\nbeta = " + num(beta) + "\nunambiguity residual = " +
           num(unambiguity_residual(inst, strat)) + "\nP_max upper bound = " + num(upper) + "\n");
  return kExitOk;
}

int cmd_convert(const RunConfig& cfg, std::ostream& out) {
  if (cfg.inputs.size() != 2) throw UsageError("convert takes --input SOURCE --input TARGET");
  const Instrument source = load_instrument(cfg.inputs[0]);
  const Instrument target = load_instrument(cfg.inputs[1]);
  for (const auto* inst : {&source, &target}) {
    if (const auto report = validate(*inst); !report) throw InvalidInstrumentError("convert: " + report.to_string());
  }
  ConvertConfig config;
  config.seed = cfg.seed;
  config.sdp = cfg.solver();
  const ConversionReport report = convert(source, target, config);
  emit(cfg, out, json::to_json(report),
       "verdict: " + to_string(report.verdict) + "\nresidual = " + num(report.residual) + "\nbounds: lower " +
           num(report.lower) + ", upper " + num(report.upper) + "\n");
  return kExitOk;
}

int cmd_selftest(const RunConfig& cfg, std::ostream& out) {
  acceptance::Options options;
  options.seed = cfg.seed;
  options.mc_samples = cfg.samples;
  options.haar_samples = cfg.samples;
  bool all = true;
  Json results = Json::array();
  for (const auto& c : acceptance::criteria()) {
    const auto r = acceptance::run_criterion(c, options);
    all = all && r.pass;
    if (cfg.as_json()) {
      results.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
    } else {
      out << acceptance::format(r) << '\n' << std::flush;
    }
  }
  if (cfg.as_json()) out << json::dump(Json{{"pass", all}, {"criteria", std::move(results)}}) << '\n';
  return all ? kExitOk : kExitInvalid;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Interactive-instrument robustness toolkit", "instrument-rt"};
  app.add_option("--input", cfg.inputs, "Instrument JSON (twice for convert: source, target)");
  app.option_defaults()->always_capture_default();
  app.add_option("--strategy", cfg.strategy, "Strategy JSON for discriminate");
  app.add_option("--tol", cfg.tol, "Solver tolerance")->check(CLI::PositiveNumber);
  app.add_option("--samples", cfg.samples, "Monte-Carlo samples")->check(CLI::PositiveNumber);
  app.add_option("--seed", cfg.seed, "Random seed");
  app.add_option("--output", cfg.output, "Report format")->check(CLI::IsMember({"text", "json"}));
  const std::vector<std::pair<const char*, const char*>> commands{
      {"validate", "Check an instrument's physical constraints"},
      {"robustness", "Robustness with primal and dual certificates"},
      {"fplus", "Maximal entangled fraction and recovery channels"},
      {"favg", "Average fidelity: formula and Monte-Carlo estimate"},
      {"discriminate", "Unambiguous discrimination success and benchmark"},
      {"convert", "Search for a conversion or an impossibility witness"},
      {"selftest", "Run the built-in acceptance suite"},
  };
  for (const auto& [name, help] : commands) {
    app.add_subcommand(name, help)->fallthrough()->callback([&cfg, name = std::string(name)] { cfg.command = name; });
  }
  app.require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (cfg.command == "validate") return cmd_validate(cfg, out);
    if (cfg.command == "robustness") return cmd_robustness(cfg, out);
    if (cfg.command == "fplus") return cmd_fplus(cfg, out);
    if (cfg.command == "favg") return cmd_favg(cfg, out);
    if (cfg.command == "discriminate") return cmd_discriminate(cfg, out);
    if (cfg.command == "convert") return cmd_convert(cfg, out);
    if (cfg.command == "selftest") return cmd_selftest(cfg, out);
    err << app.help();
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  } catch (const sdp::SolverError& e) {
    err << "solver failure: " << e.what() << '\n';
    return kExitSolver;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"instrument-rt"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace irt::cli
