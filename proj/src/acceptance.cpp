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

#include "irt/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <exception>

#include "irt/instruments.hpp"
#include "irt/operations.hpp"
#include "irt/parallel.hpp"
#include "irt/random.hpp"
#include "irt/robustness.hpp"
#include "irt/tasks.hpp"

namespace irt::acceptance {

namespace {

// Pinned tolerances.
constexpr double kCeilingTol = 1e-6;       // 1: R = 3 for the qubit extremes
constexpr double kFreeTol = 1e-7;          // 1, 9: R of non-interactive instruments
constexpr double kDualityTol = 1e-6;       // 2
constexpr double kFplusIdentityTol = 1e-5;       // 3
constexpr double kMcSigmas = 3.0;          // 4
constexpr double kMcFloor = 1e-6;          // 4: zero-variance cases
constexpr double kLuedersFidelityTol = 1e-6;
constexpr double kMinEntropyTol = 1e-5;    // 5
constexpr double kPhiEntropyTol = 1e-6;
constexpr double kPovmTol = 1e-6;          // 6
constexpr double kCertificateRatioTol = 1e-5;       // 7
constexpr double kRatioSlack = 1e-6;
constexpr double kBellResidualTol = 1e-10;
constexpr double kBetaSdpTol = 1e-7;       // 8
constexpr double kMonotoneSlack = 1e-7;    // 9
constexpr double kHaarSigmas = 5.0;        // 10
constexpr double kWitnessGap = 0.7;        // 11
constexpr double kCoarseResidual = 1e-6;
constexpr double kSelfResidual = 1e-8;

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

CriterionResult make(bool pass, std::string detail) {
  CriterionResult r;
  r.pass = pass;
  r.detail = std::move(detail);
  return r;
}

Instrument lueders_qubit() { return luders_instrument(computational_povm(2)); }

// Random valid instrument with d_A, d_B ∈ {2, 3} and 1–3 outcomes.
Instrument draw_instrument(CounterRng& rng) {
  const std::size_t da = 2 + rng.below(2);
  const std::size_t db = 2 + rng.below(2);
  const std::size_t n = 1 + rng.below(3);
  return random_instrument(da, db, n, rng);
}

std::vector<Instrument> draw_instruments(std::size_t count, CounterRng rng) {
  std::vector<Instrument> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(draw_instrument(rng));
  return out;
}

CriterionResult robustness_extremes(const Options& o) {
  const double r_id = robustness(identity_channel(2)).value;
  const double r_pauli = robustness(pauli_mixture()).value;
  CounterRng rng = CounterRng(o.seed).split(1);
  std::vector<Instrument> ni;
  for (int i = 0; i < 20; ++i) {
    const std::size_t da = 2 + rng.below(2);
    const std::size_t db = 2 + rng.below(2);
    const std::size_t n = 1 + rng.below(3);
    ni.push_back(random_noninteractive(da, db, n, rng));
  }
  std::vector<double> r(ni.size());
  parallel_for(ni.size(), [&](std::size_t i) { r[i] = std::abs(robustness(ni[i]).value); });
  const double worst = *std::max_element(r.begin(), r.end());
  const bool pass = std::abs(r_id - 3.0) <= kCeilingTol && std::abs(r_pauli - 3.0) <= kCeilingTol && worst <= kFreeTol;
  return make(pass, fmt("R(id_2)=%.9f R(pauli)=%.9f max|R_NI|=%.2e over 20", r_id, r_pauli, worst));
}

CriterionResult strong_duality(const Options& o) {
  const auto insts = draw_instruments(50, CounterRng(o.seed).split(2));
  std::vector<double> gaps(insts.size());
  parallel_for(insts.size(), [&](std::size_t i) { gaps[i] = robustness(insts[i]).gap; });
  const double worst = *std::max_element(gaps.begin(), gaps.end());
  return make(worst <= kDualityTol, fmt("max |primal-dual|=%.2e over 50 (tol %.0e)", worst, kDualityTol));
}

CriterionResult fplus_identity(const Options& o) {
  const auto insts = draw_instruments(50, CounterRng(o.seed).split(2));
  std::vector<double> err(insts.size());
  parallel_for(insts.size(), [&](std::size_t i) { err[i] = check_fplus_identity(insts[i]); });
  const double worst = *std::max_element(err.begin(), err.end());
  return make(worst <= kFplusIdentityTol, fmt("max |(1+R)-d^2 F+|=%.2e over 50 (tol %.0e)", worst, kFplusIdentityTol));
}

CriterionResult average_fidelity(const Options& o) {
  std::vector<Instrument> insts{identity_channel(2), lueders_qubit(), pauli_mixture()};
  CounterRng rng = CounterRng(o.seed).split(4);
  for (int i = 0; i < 10; ++i) insts.push_back(draw_instrument(rng));
  double worst_sigma = 0.0;
  int exact = 0;
  bool pass = true;
  for (std::size_t i = 0; i < insts.size(); ++i) {
    const Instrument& inst = insts[i];
    const auto cert = robustness_dual(inst);
    const double d = static_cast<double>(inst.d_in());
    const double formula = (1.0 + cert.value / (d + 1.0)) / d;
    const auto recovery = recovery_channels_from_dual(cert.omega, inst.shape());
    const auto est = average_fidelity_monte_carlo(inst, recovery, o.mc_samples, o.seed + 100 + i);
    const double diff = std::abs(est.mean - formula);
    if (diff > kMcSigmas * est.std_error + kMcFloor) pass = false;
    // Channels recovered perfectly have no sampling variance at all.
    if (est.std_error > 1e-9) {
      worst_sigma = std::max(worst_sigma, diff / est.std_error);
    } else {
      ++exact;
    }
  }
  const double lueders = average_fidelity_formula(lueders_qubit()).value();
  pass = pass && std::abs(lueders - 2.0 / 3.0) <= kLuedersFidelityTol;
  return make(pass, fmt("F_ave(lueders)=%.9f; worst MC deviation %.2f sigma over 13 instruments (%d zero-variance), "
                        "%zu samples",
                        lueders, worst_sigma, exact, o.mc_samples));
}

CriterionResult min_entropy_relation(const Options& o) {
  CounterRng rng = CounterRng(o.seed).split(5);
  std::vector<Instrument> channels;
  for (int i = 0; i < 20; ++i) {
    const std::size_t da = 2 + rng.below(2);
    const std::size_t db = 2 + rng.below(2);
    channels.push_back(random_instrument(da, db, 1, rng));
  }
  std::vector<double> err(channels.size());
  parallel_for(channels.size(), [&](std::size_t i) { err[i] = check_minentropy_relation(channels[i]); });
  const double worst = *std::max_element(err.begin(), err.end());
  const double h_phi = min_entropy(max_entangled_state(2), {2, 2});
  const bool pass = worst <= kMinEntropyTol && std::abs(h_phi + 1.0) <= kPhiEntropyTol;
  return make(pass, fmt("max |log2(d F+)+H_min|=%.2e over 20; H_min(Phi+)=%.9f", worst, h_phi));
}

CriterionResult povm_reduction(const Options& o) {
  CounterRng rng = CounterRng(o.seed).split(6);
  std::vector<Povm> povms;
  for (int i = 0; i < 30; ++i) {
    const std::size_t d = 2 + rng.below(3);
    const std::size_t n = 2 + rng.below(4);
    povms.push_back(random_povm(d, n, rng));
  }
  std::vector<double> err(povms.size());
  parallel_for(povms.size(), [&](std::size_t i) {
    const auto r = povm_robustness(povms[i], true);
    err[i] = std::abs(r.closed_form - *r.sdp_value);
  });
  const double worst = *std::max_element(err.begin(), err.end());
  const auto basis = povm_robustness(computational_povm(2), true);
  const auto trine = povm_robustness(trine_povm(), true);
  const bool pass = worst <= kPovmTol && std::abs(basis.closed_form - 1.0) <= kPovmTol &&
                    std::abs(*basis.sdp_value - 1.0) <= kPovmTol && std::abs(trine.closed_form - 1.0) <= kPovmTol &&
                    std::abs(*trine.sdp_value - 1.0) <= kPovmTol;
  return make(pass, fmt("max |closed-SDP|=%.2e over 30; R(basis)=%.9f R(trine)=%.9f", worst, *basis.sdp_value,
                        *trine.sdp_value));
}

CriterionResult discrimination(const Options& o) {
  const auto lueders = check_certificate_strategy(lueders_qubit());
  const auto pauli = check_certificate_strategy(pauli_mixture());
  CounterRng rng = CounterRng(o.seed).split(7);
  std::vector<Instrument> insts;
  std::vector<DiscriminationStrategy> strats;
  for (int i = 0; i < 50; ++i) {
    insts.push_back(draw_instrument(rng));
    strats.push_back(random_strategy(insts.back().shape(), insts.back().size(), rng));
  }
  std::vector<double> excess(insts.size());
  parallel_for(insts.size(), [&](std::size_t i) {
    const double bound = 1.0 + robustness_dual(insts[i]).value;
    excess[i] = p_succ(insts[i], strats[i]) / beta_noninteractive(strats[i]) - bound;
  });
  const double worst = *std::max_element(excess.begin(), excess.end());
  const double bell = unambiguity_residual(pauli_mixture(), bell_strategy());
  const bool pass = std::abs(lueders.ratio - 2.0) <= kCertificateRatioTol && lueders.residual <= kCertificateRatioTol &&
                    std::abs(pauli.ratio - 4.0) <= kCertificateRatioTol && pauli.residual <= kCertificateRatioTol &&
                    worst <= kRatioSlack && bell <= kBellResidualTol;
  return make(pass, fmt("ratio(lueders)=%.7f ratio(pauli)=%.7f; max ratio-(1+R)=%.2e over 50; Bell residual %.1e",
                        lueders.ratio, pauli.ratio, worst, bell));
}

CriterionResult marginal_bound(const Options& o) {
  CounterRng rng = CounterRng(o.seed).split(8);
  struct Tuple {
    std::vector<ComplexMatrix> omegas;
    BipartiteShape shape;
  };
  std::vector<Tuple> tuples;
  for (int i = 0; i < 100; ++i) {
    const std::size_t da = 2 + rng.below(2);
    const std::size_t db = 1 + rng.below(3);
    const BipartiteShape shape{da, db};
    const std::size_t n = 1 + rng.below(3);
    Tuple t{{}, shape};
    double worst = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
      t.omegas.push_back(random_psd(da * db, rng));
      worst = std::max(worst, max_eigenvalue(partial_trace(t.omegas.back(), shape, Factor::first)));
    }
    const double target = (0.5 + rng.uniform()) * static_cast<double>(da);
    for (auto& w : t.omegas) w *= target / worst;
    tuples.push_back(std::move(t));
  }
  std::vector<int> agree(tuples.size()), holds(tuples.size());
  parallel_for(tuples.size(), [&](std::size_t i) {
    const auto [marginal, bounded] = check_marginal_bound(tuples[i].omegas, tuples[i].shape);
    agree[i] = marginal == bounded;
    holds[i] = marginal;
  });
  const int agreements = std::count(agree.begin(), agree.end(), 1);
  const int inside = std::count(holds.begin(), holds.end(), 1);

  std::vector<DiscriminationStrategy> strats;
  for (int i = 0; i < 20; ++i) {
    const std::size_t da = 2 + rng.below(2);
    const std::size_t db = 1 + rng.below(3);
    strats.push_back(random_strategy({da, db}, 1 + rng.below(3), rng));
  }
  std::vector<double> err(strats.size());
  parallel_for(strats.size(), [&](std::size_t i) {
    err[i] = std::abs(beta_noninteractive(strats[i]) - beta_noninteractive_sdp(strats[i].effects, strats[i].shape));
  });
  const double worst = *std::max_element(err.begin(), err.end());
  const bool pass = agreements == 100 && worst <= kBetaSdpTol;
  return make(pass, fmt("predicates agree on %d/100 (%d inside); max |beta closed-SDP|=%.2e over 20", agreements,
                        inside, worst));
}

CriterionResult monotonicity(const Options& o) {
  CounterRng rng = CounterRng(o.seed).split(9);
  std::vector<std::pair<AllowedOperation, Instrument>> pairs;
  for (int i = 0; i < 100; ++i) {
    Instrument inst = draw_instrument(rng);
    const std::size_t out = 1 + rng.below(3);
    const std::size_t branches = 1 + rng.below(2);
    pairs.emplace_back(random_allowed_operation(inst.shape(), inst.size(), out, rng, branches), std::move(inst));
  }
  std::vector<std::pair<AllowedOperation, Instrument>> free_pairs;
  for (int i = 0; i < 50; ++i) {
    const std::size_t da = 2 + rng.below(2);
    const std::size_t db = 2 + rng.below(2);
    const std::size_t n = 1 + rng.below(3);
    Instrument inst = random_noninteractive(da, db, n, rng);
    const std::size_t out = 1 + rng.below(3);
    free_pairs.emplace_back(random_allowed_operation(inst.shape(), n, out, rng), std::move(inst));
  }
  std::vector<double> increase(pairs.size()), free_r(free_pairs.size());
  parallel_for(pairs.size(), [&](std::size_t i) {
    const auto [before, after] = monotonicity_check(pairs[i].first, pairs[i].second);
    increase[i] = after - before;
  });
  parallel_for(free_pairs.size(), [&](std::size_t i) {
    free_r[i] = robustness_dual(apply_operation(free_pairs[i].first, free_pairs[i].second)).value;
  });
  const double worst = *std::max_element(increase.begin(), increase.end());
  const double worst_free = *std::max_element(free_r.begin(), free_r.end());
  const bool pass = worst <= kMonotoneSlack && worst_free <= kFreeTol;
  return make(pass, fmt("max R(Pi(E))-R(E)=%.2e over 100; max R on NI images=%.2e over 50", worst, worst_free));
}

CriterionResult haar_moment(const Options& o) {
  bool pass = true;
  std::string detail;
  for (std::size_t d : {2u, 3u}) {
    CounterRng rng = CounterRng(o.seed).split(10 + d);
    ComplexMatrix sum = zeros(d * d, d * d);
    for (std::size_t i = 0; i < o.haar_samples; ++i) {
      const ComplexMatrix psi = haar_random_pure(d, rng);
      sum += tensor(psi, psi);
    }
    const double dd = static_cast<double>(d);
    const ComplexMatrix expected = 2.0 * sym_projector(d) / (dd * (dd + 1.0));
    const double err = operator_norm(hermitian_part(sum / static_cast<double>(o.haar_samples) - expected));
    const double bound = kHaarSigmas / std::sqrt(static_cast<double>(o.haar_samples));
    pass = pass && err <= bound;
    detail += fmt("%sd=%zu: %.2e <= %.2e", detail.empty() ? "" : "; ", d, err, bound);
  }
  return make(pass, detail);
}

CriterionResult conversion(const Options& o) {
  ConvertConfig config;
  config.seed = o.seed;
  CounterRng rng = CounterRng(o.seed).split(11);
  const Instrument ni = random_noninteractive(2, 2, 4, rng);
  const auto impossible = convert(ni, pauli_mixture(), config);
  const Instrument halves = coarse_grain(pauli_mixture(), {{0, 1}, {2, 3}});
  const auto coarse = convert(pauli_mixture(), halves, config);
  const auto self = convert(pauli_mixture(), pauli_mixture(), config);
  const double gap = impossible.lower - impossible.upper;
  const bool pass = impossible.verdict == Verdict::impossible && gap >= kWitnessGap &&
                    coarse.verdict == Verdict::converted && coarse.residual <= kCoarseResidual &&
                    self.verdict == Verdict::converted && self.residual <= kSelfResidual;
  return make(pass, fmt("NI->pauli %s (lower %.6f upper %.6f); pauli->coarse %s residual %.1e; self %s residual %.1e",
                        to_string(impossible.verdict).c_str(), impossible.lower, impossible.upper,
                        to_string(coarse.verdict).c_str(), coarse.residual, to_string(self.verdict).c_str(),
                        self.residual));
}

}  // namespace

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> list{
      {1, "robustness extremes", robustness_extremes},
      {2, "strong duality", strong_duality},
      {3, "entangled fraction identity", fplus_identity},
      {4, "average fidelity", average_fidelity},
      {5, "min-entropy relation", min_entropy_relation},
      {6, "POVM reduction", povm_reduction},
      {7, "unambiguous discrimination", discrimination},
      {8, "marginal bound", marginal_bound},
      {9, "monotonicity", monotonicity},
      {10, "Haar second moment", haar_moment},
      {11, "conversion", conversion},
  };
  return list;
}

CriterionResult run_criterion(const Criterion& c, const Options& options) {
  const auto start = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    r = c.run(options);
  } catch (const std::exception& e) {
    r = make(false, std::string("exception: ") + e.what());
  }
  r.id = c.id;
  r.name = c.name;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::vector<CriterionResult> run_all(const Options& options) {
  std::vector<CriterionResult> out;
  for (const auto& c : criteria()) out.push_back(run_criterion(c, options));
  return out;
}

std::string format(const CriterionResult& r) {
  return fmt("%s %2d  %-28s %s (%.1fs)", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(), r.detail.c_str(), r.seconds);
}

}  // namespace irt::acceptance
