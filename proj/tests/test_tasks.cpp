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

#include "irt/tasks.hpp"

#include <cmath>
#include <cstdlib>

#include "test_util.hpp"

namespace irt {
namespace {

using testing::MatrixNear;

Instrument lueders_qubit() { return luders_instrument(computational_povm(2)); }

// Exact Haar average via ∫ψ⊗ψ = 2Π_sym/(d(d+1)) and ⟨ψ|C(ψ)|ψ⟩ = d tr[(ψ^t ⊗ ψ) C].
double haar_fidelity_exact(const Instrument& inst, const std::vector<ComplexMatrix>& recovery) {
  const std::size_t d = inst.d_in();
  const double dd = static_cast<double>(d);
  ComplexMatrix c = zeros(d * d, d * d);
  for (std::size_t a = 0; a < inst.size(); ++a) {
    c += compose_choi(inst.choi(a), inst.shape(), recovery[a], {inst.d_out(), d});
  }
  const ComplexMatrix moment = 2.0 * sym_projector(d) / (dd * (dd + 1.0));
  return dd * (partial_transpose(moment, {d, d}, Factor::first) * c).trace().real();
}

std::vector<ComplexMatrix> random_recovery(const Instrument& inst, CounterRng& rng) {
  std::vector<ComplexMatrix> out;
  for (std::size_t a = 0; a < inst.size(); ++a) out.push_back(random_channel_choi(inst.d_out(), inst.d_in(), rng));
  return out;
}

TEST(Strategy, BellIsValidAndExhaustive) {
  const auto s = bell_strategy();
  EXPECT_TRUE(validate(s).valid()) << validate(s).to_string();
  EXPECT_EQ(s.size(), 4u);
  EXPECT_TRUE(MatrixNear(s.inconclusive, zeros(4, 4), 0.0));
  for (const auto& q : s.effects) EXPECT_TRUE(MatrixNear(q * q, q, 1e-12));
}

TEST(Strategy, MakeStrategyCompletesWithInconclusive) {
  const auto s = make_strategy({2, 2}, {basis_op(4, 0, 0), basis_op(4, 3, 3)});
  EXPECT_TRUE(validate(s).valid());
  EXPECT_TRUE(MatrixNear(s.inconclusive, testing::diag({0, 1, 1, 0}), 1e-15));
  EXPECT_EQ(s.labels, (std::vector<std::string>{"0", "1"}));
}

TEST(Strategy, RandomStrategiesAreValid) {
  CounterRng rng(11);
  for (int i = 0; i < 20; ++i) {
    const BipartiteShape shape{2 + rng.below(2), 1 + rng.below(3)};
    const std::size_t outcomes = 1 + rng.below(4);
    const auto s = random_strategy(shape, outcomes, rng);
    EXPECT_TRUE(validate(s).valid()) << validate(s).to_string();
    EXPECT_EQ(s.size(), outcomes);
  }
}

TEST(Strategy, ValidationNamesViolations) {
  auto s = make_strategy({2, 2}, {2.0 * basis_op(4, 0, 0)});
  const auto report = validate(s);
  ASSERT_FALSE(report.valid());
  EXPECT_EQ(report.issues.front().where, "inconclusive");
  EXPECT_EQ(report.issues.front().constraint, "not PSD");

  s = bell_strategy();
  s.inconclusive = basis_op(4, 1, 1);
  ASSERT_FALSE(validate(s).valid());
  EXPECT_EQ(validate(s).issues.back().constraint, "effects do not sum to identity");
}

TEST(PSucc, PauliWithBellIsOne) { EXPECT_NEAR(p_succ(pauli_mixture(), bell_strategy()), 1.0, 1e-12); }

TEST(PSucc, AllInconclusiveIsZero) {
  const auto s = make_strategy({2, 2}, std::vector<ComplexMatrix>(4, zeros(4, 4)));
  EXPECT_NEAR(p_succ(pauli_mixture(), s), 0.0, 1e-15);
  EXPECT_NEAR(unambiguity_residual(pauli_mixture(), s), 0.0, 1e-15);
}

TEST(PSucc, NoninteractiveWithBellIsQuarter) {
  CounterRng rng(3);
  for (int i = 0; i < 10; ++i) EXPECT_NEAR(p_succ(random_noninteractive(2, 2, 4, rng), bell_strategy()), 0.25, 1e-12);
}

TEST(PSucc, RejectsMismatchedOutcomes) {
  EXPECT_THROW(p_succ(lueders_qubit(), bell_strategy()), DimensionError);
}

TEST(Unambiguity, BellAgainstPauliIsExact) {
  EXPECT_LE(unambiguity_residual(pauli_mixture(), bell_strategy()), 1e-12);
}

TEST(Unambiguity, UniformGuessIsAmbiguous) {
  const auto s = make_strategy({2, 2}, std::vector<ComplexMatrix>(4, identity(4) / 4.0));
  EXPECT_GT(unambiguity_residual(pauli_mixture(), s), 0.01);
}

TEST(Beta, BellStrategy) { EXPECT_NEAR(beta_noninteractive(bell_strategy()), 0.25, 1e-12); }

TEST(Beta, AlwaysGuessFirst) {
  const auto s = make_strategy({3, 2}, {identity(6), zeros(6, 6)});
  EXPECT_NEAR(beta_noninteractive(s), 1.0, 1e-12);
}

TEST(Beta, NoSampledNoninteractiveBeatsClosedForm) {
  CounterRng rng(21);
  for (int i = 0; i < 10; ++i) {
    const BipartiteShape shape{2, 2};
    const std::size_t n = 2 + rng.below(2);
    const auto s = random_strategy(shape, n, rng);
    const double beta = beta_noninteractive(s);
    for (int k = 0; k < 200; ++k) EXPECT_LE(p_succ(random_noninteractive(2, 2, n, rng), s), beta + 1e-6);
  }
}

TEST(Beta, BestResponseAttainsClosedForm) {
  CounterRng rng(22);
  for (int i = 0; i < 10; ++i) {
    const auto s = random_strategy({3, 2}, 3, rng);
    const Instrument ni = from_noninteractive(best_noninteractive_response(s), 3);
    EXPECT_NEAR(p_succ(ni, s), beta_noninteractive(s), 1e-12);
  }
}

TEST(Beta, TiesPickFirstOutcome) {
  const auto model = best_noninteractive_response(bell_strategy());
  EXPECT_EQ(model.r, (std::vector<double>{1, 0, 0, 0}));
}

TEST(Beta, ClosedFormMatchesSdp) {
  CounterRng rng(23);
  for (int i = 0; i < 10; ++i) {
    const std::size_t da = 2 + rng.below(2);
    const std::size_t db = 1 + rng.below(3);
    const auto s = random_strategy({da, db}, 1 + rng.below(3), rng);
    EXPECT_NEAR(beta_noninteractive_sdp(s.effects, s.shape), beta_noninteractive(s), 1e-7);
  }
}

TEST(CertificateStrategy, PauliMixture) {
  const auto check = check_certificate_strategy(pauli_mixture());
  EXPECT_NEAR(check.ratio, 4.0, 1e-5);
  EXPECT_LE(check.residual, 1e-5);
  EXPECT_TRUE(validate(check.strategy).valid()) << validate(check.strategy).to_string();
}

TEST(CertificateStrategy, LuedersQubit) {
  const auto check = check_certificate_strategy(lueders_qubit());
  EXPECT_NEAR(check.ratio, 2.0, 1e-5);
  EXPECT_LE(check.residual, 1e-5);
}

TEST(CertificateStrategy, NoninteractiveRatioIsOne) {
  CounterRng rng(5);
  const auto check = check_certificate_strategy(random_noninteractive(2, 3, 3, rng));
  EXPECT_NEAR(check.ratio, 1.0, 1e-5);
}

TEST(CertificateStrategy, RandomInstrumentsAttainOnePlusR) {
  CounterRng rng(6);
  for (int i = 0; i < 6; ++i) {
    const std::size_t da = 2 + rng.below(2);
    const std::size_t db = 2 + rng.below(2);
    const std::size_t n = 1 + rng.below(3);
    const auto check = check_certificate_strategy(random_instrument(da, db, n, rng));
    EXPECT_LE(check.residual, 1e-5) << "ratio " << check.ratio << " R " << check.robustness;
  }
}

TEST(CertificateStrategy, RandomStrategiesNeverExceedOnePlusR) {
  CounterRng rng(7);
  const Instrument inst = random_instrument(2, 2, 3, rng);
  const double bound = 1.0 + robustness(inst).value;
  for (int i = 0; i < 50; ++i) {
    const auto s = random_strategy(inst.shape(), inst.size(), rng);
    EXPECT_LE(p_succ(inst, s) / beta_noninteractive(s), bound + 1e-6);
  }
}

TEST(CertificateStrategy, DegenerateDualIsReported) {
  EXPECT_THROW(strategy_from_dual({zeros(4, 4)}, {2, 2}), DegenerateCertificateError);
}

TEST(MarginalBound, ScaledBellProjectorsAreOnTheBoundary) {
  std::vector<ComplexMatrix> omegas;
  for (const auto& q : bell_strategy().effects) omegas.push_back(2.0 * q);
  const auto [marginal, bounded] = check_marginal_bound(omegas, {2, 2});
  EXPECT_TRUE(marginal);
  EXPECT_TRUE(bounded);
}

TEST(MarginalBound, LargeIdentityViolatesBoth) {
  const auto [marginal, bounded] = check_marginal_bound({4.0 * identity(4)}, {2, 2});
  EXPECT_FALSE(marginal);
  EXPECT_FALSE(bounded);
}

TEST(MarginalBound, PredicatesAgreeOnRandomTuples) {
  CounterRng rng(8);
  int true_count = 0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t da = 2 + rng.below(2);
    const std::size_t db = 1 + rng.below(3);
    const BipartiteShape shape{da, db};
    const std::size_t n = 1 + rng.below(3);
    std::vector<ComplexMatrix> omegas;
    double worst = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
      omegas.push_back(random_psd(da * db, rng));
      worst = std::max(worst, max_eigenvalue(partial_trace(omegas.back(), shape, Factor::first)));
    }
    // Land the largest marginal at a random multiple of d_A in [0.5, 1.5].
    const double target = (0.5 + rng.uniform()) * static_cast<double>(da);
    for (auto& w : omegas) w *= target / worst;
    const auto [marginal, bounded] = check_marginal_bound(omegas, shape);
    EXPECT_EQ(marginal, bounded) << "case " << i;
    true_count += marginal ? 1 : 0;
  }
  EXPECT_GT(true_count, 20);
  EXPECT_LT(true_count, 80);
}

TEST(AverageFidelity, IdentityChannel) {
  const auto f = average_fidelity_formula(identity_channel(2));
  EXPECT_NEAR(f.value(), 1.0, 1e-7);
  EXPECT_NEAR(f.from_fplus, 1.0, 1e-7);
}

TEST(AverageFidelity, LuedersQubit) {
  const auto f = average_fidelity_formula(lueders_qubit());
  EXPECT_NEAR(f.value(), 2.0 / 3.0, 1e-6);
  EXPECT_NEAR(f.from_fplus, 2.0 / 3.0, 1e-6);
}

TEST(AverageFidelity, NoninteractiveIsTrivial) {
  CounterRng rng(9);
  EXPECT_NEAR(average_fidelity_formula(random_noninteractive(2, 3, 2, rng)).value(), 0.5, 1e-7);
}

TEST(AverageFidelity, BothFormsAgreeOnRandomInstruments) {
  CounterRng rng(10);
  for (int i = 0; i < 6; ++i) {
    const std::size_t da = 2 + rng.below(2);
    const std::size_t db = 2 + rng.below(2);
    const auto f = average_fidelity_formula(random_instrument(da, db, 1 + rng.below(3), rng));
    EXPECT_NEAR(f.from_robustness, f.from_fplus, 1e-5);
  }
}

TEST(MonteCarlo, IdentityWithIdentityRecovery) {
  const auto est = average_fidelity_monte_carlo(identity_channel(2), {identity_channel_choi(2)}, 1000, 1);
  EXPECT_NEAR(est.mean, 1.0, 1e-12);
  EXPECT_LE(est.std_error, 1e-12);
  EXPECT_EQ(est.samples, 1000u);
}

TEST(MonteCarlo, LuedersWithDualRecoveryMatchesFormula) {
  const Instrument inst = lueders_qubit();
  const auto recovery = recovery_channels_from_dual(robustness_dual(inst).omega, inst.shape());
  const auto est = average_fidelity_monte_carlo(inst, recovery, 100000, 7);
  EXPECT_LE(std::abs(est.mean - 2.0 / 3.0), 3.0 * est.std_error);
}

TEST(MonteCarlo, NoninteractiveStaysBelowTrivialFidelity) {
  CounterRng rng(12);
  const Instrument inst = random_noninteractive(2, 2, 3, rng);
  const auto est = average_fidelity_monte_carlo(inst, random_recovery(inst, rng), 20000, 3);
  EXPECT_LE(est.mean, 0.5 + 3.0 * est.std_error);
}

TEST(MonteCarlo, MatchesExactHaarIntegral) {
  CounterRng rng(13);
  for (int i = 0; i < 4; ++i) {
    const std::size_t da = 2 + rng.below(2);
    const Instrument inst = random_instrument(da, 2, 2, rng);
    const auto recovery = random_recovery(inst, rng);
    const auto est = average_fidelity_monte_carlo(inst, recovery, 40000, 100 + i);
    EXPECT_LE(std::abs(est.mean - haar_fidelity_exact(inst, recovery)), 4.0 * est.std_error);
  }
}

TEST(MonteCarlo, DeterministicAcrossWorkerCounts) {
  CounterRng rng(14);
  const Instrument inst = random_instrument(3, 2, 2, rng);
  const auto recovery = random_recovery(inst, rng);
  ::setenv("INSTRUMENT_RT_THREADS", "1", 1);
  const auto serial = average_fidelity_monte_carlo(inst, recovery, 20000, 5);
  ::setenv("INSTRUMENT_RT_THREADS", "4", 1);
  const auto threaded = average_fidelity_monte_carlo(inst, recovery, 20000, 5);
  ::unsetenv("INSTRUMENT_RT_THREADS");
  EXPECT_EQ(serial.mean, threaded.mean);
  EXPECT_EQ(serial.std_error, threaded.std_error);
}

TEST(MonteCarlo, StandardErrorScalesAsInverseRoot) {
  CounterRng rng(15);
  const Instrument inst = random_instrument(2, 2, 2, rng);
  const auto recovery = random_recovery(inst, rng);
  const auto small = average_fidelity_monte_carlo(inst, recovery, 10000, 1);
  const auto large = average_fidelity_monte_carlo(inst, recovery, 40000, 2);
  EXPECT_NEAR(large.std_error / small.std_error, 0.5, 0.1);
}

TEST(MonteCarlo, RejectsBadArguments) {
  EXPECT_THROW(average_fidelity_monte_carlo(identity_channel(2), {identity_channel_choi(2)}, 0, 1),
               std::invalid_argument);
  EXPECT_THROW(average_fidelity_monte_carlo(identity_channel(2), {}, 10, 1), DimensionError);
}

}  // namespace
}  // namespace irt
