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

#include "irt/robustness.hpp"

#include <cmath>

#include "test_util.hpp"

namespace irt {
namespace {

using testing::MatrixNear;

Instrument lueders_qubit() { return luders_instrument(computational_povm(2)); }

Instrument mix(const Instrument& a, const Instrument& b, double w) {
  std::vector<Outcome> out;
  for (std::size_t k = 0; k < a.size(); ++k) out.push_back({a.outcome(k).label, w * a.choi(k) + (1 - w) * b.choi(k)});
  return Instrument(a.shape(), out);
}

TEST(RobustnessPrimal, IdentityQubitChannelAttainsCeiling) {
  EXPECT_NEAR(robustness_primal(identity_channel(2)).value, 3.0, 1e-6);
}

TEST(RobustnessPrimal, NoninteractiveIsFree) {
  CounterRng rng(50);
  for (int trial = 0; trial < 10; ++trial) {
    const Instrument ni = random_noninteractive(2 + rng.below(2), 2 + rng.below(2), 1 + rng.below(3), rng);
    EXPECT_NEAR(robustness_primal(ni).value, 0.0, 1e-7);
  }
}

TEST(RobustnessPrimal, LuedersQubit) { EXPECT_NEAR(robustness_primal(lueders_qubit()).value, 1.0, 1e-6); }

TEST(RobustnessPrimal, KappaIsFeasible) {
  CounterRng rng(51);
  const Instrument inst = random_instrument(2, 3, 2, rng);
  const auto cert = robustness_primal(inst);
  double total = 0.0;
  for (std::size_t a = 0; a < inst.size(); ++a) {
    const ComplexMatrix slack = tensor(identity(2) / 2.0, cert.kappa[a]) - inst.choi(a);
    EXPECT_GE(min_eigenvalue(slack), -1e-7);
    EXPECT_GE(min_eigenvalue(cert.kappa[a]), -1e-8);
    total += real_trace(cert.kappa[a]);
  }
  EXPECT_NEAR(total - 1.0, cert.value, 1e-8);
}

TEST(RobustnessDual, PauliMixture) { EXPECT_NEAR(robustness_dual(pauli_mixture()).value, 3.0, 1e-6); }

TEST(RobustnessDual, PauliHandFeasiblePoint) {
  // ω_a = d·Bell_a = 4 J_a·(2/4)... written via the Choi operators: Bell_a = 4 J_a.
  const Instrument inst = pauli_mixture();
  double objective = -1.0;
  for (std::size_t a = 0; a < 4; ++a) {
    const ComplexMatrix omega = 2.0 * 4.0 * inst.choi(a);
    EXPECT_TRUE(MatrixNear(partial_trace(omega, {2, 2}, Factor::first), identity(2), 1e-14));
    objective += 2.0 * (omega * inst.choi(a)).trace().real();
  }
  EXPECT_NEAR(objective, 3.0, 1e-14);
}

TEST(RobustnessDual, LuedersHandFeasiblePoint) {
  const Instrument inst = lueders_qubit();
  double objective = -1.0;
  for (std::size_t a = 0; a < 2; ++a) {
    const ComplexMatrix omega = basis_op(4, 3 * a, 3 * a) + basis_op(4, 1 - a, 1 - a);
    EXPECT_TRUE(MatrixNear(partial_trace(omega, {2, 2}, Factor::first), identity(2), 1e-14));
    objective += 2.0 * (omega * inst.choi(a)).trace().real();
  }
  EXPECT_NEAR(objective, 1.0, 1e-14);
  EXPECT_NEAR(robustness_dual(inst).value, 1.0, 1e-6);
}

TEST(RobustnessDual, OmegaIsFeasible) {
  CounterRng rng(52);
  const Instrument inst = random_instrument(3, 2, 3, rng);
  const auto cert = robustness_dual(inst);
  double objective = -1.0;
  for (std::size_t a = 0; a < inst.size(); ++a) {
    EXPECT_TRUE(MatrixNear(partial_trace(cert.omega[a], {3, 2}, Factor::first), identity(2), 1e-7));
    EXPECT_GE(min_eigenvalue(cert.omega[a]), -1e-8);
    objective += 3.0 * (cert.omega[a] * inst.choi(a)).trace().real();
  }
  EXPECT_NEAR(objective, cert.value, 1e-8);
}

TEST(Robustness, StrongDualityOnRandomInstruments) {
  CounterRng rng(53);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t da = 2 + rng.below(2), db = 2 + rng.below(2);
    const Instrument inst = random_instrument(da, db, 1 + rng.below(3), rng);
    const auto cert = robustness(inst);
    EXPECT_LE(cert.gap, 1e-6);
    EXPECT_GE(cert.value, -1e-7);
    EXPECT_LE(cert.value, static_cast<double>(da * da) - 1.0 + 1e-6);
  }
}

TEST(Robustness, RejectsInvalidInstrument) {
  auto outcomes = lueders_qubit().outcomes();
  outcomes[0].choi *= 2.0;
  EXPECT_THROW(robustness_dual(Instrument({2, 2}, outcomes)), InvalidInstrumentError);
}

TEST(Robustness, MixingWithNoninteractiveIsConvex) {
  CounterRng rng(54);
  for (int trial = 0; trial < 20; ++trial) {
    const Instrument e = random_instrument(2, 2, 2, rng);
    const Instrument l = random_noninteractive(2, 2, 2, rng);
    EXPECT_LE(robustness_dual(mix(e, l, 0.5)).value, 0.5 * robustness_dual(e).value + 1e-7);
  }
}

TEST(ReconstructNoise, MixtureIsNoninteractive) {
  CounterRng rng(55);
  const Instrument inst = random_instrument(2, 2, 2, rng);
  const auto cert = robustness_primal(inst);
  const Instrument noise = reconstruct_noise(inst, cert);
  EXPECT_TRUE(validate(noise).valid()) << validate(noise).to_string();
  const double t = cert.value;
  for (std::size_t a = 0; a < inst.size(); ++a) {
    const ComplexMatrix l = (inst.choi(a) + t * noise.choi(a)) / (1.0 + t);
    const ComplexMatrix tau = partial_trace(l, {2, 2}, Factor::first);
    EXPECT_TRUE(MatrixNear(l, tensor(identity(2) / 2.0, tau), 1e-7));
  }
}

TEST(EntangledFraction, IdentityChannel) {
  const auto r = entangled_fraction(identity_channel(2));
  EXPECT_NEAR(r.f_plus, 1.0, 1e-7);
  EXPECT_LE(channel_choi_violation(r.recovery_chois[0], {2, 2}), 1e-7);
}

TEST(EntangledFraction, LuedersQubit) { EXPECT_NEAR(entangled_fraction(lueders_qubit()).f_plus, 0.5, 1e-7); }

TEST(EntangledFraction, NoninteractiveFloor) {
  CounterRng rng(56);
  for (std::size_t da : {2, 3}) {
    const Instrument ni = random_noninteractive(da, 2, 2, rng);
    EXPECT_NEAR(entangled_fraction(ni).f_plus, 1.0 / (da * da), 1e-7);
  }
}

TEST(EntangledFraction, IsotropicChoiUsesIdentityRecovery) {
  // For a depolarizing channel the optimum is the Φ+ overlap of its Choi state.
  const Instrument dep = depolarizing_channel(2, 0.5);
  const double overlap = (max_entangled_state(2) * dep.choi(0)).trace().real();
  EXPECT_NEAR(overlap, 0.625, 1e-15);
  EXPECT_NEAR(entangled_fraction(dep).f_plus, overlap, 1e-7);
  EXPECT_NEAR(robustness_dual(dep).value, 1.5, 1e-6);
}

TEST(RecoveryFromDual, ValidChannelsAttainingOptimum) {
  CounterRng rng(57);
  for (int trial = 0; trial < 5; ++trial) {
    const std::size_t da = 2 + rng.below(2), db = 2 + rng.below(2);
    const Instrument inst = random_instrument(da, db, 2, rng);
    const auto cert = robustness_dual(inst);
    const auto rec = recovery_channels_from_dual(cert.omega, inst.shape());
    for (const auto& c : rec) EXPECT_LE(channel_choi_violation(c, {db, da}), 1e-7);
    EXPECT_NEAR(recovery_fidelity(inst, rec), (1.0 + cert.value) / (da * da), 1e-7);
  }
}

TEST(FplusIdentity, IdentityAndNoninteractive) {
  EXPECT_LE(check_fplus_identity(identity_channel(2)), 1e-6);
  CounterRng rng(58);
  EXPECT_LE(check_fplus_identity(random_noninteractive(2, 2, 3, rng)), 1e-6);
}

TEST(FplusIdentity, RandomInstruments) {
  CounterRng rng(59);
  for (int trial = 0; trial < 10; ++trial) {
    const Instrument inst = random_instrument(1 + rng.below(3), 1 + rng.below(3), 1 + rng.below(3), rng);
    EXPECT_LE(check_fplus_identity(inst), 1e-5);
  }
}

TEST(MinEntropy, MaximallyEntangled) { EXPECT_NEAR(min_entropy(max_entangled_state(2), {2, 2}), -1.0, 1e-6); }

TEST(MinEntropy, MaximallyMixed) { EXPECT_NEAR(min_entropy(identity(4) / 4.0, {2, 2}), 1.0, 1e-6); }

TEST(MinEntropy, ProductPure) { EXPECT_NEAR(min_entropy(basis_op(4, 0, 0), {2, 2}), 0.0, 1e-6); }

TEST(MinEntropy, WitnessGivesMaxRelativeEntropy) {
  CounterRng rng(60);
  for (int trial = 0; trial < 5; ++trial) {
    const ComplexMatrix rho = random_density(6, rng);
    const ComplexMatrix y = min_entropy_witness(rho, {2, 3});
    const double trace_y = real_trace(y);
    const ComplexMatrix sigma = tensor(identity(2), y / trace_y);
    EXPECT_NEAR(max_relative_entropy(rho, sigma), std::log2(trace_y), 1e-6);
  }
}

TEST(MaxRelativeEntropy, KnownValues) {
  EXPECT_NEAR(max_relative_entropy(identity(2) / 2.0, identity(2) / 2.0), 0.0, 1e-14);
  EXPECT_NEAR(max_relative_entropy(basis_op(2, 0, 0), identity(2) / 2.0), 1.0, 1e-14);
  EXPECT_TRUE(std::isinf(max_relative_entropy(basis_op(2, 1, 1), basis_op(2, 0, 0))));
}

TEST(MinEntropyRelation, IdentityChannel) { EXPECT_LE(check_minentropy_relation(identity_channel(2)), 1e-5); }

TEST(MinEntropyRelation, DepolarizingHalf) {
  EXPECT_LE(check_minentropy_relation(depolarizing_channel(2, 0.5)), 1e-5);
  EXPECT_NEAR(min_entropy(depolarizing_channel(2, 0.5).choi(0), {2, 2}), -std::log2(1.25), 1e-6);
}

TEST(MinEntropyRelation, RandomChannels) {
  CounterRng rng(61);
  for (int trial = 0; trial < 8; ++trial) {
    EXPECT_LE(check_minentropy_relation(random_instrument(2 + rng.below(2), 2 + rng.below(2), 1, rng)), 1e-5);
  }
}

TEST(MinEntropyRelation, RejectsMultiOutcome) {
  EXPECT_THROW(check_minentropy_relation(lueders_qubit()), InvalidInstrumentError);
}

TEST(PovmRobustness, QubitBasis) {
  const auto r = povm_robustness(computational_povm(2), true);
  EXPECT_NEAR(r.closed_form, 1.0, 1e-14);
  EXPECT_NEAR(*r.sdp_value, 1.0, 1e-6);
}

TEST(PovmRobustness, Trine) {
  const auto r = povm_robustness(trine_povm(), true);
  EXPECT_NEAR(r.closed_form, 1.0, 1e-14);
  EXPECT_NEAR(*r.sdp_value, 1.0, 1e-6);
}

TEST(PovmRobustness, TrivialPovmIsFree) {
  const auto r = povm_robustness(trivial_povm(2, 2), true);
  EXPECT_NEAR(r.closed_form, 0.0, 1e-14);
  EXPECT_NEAR(*r.sdp_value, 0.0, 1e-7);
}

TEST(PovmRobustness, ClosedFormMatchesSdp) {
  CounterRng rng(62);
  for (int trial = 0; trial < 10; ++trial) {
    const auto r = povm_robustness(random_povm(2 + rng.below(3), 2 + rng.below(4), rng), true);
    EXPECT_NEAR(r.closed_form, *r.sdp_value, 1e-6);
  }
}

}  // namespace
}  // namespace irt
