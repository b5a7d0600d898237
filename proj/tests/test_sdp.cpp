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

#include "irt/sdp.hpp"

#include "irt/random.hpp"
#include "test_util.hpp"

namespace irt::sdp {
namespace {

using irt::testing::MatrixNear;

TEST(RealEmbedding, IdentityMapsToIdentity) {
  EXPECT_TRUE(real_embedding(identity(2)).isApprox(RealMatrix::Identity(4, 4)));
}

TEST(RealEmbedding, ImaginaryOffDiagonalSpectrum) {
  ComplexMatrix h(2, 2);
  h << 0, Complex(0, 1), Complex(0, -1), 0;
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(real_embedding(h));
  const RealVector ev = es.eigenvalues();
  EXPECT_NEAR(ev(0), -1.0, 1e-14);
  EXPECT_NEAR(ev(1), -1.0, 1e-14);
  EXPECT_NEAR(ev(2), 1.0, 1e-14);
  EXPECT_NEAR(ev(3), 1.0, 1e-14);
}

TEST(RealEmbedding, SpectrumDoubledOnRandomHermitian) {
  CounterRng rng(40);
  for (int trial = 0; trial < 50; ++trial) {
    const ComplexMatrix h = random_hermitian(1 + rng.below(4), rng);
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(real_embedding(h));
    EXPECT_NEAR(es.eigenvalues()(0), min_eigenvalue(h), 1e-12);
  }
}

TEST(RealEmbedding, LinearAndPsdPreservingBothWays) {
  CounterRng rng(41);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 1 + rng.below(4);
    const ComplexMatrix a = random_hermitian(d, rng), b = random_hermitian(d, rng);
    const double k = rng.normal();
    EXPECT_LE((real_embedding(a + k * b) - real_embedding(a) - k * real_embedding(b)).cwiseAbs().maxCoeff(), 1e-12);
    const bool psd = min_eigenvalue(a) >= 0.0;
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(real_embedding(a));
    EXPECT_EQ(psd, es.eigenvalues()(0) >= -1e-13 && min_eigenvalue(a) >= -1e-13);
  }
}

TEST(RealEmbedding, RejectsNonHermitian) {
  ComplexMatrix m = identity(2);
  m(0, 1) = 1.0;
  EXPECT_THROW(real_embedding(m), NotHermitianError);
}

TEST(Svec, InnerProductMatchesTrace) {
  CounterRng rng(42);
  const ComplexMatrix a = random_hermitian(4, rng), b = random_hermitian(4, rng);
  const RealMatrix ra = a.real(), rb = b.real();
  EXPECT_NEAR(svec(ra).dot(svec(rb)), (ra * rb).trace(), 1e-12);
  EXPECT_TRUE(smat(svec(ra), 4).isApprox(ra));
}

TEST(HermitianCoordinates, RoundTrip) {
  CounterRng rng(43);
  const ComplexMatrix h = random_hermitian(3, rng);
  EXPECT_TRUE(MatrixNear(hermitian_from_coordinates(hermitian_coordinates(h), 3), h, 1e-15));
}

TEST(Solve, TraceAboveIdentity) {
  Problem p;
  const VarId x = p.add_variable(2);
  p.add_psd(HermitianExpr::of(x, 2) - identity(2));
  p.set_objective(Sense::minimize, ScalarExpr::trace(x, identity(2)));
  const Solution s = p.solve();
  ASSERT_TRUE(s.optimal()) << to_string(s.status);
  EXPECT_NEAR(s.value, 2.0, 1e-8);
  EXPECT_TRUE(MatrixNear(s[x], identity(2), 1e-7));
  EXPECT_LE(s.gap, 1e-8 * 2.0);
}

TEST(Solve, TopEigenvalueOverDensityMatrices) {
  CounterRng rng(44);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t d = 2 + rng.below(3);
    const ComplexMatrix h = random_hermitian(d, rng);
    Problem p;
    const VarId rho = p.add_psd_variable(d);
    p.add_equality(ScalarExpr::trace(rho, identity(d)), 1.0);
    p.set_objective(Sense::maximize, ScalarExpr::trace(rho, h));
    const Solution s = p.solve();
    ASSERT_TRUE(s.optimal());
    EXPECT_NEAR(s.value, max_eigenvalue(h), 1e-7);
    EXPECT_GE(s.min_psd_eigenvalue, -1e-8);
  }
}

TEST(Solve, HermitianEqualityWithComplexEntries) {
  // minimize tr(X) subject to X ⪰ 0 and X_{01} = i/2 fixed through a Hermitian equality
  // on the off-diagonal part: the optimum is the rank-one matrix with |X01|² = X00 X11.
  ComplexMatrix target(2, 2);
  target << 0, Complex(0, 0.5), Complex(0, -0.5), 0;
  Problem p;
  const VarId x = p.add_psd_variable(2);
  p.add_equality(HermitianExpr::mapped(x, 2,
                                       [](const ComplexMatrix& m) {
                                         ComplexMatrix off = m;
                                         off.diagonal().setZero();
                                         return off;
                                       }),
                 target);
  p.set_objective(Sense::minimize, ScalarExpr::trace(x, identity(2)));
  const Solution s = p.solve();
  ASSERT_TRUE(s.optimal());
  EXPECT_NEAR(s.value, 1.0, 1e-7);
  EXPECT_NEAR(std::abs(s[x](0, 1) - Complex(0, 0.5)), 0.0, 1e-7);
}

TEST(Solve, LinearProgramWithScalarBlocks) {
  // max x + 2y, x + y <= 1, x, y >= 0 → 2.
  Problem p;
  const VarId x = p.add_psd_variable(1), y = p.add_psd_variable(1);
  p.add_psd(HermitianExpr::constant(identity(1)) - HermitianExpr::of(x, 1) - HermitianExpr::of(y, 1));
  p.set_objective(Sense::maximize, ScalarExpr::trace(x, identity(1)) + 2.0 * ScalarExpr::trace(y, identity(1)));
  const Solution s = p.solve();
  ASSERT_TRUE(s.optimal());
  EXPECT_NEAR(s.value, 2.0, 1e-8);
}

TEST(Solve, DetectsInfeasibility) {
  Problem p;
  const VarId x = p.add_psd_variable(2);
  p.add_equality(ScalarExpr::trace(x, identity(2)), -1.0);
  p.set_objective(Sense::minimize, ScalarExpr::trace(x, identity(2)));
  EXPECT_EQ(p.solve().status, Status::infeasible);
}

TEST(Solve, DetectsUnboundedness) {
  Problem p;
  const VarId x = p.add_psd_variable(2);
  p.set_objective(Sense::maximize, ScalarExpr::trace(x, identity(2)));
  EXPECT_EQ(p.solve().status, Status::unbounded);
}

TEST(Solve, RedundantEqualitiesAreTolerated) {
  Problem p;
  const VarId rho = p.add_psd_variable(2);
  p.add_equality(ScalarExpr::trace(rho, identity(2)), 1.0);
  p.add_equality(2.0 * ScalarExpr::trace(rho, identity(2)), 2.0);
  ComplexMatrix z(2, 2);
  z << 1, 0, 0, -1;
  p.set_objective(Sense::maximize, ScalarExpr::trace(rho, z));
  const Solution s = p.solve();
  ASSERT_TRUE(s.optimal());
  EXPECT_NEAR(s.value, 1.0, 1e-8);
}

TEST(Solve, StrongDualityOfPsdMultiplier) {
  // min tr(C X) s.t. tr X = 1, X ⪰ 0: the PSD multiplier W satisfies W = C - y I.
  CounterRng rng(45);
  const ComplexMatrix c = random_hermitian(3, rng);
  Problem p;
  const VarId x = p.add_psd_variable(3);
  p.add_equality(ScalarExpr::trace(x, identity(3)), 1.0);
  p.set_objective(Sense::minimize, ScalarExpr::trace(x, c));
  const Solution s = p.solve();
  ASSERT_TRUE(s.optimal());
  EXPECT_NEAR(s.value, min_eigenvalue(c), 1e-7);
  EXPECT_GE(min_eigenvalue(s.psd_duals[0]), -1e-7);
  EXPECT_NEAR(std::abs((s.psd_duals[0] * s[x]).trace()), 0.0, 1e-6);
}

TEST(Dump, OneLinePerConstraintWithFullPrecision) {
  Problem p;
  const VarId x = p.add_psd_variable(1, "t");
  p.add_equality(ScalarExpr::trace(x, identity(1) / 3.0), 1.0);
  p.set_objective(Sense::minimize, ScalarExpr::trace(x, identity(1)));
  const std::string text = p.dump();
  EXPECT_NE(text.find("block 0 t side 1"), std::string::npos);
  EXPECT_NE(text.find("eq 0 a 0.33333333333333331 b 1"), std::string::npos);
  EXPECT_NE(text.find("psd 0 side 2"), std::string::npos);
}

}  // namespace
}  // namespace irt::sdp
