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

#include <optional>
#include <vector>

#include "irt/instruments.hpp"
#include "irt/sdp.hpp"

namespace irt {

/// Interactive-instrument robustness R with its certificates.
///
/// kappa[a] (on B) are primal variables: J_a ⪯ I_A/d_A ⊗ κ_a and
/// R = Σ_a tr κ_a - 1. omega[a] (on A⊗B) are dual variables with
/// tr_A ω_a = I_B and R = d_A Σ_a tr(ω_a J_a) - 1. Either list is empty when
/// only one side was solved.
struct RobustnessCertificate {
  double value = 0.0;
  double gap = 0.0;  ///< |primal - dual| when both sides are solved, else the solver's gap
  std::vector<ComplexMatrix> kappa;
  std::vector<ComplexMatrix> omega;

  double one_plus_r() const { return 1.0 + value; }
};

/// min Σ_a tr κ_a - 1  s.t.  I/d_A ⊗ κ_a - J_a ⪰ 0,  κ_a ⪰ 0.
/// Throws sdp::SolverError unless the solve is optimal.
RobustnessCertificate robustness_primal(const Instrument& inst, const sdp::SolveOptions& options = {});
/// max d_A Σ_a tr(ω_a J_a) - 1  s.t.  tr_A ω_a = I_B,  ω_a ⪰ 0.
RobustnessCertificate robustness_dual(const Instrument& inst, const sdp::SolveOptions& options = {});
/// Both sides; value is the dual value and gap = |primal - dual|.
RobustnessCertificate robustness(const Instrument& inst, const sdp::SolveOptions& options = {});

/// Noise instrument N with (E_a + R N_a)/(1 + R) non-interactive, rebuilt from
/// the primal variables: N_a = (I/d_A ⊗ κ_a - J_a)/R. For R ≈ 0 the
/// non-interactive instrument I/d_A ⊗ κ_a/Σ tr κ itself is returned.
Instrument reconstruct_noise(const Instrument& inst, const RobustnessCertificate& cert);

struct EntangledFractionResult {
  double f_plus = 0.0;
  /// Channel Choi operators B → A (shape {d_B, d_A}) attaining f_plus.
  std::vector<ComplexMatrix> recovery_chois;
};

/// max Σ_a ⟨Φ+|(id ⊗ Λ_a)(J_a)|Φ+⟩ over channels Λ_a : B → A.
EntangledFractionResult entangled_fraction(const Instrument& inst, const sdp::SolveOptions& options = {});

/// Recovery channels built from dual variables: Λ_a has Choi operator
/// swap(ω_a^t)/d_B, i.e. the adjoint of the unital map with Choi ω_a/d_A.
/// With optimal ω they attain F_+ = Σ_a tr(ω_a J_a)/d_A.
std::vector<ComplexMatrix> recovery_channels_from_dual(const std::vector<ComplexMatrix>& omegas, BipartiteShape shape);

/// Σ_a ⟨Φ+|(id ⊗ Λ_a)(J_a)|Φ+⟩ for given recovery channels.
double recovery_fidelity(const Instrument& inst, const std::vector<ComplexMatrix>& recovery_chois);

/// |(1 + R) - d_A² F_+| with R and F_+ from separate SDPs.
double check_fplus_identity(const Instrument& inst, const sdp::SolveOptions& options = {});

/// Conditional min-entropy H_min(A|B) = -log2 min{tr Y : I_A ⊗ Y ⪰ ρ_AB}.
double min_entropy(const ComplexMatrix& rho_ab, BipartiteShape shape, const sdp::SolveOptions& options = {});
/// Optimal Y of the min-entropy program (unnormalised λσ̂).
ComplexMatrix min_entropy_witness(const ComplexMatrix& rho_ab, BipartiteShape shape,
                                  const sdp::SolveOptions& options = {});
/// D_max(ρ‖σ) = log2 min{λ : ρ ⪯ λσ}; +∞ if supp ρ ⊄ supp σ.
double max_relative_entropy(const ComplexMatrix& rho, const ComplexMatrix& sigma);

/// |log2(d_A F_+) + H_min(A|B)_J| for a single-outcome instrument.
double check_minentropy_relation(const Instrument& channel, const sdp::SolveOptions& options = {});

struct PovmRobustness {
  double closed_form = 0.0;  ///< Σ_a ‖E_a‖∞ - 1
  std::optional<double> sdp_value;
};

PovmRobustness povm_robustness(const Povm& povm, bool with_sdp = false, const sdp::SolveOptions& options = {});

}  // namespace irt
