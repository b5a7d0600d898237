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

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "irt/instruments.hpp"
#include "irt/robustness.hpp"
#include "irt/sdp.hpp"

namespace irt {

/// Joint POVM on A⊗B for entanglement-assisted unambiguous discrimination:
/// one effect per instrument outcome plus the inconclusive effect Q_∅, which
/// is always stored.
struct DiscriminationStrategy {
  BipartiteShape shape;
  std::vector<std::string> labels;
  std::vector<ComplexMatrix> effects;
  ComplexMatrix inconclusive;

  std::size_t size() const { return effects.size(); }
};

/// Checks shapes, Hermiticity, positivity (kPsdTol) and Σ_m Q_m + Q_∅ = I.
ValidationReport validate(const DiscriminationStrategy& strat);

/// Completes `effects` with Q_∅ = I - Σ_m Q_m. Labels default to "0", "1", ...
DiscriminationStrategy make_strategy(BipartiteShape shape, std::vector<ComplexMatrix> effects,
                                     std::vector<std::string> labels = {});
/// Projectors onto the four Bell states, matched to pauli_mixture() labels;
/// Q_∅ = 0.
DiscriminationStrategy bell_strategy();
/// Random POVM with outcomes + 1 elements, the last one inconclusive.
DiscriminationStrategy random_strategy(BipartiteShape shape, std::size_t outcomes, CounterRng& rng);

class DegenerateCertificateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Average communication fidelity

struct FidelityEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

struct AverageFidelity {
  double from_robustness = 0.0;  ///< (1/d_A)(1 + R/(d_A + 1))
  double from_fplus = 0.0;       ///< (1 + d_A F_+)/(d_A + 1)
  double robustness = 0.0;
  double f_plus = 0.0;

  double value() const { return from_robustness; }
};

/// Optimal average fidelity, through R and, independently, through F_+.
AverageFidelity average_fidelity_formula(const Instrument& inst, const sdp::SolveOptions& options = {});

/// Haar average of ⟨ψ| Σ_a (Λ_a ∘ E_a)(ψ) |ψ⟩ over pure inputs. `recovery`
/// holds channel Chois B → A (shape {d_B, d_A}), one per outcome. Samples are
/// drawn in fixed-size chunks from substreams of `seed`, so the result does
/// not depend on the worker count.
FidelityEstimate average_fidelity_monte_carlo(const Instrument& inst, const std::vector<ComplexMatrix>& recovery,
                                              std::size_t samples, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Unambiguous discrimination

/// Σ_a tr[Q_a J_a].
double p_succ(const Instrument& inst, const DiscriminationStrategy& strat);
/// max_{a≠m} tr[Q_m J_a]; 0 for a single outcome.
double unambiguity_residual(const Instrument& inst, const DiscriminationStrategy& strat);

/// Best non-interactive success probability max_a ‖tr_A Q_a‖∞ / d_A.
double beta_noninteractive(const DiscriminationStrategy& strat);
double beta_noninteractive(const std::vector<ComplexMatrix>& effects, BipartiteShape shape);
/// The non-interactive model attaining β: all weight on the first maximising
/// outcome, prepared in a top eigenvector of its marginal.
NonInteractiveModel best_noninteractive_response(const DiscriminationStrategy& strat);
/// β as an SDP: max Σ_a tr[Q_a (I/d_A ⊗ T_a)] over T_a ⪰ 0 with Σ_a tr T_a = 1.
double beta_noninteractive_sdp(const std::vector<ComplexMatrix>& effects, BipartiteShape shape,
                               const sdp::SolveOptions& options = {});

struct CertificateStrategyCheck {
  double ratio = 0.0;     ///< p_succ / β for the certificate strategy
  double residual = 0.0;  ///< |ratio - (1 + R)|
  double robustness = 0.0;
  double p_succ = 0.0;
  double beta = 0.0;
  DiscriminationStrategy strategy;
};

/// Strategy from the dual-optimal ω: Q_a = ω_a / ‖Σ_b ω_b‖∞, Q_∅ = I - Σ_a Q_a.
/// Throws DegenerateCertificateError if Σ_b ω_b vanishes.
DiscriminationStrategy strategy_from_dual(const std::vector<ComplexMatrix>& omegas, BipartiteShape shape,
                                          std::vector<std::string> labels = {});
CertificateStrategyCheck check_certificate_strategy(const Instrument& inst, const sdp::SolveOptions& options = {});

/// (every tr_A ω_a ⪯ d_A I_B, β({ω_a}) ≤ 1), the second through the SDP.
/// Both comparisons allow a relative slack of 1e-7.
std::pair<bool, bool> check_marginal_bound(const std::vector<ComplexMatrix>& omegas, BipartiteShape shape,
                                   const sdp::SolveOptions& options = {});

}  // namespace irt
