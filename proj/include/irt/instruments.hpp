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

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "irt/core.hpp"
#include "irt/random.hpp"

namespace irt {

/// Minimum-eigenvalue floor for PSD checks on instrument data. Solver output
/// carries ~1e-8 noise and has to pass validation after a round trip.
inline constexpr double kPsdTol = 1e-9;
/// Tolerance on tr_B(Σ_a J_a) = I/d_A and on POVM completeness.
inline constexpr double kNormalizationTol = 1e-9;

class InvalidInstrumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Outcome {
  std::string label;
  ComplexMatrix choi;
};

/// A finite-outcome quantum instrument A → B stored as trace-normalised Choi
/// operators J_a = (id ⊗ E_a)(Φ+), one per outcome, in label order.
///
/// Construction only checks shapes; use validate() for the physical
/// constraints.
class Instrument {
 public:
  Instrument(BipartiteShape shape, std::vector<Outcome> outcomes);

  BipartiteShape shape() const { return shape_; }
  std::size_t d_in() const { return shape_.d_a; }
  std::size_t d_out() const { return shape_.d_b; }
  std::size_t size() const { return outcomes_.size(); }

  const std::vector<Outcome>& outcomes() const { return outcomes_; }
  const Outcome& outcome(std::size_t a) const { return outcomes_.at(a); }
  const ComplexMatrix& choi(std::size_t a) const { return outcomes_.at(a).choi; }
  std::vector<ComplexMatrix> chois() const;
  std::vector<std::string> labels() const;
  /// Σ_a J_a, the Choi operator of the induced channel.
  ComplexMatrix total_choi() const;

 private:
  BipartiteShape shape_;
  std::vector<Outcome> outcomes_;
};

struct ValidationIssue {
  std::string constraint;  ///< "not Hermitian", "not PSD", "trace condition", ...
  std::string where;       ///< outcome label, or empty for global constraints
  double residual = 0.0;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  bool valid() const { return issues.empty(); }
  explicit operator bool() const { return valid(); }
  std::string to_string() const;
};

ValidationReport validate(const Instrument& inst);

/// Discard-and-prepare instrument L_a(ρ) = r(a) τ̂_a tr(ρ).
struct NonInteractiveModel {
  std::vector<double> r;
  std::vector<ComplexMatrix> tau;
  std::vector<std::string> labels;  ///< optional; defaults to "0", "1", ...
};

ValidationReport validate(const NonInteractiveModel& model);
/// J_a = I_A/d_A ⊗ r(a) τ̂_a. Throws InvalidInstrumentError on an invalid model.
Instrument from_noninteractive(const NonInteractiveModel& model, std::size_t d_a);

struct Povm {
  std::size_t d = 1;
  std::vector<ComplexMatrix> effects;
  std::vector<std::string> labels;  ///< optional
};

ValidationReport validate(const Povm& povm);
/// Instrument with trivial output (d_B = 1): J_a = E_a^t / d_A.
Instrument from_povm(const Povm& povm);
/// Measure-and-keep instrument with Kraus operators √E_a.
Instrument luders_instrument(const Povm& povm);
/// E_a = p_a U_a · U_a†. Throws InvalidInstrumentError if an entry is not unitary
/// to 1e-10 or the weights are not a distribution.
Instrument from_unitary_mixture(std::span<const double> probs, std::span<const ComplexMatrix> unitaries,
                                std::vector<std::string> labels = {});
/// One Kraus list per outcome.
Instrument from_kraus(std::size_t d_a, std::size_t d_b, const std::vector<std::vector<ComplexMatrix>>& kraus,
                      std::vector<std::string> labels = {});

/// Sums the Choi operators of each group. Every outcome must appear in exactly
/// one group. Merged labels are joined with '+' unless `labels` is given.
Instrument coarse_grain(const Instrument& inst, const std::vector<std::vector<std::size_t>>& partition,
                        std::vector<std::string> labels = {});
/// Appends zero-Choi outcomes until the instrument has `count` outcomes.
Instrument pad_outcomes(const Instrument& inst, std::size_t count);

// ---------------------------------------------------------------------------
// Canonical instruments

Instrument identity_channel(std::size_t d);
/// ρ ↦ (1-p) ρ + p tr(ρ) I/d, as a single-outcome instrument.
Instrument depolarizing_channel(std::size_t d, double p);
/// Qubit instrument E_a = ¼ σ_a · σ_a for the four Pauli matrices.
Instrument pauli_mixture();
/// The d² Weyl–Heisenberg unitaries X^j Z^k.
std::vector<ComplexMatrix> weyl_heisenberg_unitaries(std::size_t d);
Povm computational_povm(std::size_t d);
/// {(2/3)|ψ_k⟩⟨ψ_k|} with Bloch vectors 120° apart in the x–z plane.
Povm trine_povm();
Povm trivial_povm(std::size_t d, std::size_t outcomes = 1);

// ---------------------------------------------------------------------------
// Random instruments

/// Random valid instrument: a random channel's Kraus operators distributed
/// over the outcomes (each outcome gets at least `kraus_per_outcome` of them,
/// more when needed for Σ K†K to be invertible).
Instrument random_instrument(std::size_t d_a, std::size_t d_b, std::size_t outcomes, CounterRng& rng,
                             std::size_t kraus_per_outcome = 2);
NonInteractiveModel random_noninteractive_model(std::size_t d_b, std::size_t outcomes, CounterRng& rng);
Instrument random_noninteractive(std::size_t d_a, std::size_t d_b, std::size_t outcomes, CounterRng& rng);
Povm random_povm(std::size_t d, std::size_t outcomes, CounterRng& rng);

}  // namespace irt
