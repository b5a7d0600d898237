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
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "irt/instruments.hpp"
#include "irt/sdp.hpp"
#include "irt/tasks.hpp"

namespace irt {

/// One pre-processing branch λ of an allowed operation: a pre-channel A → A,
/// a post-channel B → B per intermediate outcome k, and a classical map whose
/// row k is the distribution P(·|k, λ) over final outcomes.
struct OperationBranch {
  double weight = 1.0;
  ComplexMatrix pre_choi;
  std::vector<ComplexMatrix> post_chois;
  RealMatrix classical_map;
};

/// Π(E)_a = Σ_{λ,k} q(λ) P(a|k,λ) D_{k|λ} ∘ E_k ∘ P_λ.
struct AllowedOperation {
  std::vector<OperationBranch> branches;
  std::vector<std::string> output_labels;  ///< optional; defaults to "0", "1", ...

  std::size_t input_outcomes() const;
  std::size_t output_outcomes() const;
};

class InvalidOperationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Weights form a distribution, Chois are channels on the given shape
/// (pre A → A, post B → B), classical maps are row-stochastic to 1e-12 and
/// all branches agree on the outcome counts.
ValidationReport validate(const AllowedOperation& op, BipartiteShape shape);

/// Identity pre/post channels; outcome k goes to k mod `output_outcomes`.
AllowedOperation identity_operation(BipartiteShape shape, std::size_t input_outcomes,
                                    std::size_t output_outcomes = 0);
/// Single branch, identity channels, deterministic classical map k ↦ assignment[k].
AllowedOperation classical_operation(BipartiteShape shape, const std::vector<std::size_t>& assignment,
                                     std::size_t output_outcomes);
AllowedOperation random_allowed_operation(BipartiteShape shape, std::size_t input_outcomes,
                                          std::size_t output_outcomes, CounterRng& rng, std::size_t branches = 2);

/// Throws InvalidOperationError for an invalid op and DimensionError when the
/// op does not fit the instrument.
Instrument apply_operation(const AllowedOperation& op, const Instrument& inst);

/// (R(inst), R(apply_operation(op, inst))).
std::pair<double, double> monotonicity_check(const AllowedOperation& op, const Instrument& inst,
                                             const sdp::SolveOptions& options = {});

// ---------------------------------------------------------------------------
// P_max bounds

struct SeesawOptions {
  int max_iters = 30;
  double tol = 1e-9;  ///< stop when a full sweep improves by less
  sdp::SolveOptions sdp;
};

struct SeesawResult {
  double lower_bound = 0.0;  ///< P_succ(Π(inst), strat) of the returned op
  AllowedOperation op;
  std::vector<double> history;  ///< value after each block update
  bool warning = false;         ///< a block SDP failed; best-so-far returned
  std::string message;
};

/// Alternating maximisation of P_succ(Π(inst), strat) over single-branch
/// allowed operations, starting from the identity operation. The post step
/// is exact: for each intermediate outcome k and final outcome a the best
/// post-channel is found by SDP and k is sent to the best a.
SeesawResult p_max_seesaw(const Instrument& inst, const DiscriminationStrategy& strat,
                          const SeesawOptions& options = {});

/// (1 + R(inst)) · β(strat), an upper bound on P_succ(Π(inst), strat) for
/// every allowed operation Π.
double p_max_upper_bound(const Instrument& inst, const DiscriminationStrategy& strat,
                         const sdp::SolveOptions& options = {});

// ---------------------------------------------------------------------------
// Conversion

enum class Verdict { converted, impossible, undetermined };
std::string to_string(Verdict verdict);

struct ConvertConfig {
  double tol = 1e-6;             ///< residual accepted as an exact conversion
  int restarts = 5;              ///< random restarts on top of the identity start
  int max_iters = 30;            ///< block sweeps per see-saw chain
  std::size_t witness_samples = 20;
  double margin = 1e-6;          ///< required lower − upper gap for a witness
  std::uint64_t seed = 0;
  sdp::SolveOptions sdp;

  /// Throws std::invalid_argument on out-of-range fields.
  void check() const;
};

struct ConversionReport {
  Verdict verdict = Verdict::undetermined;
  double residual = 0.0;  ///< Σ_a ‖Π(source)_a − target_a‖₁ of the best operation found
  std::optional<DiscriminationStrategy> witness;
  std::optional<AllowedOperation> certificate;
  double lower = 0.0;  ///< see-saw lower bound on P_max(target, Q) for the best strategy tried
  double upper = 0.0;  ///< (1 + R(source)) β(Q) for the same strategy
  std::size_t padded_outcomes = 0;
};

/// Σ_a ‖Π(source)_a − target_a‖₁.
double conversion_residual(const AllowedOperation& op, const Instrument& source, const Instrument& target);

/// Phase (i) alone: trace-norm see-saw over single-branch operations.
/// Returns the best operation and its residual.
std::pair<AllowedOperation, double> search_conversion(const Instrument& source, const Instrument& target,
                                                      const ConvertConfig& config = {});

struct WitnessSearch {
  std::optional<DiscriminationStrategy> witness;
  DiscriminationStrategy best;  ///< strategy with the largest lower − upper
  double lower = 0.0;
  double upper = 0.0;
};

/// Phase (ii) alone: the target's dual-certificate strategy plus random ones.
WitnessSearch search_witness(const Instrument& source, const Instrument& target, const ConvertConfig& config = {});

/// Target outcomes are padded with zero maps when it has fewer than the
/// source. Throws DimensionError when d_A or d_B differ.
ConversionReport convert(const Instrument& source, const Instrument& target, const ConvertConfig& config = {});

}  // namespace irt
