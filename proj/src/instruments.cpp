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

#include "irt/instruments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace irt {

namespace {

Eigen::Index idx(std::size_t v) { return static_cast<Eigen::Index>(v); }

std::vector<std::string> default_labels(std::size_t n) {
  std::vector<std::string> labels;
  labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
  return labels;
}

std::vector<std::string> labels_or_default(std::vector<std::string> labels, std::size_t n) {
  if (labels.empty()) return default_labels(n);
  if (labels.size() != n) throw DimensionError("label count does not match outcome count");
  return labels;
}

void check_psd(const ComplexMatrix& m, const std::string& where, ValidationReport& report) {
  if (!m.allFinite()) {
    report.issues.push_back({"not finite", where, std::numeric_limits<double>::infinity()});
    return;
  }
  const double herm = hermiticity_error(m);
  if (herm > kNormalizationTol) {
    report.issues.push_back({"not Hermitian", where, herm});
    return;
  }
  const double lmin = min_eigenvalue(m);
  if (lmin < -kPsdTol) report.issues.push_back({"not PSD", where, -lmin});
}

[[noreturn]] void throw_invalid(const char* what, const ValidationReport& report) {
  throw InvalidInstrumentError(std::string(what) + ": " + report.to_string());
}

}  // namespace

Instrument::Instrument(BipartiteShape shape, std::vector<Outcome> outcomes)
    : shape_(shape), outcomes_(std::move(outcomes)) {
  if (outcomes_.empty()) throw DimensionError("Instrument: at least one outcome is required");
  for (const auto& o : outcomes_) {
    if (o.choi.rows() != idx(shape_.total()) || o.choi.cols() != idx(shape_.total())) {
      std::ostringstream os;
      os << "Instrument: Choi operator of outcome '" << o.label << "' is " << describe_shape(o.choi)
         << ", expected side " << shape_.total();
      throw DimensionError(os.str());
    }
  }
}

std::vector<ComplexMatrix> Instrument::chois() const {
  std::vector<ComplexMatrix> out;
  out.reserve(outcomes_.size());
  for (const auto& o : outcomes_) out.push_back(o.choi);
  return out;
}

std::vector<std::string> Instrument::labels() const {
  std::vector<std::string> out;
  out.reserve(outcomes_.size());
  for (const auto& o : outcomes_) out.push_back(o.label);
  return out;
}

ComplexMatrix Instrument::total_choi() const {
  ComplexMatrix sum = zeros(shape_.total(), shape_.total());
  for (const auto& o : outcomes_) sum += o.choi;
  return sum;
}

std::string ValidationReport::to_string() const {
  if (issues.empty()) return "valid";
  std::ostringstream os;
  for (std::size_t i = 0; i < issues.size(); ++i) {
    if (i) os << "; ";
    os << issues[i].constraint;
    if (!issues[i].where.empty()) os << " [" << issues[i].where << "]";
    os << " (residual " << issues[i].residual << ")";
  }
  return os.str();
}

ValidationReport validate(const Instrument& inst) {
  ValidationReport report;
  for (const auto& o : inst.outcomes()) check_psd(o.choi, o.label, report);
  const ComplexMatrix marginal = partial_trace(inst.total_choi(), inst.shape(), Factor::second);
  const ComplexMatrix target = identity(inst.d_in()) / static_cast<double>(inst.d_in());
  const double residual = (marginal - target).cwiseAbs().maxCoeff();
  if (residual > kNormalizationTol) report.issues.push_back({"trace condition", "", residual});
  return report;
}

ValidationReport validate(const NonInteractiveModel& model) {
  ValidationReport report;
  if (model.r.empty() || model.r.size() != model.tau.size()) {
    report.issues.push_back({"outcome count mismatch", "", 0.0});
    return report;
  }
  double total = 0.0;
  for (std::size_t a = 0; a < model.r.size(); ++a) {
    const std::string where = model.labels.size() == model.r.size() ? model.labels[a] : std::to_string(a);
    if (model.r[a] < 0.0) report.issues.push_back({"negative probability", where, -model.r[a]});
    total += model.r[a];
    const auto& tau = model.tau[a];
    if (!is_square(tau) || tau.rows() != model.tau.front().rows()) {
      report.issues.push_back({"state dimension mismatch", where, 0.0});
      continue;
    }
    check_psd(tau, where, report);
    const double tr_err = std::abs(tau.trace() - Complex(1.0));
    if (tr_err > kNormalizationTol) report.issues.push_back({"state not unit trace", where, tr_err});
  }
  if (std::abs(total - 1.0) > 1e-12) report.issues.push_back({"probabilities do not sum to 1", "", std::abs(total - 1.0)});
  return report;
}

Instrument from_noninteractive(const NonInteractiveModel& model, std::size_t d_a) {
  if (const auto report = validate(model); !report) throw_invalid("from_noninteractive", report);
  const auto d_b = static_cast<std::size_t>(model.tau.front().rows());
  const auto labels = labels_or_default(model.labels, model.r.size());
  const ComplexMatrix maximally_mixed = identity(d_a) / static_cast<double>(d_a);
  std::vector<Outcome> outcomes;
  for (std::size_t a = 0; a < model.r.size(); ++a) {
    outcomes.push_back({labels[a], tensor(maximally_mixed, model.r[a] * model.tau[a])});
  }
  return Instrument({d_a, d_b}, std::move(outcomes));
}

ValidationReport validate(const Povm& povm) {
  ValidationReport report;
  if (povm.effects.empty()) {
    report.issues.push_back({"no effects", "", 0.0});
    return report;
  }
  ComplexMatrix sum = zeros(povm.d, povm.d);
  for (std::size_t a = 0; a < povm.effects.size(); ++a) {
    const std::string where = povm.labels.size() == povm.effects.size() ? povm.labels[a] : std::to_string(a);
    const auto& e = povm.effects[a];
    if (e.rows() != idx(povm.d) || e.cols() != idx(povm.d)) {
      report.issues.push_back({"effect dimension mismatch", where, 0.0});
      continue;
    }
    check_psd(e, where, report);
    sum += e;
  }
  const double residual = (sum - identity(povm.d)).cwiseAbs().maxCoeff();
  if (residual > kNormalizationTol) report.issues.push_back({"effects do not sum to identity", "", residual});
  return report;
}

Instrument from_povm(const Povm& povm) {
  if (const auto report = validate(povm); !report) throw_invalid("from_povm", report);
  const auto labels = labels_or_default(povm.labels, povm.effects.size());
  std::vector<Outcome> outcomes;
  for (std::size_t a = 0; a < povm.effects.size(); ++a) {
    outcomes.push_back({labels[a], ComplexMatrix(povm.effects[a].transpose()) / static_cast<double>(povm.d)});
  }
  return Instrument({povm.d, 1}, std::move(outcomes));
}

Instrument luders_instrument(const Povm& povm) {
  if (const auto report = validate(povm); !report) throw_invalid("luders_instrument", report);
  std::vector<std::vector<ComplexMatrix>> kraus;
  for (const auto& e : povm.effects) kraus.push_back({psd_sqrt(e)});
  return from_kraus(povm.d, povm.d, kraus, povm.labels);
}

Instrument from_unitary_mixture(std::span<const double> probs, std::span<const ComplexMatrix> unitaries,
                                std::vector<std::string> labels) {
  if (probs.size() != unitaries.size() || probs.empty()) {
    throw InvalidInstrumentError("from_unitary_mixture: need one weight per unitary");
  }
  double total = 0.0;
  for (double p : probs) {
    if (p < 0.0) throw InvalidInstrumentError("from_unitary_mixture: negative weight");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) throw InvalidInstrumentError("from_unitary_mixture: weights do not sum to 1");
  const auto d = static_cast<std::size_t>(unitaries.front().rows());
  std::vector<std::vector<ComplexMatrix>> kraus;
  for (std::size_t a = 0; a < unitaries.size(); ++a) {
    const auto& u = unitaries[a];
    if (u.rows() != idx(d) || u.cols() != idx(d)) throw DimensionError("from_unitary_mixture: dimension mismatch");
    const double err = (u.adjoint() * u - identity(d)).cwiseAbs().maxCoeff();
    if (err > 1e-10) {
      std::ostringstream os;
      os << "from_unitary_mixture: entry " << a << " is not unitary (residual " << err << ")";
      throw InvalidInstrumentError(os.str());
    }
    kraus.push_back({std::sqrt(probs[a]) * u});
  }
  return from_kraus(d, d, kraus, std::move(labels));
}

Instrument from_kraus(std::size_t d_a, std::size_t d_b, const std::vector<std::vector<ComplexMatrix>>& kraus,
                      std::vector<std::string> labels) {
  const auto names = labels_or_default(std::move(labels), kraus.size());
  std::vector<Outcome> outcomes;
  for (std::size_t a = 0; a < kraus.size(); ++a) {
    outcomes.push_back({names[a], choi_of_kraus(kraus[a], d_a, d_b)});
  }
  return Instrument({d_a, d_b}, std::move(outcomes));
}

Instrument coarse_grain(const Instrument& inst, const std::vector<std::vector<std::size_t>>& partition,
                        std::vector<std::string> labels) {
  std::vector<int> seen(inst.size(), 0);
  for (const auto& group : partition) {
    if (group.empty()) throw InvalidInstrumentError("coarse_grain: empty group");
    for (std::size_t a : group) {
      if (a >= inst.size()) throw InvalidInstrumentError("coarse_grain: outcome index out of range");
      ++seen[a];
    }
  }
  if (std::any_of(seen.begin(), seen.end(), [](int c) { return c != 1; })) {
    throw InvalidInstrumentError("coarse_grain: partition must cover every outcome exactly once");
  }
  if (!labels.empty() && labels.size() != partition.size()) {
    throw InvalidInstrumentError("coarse_grain: one label per group required");
  }
  std::vector<Outcome> outcomes;
  for (std::size_t g = 0; g < partition.size(); ++g) {
    ComplexMatrix sum = zeros(inst.shape().total(), inst.shape().total());
    std::string joined;
    for (std::size_t a : partition[g]) {
      sum += inst.choi(a);
      if (!joined.empty()) joined += "+";
      joined += inst.outcome(a).label;
    }
    outcomes.push_back({labels.empty() ? joined : labels[g], std::move(sum)});
  }
  return Instrument(inst.shape(), std::move(outcomes));
}

Instrument pad_outcomes(const Instrument& inst, std::size_t count) {
  std::vector<Outcome> outcomes = inst.outcomes();
  for (std::size_t a = outcomes.size(); a < count; ++a) {
    outcomes.push_back({"pad" + std::to_string(a), zeros(inst.shape().total(), inst.shape().total())});
  }
  return Instrument(inst.shape(), std::move(outcomes));
}

Instrument identity_channel(std::size_t d) {
  return Instrument({d, d}, {{"id", identity_channel_choi(d)}});
}

Instrument depolarizing_channel(std::size_t d, double p) {
  const double dd = static_cast<double>(d);
  ComplexMatrix choi = (1.0 - p) * max_entangled_state(d) + p * identity(d * d) / (dd * dd);
  return Instrument({d, d}, {{"depolarize", std::move(choi)}});
}

std::vector<ComplexMatrix> weyl_heisenberg_unitaries(std::size_t d) {
  const Complex omega = std::polar(1.0, 2.0 * std::numbers::pi / static_cast<double>(d));
  ComplexMatrix shift = zeros(d, d);
  ComplexMatrix clock = zeros(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    shift(idx((i + 1) % d), idx(i)) = 1.0;
    clock(idx(i), idx(i)) = std::pow(omega, static_cast<double>(i));
  }
  std::vector<ComplexMatrix> out;
  ComplexMatrix xj = identity(d);
  for (std::size_t j = 0; j < d; ++j) {
    ComplexMatrix zk = identity(d);
    for (std::size_t k = 0; k < d; ++k) {
      out.push_back(xj * zk);
      zk = zk * clock;
    }
    xj = xj * shift;
  }
  return out;
}

Instrument pauli_mixture() {
  ComplexMatrix x(2, 2), y(2, 2), z(2, 2);
  x << 0, 1, 1, 0;
  y << 0, Complex(0, -1), Complex(0, 1), 0;
  z << 1, 0, 0, -1;
  const std::vector<ComplexMatrix> paulis{identity(2), x, y, z};
  const std::vector<double> probs(4, 0.25);
  return from_unitary_mixture(probs, paulis, {"I", "X", "Y", "Z"});
}

Povm computational_povm(std::size_t d) {
  Povm povm{d, {}, {}};
  for (std::size_t i = 0; i < d; ++i) {
    povm.effects.push_back(basis_op(d, i, i));
    povm.labels.push_back(std::to_string(i));
  }
  return povm;
}

Povm trine_povm() {
  Povm povm{2, {}, {"t0", "t1", "t2"}};
  for (int k = 0; k < 3; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / 3.0;
    ComplexVector ket(2);
    ket << std::cos(theta / 2.0), std::sin(theta / 2.0);
    povm.effects.push_back((2.0 / 3.0) * projector(ket));
  }
  return povm;
}

Povm trivial_povm(std::size_t d, std::size_t outcomes) {
  Povm povm{d, {}, {}};
  for (std::size_t a = 0; a < outcomes; ++a) povm.effects.push_back(identity(d) / static_cast<double>(outcomes));
  return povm;
}

Instrument random_instrument(std::size_t d_a, std::size_t d_b, std::size_t outcomes, CounterRng& rng,
                             std::size_t kraus_per_outcome) {
  // Enough Kraus operators for Σ K†K to be invertible.
  const std::size_t needed = (d_a + d_b * outcomes - 1) / (d_b * outcomes);
  kraus_per_outcome = std::max(kraus_per_outcome, needed);
  const auto kraus = random_channel_kraus(d_a, d_b, outcomes * kraus_per_outcome, rng);
  std::vector<std::vector<ComplexMatrix>> grouped(outcomes);
  for (std::size_t k = 0; k < kraus.size(); ++k) grouped[k / kraus_per_outcome].push_back(kraus[k]);
  return from_kraus(d_a, d_b, grouped);
}

NonInteractiveModel random_noninteractive_model(std::size_t d_b, std::size_t outcomes, CounterRng& rng) {
  NonInteractiveModel model;
  model.r = random_distribution(outcomes, rng);
  for (std::size_t a = 0; a < outcomes; ++a) {
    model.tau.push_back(random_density(d_b, rng, 1 + rng.below(d_b)));
  }
  return model;
}

Instrument random_noninteractive(std::size_t d_a, std::size_t d_b, std::size_t outcomes, CounterRng& rng) {
  return from_noninteractive(random_noninteractive_model(d_b, outcomes, rng), d_a);
}

Povm random_povm(std::size_t d, std::size_t outcomes, CounterRng& rng) {
  std::vector<ComplexMatrix> raw;
  ComplexMatrix sum = zeros(d, d);
  for (std::size_t a = 0; a < outcomes; ++a) {
    raw.push_back(random_psd(d, rng, 1 + rng.below(d)));
    sum += raw.back();
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(sum));
  const RealVector inv_root = es.eigenvalues().cwiseSqrt().cwiseInverse();
  const ComplexMatrix s = es.eigenvectors() * inv_root.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
  Povm povm{d, {}, {}};
  for (const auto& g : raw) povm.effects.push_back(hermitian_part(s * g * s));
  return povm;
}

}  // namespace irt
