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
#include <limits>

namespace irt {

namespace {

using sdp::HermitianExpr;
using sdp::ScalarExpr;

sdp::Solution require_optimal(const sdp::Problem& p, const sdp::SolveOptions& options, const char* what) {
  sdp::Solution s = p.solve(options);
  if (!s.optimal()) {
    throw sdp::SolverError(std::string(what) + ": solver returned " + sdp::to_string(s.status), s.status);
  }
  return s;
}

void require_valid(const Instrument& inst, const char* what) {
  if (const auto report = validate(inst); !report) {
    throw InvalidInstrumentError(std::string(what) + ": " + report.to_string());
  }
}

}  // namespace

RobustnessCertificate robustness_primal(const Instrument& inst, const sdp::SolveOptions& options) {
  require_valid(inst, "robustness_primal");
  const std::size_t da = inst.d_in(), db = inst.d_out();
  const ComplexMatrix mixed = identity(da) / static_cast<double>(da);
  sdp::Problem p;
  ScalarExpr objective(-1.0);
  std::vector<sdp::VarId> kappa;
  for (std::size_t a = 0; a < inst.size(); ++a) {
    kappa.push_back(p.add_psd_variable(db, "kappa" + std::to_string(a)));
    p.add_psd(HermitianExpr::mapped(kappa.back(), da * db,
                                    [mixed](const ComplexMatrix& k) { return tensor(mixed, k); }) -
              inst.choi(a));
    objective += ScalarExpr::trace(kappa.back(), identity(db));
  }
  p.set_objective(sdp::Sense::minimize, objective);
  const sdp::Solution s = require_optimal(p, options, "robustness_primal");
  RobustnessCertificate cert;
  cert.value = s.value;
  cert.gap = s.gap;
  for (auto v : kappa) cert.kappa.push_back(s[v]);
  return cert;
}

RobustnessCertificate robustness_dual(const Instrument& inst, const sdp::SolveOptions& options) {
  require_valid(inst, "robustness_dual");
  const std::size_t da = inst.d_in(), db = inst.d_out();
  const BipartiteShape shape = inst.shape();
  sdp::Problem p;
  ScalarExpr objective(-1.0);
  std::vector<sdp::VarId> omega;
  for (std::size_t a = 0; a < inst.size(); ++a) {
    omega.push_back(p.add_psd_variable(da * db, "omega" + std::to_string(a)));
    p.add_equality(HermitianExpr::mapped(omega.back(), db,
                                         [shape](const ComplexMatrix& w) {
                                           return partial_trace(w, shape, Factor::first);
                                         }),
                   identity(db));
    objective += static_cast<double>(da) * ScalarExpr::trace(omega.back(), inst.choi(a));
  }
  p.set_objective(sdp::Sense::maximize, objective);
  const sdp::Solution s = require_optimal(p, options, "robustness_dual");
  RobustnessCertificate cert;
  cert.value = s.value;
  cert.gap = s.gap;
  for (auto v : omega) cert.omega.push_back(s[v]);
  return cert;
}

RobustnessCertificate robustness(const Instrument& inst, const sdp::SolveOptions& options) {
  RobustnessCertificate primal = robustness_primal(inst, options);
  RobustnessCertificate dual = robustness_dual(inst, options);
  dual.gap = std::abs(primal.value - dual.value);
  dual.kappa = std::move(primal.kappa);
  return dual;
}

Instrument reconstruct_noise(const Instrument& inst, const RobustnessCertificate& cert) {
  if (cert.kappa.size() != inst.size()) throw DimensionError("reconstruct_noise: certificate lacks primal variables");
  const std::size_t da = inst.d_in();
  const ComplexMatrix mixed = identity(da) / static_cast<double>(da);
  double total = 0.0;
  for (const auto& k : cert.kappa) total += real_trace(k);
  const double t = total - 1.0;
  std::vector<Outcome> outcomes;
  for (std::size_t a = 0; a < inst.size(); ++a) {
    const ComplexMatrix lifted = tensor(mixed, cert.kappa[a]);
    ComplexMatrix choi = t > 1e-9 ? ComplexMatrix((lifted - inst.choi(a)) / t) : ComplexMatrix(lifted / total);
    outcomes.push_back({inst.outcome(a).label, hermitian_part(choi)});
  }
  return Instrument(inst.shape(), std::move(outcomes));
}

double recovery_fidelity(const Instrument& inst, const std::vector<ComplexMatrix>& recovery_chois) {
  if (recovery_chois.size() != inst.size()) throw DimensionError("recovery_fidelity: one recovery channel per outcome");
  const std::size_t da = inst.d_in(), db = inst.d_out();
  const ComplexMatrix phi = max_entangled_state(da);
  double f = 0.0;
  for (std::size_t a = 0; a < inst.size(); ++a) {
    const ComplexMatrix out = apply_choi_second(recovery_chois[a], {db, da}, inst.choi(a), da);
    f += (phi * out).trace().real();
  }
  return f;
}

EntangledFractionResult entangled_fraction(const Instrument& inst, const sdp::SolveOptions& options) {
  require_valid(inst, "entangled_fraction");
  const std::size_t da = inst.d_in(), db = inst.d_out();
  const BipartiteShape lambda_shape{db, da};
  const ComplexMatrix phi = max_entangled_state(da);
  sdp::Problem p;
  ScalarExpr objective;
  std::vector<sdp::VarId> lambda;
  for (std::size_t a = 0; a < inst.size(); ++a) {
    lambda.push_back(p.add_psd_variable(db * da, "lambda" + std::to_string(a)));
    p.add_equality(HermitianExpr::mapped(lambda.back(), db,
                                         [lambda_shape](const ComplexMatrix& l) {
                                           return partial_trace(l, lambda_shape, Factor::second);
                                         }),
                   identity(db) / static_cast<double>(db));
    const ComplexMatrix j = inst.choi(a);
    objective += ScalarExpr::trace(lambda.back(), phi, [j, lambda_shape, da](const ComplexMatrix& l) {
      return apply_choi_second(l, lambda_shape, j, da);
    });
  }
  p.set_objective(sdp::Sense::maximize, objective);
  const sdp::Solution s = require_optimal(p, options, "entangled_fraction");
  EntangledFractionResult result;
  result.f_plus = s.value;
  for (auto v : lambda) result.recovery_chois.push_back(s[v]);
  return result;
}

std::vector<ComplexMatrix> recovery_channels_from_dual(const std::vector<ComplexMatrix>& omegas, BipartiteShape shape) {
  std::vector<ComplexMatrix> out;
  out.reserve(omegas.size());
  for (const auto& w : omegas) {
    if (w.rows() != static_cast<Eigen::Index>(shape.total())) throw DimensionError("recovery_channels_from_dual: shape");
    out.push_back(swap_factors(w.transpose(), shape) / static_cast<double>(shape.d_b));
  }
  return out;
}

double check_fplus_identity(const Instrument& inst, const sdp::SolveOptions& options) {
  const double r = robustness_dual(inst, options).value;
  const double f = entangled_fraction(inst, options).f_plus;
  const double da = static_cast<double>(inst.d_in());
  return std::abs((1.0 + r) - da * da * f);
}

ComplexMatrix min_entropy_witness(const ComplexMatrix& rho_ab, BipartiteShape shape, const sdp::SolveOptions& options) {
  if (rho_ab.rows() != static_cast<Eigen::Index>(shape.total()) || rho_ab.cols() != rho_ab.rows()) {
    throw DimensionError("min_entropy: operator does not match shape");
  }
  require_hermitian(rho_ab, "min_entropy", 1e-9);
  const std::size_t da = shape.d_a, db = shape.d_b;
  sdp::Problem p;
  const sdp::VarId y = p.add_variable(db, "Y");
  p.add_psd(HermitianExpr::mapped(y, da * db, [da](const ComplexMatrix& m) { return tensor(identity(da), m); }) -
            hermitian_part(rho_ab));
  p.set_objective(sdp::Sense::minimize, ScalarExpr::trace(y, identity(db)));
  return require_optimal(p, options, "min_entropy")[y];
}

double min_entropy(const ComplexMatrix& rho_ab, BipartiteShape shape, const sdp::SolveOptions& options) {
  return -std::log2(real_trace(min_entropy_witness(rho_ab, shape, options)));
}

double max_relative_entropy(const ComplexMatrix& rho, const ComplexMatrix& sigma) {
  if (rho.rows() != sigma.rows()) throw DimensionError("max_relative_entropy: dimension mismatch");
  require_hermitian(rho, "max_relative_entropy", 1e-9);
  require_hermitian(sigma, "max_relative_entropy", 1e-9);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(sigma));
  const RealVector ev = es.eigenvalues();
  const double cutoff = 1e-12 * std::max(1.0, ev.cwiseAbs().maxCoeff());
  // Restrict to supp σ, then λ = λ_max(σ^{-1/2} ρ σ^{-1/2}).
  std::vector<Eigen::Index> support;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev(i) > cutoff) support.push_back(i);
  const ComplexMatrix rho_eig = es.eigenvectors().adjoint() * rho * es.eigenvectors();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) > cutoff) continue;
    if (std::abs(rho_eig(i, i)) > 1e-10) return std::numeric_limits<double>::infinity();
  }
  const auto k = static_cast<Eigen::Index>(support.size());
  ComplexMatrix m(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j)
      m(i, j) = rho_eig(support[i], support[j]) / std::sqrt(ev(support[i]) * ev(support[j]));
  return std::log2(max_eigenvalue(hermitian_part(m)));
}

double check_minentropy_relation(const Instrument& channel, const sdp::SolveOptions& options) {
  if (channel.size() != 1) throw InvalidInstrumentError("check_minentropy_relation: single-outcome instrument required");
  const double f = entangled_fraction(channel, options).f_plus;
  const double h = min_entropy(channel.choi(0), channel.shape(), options);
  return std::abs(std::log2(static_cast<double>(channel.d_in()) * f) + h);
}

PovmRobustness povm_robustness(const Povm& povm, bool with_sdp, const sdp::SolveOptions& options) {
  if (const auto report = validate(povm); !report) throw InvalidInstrumentError("povm_robustness: " + report.to_string());
  PovmRobustness out;
  out.closed_form = -1.0;
  for (const auto& e : povm.effects) out.closed_form += operator_norm(hermitian_part(e));
  if (with_sdp) out.sdp_value = robustness_dual(from_povm(povm), options).value;
  return out;
}

}  // namespace irt
