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

#include <algorithm>
#include <cmath>
#include <limits>

#include "irt/parallel.hpp"

namespace irt {

namespace {

using sdp::HermitianExpr;
using sdp::ScalarExpr;

Eigen::Index idx(std::size_t v) { return static_cast<Eigen::Index>(v); }

constexpr std::size_t kChunk = 4096;

void check_effect(const ComplexMatrix& m, std::size_t side, const std::string& where, ValidationReport& report) {
  if (m.rows() != idx(side) || m.cols() != idx(side)) {
    report.issues.push_back({"effect dimension mismatch", where, 0.0});
    return;
  }
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

void require_matching(const Instrument& inst, const DiscriminationStrategy& strat, const char* what) {
  if (strat.shape != inst.shape()) throw DimensionError(std::string(what) + ": strategy shape does not match instrument");
  if (strat.size() != inst.size()) {
    throw DimensionError(std::string(what) + ": strategy has " + std::to_string(strat.size()) +
                         " effects, instrument has " + std::to_string(inst.size()) + " outcomes");
  }
  for (const auto& q : strat.effects) {
    if (q.rows() != idx(inst.shape().total())) throw DimensionError(std::string(what) + ": effect dimension");
  }
}

// Clip the small negative eigenvalues solver output carries.
ComplexMatrix psd_part(const ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(m));
  const RealVector ev = es.eigenvalues().cwiseMax(0.0);
  return hermitian_part(es.eigenvectors() * ev.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint());
}

sdp::Solution require_optimal(const sdp::Problem& p, const sdp::SolveOptions& options, const char* what) {
  sdp::Solution s = p.solve(options);
  if (!s.optimal()) {
    throw sdp::SolverError(std::string(what) + ": solver returned " + sdp::to_string(s.status), s.status);
  }
  return s;
}

struct Moments {
  double n = 0.0;
  double mean = 0.0;
  double m2 = 0.0;
};

Moments merge(const Moments& a, const Moments& b) {
  if (a.n == 0.0) return b;
  if (b.n == 0.0) return a;
  Moments out;
  out.n = a.n + b.n;
  const double delta = b.mean - a.mean;
  out.mean = a.mean + delta * b.n / out.n;
  out.m2 = a.m2 + b.m2 + delta * delta * a.n * b.n / out.n;
  return out;
}

}  // namespace

ValidationReport validate(const DiscriminationStrategy& strat) {
  ValidationReport report;
  const std::size_t side = strat.shape.total();
  if (!strat.labels.empty() && strat.labels.size() != strat.effects.size()) {
    report.issues.push_back({"label count mismatch", "", 0.0});
  }
  ComplexMatrix sum = zeros(side, side);
  bool shapes_ok = true;
  for (std::size_t m = 0; m < strat.effects.size(); ++m) {
    const std::string where = m < strat.labels.size() ? strat.labels[m] : std::to_string(m);
    check_effect(strat.effects[m], side, where, report);
    if (strat.effects[m].rows() == idx(side) && strat.effects[m].cols() == idx(side)) {
      sum += strat.effects[m];
    } else {
      shapes_ok = false;
    }
  }
  check_effect(strat.inconclusive, side, "inconclusive", report);
  if (strat.inconclusive.rows() != idx(side) || strat.inconclusive.cols() != idx(side)) shapes_ok = false;
  if (shapes_ok && sum.allFinite() && strat.inconclusive.allFinite()) {
    const double residual = (sum + strat.inconclusive - identity(side)).cwiseAbs().maxCoeff();
    if (residual > kNormalizationTol) report.issues.push_back({"effects do not sum to identity", "", residual});
  }
  return report;
}

DiscriminationStrategy make_strategy(BipartiteShape shape, std::vector<ComplexMatrix> effects,
                                     std::vector<std::string> labels) {
  const std::size_t side = shape.total();
  if (labels.empty()) {
    for (std::size_t m = 0; m < effects.size(); ++m) labels.push_back(std::to_string(m));
  }
  if (labels.size() != effects.size()) throw DimensionError("make_strategy: label count does not match effects");
  ComplexMatrix rest = identity(side);
  for (const auto& q : effects) {
    if (q.rows() != idx(side) || q.cols() != idx(side)) throw DimensionError("make_strategy: effect dimension");
    rest -= q;
  }
  return {shape, std::move(labels), std::move(effects), hermitian_part(rest)};
}

DiscriminationStrategy bell_strategy() {
  const Instrument pauli = pauli_mixture();
  std::vector<ComplexMatrix> effects;
  // J_a of the Pauli mixture is a quarter of the matching Bell projector.
  for (const auto& j : pauli.chois()) effects.push_back(4.0 * j);
  DiscriminationStrategy s = make_strategy(pauli.shape(), std::move(effects), pauli.labels());
  s.inconclusive = zeros(4, 4);
  return s;
}

DiscriminationStrategy random_strategy(BipartiteShape shape, std::size_t outcomes, CounterRng& rng) {
  const std::size_t side = shape.total();
  std::vector<ComplexMatrix> raw;
  ComplexMatrix sum = zeros(side, side);
  for (std::size_t m = 0; m <= outcomes; ++m) {
    raw.push_back(random_psd(side, rng));
    sum += raw.back();
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(sum));
  const RealVector inv_root = es.eigenvalues().cwiseSqrt().cwiseInverse();
  const ComplexMatrix s = es.eigenvectors() * inv_root.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
  DiscriminationStrategy strat;
  strat.shape = shape;
  for (std::size_t m = 0; m < outcomes; ++m) {
    strat.labels.push_back(std::to_string(m));
    strat.effects.push_back(hermitian_part(s * raw[m] * s));
  }
  strat.inconclusive = hermitian_part(s * raw[outcomes] * s);
  return strat;
}

AverageFidelity average_fidelity_formula(const Instrument& inst, const sdp::SolveOptions& options) {
  const double d = static_cast<double>(inst.d_in());
  AverageFidelity out;
  out.robustness = robustness_dual(inst, options).value;
  out.f_plus = entangled_fraction(inst, options).f_plus;
  out.from_robustness = (1.0 + out.robustness / (d + 1.0)) / d;
  out.from_fplus = (1.0 + d * out.f_plus) / (d + 1.0);
  return out;
}

FidelityEstimate average_fidelity_monte_carlo(const Instrument& inst, const std::vector<ComplexMatrix>& recovery,
                                              std::size_t samples, std::uint64_t seed) {
  if (samples == 0) throw std::invalid_argument("average_fidelity_monte_carlo: samples must be positive");
  if (recovery.size() != inst.size()) throw DimensionError("average_fidelity_monte_carlo: one recovery per outcome");
  const std::size_t da = inst.d_in(), db = inst.d_out();
  const BipartiteShape back{db, da};
  ComplexMatrix round_trip = zeros(da * da, da * da);
  for (std::size_t a = 0; a < inst.size(); ++a) {
    if (recovery[a].rows() != idx(da * db) || recovery[a].cols() != idx(da * db)) {
      throw DimensionError("average_fidelity_monte_carlo: recovery Choi must be (d_B d_A)-dimensional");
    }
    round_trip += compose_choi(inst.choi(a), inst.shape(), recovery[a], back);
  }
  const BipartiteShape loop{da, da};

  const std::size_t chunks = (samples + kChunk - 1) / kChunk;
  std::vector<Moments> parts(chunks);
  const CounterRng root(seed);
  parallel_for(chunks, [&](std::size_t c) {
    CounterRng rng = root.split(c);
    const std::size_t n = std::min(kChunk, samples - c * kChunk);
    Moments m;
    for (std::size_t i = 0; i < n; ++i) {
      const ComplexVector psi = haar_random_ket(da, rng);
      const ComplexMatrix out = apply_choi(round_trip, projector(psi), loop);
      const double f = (psi.adjoint() * out * psi)(0, 0).real();
      m.n += 1.0;
      const double delta = f - m.mean;
      m.mean += delta / m.n;
      m.m2 += delta * (f - m.mean);
    }
    parts[c] = m;
  });
  Moments total;
  for (const auto& p : parts) total = merge(total, p);
  FidelityEstimate est;
  est.mean = total.mean;
  est.samples = samples;
  est.std_error = samples > 1 ? std::sqrt(std::max(0.0, total.m2 / (total.n - 1.0)) / total.n) : 0.0;
  return est;
}

double p_succ(const Instrument& inst, const DiscriminationStrategy& strat) {
  require_matching(inst, strat, "p_succ");
  double p = 0.0;
  for (std::size_t a = 0; a < inst.size(); ++a) p += (strat.effects[a] * inst.choi(a)).trace().real();
  return p;
}

double unambiguity_residual(const Instrument& inst, const DiscriminationStrategy& strat) {
  require_matching(inst, strat, "unambiguity_residual");
  double worst = 0.0;
  for (std::size_t m = 0; m < strat.size(); ++m) {
    for (std::size_t a = 0; a < inst.size(); ++a) {
      if (a != m) worst = std::max(worst, (strat.effects[m] * inst.choi(a)).trace().real());
    }
  }
  return worst;
}

double beta_noninteractive(const std::vector<ComplexMatrix>& effects, BipartiteShape shape) {
  double best = 0.0;
  for (const auto& q : effects) {
    if (q.rows() != idx(shape.total())) throw DimensionError("beta_noninteractive: effect dimension");
    best = std::max(best, max_eigenvalue(hermitian_part(partial_trace(q, shape, Factor::first))));
  }
  return best / static_cast<double>(shape.d_a);
}

double beta_noninteractive(const DiscriminationStrategy& strat) {
  return beta_noninteractive(strat.effects, strat.shape);
}

NonInteractiveModel best_noninteractive_response(const DiscriminationStrategy& strat) {
  const std::size_t n = strat.size(), db = strat.shape.d_b;
  if (n == 0) throw DimensionError("best_noninteractive_response: empty strategy");
  std::size_t arg = 0;
  double best = -std::numeric_limits<double>::infinity();
  ComplexVector top;
  for (std::size_t a = 0; a < n; ++a) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(
        hermitian_part(partial_trace(strat.effects[a], strat.shape, Factor::first)));
    const double lmax = es.eigenvalues()(idx(db) - 1);
    if (lmax > best) {
      best = lmax;
      arg = a;
      top = es.eigenvectors().col(idx(db) - 1);
    }
  }
  NonInteractiveModel model;
  model.labels = strat.labels;
  for (std::size_t a = 0; a < n; ++a) {
    model.r.push_back(a == arg ? 1.0 : 0.0);
    // Unweighted outcomes still need a state.
    model.tau.push_back(a == arg ? projector(top) : ComplexMatrix(identity(db) / static_cast<double>(db)));
  }
  return model;
}

double beta_noninteractive_sdp(const std::vector<ComplexMatrix>& effects, BipartiteShape shape,
                               const sdp::SolveOptions& options) {
  const std::size_t da = shape.d_a, db = shape.d_b;
  const ComplexMatrix mixed = identity(da) / static_cast<double>(da);
  sdp::Problem p;
  ScalarExpr objective, total;
  for (std::size_t a = 0; a < effects.size(); ++a) {
    if (effects[a].rows() != idx(shape.total())) throw DimensionError("beta_noninteractive_sdp: effect dimension");
    const sdp::VarId t = p.add_psd_variable(db, "T" + std::to_string(a));
    objective += ScalarExpr::trace(t, hermitian_part(effects[a]),
                                   [mixed](const ComplexMatrix& m) { return tensor(mixed, m); });
    total += ScalarExpr::trace(t, identity(db));
  }
  p.add_equality(total, 1.0);
  p.set_objective(sdp::Sense::maximize, objective);
  return require_optimal(p, options, "beta_noninteractive_sdp").value;
}

DiscriminationStrategy strategy_from_dual(const std::vector<ComplexMatrix>& omegas, BipartiteShape shape,
                                          std::vector<std::string> labels) {
  const std::size_t side = shape.total();
  std::vector<ComplexMatrix> clipped;
  ComplexMatrix sum = zeros(side, side);
  for (const auto& w : omegas) {
    if (w.rows() != idx(side) || w.cols() != idx(side)) throw DimensionError("strategy_from_dual: omega dimension");
    clipped.push_back(psd_part(w));
    sum += clipped.back();
  }
  const double norm = operator_norm(hermitian_part(sum));
  if (!(norm > 1e-12)) throw DegenerateCertificateError("strategy_from_dual: dual variables vanish");
  for (auto& q : clipped) q /= norm;
  return make_strategy(shape, std::move(clipped), std::move(labels));
}

CertificateStrategyCheck check_certificate_strategy(const Instrument& inst, const sdp::SolveOptions& options) {
  const RobustnessCertificate cert = robustness_dual(inst, options);
  CertificateStrategyCheck out;
  out.robustness = cert.value;
  out.strategy = strategy_from_dual(cert.omega, inst.shape(), inst.labels());
  out.p_succ = p_succ(inst, out.strategy);
  out.beta = beta_noninteractive(out.strategy);
  if (!(out.beta > 0.0)) throw DegenerateCertificateError("check_certificate_strategy: strategy has zero benchmark");
  out.ratio = out.p_succ / out.beta;
  out.residual = std::abs(out.ratio - cert.one_plus_r());
  return out;
}

std::pair<bool, bool> check_marginal_bound(const std::vector<ComplexMatrix>& omegas, BipartiteShape shape,
                                   const sdp::SolveOptions& options) {
  constexpr double slack = 1e-7;
  const double da = static_cast<double>(shape.d_a);
  bool marginal = true;
  for (const auto& w : omegas) {
    if (w.rows() != idx(shape.total())) throw DimensionError("check_marginal_bound: omega dimension");
    const ComplexMatrix gap = da * identity(shape.d_b) - partial_trace(hermitian_part(w), shape, Factor::first);
    if (min_eigenvalue(hermitian_part(gap)) < -slack * da) marginal = false;
  }
  const bool bounded = beta_noninteractive_sdp(omegas, shape, options) <= 1.0 + slack;
  return {marginal, bounded};
}

}  // namespace irt
