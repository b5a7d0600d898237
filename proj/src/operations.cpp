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

#include "irt/operations.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "irt/parallel.hpp"
#include "irt/robustness.hpp"

namespace irt {

namespace {

using sdp::HermitianExpr;
using sdp::ScalarExpr;

Eigen::Index idx(std::size_t v) { return static_cast<Eigen::Index>(v); }

constexpr double kStochasticTol = 1e-12;
constexpr double kChannelTol = 1e-9;

// Nearest-ish valid channel: clip the spectrum, then rescale the input side so
// the marginal is exactly I/d_A.
ComplexMatrix project_channel(const ComplexMatrix& choi, BipartiteShape shape) {
  const double n = static_cast<double>(shape.total());
  ComplexMatrix c = hermitian_part(choi);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(c);
  const RealVector ev = es.eigenvalues().cwiseMax(0.0);
  c = es.eigenvectors() * ev.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
  c = (1.0 - 1e-13) * c + 1e-13 * identity(shape.total()) / n;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> marg(hermitian_part(partial_trace(c, shape, Factor::second)));
  const RealVector scale =
      (marg.eigenvalues() * static_cast<double>(shape.d_a)).cwiseSqrt().cwiseInverse();
  const ComplexMatrix s = marg.eigenvectors() * scale.cast<Complex>().asDiagonal() * marg.eigenvectors().adjoint();
  const ComplexMatrix lift = tensor(s, identity(shape.d_b));
  return hermitian_part(lift * c * lift);
}

RealMatrix project_stochastic(const RealMatrix& m) {
  RealMatrix out = m.cwiseMax(0.0);
  for (Eigen::Index k = 0; k < out.rows(); ++k) {
    const double sum = out.row(k).sum();
    if (sum > 0.0) {
      out.row(k) /= sum;
    } else {
      out.row(k).setConstant(1.0 / static_cast<double>(out.cols()));
    }
  }
  return out;
}

RealMatrix round_stochastic(const RealMatrix& m) {
  RealMatrix out = RealMatrix::Zero(m.rows(), m.cols());
  for (Eigen::Index k = 0; k < m.rows(); ++k) {
    Eigen::Index best = 0;
    m.row(k).maxCoeff(&best);
    out(k, best) = 1.0;
  }
  return out;
}

RealMatrix modular_map(std::size_t in, std::size_t out) {
  RealMatrix p = RealMatrix::Zero(idx(in), idx(out));
  for (std::size_t k = 0; k < in; ++k) p(idx(k), idx(k % out)) = 1.0;
  return p;
}

std::vector<std::string> default_labels(std::size_t n) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
  return labels;
}

// Single-branch operation under optimisation.
struct Branch {
  ComplexMatrix pre;
  std::vector<ComplexMatrix> post;
  RealMatrix map;

  AllowedOperation to_operation() const { return {{{1.0, pre, post, map}}, {}}; }
};

Branch identity_branch(BipartiteShape shape, std::size_t in, std::size_t out) {
  return {identity_channel_choi(shape.d_a), std::vector<ComplexMatrix>(in, identity_channel_choi(shape.d_b)),
          modular_map(in, out)};
}

Branch random_branch(BipartiteShape shape, std::size_t in, std::size_t out, CounterRng& rng) {
  Branch b;
  b.pre = random_channel_choi(shape.d_a, shape.d_a, rng);
  for (std::size_t k = 0; k < in; ++k) b.post.push_back(random_channel_choi(shape.d_b, shape.d_b, rng));
  b.map = RealMatrix::Zero(idx(in), idx(out));
  for (std::size_t k = 0; k < in; ++k) b.map(idx(k), idx(rng.below(out))) = 1.0;
  return b;
}

// Choi of E_k ∘ P for every k.
std::vector<ComplexMatrix> after_pre(const Instrument& inst, const ComplexMatrix& pre) {
  const BipartiteShape pre_shape{inst.d_in(), inst.d_in()};
  std::vector<ComplexMatrix> out;
  for (const auto& j : inst.chois()) out.push_back(compose_choi(pre, pre_shape, j, inst.shape()));
  return out;
}

// Choi of D_k ∘ E_k for every k.
std::vector<ComplexMatrix> before_post(const Instrument& inst, const std::vector<ComplexMatrix>& post) {
  const BipartiteShape post_shape{inst.d_out(), inst.d_out()};
  std::vector<ComplexMatrix> out;
  for (std::size_t k = 0; k < inst.size(); ++k) out.push_back(compose_choi(inst.choi(k), inst.shape(), post[k], post_shape));
  return out;
}

// Choi of D_k ∘ E_k ∘ P for every k.
std::vector<ComplexMatrix> branch_maps(const Instrument& inst, const Branch& b) {
  const BipartiteShape post_shape{inst.d_out(), inst.d_out()};
  std::vector<ComplexMatrix> mid = after_pre(inst, b.pre);
  for (std::size_t k = 0; k < mid.size(); ++k) mid[k] = compose_choi(mid[k], inst.shape(), b.post[k], post_shape);
  return mid;
}

std::vector<ComplexMatrix> branch_outputs(const Instrument& inst, const Branch& b) {
  const std::vector<ComplexMatrix> maps = branch_maps(inst, b);
  const std::size_t side = inst.shape().total();
  std::vector<ComplexMatrix> out(static_cast<std::size_t>(b.map.cols()), zeros(side, side));
  for (std::size_t k = 0; k < maps.size(); ++k) {
    for (Eigen::Index a = 0; a < b.map.cols(); ++a) {
      if (b.map(idx(k), a) != 0.0) out[static_cast<std::size_t>(a)] += b.map(idx(k), a) * maps[k];
    }
  }
  return out;
}

double strategy_value(const Instrument& inst, const Branch& b, const DiscriminationStrategy& strat) {
  const auto outs = branch_outputs(inst, b);
  double v = 0.0;
  for (std::size_t a = 0; a < outs.size(); ++a) v += (strat.effects[a] * outs[a]).trace().real();
  return v;
}

double branch_residual(const Instrument& source, const Branch& b, const Instrument& target) {
  const auto outs = branch_outputs(source, b);
  double r = 0.0;
  for (std::size_t a = 0; a < outs.size(); ++a) r += trace_norm(hermitian_part(outs[a] - target.choi(a)));
  return r;
}

sdp::VarId add_channel(sdp::Problem& p, BipartiteShape shape, const std::string& name) {
  const sdp::VarId v = p.add_psd_variable(shape.total(), name);
  p.add_equality(HermitianExpr::mapped(v, shape.d_a,
                                       [shape](const ComplexMatrix& c) {
                                         return partial_trace(c, shape, Factor::second);
                                       }),
                 identity(shape.d_a) / static_cast<double>(shape.d_a));
  return v;
}

// min Σ_a ‖outs_a − target_a‖₁ through outs_a − target_a = P_a − N_a.
ScalarExpr add_trace_norm_objective(sdp::Problem& p, const std::vector<HermitianExpr>& outs, const Instrument& target) {
  const std::size_t side = target.shape().total();
  ScalarExpr objective;
  for (std::size_t a = 0; a < outs.size(); ++a) {
    const sdp::VarId pos = p.add_psd_variable(side, "pos" + std::to_string(a));
    const sdp::VarId neg = p.add_psd_variable(side, "neg" + std::to_string(a));
    p.add_equality(outs[a] - HermitianExpr::of(pos, side) + HermitianExpr::of(neg, side), target.choi(a));
    objective += ScalarExpr::trace(pos, identity(side)) + ScalarExpr::trace(neg, identity(side));
  }
  return objective;
}

// --- trace-norm block updates. Each returns false when the SDP failed.

bool update_map(const Instrument& source, const Instrument& target, Branch& b, const sdp::SolveOptions& opt) {
  const std::size_t in = source.size(), out = target.size(), side = source.shape().total();
  const std::vector<ComplexMatrix> maps = branch_maps(source, b);
  sdp::Problem p;
  std::vector<std::vector<sdp::VarId>> vars(in);
  std::vector<HermitianExpr> outs(out, HermitianExpr(side));
  for (std::size_t k = 0; k < in; ++k) {
    ScalarExpr row;
    for (std::size_t a = 0; a < out; ++a) {
      vars[k].push_back(p.add_psd_variable(1));
      const ComplexMatrix m = maps[k];
      outs[a] += HermitianExpr::mapped(vars[k][a], side, [m](const ComplexMatrix& x) { return ComplexMatrix(x(0, 0) * m); });
      row += ScalarExpr::trace(vars[k][a], identity(1));
    }
    p.add_equality(row, 1.0);
  }
  p.set_objective(sdp::Sense::minimize, add_trace_norm_objective(p, outs, target));
  const sdp::Solution s = p.solve(opt);
  if (!s.optimal()) return false;
  RealMatrix m(idx(in), idx(out));
  for (std::size_t k = 0; k < in; ++k)
    for (std::size_t a = 0; a < out; ++a) m(idx(k), idx(a)) = s[vars[k][a]](0, 0).real();
  b.map = project_stochastic(m);
  return true;
}

bool update_post(const Instrument& source, const Instrument& target, Branch& b, const sdp::SolveOptions& opt) {
  const std::size_t in = source.size(), out = target.size(), side = source.shape().total();
  const std::size_t da = source.d_in(), db = source.d_out();
  const BipartiteShape post_shape{db, db};
  const std::vector<ComplexMatrix> mid = after_pre(source, b.pre);
  sdp::Problem p;
  std::vector<sdp::VarId> post;
  std::vector<HermitianExpr> outs(out, HermitianExpr(side));
  for (std::size_t k = 0; k < in; ++k) {
    post.push_back(add_channel(p, post_shape, "post" + std::to_string(k)));
    const ComplexMatrix m = mid[k];
    for (std::size_t a = 0; a < out; ++a) {
      const double w = b.map(idx(k), idx(a));
      if (w == 0.0) continue;
      outs[a] += w * HermitianExpr::mapped(post[k], side, [m, post_shape, da](const ComplexMatrix& d) {
        return apply_choi_second(d, post_shape, m, da);
      });
    }
  }
  p.set_objective(sdp::Sense::minimize, add_trace_norm_objective(p, outs, target));
  const sdp::Solution s = p.solve(opt);
  if (!s.optimal()) return false;
  for (std::size_t k = 0; k < in; ++k) b.post[k] = project_channel(s[post[k]], post_shape);
  return true;
}

bool update_pre(const Instrument& source, const Instrument& target, Branch& b, const sdp::SolveOptions& opt) {
  const std::size_t in = source.size(), out = target.size(), side = source.shape().total();
  const std::size_t da = source.d_in();
  const BipartiteShape pre_shape{da, da};
  const std::vector<ComplexMatrix> tail = before_post(source, b.post);
  sdp::Problem p;
  const sdp::VarId pre = add_channel(p, pre_shape, "pre");
  std::vector<HermitianExpr> outs;
  for (std::size_t a = 0; a < out; ++a) {
    ComplexMatrix m = zeros(side, side);
    for (std::size_t k = 0; k < in; ++k) m += b.map(idx(k), idx(a)) * tail[k];
    const BipartiteShape shape = source.shape();
    outs.push_back(HermitianExpr::mapped(pre, side, [m, shape, da](const ComplexMatrix& c) {
      return apply_choi_second(m, shape, c, da);
    }));
  }
  p.set_objective(sdp::Sense::minimize, add_trace_norm_objective(p, outs, target));
  const sdp::Solution s = p.solve(opt);
  if (!s.optimal()) return false;
  b.pre = project_channel(s[pre], pre_shape);
  return true;
}

struct Chain {
  Branch branch;
  double residual = std::numeric_limits<double>::infinity();
};

Chain run_conversion_chain(const Instrument& source, const Instrument& target, Branch start,
                           const ConvertConfig& config) {
  Chain best{start, branch_residual(source, start, target)};
  auto consider = [&](const Branch& candidate) {
    const double r = branch_residual(source, candidate, target);
    if (r < best.residual) best = {candidate, r};
  };
  for (int iter = 0; iter < config.max_iters && best.residual > config.tol; ++iter) {
    const double before = best.residual;
    Branch b = best.branch;
    if (update_map(source, target, b, config.sdp)) {
      consider(b);
      Branch rounded = b;
      rounded.map = round_stochastic(b.map);
      consider(rounded);
    }
    if (best.residual <= config.tol) break;
    b = best.branch;
    if (update_post(source, target, b, config.sdp)) consider(b);
    if (best.residual <= config.tol) break;
    b = best.branch;
    if (update_pre(source, target, b, config.sdp)) consider(b);
    if (before - best.residual < 1e-10) break;
  }
  return best;
}

void require_op_fits(const AllowedOperation& op, const Instrument& inst) {
  if (const auto report = validate(op, inst.shape()); !report) {
    throw InvalidOperationError("apply_operation: " + report.to_string());
  }
  if (op.input_outcomes() != inst.size()) {
    throw DimensionError("apply_operation: operation expects " + std::to_string(op.input_outcomes()) +
                         " outcomes, instrument has " + std::to_string(inst.size()));
  }
}

}  // namespace

std::size_t AllowedOperation::input_outcomes() const {
  return branches.empty() ? 0 : static_cast<std::size_t>(branches.front().classical_map.rows());
}

std::size_t AllowedOperation::output_outcomes() const {
  return branches.empty() ? 0 : static_cast<std::size_t>(branches.front().classical_map.cols());
}

ValidationReport validate(const AllowedOperation& op, BipartiteShape shape) {
  ValidationReport report;
  if (op.branches.empty()) {
    report.issues.push_back({"no branches", "", 0.0});
    return report;
  }
  const std::size_t in = op.input_outcomes(), out = op.output_outcomes();
  if (out == 0) report.issues.push_back({"no output outcomes", "", 0.0});
  if (!op.output_labels.empty() && op.output_labels.size() != out) {
    report.issues.push_back({"label count mismatch", "", 0.0});
  }
  double total = 0.0;
  for (std::size_t l = 0; l < op.branches.size(); ++l) {
    const auto& b = op.branches[l];
    const std::string where = "branch " + std::to_string(l);
    if (!(b.weight >= 0.0)) report.issues.push_back({"negative weight", where, -b.weight});
    total += b.weight;
    if (b.pre_choi.rows() != idx(shape.d_a * shape.d_a) || b.pre_choi.cols() != b.pre_choi.rows()) {
      report.issues.push_back({"pre-channel dimension mismatch", where, 0.0});
    } else if (const double v = channel_choi_violation(b.pre_choi, {shape.d_a, shape.d_a}); !(v <= kChannelTol)) {
      report.issues.push_back({"pre-channel not a channel", where, v});
    }
    if (static_cast<std::size_t>(b.classical_map.rows()) != in ||
        static_cast<std::size_t>(b.classical_map.cols()) != out) {
      report.issues.push_back({"classical map dimension mismatch", where, 0.0});
      continue;
    }
    if (b.post_chois.size() != in) {
      report.issues.push_back({"post-channel count mismatch", where, 0.0});
    } else {
      for (std::size_t k = 0; k < in; ++k) {
        const auto& d = b.post_chois[k];
        const std::string at = where + " post " + std::to_string(k);
        if (d.rows() != idx(shape.d_b * shape.d_b) || d.cols() != d.rows()) {
          report.issues.push_back({"post-channel dimension mismatch", at, 0.0});
        } else if (const double v = channel_choi_violation(d, {shape.d_b, shape.d_b}); !(v <= kChannelTol)) {
          report.issues.push_back({"post-channel not a channel", at, v});
        }
      }
    }
    const double neg = b.classical_map.size() ? -b.classical_map.minCoeff() : 0.0;
    if (!b.classical_map.allFinite() || neg > kStochasticTol) {
      report.issues.push_back({"classical map not stochastic", where, std::max(neg, 0.0)});
    } else if (in > 0) {
      const double row_err = (b.classical_map.rowwise().sum().array() - 1.0).abs().maxCoeff();
      if (row_err > kStochasticTol) report.issues.push_back({"classical map not stochastic", where, row_err});
    }
  }
  if (std::abs(total - 1.0) > kStochasticTol) report.issues.push_back({"weights do not sum to one", "", std::abs(total - 1.0)});
  return report;
}

AllowedOperation identity_operation(BipartiteShape shape, std::size_t input_outcomes, std::size_t output_outcomes) {
  if (output_outcomes == 0) output_outcomes = input_outcomes;
  if (input_outcomes == 0) throw DimensionError("identity_operation: no outcomes");
  return identity_branch(shape, input_outcomes, output_outcomes).to_operation();
}

AllowedOperation classical_operation(BipartiteShape shape, const std::vector<std::size_t>& assignment,
                                     std::size_t output_outcomes) {
  Branch b = identity_branch(shape, assignment.size(), output_outcomes);
  b.map.setZero();
  for (std::size_t k = 0; k < assignment.size(); ++k) {
    if (assignment[k] >= output_outcomes) throw DimensionError("classical_operation: assignment out of range");
    b.map(idx(k), idx(assignment[k])) = 1.0;
  }
  return b.to_operation();
}

AllowedOperation random_allowed_operation(BipartiteShape shape, std::size_t input_outcomes,
                                          std::size_t output_outcomes, CounterRng& rng, std::size_t branches) {
  if (branches == 0 || input_outcomes == 0 || output_outcomes == 0) {
    throw DimensionError("random_allowed_operation: counts must be positive");
  }
  AllowedOperation op;
  const std::vector<double> q = random_distribution(branches, rng);
  for (std::size_t l = 0; l < branches; ++l) {
    OperationBranch b;
    b.weight = q[l];
    b.pre_choi = random_channel_choi(shape.d_a, shape.d_a, rng);
    for (std::size_t k = 0; k < input_outcomes; ++k) {
      b.post_chois.push_back(random_channel_choi(shape.d_b, shape.d_b, rng));
    }
    b.classical_map.resize(idx(input_outcomes), idx(output_outcomes));
    for (std::size_t k = 0; k < input_outcomes; ++k) {
      const std::vector<double> row = random_distribution(output_outcomes, rng);
      for (std::size_t a = 0; a < output_outcomes; ++a) b.classical_map(idx(k), idx(a)) = row[a];
    }
    op.branches.push_back(std::move(b));
  }
  return op;
}

Instrument apply_operation(const AllowedOperation& op, const Instrument& inst) {
  require_op_fits(op, inst);
  const std::size_t side = inst.shape().total(), out = op.output_outcomes();
  std::vector<ComplexMatrix> chois(out, zeros(side, side));
  for (const auto& ob : op.branches) {
    const Branch b{ob.pre_choi, ob.post_chois, ob.classical_map};
    const auto outs = branch_outputs(inst, b);
    for (std::size_t a = 0; a < out; ++a) chois[a] += ob.weight * outs[a];
  }
  const std::vector<std::string> labels = op.output_labels.empty() ? default_labels(out) : op.output_labels;
  std::vector<Outcome> outcomes;
  for (std::size_t a = 0; a < out; ++a) outcomes.push_back({labels[a], hermitian_part(chois[a])});
  return Instrument(inst.shape(), std::move(outcomes));
}

std::pair<double, double> monotonicity_check(const AllowedOperation& op, const Instrument& inst,
                                             const sdp::SolveOptions& options) {
  const Instrument image = apply_operation(op, inst);
  return {robustness_dual(inst, options).value, robustness_dual(image, options).value};
}

SeesawResult p_max_seesaw(const Instrument& inst, const DiscriminationStrategy& strat, const SeesawOptions& options) {
  if (strat.shape != inst.shape()) throw DimensionError("p_max_seesaw: strategy shape does not match instrument");
  if (strat.size() == 0) throw DimensionError("p_max_seesaw: empty strategy");
  const std::size_t in = inst.size(), out = strat.size();
  const std::size_t da = inst.d_in(), db = inst.d_out();
  const BipartiteShape post_shape{db, db}, pre_shape{da, da};

  Branch best = identity_branch(inst.shape(), in, out);
  double value = strategy_value(inst, best, strat);
  SeesawResult result;
  result.history.push_back(value);
  auto fail = [&](const char* step, sdp::Status status) {
    result.warning = true;
    result.message = std::string(step) + " step: solver returned " + sdp::to_string(status);
  };

  for (int iter = 0; iter < options.max_iters && !result.warning; ++iter) {
    const double sweep_start = value;

    // Post step: exact best (channel, target outcome) per intermediate outcome.
    {
      const std::vector<ComplexMatrix> mid = after_pre(inst, best.pre);
      Branch b = best;
      b.map.setZero();
      for (std::size_t k = 0; k < in && !result.warning; ++k) {
        double top = -std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < out; ++a) {
          sdp::Problem p;
          const sdp::VarId d = add_channel(p, post_shape, "post");
          const ComplexMatrix m = mid[k];
          p.set_objective(sdp::Sense::maximize,
                          ScalarExpr::trace(d, strat.effects[a], [m, post_shape, da](const ComplexMatrix& x) {
                            return apply_choi_second(x, post_shape, m, da);
                          }));
          const sdp::Solution s = p.solve(options.sdp);
          if (!s.optimal()) {
            fail("post", s.status);
            break;
          }
          if (s.value > top + 1e-12) {
            top = s.value;
            b.post[k] = project_channel(s[d], post_shape);
            b.map.row(idx(k)).setZero();
            b.map(idx(k), idx(a)) = 1.0;
          }
        }
      }
      if (result.warning) break;
      const double v = strategy_value(inst, b, strat);
      if (v > value) {
        value = v;
        best = b;
      }
      result.history.push_back(value);
    }

    // Pre step.
    {
      const std::vector<ComplexMatrix> tail = before_post(inst, best.post);
      sdp::Problem p;
      const sdp::VarId pre = add_channel(p, pre_shape, "pre");
      ScalarExpr objective;
      const BipartiteShape shape = inst.shape();
      for (std::size_t k = 0; k < in; ++k) {
        ComplexMatrix w = zeros(shape.total(), shape.total());
        for (std::size_t a = 0; a < out; ++a) w += best.map(idx(k), idx(a)) * strat.effects[a];
        const ComplexMatrix m = tail[k];
        objective += ScalarExpr::trace(pre, hermitian_part(w), [m, shape, da](const ComplexMatrix& c) {
          return apply_choi_second(m, shape, c, da);
        });
      }
      p.set_objective(sdp::Sense::maximize, objective);
      const sdp::Solution s = p.solve(options.sdp);
      if (!s.optimal()) {
        fail("pre", s.status);
        break;
      }
      Branch b = best;
      b.pre = project_channel(s[pre], pre_shape);
      const double v = strategy_value(inst, b, strat);
      if (v > value) {
        value = v;
        best = b;
      }
      result.history.push_back(value);
    }
    if (value - sweep_start < options.tol) break;
  }
  result.lower_bound = value;
  result.op = best.to_operation();
  result.op.output_labels = strat.labels;
  return result;
}

double p_max_upper_bound(const Instrument& inst, const DiscriminationStrategy& strat, const sdp::SolveOptions& options) {
  if (strat.shape != inst.shape()) throw DimensionError("p_max_upper_bound: strategy shape does not match instrument");
  return (1.0 + robustness_dual(inst, options).value) * beta_noninteractive(strat);
}

std::string to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::converted:
      return "converted";
    case Verdict::impossible:
      return "impossible";
    case Verdict::undetermined:
      return "undetermined";
  }
  return "undetermined";
}

void ConvertConfig::check() const {
  if (!(tol > 0.0)) throw std::invalid_argument("convert: tol must be positive");
  if (restarts < 0) throw std::invalid_argument("convert: restarts must be non-negative");
  if (max_iters < 1) throw std::invalid_argument("convert: max_iters must be at least 1");
  if (!(margin >= 0.0)) throw std::invalid_argument("convert: margin must be non-negative");
  if (!(sdp.tol > 0.0)) throw std::invalid_argument("convert: solver tolerance must be positive");
}

double conversion_residual(const AllowedOperation& op, const Instrument& source, const Instrument& target) {
  const Instrument image = apply_operation(op, source);
  if (image.size() != target.size() || image.shape() != target.shape()) {
    throw DimensionError("conversion_residual: operation output does not match target");
  }
  double r = 0.0;
  for (std::size_t a = 0; a < image.size(); ++a) r += trace_norm(hermitian_part(image.choi(a) - target.choi(a)));
  return r;
}

namespace {

void require_same_dims(const Instrument& source, const Instrument& target) {
  if (source.shape() != target.shape()) throw DimensionError("convert: source and target dimensions differ");
}

}  // namespace

namespace {

Chain identity_chain(const Instrument& source, const Instrument& target, const ConvertConfig& config) {
  return run_conversion_chain(source, target, identity_branch(source.shape(), source.size(), target.size()), config);
}

std::pair<AllowedOperation, double> finish_search(const Instrument& source, const Instrument& target,
                                                  const ConvertConfig& config, Chain first) {
  const std::size_t in = source.size(), out = target.size();
  const std::size_t chains = 1 + static_cast<std::size_t>(config.restarts);
  std::vector<Chain> results(chains);
  results[0] = std::move(first);
  if (results[0].residual > config.tol) {
    const CounterRng root(config.seed);
    parallel_for(chains - 1, [&](std::size_t r) {
      CounterRng rng = root.split(r + 1);
      results[r + 1] = run_conversion_chain(source, target, random_branch(source.shape(), in, out, rng), config);
    });
  }
  std::size_t pick = 0;
  for (std::size_t r = 1; r < chains; ++r)
    if (results[r].residual < results[pick].residual) pick = r;
  AllowedOperation op = results[pick].branch.to_operation();
  op.output_labels = target.labels();
  return {std::move(op), results[pick].residual};
}

}  // namespace

std::pair<AllowedOperation, double> search_conversion(const Instrument& source, const Instrument& target,
                                                      const ConvertConfig& config) {
  config.check();
  require_same_dims(source, target);
  return finish_search(source, target, config, identity_chain(source, target, config));
}

WitnessSearch search_witness(const Instrument& source, const Instrument& target, const ConvertConfig& config) {
  config.check();
  require_same_dims(source, target);
  const double one_plus_r = 1.0 + robustness_dual(source, config.sdp).value;
  SeesawOptions seesaw;
  seesaw.max_iters = config.max_iters;
  seesaw.sdp = config.sdp;

  struct Candidate {
    DiscriminationStrategy strat;
    double lower = 0.0;
    double upper = 0.0;
  };
  auto evaluate = [&](DiscriminationStrategy strat) {
    Candidate c{std::move(strat), 0.0, 0.0};
    c.upper = one_plus_r * beta_noninteractive(c.strat);
    c.lower = p_succ(target, c.strat);
    if (c.lower <= c.upper + config.margin) c.lower = std::max(c.lower, p_max_seesaw(target, c.strat, seesaw).lower_bound);
    return c;
  };

  std::vector<Candidate> candidates;
  try {
    candidates.push_back(evaluate(check_certificate_strategy(target, config.sdp).strategy));
  } catch (const DegenerateCertificateError&) {
  }
  const bool found = !candidates.empty() && candidates.front().lower > candidates.front().upper + config.margin;
  if (!found && config.witness_samples > 0) {
    std::vector<Candidate> sampled(config.witness_samples);
    const CounterRng root = CounterRng(config.seed).split(0x5eed);
    parallel_for(config.witness_samples, [&](std::size_t i) {
      CounterRng rng = root.split(i);
      sampled[i] = evaluate(random_strategy(target.shape(), target.size(), rng));
    });
    for (auto& c : sampled) candidates.push_back(std::move(c));
  }

  WitnessSearch out;
  if (candidates.empty()) return out;
  std::size_t pick = 0;
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    if (candidates[i].lower - candidates[i].upper > candidates[pick].lower - candidates[pick].upper) pick = i;
  }
  out.best = candidates[pick].strat;
  out.lower = candidates[pick].lower;
  out.upper = candidates[pick].upper;
  if (out.lower > out.upper + config.margin) out.witness = out.best;
  return out;
}

ConversionReport convert(const Instrument& source, const Instrument& target, const ConvertConfig& config) {
  config.check();
  require_same_dims(source, target);
  ConversionReport report;
  Instrument padded = target;
  if (target.size() < source.size()) {
    report.padded_outcomes = source.size() - target.size();
    padded = pad_outcomes(target, source.size());
  }

  Chain first = identity_chain(source, padded, config);
  if (first.residual > config.tol) {
    // A separating certificate strategy settles the question without restarts.
    ConvertConfig screen = config;
    screen.witness_samples = 0;
    const WitnessSearch ws = search_witness(source, padded, screen);
    if (ws.witness) {
      report.residual = first.residual;
      report.lower = ws.lower;
      report.upper = ws.upper;
      report.verdict = Verdict::impossible;
      report.witness = ws.witness;
      return report;
    }
  }
  auto [op, residual] = finish_search(source, padded, config, std::move(first));
  report.residual = residual;
  if (residual <= config.tol) {
    report.verdict = Verdict::converted;
    report.certificate = std::move(op);
    try {
      const auto strat = check_certificate_strategy(padded, config.sdp).strategy;
      report.upper = p_max_upper_bound(source, strat, config.sdp);
      report.lower = p_succ(padded, strat);
    } catch (const DegenerateCertificateError&) {
    }
    return report;
  }

  const WitnessSearch ws = search_witness(source, padded, config);
  report.lower = ws.lower;
  report.upper = ws.upper;
  if (ws.witness) {
    report.verdict = Verdict::impossible;
    report.witness = ws.witness;
  }
  return report;
}

}  // namespace irt
