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

#include <cmath>
#include <cstdio>
#include <sstream>

#include "irt/sdp.hpp"

namespace irt::sdp {

namespace {

using Index = Eigen::Index;

Index idx(std::size_t v) { return static_cast<Index>(v); }

RealMatrix embed(const ComplexMatrix& h) {
  const Index m = h.rows();
  RealMatrix out(2 * m, 2 * m);
  const RealMatrix re = h.real();
  const RealMatrix im = h.imag();
  out.topLeftCorner(m, m) = re;
  out.topRightCorner(m, m) = -im;
  out.bottomLeftCorner(m, m) = im;
  out.bottomRightCorner(m, m) = re;
  return 0.5 * (out + out.transpose());
}

/// The k-th basis matrix of the real coordinate system on side×side Hermitian matrices.
ComplexMatrix basis_matrix(std::size_t side, std::size_t k) {
  ComplexMatrix b = ComplexMatrix::Zero(idx(side), idx(side));
  if (k < side) {
    b(idx(k), idx(k)) = 1.0;
    return b;
  }
  std::size_t rest = k - side;
  const std::size_t pair = rest / 2;
  const bool imag = rest % 2 == 1;
  // Pairs (i, j), i < j, in row order.
  std::size_t i = 0, count = pair;
  while (count >= side - 1 - i) {
    count -= side - 1 - i;
    ++i;
  }
  const std::size_t j = i + 1 + count;
  if (imag) {
    b(idx(i), idx(j)) = Complex(0.0, 1.0);
    b(idx(j), idx(i)) = Complex(0.0, -1.0);
  } else {
    b(idx(i), idx(j)) = 1.0;
    b(idx(j), idx(i)) = 1.0;
  }
  return b;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string to_string(Status status) {
  switch (status) {
    case Status::optimal:
      return "optimal";
    case Status::infeasible:
      return "infeasible";
    case Status::unbounded:
      return "unbounded";
    case Status::numerical_failure:
      return "numerical-failure";
  }
  return "unknown";
}

RealMatrix real_embedding(const ComplexMatrix& h) {
  require_hermitian(h, "real_embedding");
  return embed(h);
}

RealVector hermitian_coordinates(const ComplexMatrix& m) {
  const auto side = static_cast<std::size_t>(m.rows());
  RealVector x(idx(side * side));
  Index k = 0;
  for (std::size_t i = 0; i < side; ++i) x(k++) = m(idx(i), idx(i)).real();
  for (std::size_t i = 0; i < side; ++i) {
    for (std::size_t j = i + 1; j < side; ++j) {
      x(k++) = m(idx(i), idx(j)).real();
      x(k++) = m(idx(i), idx(j)).imag();
    }
  }
  return x;
}

ComplexMatrix hermitian_from_coordinates(const RealVector& x, std::size_t side) {
  if (x.size() != idx(side * side)) throw DimensionError("hermitian_from_coordinates: wrong coordinate count");
  ComplexMatrix m(idx(side), idx(side));
  Index k = 0;
  for (std::size_t i = 0; i < side; ++i) m(idx(i), idx(i)) = x(k++);
  for (std::size_t i = 0; i < side; ++i) {
    for (std::size_t j = i + 1; j < side; ++j) {
      const Complex v(x(k), x(k + 1));
      k += 2;
      m(idx(i), idx(j)) = v;
      m(idx(j), idx(i)) = std::conj(v);
    }
  }
  return m;
}

// ---------------------------------------------------------------------------

ScalarExpr ScalarExpr::trace(VarId var, ComplexMatrix coeff, LinearMap map) {
  ScalarExpr e;
  e.terms_.push_back({var, std::move(coeff), std::move(map)});
  return e;
}

ScalarExpr& ScalarExpr::operator+=(const ScalarExpr& other) {
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  constant_ += other.constant_;
  return *this;
}

ScalarExpr& ScalarExpr::operator*=(double k) {
  for (auto& t : terms_) t.coeff *= k;
  constant_ *= k;
  return *this;
}

HermitianExpr::HermitianExpr(std::size_t side) : side_(side), constant_(ComplexMatrix::Zero(idx(side), idx(side))) {}

HermitianExpr HermitianExpr::of(VarId var, std::size_t side) {
  HermitianExpr e(side);
  e.terms_.push_back({var, 1.0, nullptr});
  return e;
}

HermitianExpr HermitianExpr::mapped(VarId var, std::size_t side, LinearMap map) {
  HermitianExpr e(side);
  e.terms_.push_back({var, 1.0, std::move(map)});
  return e;
}

HermitianExpr HermitianExpr::constant(ComplexMatrix m) {
  HermitianExpr e(static_cast<std::size_t>(m.rows()));
  e.constant_ = std::move(m);
  return e;
}

HermitianExpr& HermitianExpr::operator+=(const HermitianExpr& other) {
  if (other.side_ != side_) throw DimensionError("HermitianExpr: side mismatch in sum");
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  constant_ += other.constant_;
  return *this;
}

HermitianExpr& HermitianExpr::operator+=(const ComplexMatrix& m) {
  if (m.rows() != idx(side_) || m.cols() != idx(side_)) throw DimensionError("HermitianExpr: constant side mismatch");
  constant_ += m;
  return *this;
}

HermitianExpr& HermitianExpr::operator*=(double k) {
  for (auto& t : terms_) t.weight *= k;
  constant_ *= k;
  return *this;
}

// ---------------------------------------------------------------------------

VarId Problem::add_variable(std::size_t side, std::string name) {
  if (side == 0) throw DimensionError("Problem: variable side must be >= 1");
  sides_.push_back(side);
  names_.push_back(name.empty() ? "X" + std::to_string(sides_.size() - 1) : std::move(name));
  return VarId{sides_.size() - 1};
}

VarId Problem::add_psd_variable(std::size_t side, std::string name) {
  const VarId v = add_variable(side, std::move(name));
  add_psd(HermitianExpr::of(v, side));
  return v;
}

void Problem::check_var(VarId v) const {
  if (v.index >= sides_.size()) throw DimensionError("Problem: unknown variable");
}

void Problem::set_objective(Sense sense, ScalarExpr objective) {
  for (const auto& t : objective.terms()) check_var(t.var);
  sense_ = sense;
  objective_ = std::move(objective);
}

void Problem::add_equality(ScalarExpr expr, double rhs) {
  for (const auto& t : expr.terms()) check_var(t.var);
  scalar_eqs_.emplace_back(std::move(expr), rhs);
}

void Problem::add_equality(HermitianExpr expr, const ComplexMatrix& rhs) {
  for (const auto& t : expr.terms()) check_var(t.var);
  if (rhs.rows() != idx(expr.side()) || rhs.cols() != idx(expr.side())) {
    throw DimensionError("Problem: equality right-hand side has the wrong side");
  }
  hermitian_eqs_.emplace_back(std::move(expr), rhs);
}

void Problem::add_psd(HermitianExpr expr) {
  for (const auto& t : expr.terms()) check_var(t.var);
  psds_.push_back(std::move(expr));
}

std::size_t Problem::real_dimension() const {
  std::size_t n = 0;
  for (std::size_t s : sides_) n += s * s;
  return n;
}

std::size_t Problem::offset(VarId v) const {
  std::size_t off = 0;
  for (std::size_t i = 0; i < v.index; ++i) off += sides_[i] * sides_[i];
  return off;
}

namespace {

/// Value of one Hermitian-expression term on a basis matrix, with shape check.
ComplexMatrix eval_term(const HermitianExpr::Term& t, const ComplexMatrix& x, std::size_t side) {
  ComplexMatrix out = t.map ? t.map(x) : x;
  if (out.rows() != idx(side) || out.cols() != idx(side)) {
    throw DimensionError("Problem: expression term has side " + describe_shape(out) + ", expected " +
                         std::to_string(side));
  }
  return t.weight * out;
}

}  // namespace

ConeProblem Problem::lower() const {
  const std::size_t n = real_dimension();
  ConeProblem cp;
  cp.c = RealVector::Zero(idx(n));
  const double sign = sense_ == Sense::maximize ? -1.0 : 1.0;
  for (const auto& t : objective_.terms()) {
    const std::size_t side = sides_[t.var.index], off = offset(t.var);
    for (std::size_t k = 0; k < side * side; ++k) {
      const ComplexMatrix b = basis_matrix(side, k);
      const ComplexMatrix v = t.map ? t.map(b) : b;
      if (v.rows() != t.coeff.cols() || v.cols() != t.coeff.rows()) throw DimensionError("Problem: objective term shape");
      cp.c(idx(off + k)) += sign * (t.coeff * v).trace().real();
    }
  }

  std::size_t rows = scalar_eqs_.size();
  for (const auto& [e, rhs] : hermitian_eqs_) rows += e.side() * e.side();
  cp.A = RealMatrix::Zero(idx(rows), idx(n));
  cp.b = RealVector::Zero(idx(rows));
  Index row = 0;
  for (const auto& [e, rhs] : scalar_eqs_) {
    for (const auto& t : e.terms()) {
      const std::size_t side = sides_[t.var.index], off = offset(t.var);
      for (std::size_t k = 0; k < side * side; ++k) {
        const ComplexMatrix b = basis_matrix(side, k);
        const ComplexMatrix v = t.map ? t.map(b) : b;
        if (v.rows() != t.coeff.cols() || v.cols() != t.coeff.rows()) throw DimensionError("Problem: equality term shape");
        cp.A(row, idx(off + k)) += (t.coeff * v).trace().real();
      }
    }
    cp.b(row) = rhs - e.constant();
    ++row;
  }
  for (const auto& [e, rhs] : hermitian_eqs_) {
    const auto m = static_cast<Index>(e.side() * e.side());
    for (const auto& t : e.terms()) {
      const std::size_t side = sides_[t.var.index], off = offset(t.var);
      for (std::size_t k = 0; k < side * side; ++k) {
        cp.A.block(row, idx(off + k), m, 1) += hermitian_coordinates(eval_term(t, basis_matrix(side, k), e.side()));
      }
    }
    cp.b.segment(row, m) = hermitian_coordinates(rhs - e.constant_part());
    row += m;
  }

  std::size_t cone_dim = 0;
  for (const auto& e : psds_) {
    cp.blocks.push_back(2 * e.side());
    cone_dim += svec_size(2 * e.side());
  }
  cp.G = RealMatrix::Zero(idx(cone_dim), idx(n));
  cp.h = RealVector::Zero(idx(cone_dim));
  Index crow = 0;
  for (const auto& e : psds_) {
    const auto m = static_cast<Index>(svec_size(2 * e.side()));
    for (const auto& t : e.terms()) {
      const std::size_t side = sides_[t.var.index], off = offset(t.var);
      for (std::size_t k = 0; k < side * side; ++k) {
        cp.G.block(crow, idx(off + k), m, 1) -= svec(embed(eval_term(t, basis_matrix(side, k), e.side())));
      }
    }
    cp.h.segment(crow, m) = svec(embed(e.constant_part()));
    crow += m;
  }
  return cp;
}

Solution Problem::solve(const SolveOptions& options) const {
  const ConeProblem cp = lower();
  ConeOptions co{options.tol, options.max_iterations};
  ConeResult r = solve_cone(cp, co);
  double tol_used = options.tol;
  if (r.status == Status::numerical_failure && options.fallback_tol > options.tol) {
    co.tol = options.fallback_tol;
    r = solve_cone(cp, co);
    tol_used = options.fallback_tol;
  }

  Solution sol;
  sol.status = r.status;
  sol.tol_used = tol_used;
  sol.iterations = r.iterations;
  const double sign = sense_ == Sense::maximize ? -1.0 : 1.0;
  sol.value = sign * r.primal_value + objective_.constant();
  sol.gap = std::abs(r.primal_value - r.dual_value);
  if (r.x.size() != idx(real_dimension())) return sol;

  for (std::size_t v = 0; v < sides_.size(); ++v) {
    const std::size_t side = sides_[v];
    sol.blocks.push_back(
        hermitian_part(hermitian_from_coordinates(r.x.segment(idx(offset(VarId{v})), idx(side * side)), side)));
  }

  Index zoff = 0;
  sol.min_psd_eigenvalue = std::numeric_limits<double>::infinity();
  for (const auto& e : psds_) {
    const auto m = idx(e.side());
    const RealMatrix z = smat(r.z.segment(zoff, idx(svec_size(2 * e.side()))), 2 * e.side());
    zoff += idx(svec_size(2 * e.side()));
    ComplexMatrix w(m, m);
    w.real() = z.topLeftCorner(m, m) + z.bottomRightCorner(m, m);
    w.imag() = z.bottomLeftCorner(m, m) - z.topRightCorner(m, m);
    sol.psd_duals.push_back(hermitian_part(w));

    ComplexMatrix value = e.constant_part();
    for (const auto& t : e.terms()) value += eval_term(t, sol.blocks[t.var.index], e.side());
    sol.min_psd_eigenvalue = std::min(sol.min_psd_eigenvalue, min_eigenvalue(hermitian_part(value)));
  }
  if (psds_.empty()) sol.min_psd_eigenvalue = 0.0;

  Index row = 0;
  for (std::size_t i = 0; i < scalar_eqs_.size(); ++i) sol.scalar_duals.push_back(r.y(row++));
  for (const auto& [e, rhs] : hermitian_eqs_) {
    const std::size_t side = e.side();
    ComplexMatrix y(idx(side), idx(side));
    for (std::size_t i = 0; i < side; ++i) y(idx(i), idx(i)) = r.y(row++);
    for (std::size_t i = 0; i < side; ++i) {
      for (std::size_t j = i + 1; j < side; ++j) {
        const Complex v(r.y(row), r.y(row + 1));
        row += 2;
        y(idx(i), idx(j)) = 0.5 * v;
        y(idx(j), idx(i)) = 0.5 * std::conj(v);
      }
    }
    sol.hermitian_duals.push_back(y);
  }
  return sol;
}

std::string Problem::dump() const {
  const ConeProblem cp = lower();
  std::ostringstream os;
  os << "problem variables " << sides_.size() << " real_dim " << cp.c.size() << " sense "
     << (sense_ == Sense::maximize ? "maximize" : "minimize") << "\n";
  for (std::size_t v = 0; v < sides_.size(); ++v) os << "block " << v << " " << names_[v] << " side " << sides_[v] << "\n";
  os << "objective constant " << fmt17(objective_.constant()) << " c";
  for (Index k = 0; k < cp.c.size(); ++k) os << " " << fmt17(cp.c(k));
  os << "\n";
  for (Index r = 0; r < cp.A.rows(); ++r) {
    os << "eq " << r << " a";
    for (Index k = 0; k < cp.A.cols(); ++k) os << " " << fmt17(cp.A(r, k));
    os << " b " << fmt17(cp.b(r)) << "\n";
  }
  Index off = 0;
  for (std::size_t i = 0; i < cp.blocks.size(); ++i) {
    const auto m = idx(svec_size(cp.blocks[i]));
    os << "psd " << i << " side " << cp.blocks[i] << " G";
    for (Index r = off; r < off + m; ++r)
      for (Index k = 0; k < cp.G.cols(); ++k) os << " " << fmt17(cp.G(r, k));
    os << " h";
    for (Index r = off; r < off + m; ++r) os << " " << fmt17(cp.h(r));
    os << "\n";
    off += m;
  }
  return os.str();
}

}  // namespace irt::sdp
