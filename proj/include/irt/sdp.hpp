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

// Complex-Hermitian semidefinite programs.
//
// Problems are stated over Hermitian matrix variables with real-valued
// linear functionals Re tr(C · f(X)), Hermitian equality constraints, and
// PSD constraints on affine Hermitian expressions. They are lowered to the
// real conic form
//
//   minimize c'x  subject to  G x + s = h,  A x = b,  s ∈ K,
//
// with K a product of real PSD cones (each complex PSD constraint becomes the
// real embedding [[Re, -Im], [Im, Re]]) and handed to a backend.

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "irt/core.hpp"

namespace irt::sdp {

enum class Status { optimal, infeasible, unbounded, numerical_failure };

std::string to_string(Status status);

/// Raised when an SDP that must be solved did not reach `optimal`.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, Status status) : std::runtime_error(what), status_(status) {}
  Status status() const { return status_; }

 private:
  Status status_;
};

/// [[Re H, -Im H], [Im H, Re H]]. Throws NotHermitianError for non-Hermitian H.
RealMatrix real_embedding(const ComplexMatrix& h);

// ---------------------------------------------------------------------------
// Real conic form

/// Lower triangle, column-major, off-diagonal entries scaled by √2, so that
/// svec(X)·svec(Y) = tr(XY).
RealVector svec(const RealMatrix& m);
RealMatrix smat(const RealVector& v, std::size_t side);
inline std::size_t svec_size(std::size_t side) { return side * (side + 1) / 2; }

struct ConeProblem {
  RealVector c;
  RealMatrix G;
  RealVector h;
  RealMatrix A;
  RealVector b;
  /// Sides of the PSD blocks that make up s; a side-1 block is a nonnegativity
  /// constraint.
  std::vector<std::size_t> blocks;

  std::size_t num_variables() const { return static_cast<std::size_t>(c.size()); }
  std::size_t cone_dimension() const;
  /// Throws DimensionError if the pieces do not fit together.
  void check() const;
};

struct ConeOptions {
  double tol = 1e-8;
  int max_iterations = 120;
};

struct ConeResult {
  Status status = Status::numerical_failure;
  RealVector x, y, z, s;
  double primal_value = 0.0;
  double dual_value = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;  ///< s'z at the returned point
  int iterations = 0;
};

/// Homogeneous self-dual primal-dual interior point method with Nesterov–Todd
/// scaling and Mehrotra correction. Single-threaded.
ConeResult solve_cone(const ConeProblem& problem, const ConeOptions& options = {});

// ---------------------------------------------------------------------------
// Hermitian modeling layer

/// Linear, Hermiticity-preserving map applied to a variable before use.
using LinearMap = std::function<ComplexMatrix(const ComplexMatrix&)>;

struct VarId {
  std::size_t index = 0;
};

/// Σ_k Re tr(C_k · f_k(X_k)) + constant.
class ScalarExpr {
 public:
  ScalarExpr() = default;
  explicit ScalarExpr(double constant) : constant_(constant) {}

  /// Re tr(C · X) or Re tr(C · f(X)).
  static ScalarExpr trace(VarId var, ComplexMatrix coeff, LinearMap map = nullptr);

  ScalarExpr& operator+=(const ScalarExpr& other);
  ScalarExpr& operator*=(double k);
  friend ScalarExpr operator+(ScalarExpr a, const ScalarExpr& b) { return a += b; }
  friend ScalarExpr operator-(ScalarExpr a, ScalarExpr b) { return a += (b *= -1.0); }
  friend ScalarExpr operator*(double k, ScalarExpr a) { return a *= k; }
  friend ScalarExpr operator+(ScalarExpr a, double k) { return a += ScalarExpr(k); }

  struct Term {
    VarId var;
    ComplexMatrix coeff;
    LinearMap map;
  };
  const std::vector<Term>& terms() const { return terms_; }
  double constant() const { return constant_; }

 private:
  std::vector<Term> terms_;
  double constant_ = 0.0;
};

/// Σ_k w_k f_k(X_k) + constant, an affine Hermitian matrix expression.
class HermitianExpr {
 public:
  explicit HermitianExpr(std::size_t side);
  /// The variable itself (w = 1, f = id); side taken from the problem at use.
  static HermitianExpr of(VarId var, std::size_t side);
  /// f(X) where f maps the variable into matrices of the given side.
  static HermitianExpr mapped(VarId var, std::size_t side, LinearMap map);
  static HermitianExpr constant(ComplexMatrix m);

  HermitianExpr& operator+=(const HermitianExpr& other);
  HermitianExpr& operator+=(const ComplexMatrix& m);
  HermitianExpr& operator*=(double k);
  friend HermitianExpr operator+(HermitianExpr a, const HermitianExpr& b) { return a += b; }
  friend HermitianExpr operator-(HermitianExpr a, HermitianExpr b) { return a += (b *= -1.0); }
  friend HermitianExpr operator+(HermitianExpr a, const ComplexMatrix& m) { return a += m; }
  friend HermitianExpr operator-(HermitianExpr a, const ComplexMatrix& m) { return a += ComplexMatrix(-m); }
  friend HermitianExpr operator*(double k, HermitianExpr a) { return a *= k; }

  struct Term {
    VarId var;
    double weight = 1.0;
    LinearMap map;  ///< null for the identity
  };
  std::size_t side() const { return side_; }
  const std::vector<Term>& terms() const { return terms_; }
  const ComplexMatrix& constant_part() const { return constant_; }

 private:
  std::size_t side_;
  std::vector<Term> terms_;
  ComplexMatrix constant_;
};

enum class Sense { minimize, maximize };

struct SolveOptions {
  double tol = 1e-8;
  /// Tolerance of the single automatic retry; 0 disables the retry.
  double fallback_tol = 1e-6;
  int max_iterations = 120;
};

struct Solution {
  Status status = Status::numerical_failure;
  double value = 0.0;  ///< objective value in the caller's sense
  double gap = 0.0;    ///< |primal - dual| objective values
  double tol_used = 0.0;
  int iterations = 0;
  std::vector<ComplexMatrix> blocks;            ///< optimal variables (Hermitian-symmetrised)
  std::vector<ComplexMatrix> psd_duals;         ///< one PSD multiplier per PSD constraint
  std::vector<double> scalar_duals;             ///< one per scalar equality
  std::vector<ComplexMatrix> hermitian_duals;   ///< one per Hermitian equality
  double min_psd_eigenvalue = 0.0;              ///< over all PSD constraint expressions

  bool optimal() const { return status == Status::optimal; }
  const ComplexMatrix& operator[](VarId v) const { return blocks.at(v.index); }
};

class Problem {
 public:
  VarId add_variable(std::size_t side, std::string name = {});
  /// A variable constrained PSD.
  VarId add_psd_variable(std::size_t side, std::string name = {});

  void set_objective(Sense sense, ScalarExpr objective);
  void add_equality(ScalarExpr expr, double rhs);
  void add_equality(HermitianExpr expr, const ComplexMatrix& rhs);
  /// expr ⪰ 0.
  void add_psd(HermitianExpr expr);

  std::size_t num_variables() const { return sides_.size(); }
  std::size_t side(VarId v) const { return sides_.at(v.index); }

  ConeProblem lower() const;
  Solution solve(const SolveOptions& options = {}) const;
  /// Text dump of the lowered problem, one line per constraint row / PSD
  /// block, coefficients with 17 significant digits.
  std::string dump() const;

 private:
  std::size_t real_dimension() const;
  std::size_t offset(VarId v) const;
  void check_var(VarId v) const;

  std::vector<std::size_t> sides_;
  std::vector<std::string> names_;
  Sense sense_ = Sense::minimize;
  ScalarExpr objective_;
  std::vector<std::pair<ScalarExpr, double>> scalar_eqs_;
  std::vector<std::pair<HermitianExpr, ComplexMatrix>> hermitian_eqs_;
  std::vector<HermitianExpr> psds_;
};

/// Coordinates of a Hermitian matrix in the real basis used by Problem:
/// E_ii, then for i<j the pair E_ij + E_ji and iE_ij - iE_ji.
RealVector hermitian_coordinates(const ComplexMatrix& m);
ComplexMatrix hermitian_from_coordinates(const RealVector& x, std::size_t side);

}  // namespace irt::sdp
