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

#include "irt/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace irt {

BipartiteShape::BipartiteShape(std::size_t first, std::size_t second) : d_a(first), d_b(second) {
  if (first < 1 || second < 1) {
    throw DimensionError("BipartiteShape: factor dimensions must be >= 1");
  }
}

namespace {

Eigen::Index idx(std::size_t v) { return static_cast<Eigen::Index>(v); }

void require_side(const ComplexMatrix& m, std::size_t side, const char* what) {
  if (m.rows() != idx(side) || m.cols() != idx(side)) {
    std::ostringstream os;
    os << what << ": expected " << side << "x" << side << " matrix, got " << describe_shape(m);
    throw DimensionError(os.str());
  }
}

}  // namespace

std::string describe_shape(const ComplexMatrix& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

ComplexMatrix identity(std::size_t d) { return ComplexMatrix::Identity(idx(d), idx(d)); }

ComplexMatrix zeros(std::size_t rows, std::size_t cols) {
  return ComplexMatrix::Zero(idx(rows), idx(cols));
}

ComplexMatrix basis_op(std::size_t d, std::size_t i, std::size_t j) {
  ComplexMatrix m = zeros(d, d);
  m(idx(i), idx(j)) = 1.0;
  return m;
}

ComplexMatrix projector(const ComplexVector& ket) { return ket * ket.adjoint(); }

bool is_square(const ComplexMatrix& m) { return m.rows() == m.cols(); }

double hermiticity_error(const ComplexMatrix& m) {
  if (!is_square(m)) return std::numeric_limits<double>::infinity();
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

bool is_hermitian(const ComplexMatrix& m, double tol) { return hermiticity_error(m) <= tol; }

void require_hermitian(const ComplexMatrix& m, const char* what, double tol) {
  const double err = hermiticity_error(m);
  if (!(err <= tol)) {
    std::ostringstream os;
    os << what << ": matrix is not Hermitian (max|M-M^dagger| = " << err << ")";
    throw NotHermitianError(os.str());
  }
}

ComplexMatrix hermitian_part(const ComplexMatrix& m) { return 0.5 * (m + m.adjoint()); }

RealVector eigenvalues(const ComplexMatrix& h) {
  if (!is_square(h)) throw DimensionError("eigenvalues: matrix is not square");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(h), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double min_eigenvalue(const ComplexMatrix& h) { return eigenvalues(h).minCoeff(); }

double max_eigenvalue(const ComplexMatrix& h) { return eigenvalues(h).maxCoeff(); }

double operator_norm(const ComplexMatrix& h) {
  require_hermitian(h, "operator_norm");
  const RealVector ev = eigenvalues(h);
  return std::max(std::abs(ev.minCoeff()), std::abs(ev.maxCoeff()));
}

double trace_norm(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  return svd.singularValues().sum();
}

ComplexMatrix psd_sqrt(const ComplexMatrix& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(h));
  const RealVector root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

double real_trace(const ComplexMatrix& m) { return m.trace().real(); }

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& m, BipartiteShape shape, Factor factor) {
  require_side(m, shape.total(), "partial_trace");
  const auto da = idx(shape.d_a);
  const auto db = idx(shape.d_b);
  if (factor == Factor::second) {
    ComplexMatrix out = ComplexMatrix::Zero(da, da);
    for (Eigen::Index i = 0; i < da; ++i) {
      for (Eigen::Index j = 0; j < da; ++j) {
        out(i, j) = m.block(i * db, j * db, db, db).trace();
      }
    }
    return out;
  }
  ComplexMatrix out = ComplexMatrix::Zero(db, db);
  for (Eigen::Index i = 0; i < da; ++i) out += m.block(i * db, i * db, db, db);
  return out;
}

ComplexMatrix partial_transpose(const ComplexMatrix& m, BipartiteShape shape, Factor factor) {
  require_side(m, shape.total(), "partial_transpose");
  const auto da = idx(shape.d_a);
  const auto db = idx(shape.d_b);
  ComplexMatrix out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < da; ++i) {
    for (Eigen::Index j = 0; j < da; ++j) {
      if (factor == Factor::first) {
        out.block(i * db, j * db, db, db) = m.block(j * db, i * db, db, db);
      } else {
        out.block(i * db, j * db, db, db) = m.block(i * db, j * db, db, db).transpose();
      }
    }
  }
  return out;
}

ComplexMatrix swap_factors(const ComplexMatrix& m, BipartiteShape shape) {
  require_side(m, shape.total(), "swap_factors");
  const auto da = idx(shape.d_a);
  const auto db = idx(shape.d_b);
  ComplexMatrix out(m.rows(), m.cols());
  for (Eigen::Index a1 = 0; a1 < da; ++a1) {
    for (Eigen::Index b1 = 0; b1 < db; ++b1) {
      for (Eigen::Index a2 = 0; a2 < da; ++a2) {
        for (Eigen::Index b2 = 0; b2 < db; ++b2) {
          out(b1 * da + a1, b2 * da + a2) = m(a1 * db + b1, a2 * db + b2);
        }
      }
    }
  }
  return out;
}

ComplexMatrix max_entangled_state(std::size_t d) {
  if (d < 1) throw DimensionError("max_entangled_state: d must be >= 1");
  ComplexVector ket = ComplexVector::Zero(idx(d * d));
  const double amp = 1.0 / std::sqrt(static_cast<double>(d));
  for (std::size_t i = 0; i < d; ++i) ket(idx(i * d + i)) = amp;
  return projector(ket);
}

ComplexMatrix swap_operator(std::size_t d) {
  return static_cast<double>(d) * partial_transpose(max_entangled_state(d), {d, d}, Factor::first);
}

ComplexMatrix sym_projector(std::size_t d) { return 0.5 * (identity(d * d) + swap_operator(d)); }

ComplexMatrix choi_of_kraus(std::span<const ComplexMatrix> kraus, std::size_t d_a, std::size_t d_b) {
  ComplexMatrix choi = zeros(d_a * d_b, d_a * d_b);
  for (const auto& k : kraus) {
    if (k.rows() != idx(d_b) || k.cols() != idx(d_a)) {
      std::ostringstream os;
      os << "choi_of_kraus: Kraus operator must be " << d_b << "x" << d_a << ", got " << describe_shape(k);
      throw DimensionError(os.str());
    }
    // vec(K) = Σ_i |i⟩ ⊗ K|i⟩
    ComplexVector v(idx(d_a * d_b));
    for (std::size_t i = 0; i < d_a; ++i) v.segment(idx(i * d_b), idx(d_b)) = k.col(idx(i));
    choi += v * v.adjoint();
  }
  return choi / static_cast<double>(d_a);
}

ComplexMatrix apply_choi(const ComplexMatrix& choi, const ComplexMatrix& rho, BipartiteShape shape) {
  require_side(choi, shape.total(), "apply_choi (Choi operator)");
  require_side(rho, shape.d_a, "apply_choi (input)");
  const auto da = idx(shape.d_a);
  const auto db = idx(shape.d_b);
  ComplexMatrix out = ComplexMatrix::Zero(db, db);
  for (Eigen::Index i = 0; i < da; ++i) {
    for (Eigen::Index j = 0; j < da; ++j) {
      if (rho(i, j) != Complex(0.0)) out += rho(i, j) * choi.block(i * db, j * db, db, db);
    }
  }
  return static_cast<double>(shape.d_a) * out;
}

ComplexMatrix apply_choi_second(const ComplexMatrix& choi, BipartiteShape choi_shape,
                                const ComplexMatrix& m, std::size_t d_x) {
  require_side(m, d_x * choi_shape.d_a, "apply_choi_second (operand)");
  const auto da = idx(choi_shape.d_a);
  const auto db = idx(choi_shape.d_b);
  const auto dx = idx(d_x);
  ComplexMatrix out(dx * db, dx * db);
  for (Eigen::Index x1 = 0; x1 < dx; ++x1) {
    for (Eigen::Index x2 = 0; x2 < dx; ++x2) {
      out.block(x1 * db, x2 * db, db, db) = apply_choi(choi, m.block(x1 * da, x2 * da, da, da), choi_shape);
    }
  }
  return out;
}

ComplexMatrix compose_choi(const ComplexMatrix& first, BipartiteShape first_shape,
                           const ComplexMatrix& second, BipartiteShape second_shape) {
  if (first_shape.d_b != second_shape.d_a) {
    throw DimensionError("compose_choi: output of first map does not match input of second");
  }
  return apply_choi_second(second, second_shape, first, first_shape.d_a);
}

ComplexMatrix adjoint_choi(const ComplexMatrix& choi, BipartiteShape shape) {
  require_side(choi, shape.total(), "adjoint_choi");
  const double scale = static_cast<double>(shape.d_a) / static_cast<double>(shape.d_b);
  return scale * swap_factors(choi.transpose(), shape);
}

ComplexMatrix identity_channel_choi(std::size_t d) { return max_entangled_state(d); }

ComplexMatrix replacement_channel_choi(std::size_t d_a, const ComplexMatrix& sigma) {
  return tensor(identity(d_a) / static_cast<double>(d_a), sigma);
}

double channel_choi_violation(const ComplexMatrix& choi, BipartiteShape shape) {
  require_side(choi, shape.total(), "channel_choi_violation");
  const ComplexMatrix marginal = partial_trace(choi, shape, Factor::second);
  const double marginal_err =
      (marginal - identity(shape.d_a) / static_cast<double>(shape.d_a)).cwiseAbs().maxCoeff();
  return std::max({0.0, -min_eigenvalue(choi), marginal_err, hermiticity_error(choi)});
}

}  // namespace irt
