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

// Dense complex linear algebra and Choi calculus.
//
// Composite index convention, fixed for the whole library: on a bipartite
// space X⊗Y the basis vector |i_X, i_Y⟩ has index i_X * d_Y + i_Y.
//
// Choi operators are trace normalised: for a map E from A to B,
//   J(E) = (id_A ⊗ E)(Φ+),   Φ+ = |Φ+⟩⟨Φ+|,  |Φ+⟩ = d_A^{-1/2} Σ_i |ii⟩,
// so a channel has tr J = 1 and tr_B J = I_A / d_A.

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace irt {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Thrown when operand shapes do not compose.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a matrix that must be Hermitian is not (to kHermitianTol).
class NotHermitianError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kHermitianTol = 1e-12;

/// Dimensions of the two tensor factors of a bipartite operator.
struct BipartiteShape {
  std::size_t d_a = 1;
  std::size_t d_b = 1;

  BipartiteShape() = default;
  BipartiteShape(std::size_t first, std::size_t second);

  std::size_t total() const { return d_a * d_b; }
  /// Shape with the factors exchanged.
  BipartiteShape swapped() const { return {d_b, d_a}; }

  friend bool operator==(const BipartiteShape&, const BipartiteShape&) = default;
};

enum class Factor { first, second };

// ---------------------------------------------------------------------------
// Elementary helpers

ComplexMatrix identity(std::size_t d);
ComplexMatrix zeros(std::size_t rows, std::size_t cols);
/// |i⟩⟨j| in dimension d.
ComplexMatrix basis_op(std::size_t d, std::size_t i, std::size_t j);
/// |ψ⟩⟨ψ| for a (not necessarily normalised) ket.
ComplexMatrix projector(const ComplexVector& ket);

bool is_square(const ComplexMatrix& m);
/// max |M - M†| (infinity for non-square input).
double hermiticity_error(const ComplexMatrix& m);
bool is_hermitian(const ComplexMatrix& m, double tol = kHermitianTol);
/// Throws NotHermitianError unless |M - M†| <= tol.
void require_hermitian(const ComplexMatrix& m, const char* what, double tol = kHermitianTol);
/// (M + M†)/2.
ComplexMatrix hermitian_part(const ComplexMatrix& m);

/// Real eigenvalues (ascending) of a Hermitian matrix.
RealVector eigenvalues(const ComplexMatrix& h);
double min_eigenvalue(const ComplexMatrix& h);
double max_eigenvalue(const ComplexMatrix& h);
/// Largest eigenvalue magnitude of a Hermitian matrix.
double operator_norm(const ComplexMatrix& h);
/// Sum of singular values.
double trace_norm(const ComplexMatrix& m);
/// Principal square root of a PSD matrix (negative eigenvalues clipped).
ComplexMatrix psd_sqrt(const ComplexMatrix& h);
double real_trace(const ComplexMatrix& m);

// ---------------------------------------------------------------------------
// Tensor structure

/// Kronecker product A ⊗ B.
ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix partial_trace(const ComplexMatrix& m, BipartiteShape shape, Factor factor);
ComplexMatrix partial_transpose(const ComplexMatrix& m, BipartiteShape shape, Factor factor);
/// Reorders X⊗Y into Y⊗X, i.e. SWAP M SWAP† with `shape` describing the input.
ComplexMatrix swap_factors(const ComplexMatrix& m, BipartiteShape shape);

/// |Φ+⟩⟨Φ+| on C^d ⊗ C^d.
ComplexMatrix max_entangled_state(std::size_t d);
/// The SWAP operator on C^d ⊗ C^d, built as d (Φ+)^{t_A}.
ComplexMatrix swap_operator(std::size_t d);
/// Projector onto the symmetric subspace, (I + SWAP)/2.
ComplexMatrix sym_projector(std::size_t d);

// ---------------------------------------------------------------------------
// Choi calculus

/// Choi operator of ρ ↦ Σ K ρ K†, each K being d_b × d_a.
ComplexMatrix choi_of_kraus(std::span<const ComplexMatrix> kraus, std::size_t d_a, std::size_t d_b);
/// Action of the map with Choi operator J on ρ: d_A tr_A[(ρ^t ⊗ I) J].
/// ρ may be any (non-Hermitian) d_a × d_a operator; the map is linear.
ComplexMatrix apply_choi(const ComplexMatrix& choi, const ComplexMatrix& rho, BipartiteShape shape);
/// (id_X ⊗ E)(M) for M on X⊗A and E: A → B given by its Choi operator.
ComplexMatrix apply_choi_second(const ComplexMatrix& choi, BipartiteShape choi_shape,
                                const ComplexMatrix& m, std::size_t d_x);
/// Choi operator of (second ∘ first): J(second∘first) = (id ⊗ second)(J(first)).
ComplexMatrix compose_choi(const ComplexMatrix& first, BipartiteShape first_shape,
                           const ComplexMatrix& second, BipartiteShape second_shape);
/// Choi operator (on B⊗A) of the Hilbert–Schmidt adjoint of the map A → B.
ComplexMatrix adjoint_choi(const ComplexMatrix& choi, BipartiteShape shape);
/// Choi operator of the identity channel on C^d (equals Φ+).
ComplexMatrix identity_channel_choi(std::size_t d);
/// Choi operator of ρ ↦ tr(ρ) σ.
ComplexMatrix replacement_channel_choi(std::size_t d_a, const ComplexMatrix& sigma);

/// Largest deviation of a Choi operator from being a channel Choi:
/// max(-λ_min(J), |tr_B J - I/d_A|_max).
double channel_choi_violation(const ComplexMatrix& choi, BipartiteShape shape);

/// "RxC", for error messages.
std::string describe_shape(const ComplexMatrix& m);

}  // namespace irt
