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

#include "irt/random.hpp"

#include <cmath>
#include <numbers>

namespace irt {

namespace {

// SplitMix64 finaliser.
std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

Eigen::Index idx(std::size_t v) { return static_cast<Eigen::Index>(v); }

}  // namespace

CounterRng::result_type CounterRng::operator()() {
  const std::uint64_t key = mix64(seed_ + kGolden) ^ mix64(stream_ * kGolden + 0x632be59bd9b4e019ULL);
  return mix64(key + (counter_++) * kGolden);
}

CounterRng CounterRng::split(std::uint64_t index) const {
  return CounterRng(seed_, mix64(stream_ ^ mix64(index + 0x2545f4914f6cdd1dULL)));
}

double CounterRng::uniform() {
  // 53 random bits, shifted into (0, 1].
  return (static_cast<double>((*this)() >> 11) + 1.0) * 0x1.0p-53;
}

double CounterRng::normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Complex CounterRng::complex_normal() {
  return {normal() * std::numbers::sqrt2 / 2.0, normal() * std::numbers::sqrt2 / 2.0};
}

std::size_t CounterRng::below(std::size_t n) {
  if (n == 0) return 0;
  return static_cast<std::size_t>((*this)() % n);
}

ComplexVector haar_random_ket(std::size_t d, CounterRng& rng) {
  if (d < 1) throw DimensionError("haar_random_pure: d must be >= 1");
  ComplexVector v(idx(d));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.complex_normal();
  return v / v.norm();
}

ComplexMatrix haar_random_pure(std::size_t d, CounterRng& rng) { return projector(haar_random_ket(d, rng)); }

ComplexMatrix haar_random_pure(std::size_t d, std::uint64_t seed) {
  CounterRng rng(seed);
  return haar_random_pure(d, rng);
}

ComplexMatrix ginibre(std::size_t rows, std::size_t cols, CounterRng& rng) {
  ComplexMatrix g(idx(rows), idx(cols));
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = rng.complex_normal();
  }
  return g;
}

ComplexMatrix random_hermitian(std::size_t d, CounterRng& rng) { return hermitian_part(ginibre(d, d, rng)); }

ComplexMatrix random_psd(std::size_t d, CounterRng& rng, std::size_t rank) {
  const ComplexMatrix g = ginibre(d, rank == 0 ? d : rank, rng);
  return hermitian_part(g * g.adjoint());
}

ComplexMatrix random_density(std::size_t d, CounterRng& rng, std::size_t rank) {
  const ComplexMatrix p = random_psd(d, rng, rank);
  return p / real_trace(p);
}

ComplexMatrix random_unitary(std::size_t d, CounterRng& rng) {
  const ComplexMatrix g = ginibre(d, d, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix column phases so the distribution is Haar.
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    const Complex diag = r(j, j);
    const double mag = std::abs(diag);
    if (mag > 0.0) q.col(j) *= diag / mag;
  }
  return q;
}

std::vector<ComplexMatrix> random_channel_kraus(std::size_t d_a, std::size_t d_b, std::size_t n_kraus,
                                                CounterRng& rng) {
  if (n_kraus == 0) n_kraus = d_a * d_b;
  if (n_kraus * d_b < d_a) throw DimensionError("random_channel_kraus: too few Kraus operators for a channel");
  std::vector<ComplexMatrix> kraus;
  kraus.reserve(n_kraus);
  ComplexMatrix sum = zeros(d_a, d_a);
  for (std::size_t k = 0; k < n_kraus; ++k) {
    kraus.push_back(ginibre(d_b, d_a, rng));
    sum += kraus.back().adjoint() * kraus.back();
  }
  // K_k ← K_k S^{-1/2} makes Σ K†K = I.
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(sum));
  const RealVector inv_root = es.eigenvalues().cwiseSqrt().cwiseInverse();
  const ComplexMatrix s_inv_half =
      es.eigenvectors() * inv_root.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
  for (auto& k : kraus) k = k * s_inv_half;
  return kraus;
}

ComplexMatrix random_channel_choi(std::size_t d_a, std::size_t d_b, CounterRng& rng, std::size_t n_kraus) {
  const auto kraus = random_channel_kraus(d_a, d_b, n_kraus, rng);
  return choi_of_kraus(kraus, d_a, d_b);
}

std::vector<double> random_distribution(std::size_t n, CounterRng& rng) {
  std::vector<double> p(n);
  double total = 0.0;
  for (auto& v : p) {
    v = -std::log(rng.uniform());
    total += v;
  }
  for (auto& v : p) v /= total;
  return p;
}

}  // namespace irt
