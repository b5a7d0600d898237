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
#include <limits>
#include <vector>

#include "irt/core.hpp"

namespace irt {

/// Counter-based generator: the n-th output is a fixed hash of (seed, stream, n).
///
/// `split(i)` yields an independent substream, so parallel workers can draw
/// reproducibly regardless of scheduling. Gaussian and uniform draws are
/// implemented here rather than through <random> distributions so that
/// sequences are identical across standard libraries.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();
  CounterRng split(std::uint64_t index) const;

  /// Uniform in (0, 1].
  double uniform();
  double normal();
  Complex complex_normal();  ///< E|z|^2 = 1
  std::size_t below(std::size_t n);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

/// Haar-random pure state |ψ⟩⟨ψ| (normalised complex Gaussian vector).
ComplexMatrix haar_random_pure(std::size_t d, CounterRng& rng);
ComplexMatrix haar_random_pure(std::size_t d, std::uint64_t seed);
ComplexVector haar_random_ket(std::size_t d, CounterRng& rng);

ComplexMatrix ginibre(std::size_t rows, std::size_t cols, CounterRng& rng);
ComplexMatrix random_hermitian(std::size_t d, CounterRng& rng);
/// Random PSD matrix G G† with G Ginibre of the given rank.
ComplexMatrix random_psd(std::size_t d, CounterRng& rng, std::size_t rank = 0);
/// Random full-rank density matrix (induced measure).
ComplexMatrix random_density(std::size_t d, CounterRng& rng, std::size_t rank = 0);
/// Haar-random unitary.
ComplexMatrix random_unitary(std::size_t d, CounterRng& rng);
/// Kraus operators of a random channel C^{d_a} → C^{d_b}.
std::vector<ComplexMatrix> random_channel_kraus(std::size_t d_a, std::size_t d_b, std::size_t n_kraus,
                                                CounterRng& rng);
ComplexMatrix random_channel_choi(std::size_t d_a, std::size_t d_b, CounterRng& rng, std::size_t n_kraus = 0);
/// Random probability vector (flat Dirichlet).
std::vector<double> random_distribution(std::size_t n, CounterRng& rng);

}  // namespace irt
