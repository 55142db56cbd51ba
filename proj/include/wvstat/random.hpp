// Copyright 2026 The wvstat Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

#include "wvstat/hilbert.hpp"

namespace wvstat {

/// Philox4x32-10 block function (Salmon et al., SC'11). Pure: the same
/// (key, counter) always yields the same 128 output bits.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Counter-based generator: (seed, stream) selects an independent sequence, and
/// draws are a pure function of (seed, stream, position). Substreams let
/// per-channel work produce the same numbers regardless of execution order.
///
/// Distributions are implemented here rather than with <random> so sequences
/// are identical across standard libraries.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal via Box-Muller.
  double normal();
  /// Circular complex Gaussian with E|z|^2 = 1.
  Complex complex_normal();

  /// Independent generator for a child channel; does not advance this one.
  CounterRng substream(std::uint64_t child) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;  // 32-bit words consumed from buffer_
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;

  std::uint32_t next_word();
};

// Random instances for property tests and sweeps. All draws go through the
// supplied generator.

StateVector random_state(std::size_t dim, CounterRng& rng);
/// Haar-distributed unitary: QR of a complex Gaussian matrix with the phases of
/// R's diagonal moved into Q.
CMatrix random_unitary(std::size_t dim, CounterRng& rng);
OrthonormalBasis random_basis(std::size_t dim, CounterRng& rng);
/// GUE-distributed Hermitian observable (non-degenerate with probability one).
Observable random_observable(std::size_t dim, CounterRng& rng);
/// exp(-i eps G) applied to `base`, with G drawn from the GUE and normalized to
/// unit spectral norm. Small eps keeps a mutually unbiased pair unbiased enough.
OrthonormalBasis perturbed_basis(const OrthonormalBasis& base, double eps, CounterRng& rng);

}  // namespace wvstat
