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

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "wvstat/hilbert.hpp"
#include "wvstat/quasiprob.hpp"

namespace wvstat {

/// Discretized Gaussian meter. The interaction exp(-i g A (x) p) displaces the
/// pointer by g per unit eigenvalue of A. Pointer momentum uses hbar = 1.
///
/// The grid is periodic-style: `grid_points` samples q_j = -W + j dq with
/// dq = 2W / grid_points, so index grid_points/2 sits at q = 0.
class PointerModel {
 public:
  explicit PointerModel(double spread = 1.0, double coupling = 0.0, std::size_t grid_points = 1024,
                        double half_width_in_spreads = 10.0);

  double spread() const { return spread_; }
  double coupling() const { return coupling_; }
  std::size_t grid_points() const { return points_; }
  double half_width() const { return half_width_; }
  double spacing() const { return 2.0 * half_width_ / static_cast<double>(points_); }
  double position(std::size_t j) const { return -half_width_ + static_cast<double>(j) * spacing(); }
  /// Momentum of DFT mode k, with k taken in [-N/2, N/2).
  double momentum(std::size_t k) const;

  /// Initial amplitude at q, (2 pi sigma^2)^{-1/4} exp(-q^2 / (4 sigma^2)).
  double amplitude(double q) const;
  /// sum_j |phi(q_j)|^2 dq
  double discrete_norm() const;

  PointerModel with_coupling(double g) const;

 private:
  double spread_;
  double coupling_;
  std::size_t points_;
  double half_width_;
};

struct PostselectedReadout {
  double postselection_probability = 0.0;
  double mean_position_shift = 0.0;
  double mean_momentum_shift = 0.0;
  std::size_t sample_count = 0;  // zero for exact (non-sampled) readouts
  double position_standard_error = 0.0;
  double momentum_standard_error = 0.0;
};

struct MeasurementOptions {
  /// Permit post-selections with |<m|psi>|^2 below the overlap tolerance.
  bool allow_rare_postselection = false;
  /// Threshold on |<m|psi>|^2.
  double min_postselection_probability = 1e-12;
};

/// The post-selected pointer amplitude sum_a <m|a><a|psi> phi(q - g A_a) on the
/// grid, and the matching momentum-space weights. Exposed for diagnostics and
/// sampling; most callers want `couple_and_postselect`.
struct PostselectedPointer {
  CVector amplitude;               // on the position grid
  std::vector<double> momentum_weights;  // |DFT|^2, normalized to sum 1, k = -N/2 .. N/2-1
  double postselection_probability = 0.0;
};

PostselectedPointer postselected_pointer(const RVector& eigenvalues, const OrthonormalBasis& eigenbasis,
                                         const StateVector& psi, const StateVector& m,
                                         const PointerModel& pointer,
                                         const MeasurementOptions& opts = {});

/// Exact finite-coupling readout: post-selected pointer position and momentum
/// means and the post-selection probability.
PostselectedReadout couple_and_postselect(const Observable& a, const StateVector& psi,
                                          const StateVector& m, const PointerModel& pointer,
                                          const MeasurementOptions& opts = {});

/// Monte Carlo readout: `samples` position readouts and `samples` momentum
/// readouts drawn from the exact post-selected pointer distributions. The
/// generator is CounterRng(seed, channel) with substreams 0 (position) and 1
/// (momentum), so channels are independent of evaluation order.
PostselectedReadout sample_readouts(const Observable& a, const StateVector& psi, const StateVector& m,
                                    const PointerModel& pointer, std::size_t samples,
                                    std::uint64_t seed, std::uint64_t channel = 0,
                                    const MeasurementOptions& opts = {});

/// Geometric coupling ladder g_max, g_max/ratio, ... (coarse to fine).
struct CouplingLadder {
  double g_max = 0.2;
  std::size_t rungs = 5;
  double ratio = 2.0;
  std::vector<double> couplings() const;
};

/// One Richardson elimination step on the two finest rungs, assuming the
/// leading bias scales as g^order.
double richardson(const std::vector<double>& coarse_to_fine, double ratio, int order);
Complex richardson(const std::vector<Complex>& coarse_to_fine, double ratio, int order);

/// Leading bias order of the finite-g estimates. The exact post-selected means
/// are odd in g, so the estimates (mean / g) are even and the bias is O(g^2).
inline constexpr int kWeakValueBiasOrder = 2;

/// Momentum-channel proportionality constant: <p> ~ k g Im(A_w).
struct MomentumCalibration {
  double coefficient = 0.0;
  /// 1 / (2 sigma^2), the textbook linear response of a Gaussian pointer; kept
  /// only as a cross-check of `coefficient`.
  double gaussian_reference = 0.0;
  std::vector<double> ladder_couplings;
  std::vector<double> ladder_slopes;
};

/// Calibrates k on a reference case with a purely imaginary weak value: Pauli-z
/// between |+> and (|0> + i|1>)/sqrt2, weak value i. Position calibration is
/// implicit: an eigenstate shifts the pointer by exactly g * eigenvalue.
MomentumCalibration calibrate_momentum_response(const PointerModel& pointer, const CouplingLadder& ladder);

/// Re from position shift / g, Im from momentum shift / (k g).
Complex extract_weak_value(const PostselectedReadout& readout, double coupling, double momentum_response);

struct WeakValueLadder {
  std::vector<double> couplings;
  std::vector<PostselectedReadout> readouts;
  std::vector<Complex> estimates;
  Complex extrapolated;
  double momentum_response = 0.0;
};

/// Exact readouts at every rung of the ladder and the Richardson-extrapolated
/// weak value.
WeakValueLadder weak_value_ladder(const Observable& a, const StateVector& psi, const StateVector& m,
                                  const PointerModel& pointer, const CouplingLadder& ladder,
                                  const MeasurementOptions& opts = {});

struct DirectKdOptions {
  std::size_t samples = 0;  // zero: exact readouts
  std::uint64_t seed = 0;
  /// Zero: calibrate from the pointer's spread with the default ladder.
  double momentum_response = 0.0;
  MeasurementOptions measurement{};
};

struct DirectKdChannel {
  std::size_t a = 0;
  std::size_t b = 0;
  PostselectedReadout readout;
  Complex weak_value_estimate;
  bool skipped = false;  // rare post-selection, estimate forced to zero
};

struct DirectKdResult {
  ComplexJointDistribution estimate;
  std::vector<DirectKdChannel> channels;  // ordered by a * d_b + b
  double coupling = 0.0;
  double momentum_response = 0.0;
};

/// Weak coupling to |a><a| followed by a strong measurement of b, for every
/// (a, b): rho_est(a, b) = (weak value estimate) * (probability of b). Channel
/// errors are collected and rethrown together, labelled by (a, b).
DirectKdResult direct_kd_measurement(const OrthonormalBasis& a_basis, const OrthonormalBasis& b_basis,
                                     const StateVector& psi, const PointerModel& pointer,
                                     const DirectKdOptions& opts = {});

struct DirectKdLadder {
  std::vector<DirectKdResult> rungs;
  ComplexJointDistribution extrapolated;
};

DirectKdLadder direct_kd_extrapolated(const OrthonormalBasis& a_basis, const OrthonormalBasis& b_basis,
                                      const StateVector& psi, const PointerModel& pointer,
                                      const CouplingLadder& ladder, const DirectKdOptions& opts = {});

}  // namespace wvstat
