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
#include <vector>

#include "wvstat/hilbert.hpp"
#include "wvstat/quasiprob.hpp"

namespace wvstat {

/// U^dagger(t) A U(t) with U(t) = exp(-i H t / hbar). Time stepping is exact
/// (eigendecomposition of H).
Observable heisenberg_at(const Observable& a, const Observable& h, double t, double hbar = 1.0);

/// lhs: central difference of <psi(t)|A|psi(t)> at t = 0 with step dt.
/// rhs: (2/hbar) sum_{a,n} A_a E_n Im rho(n, a | psi), rho over (H basis, A basis).
IdentitySides motion_identity_check(const Observable& a, const Observable& h, const StateVector& psi,
                                    double dt, double hbar = 1.0);

struct MotionLadder {
  std::vector<double> steps;
  std::vector<IdentitySides> sides;
  std::vector<double> residuals;
  /// Least-squares slope of log(residual) against log(dt).
  double slope = 0.0;
};

MotionLadder motion_identity_ladder(const Observable& a, const Observable& h, const StateVector& psi,
                                    const std::vector<double>& steps, double hbar = 1.0);

/// Position and momentum of a harmonic-oscillator ladder truncated to `dim`
/// Fock levels: x = sqrt(hbar / 2 m w) (a + a^dagger), p = i sqrt(m w hbar / 2) (a^dagger - a).
/// The reference frequency w only fixes the Fock basis; no oscillator
/// potential enters the free Hamiltonian.
class TruncatedOscillatorPair {
 public:
  explicit TruncatedOscillatorPair(std::size_t dim, double mass = 1.0, double hbar = 1.0,
                                   double frequency = 0.5);

  std::size_t dim() const { return dim_; }
  double mass() const { return mass_; }
  double hbar() const { return hbar_; }
  double frequency() const { return frequency_; }
  const Observable& x_op() const { return x_; }
  const Observable& p_op() const { return p_; }

  /// p^2 / 2m from the truncated p. Its spectrum is doubly degenerate (+-p).
  Observable free_hamiltonian() const;
  StateVector fock_state(std::size_t n) const { return StateVector::basis_state(dim_, n); }

  /// max |[x,p] - i hbar| over the block that excludes the top two levels.
  double commutator_defect() const;

 private:
  std::size_t dim_;
  double mass_;
  double hbar_;
  double frequency_;
  Observable x_;
  Observable p_;
};

struct TwoTimeCorrelation {
  double measured;        // Im <psi| x(t2) x(t1) |psi>
  double predicted;       // hbar (t2 - t1) / 2m
  double tolerance;       // 1e-3 |predicted| + 1e-8
  double max_leakage;     // largest population above the guard level seen during evolution
  bool within_tolerance() const { return std::abs(measured - predicted) <= tolerance; }
};

/// Throws TruncationViolated if the evolving state puts more than 1e-6 of its
/// population on Fock levels >= dim/2 at any sampled time in [0, max(|t1|,|t2|)].
TwoTimeCorrelation two_time_imag_correlation(const TruncatedOscillatorPair& sys, const Observable& h_free,
                                             const StateVector& psi, double t1, double t2);

/// Free particle on a periodic lattice of `dim` sites with spacing L / dim.
/// Position eigenvalues j L / d; momentum eigenstates are the discrete Fourier
/// modes with eigenvalues 2 pi hbar n / L, n = -d/2 .. d/2 - 1 (ascending).
class LatticeParticle {
 public:
  LatticeParticle(std::size_t dim, double length, double mass, double hbar = 1.0);

  std::size_t dim() const { return dim_; }
  double length() const { return length_; }
  double mass() const { return mass_; }
  double hbar() const { return hbar_; }
  double spacing() const { return length_ / static_cast<double>(dim_); }
  const Observable& position_op() const { return position_; }
  const Observable& momentum_op() const { return momentum_; }
  double position(std::size_t j) const { return position_.eigenvalue(j); }
  double momentum(std::size_t k) const { return momentum_.eigenvalue(k); }

  /// Periodic distance between two positions.
  double modular_distance(double x, double y) const;
  /// x0 + p0 t / m reduced into [0, L).
  double classical_position(std::size_t x0_index, std::size_t p0_index, double t) const;

 private:
  std::size_t dim_;
  double length_;
  double mass_;
  double hbar_;
  Observable position_;
  Observable momentum_;
};

struct PropagatorField {
  ComplexConditional conditional;  // pre/post form over x_t
  std::size_t dim;
  double length;
  double mass;
  double hbar;
  double t;
  std::size_t x0_index;
  std::size_t p0_index;
  double classical_position;
};

/// p(x_t | x0, p0) = <p0|U^dagger(t)|x_t><x_t|U(t)|x0> / <p0|x0>, U(t) = exp(-i p^2 t / (2 m hbar)).
PropagatorField free_propagator_conditional(const LatticeParticle& sys, std::size_t x0_index,
                                            std::size_t p0_index, double t);

/// |arg p(x_{j+1}) - arg p(x_j)| (wrapped to [0, pi]) for every site j, periodic.
std::vector<double> phase_gradient(const PropagatorField& field);

struct CoarseGrained {
  std::vector<double> distribution;  // one value per lattice site, sums to one
  std::size_t argmax;                // lowest index on ties
  double kernel_width;
};

/// Periodic Gaussian smoothing (standard deviation `kernel_width`, position
/// units) of the complex conditional, then the modulus renormalized to sum one.
/// Throws KernelTooNarrow below two lattice spacings.
CoarseGrained coarse_grain(const PropagatorField& field, double kernel_width);

}  // namespace wvstat
