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


#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "wvstat/dynamics.hpp"
#include "wvstat/random.hpp"

using namespace wvstat;
using std::numbers::pi;

namespace {

const double kR = std::numbers::sqrt2 / 2.0;

StateVector plus_i() {
  CVector v(2);
  v << kR, Complex(0, kR);
  return StateVector(v);
}

Observable half_z(double omega, double hbar = 1.0) {
  return spectral_decompose(0.5 * hbar * omega * pauli::z());
}

}  // namespace

TEST_CASE("heisenberg_at: trivial cases") {
  CounterRng rng(1);
  const auto a = random_observable(4, rng);
  const auto h = random_observable(4, rng);
  CHECK(max_abs_deviation(heisenberg_at(a, h, 0.0).matrix(), a.matrix()) < 1e-12);
  // A function of H commutes with H.
  const auto f = spectral_decompose(h.matrix() * h.matrix() + 2.0 * h.matrix());
  CHECK(max_abs_deviation(heisenberg_at(f, h, 3.7).matrix(), f.matrix()) < 1e-10);
  CHECK_THROWS_AS(heisenberg_at(a, spectral_decompose(pauli::z()), 1.0), Error);
}

TEST_CASE("heisenberg_at: qubit rotation against the 2x2 exponential") {
  const double omega = 1.3;
  const double t = pi / (2.0 * omega);
  // exp(-i H t) with H = (omega/2) Z is diagonal: phases e^{-i omega t / 2}, e^{+i omega t / 2}.
  oracle::Mat u{{std::polar(1.0, -omega * t / 2.0), 0.0}, {0.0, std::polar(1.0, omega * t / 2.0)}};
  const auto expected = oracle::mul(oracle::adjoint(u), oracle::mul(oracle::to_mat(pauli::x()), u));
  const auto got = heisenberg_at(spectral_decompose(pauli::x()), half_z(omega), t);
  CHECK(oracle::max_dev(expected, got.matrix()) < 1e-12);
  CHECK(max_abs_deviation(got.matrix(), -pauli::y()) < 1e-12);
}

TEST_CASE("heisenberg_at: spectrum invariant over time") {
  CounterRng rng(5);
  const auto a = random_observable(5, rng);
  const auto h = random_observable(5, rng);
  for (double t : {0.1, 1.0, 10.0, -4.0}) {
    const auto at = heisenberg_at(a, h, t);
    CHECK((at.eigenvalues() - a.eigenvalues()).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("motion identity: commuting pair gives zero") {
  const auto z = spectral_decompose(pauli::z());
  const auto r = motion_identity_check(z, half_z(2.0), plus_i(), 1e-3);
  CHECK(std::abs(r.lhs) < 1e-10);
  CHECK(std::abs(r.rhs) < 1e-12);
}

TEST_CASE("motion identity: qubit case equals -omega") {
  const double omega = 0.8;
  // <sigma_x(t)> = -sin(omega t) for this state, so the derivative at 0 is -omega.
  const auto ladder = motion_identity_ladder(spectral_decompose(pauli::x()), half_z(omega), plus_i(),
                                             {1e-2, 5e-3, 2.5e-3});
  for (const auto& s : ladder.sides) {
    CHECK(std::abs(s.rhs + omega) < 1e-12);
    CHECK(std::abs(s.lhs + omega) < 1e-4);
  }
  CHECK(std::abs(ladder.slope - 2.0) < 0.3);
}

TEST_CASE("motion identity: random d = 6 residual scales as dt^2") {
  CounterRng rng(606);
  const auto a = random_observable(6, rng);
  const auto h = random_observable(6, rng);
  const auto psi = random_state(6, rng);
  const double scale = h.eigenvalues().cwiseAbs().maxCoeff();
  const auto ladder = motion_identity_ladder(a, h, psi, {0.02 / scale, 0.01 / scale, 0.005 / scale});
  CHECK(std::abs(ladder.slope - 2.0) < 0.3);
  // rhs does not depend on dt.
  CHECK(std::abs(ladder.sides[0].rhs - ladder.sides[2].rhs) < 1e-14);
  // Independent value of d<A>/dt: i <[H, A]> / hbar.
  const auto comm = oracle::mul(oracle::to_mat(h.matrix()), oracle::to_mat(a.matrix()));
  const auto rev = oracle::mul(oracle::to_mat(a.matrix()), oracle::to_mat(h.matrix()));
  oracle::Mat c(6, oracle::Vec(6));
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) c[i][j] = comm[i][j] - rev[i][j];
  const auto pv = oracle::to_vec(psi.amplitudes());
  const double deriv = (oracle::C(0, 1) * oracle::inner(pv, oracle::apply(c, pv))).real();
  CHECK(std::abs(ladder.sides[0].rhs - deriv) < 1e-10);
}

TEST_CASE("motion identity rejects degenerate spectra") {
  CHECK_THROWS_AS(motion_identity_check(spectral_decompose(pauli::x()),
                                        spectral_decompose(CMatrix::Identity(2, 2), 1e-10, Degeneracy::Allow),
                                        plus_i(), 1e-3),
                  Error);
}

TEST_CASE("truncated oscillator is near-canonical") {
  for (std::size_t d : {16u, 64u}) {
    const TruncatedOscillatorPair osc(d);
    CHECK(osc.commutator_defect() < 1e-9);
  }
  CHECK_THROWS_AS(TruncatedOscillatorPair(2), Error);
  CHECK_THROWS_AS(TruncatedOscillatorPair(8, -1.0), Error);
}

TEST_CASE("two-time correlation: equal times and antisymmetry") {
  const TruncatedOscillatorPair osc(64);
  const auto h = osc.free_hamiltonian();
  const auto g = osc.fock_state(0);
  const auto same = two_time_imag_correlation(osc, h, g, 0.7, 0.7);
  CHECK(std::abs(same.measured) < 1e-12);
  CHECK(same.predicted == 0.0);
  const auto fwd = two_time_imag_correlation(osc, h, g, 0.3, 1.1);
  const auto back = two_time_imag_correlation(osc, h, g, 1.1, 0.3);
  CHECK(std::abs(fwd.measured + back.measured) < 1e-10);
}

TEST_CASE("two-time correlation: magnitude, sign and linearity") {
  const TruncatedOscillatorPair osc(64);
  const auto h = osc.free_hamiltonian();
  const auto g = osc.fock_state(0);
  // With x(t) = x + p t / m and <x p> = i hbar / 2 for a real ground state,
  // Im <x(t2) x(t1)> = hbar (t1 - t2) / (2m).
  for (double dt : {0.5, 1.0, 2.0}) {
    const auto r = two_time_imag_correlation(osc, h, g, 0.0, dt);
    const double derived = -osc.hbar() * dt / (2.0 * osc.mass());
    CHECK(std::abs(r.measured - derived) <= 1e-3 * std::abs(derived) + 1e-8);
    CHECK(std::abs(std::abs(r.measured) - r.predicted) <= r.tolerance);
    CHECK(r.max_leakage < 1e-6);
  }
  const auto one = two_time_imag_correlation(osc, h, g, 0.0, 0.4);
  const auto two = two_time_imag_correlation(osc, h, g, 0.0, 0.8);
  CHECK(std::abs(two.measured - 2.0 * one.measured) <= two.tolerance);
}

TEST_CASE("two-time correlation: error shrinks with dimension") {
  double prev = 1.0;
  for (std::size_t d : {32u, 64u, 128u}) {
    const TruncatedOscillatorPair osc(d);
    const auto r = two_time_imag_correlation(osc, osc.free_hamiltonian(), osc.fock_state(0), 0.0, 1.0);
    const double err = std::abs(r.measured + 0.5);
    CHECK(err <= prev + 1e-12);
    prev = err;
  }
}

TEST_CASE("two-time correlation: guard catches leakage") {
  const TruncatedOscillatorPair osc(64);
  try {
    two_time_imag_correlation(osc, osc.free_hamiltonian(), osc.fock_state(40), 0.0, 1.0);
    FAIL("expected TruncationViolated");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::TruncationViolated);
  }
}

TEST_CASE("lattice momentum basis is the discrete Fourier transform") {
  const LatticeParticle lp(32, 10.0, 1.0);
  const auto& basis = lp.momentum_op().eigenbasis();
  for (std::size_t k = 0; k < 32; ++k) {
    const int n = static_cast<int>(k) - 16;
    CHECK(std::abs(lp.momentum(k) - 2.0 * pi * n / 10.0) < 1e-12);
    for (std::size_t j = 0; j < 32; ++j) {
      const auto expected = std::polar(1.0 / std::sqrt(32.0), 2.0 * pi * static_cast<double>(j) * n / 32.0);
      CHECK(std::abs(basis.column(k)(static_cast<Eigen::Index>(j)) - expected) < 1e-10);
    }
  }
  CHECK(hermiticity_defect(lp.position_op().matrix()) < 1e-12);
  CHECK(lp.modular_distance(0.5, 9.5) == doctest::Approx(1.0));
  CHECK_THROWS_AS(LatticeParticle(8, 1.0, 1.0), Error);
}

TEST_CASE("propagator: identity at t = 0 and normalized always") {
  const LatticeParticle lp(64, 64.0, 1.0);
  const auto f0 = free_propagator_conditional(lp, 10, 40, 0.0);
  for (std::size_t j = 0; j < 64; ++j) {
    CHECK(std::abs(f0.conditional.values()[j] - Complex(j == 10 ? 1.0 : 0.0)) < 1e-10);
  }
  for (double t : {0.3, 5.0, 50.0, 1e3}) {
    const auto f = free_propagator_conditional(lp, 3, 50, t);
    Complex s = 0.0;
    for (const auto& v : f.conditional.values()) s += v;
    CHECK(std::abs(s - 1.0) < 1e-10);
  }
}

TEST_CASE("propagator: direct evaluation of the conditional") {
  const std::size_t d = 16;
  const LatticeParticle lp(d, 16.0, 2.0);
  const double t = 1.5;
  const auto f = free_propagator_conditional(lp, 4, 11, t);
  // Independent construction from plane waves: <x_j|p_n> = e^{2 pi i j n / d} / sqrt(d).
  const int n0 = 11 - static_cast<int>(d / 2);
  auto plane = [&](std::size_t j, int n) { return std::polar(1.0 / std::sqrt(double(d)), 2.0 * pi * double(j) * n / double(d)); };
  auto energy = [&](int n) { const double p = 2.0 * pi * n / 16.0; return p * p / (2.0 * 2.0); };
  for (std::size_t x = 0; x < d; ++x) {
    oracle::C u_x_x0 = 0.0;
    for (int n = -static_cast<int>(d / 2); n < static_cast<int>(d / 2); ++n) {
      u_x_x0 += plane(x, n) * std::polar(1.0, -energy(n) * t) * std::conj(plane(4, n));
    }
    const oracle::C p0_udag_x = std::polar(1.0, energy(n0) * t) * std::conj(plane(x, n0));
    const oracle::C p0_x0 = std::conj(plane(4, n0));
    CHECK(std::abs(p0_udag_x * u_x_x0 / p0_x0 - f.conditional.values()[x]) < 1e-12);
  }
}

TEST_CASE("propagator: phase is stationary near the classical point") {
  const LatticeParticle lp(256, 256.0, 1.0);
  const auto f = free_propagator_conditional(lp, 30, 128 + 32, 40.0);
  const auto grad = phase_gradient(f);
  // Search a window of +-40 sites around the classical point.
  const auto centre = static_cast<long>(std::lround(f.classical_position));
  long best = centre;
  double best_val = 1e9;
  for (long k = centre - 40; k <= centre + 40; ++k) {
    const auto j = static_cast<std::size_t>((k % 256 + 256) % 256);
    if (grad[j] < best_val) {
      best_val = grad[j];
      best = k;
    }
  }
  CHECK(lp.modular_distance(static_cast<double>(best), f.classical_position) < 2.0);
}

TEST_CASE("coarse_grain: t = 0 peaks at x0") {
  const LatticeParticle lp(64, 64.0, 1.0);
  const auto f = free_propagator_conditional(lp, 17, 40, 0.0);
  for (double w : {2.0, 5.0, 12.0}) CHECK(coarse_grain(f, w).argmax == 17);
  try {
    coarse_grain(f, 1.5);
    FAIL("expected KernelTooNarrow");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::KernelTooNarrow);
  }
}

TEST_CASE("coarse_grain: follows classical displacement of L/4") {
  const LatticeParticle lp(256, 256.0, 1.0);
  const std::size_t p0 = 128 + 32;
  const double t = 64.0 / lp.momentum(p0);  // m = 1
  const auto f = free_propagator_conditional(lp, 100, p0, t);
  const double width = 8.0;
  const auto c = coarse_grain(f, width);
  CHECK(lp.modular_distance(lp.position(c.argmax), 100.0 + 64.0) <= width);
  double total = 0.0;
  for (double v : c.distribution) total += v;
  CHECK(std::abs(total - 1.0) < 1e-12);
}

TEST_CASE("coarse_grain: flattens as the kernel widens") {
  const LatticeParticle lp(256, 256.0, 1.0);
  const auto f = free_propagator_conditional(lp, 0, 128 + 24, 30.0);
  double prev = 1e300;
  for (double w : {8.0, 24.0, 64.0}) {
    const auto c = coarse_grain(f, w);
    const auto [lo, hi] = std::minmax_element(c.distribution.begin(), c.distribution.end());
    const double ratio = *hi / std::max(*lo, 1e-300);
    CHECK(ratio < prev);
    prev = ratio;
  }
}
