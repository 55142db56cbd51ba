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

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "wvstat/hilbert.hpp"
#include "wvstat/random.hpp"

using namespace wvstat;
using std::numbers::pi;

namespace {

const double kR = std::numbers::sqrt2 / 2.0;

StateVector ket(std::initializer_list<Complex> amps) {
  CVector v(static_cast<Eigen::Index>(amps.size()));
  Eigen::Index i = 0;
  for (auto a : amps) v(i++) = a;
  return StateVector(v);
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected wvstat::Error");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("state vectors enforce normalization and dimension") {
  CHECK_NOTHROW(ket({kR, Complex(0, kR)}));
  CVector off(2);
  off << 1.0, 1e-5;  // norm deviates by 5e-11
  CHECK(kind_of([&] { StateVector s(off); }) == ErrorKind::NotNormalized);
  CVector one(1);
  one << 1.0;
  CHECK(kind_of([&] { StateVector s(one); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([] { StateVector::normalized(CVector::Zero(3)); }) == ErrorKind::NotNormalized);
  CHECK(StateVector::normalized(off).amplitudes().norm() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("bases reject non-orthonormal columns") {
  CMatrix m(2, 2);
  m << 1, 1,
       0, 1;
  CHECK(kind_of([&] { OrthonormalBasis b(m); }) == ErrorKind::NotOrthonormal);
  for (std::size_t d : {2u, 3u, 7u, 16u}) {
    CHECK_NOTHROW(OrthonormalBasis::fourier(d));
  }
}

TEST_CASE("fix_phase makes the largest component real positive, lowest index on ties") {
  CVector v(3);
  v << Complex(0.1, 0), Complex(0, -0.9), Complex(0.3, 0.3);
  fix_phase(v);
  CHECK(v(1).real() > 0.0);
  CHECK(v(1).imag() == 0.0);
  CVector tie(2);
  tie << Complex(0, kR), Complex(-kR, 0);
  fix_phase(tie);
  CHECK(tie(0).real() == doctest::Approx(kR));
  CHECK(tie(0).imag() == 0.0);
  CHECK(std::abs(tie(1) - Complex(0, kR)) < 1e-15);
}

TEST_CASE("spectral_decompose: identity is degenerate") {
  CHECK(kind_of([] { spectral_decompose(CMatrix::Identity(2, 2)); }) == ErrorKind::DegenerateSpectrum);
  const Observable id = spectral_decompose(CMatrix::Identity(2, 2), 1e-10, Degeneracy::Allow);
  CHECK(id.degenerate());
  CHECK(kind_of([&] { id.require_nondegenerate("test"); }) == ErrorKind::DegenerateSpectrum);
}

TEST_CASE("spectral_decompose: non-Hermitian input") {
  CMatrix m(2, 2);
  m << 1, 2,
       0, 1;
  CHECK(kind_of([&] { spectral_decompose(m); }) == ErrorKind::NotHermitian);
  CMatrix rect(2, 3);
  CHECK(kind_of([&] { spectral_decompose(rect); }) == ErrorKind::DimensionMismatch);
}

TEST_CASE("spectral_decompose: Pauli-z is already diagonal") {
  const Observable z = spectral_decompose(pauli::z());
  CHECK(z.eigenvalue(0) == doctest::Approx(-1.0));
  CHECK(z.eigenvalue(1) == doctest::Approx(1.0));
  CHECK(std::abs(z.eigenbasis().column(0)(1) - 1.0) < 1e-15);  // |1>
  CHECK(std::abs(z.eigenbasis().column(1)(0) - 1.0) < 1e-15);  // |0>
}

TEST_CASE("spectral_decompose: Pauli-x against the characteristic polynomial") {
  const Observable x = spectral_decompose(pauli::x());
  const auto [lo, hi] = oracle::eig2x2(oracle::to_mat(pauli::x()));
  CHECK(x.eigenvalue(0) == doctest::Approx(lo).epsilon(1e-14));
  CHECK(x.eigenvalue(1) == doctest::Approx(hi).epsilon(1e-14));
  // Phase convention: lowest index of the tied largest components is real positive.
  CHECK(std::abs(x.eigenbasis().column(0)(0) - kR) < 1e-14);
  CHECK(std::abs(x.eigenbasis().column(0)(1) + kR) < 1e-14);
  CHECK(std::abs(x.eigenbasis().column(1)(0) - kR) < 1e-14);
  CHECK(std::abs(x.eigenbasis().column(1)(1) - kR) < 1e-14);
  // Reconstruction sum_k lambda_k P_k.
  CMatrix recon = CMatrix::Zero(2, 2);
  for (std::size_t k = 0; k < 2; ++k) recon += x.eigenvalue(k) * x.projector(k);
  CHECK(max_abs_deviation(recon, pauli::x()) < 1e-12);
}

TEST_CASE("spectral_decompose: random Hermitian 2x2 matches char-poly roots") {
  CounterRng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    CMatrix g(2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) g(i, j) = rng.complex_normal();
    const CMatrix h = 0.5 * (g + g.adjoint());
    const Observable o = spectral_decompose(h);
    const auto [lo, hi] = oracle::eig2x2(oracle::to_mat(h));
    CHECK(std::abs(o.eigenvalue(0) - lo) < 1e-12);
    CHECK(std::abs(o.eigenvalue(1) - hi) < 1e-12);
  }
}

TEST_CASE("expectation") {
  const Observable id = spectral_decompose(CMatrix::Identity(3, 3), 1e-10, Degeneracy::Allow);
  CounterRng rng(11);
  CHECK(expectation(id, random_state(3, rng)) == doctest::Approx(1.0).epsilon(1e-14));
  const Observable z = spectral_decompose(pauli::z());
  CHECK(expectation(z, StateVector::basis_state(2, 0)) == doctest::Approx(1.0));
  const StateVector plus = ket({kR, kR});
  // Direct arithmetic: conj(a0) a0 - conj(a1) a1.
  const double oracle_value = std::norm(plus[0]) - std::norm(plus[1]);
  CHECK(std::abs(expectation(z, plus) - oracle_value) < 1e-15);
  CHECK(kind_of([&] { expectation(z, random_state(3, rng)); }) == ErrorKind::DimensionMismatch);
}

TEST_CASE("commutator") {
  const Observable x = spectral_decompose(pauli::x());
  const Observable z = spectral_decompose(pauli::z());
  CHECK(commutator(x, x).cwiseAbs().maxCoeff() < 1e-15);
  // Oracle: hand-rolled 2x2 products.
  const auto zx = oracle::mul(oracle::to_mat(pauli::z()), oracle::to_mat(pauli::x()));
  const auto xz = oracle::mul(oracle::to_mat(pauli::x()), oracle::to_mat(pauli::z()));
  oracle::Mat expect(2, oracle::Vec(2));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) expect[i][j] = zx[i][j] - xz[i][j];
  const CMatrix c = commutator(z, x);
  CHECK(oracle::max_dev(expect, c) < 1e-14);
  CHECK(max_abs_deviation(c, Complex(0, 2) * pauli::y()) < 1e-14);
  // Diagonal observables commute.
  RVector e1(3), e2(3);
  e1 << -1, 0.5, 2;
  e2 << 0, 1, 3;
  const auto comp = OrthonormalBasis::computational(3);
  const CMatrix zero = commutator(Observable::from_spectrum(e1, comp), Observable::from_spectrum(e2, comp));
  CHECK(zero.cwiseAbs().maxCoeff() < 1e-15);
  // Anti-Hermitian for random inputs.
  CounterRng rng(3);
  for (int i = 0; i < 20; ++i) {
    const CMatrix r = commutator(random_observable(5, rng), random_observable(5, rng));
    CHECK(max_abs_deviation(r, -r.adjoint()) < 1e-10);
  }
}

TEST_CASE("unitary maps") {
  CMatrix m(2, 2);
  m << 1, 1,
       0, 1;
  CHECK(kind_of([&] { UnitaryMap u(m); }) == ErrorKind::NotUnitary);
  const auto id = UnitaryMap::identity(2);
  const StateVector psi = ket({kR, Complex(0, kR)});
  CHECK((evolve(id, psi).amplitudes() - psi.amplitudes()).norm() < 1e-15);
  const Observable x = spectral_decompose(pauli::x());
  CHECK(max_abs_deviation(evolve_heisenberg(id, x).matrix(), x.matrix()) < 1e-15);
}

TEST_CASE("evolve_heisenberg: exp(-i theta Z / 2) rotates X into -Y at theta = pi/2") {
  const double theta = pi / 2.0;
  // Oracle: Z is diagonal, so exp(-i theta Z/2) = diag(e^{-i theta/2}, e^{+i theta/2}).
  oracle::Mat u_or = {{std::polar(1.0, -theta / 2), 0.0}, {0.0, std::polar(1.0, theta / 2)}};
  const auto evolved_or = oracle::mul(oracle::mul(oracle::adjoint(u_or), oracle::to_mat(pauli::x())), u_or);
  const Observable half_z = spectral_decompose(0.5 * pauli::z());
  const UnitaryMap u = UnitaryMap::time_evolution(half_z, theta);
  const Observable evolved = evolve_heisenberg(u, spectral_decompose(pauli::x()));
  CHECK(oracle::max_dev(evolved_or, evolved.matrix()) < 1e-14);
  CHECK(max_abs_deviation(evolved.matrix(), -pauli::y()) < 1e-14);
  CHECK(evolved.eigenvalue(0) == doctest::Approx(-1.0));
  CHECK(evolved.eigenvalue(1) == doctest::Approx(1.0));
}

TEST_CASE("property: dual-picture consistency and spectrum invariance (d <= 8)") {
  CounterRng rng(2024);
  for (std::size_t d = 2; d <= 8; ++d) {
    for (int trial = 0; trial < 25; ++trial) {
      const UnitaryMap u(random_unitary(d, rng));
      const Observable a = random_observable(d, rng);
      const StateVector psi = random_state(d, rng);
      const double schrodinger = expectation(a, evolve(u, psi));
      const Observable a_h = evolve_heisenberg(u, a);
      CHECK(std::abs(schrodinger - expectation(a_h, psi)) < 1e-10);
      CHECK(hermiticity_defect(a_h.matrix()) < 1e-10);
      // Spectrum invariance, re-diagonalized from scratch.
      const Observable redo = spectral_decompose(a_h.matrix());
      CHECK((redo.eigenvalues() - a.eigenvalues()).cwiseAbs().maxCoeff() < 1e-9);
      CHECK(std::abs(evolve(u, psi).amplitudes().norm() - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("property: every random observable reconstructs from its spectrum") {
  CounterRng rng(99);
  for (std::size_t d = 2; d <= 8; ++d) {
    for (int trial = 0; trial < 20; ++trial) {
      const Observable a = random_observable(d, rng);
      CMatrix recon = CMatrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
      for (std::size_t k = 0; k < d; ++k) recon += a.eigenvalue(k) * a.projector(k);
      CHECK(max_abs_deviation(recon, a.matrix()) < 1e-10);
    }
  }
}
