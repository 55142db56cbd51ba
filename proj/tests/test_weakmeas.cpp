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
#include <string>

#include "oracles.hpp"
#include "wvstat/random.hpp"
#include "wvstat/weakmeas.hpp"

using namespace wvstat;

namespace {

const double kR = std::numbers::sqrt2 / 2.0;

StateVector plus_i() {
  CVector v(2);
  v << kR, Complex(0, kR);
  return StateVector(v);
}

Observable px() { return spectral_decompose(pauli::x()); }
Observable pz() { return spectral_decompose(pauli::z()); }

// <m|A|psi> / <m|psi> from plain loops.
oracle::C naive_weak_value(const CMatrix& a, const StateVector& psi, const StateVector& m) {
  const auto mv = oracle::to_vec(m.amplitudes());
  const auto pv = oracle::to_vec(psi.amplitudes());
  return oracle::inner(mv, oracle::apply(oracle::to_mat(a), pv)) / oracle::inner(mv, pv);
}

}  // namespace

TEST_CASE("pointer model validates its grid") {
  CHECK_THROWS_AS(PointerModel(0.0), Error);
  CHECK_THROWS_AS(PointerModel(1.0, -0.1), Error);
  CHECK_THROWS_AS(PointerModel(1.0, 0.0, 128), Error);
  CHECK_THROWS_AS(PointerModel(1.0, 0.0, 1024, 6.0), Error);
  const PointerModel p;
  CHECK(std::abs(p.discrete_norm() - 1.0) < 1e-8);
  CHECK(p.position(0) == doctest::Approx(-10.0));
  CHECK(p.momentum(p.grid_points() / 2) == 0.0);
}

TEST_CASE("zero coupling leaves the pointer in place") {
  const auto psi = StateVector::basis_state(2, 0);
  const auto r = couple_and_postselect(px(), psi, plus_i(), PointerModel());
  CHECK(std::abs(r.mean_position_shift) < 1e-12);
  CHECK(std::abs(r.mean_momentum_shift) < 1e-12);
  CHECK(std::abs(r.postselection_probability - 0.5) < 1e-10);
}

TEST_CASE("eigenstate input displaces the pointer by g times the eigenvalue") {
  const auto z = pz();
  for (double g : {0.01, 0.1, 0.5}) {
    for (std::size_t k = 0; k < 2; ++k) {
      const auto e = z.eigenbasis().vector(k);
      const auto r = couple_and_postselect(z, e, e, PointerModel(1.0, g));
      CHECK(std::abs(r.mean_position_shift - g * z.eigenvalue(k)) < 1e-12);
      CHECK(std::abs(r.mean_momentum_shift) < 1e-12);
      CHECK(std::abs(r.postselection_probability - 1.0) < 1e-10);
    }
  }
}

TEST_CASE("postselection probability is continuous in g") {
  CounterRng rng(11);
  const auto a = random_observable(3, rng);
  const auto psi = random_state(3, rng);
  const auto m = random_state(3, rng);
  const double born = std::norm(m.inner(psi));
  double prev = couple_and_postselect(a, psi, m, PointerModel()).postselection_probability;
  CHECK(std::abs(prev - born) < 1e-10);
  for (double g = 1e-3; g < 0.2; g *= 1.5) {
    const double p = couple_and_postselect(a, psi, m, PointerModel(1.0, g)).postselection_probability;
    CHECK(p >= -1e-10);
    CHECK(p <= 1.0 + 1e-10);
    CHECK(std::abs(p - prev) < 0.05);
    prev = p;
  }
}

TEST_CASE("momentum calibration agrees with Gaussian linear response") {
  const auto cal = calibrate_momentum_response(PointerModel(), CouplingLadder{});
  CHECK(cal.ladder_slopes.size() == 5);
  CHECK(std::abs(cal.coefficient - cal.gaussian_reference) < 1e-6);
  const auto wide = calibrate_momentum_response(PointerModel(2.0), CouplingLadder{0.4});
  CHECK(std::abs(wide.coefficient - 0.125) < 1e-6);
}

TEST_CASE("weak-value ladder recovers -i for the reference case") {
  const auto psi = StateVector::basis_state(2, 0);
  const auto m = plus_i();
  const auto ideal = naive_weak_value(pauli::x(), psi, m);
  CHECK(std::abs(ideal - oracle::C(0, -1)) < 1e-15);

  const auto ladder = weak_value_ladder(px(), psi, m, PointerModel(), CouplingLadder{});
  CHECK(std::abs(ladder.extrapolated.real() - ideal.real()) < 1e-3);
  CHECK(std::abs(ladder.extrapolated.imag() - ideal.imag()) < 1e-3);
  for (std::size_t i = 0; i + 1 < ladder.estimates.size(); ++i) {
    const double coarse = std::abs(ladder.estimates[i] - Complex(ideal));
    const double fine = std::abs(ladder.estimates[i + 1] - Complex(ideal));
    CHECK(coarse / fine >= 1.6);
  }
}

TEST_CASE("weak-value ladder matches random instances") {
  CounterRng rng(2024);
  for (int trial = 0; trial < 5; ++trial) {
    const std::size_t d = 2 + static_cast<std::size_t>(trial % 3);
    const auto a = random_observable(d, rng);
    const auto psi = random_state(d, rng);
    const auto m = random_state(d, rng);
    const auto ideal = naive_weak_value(a.matrix(), psi, m);
    // Keep the largest displacement well inside the grid.
    const double scale = a.eigenvalues().cwiseAbs().maxCoeff();
    const auto ladder = weak_value_ladder(a, psi, m, PointerModel(), CouplingLadder{0.05 / scale});
    CHECK(std::abs(ladder.extrapolated - Complex(ideal)) < 1e-3 * std::max(1.0, std::abs(ideal)));
  }
}

TEST_CASE("richardson removes the named order") {
  const std::vector<double> seq{1.0 + 0.04, 1.0 + 0.01, 1.0 + 0.0025};
  CHECK(std::abs(richardson(seq, 2.0, 2) - 1.0) < 1e-14);
  const std::vector<double> lin{1.0 + 0.2, 1.0 + 0.1};
  CHECK(std::abs(richardson(lin, 2.0, 1) - 1.0) < 1e-14);
}

TEST_CASE("guard rails") {
  const auto zero = StateVector::basis_state(2, 0);
  const auto one = StateVector::basis_state(2, 1);
  try {
    couple_and_postselect(px(), zero, one, PointerModel(1.0, 0.1));
    FAIL("expected OrthogonalPostselection");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::OrthogonalPostselection);
  }
  MeasurementOptions rare;
  rare.allow_rare_postselection = true;
  const auto r = couple_and_postselect(px(), zero, one, PointerModel(1.0, 0.1), rare);
  CHECK(r.postselection_probability > 0.0);
  CHECK(r.postselection_probability < 1e-2);
  try {
    couple_and_postselect(px(), zero, plus_i(), PointerModel(1.0, 6.0));
    FAIL("expected GridTooCoarse");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::GridTooCoarse);
  }
}

TEST_CASE("sampled readouts are deterministic and unbiased") {
  const auto z = pz();
  const auto up = StateVector::basis_state(2, 0);
  const PointerModel ptr(1.0, 0.05);
  const auto a = sample_readouts(z, up, up, ptr, 1000000, 99);
  const auto b = sample_readouts(z, up, up, ptr, 1000000, 99);
  CHECK(a.mean_position_shift == b.mean_position_shift);
  CHECK(a.mean_momentum_shift == b.mean_momentum_shift);
  CHECK(a.sample_count == 1000000);
  CHECK(std::abs(a.mean_position_shift - 0.05) < 5.0 * a.position_standard_error);

  const auto other = sample_readouts(z, up, up, ptr, 1000000, 100);
  CHECK(other.mean_position_shift != a.mean_position_shift);

  const auto psi = StateVector::basis_state(2, 0);
  const auto m = plus_i();
  const auto exact = couple_and_postselect(px(), psi, m, ptr);
  const auto mc = sample_readouts(px(), psi, m, ptr, 1000000, 5);
  CHECK(std::abs(mc.mean_position_shift - exact.mean_position_shift) < 5.0 * mc.position_standard_error);
  CHECK(std::abs(mc.mean_momentum_shift - exact.mean_momentum_shift) < 5.0 * mc.momentum_standard_error);
  CHECK(mc.postselection_probability == exact.postselection_probability);
}

TEST_CASE("standard errors scale as inverse square root of samples") {
  const auto psi = StateVector::basis_state(2, 0);
  const PointerModel ptr(1.0, 0.1);
  double prev = 0.0;
  for (std::size_t n : {1000u, 10000u, 100000u, 1000000u}) {
    const auto r = sample_readouts(px(), psi, plus_i(), ptr, n, 3);
    const double scaled = r.position_standard_error * std::sqrt(static_cast<double>(n));
    if (prev > 0.0) {
      CHECK(scaled / prev < 2.0);
      CHECK(scaled / prev > 0.5);
    }
    prev = scaled;
  }
}

TEST_CASE("z-scores of seeded trials stay small") {
  const auto psi = StateVector::basis_state(2, 0);
  const auto m = plus_i();
  const PointerModel ptr(1.0, 0.1);
  const auto exact = couple_and_postselect(px(), psi, m, ptr);
  int outliers = 0;
  const int trials = 200;
  for (int s = 0; s < trials; ++s) {
    const auto r = sample_readouts(px(), psi, m, ptr, 2000, static_cast<std::uint64_t>(s));
    const double zq = (r.mean_position_shift - exact.mean_position_shift) / r.position_standard_error;
    const double zp = (r.mean_momentum_shift - exact.mean_momentum_shift) / r.momentum_standard_error;
    if (std::abs(zq) >= 5.0 || std::abs(zp) >= 5.0) ++outliers;
  }
  CHECK(outliers <= trials / 100);
}

TEST_CASE("direct KD: basis-state input concentrates on one row") {
  const auto za = OrthonormalBasis::computational(2);
  const auto xb = OrthonormalBasis::qubit_x();
  const auto ladder = direct_kd_extrapolated(za, xb, StateVector::basis_state(2, 1), PointerModel(), CouplingLadder{});
  const CMatrix& v = ladder.extrapolated.values();
  CHECK(std::abs(v(0, 0)) < 1e-9);
  CHECK(std::abs(v(0, 1)) < 1e-9);
  CHECK(std::abs(v(1, 0) - 0.5) < 1e-6);
  CHECK(std::abs(v(1, 1) - 0.5) < 1e-6);
  CHECK(std::abs(v(1, 0).imag()) < 1e-9);
}

TEST_CASE("direct KD: qubit z/x pattern with shrinking bias") {
  CVector s(2);
  s << kR, Complex(0, kR);
  const StateVector psi(s);
  const auto za = OrthonormalBasis::computational(2);
  const auto xb = OrthonormalBasis::qubit_x();
  // Oracle: <b|a><a|psi><psi|b> by loops.
  oracle::Mat kd(2, oracle::Vec(2));
  for (std::size_t a = 0; a < 2; ++a) {
    for (std::size_t b = 0; b < 2; ++b) {
      const auto av = oracle::column(za, a), bv = oracle::column(xb, b), pv = oracle::to_vec(s);
      kd[a][b] = oracle::inner(bv, av) * oracle::inner(av, pv) * oracle::inner(pv, bv);
    }
  }
  CHECK(std::abs(kd[0][0] - oracle::C(0.25, -0.25)) < 1e-15);
  CHECK(std::abs(kd[1][0] - oracle::C(0.25, 0.25)) < 1e-15);

  const auto ladder = direct_kd_extrapolated(za, xb, psi, PointerModel(), CouplingLadder{});
  CHECK(oracle::max_dev(kd, ladder.extrapolated.values()) < 1e-6);
  for (std::size_t r = 0; r + 1 < ladder.rungs.size(); ++r) {
    const double coarse = oracle::max_dev(kd, ladder.rungs[r].estimate.values());
    const double fine = oracle::max_dev(kd, ladder.rungs[r + 1].estimate.values());
    CHECK(coarse / fine >= 1.6);
  }
  // Marginal over a is the Born distribution of b, up to the finite-g bias.
  const auto marg = ladder.rungs.back().estimate.marginal_over_a();
  CHECK(std::abs(marg[0] - Complex(0.5)) < 1e-3);
  CHECK(std::abs(marg[1] - Complex(0.5)) < 1e-3);
}

TEST_CASE("direct KD: random qutrit extrapolates to the KD distribution") {
  CounterRng rng(7);
  const auto a = random_basis(3, rng);
  const auto b = random_basis(3, rng);
  const auto psi = random_state(3, rng);
  const auto ladder = direct_kd_extrapolated(a, b, psi, PointerModel(), CouplingLadder{});
  oracle::Mat kd(3, oracle::Vec(3));
  const auto pv = oracle::to_vec(psi.amplitudes());
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      const auto av = oracle::column(a, i), bv = oracle::column(b, j);
      kd[i][j] = oracle::inner(bv, av) * oracle::inner(av, pv) * oracle::inner(pv, bv);
    }
  }
  CHECK(oracle::max_dev(kd, ladder.extrapolated.values()) < 1e-6);
}

TEST_CASE("direct KD: sampled channels use independent substreams") {
  const auto za = OrthonormalBasis::computational(2);
  const auto xb = OrthonormalBasis::qubit_x();
  CVector s(2);
  s << kR, Complex(0, kR);
  DirectKdOptions opts;
  opts.samples = 20000;
  opts.seed = 17;
  const auto r1 = direct_kd_measurement(za, xb, StateVector(s), PointerModel(1.0, 0.1), opts);
  const auto r2 = direct_kd_measurement(za, xb, StateVector(s), PointerModel(1.0, 0.1), opts);
  CHECK(r1.estimate.values() == r2.estimate.values());
  CHECK(r1.channels.size() == 4);
  CHECK(r1.channels[0].readout.mean_position_shift != r1.channels[1].readout.mean_position_shift);
}

TEST_CASE("direct KD: orthogonal channel is labelled or skipped") {
  const auto za = OrthonormalBasis::computational(2);
  const auto zb = OrthonormalBasis::computational(2);
  const auto psi = StateVector::basis_state(2, 0);
  try {
    direct_kd_measurement(za, zb, psi, PointerModel(1.0, 0.1));
    FAIL("expected OrthogonalPostselection");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::OrthogonalPostselection);
    CHECK(std::string(e.what()).find("(a=0, b=1)") != std::string::npos);
  }
  DirectKdOptions opts;
  opts.measurement.allow_rare_postselection = true;
  const auto r = direct_kd_measurement(za, zb, psi, PointerModel(1.0, 0.1), opts);
  CHECK(r.channels[1].skipped);
  CHECK(r.estimate.values()(0, 1) == Complex(0.0));
}
