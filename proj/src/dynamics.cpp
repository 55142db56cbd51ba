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

#include "wvstat/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>

namespace wvstat {

using std::numbers::pi;

Observable heisenberg_at(const Observable& a, const Observable& h, double t, double hbar) {
  require_same_dim(a.dim(), h.dim(), "heisenberg_at");
  return evolve_heisenberg(UnitaryMap::time_evolution(h, t, hbar), a);
}

IdentitySides motion_identity_check(const Observable& a, const Observable& h, const StateVector& psi,
                                    double dt, double hbar) {
  require_same_dim(a.dim(), h.dim(), "motion_identity_check");
  require_same_dim(a.dim(), psi.dim(), "motion_identity_check");
  a.require_nondegenerate("motion_identity_check (A)");
  h.require_nondegenerate("motion_identity_check (H)");
  if (!(dt > 0.0)) throw Error(ErrorKind::InvalidArgument, "dt must be positive");
  const double forward = expectation(a, evolve(UnitaryMap::time_evolution(h, dt, hbar), psi));
  const double backward = expectation(a, evolve(UnitaryMap::time_evolution(h, -dt, hbar), psi));
  const double lhs = (forward - backward) / (2.0 * dt);

  const ComplexJointDistribution rho = kd_joint(h.eigenbasis(), a.eigenbasis(), psi);
  double acc = 0.0;
  for (std::size_t n = 0; n < h.dim(); ++n)
    for (std::size_t k = 0; k < a.dim(); ++k) acc += a.eigenvalue(k) * h.eigenvalue(n) * rho(n, k).imag();
  return IdentitySides{lhs, 2.0 / hbar * acc};
}

MotionLadder motion_identity_ladder(const Observable& a, const Observable& h, const StateVector& psi,
                                    const std::vector<double>& steps, double hbar) {
  if (steps.size() < 2) throw Error(ErrorKind::InvalidArgument, "dt ladder needs at least two steps");
  MotionLadder out;
  out.steps = steps;
  for (double dt : steps) {
    out.sides.push_back(motion_identity_check(a, h, psi, dt, hbar));
    out.residuals.push_back(out.sides.back().deviation());
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(steps.size());
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const double x = std::log(steps[i]);
    const double y = std::log(out.residuals[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  out.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return out;
}

// ---------------------------------------------------------------------------
// Truncated oscillator

namespace {

CMatrix lowering(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  CMatrix a = CMatrix::Zero(n, n);
  for (Eigen::Index k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  return a;
}

CMatrix oscillator_x(std::size_t dim, double mass, double hbar, double w) {
  const CMatrix a = lowering(dim);
  return std::sqrt(hbar / (2.0 * mass * w)) * (a + a.adjoint());
}

CMatrix oscillator_p(std::size_t dim, double mass, double hbar, double w) {
  const CMatrix a = lowering(dim);
  return Complex(0.0, std::sqrt(mass * w * hbar / 2.0)) * (a.adjoint() - a);
}

double positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw Error(ErrorKind::InvalidArgument, std::string(what) + " must be positive");
  }
  return v;
}

std::size_t at_least(std::size_t v, std::size_t floor, const char* what) {
  if (v < floor) {
    throw Error(ErrorKind::InvalidArgument, std::string(what) + " needs at least " + std::to_string(floor));
  }
  return v;
}

}  // namespace

TruncatedOscillatorPair::TruncatedOscillatorPair(std::size_t dim, double mass, double hbar, double frequency)
    : dim_(at_least(dim, 4, "truncated oscillator levels")),
      mass_(positive(mass, "mass")),
      hbar_(positive(hbar, "hbar")),
      frequency_(positive(frequency, "reference frequency")),
      x_(spectral_decompose(oscillator_x(dim_, mass_, hbar_, frequency_))),
      p_(spectral_decompose(oscillator_p(dim_, mass_, hbar_, frequency_))) {}

Observable TruncatedOscillatorPair::free_hamiltonian() const {
  const CMatrix h = p_.matrix() * p_.matrix() / (2.0 * mass_);
  return spectral_decompose(0.5 * (h + h.adjoint()), 1e-10, Degeneracy::Allow);
}

double TruncatedOscillatorPair::commutator_defect() const {
  const CMatrix c = commutator(x_, p_);
  const auto keep = static_cast<Eigen::Index>(dim_ - 2);
  const CMatrix target = Complex(0.0, hbar_) * CMatrix::Identity(keep, keep);
  return max_abs_deviation(c.topLeftCorner(keep, keep), target);
}

TwoTimeCorrelation two_time_imag_correlation(const TruncatedOscillatorPair& sys, const Observable& h_free,
                                             const StateVector& psi, double t1, double t2) {
  require_same_dim(sys.dim(), h_free.dim(), "two_time_imag_correlation");
  require_same_dim(sys.dim(), psi.dim(), "two_time_imag_correlation");
  const std::size_t guard = sys.dim() / 2;
  constexpr double kMaxLeakage = 1e-6;

  auto leakage = [&](const StateVector& s) {
    return s.amplitudes().tail(static_cast<Eigen::Index>(sys.dim() - guard)).squaredNorm();
  };
  double worst = leakage(psi);
  const double t_max = std::max(std::abs(t1), std::abs(t2));
  std::vector<double> times{t1, t2};
  for (int i = 1; i <= 16; ++i) times.push_back(t_max * i / 16.0);
  for (double t : times) {
    worst = std::max(worst, leakage(evolve(UnitaryMap::time_evolution(h_free, t, sys.hbar()), psi)));
  }
  if (worst > kMaxLeakage) {
    std::ostringstream msg;
    msg << "population " << worst << " above Fock level " << guard << " exceeds " << kMaxLeakage;
    throw Error(ErrorKind::TruncationViolated, msg.str());
  }

  const Observable x1 = heisenberg_at(sys.x_op(), h_free, t1, sys.hbar());
  const Observable x2 = heisenberg_at(sys.x_op(), h_free, t2, sys.hbar());
  const CVector v1 = x1.matrix() * psi.amplitudes();
  const CVector v2 = x2.matrix() * psi.amplitudes();
  const Complex corr = v2.dot(v1);  // <psi| x(t2) x(t1) |psi>
  const double predicted = sys.hbar() * (t2 - t1) / (2.0 * sys.mass());
  return TwoTimeCorrelation{corr.imag(), predicted, 1e-3 * std::abs(predicted) + 1e-8, worst};
}

// ---------------------------------------------------------------------------
// Periodic lattice

namespace {

Observable lattice_position(std::size_t dim, double length) {
  RVector x(static_cast<Eigen::Index>(dim));
  for (std::size_t j = 0; j < dim; ++j) x(static_cast<Eigen::Index>(j)) = static_cast<double>(j) * length / static_cast<double>(dim);
  return Observable::from_spectrum(x, OrthonormalBasis::computational(dim));
}

Observable lattice_momentum(std::size_t dim, double length, double hbar) {
  const auto n = static_cast<Eigen::Index>(dim);
  const auto half = static_cast<long long>(dim / 2);
  CMatrix vecs(n, n);
  RVector p(n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  for (Eigen::Index k = 0; k < n; ++k) {
    const long long wave = static_cast<long long>(k) - half;
    p(k) = 2.0 * pi * hbar * static_cast<double>(wave) / length;
    for (Eigen::Index j = 0; j < n; ++j) {
      long long r = (wave * static_cast<long long>(j)) % static_cast<long long>(dim);
      if (r < 0) r += static_cast<long long>(dim);
      vecs(j, k) = std::polar(scale, 2.0 * pi * static_cast<double>(r) / static_cast<double>(dim));
    }
  }
  return Observable::from_spectrum(p, OrthonormalBasis(std::move(vecs)));
}

}  // namespace

LatticeParticle::LatticeParticle(std::size_t dim, double length, double mass, double hbar)
    : dim_(at_least(dim, 16, "lattice sites")),
      length_(positive(length, "lattice length")),
      mass_(positive(mass, "mass")),
      hbar_(positive(hbar, "hbar")),
      position_(lattice_position(dim_, length_)),
      momentum_(lattice_momentum(dim_, length_, hbar_)) {}

double LatticeParticle::modular_distance(double x, double y) const {
  double d = std::fmod(std::abs(x - y), length_);
  return std::min(d, length_ - d);
}

double LatticeParticle::classical_position(std::size_t x0_index, std::size_t p0_index, double t) const {
  double x = position(x0_index) + momentum(p0_index) * t / mass_;
  x = std::fmod(x, length_);
  if (x < 0.0) x += length_;
  return x;
}

PropagatorField free_propagator_conditional(const LatticeParticle& sys, std::size_t x0_index,
                                            std::size_t p0_index, double t) {
  const std::size_t d = sys.dim();
  if (x0_index >= d || p0_index >= d) throw Error(ErrorKind::InvalidArgument, "lattice index out of range");
  const CMatrix& mom = sys.momentum_op().eigenbasis().matrix();  // (x_j, p_k) -> <x_j|p_k>
  const auto n = static_cast<Eigen::Index>(d);
  const auto ix0 = static_cast<Eigen::Index>(x0_index);
  const auto ip0 = static_cast<Eigen::Index>(p0_index);

  CVector phase(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double p = sys.momentum(static_cast<std::size_t>(k));
    phase(k) = std::polar(1.0, -p * p * t / (2.0 * sys.mass() * sys.hbar()));
  }
  // U|x0> = sum_k phase_k |p_k><p_k|x0>
  CVector coeff(n);
  for (Eigen::Index k = 0; k < n; ++k) coeff(k) = phase(k) * std::conj(mom(ix0, k));
  const CVector forward = mom * coeff;  // <x_t|U|x0>
  const Complex denom = std::conj(mom(ix0, ip0));  // <p0|x0>
  if (std::abs(denom) <= default_tolerances().overlap) {
    throw Error(ErrorKind::OrthogonalBasisPair, "<p0|x0> vanishes");
  }
  CVector p(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Complex back = std::conj(phase(ip0) * mom(j, ip0));  // <p0|U^dagger|x_t>
    p(j) = back * forward(j) / denom;
  }
  return PropagatorField{ComplexConditional::pre_post(std::move(p)),
                         d,
                         sys.length(),
                         sys.mass(),
                         sys.hbar(),
                         t,
                         x0_index,
                         p0_index,
                         sys.classical_position(x0_index, p0_index, t)};
}

std::vector<double> phase_gradient(const PropagatorField& field) {
  const auto& v = field.conditional.values();
  std::vector<double> out(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) {
    out[j] = std::abs(std::arg(v[(j + 1) % v.size()] * std::conj(v[j])));
  }
  return out;
}

CoarseGrained coarse_grain(const PropagatorField& field, double kernel_width) {
  const double spacing = field.length / static_cast<double>(field.dim);
  if (!(kernel_width >= 2.0 * spacing)) {
    std::ostringstream msg;
    msg << "kernel width " << kernel_width << " is below two lattice spacings (" << 2.0 * spacing << ")";
    throw Error(ErrorKind::KernelTooNarrow, msg.str());
  }
  const std::size_t d = field.dim;
  std::vector<double> kernel(d);
  double ksum = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    const double steps = static_cast<double>(std::min(j, d - j));
    const double dist = steps * spacing;
    kernel[j] = std::exp(-dist * dist / (2.0 * kernel_width * kernel_width));
    ksum += kernel[j];
  }
  for (auto& k : kernel) k /= ksum;

  const auto& p = field.conditional.values();
  std::vector<double> out(d);
  double total = 0.0;
  for (std::size_t c = 0; c < d; ++c) {
    Complex acc = 0.0;
    for (std::size_t j = 0; j < d; ++j) acc += kernel[(c + d - j) % d] * p[j];
    out[c] = std::abs(acc);
    total += out[c];
  }
  std::size_t best = 0;
  for (std::size_t c = 0; c < d; ++c) {
    out[c] /= total;
    if (out[c] > out[best]) best = c;
  }
  return CoarseGrained{std::move(out), best, kernel_width};
}

}  // namespace wvstat
