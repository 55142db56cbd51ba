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

#include "wvstat/weakmeas.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>

#include "wvstat/random.hpp"

namespace wvstat {

using std::numbers::pi;

// ---------------------------------------------------------------------------
// PointerModel

PointerModel::PointerModel(double spread, double coupling, std::size_t grid_points,
                           double half_width_in_spreads)
    : spread_(spread), coupling_(coupling), points_(grid_points), half_width_(half_width_in_spreads * spread) {
  if (!(spread > 0.0) || !std::isfinite(spread)) {
    throw Error(ErrorKind::InvalidArgument, "pointer spread must be positive");
  }
  if (!(coupling >= 0.0) || !std::isfinite(coupling)) {
    throw Error(ErrorKind::InvalidArgument, "pointer coupling must be non-negative");
  }
  if (grid_points < 256) {
    throw Error(ErrorKind::InvalidArgument, "pointer grid needs at least 256 points");
  }
  if (!(half_width_in_spreads >= 8.0)) {
    throw Error(ErrorKind::InvalidArgument, "pointer grid must span at least +-8 spreads");
  }
  const double norm = discrete_norm();
  if (std::abs(norm - 1.0) > 1e-8) {
    std::ostringstream msg;
    msg << "discretized pointer norm " << norm << " is not within 1e-8 of 1; refine the grid";
    throw Error(ErrorKind::InvalidArgument, msg.str());
  }
}

double PointerModel::momentum(std::size_t k) const {
  const double shifted = static_cast<double>(k) - static_cast<double>(points_ / 2);
  return 2.0 * pi * shifted / (static_cast<double>(points_) * spacing());
}

double PointerModel::amplitude(double q) const {
  const double s2 = spread_ * spread_;
  return std::pow(2.0 * pi * s2, -0.25) * std::exp(-q * q / (4.0 * s2));
}

double PointerModel::discrete_norm() const {
  double acc = 0.0;
  for (std::size_t j = 0; j < points_; ++j) {
    const double a = amplitude(position(j));
    acc += a * a;
  }
  return acc * spacing();
}

PointerModel PointerModel::with_coupling(double g) const {
  return PointerModel(spread_, g, points_, half_width_ / spread_);
}

// ---------------------------------------------------------------------------
// Exact post-selected pointer

namespace {

// |sum_j f_j exp(-2 pi i k j / N)|^2 for k = -N/2 .. N/2 - 1, normalized to sum one.
std::vector<double> momentum_weights(const CVector& f) {
  const auto n = static_cast<std::size_t>(f.size());
  std::vector<Complex> twiddle(n);
  for (std::size_t r = 0; r < n; ++r) twiddle[r] = std::polar(1.0, -2.0 * pi * static_cast<double>(r) / static_cast<double>(n));
  std::vector<double> w(n);
  double total = 0.0;
  for (std::size_t idx = 0; idx < n; ++idx) {
    const std::size_t k = (idx + n - n / 2) % n;  // k mod N for k = idx - N/2
    Complex acc = 0.0;
    std::size_t r = 0;
    for (std::size_t j = 0; j < n; ++j) {
      acc += f(static_cast<Eigen::Index>(j)) * twiddle[r];
      r += k;
      if (r >= n) r -= n;
    }
    w[idx] = std::norm(acc);
    total += w[idx];
  }
  for (auto& x : w) x /= total;
  return w;
}

struct Moments {
  double mean = 0.0;
  double second = 0.0;
};

}  // namespace

PostselectedPointer postselected_pointer(const RVector& eigenvalues, const OrthonormalBasis& eigenbasis,
                                         const StateVector& psi, const StateVector& m,
                                         const PointerModel& pointer, const MeasurementOptions& opts) {
  require_same_dim(static_cast<std::size_t>(eigenvalues.size()), eigenbasis.dim(), "postselected_pointer");
  require_same_dim(eigenbasis.dim(), psi.dim(), "postselected_pointer");
  require_same_dim(eigenbasis.dim(), m.dim(), "postselected_pointer");

  const double strong_probability = std::norm(m.inner(psi));
  if (strong_probability < opts.min_postselection_probability && !opts.allow_rare_postselection) {
    std::ostringstream msg;
    msg << "|<m|psi>|^2 = " << strong_probability << " below " << opts.min_postselection_probability
        << " (enable rare post-selection to proceed)";
    throw Error(ErrorKind::OrthogonalPostselection, msg.str());
  }
  const double g = pointer.coupling();
  const double max_shift = g * eigenvalues.cwiseAbs().maxCoeff();
  if (max_shift > 0.5 * pointer.half_width()) {
    std::ostringstream msg;
    msg << "pointer displacement " << max_shift << " exceeds a quarter of the grid extent "
        << 2.0 * pointer.half_width();
    throw Error(ErrorKind::GridTooCoarse, msg.str());
  }

  const CVector a_psi = eigenbasis.coefficients(psi);
  const CVector a_m = eigenbasis.coefficients(m);
  const auto n = static_cast<Eigen::Index>(pointer.grid_points());
  CVector phi = CVector::Zero(n);
  for (Eigen::Index k = 0; k < a_psi.size(); ++k) {
    const Complex weight = std::conj(a_m(k)) * a_psi(k);
    if (weight == Complex(0.0, 0.0)) continue;
    const double shift = g * eigenvalues(k);
    for (Eigen::Index j = 0; j < n; ++j) {
      phi(j) += weight * pointer.amplitude(pointer.position(static_cast<std::size_t>(j)) - shift);
    }
  }
  const double p = phi.squaredNorm() * pointer.spacing();
  if (!(p > 0.0)) {
    throw Error(ErrorKind::OrthogonalPostselection, "post-selected pointer state vanishes");
  }
  auto weights = momentum_weights(phi);
  return PostselectedPointer{std::move(phi), std::move(weights), p};
}

namespace {

PostselectedReadout exact_readout(const PostselectedPointer& ps, const PointerModel& pointer) {
  PostselectedReadout r;
  r.postselection_probability = ps.postselection_probability;
  const double total = ps.amplitude.squaredNorm();
  double q_mean = 0.0;
  for (Eigen::Index j = 0; j < ps.amplitude.size(); ++j) {
    q_mean += pointer.position(static_cast<std::size_t>(j)) * std::norm(ps.amplitude(j));
  }
  r.mean_position_shift = q_mean / total;
  double p_mean = 0.0;
  for (std::size_t k = 0; k < ps.momentum_weights.size(); ++k) p_mean += pointer.momentum(k) * ps.momentum_weights[k];
  r.mean_momentum_shift = p_mean;
  return r;
}

// Inverse-CDF sampling over grid cells with uniform jitter inside the cell, so
// the sample mean is unbiased for the discrete mean.
Moments sample_cells(const std::vector<double>& weights, double origin, double cell, std::size_t samples,
                     CounterRng& rng) {
  std::vector<double> cdf(weights.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    cdf[i] = acc;
  }
  Moments mo;
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const double u = rng.uniform() * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    const auto idx = static_cast<std::size_t>(it - cdf.begin());
    const double x = origin + (static_cast<double>(idx) + rng.uniform() - 0.5) * cell;
    sum += x;
    sum2 += x * x;
  }
  const double n = static_cast<double>(samples);
  mo.mean = sum / n;
  mo.second = sum2 / n;
  return mo;
}

}  // namespace

PostselectedReadout couple_and_postselect(const Observable& a, const StateVector& psi,
                                          const StateVector& m, const PointerModel& pointer,
                                          const MeasurementOptions& opts) {
  return exact_readout(postselected_pointer(a.eigenvalues(), a.eigenbasis(), psi, m, pointer, opts), pointer);
}

namespace {

PostselectedReadout sampled_readout(const PostselectedPointer& ps, const PointerModel& pointer,
                                    std::size_t samples, std::uint64_t seed, std::uint64_t channel) {
  if (samples == 0) throw Error(ErrorKind::InvalidArgument, "sample count must be at least 1");
  CounterRng base(seed, channel);
  CounterRng pos_rng = base.substream(0);
  CounterRng mom_rng = base.substream(1);

  std::vector<double> pos_w(static_cast<std::size_t>(ps.amplitude.size()));
  for (std::size_t j = 0; j < pos_w.size(); ++j) pos_w[j] = std::norm(ps.amplitude(static_cast<Eigen::Index>(j)));
  // Cells are centred on the grid points.
  const Moments q = sample_cells(pos_w, pointer.position(0), pointer.spacing(), samples, pos_rng);
  const double dp = pointer.momentum(1) - pointer.momentum(0);
  const Moments p = sample_cells(ps.momentum_weights, pointer.momentum(0), dp, samples, mom_rng);

  const double n = static_cast<double>(samples);
  PostselectedReadout r;
  r.postselection_probability = ps.postselection_probability;
  r.sample_count = samples;
  r.mean_position_shift = q.mean;
  r.mean_momentum_shift = p.mean;
  const double var_q = std::max(0.0, q.second - q.mean * q.mean) * n / std::max(1.0, n - 1.0);
  const double var_p = std::max(0.0, p.second - p.mean * p.mean) * n / std::max(1.0, n - 1.0);
  r.position_standard_error = std::sqrt(var_q / n);
  r.momentum_standard_error = std::sqrt(var_p / n);
  return r;
}

}  // namespace

PostselectedReadout sample_readouts(const Observable& a, const StateVector& psi, const StateVector& m,
                                    const PointerModel& pointer, std::size_t samples, std::uint64_t seed,
                                    std::uint64_t channel, const MeasurementOptions& opts) {
  if (samples == 0) throw Error(ErrorKind::InvalidArgument, "sample count must be at least 1");
  const auto ps = postselected_pointer(a.eigenvalues(), a.eigenbasis(), psi, m, pointer, opts);
  return sampled_readout(ps, pointer, samples, seed, channel);
}

// ---------------------------------------------------------------------------
// Ladders, extrapolation and calibration

std::vector<double> CouplingLadder::couplings() const {
  if (!(g_max > 0.0) || rungs < 2 || !(ratio > 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "coupling ladder needs g_max > 0, >= 2 rungs and ratio > 1");
  }
  std::vector<double> g(rungs);
  double v = g_max;
  for (auto& x : g) {
    x = v;
    v /= ratio;
  }
  return g;
}

double richardson(const std::vector<double>& coarse_to_fine, double ratio, int order) {
  if (coarse_to_fine.size() < 2) throw Error(ErrorKind::InvalidArgument, "Richardson needs two rungs");
  const double f = std::pow(ratio, order);
  const double fine = coarse_to_fine.back();
  const double coarse = coarse_to_fine[coarse_to_fine.size() - 2];
  return (f * fine - coarse) / (f - 1.0);
}

Complex richardson(const std::vector<Complex>& coarse_to_fine, double ratio, int order) {
  std::vector<double> re, im;
  for (const auto& z : coarse_to_fine) {
    re.push_back(z.real());
    im.push_back(z.imag());
  }
  return {richardson(re, ratio, order), richardson(im, ratio, order)};
}

MomentumCalibration calibrate_momentum_response(const PointerModel& pointer, const CouplingLadder& ladder) {
  const Observable z = spectral_decompose(pauli::z());
  const double r = std::numbers::sqrt2 / 2.0;
  CVector plus(2), plus_i(2);
  plus << r, r;
  plus_i << r, Complex(0.0, r);
  const StateVector psi(plus), m(plus_i);
  const double reference_imag = weak_value(z, psi, m).value.imag();  // = 1

  MomentumCalibration cal;
  cal.gaussian_reference = 1.0 / (2.0 * pointer.spread() * pointer.spread());
  cal.ladder_couplings = ladder.couplings();
  for (double g : cal.ladder_couplings) {
    const auto readout = couple_and_postselect(z, psi, m, pointer.with_coupling(g));
    cal.ladder_slopes.push_back(readout.mean_momentum_shift / (g * reference_imag));
  }
  cal.coefficient = richardson(cal.ladder_slopes, ladder.ratio, kWeakValueBiasOrder);
  return cal;
}

Complex extract_weak_value(const PostselectedReadout& readout, double coupling, double momentum_response) {
  if (!(coupling > 0.0)) throw Error(ErrorKind::InvalidArgument, "weak value extraction needs g > 0");
  if (!(momentum_response != 0.0)) throw Error(ErrorKind::InvalidArgument, "momentum response must be non-zero");
  return {readout.mean_position_shift / coupling, readout.mean_momentum_shift / (momentum_response * coupling)};
}

WeakValueLadder weak_value_ladder(const Observable& a, const StateVector& psi, const StateVector& m,
                                  const PointerModel& pointer, const CouplingLadder& ladder,
                                  const MeasurementOptions& opts) {
  WeakValueLadder out;
  out.momentum_response = calibrate_momentum_response(pointer, ladder).coefficient;
  out.couplings = ladder.couplings();
  for (double g : out.couplings) {
    out.readouts.push_back(couple_and_postselect(a, psi, m, pointer.with_coupling(g), opts));
    out.estimates.push_back(extract_weak_value(out.readouts.back(), g, out.momentum_response));
  }
  out.extrapolated = richardson(out.estimates, ladder.ratio, kWeakValueBiasOrder);
  return out;
}

// ---------------------------------------------------------------------------
// Direct measurement of the KD distribution

DirectKdResult direct_kd_measurement(const OrthonormalBasis& a_basis, const OrthonormalBasis& b_basis,
                                     const StateVector& psi, const PointerModel& pointer,
                                     const DirectKdOptions& opts) {
  require_same_dim(a_basis.dim(), b_basis.dim(), "direct_kd_measurement");
  require_same_dim(a_basis.dim(), psi.dim(), "direct_kd_measurement");
  const double g = pointer.coupling();
  if (!(g > 0.0)) throw Error(ErrorKind::InvalidArgument, "direct KD measurement needs coupling g > 0");
  const double k = opts.momentum_response != 0.0
                       ? opts.momentum_response
                       : calibrate_momentum_response(pointer, CouplingLadder{0.2 * pointer.spread()}).coefficient;

  const std::size_t da = a_basis.dim(), db = b_basis.dim();
  CMatrix rho = CMatrix::Zero(static_cast<Eigen::Index>(da), static_cast<Eigen::Index>(db));
  std::vector<DirectKdChannel> channels;
  std::vector<std::string> failures;
  ErrorKind first_kind = ErrorKind::InvalidArgument;

  for (std::size_t a = 0; a < da; ++a) {
    RVector projector_values = RVector::Zero(static_cast<Eigen::Index>(da));
    projector_values(static_cast<Eigen::Index>(a)) = 1.0;
    for (std::size_t b = 0; b < db; ++b) {
      DirectKdChannel ch;
      ch.a = a;
      ch.b = b;
      const StateVector post = b_basis.vector(b);
      try {
        if (std::norm(post.inner(psi)) < opts.measurement.min_postselection_probability &&
            opts.measurement.allow_rare_postselection) {
          ch.skipped = true;
          channels.push_back(ch);
          continue;
        }
        const auto ps = postselected_pointer(projector_values, a_basis, psi, post, pointer, opts.measurement);
        ch.readout = opts.samples == 0 ? exact_readout(ps, pointer)
                                       : sampled_readout(ps, pointer, opts.samples, opts.seed, a * db + b);
        ch.weak_value_estimate = extract_weak_value(ch.readout, g, k);
        rho(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
            ch.weak_value_estimate * ch.readout.postselection_probability;
      } catch (const Error& e) {
        if (failures.empty()) first_kind = e.kind();
        std::ostringstream msg;
        msg << "channel (a=" << a << ", b=" << b << "): " << e.what();
        failures.push_back(msg.str());
      }
      channels.push_back(ch);
    }
  }
  if (!failures.empty()) {
    std::string joined;
    for (const auto& f : failures) joined += (joined.empty() ? "" : "; ") + f;
    throw Error(first_kind, joined);
  }
  return DirectKdResult{
      ComplexJointDistribution::estimate(std::move(rho), index_labels(da), index_labels(db)), std::move(channels), g, k};
}

DirectKdLadder direct_kd_extrapolated(const OrthonormalBasis& a_basis, const OrthonormalBasis& b_basis,
                                      const StateVector& psi, const PointerModel& pointer,
                                      const CouplingLadder& ladder, const DirectKdOptions& opts) {
  DirectKdOptions local = opts;
  if (local.momentum_response == 0.0) {
    local.momentum_response = calibrate_momentum_response(pointer, ladder).coefficient;
  }
  std::vector<DirectKdResult> rungs;
  for (double g : ladder.couplings()) {
    rungs.push_back(direct_kd_measurement(a_basis, b_basis, psi, pointer.with_coupling(g), local));
  }
  const auto da = static_cast<Eigen::Index>(a_basis.dim());
  const auto db = static_cast<Eigen::Index>(b_basis.dim());
  CMatrix extrap(da, db);
  for (Eigen::Index i = 0; i < da; ++i) {
    for (Eigen::Index j = 0; j < db; ++j) {
      std::vector<Complex> seq;
      for (const auto& r : rungs) seq.push_back(r.estimate.values()(i, j));
      extrap(i, j) = richardson(seq, ladder.ratio, kWeakValueBiasOrder);
    }
  }
  auto est = ComplexJointDistribution::estimate(std::move(extrap), index_labels(a_basis.dim()),
                                                index_labels(b_basis.dim()));
  return DirectKdLadder{std::move(rungs), std::move(est)};
}

}  // namespace wvstat
