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

#include "wvstat/quasiprob.hpp"

#include <cmath>
#include <sstream>
#include <utility>

namespace wvstat {

std::vector<std::string> index_labels(std::size_t dim) {
  std::vector<std::string> labels;
  labels.reserve(dim);
  for (std::size_t i = 0; i < dim; ++i) labels.push_back(std::to_string(i));
  return labels;
}

std::vector<double> born_probabilities(const OrthonormalBasis& basis, const StateVector& psi) {
  const CVector c = basis.coefficients(psi);
  std::vector<double> p(static_cast<std::size_t>(c.size()));
  for (Eigen::Index k = 0; k < c.size(); ++k) p[static_cast<std::size_t>(k)] = std::norm(c(k));
  return p;
}

// ---------------------------------------------------------------------------
// ComplexJointDistribution

ComplexJointDistribution::ComplexJointDistribution(CMatrix values, std::vector<std::string> a_labels,
                                                   std::vector<std::string> b_labels)
    : values_(std::move(values)), a_labels_(std::move(a_labels)), b_labels_(std::move(b_labels)) {
  if (a_labels_.size() != dim_a() || b_labels_.size() != dim_b()) {
    throw Error(ErrorKind::DimensionMismatch, "joint distribution labels do not match its shape");
  }
}

ComplexJointDistribution ComplexJointDistribution::estimate(CMatrix values,
                                                            std::vector<std::string> a_labels,
                                                            std::vector<std::string> b_labels) {
  return ComplexJointDistribution(std::move(values), std::move(a_labels), std::move(b_labels));
}

ComplexJointDistribution ComplexJointDistribution::checked(CMatrix values,
                                                           std::vector<std::string> a_labels,
                                                           std::vector<std::string> b_labels,
                                                           const Tolerances& tol) {
  ComplexJointDistribution rho(std::move(values), std::move(a_labels), std::move(b_labels));
  const Complex total = rho.values_.sum();
  if (std::abs(total - 1.0) > tol.identity) {
    std::ostringstream msg;
    msg << "joint distribution sums to " << total;
    throw Error(ErrorKind::NotNormalized, msg.str());
  }
  auto check_marginal = [&](const CVector& marg, const char* which) {
    for (Eigen::Index k = 0; k < marg.size(); ++k) {
      if (std::abs(marg(k).imag()) > tol.identity || marg(k).real() < -tol.probability) {
        std::ostringstream msg;
        msg << which << " entry " << k << " = " << marg(k) << " is not a probability";
        throw Error(ErrorKind::NumericalInvariant, msg.str());
      }
    }
  };
  check_marginal(rho.marginal_over_a(), "marginal over a");
  check_marginal(rho.marginal_over_b(), "marginal over b");
  return rho;
}

CVector ComplexJointDistribution::marginal_over_a() const { return values_.colwise().sum().transpose(); }

CVector ComplexJointDistribution::marginal_over_b() const { return values_.rowwise().sum(); }

double ComplexJointDistribution::nonclassicality() const { return values_.cwiseAbs().sum() - 1.0; }

double ComplexJointDistribution::negativity() const {
  double total = 0.0;
  for (Eigen::Index j = 0; j < values_.cols(); ++j)
    for (Eigen::Index i = 0; i < values_.rows(); ++i) total += std::max(0.0, -values_(i, j).real());
  return total;
}

double ComplexJointDistribution::imaginarity() const {
  double total = 0.0;
  for (Eigen::Index j = 0; j < values_.cols(); ++j)
    for (Eigen::Index i = 0; i < values_.rows(); ++i) total += std::abs(values_(i, j).imag());
  return total;
}

// ---------------------------------------------------------------------------
// ComplexConditional

ComplexConditional::ComplexConditional(std::vector<std::size_t> dims, std::vector<Complex> values)
    : dims_(std::move(dims)), values_(std::move(values)) {}

ComplexConditional ComplexConditional::pre_post(CVector values, const Tolerances& tol) {
  const Complex total = values.sum();
  if (std::abs(total - 1.0) > tol.identity) {
    std::ostringstream msg;
    msg << "conditional sums to " << total;
    throw Error(ErrorKind::NotNormalized, msg.str());
  }
  std::vector<Complex> flat(values.data(), values.data() + values.size());
  return ComplexConditional({static_cast<std::size_t>(values.size())}, std::move(flat));
}

ComplexConditional ComplexConditional::universal(std::size_t dim_m, std::size_t dim_a,
                                                 std::size_t dim_b, std::vector<Complex> values,
                                                 const Tolerances& tol) {
  if (values.size() != dim_m * dim_a * dim_b) {
    throw Error(ErrorKind::DimensionMismatch, "conditional tensor has the wrong number of entries");
  }
  ComplexConditional p({dim_m, dim_a, dim_b}, std::move(values));
  for (std::size_t a = 0; a < dim_a; ++a) {
    for (std::size_t b = 0; b < dim_b; ++b) {
      Complex total = 0.0;
      for (std::size_t m = 0; m < dim_m; ++m) total += p(m, a, b);
      if (std::abs(total - 1.0) > tol.identity) {
        std::ostringstream msg;
        msg << "sum over m of p(m|a=" << a << ", b=" << b << ") = " << total;
        throw Error(ErrorKind::NotNormalized, msg.str());
      }
    }
  }
  return p;
}

Complex ComplexConditional::operator()(std::size_t a) const {
  if (is_universal() || a >= dims_[0]) throw Error(ErrorKind::InvalidArgument, "bad pre/post index");
  return values_[a];
}

Complex ComplexConditional::operator()(std::size_t m, std::size_t a, std::size_t b) const {
  if (!is_universal() || m >= dims_[0] || a >= dims_[1] || b >= dims_[2]) {
    throw Error(ErrorKind::InvalidArgument, "bad universal conditional index");
  }
  return values_[(m * dims_[1] + a) * dims_[2] + b];
}

// ---------------------------------------------------------------------------
// Weak values and conditionals

namespace {

Complex checked_overlap(const StateVector& m, const StateVector& psi, const Tolerances& tol) {
  const Complex overlap = m.inner(psi);
  if (std::abs(overlap) <= tol.overlap) {
    std::ostringstream msg;
    msg << "|<m|psi>| = " << std::abs(overlap) << " is not above " << tol.overlap;
    throw Error(ErrorKind::OrthogonalPostselection, msg.str());
  }
  return overlap;
}

}  // namespace

WeakValueRecord weak_value(const Observable& a, const StateVector& psi, const StateVector& m,
                           const Tolerances& tol) {
  require_same_dim(a.dim(), psi.dim(), "weak_value");
  require_same_dim(a.dim(), m.dim(), "weak_value");
  const Complex overlap = checked_overlap(m, psi, tol);
  const Complex numerator = m.amplitudes().dot(a.matrix() * psi.amplitudes());
  return WeakValueRecord{numerator / overlap, psi, m, a, overlap};
}

ComplexConditional conditional_pre_post(const OrthonormalBasis& a_basis, const StateVector& psi,
                                        const StateVector& m, const Tolerances& tol) {
  require_same_dim(a_basis.dim(), psi.dim(), "conditional_pre_post");
  require_same_dim(a_basis.dim(), m.dim(), "conditional_pre_post");
  const Complex overlap = checked_overlap(m, psi, tol);
  const CVector a_psi = a_basis.coefficients(psi);                 // <a|psi>
  const CVector a_m = a_basis.coefficients(m);                     // <a|m>
  CVector p(a_psi.size());
  for (Eigen::Index k = 0; k < p.size(); ++k) p(k) = std::conj(a_m(k)) * a_psi(k) / overlap;
  return ComplexConditional::pre_post(std::move(p), tol);
}

ComplexJointDistribution kd_joint(const OrthonormalBasis& a_basis, const OrthonormalBasis& b_basis,
                                  const StateVector& psi, const Tolerances& tol) {
  require_same_dim(a_basis.dim(), b_basis.dim(), "kd_joint");
  require_same_dim(a_basis.dim(), psi.dim(), "kd_joint");
  const CMatrix ba = b_basis.matrix().adjoint() * a_basis.matrix();  // (b, a) -> <b|a>
  const CVector a_psi = a_basis.coefficients(psi);
  const CVector b_psi = b_basis.coefficients(psi);
  const auto d = ba.rows();
  CMatrix rho(d, d);
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = 0; b < d; ++b) rho(a, b) = ba(b, a) * a_psi(a) * std::conj(b_psi(b));
  return ComplexJointDistribution::checked(std::move(rho), index_labels(a_basis.dim()),
                                           index_labels(b_basis.dim()), tol);
}

// ---------------------------------------------------------------------------
// Identities

IdentitySides second_moment_identity(const Observable& a, const StateVector& psi,
                                     const OrthonormalBasis& m_basis, const Tolerances& tol) {
  require_same_dim(a.dim(), psi.dim(), "second_moment_identity");
  require_same_dim(a.dim(), m_basis.dim(), "second_moment_identity");
  const CVector a_psi = a.matrix() * psi.amplitudes();
  const Complex lhs_raw = a_psi.dot(a_psi);  // <psi|A A|psi>, A Hermitian
  const CVector overlaps = m_basis.coefficients(psi);
  const CVector numerators = m_basis.matrix().adjoint() * a_psi;
  double rhs = 0.0;
  for (Eigen::Index k = 0; k < overlaps.size(); ++k) {
    const double mod = std::abs(overlaps(k));
    if (mod > tol.overlap) {
      const Complex wv = numerators(k) / overlaps(k);
      rhs += std::norm(wv) * mod * mod;
    } else {
      rhs += std::norm(numerators(k));
    }
  }
  return IdentitySides{lhs_raw.real(), rhs};
}

IdentitySides commutator_imag_identity(const Observable& a, const Observable& b,
                                       const StateVector& psi, const Tolerances& tol) {
  require_same_dim(a.dim(), b.dim(), "commutator_imag_identity");
  require_same_dim(a.dim(), psi.dim(), "commutator_imag_identity");
  a.require_nondegenerate("commutator_imag_identity");
  b.require_nondegenerate("commutator_imag_identity");
  const CMatrix c = commutator(a, b);
  const Complex lhs_raw = Complex(0.0, 0.5) * psi.amplitudes().dot(c * psi.amplitudes());
  if (std::abs(lhs_raw.imag()) > tol.imaginary_residue) {
    std::ostringstream msg;
    msg << "(i/2)<[A,B]> has imaginary residue " << lhs_raw.imag();
    throw Error(ErrorKind::NumericalInvariant, msg.str());
  }
  const ComplexJointDistribution rho = kd_joint(a.eigenbasis(), b.eigenbasis(), psi, tol);
  double rhs = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < b.dim(); ++j) rhs += a.eigenvalue(i) * b.eigenvalue(j) * rho(i, j).imag();
  return IdentitySides{lhs_raw.real(), rhs};
}

UncertaintyCheck uncertainty_bound_check(const Observable& a, const Observable& b,
                                         const StateVector& psi, const Tolerances& tol) {
  require_same_dim(a.dim(), b.dim(), "uncertainty_bound_check");
  require_same_dim(a.dim(), psi.dim(), "uncertainty_bound_check");
  auto spread = [&](const Observable& o) {
    const CVector v = o.matrix() * psi.amplitudes();
    const double second = v.squaredNorm();
    const double mean = expectation(o, psi, tol);
    return std::sqrt(std::max(0.0, second - mean * mean));
  };
  const CMatrix c = commutator(a, b);
  const Complex comm = psi.amplitudes().dot(c * psi.amplitudes());
  return UncertaintyCheck{spread(a), spread(b), 0.5 * std::abs(comm)};
}

// ---------------------------------------------------------------------------
// Three-way relations

ThreeWayTensor kd_three_way(const OrthonormalBasis& a_basis, const OrthonormalBasis& b_basis,
                            const OrthonormalBasis& m_basis) {
  require_same_dim(a_basis.dim(), b_basis.dim(), "kd_three_way");
  require_same_dim(a_basis.dim(), m_basis.dim(), "kd_three_way");
  const std::size_t d = a_basis.dim();
  const CMatrix ba = b_basis.matrix().adjoint() * a_basis.matrix();  // <b|a>
  const CMatrix am = a_basis.matrix().adjoint() * m_basis.matrix();  // <a|m>
  const CMatrix mb = m_basis.matrix().adjoint() * b_basis.matrix();  // <m|b>
  ThreeWayTensor t{d, std::vector<Complex>(d * d * d)};
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = 0; b < d; ++b) {
      for (std::size_t m = 0; m < d; ++m) {
        const auto ia = static_cast<Eigen::Index>(a);
        const auto ib = static_cast<Eigen::Index>(b);
        const auto im = static_cast<Eigen::Index>(m);
        t.values[(a * d + b) * d + m] = ba(ib, ia) * am(ia, im) * mb(im, ib);
      }
    }
  }
  return t;
}

std::array<ThreeWayTensor, 3> kd_three_way_orderings(const OrthonormalBasis& a_basis,
                                                     const OrthonormalBasis& b_basis,
                                                     const OrthonormalBasis& m_basis) {
  require_same_dim(a_basis.dim(), b_basis.dim(), "kd_three_way_orderings");
  require_same_dim(a_basis.dim(), m_basis.dim(), "kd_three_way_orderings");
  const std::size_t d = a_basis.dim();
  std::array<ThreeWayTensor, 3> out;
  for (auto& t : out) t = ThreeWayTensor{d, std::vector<Complex>(d * d * d)};
  for (std::size_t k = 0; k < d; ++k) {
    const auto rho_ab_m = kd_joint(a_basis, b_basis, m_basis.vector(k));  // k plays m
    const auto rho_ma_b = kd_joint(m_basis, a_basis, b_basis.vector(k));  // k plays b
    const auto rho_bm_a = kd_joint(b_basis, m_basis, a_basis.vector(k));  // k plays a
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        out[0].values[(i * d + j) * d + k] = rho_ab_m(i, j);  // a=i, b=j, m=k
        out[1].values[(j * d + k) * d + i] = rho_ma_b(i, j);  // m=i, a=j, b=k
        out[2].values[(k * d + i) * d + j] = rho_bm_a(i, j);  // b=i, m=j, a=k
      }
    }
  }
  return out;
}

ComplexConditional universal_conditional(const OrthonormalBasis& m_basis,
                                         const OrthonormalBasis& a_basis,
                                         const OrthonormalBasis& b_basis, const Tolerances& tol) {
  require_same_dim(a_basis.dim(), b_basis.dim(), "universal_conditional");
  require_same_dim(a_basis.dim(), m_basis.dim(), "universal_conditional");
  const std::size_t d = a_basis.dim();
  const CMatrix ba = b_basis.matrix().adjoint() * a_basis.matrix();  // <b|a>
  const CMatrix bm = b_basis.matrix().adjoint() * m_basis.matrix();  // <b|m>
  const CMatrix ma = m_basis.matrix().adjoint() * a_basis.matrix();  // <m|a>
  std::vector<Complex> values(d * d * d);
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = 0; b < d; ++b) {
      const Complex denom = ba(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a));
      if (std::abs(denom) <= tol.overlap) {
        std::ostringstream msg;
        msg << "|<b|a>| = " << std::abs(denom) << " for (a=" << a << ", b=" << b << ")";
        throw Error(ErrorKind::OrthogonalBasisPair, msg.str());
      }
      for (std::size_t m = 0; m < d; ++m) {
        const auto im = static_cast<Eigen::Index>(m);
        values[(m * d + a) * d + b] =
            bm(static_cast<Eigen::Index>(b), im) * ma(im, static_cast<Eigen::Index>(a)) / denom;
      }
    }
  }
  return ComplexConditional::universal(d, d, d, std::move(values), tol);
}

std::vector<double> predict_born(const ComplexConditional& universal,
                                 const ComplexJointDistribution& rho, const Tolerances& tol) {
  if (!universal.is_universal()) {
    throw Error(ErrorKind::InvalidArgument, "predict_born needs a universal conditional p(m|a,b)");
  }
  const auto& dims = universal.dims();
  require_same_dim(dims[1], rho.dim_a(), "predict_born (a)");
  require_same_dim(dims[2], rho.dim_b(), "predict_born (b)");
  std::vector<double> p(dims[0]);
  double total = 0.0;
  for (std::size_t m = 0; m < dims[0]; ++m) {
    Complex acc = 0.0;
    for (std::size_t a = 0; a < dims[1]; ++a)
      for (std::size_t b = 0; b < dims[2]; ++b) acc += universal(m, a, b) * rho(a, b);
    if (std::abs(acc.imag()) > tol.identity || acc.real() < -tol.probability ||
        acc.real() > 1.0 + tol.probability) {
      std::ostringstream msg;
      msg << "predicted p(m=" << m << ") = " << acc << " is not a probability";
      throw Error(ErrorKind::NumericalInvariant, msg.str());
    }
    p[m] = acc.real();
    total += acc.real();
  }
  if (std::abs(total - 1.0) > tol.identity) {
    std::ostringstream msg;
    msg << "predicted probabilities sum to " << total;
    throw Error(ErrorKind::NumericalInvariant, msg.str());
  }
  return p;
}

CMatrix reconstruct_operator(const std::vector<double>& m_values, const ComplexConditional& universal,
                             const OrthonormalBasis& a_basis, const OrthonormalBasis& b_basis,
                             const Tolerances& tol) {
  if (!universal.is_universal()) {
    throw Error(ErrorKind::InvalidArgument, "reconstruct_operator needs p(m|a,b)");
  }
  const auto& dims = universal.dims();
  require_same_dim(m_values.size(), dims[0], "reconstruct_operator (m)");
  require_same_dim(a_basis.dim(), dims[1], "reconstruct_operator (a)");
  require_same_dim(b_basis.dim(), dims[2], "reconstruct_operator (b)");
  require_same_dim(a_basis.dim(), b_basis.dim(), "reconstruct_operator");
  const CMatrix ba = b_basis.matrix().adjoint() * a_basis.matrix();
  // W(b, a) = <b|a> sum_m M_m p(m|a,b); result = sum_{a,b} W(b,a) |b><a|.
  CMatrix w(ba.rows(), ba.cols());
  for (std::size_t a = 0; a < dims[1]; ++a) {
    for (std::size_t b = 0; b < dims[2]; ++b) {
      const auto ia = static_cast<Eigen::Index>(a);
      const auto ib = static_cast<Eigen::Index>(b);
      if (std::abs(ba(ib, ia)) <= tol.overlap) {
        std::ostringstream msg;
        msg << "|<b|a>| = " << std::abs(ba(ib, ia)) << " for (a=" << a << ", b=" << b << ")";
        throw Error(ErrorKind::OrthogonalBasisPair, msg.str());
      }
      Complex acc = 0.0;
      for (std::size_t m = 0; m < dims[0]; ++m) acc += m_values[m] * universal(m, a, b);
      w(ib, ia) = ba(ib, ia) * acc;
    }
  }
  return b_basis.matrix() * w * a_basis.matrix().adjoint();
}

}  // namespace wvstat
