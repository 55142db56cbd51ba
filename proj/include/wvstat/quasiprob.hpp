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
#include <string>
#include <vector>

#include "wvstat/hilbert.hpp"

namespace wvstat {

/// Complex joint quasiprobability rho(a, b) over the outcomes of two bases.
/// Rows are indexed by a, columns by b.
class ComplexJointDistribution {
 public:
  /// Checks total weight one and real, non-negative marginals.
  static ComplexJointDistribution checked(CMatrix values, std::vector<std::string> a_labels,
                                          std::vector<std::string> b_labels,
                                          const Tolerances& tol = default_tolerances());
  /// No invariant checks; for experimental estimates with finite-coupling bias
  /// and sampling noise.
  static ComplexJointDistribution estimate(CMatrix values, std::vector<std::string> a_labels,
                                           std::vector<std::string> b_labels);

  std::size_t dim_a() const { return static_cast<std::size_t>(values_.rows()); }
  std::size_t dim_b() const { return static_cast<std::size_t>(values_.cols()); }
  const CMatrix& values() const { return values_; }
  Complex operator()(std::size_t a, std::size_t b) const {
    return values_(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
  }
  const std::vector<std::string>& a_labels() const { return a_labels_; }
  const std::vector<std::string>& b_labels() const { return b_labels_; }

  /// Sum over a for each b (column sums); the Born distribution of b.
  CVector marginal_over_a() const;
  /// Sum over b for each a (row sums); the Born distribution of a.
  CVector marginal_over_b() const;

  /// sum |rho| - 1: zero exactly when every entry is real and non-negative.
  double nonclassicality() const;
  /// Total weight of negative real parts, sum max(0, -Re rho).
  double negativity() const;
  /// sum |Im rho|.
  double imaginarity() const;

 private:
  ComplexJointDistribution(CMatrix values, std::vector<std::string> a_labels,
                           std::vector<std::string> b_labels);

  CMatrix values_;
  std::vector<std::string> a_labels_;
  std::vector<std::string> b_labels_;
};

/// Complex conditional probability in one of two layouts:
///  - pre/post form p(a | psi, m): one index, sums to one over a;
///  - universal form p(m | a, b): three indices, sums to one over m for each (a, b).
class ComplexConditional {
 public:
  static ComplexConditional pre_post(CVector values, const Tolerances& tol = default_tolerances());
  static ComplexConditional universal(std::size_t dim_m, std::size_t dim_a, std::size_t dim_b,
                                      std::vector<Complex> values,
                                      const Tolerances& tol = default_tolerances());

  bool is_universal() const { return dims_.size() == 3; }
  const std::vector<std::size_t>& dims() const { return dims_; }
  const std::vector<Complex>& values() const { return values_; }

  /// Pre/post form accessor.
  Complex operator()(std::size_t a) const;
  /// Universal form accessor p(m | a, b).
  Complex operator()(std::size_t m, std::size_t a, std::size_t b) const;

 private:
  ComplexConditional(std::vector<std::size_t> dims, std::vector<Complex> values);

  std::vector<std::size_t> dims_;
  std::vector<Complex> values_;
};

struct WeakValueRecord {
  Complex value;
  StateVector pre_state;
  StateVector post_state;
  Observable observable;
  Complex overlap;  // <m|psi>
};

/// <m|A|psi> / <m|psi>. Throws OrthogonalPostselection when |<m|psi>| <= overlap tolerance.
WeakValueRecord weak_value(const Observable& a, const StateVector& psi, const StateVector& m,
                           const Tolerances& tol = default_tolerances());

/// p(a|psi, m) = <m|a><a|psi> / <m|psi>.
ComplexConditional conditional_pre_post(const OrthonormalBasis& a_basis, const StateVector& psi,
                                        const StateVector& m,
                                        const Tolerances& tol = default_tolerances());

/// rho(a, b | psi) = <b|a><a|psi><psi|b>.
ComplexJointDistribution kd_joint(const OrthonormalBasis& a_basis, const OrthonormalBasis& b_basis,
                                  const StateVector& psi,
                                  const Tolerances& tol = default_tolerances());

struct IdentitySides {
  double lhs;
  double rhs;
  double deviation() const { return std::abs(lhs - rhs); }
};

/// lhs = <psi|A^2|psi>, rhs = sum_m |<m|A|psi>/<m|psi>|^2 |<m|psi>|^2. Terms with a
/// vanishing overlap use the limit |<m|A|psi>|^2 directly.
IdentitySides second_moment_identity(const Observable& a, const StateVector& psi,
                                     const OrthonormalBasis& m_basis,
                                     const Tolerances& tol = default_tolerances());

/// lhs = (i/2)<psi|[A,B]|psi>, rhs = sum_{a,b} A_a B_b Im rho(a,b|psi).
IdentitySides commutator_imag_identity(const Observable& a, const Observable& b,
                                       const StateVector& psi,
                                       const Tolerances& tol = default_tolerances());

struct UncertaintyCheck {
  double delta_a;
  double delta_b;
  double bound;  // |<[A,B]>| / 2
  bool holds(double slack = 1e-10) const { return delta_a * delta_b >= bound - slack; }
};

UncertaintyCheck uncertainty_bound_check(const Observable& a, const Observable& b,
                                         const StateVector& psi,
                                         const Tolerances& tol = default_tolerances());

/// d x d x d complex tensor, flattened with index (a * d + b) * d + m.
struct ThreeWayTensor {
  std::size_t dim;
  std::vector<Complex> values;
  Complex operator()(std::size_t a, std::size_t b, std::size_t m) const {
    return values[(a * dim + b) * dim + m];
  }
};

/// T[a,b,m] = <b|a><a|m><m|b>.
ThreeWayTensor kd_three_way(const OrthonormalBasis& a_basis, const OrthonormalBasis& b_basis,
                            const OrthonormalBasis& m_basis);

/// The same tensor assembled from three separate KD distributions in the three
/// cyclic roles: rho(a,b|m), rho(m,a|b) and rho(b,m|a). Used to check the
/// cyclic symmetry.
std::array<ThreeWayTensor, 3> kd_three_way_orderings(const OrthonormalBasis& a_basis,
                                                     const OrthonormalBasis& b_basis,
                                                     const OrthonormalBasis& m_basis);

/// p(m | a, b) = <b|m><m|a> / <b|a>. Throws OrthogonalBasisPair naming the first
/// (a, b) with |<b|a>| <= overlap tolerance.
ComplexConditional universal_conditional(const OrthonormalBasis& m_basis,
                                         const OrthonormalBasis& a_basis,
                                         const OrthonormalBasis& b_basis,
                                         const Tolerances& tol = default_tolerances());

/// p(m) = sum_{a,b} p(m|a,b) rho(a,b|psi). Checks that each p(m) is real and in
/// [0, 1] and that they sum to one.
std::vector<double> predict_born(const ComplexConditional& universal,
                                 const ComplexJointDistribution& rho,
                                 const Tolerances& tol = default_tolerances());

/// sum_{a,b,m} M_m p(m|a,b) |b><b|a><a|.
CMatrix reconstruct_operator(const std::vector<double>& m_values, const ComplexConditional& universal,
                             const OrthonormalBasis& a_basis, const OrthonormalBasis& b_basis,
                             const Tolerances& tol = default_tolerances());

/// Born probabilities |<k|psi>|^2 in the given basis.
std::vector<double> born_probabilities(const OrthonormalBasis& basis, const StateVector& psi);

std::vector<std::string> index_labels(std::size_t dim);

}  // namespace wvstat
