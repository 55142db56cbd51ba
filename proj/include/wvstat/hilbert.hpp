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

#include <Eigen/Dense>

#include <complex>
#include <cstddef>

#include "wvstat/error.hpp"
#include "wvstat/tolerances.hpp"

namespace wvstat {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

/// Largest element-wise modulus of (a - b). Dimensions must agree.
double max_abs_deviation(const CMatrix& a, const CMatrix& b);

/// Largest element-wise modulus of (m - m^dagger).
double hermiticity_defect(const CMatrix& m);

/// Multiplies `v` by the unit phase that makes its largest-magnitude component
/// real and positive. Among components whose modulus is within 1e-10 of the
/// maximum, the lowest index wins.
void fix_phase(CVector& v);

/// A normalized pure state. Immutable once built.
class StateVector {
 public:
  /// Takes amplitudes that are already normalized; throws NotNormalized otherwise.
  explicit StateVector(CVector amplitudes, const Tolerances& tol = default_tolerances());

  /// Rescales `raw` to unit norm. Throws NotNormalized for a (near) zero vector.
  static StateVector normalized(const CVector& raw);
  static StateVector basis_state(std::size_t dim, std::size_t index);

  std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }
  const CVector& amplitudes() const { return amps_; }
  Complex operator[](std::size_t i) const { return amps_(static_cast<Eigen::Index>(i)); }

  /// <this|other>
  Complex inner(const StateVector& other) const;

 private:
  CVector amps_;
};

/// An ordered orthonormal basis, stored as the columns of a unitary matrix.
class OrthonormalBasis {
 public:
  explicit OrthonormalBasis(CMatrix columns, const Tolerances& tol = default_tolerances());

  static OrthonormalBasis computational(std::size_t dim);
  /// Columns |k> = d^{-1/2} sum_j exp(2 pi i j k / d) |j>.
  static OrthonormalBasis fourier(std::size_t dim);
  /// Qubit eigenbases of Pauli-x and Pauli-y, ordered (+, -).
  static OrthonormalBasis qubit_x();
  static OrthonormalBasis qubit_y();

  std::size_t dim() const { return static_cast<std::size_t>(vecs_.cols()); }
  const CMatrix& matrix() const { return vecs_; }
  auto column(std::size_t k) const { return vecs_.col(static_cast<Eigen::Index>(k)); }
  StateVector vector(std::size_t k) const;

  /// <k|psi> for every k.
  CVector coefficients(const StateVector& psi) const;

 private:
  CMatrix vecs_;
};

enum class Degeneracy { Reject, Allow };

/// Hermitian operator together with its spectral decomposition.
///
/// Eigenvalues are ascending and `eigenbasis().column(k)` is the eigenvector of
/// `eigenvalues()[k]`. Degenerate observables may only be built with
/// Degeneracy::Allow and are flagged, since basis-indexed conditional
/// probabilities are ill defined for them.
class Observable {
 public:
  /// Builds sum_k eigenvalues[k] |k><k|. Eigenvalues must be ascending.
  static Observable from_spectrum(const RVector& eigenvalues, const OrthonormalBasis& basis,
                                  Degeneracy mode = Degeneracy::Reject,
                                  const Tolerances& tol = default_tolerances());

  std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }
  const CMatrix& matrix() const { return matrix_; }
  const RVector& eigenvalues() const { return eigenvalues_; }
  const OrthonormalBasis& eigenbasis() const { return basis_; }
  bool degenerate() const { return degenerate_; }
  double eigenvalue(std::size_t k) const { return eigenvalues_(static_cast<Eigen::Index>(k)); }

  CMatrix projector(std::size_t k) const;

  /// Throws DegenerateSpectrum if this observable was built in degenerate mode.
  void require_nondegenerate(const char* context) const;

  /// Assembles an observable from a matrix and a claimed spectral decomposition,
  /// checking Hermiticity, ordering, the degeneracy policy and the
  /// reconstruction invariant.
  static Observable from_parts(CMatrix matrix, RVector eigenvalues, OrthonormalBasis basis,
                               Degeneracy mode, const Tolerances& tol = default_tolerances());

 private:
  Observable(CMatrix matrix, RVector eigenvalues, OrthonormalBasis basis, bool degenerate);

  CMatrix matrix_;
  RVector eigenvalues_;
  OrthonormalBasis basis_;
  bool degenerate_;
};

class UnitaryMap {
 public:
  explicit UnitaryMap(CMatrix matrix, const Tolerances& tol = default_tolerances());

  static UnitaryMap identity(std::size_t dim);
  /// exp(-i H t / hbar), built from the eigendecomposition of H.
  static UnitaryMap time_evolution(const Observable& hamiltonian, double t, double hbar = 1.0);

  std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }
  const CMatrix& matrix() const { return matrix_; }
  UnitaryMap adjoint() const;

 private:
  CMatrix matrix_;
};

/// Diagonalizes a Hermitian matrix. Eigenvalues ascending, eigenvector phases
/// fixed by `fix_phase`. Throws NotHermitian when max|H - H^dagger| > tol and
/// DegenerateSpectrum when two eigenvalues are closer than the degeneracy gap
/// (unless mode == Degeneracy::Allow).
Observable spectral_decompose(const CMatrix& hermitian, double tol = 1e-10,
                              Degeneracy mode = Degeneracy::Reject,
                              const Tolerances& tols = default_tolerances());

/// <psi|A|psi>. The imaginary residue is checked against the tolerance and dropped.
double expectation(const Observable& a, const StateVector& psi,
                   const Tolerances& tol = default_tolerances());

/// AB - BA
CMatrix commutator(const Observable& a, const Observable& b);

StateVector evolve(const UnitaryMap& u, const StateVector& psi);
/// U^dagger A U, with the same eigenvalues and eigenbasis U^dagger |a>.
Observable evolve_heisenberg(const UnitaryMap& u, const Observable& a);

namespace pauli {
CMatrix x();
CMatrix y();
CMatrix z();
}  // namespace pauli

void require_same_dim(std::size_t a, std::size_t b, const char* context);

}  // namespace wvstat
