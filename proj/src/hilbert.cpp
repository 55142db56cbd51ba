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

#include "wvstat/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>

namespace wvstat {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotNormalized: return "NotNormalized";
    case ErrorKind::NotOrthonormal: return "NotOrthonormal";
    case ErrorKind::NotUnitary: return "NotUnitary";
    case ErrorKind::OrthogonalPostselection: return "OrthogonalPostselection";
    case ErrorKind::OrthogonalBasisPair: return "OrthogonalBasisPair";
    case ErrorKind::GridTooCoarse: return "GridTooCoarse";
    case ErrorKind::TruncationViolated: return "TruncationViolated";
    case ErrorKind::KernelTooNarrow: return "KernelTooNarrow";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NumericalInvariant: return "NumericalInvariant";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

void require_same_dim(std::size_t a, std::size_t b, const char* context) {
  if (a != b) {
    std::ostringstream msg;
    msg << context << ": dimensions " << a << " and " << b << " differ";
    throw Error(ErrorKind::DimensionMismatch, msg.str());
  }
}

double max_abs_deviation(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "max_abs_deviation: shapes differ");
  }
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

double hermiticity_defect(const CMatrix& m) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "hermiticity_defect: matrix is not square");
  }
  return max_abs_deviation(m, m.adjoint());
}

void fix_phase(CVector& v) {
  if (v.size() == 0) return;
  const double largest = v.cwiseAbs().maxCoeff();
  if (largest == 0.0) return;
  Eigen::Index pick = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) >= largest - 1e-10) {
      pick = i;
      break;
    }
  }
  const Complex phase = v(pick) / std::abs(v(pick));
  v *= std::conj(phase);
  v(pick) = Complex(v(pick).real(), 0.0);
}

// ---------------------------------------------------------------------------
// StateVector

StateVector::StateVector(CVector amplitudes, const Tolerances& tol) : amps_(std::move(amplitudes)) {
  if (amps_.size() < 2) {
    throw Error(ErrorKind::InvalidArgument, "state vector needs dimension >= 2");
  }
  const double norm = amps_.norm();
  if (!std::isfinite(norm) || std::abs(norm - 1.0) > tol.normalization) {
    std::ostringstream msg;
    msg << "state norm " << norm << " deviates from 1 by more than " << tol.normalization;
    throw Error(ErrorKind::NotNormalized, msg.str());
  }
}

StateVector StateVector::normalized(const CVector& raw) {
  const double norm = raw.norm();
  if (!std::isfinite(norm) || norm < 1e-300) {
    throw Error(ErrorKind::NotNormalized, "cannot normalize a zero vector");
  }
  return StateVector(raw / norm);
}

StateVector StateVector::basis_state(std::size_t dim, std::size_t index) {
  if (index >= dim) {
    throw Error(ErrorKind::InvalidArgument, "basis index out of range");
  }
  CVector v = CVector::Zero(static_cast<Eigen::Index>(dim));
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return StateVector(std::move(v));
}

Complex StateVector::inner(const StateVector& other) const {
  require_same_dim(dim(), other.dim(), "inner product");
  return amps_.dot(other.amps_);  // Eigen's dot conjugates the left operand
}

// ---------------------------------------------------------------------------
// OrthonormalBasis

OrthonormalBasis::OrthonormalBasis(CMatrix columns, const Tolerances& tol) : vecs_(std::move(columns)) {
  if (vecs_.rows() != vecs_.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "basis matrix must be square");
  }
  if (vecs_.rows() < 2) {
    throw Error(ErrorKind::InvalidArgument, "basis needs dimension >= 2");
  }
  const CMatrix gram = vecs_.adjoint() * vecs_;
  const double dev = max_abs_deviation(gram, CMatrix::Identity(vecs_.rows(), vecs_.cols()));
  if (!(dev <= tol.orthonormality)) {
    std::ostringstream msg;
    msg << "Gram matrix deviates from identity by " << dev;
    throw Error(ErrorKind::NotOrthonormal, msg.str());
  }
}

OrthonormalBasis OrthonormalBasis::computational(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  return OrthonormalBasis(CMatrix::Identity(n, n));
}

OrthonormalBasis OrthonormalBasis::fourier(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  CMatrix f(n, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = 0; k < n; ++k) {
      // Reduce j*k mod n first so large lattices keep full phase accuracy.
      const auto jk = static_cast<double>((j * k) % n);
      f(j, k) = std::polar(scale, 2.0 * std::numbers::pi * jk / static_cast<double>(dim));
    }
  }
  return OrthonormalBasis(std::move(f));
}

OrthonormalBasis OrthonormalBasis::qubit_x() {
  const double r = std::numbers::sqrt2 / 2.0;
  CMatrix m(2, 2);
  m << r, r,
       r, -r;
  return OrthonormalBasis(std::move(m));
}

OrthonormalBasis OrthonormalBasis::qubit_y() {
  const double r = std::numbers::sqrt2 / 2.0;
  CMatrix m(2, 2);
  m << Complex(r, 0), Complex(r, 0),
       Complex(0, r), Complex(0, -r);
  return OrthonormalBasis(std::move(m));
}

StateVector OrthonormalBasis::vector(std::size_t k) const {
  if (k >= dim()) throw Error(ErrorKind::InvalidArgument, "basis index out of range");
  return StateVector(CVector(column(k)));
}

CVector OrthonormalBasis::coefficients(const StateVector& psi) const {
  require_same_dim(dim(), psi.dim(), "basis coefficients");
  return vecs_.adjoint() * psi.amplitudes();
}

// ---------------------------------------------------------------------------
// Observable

namespace {

double min_gap(const RVector& sorted) {
  double gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 1; k < sorted.size(); ++k) gap = std::min(gap, sorted(k) - sorted(k - 1));
  return gap;
}

CMatrix spectral_sum(const RVector& eigenvalues, const CMatrix& vecs) {
  return vecs * eigenvalues.cast<Complex>().asDiagonal() * vecs.adjoint();
}

}  // namespace

Observable::Observable(CMatrix matrix, RVector eigenvalues, OrthonormalBasis basis, bool degenerate)
    : matrix_(std::move(matrix)),
      eigenvalues_(std::move(eigenvalues)),
      basis_(std::move(basis)),
      degenerate_(degenerate) {}

Observable Observable::from_parts(CMatrix matrix, RVector eigenvalues, OrthonormalBasis basis,
                                  Degeneracy mode, const Tolerances& tol) {
  const auto d = basis.dim();
  require_same_dim(static_cast<std::size_t>(matrix.rows()), d, "observable matrix vs basis");
  require_same_dim(static_cast<std::size_t>(eigenvalues.size()), d, "observable eigenvalues vs basis");
  const double herm = hermiticity_defect(matrix);
  if (!(herm <= tol.hermiticity)) {
    std::ostringstream msg;
    msg << "max |H - H^dagger| = " << herm;
    throw Error(ErrorKind::NotHermitian, msg.str());
  }
  for (Eigen::Index k = 1; k < eigenvalues.size(); ++k) {
    if (eigenvalues(k) < eigenvalues(k - 1)) {
      throw Error(ErrorKind::InvalidArgument, "eigenvalues must be ascending");
    }
  }
  const double gap = min_gap(eigenvalues);
  const bool degenerate = gap < tol.degeneracy_gap;
  if (degenerate && mode == Degeneracy::Reject) {
    std::ostringstream msg;
    msg << "minimum eigenvalue gap " << gap << " below " << tol.degeneracy_gap;
    throw Error(ErrorKind::DegenerateSpectrum, msg.str());
  }
  const double dev = max_abs_deviation(matrix, spectral_sum(eigenvalues, basis.matrix()));
  if (!(dev <= tol.reconstruction)) {
    std::ostringstream msg;
    msg << "spectral reconstruction deviates by " << dev;
    throw Error(ErrorKind::NumericalInvariant, msg.str());
  }
  return Observable(std::move(matrix), std::move(eigenvalues), std::move(basis), degenerate);
}

Observable Observable::from_spectrum(const RVector& eigenvalues, const OrthonormalBasis& basis,
                                     Degeneracy mode, const Tolerances& tol) {
  require_same_dim(static_cast<std::size_t>(eigenvalues.size()), basis.dim(), "from_spectrum");
  CMatrix m = spectral_sum(eigenvalues, basis.matrix());
  // Symmetrize away rounding so the Hermiticity check measures the input, not the product.
  m = (0.5 * (m + m.adjoint())).eval();
  return from_parts(std::move(m), eigenvalues, basis, mode, tol);
}

CMatrix Observable::projector(std::size_t k) const {
  const auto v = basis_.column(k);
  return v * v.adjoint();
}

void Observable::require_nondegenerate(const char* context) const {
  if (degenerate_) {
    throw Error(ErrorKind::DegenerateSpectrum,
                std::string(context) + ": operation needs a non-degenerate observable");
  }
}

Observable spectral_decompose(const CMatrix& hermitian, double tol, Degeneracy mode,
                              const Tolerances& tols) {
  if (hermitian.rows() != hermitian.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "spectral_decompose: matrix is not square");
  }
  const double herm = hermiticity_defect(hermitian);
  if (!(herm <= tol)) {
    std::ostringstream msg;
    msg << "max |H - H^dagger| = " << herm << " exceeds " << tol;
    throw Error(ErrorKind::NotHermitian, msg.str());
  }
  const CMatrix sym = 0.5 * (hermitian + hermitian.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::NumericalInvariant, "eigensolver did not converge");
  }
  // Eigen returns ascending eigenvalues already.
  RVector values = solver.eigenvalues();
  CMatrix vecs = solver.eigenvectors();
  for (Eigen::Index k = 0; k < vecs.cols(); ++k) {
    CVector col = vecs.col(k);
    fix_phase(col);
    vecs.col(k) = col;
  }
  Tolerances local = tols;
  local.hermiticity = std::max(tols.hermiticity, tol);
  return Observable::from_parts(hermitian, std::move(values), OrthonormalBasis(std::move(vecs), local),
                                mode, local);
}

// ---------------------------------------------------------------------------
// UnitaryMap and dynamics primitives

UnitaryMap::UnitaryMap(CMatrix matrix, const Tolerances& tol) : matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "unitary matrix must be square");
  }
  const double dev =
      max_abs_deviation(matrix_ * matrix_.adjoint(), CMatrix::Identity(matrix_.rows(), matrix_.cols()));
  if (!(dev <= tol.unitarity)) {
    std::ostringstream msg;
    msg << "U U^dagger deviates from identity by " << dev;
    throw Error(ErrorKind::NotUnitary, msg.str());
  }
}

UnitaryMap UnitaryMap::identity(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  return UnitaryMap(CMatrix::Identity(n, n));
}

UnitaryMap UnitaryMap::time_evolution(const Observable& hamiltonian, double t, double hbar) {
  if (!(hbar > 0.0)) throw Error(ErrorKind::InvalidArgument, "hbar must be positive");
  const RVector& e = hamiltonian.eigenvalues();
  CVector phases(e.size());
  for (Eigen::Index k = 0; k < e.size(); ++k) phases(k) = std::polar(1.0, -e(k) * t / hbar);
  const CMatrix& v = hamiltonian.eigenbasis().matrix();
  return UnitaryMap(v * phases.asDiagonal() * v.adjoint());
}

UnitaryMap UnitaryMap::adjoint() const { return UnitaryMap(matrix_.adjoint()); }

double expectation(const Observable& a, const StateVector& psi, const Tolerances& tol) {
  require_same_dim(a.dim(), psi.dim(), "expectation");
  const Complex raw = psi.amplitudes().dot(a.matrix() * psi.amplitudes());
  if (std::abs(raw.imag()) > tol.imaginary_residue) {
    std::ostringstream msg;
    msg << "expectation value has imaginary residue " << raw.imag();
    throw Error(ErrorKind::NumericalInvariant, msg.str());
  }
  return raw.real();
}

CMatrix commutator(const Observable& a, const Observable& b) {
  require_same_dim(a.dim(), b.dim(), "commutator");
  return a.matrix() * b.matrix() - b.matrix() * a.matrix();
}

StateVector evolve(const UnitaryMap& u, const StateVector& psi) {
  require_same_dim(u.dim(), psi.dim(), "evolve");
  return StateVector(u.matrix() * psi.amplitudes());
}

Observable evolve_heisenberg(const UnitaryMap& u, const Observable& a) {
  require_same_dim(u.dim(), a.dim(), "evolve_heisenberg");
  const CMatrix& um = u.matrix();
  CMatrix m = um.adjoint() * a.matrix() * um;
  m = (0.5 * (m + m.adjoint())).eval();
  CMatrix vecs = um.adjoint() * a.eigenbasis().matrix();
  for (Eigen::Index k = 0; k < vecs.cols(); ++k) {
    CVector col = vecs.col(k);
    fix_phase(col);
    vecs.col(k) = col;
  }
  return Observable::from_parts(std::move(m), a.eigenvalues(), OrthonormalBasis(std::move(vecs)),
                                a.degenerate() ? Degeneracy::Allow : Degeneracy::Reject);
}

namespace pauli {

CMatrix x() {
  CMatrix m(2, 2);
  m << 0, 1,
       1, 0;
  return m;
}

CMatrix y() {
  CMatrix m(2, 2);
  m << Complex(0, 0), Complex(0, -1),
       Complex(0, 1), Complex(0, 0);
  return m;
}

CMatrix z() {
  CMatrix m(2, 2);
  m << 1, 0,
       0, -1;
  return m;
}

}  // namespace pauli

}  // namespace wvstat
