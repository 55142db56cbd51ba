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

namespace wvstat {

/// Numerical thresholds used across the library. Every function that checks an
/// invariant takes one of these (defaulted), so property tests have one knob.
struct Tolerances {
  double normalization = 1e-12;   // state vector norm
  double orthonormality = 1e-10;  // basis Gram matrix vs identity
  double hermiticity = 1e-10;
  double reconstruction = 1e-10;  // matrix vs sum of eigenvalue * projector
  double unitarity = 1e-10;
  double degeneracy_gap = 1e-9;   // minimum eigenvalue gap in strict mode
  double overlap = 1e-12;         // |<m|psi>| or |<b|a>| below this is treated as zero
  double identity = 1e-10;        // identity checks (sums, marginals, Born rule)
  double exact_algebra = 1e-12;   // rearrangements of the same products
  double imaginary_residue = 1e-10;
  double probability = 1e-10;     // slack on [0, 1] ranges
};

inline const Tolerances& default_tolerances() {
  static const Tolerances tol{};
  return tol;
}

}  // namespace wvstat
