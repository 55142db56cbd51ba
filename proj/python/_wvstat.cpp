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


#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "wvstat/dynamics.hpp"
#include "wvstat/error.hpp"
#include "wvstat/quasiprob.hpp"
#include "wvstat/report.hpp"
#include "wvstat/scenario.hpp"
#include "wvstat/weakmeas.hpp"

namespace py = pybind11;
using namespace wvstat;

namespace {

Observable observable(const CMatrix& m) { return spectral_decompose(m, 1e-10, Degeneracy::Allow); }
Observable nondegenerate(const CMatrix& m) { return spectral_decompose(m); }

py::tuple sides(const IdentitySides& s) { return py::make_tuple(s.lhs, s.rhs); }

}  // namespace

PYBIND11_MODULE(_wvstat, m) {
  m.doc() = "Weak values and complex quasiprobabilities in finite dimensions";
  m.attr("__version__") = std::string(artifact_version());

  static py::exception<Error> error(m, "WvstatError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  m.def(
      "eigh",
      [](const CMatrix& h) {
        const auto o = observable(h);
        return py::make_tuple(RVector(o.eigenvalues()), CMatrix(o.eigenbasis().matrix()));
      },
      py::arg("matrix"), "Eigenvalues (ascending) and phase-fixed eigenvectors as columns.");

  m.def(
      "weak_value",
      [](const CMatrix& a, const CVector& psi, const CVector& post) {
        return weak_value(observable(a), StateVector(psi), StateVector(post)).value;
      },
      py::arg("observable"), py::arg("state"), py::arg("postselect"));

  m.def(
      "kd_joint",
      [](const CMatrix& a_basis, const CMatrix& b_basis, const CVector& psi) {
        return CMatrix(kd_joint(OrthonormalBasis(a_basis), OrthonormalBasis(b_basis), StateVector(psi)).values());
      },
      py::arg("a_basis"), py::arg("b_basis"), py::arg("state"),
      "rho[a, b] = <b|a><a|psi><psi|b>; bases are given as unitary matrices whose columns are the vectors.");

  m.def(
      "second_moment_identity",
      [](const CMatrix& a, const CVector& psi, const CMatrix& m_basis) {
        return sides(second_moment_identity(observable(a), StateVector(psi), OrthonormalBasis(m_basis)));
      },
      py::arg("observable"), py::arg("state"), py::arg("m_basis"));

  m.def(
      "commutator_identity",
      [](const CMatrix& a, const CMatrix& b, const CVector& psi) {
        return sides(commutator_imag_identity(nondegenerate(a), nondegenerate(b), StateVector(psi)));
      },
      py::arg("a"), py::arg("b"), py::arg("state"));

  m.def(
      "predict_born",
      [](const CMatrix& m_basis, const CMatrix& a_basis, const CMatrix& b_basis, const CVector& psi) {
        const OrthonormalBasis mb(m_basis), ab(a_basis), bb(b_basis);
        return predict_born(universal_conditional(mb, ab, bb), kd_joint(ab, bb, StateVector(psi)));
      },
      py::arg("m_basis"), py::arg("a_basis"), py::arg("b_basis"), py::arg("state"));

  m.def(
      "weak_value_ladder",
      [](const CMatrix& a, const CVector& psi, const CVector& post, double spread, double g_max, std::size_t rungs) {
        const auto ladder = weak_value_ladder(observable(a), StateVector(psi), StateVector(post), PointerModel(spread),
                                              CouplingLadder{g_max, rungs, 2.0});
        py::dict out;
        out["couplings"] = ladder.couplings;
        out["estimates"] = ladder.estimates;
        out["extrapolated"] = ladder.extrapolated;
        out["momentum_response"] = ladder.momentum_response;
        return out;
      },
      py::arg("observable"), py::arg("state"), py::arg("postselect"), py::arg("spread") = 1.0,
      py::arg("g_max") = 0.2, py::arg("rungs") = 5);

  m.def(
      "direct_kd",
      [](const CMatrix& a_basis, const CMatrix& b_basis, const CVector& psi, double spread, double g_max,
         std::size_t rungs) {
        const auto ladder = direct_kd_extrapolated(OrthonormalBasis(a_basis), OrthonormalBasis(b_basis),
                                                   StateVector(psi), PointerModel(spread),
                                                   CouplingLadder{g_max, rungs, 2.0});
        return CMatrix(ladder.extrapolated.values());
      },
      py::arg("a_basis"), py::arg("b_basis"), py::arg("state"), py::arg("spread") = 1.0, py::arg("g_max") = 0.2,
      py::arg("rungs") = 5);

  m.def(
      "motion_identity",
      [](const CMatrix& a, const CMatrix& h, const CVector& psi, double dt, double hbar) {
        return sides(motion_identity_check(nondegenerate(a), nondegenerate(h), StateVector(psi), dt, hbar));
      },
      py::arg("observable"), py::arg("hamiltonian"), py::arg("state"), py::arg("dt"), py::arg("hbar") = 1.0);

  m.def(
      "two_time_correlation",
      [](std::size_t dim, double t1, double t2, double mass, double hbar, std::size_t fock_level) {
        const TruncatedOscillatorPair osc(dim, mass, hbar);
        const auto r = two_time_imag_correlation(osc, osc.free_hamiltonian(), osc.fock_state(fock_level), t1, t2);
        return py::make_tuple(r.measured, r.predicted);
      },
      py::arg("dim"), py::arg("t1"), py::arg("t2"), py::arg("mass") = 1.0, py::arg("hbar") = 1.0,
      py::arg("fock_level") = 0);

  m.def(
      "propagator",
      [](std::size_t dim, double length, double mass, std::size_t x0_index, std::size_t p0_index, double t,
         double hbar) {
        const LatticeParticle lp(dim, length, mass, hbar);
        const auto f = free_propagator_conditional(lp, x0_index, p0_index, t);
        return py::make_tuple(f.conditional.values(), f.classical_position);
      },
      py::arg("dim"), py::arg("length"), py::arg("mass"), py::arg("x0_index"), py::arg("p0_index"), py::arg("t"),
      py::arg("hbar") = 1.0, "Complex conditional p(x_t | x0, p0) and the classical position.");

  m.def(
      "coarse_grained_argmax",
      [](std::size_t dim, double length, double mass, std::size_t x0_index, std::size_t p0_index, double t,
         double kernel_width, double hbar) {
        const LatticeParticle lp(dim, length, mass, hbar);
        const auto c = coarse_grain(free_propagator_conditional(lp, x0_index, p0_index, t), kernel_width);
        return py::make_tuple(c.argmax, c.distribution);
      },
      py::arg("dim"), py::arg("length"), py::arg("mass"), py::arg("x0_index"), py::arg("p0_index"), py::arg("t"),
      py::arg("kernel_width"), py::arg("hbar") = 1.0);

  m.def("scenario_kinds", [] {
    std::vector<std::string> out;
    for (const auto& k : scenario_catalog()) out.push_back(k.name);
    return out;
  });

  m.def(
      "run_scenario_json",
      [](const std::string& config, std::optional<std::uint64_t> seed) {
        Json doc;
        try {
          doc = Json::parse(config);
        } catch (const nlohmann::json::parse_error& e) {
          throw Error(ErrorKind::ConfigInvalid, e.what());
        }
        return emit_json(run_scenario(doc, seed));
      },
      py::arg("config"), py::arg("seed") = py::none(), "Runs a scenario document and returns the report as JSON text.");
}
