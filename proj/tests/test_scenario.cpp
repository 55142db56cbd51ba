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

#include <string>

#include "wvstat/scenario.hpp"

using namespace wvstat;

namespace {

std::string config_error(const Json& cfg) {
  try {
    Scenario::load(cfg);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ConfigInvalid);
    return e.what();
  }
  FAIL("expected ConfigInvalid");
  return {};
}

Json strip_timing(Json doc) {
  doc.erase("timing");
  return doc;
}

}  // namespace

TEST_CASE("catalog lists every kind") {
  const auto& cat = scenario_catalog();
  CHECK(cat.size() == 6);
  CHECK(cat.front().name == "identity-suite");
}

TEST_CASE("identity-suite at d = 2 passes every identity") {
  const auto r = run_scenario(Json{{"scenario", "identity-suite"}, {"dimension", 2}, {"seed", 5}, {"instances", 50}});
  CHECK(r.checks.size() == 6);
  CHECK(r.passed());
  CHECK(r.scenario.at("perturbation").get<double>() == 0.1);
  CHECK(r.scenario.at("tolerances").at("cyclic-symmetry").get<double>() == 1e-12);
}

TEST_CASE("same config and seed give identical payloads") {
  const Json cfg{{"scenario", "kd-distribution"},
                 {"dimension", 3},
                 {"seed", 9},
                 {"operands", {{"a", "random"}, {"b", "random"}, {"m", "random"}, {"state", "random"}}}};
  const auto a = to_json(run_scenario(cfg));
  const auto b = to_json(run_scenario(cfg));
  CHECK(strip_timing(a).dump() == strip_timing(b).dump());
  const auto c = to_json(run_scenario(cfg, 10));
  CHECK(strip_timing(a).dump() != strip_timing(c).dump());
  CHECK(c.at("scenario").at("seed").get<std::uint64_t>() == 10);
}

TEST_CASE("validation names the offending field") {
  const Json base{{"scenario", "kd-distribution"},
                  {"operands", {{"a", "pauli-z"}, {"b", Json::array({Json::array({Json::array({0, 0}), Json::array({1, 0})}),
                                                                   Json::array({Json::array({2, 0}), Json::array({0, 0})})})},
                                {"state", "qubit:+"}}}};
  const auto msg = config_error(base);
  CHECK(msg.find("operands.b") != std::string::npos);
  CHECK(msg.find("NotHermitian") != std::string::npos);

  CHECK(config_error(Json{{"scenario", "nope"}}).find("scenario") != std::string::npos);
  CHECK(config_error(Json{{"scenario", "identity-suite"}, {"dimensoin", 2}}).find("dimensoin") != std::string::npos);
  CHECK(config_error(Json{{"scenario", "identity-suite"}, {"dimension", -1}}).find("dimension") != std::string::npos);
  CHECK(config_error(Json{{"scenario", "kd-distribution"}, {"dimension", 3},
                          {"operands", {{"a", "pauli-x"}, {"b", "random"}, {"state", "random"}}}})
            .find("operands.a") != std::string::npos);
  CHECK(config_error(Json{{"scenario", "weak-measurement"},
                          {"operands", {{"observable", "pauli-x"}, {"state", "basis:0"}, {"postselect", "basis:1"}}}})
            .find("operands.postselect") != std::string::npos);
  CHECK(config_error(Json{{"scenario", "dynamics"}}).find("at least one") != std::string::npos);
  CHECK(config_error(Json{{"scenario", "propagator"}, {"points", Json::array({Json{{"p0_index", 3}}})}})
            .find("points[0].t") != std::string::npos);
  CHECK(config_error(Json{{"scenario", "kd-distribution"},
                          {"operands", {{"a", "pauli-z"}, {"b", "pauli-x"}, {"state", Json::array({Json::array({1, 0}), Json::array({1, 0})})}}}})
            .find("NotNormalized") != std::string::npos);
}

TEST_CASE("kd-distribution reproduces the qubit commutator case") {
  const auto r = run_scenario(Json{{"scenario", "kd-distribution"},
                                   {"operands", {{"a", "pauli-z"}, {"b", "pauli-x"}, {"m", "pauli-y"}, {"state", "qubit:+i"}}},
                                   {"expected", {{"commutator_imaginary", -1.0}}}});
  CHECK(r.passed());
  bool found = false;
  for (const auto& c : r.checks) {
    if (c.name == "expected-commutator_imaginary") {
      found = true;
      CHECK(std::abs(c.lhs + 1.0) < 1e-12);
    }
  }
  CHECK(found);
  CHECK(r.distributions.size() == 1);
}

TEST_CASE("weak-measurement, direct-kd, dynamics and propagator scenarios run") {
  const auto weak = run_scenario(Json{{"scenario", "weak-measurement"},
                                      {"operands", {{"observable", "pauli-x"}, {"state", "basis:0"}, {"postselect", "qubit:+i"}}},
                                      {"expected_weak_value", {0.0, -1.0}}});
  CHECK(weak.passed());
  const auto direct = run_scenario(Json{{"scenario", "direct-kd"},
                                        {"operands", {{"a_basis", "computational"}, {"b_basis", "qubit-x"}, {"state", "qubit:+i"}}}});
  CHECK(direct.passed());
  const auto dyn = run_scenario(Json{{"scenario", "dynamics"},
                                     {"motion", {{"observable", "pauli-x"},
                                                 {"hamiltonian", {{"scale", 0.5}, {"matrix", "pauli-z"}}},
                                                 {"state", "qubit:+i"},
                                                 {"expected_derivative", -1.0}}}});
  CHECK(dyn.passed());
  const auto prop = run_scenario(Json{{"scenario", "propagator"}, {"dimension", 64}, {"points", Json::array({Json{{"p0_index", 40}, {"t", 5.0}}})}});
  CHECK(prop.checks.size() == 2);
  CHECK(prop.passed());
}

TEST_CASE("domain errors carry the scenario name") {
  try {
    run_scenario(Json{{"scenario", "weak-measurement"},
                      {"operands", {{"observable", "pauli-x"}, {"state", "basis:0"}, {"postselect", "qubit:+i"}}},
                      {"ladder", {{"g_max", 8.0}}}});
    FAIL("expected GridTooCoarse");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::GridTooCoarse);
    CHECK(std::string(e.what()).find("weak-measurement") != std::string::npos);
  }
}
