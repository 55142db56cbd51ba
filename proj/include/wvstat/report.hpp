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

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "wvstat/hilbert.hpp"
#include "wvstat/quasiprob.hpp"

namespace wvstat {

using Json = nlohmann::ordered_json;

std::string_view artifact_version();

enum class Relation { Equal, AtLeast, AtMost };

struct CheckRecord {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double abs_diff = 0.0;
  double tolerance = 0.0;
  Relation relation = Relation::Equal;
  bool pass = false;

  bool operator==(const CheckRecord&) const;
};

/// |lhs - rhs| <= tolerance
CheckRecord check_equal(std::string name, double lhs, double rhs, double tolerance);
/// lhs >= rhs - tolerance
CheckRecord check_at_least(std::string name, double lhs, double rhs, double tolerance);
/// lhs <= rhs + tolerance
CheckRecord check_at_most(std::string name, double lhs, double rhs, double tolerance);

struct Report {
  std::string artifact = "wvstat";
  std::string version{artifact_version()};
  std::string scenario_kind;
  Json scenario = Json::object();        // resolved configuration, defaults included
  std::vector<CheckRecord> checks;
  Json distributions = Json::array();
  double elapsed_seconds = 0.0;          // the only non-deterministic field

  bool passed() const;
  /// Names of failing checks, in order.
  std::vector<std::string> failures() const;
  bool operator==(const Report&) const;
};

enum class Format { Json, Csv, Both };

Format parse_format(std::string_view name);

Json to_json(const Report& report);
Report report_from_json(const Json& doc);

std::string emit_json(const Report& report);
std::string emit_csv(const Report& report);
Report parse_report(std::string_view text);

/// Writes <dir>/<stem>.json and/or <dir>/<stem>.csv. Throws IoFailure.
std::vector<std::filesystem::path> write_report(const Report& report, const std::filesystem::path& dir,
                                                const std::string& stem, Format format);

// Serialization helpers shared with the scenario layer.
Json complex_json(Complex z);
Json complex_vector_json(const CVector& v);
Json complex_vector_json(const std::vector<Complex>& v);
Json complex_matrix_json(const CMatrix& m);
Json distribution_json(const std::string& name, const ComplexJointDistribution& rho);

}  // namespace wvstat
