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


#include "wvstat/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "wvstat/error.hpp"

namespace wvstat {

std::string_view artifact_version() { return WVSTAT_VERSION; }

namespace {

const char* relation_name(Relation r) {
  switch (r) {
    case Relation::Equal: return "eq";
    case Relation::AtLeast: return "ge";
    case Relation::AtMost: return "le";
  }
  return "eq";
}

Relation relation_from(const std::string& s) {
  if (s == "eq") return Relation::Equal;
  if (s == "ge") return Relation::AtLeast;
  if (s == "le") return Relation::AtMost;
  throw Error(ErrorKind::ConfigInvalid, "checks[].relation: unknown relation '" + s + "'");
}

// JSON has no NaN or infinity; they travel as null.
Json real_json(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

double real_from(const Json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

bool same_real(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }

std::string csv_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

CheckRecord make(std::string name, double lhs, double rhs, double tol, Relation rel, bool pass) {
  CheckRecord c;
  c.name = std::move(name);
  c.lhs = lhs;
  c.rhs = rhs;
  c.abs_diff = std::abs(lhs - rhs);
  c.tolerance = tol;
  c.relation = rel;
  c.pass = pass;
  return c;
}

}  // namespace

bool CheckRecord::operator==(const CheckRecord& o) const {
  return name == o.name && same_real(lhs, o.lhs) && same_real(rhs, o.rhs) && same_real(abs_diff, o.abs_diff) &&
         same_real(tolerance, o.tolerance) && relation == o.relation && pass == o.pass;
}

CheckRecord check_equal(std::string name, double lhs, double rhs, double tolerance) {
  const bool ok = std::abs(lhs - rhs) <= tolerance;
  return make(std::move(name), lhs, rhs, tolerance, Relation::Equal, ok);
}

CheckRecord check_at_least(std::string name, double lhs, double rhs, double tolerance) {
  return make(std::move(name), lhs, rhs, tolerance, Relation::AtLeast, lhs >= rhs - tolerance);
}

CheckRecord check_at_most(std::string name, double lhs, double rhs, double tolerance) {
  return make(std::move(name), lhs, rhs, tolerance, Relation::AtMost, lhs <= rhs + tolerance);
}

bool Report::passed() const {
  for (const auto& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

std::vector<std::string> Report::failures() const {
  std::vector<std::string> out;
  for (const auto& c : checks) {
    if (!c.pass) out.push_back(c.name);
  }
  return out;
}

bool Report::operator==(const Report& o) const {
  return artifact == o.artifact && version == o.version && scenario_kind == o.scenario_kind &&
         scenario == o.scenario && checks == o.checks && distributions == o.distributions &&
         same_real(elapsed_seconds, o.elapsed_seconds);
}

Format parse_format(std::string_view name) {
  if (name == "json") return Format::Json;
  if (name == "csv") return Format::Csv;
  if (name == "both") return Format::Both;
  throw Error(ErrorKind::ConfigInvalid, "format: expected json, csv or both, got '" + std::string(name) + "'");
}

Json to_json(const Report& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks) {
    checks.push_back(Json{{"name", c.name},
                          {"lhs", real_json(c.lhs)},
                          {"rhs", real_json(c.rhs)},
                          {"abs_diff", real_json(c.abs_diff)},
                          {"tolerance", real_json(c.tolerance)},
                          {"relation", relation_name(c.relation)},
                          {"pass", c.pass}});
  }
  return Json{{"artifact", r.artifact},
              {"version", r.version},
              {"scenario_kind", r.scenario_kind},
              {"passed", r.passed()},
              {"scenario", r.scenario},
              {"checks", std::move(checks)},
              {"distributions", r.distributions},
              {"timing", Json{{"elapsed_seconds", r.elapsed_seconds}}}};
}

Report report_from_json(const Json& doc) {
  try {
    Report r;
    r.artifact = doc.at("artifact").get<std::string>();
    r.version = doc.at("version").get<std::string>();
    r.scenario_kind = doc.at("scenario_kind").get<std::string>();
    r.scenario = doc.at("scenario");
    for (const auto& c : doc.at("checks")) {
      CheckRecord rec;
      rec.name = c.at("name").get<std::string>();
      rec.lhs = real_from(c.at("lhs"));
      rec.rhs = real_from(c.at("rhs"));
      rec.abs_diff = real_from(c.at("abs_diff"));
      rec.tolerance = real_from(c.at("tolerance"));
      rec.relation = relation_from(c.at("relation").get<std::string>());
      rec.pass = c.at("pass").get<bool>();
      r.checks.push_back(std::move(rec));
    }
    r.distributions = doc.at("distributions");
    r.elapsed_seconds = doc.at("timing").at("elapsed_seconds").get<double>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ConfigInvalid, std::string("report document: ") + e.what());
  }
}

std::string emit_json(const Report& report) { return to_json(report).dump(2) + "\n"; }

std::string emit_csv(const Report& report) {
  std::ostringstream out;
  out << "scenario,check,lhs,rhs,abs_diff,tolerance,pass\n";
  for (const auto& c : report.checks) {
    out << csv_field(report.scenario_kind) << ',' << csv_field(c.name) << ',' << csv_real(c.lhs) << ','
        << csv_real(c.rhs) << ',' << csv_real(c.abs_diff) << ',' << csv_real(c.tolerance) << ','
        << (c.pass ? "true" : "false") << '\n';
  }
  return out.str();
}

Report parse_report(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::ConfigInvalid, std::string("report document: ") + e.what());
  }
  return report_from_json(doc);
}

std::vector<std::filesystem::path> write_report(const Report& report, const std::filesystem::path& dir,
                                                const std::string& stem, Format format) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::IoFailure, "cannot create " + dir.string() + ": " + ec.message());

  std::vector<std::filesystem::path> written;
  auto put = [&](const std::string& ext, const std::string& body) {
    const auto path = dir / (stem + ext);
    std::ofstream f(path, std::ios::binary);
    f << body;
    f.close();
    if (!f) throw Error(ErrorKind::IoFailure, "cannot write " + path.string());
    written.push_back(path);
  };
  if (format != Format::Csv) put(".json", emit_json(report));
  if (format != Format::Json) put(".csv", emit_csv(report));
  return written;
}

Json complex_json(Complex z) { return Json::array({real_json(z.real()), real_json(z.imag())}); }

Json complex_vector_json(const CVector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_json(v(i)));
  return out;
}

Json complex_vector_json(const std::vector<Complex>& v) {
  Json out = Json::array();
  for (const auto& z : v) out.push_back(complex_json(z));
  return out;
}

Json complex_matrix_json(const CMatrix& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_json(m(i, j)));
    out.push_back(std::move(row));
  }
  return out;
}

Json distribution_json(const std::string& name, const ComplexJointDistribution& rho) {
  return Json{{"name", name},
              {"kind", "kd-joint"},
              {"a_labels", rho.a_labels()},
              {"b_labels", rho.b_labels()},
              {"values", complex_matrix_json(rho.values())},
              {"marginal_over_a", complex_vector_json(rho.marginal_over_a())},
              {"marginal_over_b", complex_vector_json(rho.marginal_over_b())},
              {"nonclassicality", real_json(rho.nonclassicality())},
              {"negativity", real_json(rho.negativity())},
              {"imaginarity", real_json(rho.imaginarity())}};
}

}  // namespace wvstat
