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

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wvstat/report.hpp"

namespace wvstat {

struct ScenarioKind {
  std::string name;
  std::string summary;
};

const std::vector<ScenarioKind>& scenario_catalog();

/// A validated scenario. Every operand has been built (and its invariants
/// checked) by the time load() returns, so run() does no parsing.
class Scenario {
 public:
  /// Throws ConfigInvalid with a field path such as "operands.a[1][0]".
  static Scenario load(const Json& config, std::optional<std::uint64_t> seed_override = {});
  static Scenario load_file(const std::filesystem::path& path,
                            std::optional<std::uint64_t> seed_override = {});

  const std::string& kind() const;
  /// The configuration with every default filled in.
  const Json& resolved() const;
  Report run() const;

  struct Impl;

 private:
  explicit Scenario(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

inline Report run_scenario(const Json& config, std::optional<std::uint64_t> seed_override = {}) {
  return Scenario::load(config, seed_override).run();
}

}  // namespace wvstat
