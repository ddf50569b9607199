// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LAPCOOP_SCENARIO_IO_HPP
#define LAPCOOP_SCENARIO_IO_HPP

#include <filesystem>
#include <string>
#include <string_view>

#include "lapcoop/scenario.hpp"

namespace lapcoop {

inline constexpr int kScenarioSchemaVersion = 1;

/// Parses scenario JSON. Throws ParseError on malformed text, unknown keys
/// or wrongly typed fields. Does not validate invariants.
Scenario parse_scenario(std::string_view text);

/// Reads, parses and validates a scenario file. Throws ParseError or
/// ValidationError.
Scenario load_scenario(const std::filesystem::path& path);

/// Canonical JSON with every field explicit. Lossless: parsing the output
/// gives back an identical scenario.
std::string emit_scenario(const Scenario& scenario);

/// 16 hex digits identifying the scenario's canonical form.
std::string scenario_digest(const Scenario& scenario);

}  // namespace lapcoop

#endif  // LAPCOOP_SCENARIO_IO_HPP
