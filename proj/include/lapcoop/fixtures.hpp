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

#ifndef LAPCOOP_FIXTURES_HPP
#define LAPCOOP_FIXTURES_HPP

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lapcoop/scenario.hpp"

namespace lapcoop {

struct FixtureInfo {
    std::string name;
    std::string description;
};

/// Built-in scenarios, in a stable order.
std::vector<FixtureInfo> fixture_list();

/// The named built-in scenario, or nothing.
std::optional<Scenario> fixture(std::string_view name);

}  // namespace lapcoop

#endif  // LAPCOOP_FIXTURES_HPP
