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

#ifndef LAPCOOP_TESTS_SMALL_SCENARIO_HPP
#define LAPCOOP_TESTS_SMALL_SCENARIO_HPP

#include <string>

#include "lapcoop/scenario.hpp"

namespace testing_support {

inline lapcoop::LinkEntry link(const std::string& from, const std::string& to, double d, double alpha,
                               std::optional<double> k_db = std::nullopt) {
    lapcoop::LinkEntry e;
    e.from = from;
    e.to = to;
    e.distance_m = d;
    e.pathloss_exponent = alpha;
    e.rice_factor_db = k_db;
    return e;
}

/// One source and two relays with short, strong ground hops.
inline lapcoop::Scenario small(double duration_s = 10.0, double rate_pps = 5.0) {
    using namespace lapcoop;
    Scenario s;
    s.name = "small";
    s.duration_s = duration_s;
    s.reporting_period_s = 0.2;
    s.coherence_time_s = 1.0;
    NodeSpec src;
    src.name = "S1";
    src.source = true;
    src.traffic = ConstantTraffic{static_cast<std::size_t>(rate_pps * duration_s), 8000.0, 1.0 / rate_pps, 0.0};
    NodeSpec r1;
    r1.name = "R1";
    r1.relay = true;
    NodeSpec r2 = r1;
    r2.name = "R2";
    s.nodes = {src, r1, r2};
    s.links = {link("S1", "LAP", 4030.0, 2.1, 5.0), link("S1", "R1", 500.0, 2.1), link("S1", "R2", 900.0, 2.3),
               link("R1", "LAP", 3600.0, 2.0, 8.0), link("R2", "LAP", 3800.0, 2.0, 10.0)};
    return s;
}

}  // namespace testing_support

#endif  // LAPCOOP_TESTS_SMALL_SCENARIO_HPP
