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

#include "lapcoop/fixtures.hpp"

#include <functional>

namespace lapcoop {
namespace {

NodeSpec source(const std::string& name, const TrafficModel& traffic) {
    NodeSpec n;
    n.name = name;
    n.source = true;
    n.traffic = traffic;
    return n;
}

NodeSpec relay(const std::string& name) {
    NodeSpec n;
    n.name = name;
    n.relay = true;
    return n;
}

LinkEntry uplink(const std::string& from, double d, double k_db, double alpha) {
    LinkEntry e;
    e.from = from;
    e.to = "LAP";
    e.distance_m = d;
    e.rice_factor_db = k_db;
    e.pathloss_exponent = alpha;
    return e;
}

LinkEntry ground(const std::string& from, const std::string& to, double d, double alpha) {
    LinkEntry e;
    e.from = from;
    e.to = to;
    e.distance_m = d;
    e.pathloss_exponent = alpha;
    return e;
}

// 1000-byte packets at a constant rate.
ConstantTraffic paced(double rate_pps, double duration_s) {
    ConstantTraffic t;
    t.size_bits = 8000.0;
    t.interval_s = 1.0 / rate_pps;
    t.count = static_cast<std::size_t>(rate_pps * duration_s + 0.5);
    return t;
}

Scenario base(const std::string& name, double duration_s) {
    Scenario s;
    s.name = name;
    s.duration_s = duration_s;
    s.reporting_period_s = 0.2;
    s.coherence_time_s = 1.0;
    s.mode = FixedDirectPower{1.0};
    return s;
}

Scenario one_source(const std::string& name, double rate_pps, double duration_s) {
    Scenario s = base(name, duration_s);
    s.nodes = {source("S1", paced(rate_pps, duration_s)), relay("R1"), relay("R2"), relay("R3")};
    s.links = {
        uplink("S1", 4030.14, 5.0, 2.1),   ground("S1", "R1", 1000.0, 2.0), uplink("R1", 4030.14, 6.0, 2.0),
        ground("S1", "R2", 860.233, 2.1),  uplink("R2", 3504.71, 8.0, 2.0), ground("S1", "R3", 538.516, 2.3),
        uplink("R3", 3799.0, 10.0, 2.1),
    };
    return s;
}

Scenario two_sources(const std::string& name, double rate_pps, double duration_s) {
    Scenario s = one_source(name, rate_pps, duration_s);
    s.nodes.insert(s.nodes.begin() + 1, source("S2", paced(rate_pps, duration_s)));
    s.links.push_back(uplink("S2", 3810.0, 6.0, 2.2));
    s.links.push_back(ground("S2", "R1", 824.0, 2.1));
    s.links.push_back(ground("S2", "R2", 583.0, 2.2));
    s.links.push_back(ground("S2", "R3", 860.0, 2.5));
    return s;
}

Scenario ten_sources(const std::string& name, const TrafficModel& traffic, double duration_s) {
    Scenario s = base(name, duration_s);
    RandomLayout r;
    r.sources = 10;
    r.relays = 6;
    r.area_m = 1000.0;
    r.source_traffic = traffic;
    s.random = r;
    s.lap_altitude_m = 2000.0;
    return s;
}

struct Entry {
    FixtureInfo info;
    std::function<Scenario()> build;
};

const std::vector<Entry>& registry() {
    static const std::vector<Entry> entries = {
        {{"table2_1s3r", "1 source, 3 relays, fixed links; 1 packet/s for 1000 s"},
         [] { return one_source("table2_1s3r", 1.0, 1000.0); }},
        {{"table2_1s3r_sweep", "1 source, 3 relays; 100 packets/s for 100 s, for reporting-period sweeps"},
         [] { return one_source("table2_1s3r_sweep", 100.0, 100.0); }},
        {{"table3_2s3r", "2 sources, 3 relays, fixed links; 1 packet/s for 1000 s"},
         [] { return two_sources("table3_2s3r", 1.0, 1000.0); }},
        {{"table3_2s3r_sweep", "2 sources, 3 relays; 100 packets/s for 100 s"},
         [] { return two_sources("table3_2s3r_sweep", 100.0, 100.0); }},
        {{"table3_10s6r", "10 sources, 6 relays, random layout; 1 packet/s for 1000 s"},
         [] { return ten_sources("table3_10s6r", paced(1.0, 1000.0), 1000.0); }},
        {{"table3_10s6r_sweep", "10 sources, 6 relays, random layout; 100 packets/s for 30 s"},
         [] { return ten_sources("table3_10s6r_sweep", paced(100.0, 30.0), 30.0); }},
        {{"table4_10s6r_delay",
          "10 sources, 6 relays; Poisson traffic (20 ms mean) at every node, 5 ms service, 60 s"},
         [] {
             Scenario s = ten_sources("table4_10s6r_delay", ExponentialTraffic{0.02, 8000.0, 0.0}, 60.0);
             s.random->relay_traffic = ExponentialTraffic{0.02, 8000.0, 0.0};
             s.queue = QueueConfig{0.005, ServiceDistribution::deterministic};
             return s;
         }},
    };
    return entries;
}

}  // namespace

std::vector<FixtureInfo> fixture_list() {
    std::vector<FixtureInfo> out;
    for (const auto& e : registry()) out.push_back(e.info);
    return out;
}

std::optional<Scenario> fixture(std::string_view name) {
    for (const auto& e : registry()) {
        if (e.info.name == name) return e.build();
    }
    return std::nullopt;
}

}  // namespace lapcoop
