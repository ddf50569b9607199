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

#include "lapcoop/scenario.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include "lapcoop/errors.hpp"
#include "lapcoop/rng.hpp"

namespace lapcoop {
namespace {

bool positive(double v) { return std::isfinite(v) && v > 0.0; }

void check_traffic(const TrafficModel& t, const std::string& where, std::vector<std::string>& out) {
    if (const auto* c = std::get_if<ConstantTraffic>(&t)) {
        if (!positive(c->interval_s)) out.push_back(where + ".interval_s must be > 0");
        if (!(c->size_bits >= 0.0)) out.push_back(where + ".size_bits must be >= 0");
        if (!(c->start_s >= 0.0)) out.push_back(where + ".start_s must be >= 0");
    } else {
        const auto& e = std::get<ExponentialTraffic>(t);
        if (!positive(e.mean_s)) out.push_back(where + ".mean_s must be > 0");
        if (!(e.size_bits >= 0.0)) out.push_back(where + ".size_bits must be >= 0");
        if (!(e.start_s >= 0.0)) out.push_back(where + ".start_s must be >= 0");
    }
}

CartesianPosition project(const GeoPosition& g, const GeoPosition& origin) {
    constexpr double rad = std::numbers::pi / 180.0;
    const double r_m = kEarthRadiusKm * 1000.0;
    return CartesianPosition{r_m * (g.longitude_deg - origin.longitude_deg) * rad *
                                 std::cos(origin.latitude_deg * rad),
                             r_m * (g.latitude_deg - origin.latitude_deg) * rad, g.altitude_m};
}

/// Expands a random layout into explicit nodes and links.
void expand_random(const Scenario& s, std::uint64_t seed, std::vector<NodeSpec>& nodes,
                   std::vector<LinkEntry>& links, CartesianPosition& lap) {
    const RandomLayout& r = *s.random;
    RngStream rng = SeedSequence(r.layout_seed.value_or(seed)).stream("layout");
    lap = CartesianPosition{0.5 * r.area_m, 0.5 * r.area_m, s.lap_altitude_m};

    for (int i = 0; i < r.sources; ++i) {
        NodeSpec n;
        n.name = "S" + std::to_string(i + 1);
        n.source = true;
        n.position = CartesianPosition{rng.uniform(0.0, r.area_m), rng.uniform(0.0, r.area_m), 0.0};
        n.traffic = r.source_traffic;
        nodes.push_back(std::move(n));
    }
    for (int i = 0; i < r.relays; ++i) {
        NodeSpec n;
        n.name = "R" + std::to_string(i + 1);
        n.relay = true;
        n.position = CartesianPosition{rng.uniform(0.0, r.area_m), rng.uniform(0.0, r.area_m), 0.0};
        n.traffic = r.relay_traffic;
        nodes.push_back(std::move(n));
    }
    for (const auto& n : nodes) {
        LinkEntry up;
        up.from = n.name;
        up.to = s.lap_name;
        up.pathloss_exponent = rng.uniform(r.uplink_pathloss_exponent.lo, r.uplink_pathloss_exponent.hi);
        up.rice_factor_db = rng.uniform(r.uplink_rice_factor_db.lo, r.uplink_rice_factor_db.hi);
        links.push_back(std::move(up));
    }
    for (const auto& from : nodes) {
        if (!from.source) continue;
        for (const auto& to : nodes) {
            if (!to.relay || to.name == from.name) continue;
            LinkEntry t;
            t.from = from.name;
            t.to = to.name;
            t.pathloss_exponent =
                rng.uniform(r.terrestrial_pathloss_exponent.lo, r.terrestrial_pathloss_exponent.hi);
            links.push_back(std::move(t));
        }
    }
}

Topology build(const Scenario& s, std::uint64_t seed, std::vector<std::string>& out) {
    auto need = [&](bool ok, std::string msg) {
        if (!ok) out.push_back(std::move(msg));
    };
    need(positive(s.duration_s), "duration_s must be > 0");
    need(positive(s.reporting_period_s), "reporting_period_s must be > 0");
    need(positive(s.coherence_time_s), "coherence_time_s must be > 0");
    need(s.lap_altitude_m >= 0.0, "lap_altitude_m must be >= 0");
    need(positive(s.queue.service_time_s), "queue.service_time_s must be > 0");
    need(!s.lap_name.empty(), "lap_name must not be empty");
    for (const auto& v : s.solver.violations()) out.push_back("solver." + v);
    for (const auto& v : s.prices.violations()) out.push_back("prices." + v);
    need(positive(s.radio.carrier_hz), "radio.carrier_hz must be > 0");
    need(positive(s.radio.tx_gain) && positive(s.radio.rx_gain), "radio antenna gains must be > 0");
    need(positive(s.radio.noise_power_w), "radio.noise_power must be > 0");
    need(positive(s.radio.bitrate_bps), "radio.bitrate_bps must be > 0");
    need(positive(s.radio.reference_distance_m), "radio.reference_distance_m must be > 0");
    if (const auto* f = std::get_if<FixedDirectPower>(&s.mode)) {
        need(f->p_w > 0.0 && f->p_w <= s.solver.p_max_w, "mode.p_w must lie in (0, p_max_w]");
    } else {
        const double xi = std::get<ExplicitTarget>(s.mode).xi;
        need(xi > 0.0 && xi < 0.5, "mode.xi must lie in (0, 0.5)");
    }

    std::vector<NodeSpec> nodes = s.nodes;
    std::vector<LinkEntry> links = s.links;
    CartesianPosition lap_pos = s.lap_position.value_or(CartesianPosition{0.0, 0.0, s.lap_altitude_m});
    if (s.random) {
        const RandomLayout& r = *s.random;
        need(s.nodes.empty() && s.links.empty(), "random layout cannot be combined with explicit nodes or links");
        need(r.sources >= 0 && r.relays >= 0, "random.sources and random.relays must be >= 0");
        need(positive(r.area_m), "random.area_m must be > 0");
        need(r.uplink_pathloss_exponent.lo <= r.uplink_pathloss_exponent.hi &&
                 r.terrestrial_pathloss_exponent.lo <= r.terrestrial_pathloss_exponent.hi &&
                 r.uplink_rice_factor_db.lo <= r.uplink_rice_factor_db.hi,
             "random ranges must have lo <= hi");
        check_traffic(r.source_traffic, "random.source_traffic", out);
        if (r.relay_traffic) check_traffic(*r.relay_traffic, "random.relay_traffic", out);
        if (!out.empty()) return {};
        expand_random(s, seed, nodes, links, lap_pos);
    }

    Topology topo;
    std::map<std::string, NodeId> ids;
    std::optional<GeoPosition> origin = s.geo_origin;
    for (const auto& n : nodes) {
        if (n.geo && !origin) origin = n.geo;
    }
    for (const auto& n : nodes) {
        const std::string where = "nodes[" + n.name + "]";
        need(!n.name.empty(), "node names must not be empty");
        need(n.name != s.lap_name, where + ": name collides with the LAP");
        need(!ids.contains(n.name), where + ": duplicate node name");
        need(!(n.position && n.geo), where + ": give either a Cartesian or a geographic position");
        if (n.geo) need(n.geo->valid(), where + ": latitude/longitude out of range");
        if (n.traffic) check_traffic(*n.traffic, where + ".traffic", out);
        need(n.source || n.relay, where + ": node must be a source, a relay or both");
        ResolvedNode rn;
        rn.id = static_cast<NodeId>(topo.nodes.size());
        rn.name = n.name;
        rn.source = n.source;
        rn.relay = n.relay;
        rn.traffic = n.traffic;
        if (n.position) rn.position = *n.position;
        if (n.geo && origin) rn.position = project(*n.geo, *origin);
        ids.emplace(n.name, rn.id);
        topo.nodes.push_back(std::move(rn));
    }
    {
        ResolvedNode lap;
        lap.id = static_cast<NodeId>(topo.nodes.size());
        lap.name = s.lap_name;
        lap.lap = true;
        lap.position = lap_pos;
        topo.lap = lap.id;
        ids.emplace(s.lap_name, lap.id);
        topo.nodes.push_back(std::move(lap));
    }
    auto has_position = [&](const std::string& name) {
        if (name == s.lap_name) return true;
        for (const auto& n : nodes) {
            if (n.name == name) return n.position.has_value() || n.geo.has_value();
        }
        return false;
    };

    std::set<std::pair<NodeId, NodeId>> seen;
    for (std::size_t i = 0; i < links.size(); ++i) {
        const LinkEntry& e = links[i];
        const std::string where = "links[" + std::to_string(i) + "] " + e.from + "->" + e.to;
        const auto from = ids.find(e.from);
        const auto to = ids.find(e.to);
        if (from == ids.end() || to == ids.end()) {
            out.push_back(where + ": unknown endpoint");
            continue;
        }
        if (from->second == topo.lap) {
            out.push_back(where + ": links must originate at a terrestrial node");
            continue;
        }
        if (from->second == to->second) {
            out.push_back(where + ": self link");
            continue;
        }
        if (!seen.insert({from->second, to->second}).second) {
            out.push_back(where + ": duplicate link");
            continue;
        }
        const bool uplink = to->second == topo.lap;
        need(uplink == e.rice_factor_db.has_value(),
             where + ": a Rice factor is required on links to the LAP and forbidden elsewhere");

        LinkSpec spec;
        if (e.distance_m) {
            spec.distance_m = *e.distance_m;
        } else if (has_position(e.from) && has_position(e.to)) {
            spec.distance_m = euclidean_distance(topo.nodes[static_cast<std::size_t>(from->second)].position,
                                                 topo.nodes[static_cast<std::size_t>(to->second)].position);
            spec.distance_m = std::max(spec.distance_m, s.radio.reference_distance_m);
        } else {
            out.push_back(where + ": distance_m missing and endpoint positions unknown");
            continue;
        }
        spec.pathloss_exponent = e.pathloss_exponent;
        spec.rice_factor_db = e.rice_factor_db;
        spec.carrier_hz = e.carrier_hz.value_or(s.radio.carrier_hz);
        spec.tx_gain = e.tx_gain.value_or(s.radio.tx_gain);
        spec.rx_gain = e.rx_gain.value_or(s.radio.rx_gain);
        spec.noise_power_w = e.noise_power_w.value_or(s.radio.noise_power_w);
        spec.bitrate_bps = e.bitrate_bps.value_or(s.radio.bitrate_bps);
        spec.reference_distance_m = s.radio.reference_distance_m;
        for (const auto& v : spec.violations()) out.push_back(where + ": " + v);
        topo.links.push_back(ResolvedLink{from->second, to->second, spec});
    }

    for (const auto& n : topo.nodes) {
        if (n.lap) continue;
        if ((n.source || n.relay) && topo.find_link(n.id, topo.lap) < 0) {
            out.push_back((n.source ? "source " : "relay ") + n.name + " has no direct link to " + s.lap_name);
        }
        if (!n.source) continue;
        for (const auto& r : topo.nodes) {
            if (!r.relay || r.id == n.id) continue;
            if (topo.find_link(n.id, r.id) < 0) {
                out.push_back("source " + n.name + " has no link to relay " + r.name);
            }
        }
    }
    return topo;
}

}  // namespace

double euclidean_distance(const CartesianPosition& a, const CartesianPosition& b) noexcept {
    return std::hypot(a.x_m - b.x_m, a.y_m - b.y_m, a.z_m - b.z_m);
}

int Topology::find_link(NodeId from, NodeId to) const noexcept {
    for (std::size_t i = 0; i < links.size(); ++i) {
        if (links[i].from == from && links[i].to == to) return static_cast<int>(i);
    }
    return -1;
}

std::vector<NodeId> Topology::terrestrial() const {
    std::vector<NodeId> out;
    for (const auto& n : nodes) {
        if (!n.lap) out.push_back(n.id);
    }
    return out;
}

std::vector<NodeId> Topology::sources() const {
    std::vector<NodeId> out;
    for (const auto& n : nodes) {
        if (n.source) out.push_back(n.id);
    }
    return out;
}

std::vector<NodeId> Topology::relays() const {
    std::vector<NodeId> out;
    for (const auto& n : nodes) {
        if (n.relay) out.push_back(n.id);
    }
    return out;
}

std::vector<std::string> validate(const Scenario& scenario, std::uint64_t seed) {
    std::vector<std::string> out;
    build(scenario, seed, out);
    return out;
}

Topology materialize(const Scenario& scenario, std::uint64_t seed) {
    std::vector<std::string> out;
    Topology t = build(scenario, seed, out);
    if (!out.empty()) throw ValidationError(std::move(out));
    return t;
}

}  // namespace lapcoop
