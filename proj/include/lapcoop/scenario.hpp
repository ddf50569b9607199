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

#ifndef LAPCOOP_SCENARIO_HPP
#define LAPCOOP_SCENARIO_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "lapcoop/channel.hpp"
#include "lapcoop/power_control.hpp"
#include "lapcoop/selection_energy.hpp"

namespace lapcoop {

struct CartesianPosition {
    double x_m = 0.0;
    double y_m = 0.0;
    double z_m = 0.0;
};

double euclidean_distance(const CartesianPosition& a, const CartesianPosition& b) noexcept;

/// Packets every interval_s, starting at start_s.
struct ConstantTraffic {
    std::size_t count = 0;
    double size_bits = 8000.0;
    double interval_s = 1.0;
    double start_s = 0.0;
};

/// Poisson arrivals with the given mean inter-arrival time.
struct ExponentialTraffic {
    double mean_s = 0.02;
    double size_bits = 8000.0;
    double start_s = 0.0;
};

using TrafficModel = std::variant<ConstantTraffic, ExponentialTraffic>;

/// A terrestrial node. Sources choose a path for every local packet; a
/// relay-only node with traffic sends its own packets direct.
struct NodeSpec {
    std::string name;
    bool source = false;
    bool relay = false;
    std::optional<CartesianPosition> position;
    std::optional<GeoPosition> geo;
    std::optional<TrafficModel> traffic;
};

/// Radio values shared by every link unless a link overrides them. Stored in
/// linear units; files carry dB fields that are converted on load.
struct RadioDefaults {
    double carrier_hz = 3.5e9;
    double tx_gain = db_to_linear(3.0);
    double rx_gain = db_to_linear(3.0);
    double noise_power_w = dbm_to_watts(-125.0);
    double bitrate_bps = 6.0e6;
    double reference_distance_m = 1.0;
};

/// A link as written in a scenario: only the fields that differ from the
/// radio defaults need to be present. Missing distance means "derive from
/// node positions".
struct LinkEntry {
    std::string from;
    std::string to;
    std::optional<double> distance_m;
    double pathloss_exponent = 2.0;
    std::optional<double> rice_factor_db;
    std::optional<double> carrier_hz;
    std::optional<double> tx_gain;
    std::optional<double> rx_gain;
    std::optional<double> noise_power_w;
    std::optional<double> bitrate_bps;
};

enum class ServiceDistribution { deterministic, exponential };

struct QueueConfig {
    double service_time_s = 0.005;
    ServiceDistribution distribution = ServiceDistribution::deterministic;
};

/// Fixed-direct-power mode: the target BER of every decision is the direct
/// link's BER at this power.
struct FixedDirectPower {
    double p_w = 1.0;
};

/// Explicit-target mode: every path is sized for this BER.
struct ExplicitTarget {
    double xi = 1e-4;
};

using OperatingMode = std::variant<FixedDirectPower, ExplicitTarget>;

template <typename T>
struct Range {
    T lo{};
    T hi{};
};

/// Random topology over a square field with the LAP above its center.
struct RandomLayout {
    int sources = 10;
    int relays = 6;
    double area_m = 1000.0;
    Range<double> uplink_pathloss_exponent{2.0, 2.2};
    Range<double> terrestrial_pathloss_exponent{2.1, 2.8};
    Range<double> uplink_rice_factor_db{4.0, 10.0};
    /// Seed of the layout draw; the run seed when absent.
    std::optional<std::uint64_t> layout_seed;
    TrafficModel source_traffic = ConstantTraffic{1000, 8000.0, 1.0, 0.0};
    /// Local traffic of relay nodes, sent on their own uplink; relays carry
    /// only relayed packets when absent.
    std::optional<TrafficModel> relay_traffic;
};

struct Scenario {
    std::string name = "scenario";
    std::string lap_name = "LAP";
    double lap_altitude_m = 2000.0;
    /// LAP position; (0, 0, lap_altitude_m) when absent.
    std::optional<CartesianPosition> lap_position;
    /// Tangent-plane origin for nodes placed by latitude/longitude; the
    /// first such node when absent.
    std::optional<GeoPosition> geo_origin;
    std::vector<NodeSpec> nodes;
    std::vector<LinkEntry> links;
    std::optional<RandomLayout> random;

    RadioDefaults radio;
    QueueConfig queue;
    double reporting_period_s = 0.2;
    double coherence_time_s = 1.0;
    double duration_s = 1000.0;
    OperatingMode mode = FixedDirectPower{};
    SolverConfig solver;
    EnergyPrices prices;
    std::uint64_t seed = 1;
};

/// Nodes and links with numeric ids and every value resolved.
struct ResolvedNode {
    NodeId id = 0;
    std::string name;
    bool source = false;
    bool relay = false;
    bool lap = false;
    CartesianPosition position;
    std::optional<TrafficModel> traffic;
};

struct ResolvedLink {
    NodeId from = 0;
    NodeId to = 0;
    LinkSpec spec;
};

struct Topology {
    std::vector<ResolvedNode> nodes;
    std::vector<ResolvedLink> links;
    NodeId lap = 0;

    /// Index into links, or -1.
    int find_link(NodeId from, NodeId to) const noexcept;
    std::vector<NodeId> terrestrial() const;
    std::vector<NodeId> sources() const;
    std::vector<NodeId> relays() const;
    const std::string& name(NodeId id) const { return nodes.at(static_cast<std::size_t>(id)).name; }
};

/// Every violated invariant of a scenario, including those that only show up
/// once a random layout is expanded with `seed`.
std::vector<std::string> validate(const Scenario& scenario, std::uint64_t seed);

/// Resolves names, positions and defaults. Throws ValidationError.
Topology materialize(const Scenario& scenario, std::uint64_t seed);

}  // namespace lapcoop

#endif  // LAPCOOP_SCENARIO_HPP
