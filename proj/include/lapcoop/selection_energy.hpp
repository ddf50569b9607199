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

#ifndef LAPCOOP_SELECTION_ENERGY_HPP
#define LAPCOOP_SELECTION_ENERGY_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "lapcoop/power_control.hpp"

namespace lapcoop {

using NodeId = int;

/// Power prices of reception, reporting and computation.
struct EnergyPrices {
    double rx_power_terrestrial_w = 0.1;
    double rx_power_lap_w = 0.2;
    double tx_power_report_terrestrial_w = 0.1995;  // 23 dBm
    double tx_power_report_lap_w = 1.0;
    double report_bitrate_bps = 2.0e6;
    double report_length_bits = 288.0;
    double cpu_power_w = 0.150;
    double cpu_clock_hz = 528.0e6;

    /// Airtime of one report broadcast.
    double report_airtime_s() const noexcept { return report_length_bits / report_bitrate_bps; }

    std::vector<std::string> violations() const;
};

struct HopBitrates {
    double source_relay_bps = 6.0e6;
    double relay_lap_bps = 6.0e6;
};

/// (P_t + P_rx^LAP) * T_d.
double packet_energy_direct(double p_tx_w, double packet_bits, double bitrate_bps, const EnergyPrices& prices);

/// Source and relay transmit energy, relay and LAP reception energy and the
/// decision's computation energy. Each hop uses its own airtime.
double packet_energy_relay(const PowerAllocation& alloc, double packet_bits, const HopBitrates& bitrates,
                           const EnergyPrices& prices, double e_com_j);

/// Efficiency factor e_relay / e_direct.
double compute_beta(double e_relay_j, double e_direct_j);

struct BetaRecord {
    NodeId source_id = 0;
    NodeId relay_id = 0;
    double beta = 1.0;
    double e_relay_j = 0.0;
    double e_direct_j = 0.0;
    double timestamp_s = 0.0;
};

struct RelayCandidate {
    NodeId relay_id = 0;
    PowerAllocation allocation;
    double energy_j = 0.0;
};

enum class LinkKind { direct, cooperative };

struct LinkChoice {
    LinkKind kind = LinkKind::direct;
    std::optional<NodeId> relay_id;
    PowerAllocation allocation;
    std::optional<double> beta_hat;
    double energy_j = 0.0;
    /// Direct path used although its own allocation misses the target.
    bool degraded = false;
};

/// Cooperative through the smallest-beta feasible relay iff that beta is
/// strictly below one; ties at one and empty candidate sets go direct.
LinkChoice select_link(NodeId source_id, const PowerAllocation& direct, double e_direct_j,
                       std::span<const RelayCandidate> candidates);

/// Reporting energy of one period: aerial and terrestrial dissemination.
struct OverheadEnergy {
    double aerial_j = 0.0;
    double terrestrial_j = 0.0;
    double total_j() const noexcept { return aerial_j + terrestrial_j; }
};

OverheadEnergy overhead_energy_per_period(int terrestrial_nodes, const EnergyPrices& prices);

/// Per-decision CPU energy, (30 + 32 M) P_f / Omega.
double computation_energy(int relay_candidates, const EnergyPrices& prices);

enum class EnergyCategory : std::uint8_t { transmit, receive, reporting, compute };

struct NodeEnergy {
    double transmit_j = 0.0;
    double receive_j = 0.0;
    double reporting_oh_j = 0.0;
    double compute_j = 0.0;

    double total_j() const noexcept { return transmit_j + receive_j + reporting_oh_j + compute_j; }
};

struct Booking {
    double time_s = 0.0;
    NodeId node = 0;
    EnergyCategory category = EnergyCategory::transmit;
    double joules = 0.0;
};

/// Energy actually spent by the network, per node and per category. Every
/// booking is also kept in order so that totals can be audited.
class EnergyLedger {
public:
    void book(double time_s, NodeId node, EnergyCategory category, double joules);

    const std::map<NodeId, NodeEnergy>& nodes() const noexcept { return nodes_; }
    NodeEnergy node(NodeId id) const;
    const std::vector<Booking>& bookings() const noexcept { return bookings_; }

    double total_j() const noexcept;
    double total_j(EnergyCategory category) const noexcept;

private:
    std::map<NodeId, NodeEnergy> nodes_;
    std::vector<Booking> bookings_;
};

/// Books one reporting period: each terrestrial node transmits its report
/// and receives every other report, including the LAP's.
void book_reporting_period(EnergyLedger& ledger, double time_s, std::span<const NodeId> terrestrial,
                           NodeId lap, const EnergyPrices& prices);

struct RelayedPacket {
    std::uint64_t packet_id = 0;
    NodeId source = 0;
    double p_relay_w = 0.0;
    double packet_bits = 0.0;
    double bitrate_bps = 6.0e6;
};

struct TransmitAction {
    NodeId relay = 0;
    NodeId source = 0;
    double power_w = 0.0;
    double airtime_s = 0.0;
    double energy_j = 0.0;
};

/// Relay-side procedure: forward a relayed packet on the aerial interface at
/// the power negotiated by its source.
class RelayAgent {
public:
    explicit RelayAgent(NodeId id = 0) : id_(id) {}

    NodeId id() const noexcept { return id_; }
    void learn_source(NodeId source) { known_sources_.insert(source); }
    std::size_t dropped() const noexcept { return dropped_; }

    /// Books the transmit energy; returns nothing (and counts a drop) for an
    /// unknown source.
    std::optional<TransmitAction> forward(const RelayedPacket& packet, EnergyLedger& ledger, double time_s);

private:
    NodeId id_;
    std::set<NodeId> known_sources_;
    std::size_t dropped_ = 0;
};

/// Per-packet decision record with every alternative the source evaluated.
struct RelayOption {
    NodeId relay = 0;
    bool feasible = false;
    PowerAllocation allocation;
    /// Energy of forcing this relay; at p_max on both hops when infeasible.
    double energy_j = 0.0;
    double beta = 1.0;
};

struct PacketRecord {
    std::uint64_t packet_id = 0;
    NodeId source = 0;
    double time_s = 0.0;
    double xi = 0.0;
    PowerAllocation direct;
    double e_direct_j = 0.0;
    std::vector<RelayOption> relays;
    LinkKind chosen = LinkKind::direct;
    std::optional<NodeId> chosen_relay;
    double e_chosen_j = 0.0;
    double e_com_j = 0.0;  // charged only when relayed
};

struct OverheadSchedule {
    double duration_s = 0.0;
    std::size_t periods = 0;
    double energy_per_period_j = 0.0;
};

/// Network energy of direct-only, single-relay, single-relay adaptive and
/// fully adaptive operation over one run.
struct NetworkTotals {
    double e_direct_j = 0.0;
    double e_adaptive_j = 0.0;
    double e_oh_j = 0.0;
    double e_com_j = 0.0;
    std::map<NodeId, double> e_relay_j;
    std::map<NodeId, double> e_adaptive_single_j;
    std::size_t packets = 0;
};

NetworkTotals network_totals(std::span<const PacketRecord> records, double duration_s,
                             const OverheadSchedule& overhead);

/// Number of whole periods of length period_s in duration_s, tolerant of
/// rounding in the quotient.
std::size_t period_count(double duration_s, double period_s);

}  // namespace lapcoop

#endif  // LAPCOOP_SELECTION_ENERGY_HPP
