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

#include "lapcoop/selection_energy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lapcoop {

std::vector<std::string> EnergyPrices::violations() const {
    std::vector<std::string> out;
    auto positive = [&](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) out.push_back(std::string(name) + " must be > 0");
    };
    positive(rx_power_terrestrial_w, "rx_power_terrestrial_w");
    positive(rx_power_lap_w, "rx_power_lap_w");
    positive(tx_power_report_terrestrial_w, "tx_power_report_terrestrial_w");
    positive(tx_power_report_lap_w, "tx_power_report_lap_w");
    positive(report_bitrate_bps, "report_bitrate_bps");
    positive(report_length_bits, "report_length_bits");
    positive(cpu_power_w, "cpu_power_w");
    positive(cpu_clock_hz, "cpu_clock_hz");
    return out;
}

double packet_energy_direct(double p_tx_w, double packet_bits, double bitrate_bps, const EnergyPrices& prices) {
    if (p_tx_w < 0.0 || packet_bits < 0.0 || !(bitrate_bps > 0.0)) {
        throw std::invalid_argument("packet_energy_direct: invalid power, length or bitrate");
    }
    return (p_tx_w + prices.rx_power_lap_w) * (packet_bits / bitrate_bps);
}

double packet_energy_relay(const PowerAllocation& alloc, double packet_bits, const HopBitrates& bitrates,
                           const EnergyPrices& prices, double e_com_j) {
    if (!alloc.feasible || !alloc.p_relay_w) {
        throw std::invalid_argument("packet_energy_relay: allocation is not a feasible cooperative one");
    }
    if (packet_bits < 0.0 || !(bitrates.source_relay_bps > 0.0) || !(bitrates.relay_lap_bps > 0.0)) {
        throw std::invalid_argument("packet_energy_relay: invalid length or bitrate");
    }
    const double t_sr = packet_bits / bitrates.source_relay_bps;
    const double t_rd = packet_bits / bitrates.relay_lap_bps;
    return alloc.p_source_w * t_sr + prices.rx_power_terrestrial_w * t_sr + *alloc.p_relay_w * t_rd +
           prices.rx_power_lap_w * t_rd + e_com_j;
}

double compute_beta(double e_relay_j, double e_direct_j) {
    if (!(e_direct_j > 0.0)) throw std::invalid_argument("compute_beta: direct energy must be > 0");
    return e_relay_j / e_direct_j;
}

LinkChoice select_link(NodeId /*source_id*/, const PowerAllocation& direct, double e_direct_j,
                       std::span<const RelayCandidate> candidates) {
    LinkChoice choice;
    choice.kind = LinkKind::direct;
    choice.allocation = direct;
    choice.energy_j = e_direct_j;
    choice.degraded = !direct.feasible;

    const RelayCandidate* best = nullptr;
    double best_beta = 1.0;
    for (const auto& c : candidates) {
        if (!c.allocation.feasible) continue;
        const double beta = compute_beta(c.energy_j, e_direct_j);
        if (beta < best_beta) {
            best_beta = beta;
            best = &c;
        }
    }
    if (best != nullptr) {
        choice.kind = LinkKind::cooperative;
        choice.relay_id = best->relay_id;
        choice.allocation = best->allocation;
        choice.beta_hat = best_beta;
        choice.energy_j = best->energy_j;
        choice.degraded = false;
    }
    return choice;
}

OverheadEnergy overhead_energy_per_period(int m, const EnergyPrices& prices) {
    if (m < 0) throw std::invalid_argument("overhead_energy_per_period: negative node count");
    const double t_ca = prices.report_airtime_s();
    const double mm = static_cast<double>(m);
    OverheadEnergy e;
    e.aerial_j = (prices.tx_power_report_lap_w + mm * prices.rx_power_terrestrial_w) * t_ca;
    e.terrestrial_j = m == 0 ? 0.0
                             : mm * (prices.tx_power_report_terrestrial_w +
                                     (mm - 1.0) * prices.rx_power_terrestrial_w) * t_ca;
    return e;
}

double computation_energy(int relay_candidates, const EnergyPrices& prices) {
    if (relay_candidates < 0) throw std::invalid_argument("computation_energy: negative relay count");
    const double e_f = prices.cpu_power_w / prices.cpu_clock_hz;
    return (30.0 + 32.0 * relay_candidates) * e_f;
}

void EnergyLedger::book(double time_s, NodeId node, EnergyCategory category, double joules) {
    NodeEnergy& n = nodes_[node];
    switch (category) {
        case EnergyCategory::transmit: n.transmit_j += joules; break;
        case EnergyCategory::receive: n.receive_j += joules; break;
        case EnergyCategory::reporting: n.reporting_oh_j += joules; break;
        case EnergyCategory::compute: n.compute_j += joules; break;
    }
    bookings_.push_back(Booking{time_s, node, category, joules});
}

NodeEnergy EnergyLedger::node(NodeId id) const {
    const auto it = nodes_.find(id);
    return it == nodes_.end() ? NodeEnergy{} : it->second;
}

double EnergyLedger::total_j() const noexcept {
    double s = 0.0;
    for (const auto& [id, n] : nodes_) s += n.total_j();
    return s;
}

double EnergyLedger::total_j(EnergyCategory category) const noexcept {
    double s = 0.0;
    for (const auto& [id, n] : nodes_) {
        switch (category) {
            case EnergyCategory::transmit: s += n.transmit_j; break;
            case EnergyCategory::receive: s += n.receive_j; break;
            case EnergyCategory::reporting: s += n.reporting_oh_j; break;
            case EnergyCategory::compute: s += n.compute_j; break;
        }
    }
    return s;
}

void book_reporting_period(EnergyLedger& ledger, double time_s, std::span<const NodeId> terrestrial,
                           NodeId lap, const EnergyPrices& prices) {
    const double t_ca = prices.report_airtime_s();
    const double m = static_cast<double>(terrestrial.size());
    ledger.book(time_s, lap, EnergyCategory::reporting, prices.tx_power_report_lap_w * t_ca);
    for (NodeId id : terrestrial) {
        // own report, the other M-1 terrestrial reports and the LAP's report
        const double e = (prices.tx_power_report_terrestrial_w + m * prices.rx_power_terrestrial_w) * t_ca;
        ledger.book(time_s, id, EnergyCategory::reporting, e);
    }
}

std::optional<TransmitAction> RelayAgent::forward(const RelayedPacket& packet, EnergyLedger& ledger,
                                                  double time_s) {
    if (!known_sources_.contains(packet.source)) {
        ++dropped_;
        return std::nullopt;
    }
    TransmitAction a;
    a.relay = id_;
    a.source = packet.source;
    a.power_w = packet.p_relay_w;
    a.airtime_s = packet.packet_bits / packet.bitrate_bps;
    a.energy_j = a.power_w * a.airtime_s;
    ledger.book(time_s, id_, EnergyCategory::transmit, a.energy_j);
    return a;
}

NetworkTotals network_totals(std::span<const PacketRecord> records, double duration_s,
                             const OverheadSchedule& overhead) {
    if (!(duration_s > 0.0)) throw std::invalid_argument("network_totals: duration must be > 0");
    if (overhead.duration_s != duration_s) {
        throw std::invalid_argument("network_totals: overhead schedule covers a different duration");
    }
    NetworkTotals t;
    t.e_oh_j = static_cast<double>(overhead.periods) * overhead.energy_per_period_j;

    std::set<NodeId> relay_ids;
    for (const auto& r : records) {
        if (r.time_s < 0.0 || r.time_s > duration_s) {
            throw std::invalid_argument("network_totals: packet record outside the run duration");
        }
        for (const auto& o : r.relays) relay_ids.insert(o.relay);
    }
    for (NodeId id : relay_ids) {
        t.e_relay_j[id] = 0.0;
        t.e_adaptive_single_j[id] = 0.0;
    }
    for (const auto& r : records) {
        t.e_direct_j += r.e_direct_j;
        t.e_adaptive_j += r.e_chosen_j;
        if (r.chosen == LinkKind::cooperative) t.e_com_j += r.e_com_j;
        for (NodeId id : relay_ids) {
            const auto it = std::find_if(r.relays.begin(), r.relays.end(),
                                         [id](const RelayOption& o) { return o.relay == id; });
            if (it == r.relays.end()) {
                t.e_relay_j[id] += r.e_direct_j;
                t.e_adaptive_single_j[id] += r.e_direct_j;
                continue;
            }
            t.e_relay_j[id] += it->energy_j;
            t.e_adaptive_single_j[id] += it->feasible ? std::min(r.e_direct_j, it->energy_j) : r.e_direct_j;
        }
    }
    t.e_adaptive_j += t.e_oh_j;
    for (auto& [id, e] : t.e_relay_j) e += t.e_oh_j;
    for (auto& [id, e] : t.e_adaptive_single_j) e += t.e_oh_j;
    t.packets = records.size();
    return t;
}

std::size_t period_count(double duration_s, double period_s) {
    if (!(period_s > 0.0) || !(duration_s >= 0.0)) throw std::invalid_argument("period_count: bad inputs");
    return static_cast<std::size_t>(std::floor(duration_s / period_s * (1.0 + 1e-12)));
}

}  // namespace lapcoop
