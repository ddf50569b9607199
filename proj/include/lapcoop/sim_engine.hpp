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

#ifndef LAPCOOP_SIM_ENGINE_HPP
#define LAPCOOP_SIM_ENGINE_HPP

#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <vector>

#include "lapcoop/scenario.hpp"
#include "lapcoop/selection_energy.hpp"

namespace lapcoop {

enum class EventKind : std::uint8_t { channel_refresh = 0, report_broadcast = 1, packet_arrival = 2, service_complete = 3 };

struct Event {
    double time_s = 0.0;
    EventKind kind = EventKind::packet_arrival;
    std::uint64_t seq = 0;
    NodeId node = 0;
    std::uint64_t payload = 0;
};

/// Strict ordering on (time, kind, seq).
bool event_before(const Event& a, const Event& b) noexcept;

enum class QueueClass : std::uint8_t { local = 0, relay = 1 };

/// Two-class non-preemptive priority server. Local traffic is served first;
/// FIFO within a class.
class RelayQueue {
public:
    struct Entry {
        std::uint64_t packet = 0;
        QueueClass cls = QueueClass::local;
        double enqueued_s = 0.0;
    };
    struct Started {
        Entry entry;
        double wait_s = 0.0;
    };

    void push(std::uint64_t packet, QueueClass cls, double now_s);
    bool busy() const noexcept { return busy_; }
    std::size_t waiting() const noexcept { return high_.size() + low_.size(); }
    /// Occupancy including the packet in service.
    std::size_t occupancy() const noexcept { return waiting() + (busy_ ? 1 : 0); }
    /// Takes the next packet into service, if the server is idle and any waits.
    std::optional<Started> start_next(double now_s);
    void finish() noexcept { busy_ = false; }

private:
    std::deque<Entry> high_;
    std::deque<Entry> low_;
    bool busy_ = false;
};

struct BetaSample {
    std::uint64_t packet_id = 0;
    NodeId source = 0;
    NodeId relay = 0;
    double time_s = 0.0;
    double beta = 1.0;
    bool feasible = false;
};

struct AdaptiveSample {
    std::uint64_t packet_id = 0;
    NodeId source = 0;
    double time_s = 0.0;
    double beta_hat = 1.0;
    LinkKind chosen = LinkKind::direct;
    std::optional<NodeId> relay;
};

struct QueueSample {
    std::uint64_t packet_id = 0;
    NodeId node = 0;
    QueueClass cls = QueueClass::local;
    double arrival_s = 0.0;
    double wait_s = 0.0;
};

/// Gains seen by one decision, for the staleness and optimality audits.
struct DecisionGains {
    double decision_time_s = 0.0;
    double direct_used = 0.0;
    double direct_true = 0.0;
    std::map<NodeId, std::pair<double, double>> relay_used;  // (S->R, R->LAP)
};

struct RunCounters {
    std::size_t reports = 0;
    std::size_t refreshes = 0;  // per link
    std::size_t generated = 0;
    std::size_t delivered = 0;
    std::size_t relay_drops = 0;
    std::size_t solver_failures = 0;
    std::size_t degraded = 0;
    std::size_t max_occupancy = 0;
};

struct MetricsSink {
    Topology topology;
    std::vector<BetaSample> betas;
    std::vector<AdaptiveSample> adaptive;
    std::vector<QueueSample> queueing;
    std::vector<PacketRecord> packets;
    std::vector<DecisionGains> gains;  // parallel to packets
    std::size_t direct_selections = 0;
    std::map<NodeId, std::size_t> relay_selections;
    EnergyLedger ledger;
    OverheadSchedule overhead;
    NetworkTotals totals;
    RunCounters counters;
    double end_time_s = 0.0;
};

/// Runs one scenario to completion: traffic up to the duration, then queues
/// drain. Throws ValidationError on a malformed scenario.
MetricsSink run(const Scenario& scenario, std::uint64_t seed);

inline MetricsSink run(const Scenario& scenario) { return run(scenario, scenario.seed); }

}  // namespace lapcoop

#endif  // LAPCOOP_SIM_ENGINE_HPP
