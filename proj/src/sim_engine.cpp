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

#include "lapcoop/sim_engine.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>

#include "lapcoop/errors.hpp"
#include "lapcoop/link_metrics.hpp"
#include "lapcoop/power_control.hpp"
#include "lapcoop/rng.hpp"

namespace lapcoop {

bool event_before(const Event& a, const Event& b) noexcept {
    if (a.time_s != b.time_s) return a.time_s < b.time_s;
    if (a.kind != b.kind) return a.kind < b.kind;
    return a.seq < b.seq;
}

void RelayQueue::push(std::uint64_t packet, QueueClass cls, double now_s) {
    (cls == QueueClass::local ? high_ : low_).push_back(Entry{packet, cls, now_s});
}

std::optional<RelayQueue::Started> RelayQueue::start_next(double now_s) {
    if (busy_) return std::nullopt;
    std::deque<Entry>* q = !high_.empty() ? &high_ : (!low_.empty() ? &low_ : nullptr);
    if (q == nullptr) return std::nullopt;
    Started s{q->front(), now_s - q->front().enqueued_s};
    q->pop_front();
    busy_ = true;
    return s;
}

namespace {

constexpr std::uint64_t kNoRecord = ~std::uint64_t{0};

struct Packet {
    std::uint64_t id = 0;
    NodeId source = 0;
    double size_bits = 0.0;
    double created_s = 0.0;
    std::uint64_t record = kNoRecord;
    // cooperative leg, filled at decision time
    std::optional<NodeId> relay;
    double p_relay_w = 0.0;
    double relay_lap_bps = 0.0;
    double source_relay_bps = 0.0;
    double airtime_s = 0.0;  // of the leg currently in service
    bool dropped = false;
};

struct Later {
    bool operator()(const Event& a, const Event& b) const noexcept { return event_before(b, a); }
};

class Engine {
public:
    Engine(const Scenario& s, std::uint64_t seed) : s_(s), seeds_(seed) {
        sink_.topology = materialize(s, seed);
        const Topology& t = sink_.topology;
        terrestrial_ = t.terrestrial();
        fading_.resize(t.links.size());
        known_.assign(t.links.size(), std::nullopt);
        for (std::size_t i = 0; i < t.links.size(); ++i) {
            const auto& l = t.links[i];
            fading_rng_.push_back(seeds_.stream("fading/" + t.name(l.from) + "->" + t.name(l.to)));
            mean_loss_.push_back(mean_pathloss(l.spec));
        }
        queues_.resize(t.nodes.size());
        for (const auto& n : t.nodes) {
            agents_.emplace_back(n.id);
            traffic_rng_.push_back(seeds_.stream("traffic/" + n.name));
            service_rng_.push_back(seeds_.stream("service/" + n.name));
            sent_.push_back(0);
        }
    }

    MetricsSink run() {
        const double T = s_.duration_s;
        const std::size_t refreshes = std::max<std::size_t>(1, period_count(T, s_.coherence_time_s));
        for (std::size_t k = 0; k < refreshes; ++k) {
            push(static_cast<double>(k) * s_.coherence_time_s, EventKind::channel_refresh, 0, k);
        }
        const std::size_t reports = period_count(T, s_.reporting_period_s);
        for (std::size_t k = 0; k < reports; ++k) {
            push(static_cast<double>(k) * s_.reporting_period_s, EventKind::report_broadcast, 0, k);
        }
        const auto per_period = overhead_energy_per_period(static_cast<int>(terrestrial_.size()), s_.prices);
        sink_.overhead = OverheadSchedule{T, reports, per_period.total_j()};

        for (const auto& n : sink_.topology.nodes) {
            if (n.traffic && !n.lap) schedule_first_arrival(n.id);
        }

        while (!events_.empty()) {
            const Event e = events_.top();
            events_.pop();
            now_ = e.time_s;
            switch (e.kind) {
                case EventKind::channel_refresh: refresh(); break;
                case EventKind::report_broadcast: report(); break;
                case EventKind::packet_arrival: arrival(e.node); break;
                case EventKind::service_complete: complete(e.node, e.payload); break;
            }
        }
        sink_.end_time_s = now_;
        sink_.totals = network_totals(sink_.packets, T, sink_.overhead);
        for (const auto& a : agents_) sink_.counters.relay_drops += a.dropped();
        return std::move(sink_);
    }

private:
    void push(double t, EventKind kind, NodeId node, std::uint64_t payload) {
        events_.push(Event{t, kind, seq_++, node, payload});
    }

    double true_gain(std::size_t link) const { return fading_[link] / mean_loss_[link]; }

    void refresh() {
        for (std::size_t i = 0; i < fading_.size(); ++i) {
            fading_[i] = sample_fading_power(sink_.topology.links[i].spec, fading_rng_[i]);
        }
        ++sink_.counters.refreshes;
    }

    // The far end's report, heard by the near end over a reciprocal channel.
    void learn(std::size_t i) {
        const Topology& t = sink_.topology;
        const auto& l = t.links[i];
        const double p_report =
            l.to == t.lap ? s_.prices.tx_power_report_lap_w : s_.prices.tx_power_report_terrestrial_w;
        const double eirp = p_report * l.spec.tx_gain;
        const double measured = eirp * l.spec.rx_gain * true_gain(i);
        known_[i] = estimate_total_gain_from_report(eirp, l.spec.rx_gain, measured);
        if (l.to != t.lap && t.nodes[static_cast<std::size_t>(l.to)].relay) {
            agents_[static_cast<std::size_t>(l.to)].learn_source(l.from);
        }
    }

    double known(std::size_t link) {
        // no report yet when the reporting period exceeds the run
        if (!known_[link]) learn(link);
        return *known_[link];
    }

    void report() {
        const Topology& t = sink_.topology;
        for (std::size_t i = 0; i < t.links.size(); ++i) learn(i);
        book_reporting_period(sink_.ledger, now_, terrestrial_, t.lap, s_.prices);
        ++sink_.counters.reports;
    }

    void schedule_first_arrival(NodeId id) {
        const auto& traffic = *sink_.topology.nodes[static_cast<std::size_t>(id)].traffic;
        double t = 0.0;
        if (const auto* c = std::get_if<ConstantTraffic>(&traffic)) {
            if (c->count == 0) return;
            t = c->start_s;
        } else {
            const auto& e = std::get<ExponentialTraffic>(traffic);
            t = e.start_s + traffic_rng_[static_cast<std::size_t>(id)].exponential(e.mean_s);
        }
        if (t < s_.duration_s) push(t, EventKind::packet_arrival, id, 0);
    }

    void schedule_next_arrival(NodeId id) {
        const auto idx = static_cast<std::size_t>(id);
        const auto& traffic = *sink_.topology.nodes[idx].traffic;
        double t = 0.0;
        if (const auto* c = std::get_if<ConstantTraffic>(&traffic)) {
            if (sent_[idx] >= c->count) return;
            t = c->start_s + static_cast<double>(sent_[idx]) * c->interval_s;
        } else {
            t = now_ + traffic_rng_[idx].exponential(std::get<ExponentialTraffic>(traffic).mean_s);
        }
        if (t < s_.duration_s) push(t, EventKind::packet_arrival, id, 0);
    }

    double packet_bits(NodeId id) const {
        return std::visit([](const auto& m) { return m.size_bits; },
                          *sink_.topology.nodes[static_cast<std::size_t>(id)].traffic);
    }

    double service_time(NodeId id) {
        if (s_.queue.distribution == ServiceDistribution::exponential) {
            return service_rng_[static_cast<std::size_t>(id)].exponential(s_.queue.service_time_s);
        }
        return s_.queue.service_time_s;
    }

    void arrival(NodeId id) {
        const auto idx = static_cast<std::size_t>(id);
        Packet p;
        p.id = packets_.size();
        p.source = id;
        p.size_bits = packet_bits(id);
        p.created_s = now_;
        packets_.push_back(p);
        ++sent_[idx];
        ++sink_.counters.generated;
        queues_[idx].push(p.id, QueueClass::local, now_);
        track_occupancy(idx);
        schedule_next_arrival(id);
        serve(id);
    }

    void track_occupancy(std::size_t idx) {
        sink_.counters.max_occupancy = std::max(sink_.counters.max_occupancy, queues_[idx].occupancy());
    }

    void serve(NodeId id) {
        auto& q = queues_[static_cast<std::size_t>(id)];
        const auto started = q.start_next(now_);
        if (!started) return;
        Packet& p = packets_[started->entry.packet];
        sink_.queueing.push_back(
            QueueSample{p.id, id, started->entry.cls, started->entry.enqueued_s, started->wait_s});
        if (started->entry.cls == QueueClass::local) {
            decide_and_transmit(p);
        } else {
            forward(id, p);
        }
        push(now_ + service_time(id), EventKind::service_complete, id, p.id);
    }

    HopContext hop(std::size_t link) {
        return HopContext::from_link(sink_.topology.links[link].spec, known(link));
    }

    /// Source-side selection for one packet, then its first transmission.
    void decide_and_transmit(Packet& p) {
        const Topology& t = sink_.topology;
        const auto direct_link = static_cast<std::size_t>(t.find_link(p.source, t.lap));
        const LinkSpec& dspec = t.links[direct_link].spec;
        const HopContext direct = hop(direct_link);
        const SolverConfig& cfg = s_.solver;

        PacketRecord rec;
        rec.packet_id = p.id;
        rec.source = p.source;
        rec.time_s = p.created_s;
        DecisionGains gains;
        gains.decision_time_s = now_;
        gains.direct_used = known(direct_link);
        gains.direct_true = true_gain(direct_link);

        if (const auto* f = std::get_if<FixedDirectPower>(&s_.mode)) {
            rec.xi = direct_ber_at_fixed_power(f->p_w, direct);
            rec.direct = PowerAllocation{f->p_w, std::nullopt, rec.xi, true};
        } else {
            rec.xi = std::get<ExplicitTarget>(s_.mode).xi;
            try {
                rec.direct = solve_direct_power(direct, rec.xi, cfg);
            } catch (const SolverFailure& e) {
                ++sink_.counters.solver_failures;
                rec.direct = PowerAllocation{cfg.p_max_w, std::nullopt, direct.ber(cfg.p_max_w), false};
            }
        }
        rec.e_direct_j = packet_energy_direct(rec.direct.p_source_w, p.size_bits, dspec.bitrate_bps, s_.prices);

        struct Cand {
            NodeId relay;
            std::size_t sr;
            std::size_t rl;
        };
        std::vector<Cand> cands;
        // local traffic of a relay-only node goes direct
        const bool selects = t.nodes[static_cast<std::size_t>(p.source)].source;
        for (const auto& n : t.nodes) {
            if (!selects || !n.relay || n.id == p.source) continue;
            const int sr = t.find_link(p.source, n.id);
            const int rl = t.find_link(n.id, t.lap);
            if (sr < 0 || rl < 0) continue;
            cands.push_back(Cand{n.id, static_cast<std::size_t>(sr), static_cast<std::size_t>(rl)});
        }
        rec.e_com_j = computation_energy(static_cast<int>(cands.size()), s_.prices);
        const bool target_ok = rec.xi > 0.0 && rec.xi < 0.5;

        std::vector<RelayCandidate> feasible;
        for (const auto& c : cands) {
            const HopContext sr = hop(c.sr);
            const HopContext rl = hop(c.rl);
            gains.relay_used[c.relay] = {known(c.sr), known(c.rl)};
            const HopBitrates rates{t.links[c.sr].spec.bitrate_bps, t.links[c.rl].spec.bitrate_bps};
            RelayOption opt;
            opt.relay = c.relay;
            opt.allocation = PowerAllocation{cfg.p_max_w, cfg.p_max_w, 0.5, false};
            if (target_ok) {
                try {
                    opt.allocation = optimize_relay_allocation(rec.xi, sr, rl, cfg);
                } catch (const SolverFailure&) {
                    ++sink_.counters.solver_failures;
                }
            }
            opt.feasible = opt.allocation.feasible;
            PowerAllocation priced = opt.allocation;
            if (!opt.feasible) priced = PowerAllocation{cfg.p_max_w, cfg.p_max_w, priced.achieved_ber, true};
            opt.energy_j = packet_energy_relay(priced, p.size_bits, rates, s_.prices, rec.e_com_j);
            opt.beta = compute_beta(opt.energy_j, rec.e_direct_j);
            sink_.betas.push_back(BetaSample{p.id, p.source, c.relay, now_, opt.beta, opt.feasible});
            if (opt.feasible) feasible.push_back(RelayCandidate{c.relay, opt.allocation, opt.energy_j});
            rec.relays.push_back(opt);
        }

        const LinkChoice choice = select_link(p.source, rec.direct, rec.e_direct_j, feasible);
        rec.chosen = choice.kind;
        rec.chosen_relay = choice.relay_id;
        rec.e_chosen_j = choice.energy_j;
        if (choice.degraded) ++sink_.counters.degraded;
        sink_.adaptive.push_back(AdaptiveSample{p.id, p.source, now_, rec.e_chosen_j / rec.e_direct_j,
                                                choice.kind, choice.relay_id});

        const auto src = p.source;
        if (choice.kind == LinkKind::direct) {
            ++sink_.direct_selections;
            p.airtime_s = p.size_bits / dspec.bitrate_bps;
            sink_.ledger.book(now_, src, EnergyCategory::transmit, rec.direct.p_source_w * p.airtime_s);
            sink_.ledger.book(now_, t.lap, EnergyCategory::receive, s_.prices.rx_power_lap_w * p.airtime_s);
        } else {
            const NodeId r = *choice.relay_id;
            ++sink_.relay_selections[r];
            const auto c = std::find_if(cands.begin(), cands.end(), [r](const Cand& x) { return x.relay == r; });
            p.relay = r;
            p.p_relay_w = *choice.allocation.p_relay_w;
            p.source_relay_bps = t.links[c->sr].spec.bitrate_bps;
            p.relay_lap_bps = t.links[c->rl].spec.bitrate_bps;
            p.airtime_s = p.size_bits / p.source_relay_bps;
            sink_.ledger.book(now_, src, EnergyCategory::compute, rec.e_com_j);
            sink_.ledger.book(now_, src, EnergyCategory::transmit, choice.allocation.p_source_w * p.airtime_s);
        }
        p.record = sink_.packets.size();
        sink_.packets.push_back(std::move(rec));
        sink_.gains.push_back(std::move(gains));
    }

    void forward(NodeId relay, Packet& p) {
        RelayedPacket rp{p.id, p.source, p.p_relay_w, p.size_bits, p.relay_lap_bps};
        const auto action = agents_[static_cast<std::size_t>(relay)].forward(rp, sink_.ledger, now_);
        p.airtime_s = p.size_bits / p.relay_lap_bps;
        if (action) {
            sink_.ledger.book(now_, sink_.topology.lap, EnergyCategory::receive,
                              s_.prices.rx_power_lap_w * action->airtime_s);
        } else {
            p.dropped = true;
        }
    }

    void complete(NodeId node, std::uint64_t packet) {
        auto& q = queues_[static_cast<std::size_t>(node)];
        q.finish();
        Packet& p = packets_[packet];
        if (node == p.source && p.relay) {
            const NodeId r = *p.relay;
            const double t_sr = p.size_bits / p.source_relay_bps;
            sink_.ledger.book(now_, r, EnergyCategory::receive, s_.prices.rx_power_terrestrial_w * t_sr);
            queues_[static_cast<std::size_t>(r)].push(p.id, QueueClass::relay, now_);
            track_occupancy(static_cast<std::size_t>(r));
            serve(r);
        } else if (!p.dropped) {
            ++sink_.counters.delivered;
        }
        serve(node);
    }

    const Scenario& s_;
    SeedSequence seeds_;
    MetricsSink sink_;
    std::vector<NodeId> terrestrial_;
    std::vector<double> fading_;
    std::vector<double> mean_loss_;
    std::vector<RngStream> fading_rng_;
    std::vector<std::optional<double>> known_;
    std::vector<RelayQueue> queues_;
    std::vector<RelayAgent> agents_;
    std::vector<RngStream> traffic_rng_;
    std::vector<RngStream> service_rng_;
    std::vector<std::size_t> sent_;
    std::vector<Packet> packets_;
    std::priority_queue<Event, std::vector<Event>, Later> events_;
    std::uint64_t seq_ = 0;
    double now_ = 0.0;
};

}  // namespace

MetricsSink run(const Scenario& scenario, std::uint64_t seed) {
    Engine engine(scenario, seed);
    return engine.run();
}

}  // namespace lapcoop
