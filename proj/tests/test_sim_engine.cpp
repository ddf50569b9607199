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

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "doctest.h"
#include "lapcoop/fixtures.hpp"
#include "lapcoop/results.hpp"
#include "lapcoop/sim_engine.hpp"
#include "small_scenario.hpp"

using namespace lapcoop;

TEST_SUITE("sim_engine") {
    TEST_CASE("event ordering") {
        const Event a{1.0, EventKind::service_complete, 0, 0, 0};
        const Event b{1.0, EventKind::channel_refresh, 5, 0, 0};
        const Event c{1.0, EventKind::report_broadcast, 1, 0, 0};
        const Event d{0.5, EventKind::service_complete, 9, 0, 0};
        std::vector<Event> v{a, b, c, d};
        std::sort(v.begin(), v.end(), event_before);
        CHECK(v[0].seq == 9);
        CHECK(v[1].kind == EventKind::channel_refresh);
        CHECK(v[2].kind == EventKind::report_broadcast);
        CHECK(v[3].kind == EventKind::service_complete);
        const Event e{1.0, EventKind::packet_arrival, 3, 0, 0};
        const Event f{1.0, EventKind::packet_arrival, 4, 0, 0};
        CHECK(event_before(e, f));
        CHECK_FALSE(event_before(f, e));
    }

    TEST_CASE("two-class queue discipline") {
        RelayQueue q;
        CHECK_FALSE(q.start_next(0.0).has_value());
        q.push(1, QueueClass::relay, 0.0);
        auto s = q.start_next(0.0);
        REQUIRE(s.has_value());
        CHECK(s->wait_s == 0.0);
        CHECK(q.busy());
        q.push(2, QueueClass::relay, 0.001);
        q.push(3, QueueClass::local, 0.002);
        q.push(4, QueueClass::local, 0.003);
        CHECK(q.occupancy() == 4);
        CHECK_FALSE(q.start_next(0.004).has_value());
        q.finish();
        s = q.start_next(0.005);
        CHECK(s->entry.packet == 3);
        CHECK(s->wait_s == doctest::Approx(0.003));
        q.finish();
        CHECK(q.start_next(0.010)->entry.packet == 4);
        q.finish();
        s = q.start_next(0.015);
        CHECK(s->entry.packet == 2);
        CHECK(s->entry.cls == QueueClass::relay);
        CHECK(s->wait_s == doctest::Approx(0.014));
        q.finish();
        CHECK(q.waiting() == 0);
    }

    TEST_CASE("identical inputs give identical outputs") {
        const Scenario s = testing_support::small(20.0, 10.0);
        const MetricsSink a = run(s, 3);
        const MetricsSink b = run(s, 3);
        CHECK(packets_csv(a) == packets_csv(b));
        CHECK(beta_samples_csv(a) == beta_samples_csv(b));
        CHECK(ledger_csv(a) == ledger_csv(b));
        CHECK(summary_csv(s, 3, a) == summary_csv(s, 3, b));
        const MetricsSink c = run(s, 4);
        CHECK(beta_samples_csv(a) != beta_samples_csv(c));
    }

    TEST_CASE("refresh and report counts") {
        const Scenario s = testing_support::small(10.0, 5.0);
        const MetricsSink m = run(s, 1);
        CHECK(m.counters.refreshes == 10);
        CHECK(m.counters.reports == 50);
        CHECK(m.counters.generated == 50);
        CHECK(m.counters.delivered == 50);
        CHECK(m.packets.size() == 50);
        CHECK(m.overhead.periods == 50);
        CHECK(m.totals.e_oh_j == doctest::Approx(50 * overhead_energy_per_period(3, s.prices).total_j()));
    }

    TEST_CASE("a network without sources still pays for reporting") {
        Scenario s = testing_support::small(5.0, 5.0);
        s.nodes[0].traffic.reset();
        const MetricsSink m = run(s, 1);
        CHECK(m.packets.empty());
        CHECK(m.totals.e_oh_j > 0.0);
        CHECK(m.totals.e_adaptive_j == doctest::Approx(m.totals.e_oh_j));
        CHECK(m.ledger.total_j() == doctest::Approx(m.totals.e_oh_j).epsilon(1e-12));
    }

    TEST_CASE("aligned reports give fresh gains") {
        const Scenario s = testing_support::small(20.0, 7.0);
        const MetricsSink m = run(s, 2);
        REQUIRE(m.gains.size() == m.packets.size());
        for (const auto& g : m.gains) {
            CHECK(std::abs(g.direct_used / g.direct_true - 1.0) < 1e-12);
        }
    }

    TEST_CASE("misaligned reports can be stale") {
        Scenario s = testing_support::small(20.0, 7.0);
        s.reporting_period_s = 0.3;
        const MetricsSink m = run(s, 2);
        std::size_t stale = 0;
        for (const auto& g : m.gains) {
            if (std::abs(g.direct_used / g.direct_true - 1.0) > 1e-9) ++stale;
        }
        CHECK(stale > 0);
        CHECK(stale < m.gains.size());
    }

    TEST_CASE("queues are causal and work conserving") {
        Scenario s = *fixture("table4_10s6r_delay");
        s.duration_s = 5.0;
        const MetricsSink m = run(s, 1);
        REQUIRE_FALSE(m.queueing.empty());
        std::map<NodeId, std::vector<std::pair<double, double>>> starts;  // (start, wait)
        for (const auto& q : m.queueing) {
            CHECK(q.wait_s >= 0.0);
            starts[q.node].emplace_back(q.arrival_s + q.wait_s, q.wait_s);
        }
        const double svc = s.queue.service_time_s;
        for (auto& [node, v] : starts) {
            for (std::size_t i = 1; i < v.size(); ++i) {
                CHECK(v[i].first >= v[i - 1].first + svc - 1e-9);
                if (v[i].second > 0.0) CHECK(v[i].first == doctest::Approx(v[i - 1].first + svc).epsilon(1e-9));
            }
        }
        CHECK(m.counters.delivered == m.counters.generated);
        CHECK(m.end_time_s >= s.duration_s - 1.0);
    }

    TEST_CASE("ledger re-sums to the adaptive total") {
        for (const char* name : {"table2_1s3r", "table3_2s3r"}) {
            Scenario s = *fixture(name);
            s.duration_s = 50.0;
            for (auto& n : s.nodes) {
                if (auto* c = n.traffic ? std::get_if<ConstantTraffic>(&*n.traffic) : nullptr) c->count = 50;
            }
            const MetricsSink m = run(s, 7);
            CHECK(m.ledger.total_j() == doctest::Approx(m.totals.e_adaptive_j).epsilon(1e-9));
            std::size_t coop = 0;
            for (const auto& [r, n] : m.relay_selections) coop += n;
            CHECK(coop + m.direct_selections == m.packets.size());
        }
    }

    TEST_CASE("chosen option is the cheapest feasible one") {
        const MetricsSink m = run(testing_support::small(20.0, 10.0), 9);
        for (const auto& r : m.packets) {
            double best = r.e_direct_j;
            for (const auto& o : r.relays) {
                if (o.feasible && o.energy_j < best) best = o.energy_j;
            }
            CHECK(r.e_chosen_j == best);
        }
    }

    TEST_CASE("explicit target mode") {
        Scenario s = testing_support::small(10.0, 5.0);
        s.mode = ExplicitTarget{1e-3};
        const MetricsSink m = run(s, 1);
        for (const auto& r : m.packets) {
            CHECK(r.xi == 1e-3);
            if (r.direct.feasible) CHECK(r.direct.achieved_ber == doctest::Approx(1e-3).epsilon(1e-6));
        }
        CHECK(m.ledger.total_j() == doctest::Approx(m.totals.e_adaptive_j).epsilon(1e-9));
    }
}
