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

#include <cmath>

#include "doctest.h"
#include "lapcoop/errors.hpp"
#include "lapcoop/link_metrics.hpp"
#include "lapcoop/power_control.hpp"
#include "lapcoop/rng.hpp"
#include "oracles.hpp"

using namespace lapcoop;

namespace {

HopContext rayleigh(double snr_per_watt) { return HopContext{snr_per_watt, std::nullopt}; }
HopContext rice(double snr_per_watt, double k) { return HopContext{snr_per_watt, k}; }

SolverConfig config(SolverMethod m) {
    SolverConfig c;
    c.method = m;
    return c;
}

}  // namespace

TEST_SUITE("power_control") {
    TEST_CASE("direct power hits the target with both methods") {
        RngStream rng(31);
        for (int i = 0; i < 200; ++i) {
            const double xi = std::pow(10.0, rng.uniform(-5.0, -2.0));
            const bool ricean = i % 2 == 0;
            const double k = rng.uniform(1.0, 10.0);
            // scale so that the solution sits inside (0, p_max)
            const double need = ricean ? 50.0 : 0.25 / xi;
            const HopContext link = ricean ? rice(need * rng.uniform(1.0, 10.0), k)
                                           : rayleigh(need * rng.uniform(1.0, 10.0));
            const auto a = solve_direct_power(link, xi, config(SolverMethod::bracketed));
            const auto b = solve_direct_power(link, xi, config(SolverMethod::gradient));
            if (!a.feasible) {
                CHECK_FALSE(b.feasible);
                continue;
            }
            CHECK(std::abs(a.achieved_ber - xi) / xi < 1e-6);
            CHECK(std::abs(b.achieved_ber - xi) / xi < 1e-6);
            CHECK(std::abs(a.p_source_w - b.p_source_w) < 1e-6);
            CHECK_FALSE(a.p_relay_w.has_value());
        }
    }

    TEST_CASE("direct power at the Rayleigh closed form") {
        // 0.5(1 - sqrt(g/(1+g))) = xi  gives  g = l^2/(1-l^2), l = 1 - 2 xi
        const double xi = 1e-3;
        const double l = 1.0 - 2.0 * xi;
        const double g = l * l / (1.0 - l * l);
        const auto a = solve_direct_power(rayleigh(g / 0.7), xi, SolverConfig{});
        CHECK(a.feasible);
        CHECK(a.p_source_w == doctest::Approx(0.7).epsilon(1e-9));
    }

    TEST_CASE("unreachable target reports infeasible at p_max") {
        const auto a = solve_direct_power(rayleigh(1.0), 1e-4, SolverConfig{});
        CHECK_FALSE(a.feasible);
        CHECK(a.p_source_w == SolverConfig{}.p_max_w);
        CHECK(a.achieved_ber > 1e-4);
        CHECK_THROWS_AS(solve_direct_power(rayleigh(1.0), 0.5, SolverConfig{}), std::invalid_argument);
        CHECK_THROWS_AS(solve_direct_power(rayleigh(1.0), 0.0, SolverConfig{}), std::invalid_argument);
    }

    TEST_CASE("fixed-power BER") {
        const HopContext h = rice(3.0, 2.0);
        CHECK(direct_ber_at_fixed_power(1.5, h) == doctest::Approx(ber_rician_dpsk(4.5, 2.0)));
        CHECK_THROWS_AS(direct_ber_at_fixed_power(0.0, h), std::invalid_argument);
    }

    TEST_CASE("source power meets the first-hop budget") {
        RngStream rng(12);
        for (int i = 0; i < 200; ++i) {
            const double xi = std::pow(10.0, rng.uniform(-5.0, -2.0));
            const double pi2 = xi * rng.uniform(0.0, 0.99);
            const HopContext sr = rayleigh(rng.uniform(1e3, 1e7));
            const double p2 = source_power_for_relay_ber(pi2, xi, sr);
            CHECK(ber_relay_combined(sr.ber(p2), pi2, CombineMode::approx) == doctest::Approx(xi).epsilon(1e-8));
        }
        CHECK_THROWS_AS(source_power_for_relay_ber(2e-3, 1e-3, rayleigh(1e5)), InfeasibleRelayPower);
        CHECK_THROWS_AS(source_power_for_relay_ber(1e-4, 1e-3, rice(1e5, 2.0)), std::invalid_argument);
    }

    TEST_CASE("total power slope matches finite differences") {
        const HopContext sr = rayleigh(5e4);
        const HopContext rd = rice(2e3, 4.0);
        const double xi = 1e-3;
        const auto iv = feasible_relay_interval(xi, sr, rd, SolverConfig{});
        REQUIRE_FALSE(iv.empty);
        for (int i = 1; i < 10; ++i) {
            const double p = iv.lo + (iv.hi - iv.lo) * i / 10.0;
            const double fd = oracle::derivative([&](double x) { return total_power(x, xi, sr, rd); }, p, 1e-7 * p);
            CHECK(total_power_slope(p, xi, sr, rd) == doctest::Approx(fd).epsilon(1e-4));
        }
    }

    TEST_CASE("relay floor and feasible interval") {
        const HopContext sr = rayleigh(5e4);
        const HopContext rd = rice(2e3, 4.0);
        const double xi = 1e-3;
        const auto floor = relay_power_floor(xi, rd, SolverConfig{});
        REQUIRE(floor.has_value());
        CHECK(rd.ber(*floor) == doctest::Approx(xi).epsilon(1e-9));
        const auto iv = feasible_relay_interval(xi, sr, rd, SolverConfig{});
        CHECK(iv.lo > *floor);
        CHECK(iv.hi == SolverConfig{}.p_max_w);
        CHECK(source_power_given_relay_power(iv.lo, xi, sr, rd) <= SolverConfig{}.p_max_w * (1.0 + 1e-9));
        CHECK_FALSE(relay_power_floor(xi, rice(1.0, 1.0), SolverConfig{}).has_value());
        CHECK(feasible_relay_interval(xi, rayleigh(1.0), rd, SolverConfig{}).empty);
    }

    TEST_CASE("relay allocation matches a dense grid") {
        RngStream rng(44);
        int checked = 0;
        for (int i = 0; i < 40; ++i) {
            const double xi = std::pow(10.0, rng.uniform(-4.0, -2.0));
            const HopContext sr = rayleigh(std::pow(10.0, rng.uniform(3.0, 6.0)));
            const HopContext rd = rice(std::pow(10.0, rng.uniform(2.0, 4.0)), rng.uniform(2.0, 10.0));
            const SolverConfig cfg;
            const auto iv = feasible_relay_interval(xi, sr, rd, cfg);
            const auto a = optimize_relay_allocation(xi, sr, rd, cfg);
            const auto b = optimize_relay_allocation(xi, sr, rd, config(SolverMethod::gradient));
            CHECK(a.feasible == !iv.empty);
            if (iv.empty) {
                CHECK(a.p_source_w == cfg.p_max_w);
                continue;
            }
            ++checked;
            auto x = [&](double p) { return total_power(p, xi, sr, rd); };
            const auto [gx, coarse] = oracle::grid_min(x, iv.lo, iv.hi, 10000);
            CHECK(a.total_power_w() <= coarse * (1.0 + 1e-9));
            const double h = (iv.hi - iv.lo) / 9999.0;
            const double gmin =
                oracle::grid_min(x, std::max(iv.lo, gx - h), std::min(iv.hi, gx + h), 10000).second;
            CHECK(std::abs(a.total_power_w() - gmin) <= std::max(1e-6, 1e-3 * gmin));
            CHECK(std::abs(b.total_power_w() - a.total_power_w()) <= std::max(1e-6, 1e-3 * gmin));
            CHECK(a.achieved_ber == doctest::Approx(xi).epsilon(1e-6));
            CHECK(a.p_source_w <= cfg.p_max_w * (1.0 + 1e-9));
            CHECK(*a.p_relay_w <= cfg.p_max_w);
        }
        CHECK(checked > 10);
    }

    TEST_CASE("fixed step sizes are honoured") {
        SolverConfig cfg = config(SolverMethod::gradient);
        cfg.step_size_direct = 1e-300;
        cfg.max_iterations = 5;
        CHECK_THROWS_AS(solve_direct_power(rayleigh(1e4), 1e-3, cfg), SolverFailure);
    }

    TEST_CASE("config invariants") {
        SolverConfig c;
        CHECK(c.violations().empty());
        c.p_max_w = 0.0;
        c.max_iterations = 0;
        CHECK(c.violations().size() == 2);
    }
}
