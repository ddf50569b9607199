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
#include <limits>
#include <vector>

#include "doctest.h"
#include "lapcoop/channel.hpp"
#include "lapcoop/errors.hpp"
#include "lapcoop/rng.hpp"
#include "oracles.hpp"

using namespace lapcoop;

namespace {

LinkSpec table_uplink() {
    LinkSpec s;
    s.distance_m = 4030.14;
    s.pathloss_exponent = 2.1;
    s.rice_factor_db = 5.0;
    s.tx_gain = db_to_linear(3.0);
    s.rx_gain = db_to_linear(3.0);
    s.noise_power_w = dbm_to_watts(-125.0);
    return s;
}

}  // namespace

TEST_SUITE("channel") {
    TEST_CASE("reference loss at 3.5 GHz and 1 m") {
        CHECK(reference_loss(3.5e9, 1.0) == doctest::Approx(2.1494e4).epsilon(1e-4));
        CHECK(linear_to_db(reference_loss(3.5e9, 1.0)) == doctest::Approx(43.32).epsilon(1e-4));
        CHECK(reference_loss(kSpeedOfLight / (4.0 * oracle::kPi), 1.0) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(reference_loss(3.5e9, 2.0) == doctest::Approx(4.0 * reference_loss(3.5e9, 1.0)));
        CHECK_THROWS_AS(reference_loss(0.0, 1.0), std::invalid_argument);
        CHECK_THROWS_AS(reference_loss(3.5e9, -1.0), std::invalid_argument);
    }

    TEST_CASE("mean pathloss") {
        LinkSpec s = table_uplink();
        CHECK(mean_pathloss(s) == doctest::Approx(8.04e11).epsilon(5e-3));
        CHECK(linear_to_db(mean_pathloss(s)) == doctest::Approx(119.1).epsilon(1e-3));
        s.distance_m = 1.0;
        CHECK(mean_pathloss(s) == doctest::Approx(reference_loss(s.carrier_hz, 1.0)));
        s.distance_m = 10.0;
        s.pathloss_exponent = 2.0;
        CHECK(mean_pathloss(s) == doctest::Approx(100.0 * reference_loss(s.carrier_hz, 1.0)));
        s.distance_m = 0.5;
        CHECK_THROWS_AS(mean_pathloss(s), std::invalid_argument);
    }

    TEST_CASE("mean pathloss is increasing in distance for random specs") {
        RngStream rng(11);
        for (int i = 0; i < 500; ++i) {
            LinkSpec s;
            s.pathloss_exponent = rng.uniform(1.5, 6.0);
            s.carrier_hz = rng.uniform(1e8, 6e9);
            s.distance_m = rng.uniform(1.0, 5000.0);
            const double a = mean_pathloss(s);
            s.distance_m *= 1.0 + rng.uniform(1e-6, 1.0);
            CHECK(mean_pathloss(s) > a);
        }
    }

    TEST_CASE("LinkSpec invariants") {
        LinkSpec s = table_uplink();
        CHECK(s.violations().empty());
        s.pathloss_exponent = 7.0;
        s.bitrate_bps = 0.0;
        CHECK(s.violations().size() == 2);
        CHECK(*table_uplink().rice_factor_linear() == doctest::Approx(std::pow(10.0, 0.5)));
        LinkSpec r;
        CHECK_FALSE(r.rice_factor_linear().has_value());
    }

    TEST_CASE("fading samples have unit mean") {
        for (const std::optional<double> k : {std::optional<double>{}, std::optional<double>{6.0}}) {
            LinkSpec s;
            s.rice_factor_db = k;
            RngStream rng(5);
            const int n = 1000000;
            double sum = 0.0;
            double sum2 = 0.0;
            for (int i = 0; i < n; ++i) {
                const double g = sample_fading_power(s, rng);
                REQUIRE(g >= 0.0);
                sum += g;
                sum2 += g * g;
            }
            const double mean = sum / n;
            const double se = std::sqrt((sum2 / n - mean * mean) / n);
            CHECK(std::abs(mean - 1.0) < 0.005);
            CHECK(std::abs(mean - 1.0) < 3.0 * se);
        }
    }

    TEST_CASE("pure line of sight is deterministic") {
        LinkSpec s;
        s.rice_factor_db = std::numeric_limits<double>::infinity();
        RngStream rng(1);
        CHECK(sample_fading_power(s, rng) == 1.0);
    }

    TEST_CASE("Ricean power matches the noncentral chi-square CDF") {
        LinkSpec s;
        s.rice_factor_db = 6.0;
        const double k = *s.rice_factor_linear();
        RngStream rng(77);
        std::vector<double> x(1000000);
        for (auto& v : x) v = sample_fading_power(s, rng);
        std::sort(x.begin(), x.end());
        double ks = 0.0;
        const double n = static_cast<double>(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double f = oracle::ricean_power_cdf(x[i], k);
            ks = std::max({ks, std::abs(f - i / n), std::abs(f - (i + 1) / n)});
        }
        CHECK(ks < 0.005);
    }

    TEST_CASE("block fading holds within a coherence interval") {
        LinkSpec s;
        RngStream rng(3);
        FadingState st{sample_fading_power(s, rng), 0.0, 1.0};
        const double g = st.power_gain;
        CHECK_FALSE(refresh_fading(st, s, 0.5, rng));
        CHECK(st.power_gain == g);
        CHECK(refresh_fading(st, s, 1.0, rng));
        CHECK(st.last_update_s == 1.0);
    }

    TEST_CASE("fading redraws are uncorrelated across blocks") {
        LinkSpec s;
        s.rice_factor_db = 5.0;
        RngStream rng(9);
        const int n = 100000;
        std::vector<double> g(n);
        for (auto& v : g) v = sample_fading_power(s, rng);
        double mean = 0.0;
        for (double v : g) mean += v;
        mean /= n;
        double num = 0.0;
        double den = 0.0;
        for (int i = 0; i < n; ++i) {
            den += (g[i] - mean) * (g[i] - mean);
            if (i + 1 < n) num += (g[i] - mean) * (g[i + 1] - mean);
        }
        CHECK(std::abs(num / den) < 0.01);
    }

    TEST_CASE("great-circle distance") {
        const GeoPosition a{0.0, 0.0, 0.0};
        CHECK(great_circle_distance(a, a) == 0.0);
        CHECK(great_circle_distance(a, GeoPosition{0.0, 1.0, 0.0}) == doctest::Approx(111.19).epsilon(1e-4));
        CHECK(great_circle_distance(a, GeoPosition{0.0, 180.0, 0.0}) == doctest::Approx(20015.1).epsilon(1e-5));
        RngStream rng(4);
        auto random_point = [&] { return GeoPosition{rng.uniform(-89.0, 89.0), rng.uniform(-179.0, 179.0), 0.0}; };
        for (int i = 0; i < 500; ++i) {
            const auto p = random_point();
            const auto q = random_point();
            const auto r = random_point();
            const double pq = great_circle_distance(p, q);
            CHECK(pq == doctest::Approx(great_circle_distance(q, p)).epsilon(1e-12));
            CHECK(pq == doctest::Approx(oracle::haversine_km(p.latitude_deg, p.longitude_deg, q.latitude_deg,
                                                             q.longitude_deg))
                            .epsilon(1e-6));
            CHECK(pq <= great_circle_distance(p, r) + great_circle_distance(r, q) + 1e-9);
        }
    }

    TEST_CASE("received report power") {
        CHECK(received_report_power(23.0, 0.0, 0.0) == 23.0);
        CHECK(received_report_power(23.0, 119.1, 3.0) == doctest::Approx(-93.1));
        RngStream rng(2);
        for (int i = 0; i < 100; ++i) {
            const double e = rng.uniform(-10, 40);
            const double l = rng.uniform(0, 150);
            const double g = rng.uniform(0, 10);
            CHECK(received_report_power(e, l, g) + l - g == doctest::Approx(e).epsilon(1e-14));
        }
    }

    TEST_CASE("gain estimate from a report") {
        const double eirp = 0.1995 * 2.0;
        const double measured = eirp * 2.0 * 1e-12;
        CHECK(estimate_total_gain_from_report(eirp, 2.0, measured) == doctest::Approx(1e-12).epsilon(1e-12));
        CHECK(estimate_total_gain_from_report(0.1995, 2.0, 1e-13) == doctest::Approx(2.506e-13).epsilon(1e-3));
        CHECK_THROWS_AS(estimate_total_gain_from_report(0.1995, 2.0, 0.1995 * 2.0 * 2.0), InvalidMeasurement);
        CHECK_THROWS_AS(estimate_total_gain_from_report(0.0, 2.0, 1e-13), std::invalid_argument);
    }
}
