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
#include <string>

#include "doctest.h"
#include "lapcoop/errors.hpp"
#include "lapcoop/fixtures.hpp"
#include "lapcoop/scenario_io.hpp"
#include "small_scenario.hpp"

using namespace lapcoop;

namespace {

bool mentions(const std::vector<std::string>& v, const std::string& needle) {
    return std::any_of(v.begin(), v.end(), [&](const std::string& s) { return s.find(needle) != std::string::npos; });
}

}  // namespace

TEST_SUITE("scenario_io") {
    TEST_CASE("every fixture round-trips losslessly") {
        for (const auto& info : fixture_list()) {
            CAPTURE(info.name);
            const auto s = fixture(info.name);
            REQUIRE(s.has_value());
            const std::string text = emit_scenario(*s);
            const Scenario back = parse_scenario(text);
            CHECK(emit_scenario(back) == text);
            CHECK(scenario_digest(back) == scenario_digest(*s));
            CHECK(scenario_digest(*s).size() == 16);
            CHECK(validate(*s, s->seed).empty());
        }
        CHECK_FALSE(fixture("no_such_fixture").has_value());
    }

    TEST_CASE("fixture sizes") {
        CHECK(materialize(*fixture("table2_1s3r"), 1).nodes.size() == 5);
        CHECK(materialize(*fixture("table3_2s3r"), 1).nodes.size() == 6);
        const Topology t = materialize(*fixture("table3_10s6r"), 1);
        CHECK(t.nodes.size() == 17);
        CHECK(t.sources().size() == 10);
        CHECK(t.relays().size() == 6);
        CHECK(t.links.size() == 16 + 60);
    }

    TEST_CASE("digest changes with content") {
        Scenario a = testing_support::small();
        Scenario b = a;
        b.reporting_period_s = 0.1;
        CHECK(scenario_digest(a) != scenario_digest(b));
    }

    TEST_CASE("random layouts are reproducible per seed") {
        const Scenario s = *fixture("table3_10s6r");
        const Topology a = materialize(s, 5);
        const Topology b = materialize(s, 5);
        const Topology c = materialize(s, 6);
        bool differs = false;
        for (std::size_t i = 0; i < a.links.size(); ++i) {
            CHECK(a.links[i].spec.distance_m == b.links[i].spec.distance_m);
            differs = differs || a.links[i].spec.distance_m != c.links[i].spec.distance_m;
        }
        CHECK(differs);
    }

    TEST_CASE("missing direct link names the source") {
        Scenario s = testing_support::small();
        s.links.erase(s.links.begin());
        const auto v = validate(s, 1);
        CHECK(mentions(v, "source S1 has no direct link to LAP"));
        CHECK_THROWS_AS(materialize(s, 1), ValidationError);
    }

    TEST_CASE("validation messages") {
        Scenario s = testing_support::small();
        s.links.push_back(testing_support::link("S1", "R1", 10.0, 2.0));
        s.links.push_back(testing_support::link("S1", "X", 10.0, 2.0));
        s.links.push_back(testing_support::link("R1", "R1", 10.0, 2.0));
        s.links[1].rice_factor_db = 3.0;
        s.duration_s = -1.0;
        s.mode = ExplicitTarget{0.7};
        const auto v = validate(s, 1);
        CHECK(mentions(v, "duplicate link"));
        CHECK(mentions(v, "unknown endpoint"));
        CHECK(mentions(v, "self link"));
        CHECK(mentions(v, "Rice factor"));
        CHECK(mentions(v, "duration_s"));
        CHECK(mentions(v, "mode.xi"));
    }

    TEST_CASE("geographic positions give great-circle-consistent distances") {
        Scenario s = testing_support::small();
        s.lap_position = CartesianPosition{0.0, 0.0, 2000.0};
        s.geo_origin = GeoPosition{45.0, 7.0, 0.0};
        s.nodes[0].geo = GeoPosition{45.0, 7.0, 0.0};
        s.nodes[1].geo = GeoPosition{45.0045, 7.0, 0.0};
        s.links[1].distance_m.reset();
        const Topology t = materialize(s, 1);
        const double d = t.links[static_cast<std::size_t>(t.find_link(0, 1))].spec.distance_m;
        const double ref = great_circle_distance(GeoPosition{45.0, 7.0, 0.0}, GeoPosition{45.0045, 7.0, 0.0}) * 1000.0;
        CHECK(d == doctest::Approx(ref).epsilon(1e-3));
    }

    TEST_CASE("parse errors carry a location") {
        const std::string bad = "{\n  \"schema_version\": 1,\n  \"name\": \"x\",,\n}";
        try {
            parse_scenario(bad);
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.line() == 3);
            CHECK(std::string(e.what()).find("line 3") != std::string::npos);
        }
    }

    TEST_CASE("unknown keys are rejected by path") {
        Scenario s = testing_support::small();
        std::string text = emit_scenario(s);
        const auto at = text.find("\"duration_s\"");
        REQUIRE(at != std::string::npos);
        text.insert(at, "\"duraton_s\": 3, ");
        try {
            parse_scenario(text);
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(std::string(e.what()).find("duraton_s") != std::string::npos);
        }
    }

    TEST_CASE("decibel fields are accepted on input") {
        Scenario s = testing_support::small();
        std::string text = emit_scenario(s);
        Scenario a = parse_scenario(text);
        const auto at = text.find("\"tx_gain\"");
        REQUIRE(at != std::string::npos);
        const auto end = text.find_first_of(",\n}", at);
        text.replace(at, end - at, "\"tx_gain_db\": 3.0");
        Scenario b = parse_scenario(text);
        CHECK(b.radio.tx_gain == doctest::Approx(a.radio.tx_gain).epsilon(1e-12));
    }

    TEST_CASE("missing file") {
        CHECK_THROWS_AS(load_scenario("/nonexistent/scenario.json"), ParseError);
    }
}
