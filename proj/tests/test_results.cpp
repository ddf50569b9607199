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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "lapcoop/results.hpp"
#include "lapcoop/scenario_io.hpp"
#include "small_scenario.hpp"

using namespace lapcoop;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("lapcoop_test_" + name);
    fs::remove_all(p);
    return p;
}

}  // namespace

TEST_SUITE("results") {
    TEST_CASE("format_double round-trips") {
        for (double v : {0.0, 1.0, 0.1, 1e-300, 3.14159265358979, -2.5e17}) {
            CHECK(std::stod(format_double(v)) == v);
        }
    }

    TEST_CASE("run files are written and byte-identical across runs") {
        const Scenario s = testing_support::small(10.0, 5.0);
        const fs::path a = scratch("run_a");
        const fs::path b = scratch("run_b");
        run_and_emit(s, 4, a);
        run_and_emit(s, 4, b);
        for (const char* f : {"summary.csv", "relay_totals.csv", "beta_samples.csv", "adaptive_samples.csv",
                              "queueing_samples.csv", "packets.csv", "ledger.csv", "metadata.json"}) {
            CAPTURE(f);
            REQUIRE(fs::exists(a / f));
            CHECK(slurp(a / f) == slurp(b / f));
        }
        const std::string summary = slurp(a / "summary.csv");
        CHECK(summary.rfind("schema_version,", 0) == 0);
        CHECK(summary.find(scenario_digest(s)) != std::string::npos);
        fs::remove_all(a);
        fs::remove_all(b);
    }

    TEST_CASE("sweep parameters") {
        CHECK(parse_sweep_param("tau_r") == SweepParam::tau_r);
        CHECK(to_string(SweepParam::xi) == "xi");
        CHECK_THROWS(parse_sweep_param("bogus"));
        const Scenario s = testing_support::small();
        CHECK(apply_sweep(s, SweepParam::tau_r, 0.05).reporting_period_s == 0.05);
        CHECK(std::get<ExplicitTarget>(apply_sweep(s, SweepParam::xi, 1e-3).mode).xi == 1e-3);
        CHECK_THROWS(apply_sweep(s, SweepParam::tau_r, 0.0));
        CHECK_THROWS(apply_sweep(s, SweepParam::sources, 1.5));
    }

    TEST_CASE("sweeps resume completed points") {
        SweepRequest req;
        req.base = testing_support::small(5.0, 5.0);
        req.param = SweepParam::tau_r;
        req.values = {0.1, 0.2};
        req.seeds = {1, 2};
        req.out_dir = scratch("sweep");
        req.jobs = 2;
        const auto first = run_sweep(req);
        REQUIRE(first.size() == 4);
        for (const auto& p : first) CHECK_FALSE(p.resumed);
        const std::string csv = slurp(req.out_dir / "sweep_summary.csv");
        const auto second = run_sweep(req);
        for (std::size_t i = 0; i < second.size(); ++i) {
            CHECK(second[i].resumed);
            CHECK(second[i].e_adaptive_j == first[i].e_adaptive_j);
        }
        CHECK(slurp(req.out_dir / "sweep_summary.csv") == csv);

        // an incomplete point is re-run
        fs::remove(first[0].dir / "metadata.json");
        const auto third = run_sweep(req);
        CHECK_FALSE(third[0].resumed);
        CHECK(third[1].resumed);
        fs::remove_all(req.out_dir);
    }
}
