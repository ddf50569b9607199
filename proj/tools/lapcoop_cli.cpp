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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "lapcoop/errors.hpp"
#include "lapcoop/fixtures.hpp"
#include "lapcoop/results.hpp"
#include "lapcoop/scenario_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace lapcoop;

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 2;
constexpr int kEngine = 3;

int report(const json& err, int code) {
    std::cerr << err.dump() << "\n";
    return code;
}

/// A scenario file, or the name of a built-in fixture.
Scenario resolve(const std::string& arg) {
    if (fs::exists(arg)) return load_scenario(arg);
    if (auto s = fixture(arg)) {
        auto v = validate(*s, s->seed);
        if (!v.empty()) throw ValidationError(std::move(v));
        return *s;
    }
    throw ParseError("no scenario file or fixture named " + arg, 0, 0);
}

fs::path default_out_root() {
    if (const char* env = std::getenv("LAPCOOP_OUT_DIR"); env != nullptr && *env != '\0') return env;
    return "lapcoop_out";
}

std::vector<std::uint64_t> seed_list(const std::vector<std::uint64_t>& seeds, const std::string& range,
                                     std::uint64_t fallback) {
    std::vector<std::uint64_t> out = seeds;
    if (!range.empty()) {
        const auto colon = range.find(':');
        if (colon == std::string::npos) throw std::invalid_argument("--seed-range expects FIRST:LAST");
        const auto a = std::stoull(range.substr(0, colon));
        const auto b = std::stoull(range.substr(colon + 1));
        if (b < a) throw std::invalid_argument("--seed-range is empty");
        for (auto s = a; s <= b; ++s) out.push_back(s);
    }
    if (out.empty()) out.push_back(fallback);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive direct/relay link selection simulator for LAP uplinks"};
    app.require_subcommand(1);

    std::string scenario_arg;
    auto* validate_cmd = app.add_subcommand("validate", "Parse and validate a scenario");
    validate_cmd->add_option("scenario", scenario_arg, "Scenario file or fixture name")->required();

    std::optional<std::uint64_t> seed;
    std::string out_dir;
    auto* run_cmd = app.add_subcommand("run", "Run one scenario and write its result files");
    run_cmd->add_option("scenario", scenario_arg, "Scenario file or fixture name")->required();
    run_cmd->add_option("--seed", seed, "Master seed (default: the scenario's)");
    run_cmd->add_option("--out", out_dir, "Output directory");

    std::string param;
    std::vector<double> values;
    std::vector<std::uint64_t> seeds;
    std::string seed_range;
    unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
    auto* sweep_cmd = app.add_subcommand("sweep", "Run a parameter sweep");
    sweep_cmd->add_option("scenario", scenario_arg, "Scenario file or fixture name")->required();
    sweep_cmd->add_option("--param", param, "tau_r (seconds), sources or xi")
        ->required()
        ->check(CLI::IsMember({"tau_r", "sources", "xi"}));
    sweep_cmd->add_option("--values", values, "Values of the swept parameter")->required();
    sweep_cmd->add_option("--seeds", seeds, "Seeds to run at every point");
    sweep_cmd->add_option("--seed-range", seed_range, "Inclusive seed range FIRST:LAST");
    sweep_cmd->add_option("--jobs", jobs, "Concurrent runs")->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--out", out_dir, "Output directory");

    auto* fixtures_cmd = app.add_subcommand("fixtures", "Built-in scenarios");
    fixtures_cmd->require_subcommand(1);
    fixtures_cmd->add_subcommand("list", "List built-in scenarios");
    std::string export_dir = "fixtures";
    auto* export_cmd = fixtures_cmd->add_subcommand("export", "Write built-in scenarios as JSON files");
    export_cmd->add_option("--dir", export_dir, "Destination directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return report({{"error", "usage"}, {"message", e.what()}}, kValidation);
    }

    try {
        if (*validate_cmd) {
            const Scenario s = resolve(scenario_arg);
            const Topology t = materialize(s, s.seed);
            std::cout << json{{"status", "ok"},
                              {"scenario", s.name},
                              {"digest", scenario_digest(s)},
                              {"nodes", t.nodes.size()},
                              {"links", t.links.size()}}
                             .dump()
                      << "\n";
            return kOk;
        }
        if (*run_cmd) {
            const Scenario s = resolve(scenario_arg);
            const std::uint64_t sd = seed.value_or(s.seed);
            Scenario run_s = s;
            run_s.seed = sd;
            const fs::path dir =
                out_dir.empty() ? default_out_root() / (s.name + "_seed_" + std::to_string(sd)) : fs::path(out_dir);
            const MetricsSink m = run_and_emit(run_s, sd, dir);
            std::cout << json{{"status", "ok"},
                              {"out", dir.string()},
                              {"packets", m.totals.packets},
                              {"e_direct_j", m.totals.e_direct_j},
                              {"e_adaptive_j", m.totals.e_adaptive_j},
                              {"e_oh_j", m.totals.e_oh_j}}
                             .dump()
                      << "\n";
            return kOk;
        }
        if (*sweep_cmd) {
            SweepRequest req;
            req.base = resolve(scenario_arg);
            req.param = parse_sweep_param(param);
            req.values = values;
            req.seeds = seed_list(seeds, seed_range, req.base.seed);
            req.out_dir = out_dir.empty() ? default_out_root() / (req.base.name + "_sweep_" + param)
                                          : fs::path(out_dir);
            req.jobs = jobs;
            const auto points = run_sweep(req);
            std::size_t resumed = 0;
            for (const auto& p : points) resumed += p.resumed ? 1 : 0;
            std::cout << json{{"status", "ok"},
                              {"out", req.out_dir.string()},
                              {"points", points.size()},
                              {"resumed", resumed}}
                             .dump()
                      << "\n";
            return kOk;
        }
        if (*fixtures_cmd) {
            if (*export_cmd) {
                fs::create_directories(export_dir);
                for (const auto& f : fixture_list()) {
                    const fs::path p = fs::path(export_dir) / (f.name + ".json");
                    std::ofstream out(p, std::ios::binary | std::ios::trunc);
                    out << emit_scenario(*fixture(f.name));
                    if (!out) throw std::runtime_error("cannot write " + p.string());
                    std::cout << p.string() << "\n";
                }
                return kOk;
            }
            for (const auto& f : fixture_list()) std::cout << f.name << "\t" << f.description << "\n";
            return kOk;
        }
    } catch (const ValidationError& e) {
        return report({{"error", "validation"}, {"violations", e.violations()}}, kValidation);
    } catch (const ParseError& e) {
        return report({{"error", "parse"}, {"message", e.what()}, {"line", e.line()}, {"column", e.column()}},
                      kValidation);
    } catch (const std::invalid_argument& e) {
        return report({{"error", "validation"}, {"violations", {e.what()}}}, kValidation);
    } catch (const std::exception& e) {
        return report({{"error", "engine"}, {"message", e.what()}}, kEngine);
    }
    return kOk;
}
