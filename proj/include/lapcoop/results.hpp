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

#ifndef LAPCOOP_RESULTS_HPP
#define LAPCOOP_RESULTS_HPP

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "lapcoop/scenario.hpp"
#include "lapcoop/sim_engine.hpp"

namespace lapcoop {

inline constexpr int kCsvSchemaVersion = 1;
inline constexpr const char* kCodeVersion = "1.0.0";

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

/// CSV bodies, header line first.
std::string summary_csv(const Scenario& scenario, std::uint64_t seed, const MetricsSink& m);
std::string relay_totals_csv(const MetricsSink& m);
std::string beta_samples_csv(const MetricsSink& m);
std::string adaptive_samples_csv(const MetricsSink& m);
std::string queueing_samples_csv(const MetricsSink& m);
std::string packets_csv(const MetricsSink& m);
std::string ledger_csv(const MetricsSink& m);
std::string metadata_json(const Scenario& scenario, std::uint64_t seed, const MetricsSink& m);

/// Writes every result file of one run into dir (created if needed).
void write_run(const std::filesystem::path& dir, const Scenario& scenario, std::uint64_t seed,
               const MetricsSink& m);

/// Runs and writes. Engine failures are rethrown as EngineError naming the
/// scenario and seed.
MetricsSink run_and_emit(const Scenario& scenario, std::uint64_t seed, const std::filesystem::path& dir);

class EngineError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class SweepParam { tau_r, sources, xi };

SweepParam parse_sweep_param(const std::string& name);
std::string to_string(SweepParam p);

/// The scenario with one swept parameter replaced. tau_r is in seconds;
/// sources keeps the first N sources of an explicit layout or sets the
/// count of a random one; xi switches to explicit-target mode.
Scenario apply_sweep(const Scenario& base, SweepParam param, double value);

struct SweepRequest {
    Scenario base;
    SweepParam param = SweepParam::tau_r;
    std::vector<double> values;
    std::vector<std::uint64_t> seeds;
    std::filesystem::path out_dir;
    unsigned jobs = 1;
};

struct SweepPoint {
    double value = 0.0;
    std::uint64_t seed = 0;
    std::string digest;
    std::filesystem::path dir;
    bool resumed = false;
    double e_direct_j = 0.0;
    double e_adaptive_j = 0.0;
    double e_oh_j = 0.0;
    double e_com_j = 0.0;
    std::size_t packets = 0;
};

/// Runs every (value, seed) point on a bounded worker pool and writes
/// sweep_summary.csv. Points whose directory already holds a complete run
/// of the same scenario digest and seed are read back instead of re-run.
std::vector<SweepPoint> run_sweep(const SweepRequest& request);

std::string sweep_summary_csv(SweepParam param, const std::vector<SweepPoint>& points);

}  // namespace lapcoop

#endif  // LAPCOOP_RESULTS_HPP
