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

#include "lapcoop/results.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "lapcoop/errors.hpp"
#include "lapcoop/scenario_io.hpp"

namespace lapcoop {
namespace {

namespace fs = std::filesystem;

/// Comma-joined CSV row builder.
class Row {
public:
    Row& operator<<(double v) { return add(format_double(v)); }
    Row& operator<<(const std::string& v) { return add(v); }
    Row& operator<<(const char* v) { return add(v); }
    template <typename T>
        requires std::is_integral_v<T>
    Row& operator<<(T v) {
        return add(std::to_string(v));
    }
    std::string str() const { return text_ + "\n"; }

private:
    Row& add(const std::string& v) {
        if (!first_) text_ += ',';
        text_ += v;
        first_ = false;
        return *this;
    }
    std::string text_;
    bool first_ = true;
};

const char* kind_name(LinkKind k) { return k == LinkKind::direct ? "direct" : "cooperative"; }

std::string relay_name(const MetricsSink& m, const std::optional<NodeId>& r) {
    return r ? m.topology.name(*r) : std::string();
}

void write_file(const fs::path& p, const std::string& body) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << body;
    if (!out) throw std::runtime_error("write failed for " + p.string());
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

/// Summary values of a finished point directory, or nothing when the run
/// there is missing, incomplete or for a different scenario.
std::optional<SweepPoint> read_point(const fs::path& dir, const std::string& digest, std::uint64_t seed) {
    const fs::path meta = dir / "metadata.json";
    const fs::path summary = dir / "summary.csv";
    if (!fs::exists(meta) || !fs::exists(summary)) return std::nullopt;
    try {
        const auto j = nlohmann::json::parse(read_file(meta));
        if (j.at("scenario_digest").get<std::string>() != digest || j.at("seed").get<std::uint64_t>() != seed) {
            return std::nullopt;
        }
        std::istringstream in(read_file(summary));
        std::string header;
        std::string values;
        std::getline(in, header);
        std::getline(in, values);
        const auto h = split(header);
        const auto v = split(values);
        if (h.size() != v.size()) return std::nullopt;
        std::map<std::string, std::string> row;
        for (std::size_t i = 0; i < h.size(); ++i) row[h[i]] = v[i];
        SweepPoint p;
        p.seed = seed;
        p.digest = digest;
        p.dir = dir;
        p.resumed = true;
        p.e_direct_j = std::stod(row.at("e_direct_j"));
        p.e_adaptive_j = std::stod(row.at("e_adaptive_j"));
        p.e_oh_j = std::stod(row.at("e_oh_j"));
        p.e_com_j = std::stod(row.at("e_com_j"));
        p.packets = std::stoull(row.at("packets"));
        return p;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

}  // namespace

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string summary_csv(const Scenario& s, std::uint64_t seed, const MetricsSink& m) {
    std::string out =
        "schema_version,scenario,digest,seed,duration_s,reporting_period_s,packets,delivered,e_direct_j,"
        "e_adaptive_j,e_oh_j,e_com_j,ledger_total_j,direct_selections,cooperative_selections,reports,"
        "solver_failures,degraded,relay_drops,max_queue_occupancy\n";
    std::size_t coop = 0;
    for (const auto& [id, n] : m.relay_selections) coop += n;
    Row r;
    r << kCsvSchemaVersion << s.name << scenario_digest(s) << seed << s.duration_s << s.reporting_period_s
      << m.totals.packets << m.counters.delivered << m.totals.e_direct_j << m.totals.e_adaptive_j
      << m.totals.e_oh_j << m.totals.e_com_j << m.ledger.total_j() << m.direct_selections << coop
      << m.counters.reports << m.counters.solver_failures << m.counters.degraded << m.counters.relay_drops
      << m.counters.max_occupancy;
    return out + r.str();
}

std::string relay_totals_csv(const MetricsSink& m) {
    std::string out =
        "relay,e_relay_j,e_adaptive_single_j,selections,beta_samples,beta_below_one_fraction,window_beta\n";
    std::map<NodeId, std::pair<std::size_t, std::size_t>> below;
    std::map<NodeId, std::pair<double, double>> window;
    for (const auto& b : m.betas) {
        auto& c = below[b.relay];
        ++c.first;
        if (b.beta < 1.0) ++c.second;
    }
    for (const auto& p : m.packets) {
        for (const auto& o : p.relays) {
            window[o.relay].first += o.energy_j;
            window[o.relay].second += p.e_direct_j;
        }
    }
    for (const auto& [id, e] : m.totals.e_relay_j) {
        const auto sel = m.relay_selections.contains(id) ? m.relay_selections.at(id) : 0;
        const auto c = below[id];
        const auto w = window[id];
        Row r;
        r << m.topology.name(id) << e << m.totals.e_adaptive_single_j.at(id) << sel << c.first
          << (c.first ? static_cast<double>(c.second) / static_cast<double>(c.first) : 0.0)
          << (w.second > 0.0 ? w.first / w.second : 0.0);
        out += r.str();
    }
    return out;
}

std::string beta_samples_csv(const MetricsSink& m) {
    std::string out = "packet_id,time_s,source,relay,beta,feasible\n";
    for (const auto& b : m.betas) {
        Row r;
        r << b.packet_id << b.time_s << m.topology.name(b.source) << m.topology.name(b.relay) << b.beta
          << (b.feasible ? 1 : 0);
        out += r.str();
    }
    return out;
}

std::string adaptive_samples_csv(const MetricsSink& m) {
    std::string out = "packet_id,time_s,source,choice,relay,beta_hat\n";
    for (const auto& a : m.adaptive) {
        Row r;
        r << a.packet_id << a.time_s << m.topology.name(a.source) << kind_name(a.chosen) << relay_name(m, a.relay)
          << a.beta_hat;
        out += r.str();
    }
    return out;
}

std::string queueing_samples_csv(const MetricsSink& m) {
    std::string out = "packet_id,node,class,arrival_s,wait_s\n";
    for (const auto& q : m.queueing) {
        Row r;
        r << q.packet_id << m.topology.name(q.node) << (q.cls == QueueClass::local ? "local" : "relay")
          << q.arrival_s << q.wait_s;
        out += r.str();
    }
    return out;
}

std::string packets_csv(const MetricsSink& m) {
    std::string out =
        "packet_id,source,time_s,xi,p_direct_w,direct_feasible,e_direct_j,choice,relay,p_source_w,p_relay_w,"
        "achieved_ber,e_chosen_j,e_com_j\n";
    for (const auto& p : m.packets) {
        Row r;
        r << p.packet_id << m.topology.name(p.source) << p.time_s << p.xi << p.direct.p_source_w
          << (p.direct.feasible ? 1 : 0) << p.e_direct_j << kind_name(p.chosen) << relay_name(m, p.chosen_relay);
        if (p.chosen == LinkKind::cooperative) {
            const auto it = std::find_if(p.relays.begin(), p.relays.end(),
                                         [&](const RelayOption& o) { return o.relay == *p.chosen_relay; });
            r << it->allocation.p_source_w << *it->allocation.p_relay_w << it->allocation.achieved_ber;
        } else {
            r << p.direct.p_source_w << "" << p.direct.achieved_ber;
        }
        r << p.e_chosen_j << p.e_com_j;
        out += r.str();
    }
    return out;
}

std::string ledger_csv(const MetricsSink& m) {
    std::string out = "node,transmit_j,receive_j,reporting_j,compute_j,total_j\n";
    for (const auto& [id, n] : m.ledger.nodes()) {
        Row r;
        r << m.topology.name(id) << n.transmit_j << n.receive_j << n.reporting_oh_j << n.compute_j << n.total_j();
        out += r.str();
    }
    return out;
}

std::string metadata_json(const Scenario& s, std::uint64_t seed, const MetricsSink& m) {
    nlohmann::json j;
    j["code_version"] = kCodeVersion;
    j["csv_schema_version"] = kCsvSchemaVersion;
    j["scenario_digest"] = scenario_digest(s);
    j["seed"] = seed;
    j["scenario"] = nlohmann::json::parse(emit_scenario(s));
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : m.topology.nodes) {
        nodes.push_back({{"name", n.name},
                         {"source", n.source},
                         {"relay", n.relay},
                         {"lap", n.lap},
                         {"position_m", {n.position.x_m, n.position.y_m, n.position.z_m}}});
    }
    j["topology"]["nodes"] = nodes;
    nlohmann::json links = nlohmann::json::array();
    for (const auto& l : m.topology.links) {
        nlohmann::json e{{"from", m.topology.name(l.from)},
                         {"to", m.topology.name(l.to)},
                         {"distance_m", l.spec.distance_m},
                         {"pathloss_exponent", l.spec.pathloss_exponent}};
        if (l.spec.rice_factor_db) e["rice_factor_db"] = *l.spec.rice_factor_db;
        links.push_back(std::move(e));
    }
    j["topology"]["links"] = links;
    j["counters"] = {{"reports", m.counters.reports},
                     {"refreshes", m.counters.refreshes},
                     {"generated", m.counters.generated},
                     {"delivered", m.counters.delivered},
                     {"relay_drops", m.counters.relay_drops},
                     {"solver_failures", m.counters.solver_failures},
                     {"degraded", m.counters.degraded},
                     {"max_queue_occupancy", m.counters.max_occupancy}};
    j["end_time_s"] = m.end_time_s;
    return j.dump(2) + "\n";
}

void write_run(const fs::path& dir, const Scenario& s, std::uint64_t seed, const MetricsSink& m) {
    fs::create_directories(dir);
    // metadata last: its presence marks a complete run
    fs::remove(dir / "metadata.json");
    write_file(dir / "summary.csv", summary_csv(s, seed, m));
    write_file(dir / "relay_totals.csv", relay_totals_csv(m));
    write_file(dir / "beta_samples.csv", beta_samples_csv(m));
    write_file(dir / "adaptive_samples.csv", adaptive_samples_csv(m));
    write_file(dir / "queueing_samples.csv", queueing_samples_csv(m));
    write_file(dir / "packets.csv", packets_csv(m));
    write_file(dir / "ledger.csv", ledger_csv(m));
    write_file(dir / "metadata.json", metadata_json(s, seed, m));
}

MetricsSink run_and_emit(const Scenario& s, std::uint64_t seed, const fs::path& dir) {
    MetricsSink m;
    try {
        m = run(s, seed);
    } catch (const ValidationError&) {
        throw;
    } catch (const std::exception& e) {
        throw EngineError("scenario " + s.name + ", seed " + std::to_string(seed) + ": " + e.what());
    }
    write_run(dir, s, seed, m);
    return m;
}

SweepParam parse_sweep_param(const std::string& name) {
    if (name == "tau_r") return SweepParam::tau_r;
    if (name == "sources") return SweepParam::sources;
    if (name == "xi") return SweepParam::xi;
    throw std::invalid_argument("unknown sweep parameter " + name);
}

std::string to_string(SweepParam p) {
    switch (p) {
        case SweepParam::tau_r: return "tau_r";
        case SweepParam::sources: return "sources";
        case SweepParam::xi: return "xi";
    }
    return "";
}

Scenario apply_sweep(const Scenario& base, SweepParam param, double value) {
    if (!std::isfinite(value) || !(value > 0.0)) throw std::invalid_argument("sweep values must be finite and > 0");
    Scenario s = base;
    switch (param) {
        case SweepParam::tau_r: s.reporting_period_s = value; break;
        case SweepParam::xi: s.mode = ExplicitTarget{value}; break;
        case SweepParam::sources: {
            const auto n = static_cast<std::size_t>(std::llround(value));
            if (static_cast<double>(n) != value) throw std::invalid_argument("source count must be an integer");
            if (s.random) {
                s.random->sources = static_cast<int>(n);
                break;
            }
            std::size_t kept = 0;
            std::vector<std::string> dropped;
            std::vector<NodeSpec> nodes;
            for (const auto& node : s.nodes) {
                if (node.source && !node.relay && kept++ >= n) {
                    dropped.push_back(node.name);
                    continue;
                }
                nodes.push_back(node);
            }
            if (kept < n) throw std::invalid_argument("scenario has fewer sources than requested");
            s.nodes = std::move(nodes);
            std::erase_if(s.links, [&](const LinkEntry& l) {
                return std::find(dropped.begin(), dropped.end(), l.from) != dropped.end() ||
                       std::find(dropped.begin(), dropped.end(), l.to) != dropped.end();
            });
            break;
        }
    }
    return s;
}

std::string sweep_summary_csv(SweepParam param, const std::vector<SweepPoint>& points) {
    std::string out = "schema_version,param,value,seed,digest,packets,e_direct_j,e_adaptive_j,e_oh_j,e_com_j\n";
    for (const auto& p : points) {
        Row r;
        r << kCsvSchemaVersion << to_string(param) << p.value << p.seed << p.digest << p.packets << p.e_direct_j
          << p.e_adaptive_j << p.e_oh_j << p.e_com_j;
        out += r.str();
    }
    return out;
}

std::vector<SweepPoint> run_sweep(const SweepRequest& req) {
    if (req.values.empty()) throw std::invalid_argument("sweep needs at least one value");
    if (req.seeds.empty()) throw std::invalid_argument("sweep needs at least one seed");
    struct Task {
        Scenario scenario;
        SweepPoint point;
    };
    std::vector<Task> tasks;
    for (std::size_t i = 0; i < req.values.size(); ++i) {
        for (const auto seed : req.seeds) {
            Task t;
            t.scenario = apply_sweep(req.base, req.param, req.values[i]);
            t.scenario.seed = seed;
            t.point.value = req.values[i];
            t.point.seed = seed;
            t.point.digest = scenario_digest(t.scenario);
            t.point.dir = req.out_dir / (to_string(req.param) + "_" + format_double(req.values[i]) + "_seed_" +
                                         std::to_string(seed));
            const auto violations = validate(t.scenario, seed);
            if (!violations.empty()) throw ValidationError(violations);
            tasks.push_back(std::move(t));
        }
    }

    std::atomic<std::size_t> next{0};
    std::mutex err_mu;
    std::exception_ptr error;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            Task& t = tasks[i];
            try {
                if (auto done = read_point(t.point.dir, t.point.digest, t.point.seed)) {
                    done->value = t.point.value;
                    t.point = *done;
                    continue;
                }
                const MetricsSink m = run_and_emit(t.scenario, t.point.seed, t.point.dir);
                t.point.e_direct_j = m.totals.e_direct_j;
                t.point.e_adaptive_j = m.totals.e_adaptive_j;
                t.point.e_oh_j = m.totals.e_oh_j;
                t.point.e_com_j = m.totals.e_com_j;
                t.point.packets = m.totals.packets;
            } catch (...) {
                std::lock_guard lock(err_mu);
                if (!error) error = std::current_exception();
                next = tasks.size();
            }
        }
    };
    const unsigned jobs = std::clamp<unsigned>(req.jobs, 1, static_cast<unsigned>(tasks.size()));
    std::vector<std::thread> pool;
    for (unsigned k = 1; k < jobs; ++k) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);

    std::vector<SweepPoint> points;
    for (const auto& t : tasks) points.push_back(t.point);
    fs::create_directories(req.out_dir);
    write_file(req.out_dir / "sweep_summary.csv", sweep_summary_csv(req.param, points));
    return points;
}

}  // namespace lapcoop
