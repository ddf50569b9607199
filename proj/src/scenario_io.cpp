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

#include "lapcoop/scenario_io.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "lapcoop/errors.hpp"
#include "lapcoop/rng.hpp"

namespace lapcoop {
namespace {

using json = nlohmann::json;

[[noreturn]] void field_error(const std::string& path, const std::string& what) {
    throw ParseError(path + ": " + what, 0, 0);
}

/// Typed access to one JSON object; rejects keys never asked for.
class Obj {
public:
    Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) field_error(path_, "expected an object");
    }

    bool has(const std::string& key) {
        used_.insert(key);
        return j_.contains(key);
    }

    const json& at(const std::string& key) {
        used_.insert(key);
        if (!j_.contains(key)) field_error(where(key), "required field missing");
        return j_.at(key);
    }

    std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    double num(const std::string& key) {
        const json& v = at(key);
        if (!v.is_number()) field_error(where(key), "expected a number");
        return v.get<double>();
    }
    double num(const std::string& key, double fallback) { return has(key) ? num(key) : fallback; }
    std::optional<double> opt_num(const std::string& key) {
        return has(key) ? std::optional<double>(num(key)) : std::nullopt;
    }

    std::uint64_t u64(const std::string& key) {
        const json& v = at(key);
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
            field_error(where(key), "expected a non-negative integer");
        }
        return v.get<std::uint64_t>();
    }
    std::uint64_t u64(const std::string& key, std::uint64_t fallback) { return has(key) ? u64(key) : fallback; }

    int integer(const std::string& key, int fallback) {
        if (!has(key)) return fallback;
        const json& v = at(key);
        if (!v.is_number_integer()) field_error(where(key), "expected an integer");
        return v.get<int>();
    }

    std::string str(const std::string& key) {
        const json& v = at(key);
        if (!v.is_string()) field_error(where(key), "expected a string");
        return v.get<std::string>();
    }
    std::string str(const std::string& key, const std::string& fallback) { return has(key) ? str(key) : fallback; }

    /// A gain given in dB under key_db or linear under key.
    std::optional<double> gain(const std::string& key) {
        const bool db = has(key + "_db");
        const bool lin = has(key);
        if (db && lin) field_error(where(key), "give either " + key + " or " + key + "_db");
        if (db) return db_to_linear(num(key + "_db"));
        if (lin) return num(key);
        return std::nullopt;
    }

    /// Noise power given in dBm or in watts.
    std::optional<double> noise() {
        const bool dbm = has("noise_power_dbm");
        const bool w = has("noise_power_w");
        if (dbm && w) field_error(where("noise_power"), "give either noise_power_w or noise_power_dbm");
        if (dbm) return dbm_to_watts(num("noise_power_dbm"));
        if (w) return num("noise_power_w");
        return std::nullopt;
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!used_.contains(it.key())) field_error(where(it.key()), "unknown field");
        }
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

CartesianPosition parse_position(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 3) field_error(path, "expected [x, y, z]");
    for (const auto& v : j) {
        if (!v.is_number()) field_error(path, "expected numbers");
    }
    return CartesianPosition{j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

GeoPosition parse_geo(const json& j, const std::string& path) {
    Obj o(j, path);
    GeoPosition g;
    g.latitude_deg = o.num("latitude_deg");
    g.longitude_deg = o.num("longitude_deg");
    g.altitude_m = o.num("altitude_m", 0.0);
    o.finish();
    return g;
}

Range<double> parse_range(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        field_error(path, "expected [lo, hi]");
    }
    return Range<double>{j[0].get<double>(), j[1].get<double>()};
}

TrafficModel parse_traffic(const json& j, const std::string& path) {
    Obj o(j, path);
    const std::string model = o.str("model");
    TrafficModel out;
    if (model == "constant") {
        ConstantTraffic c;
        c.count = o.u64("count");
        c.size_bits = o.num("size_bits", c.size_bits);
        c.interval_s = o.num("interval_s", c.interval_s);
        c.start_s = o.num("start_s", c.start_s);
        out = c;
    } else if (model == "exponential") {
        ExponentialTraffic e;
        e.mean_s = o.num("mean_s", e.mean_s);
        e.size_bits = o.num("size_bits", e.size_bits);
        e.start_s = o.num("start_s", e.start_s);
        out = e;
    } else {
        field_error(o.where("model"), "expected \"constant\" or \"exponential\"");
    }
    o.finish();
    return out;
}

json traffic_json(const TrafficModel& t) {
    if (const auto* c = std::get_if<ConstantTraffic>(&t)) {
        return json{{"model", "constant"}, {"count", c->count}, {"size_bits", c->size_bits},
                    {"interval_s", c->interval_s}, {"start_s", c->start_s}};
    }
    const auto& e = std::get<ExponentialTraffic>(t);
    return json{{"model", "exponential"}, {"mean_s", e.mean_s}, {"size_bits", e.size_bits}, {"start_s", e.start_s}};
}

json position_json(const CartesianPosition& p) { return json::array({p.x_m, p.y_m, p.z_m}); }

json geo_json(const GeoPosition& g) {
    return json{{"latitude_deg", g.latitude_deg}, {"longitude_deg", g.longitude_deg}, {"altitude_m", g.altitude_m}};
}

json range_json(const Range<double>& r) { return json::array({r.lo, r.hi}); }

Scenario from_json(const json& root) {
    Obj o(root, "");
    Scenario s;
    const int version = o.integer("schema_version", kScenarioSchemaVersion);
    if (version != kScenarioSchemaVersion) {
        field_error("schema_version", "unsupported version " + std::to_string(version));
    }
    s.name = o.str("name", s.name);
    s.seed = o.u64("seed", s.seed);
    s.duration_s = o.num("duration_s", s.duration_s);
    s.reporting_period_s = o.num("reporting_period_s", s.reporting_period_s);
    s.coherence_time_s = o.num("coherence_time_s", s.coherence_time_s);

    if (o.has("lap")) {
        Obj lap(o.at("lap"), "lap");
        s.lap_name = lap.str("name", s.lap_name);
        s.lap_altitude_m = lap.num("altitude_m", s.lap_altitude_m);
        if (lap.has("position_m")) s.lap_position = parse_position(lap.at("position_m"), "lap.position_m");
        lap.finish();
    }
    if (o.has("geo_origin")) s.geo_origin = parse_geo(o.at("geo_origin"), "geo_origin");

    if (o.has("radio")) {
        Obj r(o.at("radio"), "radio");
        s.radio.carrier_hz = r.num("carrier_hz", s.radio.carrier_hz);
        s.radio.tx_gain = r.gain("tx_gain").value_or(s.radio.tx_gain);
        s.radio.rx_gain = r.gain("rx_gain").value_or(s.radio.rx_gain);
        s.radio.noise_power_w = r.noise().value_or(s.radio.noise_power_w);
        s.radio.bitrate_bps = r.num("bitrate_bps", s.radio.bitrate_bps);
        s.radio.reference_distance_m = r.num("reference_distance_m", s.radio.reference_distance_m);
        r.finish();
    }

    if (o.has("nodes")) {
        const json& arr = o.at("nodes");
        if (!arr.is_array()) field_error("nodes", "expected an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string path = "nodes[" + std::to_string(i) + "]";
            Obj n(arr[i], path);
            NodeSpec ns;
            ns.name = n.str("name");
            const json& roles = n.at("roles");
            if (!roles.is_array()) field_error(n.where("roles"), "expected an array");
            for (const auto& r : roles) {
                if (r == "source") {
                    ns.source = true;
                } else if (r == "relay") {
                    ns.relay = true;
                } else {
                    field_error(n.where("roles"), "roles are \"source\" and \"relay\"");
                }
            }
            if (n.has("position_m")) ns.position = parse_position(n.at("position_m"), n.where("position_m"));
            if (n.has("geo")) ns.geo = parse_geo(n.at("geo"), n.where("geo"));
            if (n.has("traffic")) ns.traffic = parse_traffic(n.at("traffic"), n.where("traffic"));
            n.finish();
            s.nodes.push_back(std::move(ns));
        }
    }

    if (o.has("links")) {
        const json& arr = o.at("links");
        if (!arr.is_array()) field_error("links", "expected an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            Obj l(arr[i], "links[" + std::to_string(i) + "]");
            LinkEntry e;
            e.from = l.str("from");
            e.to = l.str("to");
            e.distance_m = l.opt_num("distance_m");
            e.pathloss_exponent = l.num("pathloss_exponent");
            e.rice_factor_db = l.opt_num("rice_factor_db");
            e.carrier_hz = l.opt_num("carrier_hz");
            e.tx_gain = l.gain("tx_gain");
            e.rx_gain = l.gain("rx_gain");
            e.noise_power_w = l.noise();
            e.bitrate_bps = l.opt_num("bitrate_bps");
            l.finish();
            s.links.push_back(std::move(e));
        }
    }

    if (o.has("random")) {
        Obj r(o.at("random"), "random");
        RandomLayout rl;
        rl.sources = r.integer("sources", rl.sources);
        rl.relays = r.integer("relays", rl.relays);
        rl.area_m = r.num("area_m", rl.area_m);
        if (r.has("uplink_pathloss_exponent")) {
            rl.uplink_pathloss_exponent = parse_range(r.at("uplink_pathloss_exponent"), r.where("uplink_pathloss_exponent"));
        }
        if (r.has("terrestrial_pathloss_exponent")) {
            rl.terrestrial_pathloss_exponent =
                parse_range(r.at("terrestrial_pathloss_exponent"), r.where("terrestrial_pathloss_exponent"));
        }
        if (r.has("uplink_rice_factor_db")) {
            rl.uplink_rice_factor_db = parse_range(r.at("uplink_rice_factor_db"), r.where("uplink_rice_factor_db"));
        }
        if (r.has("layout_seed")) rl.layout_seed = r.u64("layout_seed");
        if (r.has("source_traffic")) rl.source_traffic = parse_traffic(r.at("source_traffic"), r.where("source_traffic"));
        if (r.has("relay_traffic")) rl.relay_traffic = parse_traffic(r.at("relay_traffic"), r.where("relay_traffic"));
        r.finish();
        s.random = rl;
    }

    if (o.has("queue")) {
        Obj q(o.at("queue"), "queue");
        s.queue.service_time_s = q.num("service_time_s", s.queue.service_time_s);
        const std::string d = q.str("distribution", "deterministic");
        if (d == "deterministic") {
            s.queue.distribution = ServiceDistribution::deterministic;
        } else if (d == "exponential") {
            s.queue.distribution = ServiceDistribution::exponential;
        } else {
            field_error("queue.distribution", "expected \"deterministic\" or \"exponential\"");
        }
        q.finish();
    }

    if (o.has("mode")) {
        Obj m(o.at("mode"), "mode");
        const std::string kind = m.str("kind");
        if (kind == "fixed_direct_power") {
            s.mode = FixedDirectPower{m.num("p_w", FixedDirectPower{}.p_w)};
        } else if (kind == "explicit_target") {
            s.mode = ExplicitTarget{m.num("xi")};
        } else {
            field_error("mode.kind", "expected \"fixed_direct_power\" or \"explicit_target\"");
        }
        m.finish();
    }

    if (o.has("solver")) {
        Obj c(o.at("solver"), "solver");
        s.solver.step_size_direct = c.num("step_size_direct", s.solver.step_size_direct);
        s.solver.step_size_relay = c.num("step_size_relay", s.solver.step_size_relay);
        s.solver.max_iterations = c.integer("max_iterations", s.solver.max_iterations);
        s.solver.power_tolerance_w = c.num("power_tolerance_w", s.solver.power_tolerance_w);
        s.solver.ber_tolerance = c.num("ber_tolerance", s.solver.ber_tolerance);
        s.solver.p_max_w = c.num("p_max_w", s.solver.p_max_w);
        const std::string method = c.str("method", "bracketed");
        if (method == "bracketed") {
            s.solver.method = SolverMethod::bracketed;
        } else if (method == "gradient") {
            s.solver.method = SolverMethod::gradient;
        } else {
            field_error("solver.method", "expected \"bracketed\" or \"gradient\"");
        }
        c.finish();
    }

    if (o.has("prices")) {
        Obj p(o.at("prices"), "prices");
        EnergyPrices& e = s.prices;
        e.rx_power_terrestrial_w = p.num("rx_power_terrestrial_w", e.rx_power_terrestrial_w);
        e.rx_power_lap_w = p.num("rx_power_lap_w", e.rx_power_lap_w);
        e.tx_power_report_terrestrial_w = p.num("tx_power_report_terrestrial_w", e.tx_power_report_terrestrial_w);
        e.tx_power_report_lap_w = p.num("tx_power_report_lap_w", e.tx_power_report_lap_w);
        e.report_bitrate_bps = p.num("report_bitrate_bps", e.report_bitrate_bps);
        e.report_length_bits = p.num("report_length_bits", e.report_length_bits);
        e.cpu_power_w = p.num("cpu_power_w", e.cpu_power_w);
        e.cpu_clock_hz = p.num("cpu_clock_hz", e.cpu_clock_hz);
        p.finish();
    }
    o.finish();
    return s;
}

json to_json(const Scenario& s) {
    json root;
    root["schema_version"] = kScenarioSchemaVersion;
    root["name"] = s.name;
    root["seed"] = s.seed;
    root["duration_s"] = s.duration_s;
    root["reporting_period_s"] = s.reporting_period_s;
    root["coherence_time_s"] = s.coherence_time_s;
    json lap{{"name", s.lap_name}, {"altitude_m", s.lap_altitude_m}};
    if (s.lap_position) lap["position_m"] = position_json(*s.lap_position);
    root["lap"] = lap;
    if (s.geo_origin) root["geo_origin"] = geo_json(*s.geo_origin);
    root["radio"] = json{{"carrier_hz", s.radio.carrier_hz},
                         {"tx_gain", s.radio.tx_gain},
                         {"rx_gain", s.radio.rx_gain},
                         {"noise_power_w", s.radio.noise_power_w},
                         {"bitrate_bps", s.radio.bitrate_bps},
                         {"reference_distance_m", s.radio.reference_distance_m}};

    json nodes = json::array();
    for (const auto& n : s.nodes) {
        json j{{"name", n.name}};
        json roles = json::array();
        if (n.source) roles.push_back("source");
        if (n.relay) roles.push_back("relay");
        j["roles"] = roles;
        if (n.position) j["position_m"] = position_json(*n.position);
        if (n.geo) j["geo"] = geo_json(*n.geo);
        if (n.traffic) j["traffic"] = traffic_json(*n.traffic);
        nodes.push_back(std::move(j));
    }
    root["nodes"] = nodes;

    json links = json::array();
    for (const auto& l : s.links) {
        json j{{"from", l.from}, {"to", l.to}, {"pathloss_exponent", l.pathloss_exponent}};
        if (l.distance_m) j["distance_m"] = *l.distance_m;
        if (l.rice_factor_db) j["rice_factor_db"] = *l.rice_factor_db;
        if (l.carrier_hz) j["carrier_hz"] = *l.carrier_hz;
        if (l.tx_gain) j["tx_gain"] = *l.tx_gain;
        if (l.rx_gain) j["rx_gain"] = *l.rx_gain;
        if (l.noise_power_w) j["noise_power_w"] = *l.noise_power_w;
        if (l.bitrate_bps) j["bitrate_bps"] = *l.bitrate_bps;
        links.push_back(std::move(j));
    }
    root["links"] = links;

    if (s.random) {
        const RandomLayout& r = *s.random;
        json j{{"sources", r.sources},
               {"relays", r.relays},
               {"area_m", r.area_m},
               {"uplink_pathloss_exponent", range_json(r.uplink_pathloss_exponent)},
               {"terrestrial_pathloss_exponent", range_json(r.terrestrial_pathloss_exponent)},
               {"uplink_rice_factor_db", range_json(r.uplink_rice_factor_db)},
               {"source_traffic", traffic_json(r.source_traffic)}};
        if (r.layout_seed) j["layout_seed"] = *r.layout_seed;
        if (r.relay_traffic) j["relay_traffic"] = traffic_json(*r.relay_traffic);
        root["random"] = j;
    }

    root["queue"] = json{{"service_time_s", s.queue.service_time_s},
                         {"distribution", s.queue.distribution == ServiceDistribution::deterministic
                                              ? "deterministic"
                                              : "exponential"}};
    if (const auto* f = std::get_if<FixedDirectPower>(&s.mode)) {
        root["mode"] = json{{"kind", "fixed_direct_power"}, {"p_w", f->p_w}};
    } else {
        root["mode"] = json{{"kind", "explicit_target"}, {"xi", std::get<ExplicitTarget>(s.mode).xi}};
    }
    root["solver"] = json{{"step_size_direct", s.solver.step_size_direct},
                          {"step_size_relay", s.solver.step_size_relay},
                          {"max_iterations", s.solver.max_iterations},
                          {"power_tolerance_w", s.solver.power_tolerance_w},
                          {"ber_tolerance", s.solver.ber_tolerance},
                          {"p_max_w", s.solver.p_max_w},
                          {"method", s.solver.method == SolverMethod::bracketed ? "bracketed" : "gradient"}};
    const EnergyPrices& e = s.prices;
    root["prices"] = json{{"rx_power_terrestrial_w", e.rx_power_terrestrial_w},
                          {"rx_power_lap_w", e.rx_power_lap_w},
                          {"tx_power_report_terrestrial_w", e.tx_power_report_terrestrial_w},
                          {"tx_power_report_lap_w", e.tx_power_report_lap_w},
                          {"report_bitrate_bps", e.report_bitrate_bps},
                          {"report_length_bits", e.report_length_bits},
                          {"cpu_power_w", e.cpu_power_w},
                          {"cpu_clock_hz", e.cpu_clock_hz}};
    return root;
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t col = 1;
    const std::size_t end = std::min(byte > 0 ? byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < end; ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

}  // namespace

Scenario parse_scenario(std::string_view text) {
    json root;
    try {
        root = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        const auto [line, col] = line_column(text, e.byte);
        throw ParseError("line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + e.what(),
                         line, col);
    }
    try {
        return from_json(root);
    } catch (const json::exception& e) {
        throw ParseError(e.what(), 0, 0);
    }
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path.string(), 0, 0);
    std::ostringstream buf;
    buf << in.rdbuf();
    Scenario s = parse_scenario(buf.str());
    auto violations = validate(s, s.seed);
    if (!violations.empty()) throw ValidationError(std::move(violations));
    return s;
}

std::string emit_scenario(const Scenario& scenario) { return to_json(scenario).dump(2) + "\n"; }

std::string scenario_digest(const Scenario& scenario) {
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(to_json(scenario).dump())));
    return hex;
}

}  // namespace lapcoop
