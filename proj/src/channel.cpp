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

#include "lapcoop/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "lapcoop/errors.hpp"

namespace lapcoop {

double db_to_linear(double db) noexcept { return std::pow(10.0, db / 10.0); }
double linear_to_db(double lin) noexcept { return 10.0 * std::log10(lin); }
double dbm_to_watts(double dbm) noexcept { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watts_to_dbm(double w) noexcept { return 10.0 * std::log10(w) + 30.0; }

std::optional<double> LinkSpec::rice_factor_linear() const {
    if (!rice_factor_db) return std::nullopt;
    return db_to_linear(*rice_factor_db);
}

std::vector<std::string> LinkSpec::violations() const {
    std::vector<std::string> out;
    auto require = [&](bool ok, const char* msg) {
        if (!ok) out.emplace_back(msg);
    };
    require(std::isfinite(distance_m) && distance_m > 0.0, "distance_m must be > 0");
    require(pathloss_exponent >= 1.5 && pathloss_exponent <= 6.0, "pathloss_exponent must lie in [1.5, 6]");
    require(std::isfinite(bitrate_bps) && bitrate_bps > 0.0, "bitrate_bps must be > 0");
    require(std::isfinite(noise_power_w) && noise_power_w > 0.0, "noise_power_w must be > 0");
    require(std::isfinite(carrier_hz) && carrier_hz > 0.0, "carrier_hz must be > 0");
    require(tx_gain > 0.0 && rx_gain > 0.0, "antenna gains must be > 0");
    require(reference_distance_m > 0.0, "reference_distance_m must be > 0");
    require(distance_m >= reference_distance_m, "distance_m must not be below reference_distance_m");
    if (rice_factor_db) require(!std::isnan(*rice_factor_db), "rice_factor_db must be a number");
    return out;
}

bool GeoPosition::valid() const noexcept {
    return latitude_deg >= -90.0 && latitude_deg <= 90.0 && longitude_deg >= -180.0 &&
           longitude_deg <= 180.0;
}

double reference_loss(double carrier_hz, double reference_distance_m) {
    if (!(carrier_hz > 0.0) || !(reference_distance_m > 0.0)) {
        throw std::invalid_argument("reference_loss: carrier and reference distance must be > 0");
    }
    const double x = 4.0 * std::numbers::pi * carrier_hz * reference_distance_m / kSpeedOfLight;
    return x * x;
}

double mean_pathloss(const LinkSpec& spec) {
    if (!(spec.distance_m > 0.0)) throw std::invalid_argument("mean_pathloss: distance must be > 0");
    if (spec.distance_m < spec.reference_distance_m) {
        throw std::invalid_argument("mean_pathloss: distance below the reference distance");
    }
    return reference_loss(spec.carrier_hz, spec.reference_distance_m) *
           std::pow(spec.distance_m / spec.reference_distance_m, spec.pathloss_exponent);
}

double sample_fading_power(const LinkSpec& spec, RngStream& rng) {
    const auto k = spec.rice_factor_linear();
    if (!k) return rng.exponential(1.0);
    if (std::isinf(*k)) return 1.0;
    // |mu + z|^2, LOS amplitude mu and circular Gaussian z of variance 1/(K+1).
    const double mu = std::sqrt(*k / (*k + 1.0));
    const double sigma = std::sqrt(0.5 / (*k + 1.0));
    const double re = mu + sigma * rng.normal();
    const double im = sigma * rng.normal();
    return re * re + im * im;
}

bool refresh_fading(FadingState& state, const LinkSpec& spec, double now_s, RngStream& rng) {
    if (!state.due(now_s)) return false;
    state.power_gain = sample_fading_power(spec, rng);
    state.last_update_s = now_s;
    return true;
}

double great_circle_distance(const GeoPosition& a, const GeoPosition& b) {
    if (a.latitude_deg == b.latitude_deg && a.longitude_deg == b.longitude_deg) return 0.0;
    constexpr double rad = std::numbers::pi / 180.0;
    // Colatitudes, as in cos(90 - lat).
    const double ca = (90.0 - a.latitude_deg) * rad;
    const double cb = (90.0 - b.latitude_deg) * rad;
    const double dlon = (a.longitude_deg - b.longitude_deg) * rad;
    const double c = std::cos(ca) * std::cos(cb) + std::sin(ca) * std::sin(cb) * std::cos(dlon);
    return std::acos(std::clamp(c, -1.0, 1.0)) * kEarthRadiusKm;
}

double received_report_power(double eirp_dbm, double pathloss_db, double rx_gain_db) noexcept {
    return eirp_dbm - pathloss_db + rx_gain_db;
}

double estimate_total_gain_from_report(double eirp_w, double rx_gain_lin, double measured_rx_power_w) {
    if (!(eirp_w > 0.0) || !(rx_gain_lin > 0.0) || !(measured_rx_power_w > 0.0)) {
        throw std::invalid_argument("estimate_total_gain_from_report: inputs must be > 0");
    }
    const double reference = eirp_w * rx_gain_lin;
    if (measured_rx_power_w > reference) {
        throw InvalidMeasurement("received report power exceeds EIRP * G_r");
    }
    return measured_rx_power_w / reference;
}

}  // namespace lapcoop
