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

#ifndef LAPCOOP_CHANNEL_HPP
#define LAPCOOP_CHANNEL_HPP

#include <optional>
#include <string>
#include <vector>

#include "lapcoop/rng.hpp"

namespace lapcoop {

inline constexpr double kSpeedOfLight = 3.0e8;  // m/s
inline constexpr double kEarthRadiusKm = 6371.0;

double db_to_linear(double db) noexcept;
double linear_to_db(double lin) noexcept;
double dbm_to_watts(double dbm) noexcept;
double watts_to_dbm(double w) noexcept;

/// Static radio parameters of one directed link.
///
/// A link with a Rice factor is a terrestrial-to-LAP uplink (Ricean fading,
/// DPSK); a link without one is terrestrial-terrestrial (Rayleigh, BPSK).
struct LinkSpec {
    double distance_m = 1.0;
    double pathloss_exponent = 2.0;
    std::optional<double> rice_factor_db;
    double carrier_hz = 3.5e9;
    double tx_gain = 1.0;          // linear
    double rx_gain = 1.0;          // linear
    double noise_power_w = 1.0;    // receiver-referred, over the signal bandwidth
    double bitrate_bps = 6.0e6;
    double reference_distance_m = 1.0;

    bool is_ricean() const noexcept { return rice_factor_db.has_value(); }

    /// Linear Rice factor; empty for Rayleigh links.
    std::optional<double> rice_factor_linear() const;

    /// Returns one message per violated invariant; empty when valid.
    std::vector<std::string> violations() const;
};

/// Block-fading state of one link: the power gain is held for a coherence
/// interval and redrawn afterwards.
struct FadingState {
    double power_gain = 1.0;
    double last_update_s = 0.0;
    double coherence_time_s = 1.0;

    bool due(double now_s) const noexcept { return now_s - last_update_s >= coherence_time_s; }
};

struct GeoPosition {
    double latitude_deg = 0.0;
    double longitude_deg = 0.0;
    double altitude_m = 0.0;

    bool valid() const noexcept;
};

/// Free-space loss at the reference distance, (4*pi*f*d/c)^2.
double reference_loss(double carrier_hz, double reference_distance_m);

/// Log-distance mean pathloss L(d) = L(d_ref) * (d/d_ref)^alpha, linear.
double mean_pathloss(const LinkSpec& spec);

/// One draw of |h|^2 with unit mean.
double sample_fading_power(const LinkSpec& spec, RngStream& rng);

/// Redraws the gain if the coherence interval has elapsed. Returns true when
/// a new block started.
bool refresh_fading(FadingState& state, const LinkSpec& spec, double now_s, RngStream& rng);

/// Spherical law of cosines on a 6371 km sphere; altitude is ignored.
double great_circle_distance(const GeoPosition& a, const GeoPosition& b);

/// Received power of a report in dBm: EIRP - L + G_r.
double received_report_power(double eirp_dbm, double pathloss_db, double rx_gain_db) noexcept;

/// Composite temporal gain gamma/L recovered from a report's received power.
/// Throws InvalidMeasurement when the measurement implies a gain above one.
double estimate_total_gain_from_report(double eirp_w, double rx_gain_lin, double measured_rx_power_w);

}  // namespace lapcoop

#endif  // LAPCOOP_CHANNEL_HPP
