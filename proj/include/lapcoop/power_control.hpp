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

#ifndef LAPCOOP_POWER_CONTROL_HPP
#define LAPCOOP_POWER_CONTROL_HPP

#include <optional>
#include <string>
#include <vector>

#include "lapcoop/channel.hpp"

namespace lapcoop {

enum class SolverMethod { bracketed, gradient };

struct SolverConfig {
    /// Fixed gradient step sizes; zero selects a backtracking line search.
    double step_size_direct = 0.0;
    double step_size_relay = 0.0;
    int max_iterations = 10000;
    double power_tolerance_w = 1e-6;
    double ber_tolerance = 1e-6;  // relative
    double p_max_w = 2.0;
    SolverMethod method = SolverMethod::bracketed;

    std::vector<std::string> violations() const;
};

/// Transmit powers for one path. For a direct path only the source power is
/// set; for a cooperative path p_source_w is the source-to-relay power and
/// p_relay_w the relay-to-LAP power.
struct PowerAllocation {
    double p_source_w = 0.0;
    std::optional<double> p_relay_w;
    double achieved_ber = 0.5;
    bool feasible = false;

    double total_power_w() const noexcept { return p_source_w + p_relay_w.value_or(0.0); }
};

/// What a solver needs to know about one hop: SNR per transmitted watt and
/// the fading family (Rice factor present for Ricean DPSK uplinks).
struct HopContext {
    double snr_per_watt = 1.0;
    std::optional<double> rice_factor;

    static HopContext from_link(const LinkSpec& spec, double composite_gain);

    double snr(double p_w) const noexcept { return snr_per_watt * p_w; }
    double ber(double p_w) const noexcept;
    /// d(BER)/dP.
    double ber_slope(double p_w) const noexcept;
};

/// Minimum source power meeting `xi` on the direct uplink. Infeasible (with
/// p_source_w = p_max) when even p_max misses the target.
PowerAllocation solve_direct_power(const HopContext& link, double xi, const SolverConfig& cfg);

/// BER of the direct uplink at a fixed transmit power.
double direct_ber_at_fixed_power(double p_fixed_w, const HopContext& link);

/// Source power that spends the remaining budget xi - relay_hop_ber on the
/// Rayleigh source-to-relay hop.
double source_power_for_relay_ber(double relay_hop_ber, double xi, const HopContext& source_relay);

double source_power_given_relay_power(double p_relay_w, double xi, const HopContext& source_relay,
                                      const HopContext& relay_lap);

/// Total cooperative power X(P3) = P2(P3) + P3, and its derivative.
double total_power(double p_relay_w, double xi, const HopContext& source_relay,
                   const HopContext& relay_lap);
double total_power_slope(double p_relay_w, double xi, const HopContext& source_relay,
                         const HopContext& relay_lap);

/// Relay power at which the relay hop alone uses the whole budget.
/// Empty when p_max cannot bring the relay hop below xi.
std::optional<double> relay_power_floor(double xi, const HopContext& relay_lap, const SolverConfig& cfg);

struct RelayInterval {
    double lo = 0.0;
    double hi = 0.0;
    bool empty = true;
};

/// Relay powers for which both transmitters stay within p_max.
RelayInterval feasible_relay_interval(double xi, const HopContext& source_relay,
                                      const HopContext& relay_lap, const SolverConfig& cfg);

/// Minimizes total transmit power of a cooperative path under the BER budget.
PowerAllocation optimize_relay_allocation(double xi, const HopContext& source_relay,
                                          const HopContext& relay_lap, const SolverConfig& cfg);

}  // namespace lapcoop

#endif  // LAPCOOP_POWER_CONTROL_HPP
