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

#ifndef LAPCOOP_LINK_METRICS_HPP
#define LAPCOOP_LINK_METRICS_HPP

#include <optional>

#include "lapcoop/channel.hpp"

namespace lapcoop {

/// Mean received SNR of a link and, for Ricean links, its linear Rice factor.
struct SnrContext {
    double mean_snr = 0.0;
    std::optional<double> rice_factor_lin;
};

enum class CombineMode { exact, approx };

/// Gamma = P_t G_t G_r (gamma/L) / noise, linear.
double snr(double ptx_w, const LinkSpec& spec, double composite_gain) noexcept;

/// Coherent BPSK over Rayleigh fading, 0.5 (1 - sqrt(G / (1 + G))).
double ber_rayleigh_bpsk(double mean_snr) noexcept;
double ber_rayleigh_bpsk(const SnrContext& ctx);

/// Differential PSK over Ricean fading.
double ber_rician_dpsk(double mean_snr, double rice_factor) noexcept;
double ber_rician_dpsk(const SnrContext& ctx);

/// Dispatches on the presence of a Rice factor.
double ber(const SnrContext& ctx) noexcept;

/// d(BER)/d(Gamma) of the two models.
double ber_rayleigh_bpsk_slope(double mean_snr) noexcept;
double ber_rician_dpsk_slope(double mean_snr, double rice_factor) noexcept;

/// End-to-end BER of two decode-and-forward hops.
double ber_relay_combined(double p1, double p2, CombineMode mode = CombineMode::exact) noexcept;

}  // namespace lapcoop

#endif  // LAPCOOP_LINK_METRICS_HPP
