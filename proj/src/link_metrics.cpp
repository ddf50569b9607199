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

#include "lapcoop/link_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lapcoop {
namespace {

double clamp_probability(double p) noexcept {
    if (std::isnan(p)) return 0.5;
    return std::clamp(p, 0.0, 0.5);
}

}  // namespace

double snr(double ptx_w, const LinkSpec& spec, double composite_gain) noexcept {
    return ptx_w * spec.tx_gain * spec.rx_gain * composite_gain / spec.noise_power_w;
}

double ber_rayleigh_bpsk(double g) noexcept {
    if (!(g > 0.0)) return 0.5;
    if (std::isinf(g)) return 0.0;
    // 1 - sqrt(x) = (1 - x) / (1 + sqrt(x)) with 1 - x = 1 / (1 + g); avoids
    // cancellation at high SNR.
    const double root = std::sqrt(g / (1.0 + g));
    return clamp_probability(0.5 / ((1.0 + g) * (1.0 + root)));
}

double ber_rayleigh_bpsk(const SnrContext& ctx) {
    if (ctx.rice_factor_lin) throw std::invalid_argument("ber_rayleigh_bpsk: Ricean context");
    return ber_rayleigh_bpsk(ctx.mean_snr);
}

double ber_rician_dpsk(double g, double k) noexcept {
    if (!(g > 0.0)) return 0.5;
    if (std::isinf(g)) return 0.0;
    const double d = 1.0 + k + g;
    return clamp_probability((1.0 + k) / (2.0 * d) * std::exp(-k * g / d));
}

double ber_rician_dpsk(const SnrContext& ctx) {
    if (!ctx.rice_factor_lin) throw std::invalid_argument("ber_rician_dpsk: missing Rice factor");
    return ber_rician_dpsk(ctx.mean_snr, *ctx.rice_factor_lin);
}

double ber(const SnrContext& ctx) noexcept {
    return ctx.rice_factor_lin ? ber_rician_dpsk(ctx.mean_snr, *ctx.rice_factor_lin)
                               : ber_rayleigh_bpsk(ctx.mean_snr);
}

double ber_rayleigh_bpsk_slope(double g) noexcept {
    if (!(g > 0.0)) return -std::numeric_limits<double>::infinity();
    return -0.25 / (std::sqrt(g) * std::pow(1.0 + g, 1.5));
}

double ber_rician_dpsk_slope(double g, double k) noexcept {
    const double d = 1.0 + k + std::max(g, 0.0);
    const double v1 = (1.0 + k) / (2.0 * d);
    const double v2 = std::exp(-k * std::max(g, 0.0) / d);
    return -v1 * v2 * (1.0 + 2.0 * k * v1) / d;
}

double ber_relay_combined(double p1, double p2, CombineMode mode) noexcept {
    if (mode == CombineMode::approx) return clamp_probability(p1 + p2);
    return clamp_probability(p2 * (1.0 - p1) + p1 * (1.0 - p2));
}

}  // namespace lapcoop
