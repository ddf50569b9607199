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

#include "lapcoop/power_control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "lapcoop/errors.hpp"
#include "lapcoop/link_metrics.hpp"

namespace lapcoop {
namespace {

// Offset from the relay floor, where P2 diverges.
constexpr double kFloorMargin = 1e-6;

void check_target(double xi) {
    if (!(xi > 0.0 && xi < 0.5)) throw std::invalid_argument("BER target must lie in (0, 0.5)");
}

/// Largest p in [lo, hi] with f(p) true, for f monotone true-then-false.
/// Bisects to relative machine precision.
template <typename Pred>
double bisect_boundary(double lo, double hi, Pred f, int max_iterations) {
    for (int i = 0; i < max_iterations; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (f(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
    }
    return hi;
}

// Budget left for the first hop; 1 - lambda = 2u.
double first_hop_budget(double xi, double relay_hop_ber) { return xi - relay_hop_ber; }

double solve_direct_bracketed(const HopContext& link, double xi, const SolverConfig& cfg) {
    // BER is strictly decreasing in P: the root is the smallest P with BER <= xi.
    return bisect_boundary(0.0, cfg.p_max_w, [&](double p) { return link.ber(p) > xi; },
                           cfg.max_iterations);
}

double solve_direct_gradient(const HopContext& link, double xi, const SolverConfig& cfg) {
    // Gradient descent on F(P) = 0.5 r^2, r = (BER(P) - xi) / xi.
    auto residual = [&](double p) { return (link.ber(p) - xi) / xi; };
    double p = 0.5 * cfg.p_max_w;
    double r = residual(p);
    double step = cfg.step_size_direct;
    const bool line_search = !(step > 0.0);
    for (int it = 0; it < cfg.max_iterations; ++it) {
        if (std::abs(r) < 1e-12) return p;
        const double g = r * link.ber_slope(p) / xi;
        if (g == 0.0) return p;
        double next = p;
        double r_next = r;
        if (line_search) {
            double eps = step > 0.0 ? 2.0 * step : 0.5 * cfg.p_max_w / std::abs(g);
            for (int k = 0; k < 200; ++k, eps *= 0.5) {
                next = std::min(p - eps * g, cfg.p_max_w);
                if (!(next > 0.0)) continue;
                r_next = residual(next);
                if (0.5 * r_next * r_next <= 0.5 * r * r + 0.5 * g * (next - p)) break;
            }
            step = eps;
        } else {
            next = std::clamp(p - step * g, std::numeric_limits<double>::min(), cfg.p_max_w);
            r_next = residual(next);
        }
        if (std::abs(next - p) <= 1e-15 * p) {
            if (std::abs(r_next) <= cfg.ber_tolerance) return next;
            break;
        }
        p = next;
        r = r_next;
    }
    throw SolverFailure("solve_direct_power: gradient iteration did not converge", p);
}

double golden_section(double a, double b, const auto& f, int max_iterations) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    for (int i = 0; i < max_iterations && (b - a) > 1e-13 * std::max(1.0, b); ++i) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

double relay_gradient(double lo, double hi, const auto& x, const auto& slope, const SolverConfig& cfg) {
    double p = 0.5 * (lo + hi);
    double fx = x(p);
    double step = cfg.step_size_relay;
    const bool line_search = !(step > 0.0);
    for (int it = 0; it < cfg.max_iterations; ++it) {
        const double g = slope(p);
        double next = p;
        double f_next = fx;
        if (line_search) {
            double eps = step > 0.0 ? 2.0 * step : (hi - lo) / std::max(std::abs(g), 1e-300);
            for (int k = 0; k < 400; ++k, eps *= 0.5) {
                next = std::clamp(p - eps * g, lo, hi);
                f_next = x(next);
                if (f_next <= fx + 0.5 * g * (next - p)) break;
            }
            step = eps;
        } else {
            next = std::clamp(p - step * g, lo, hi);
            f_next = x(next);
        }
        if (std::abs(next - p) <= 1e-13 * std::max(p, 1e-300)) return next;
        p = next;
        fx = f_next;
    }
    throw SolverFailure("optimize_relay_allocation: gradient iteration did not converge", p);
}

}  // namespace

std::vector<std::string> SolverConfig::violations() const {
    std::vector<std::string> out;
    if (!(power_tolerance_w > 0.0)) out.emplace_back("power_tolerance_w must be > 0");
    if (!(ber_tolerance > 0.0)) out.emplace_back("ber_tolerance must be > 0");
    if (!(p_max_w > 0.0)) out.emplace_back("p_max_w must be > 0");
    if (max_iterations < 1) out.emplace_back("max_iterations must be >= 1");
    if (step_size_direct < 0.0 || step_size_relay < 0.0) out.emplace_back("step sizes must be >= 0");
    return out;
}

HopContext HopContext::from_link(const LinkSpec& spec, double composite_gain) {
    return HopContext{lapcoop::snr(1.0, spec, composite_gain), spec.rice_factor_linear()};
}

double HopContext::ber(double p_w) const noexcept {
    return rice_factor ? ber_rician_dpsk(snr(p_w), *rice_factor) : ber_rayleigh_bpsk(snr(p_w));
}

double HopContext::ber_slope(double p_w) const noexcept {
    const double d = rice_factor ? ber_rician_dpsk_slope(snr(p_w), *rice_factor)
                                 : ber_rayleigh_bpsk_slope(snr(p_w));
    return d * snr_per_watt;
}

PowerAllocation solve_direct_power(const HopContext& link, double xi, const SolverConfig& cfg) {
    check_target(xi);
    const double at_cap = link.ber(cfg.p_max_w);
    if (at_cap > xi) return PowerAllocation{cfg.p_max_w, std::nullopt, at_cap, false};
    const double p = cfg.method == SolverMethod::gradient ? solve_direct_gradient(link, xi, cfg)
                                                          : solve_direct_bracketed(link, xi, cfg);
    return PowerAllocation{p, std::nullopt, link.ber(p), true};
}

double direct_ber_at_fixed_power(double p_fixed_w, const HopContext& link) {
    if (!(p_fixed_w > 0.0)) throw std::invalid_argument("direct_ber_at_fixed_power: power must be > 0");
    return link.ber(p_fixed_w);
}

double source_power_for_relay_ber(double relay_hop_ber, double xi, const HopContext& source_relay) {
    check_target(xi);
    if (source_relay.rice_factor) {
        throw std::invalid_argument("source-to-relay hop must be a Rayleigh link");
    }
    const double u = first_hop_budget(xi, relay_hop_ber);
    if (!(u > 0.0)) {
        throw InfeasibleRelayPower("relay hop BER meets or exceeds the target (lambda >= 1)");
    }
    // lambda = sqrt(G2 / (1 + G2)) = 1 - 2u, so G2 = lambda^2 / (1 - lambda^2)
    // with 1 - lambda^2 = 4u(1 - u).
    const double lambda = 1.0 - 2.0 * u;
    const double g2 = lambda * lambda / (4.0 * u * (1.0 - u));
    return g2 / source_relay.snr_per_watt;
}

double source_power_given_relay_power(double p_relay_w, double xi, const HopContext& source_relay,
                                      const HopContext& relay_lap) {
    return source_power_for_relay_ber(relay_lap.ber(p_relay_w), xi, source_relay);
}

double total_power(double p_relay_w, double xi, const HopContext& source_relay,
                   const HopContext& relay_lap) {
    return source_power_given_relay_power(p_relay_w, xi, source_relay, relay_lap) + p_relay_w;
}

double total_power_slope(double p_relay_w, double xi, const HopContext& source_relay,
                         const HopContext& relay_lap) {
    check_target(xi);
    const double u = first_hop_budget(xi, relay_lap.ber(p_relay_w));
    if (!(u > 0.0)) {
        throw InfeasibleRelayPower("relay hop BER meets or exceeds the target (lambda >= 1)");
    }
    const double lambda = 1.0 - 2.0 * u;
    const double one_minus_l2 = 4.0 * u * (1.0 - u);
    // dP2/dlambda * dlambda/dP3 with dlambda/dP3 = 2 dPi2/dP3.
    const double dp2_dlambda = 2.0 * lambda / (one_minus_l2 * one_minus_l2) / source_relay.snr_per_watt;
    return 1.0 + dp2_dlambda * 2.0 * relay_lap.ber_slope(p_relay_w);
}

std::optional<double> relay_power_floor(double xi, const HopContext& relay_lap, const SolverConfig& cfg) {
    check_target(xi);
    if (!(relay_lap.ber(cfg.p_max_w) < xi)) return std::nullopt;
    return bisect_boundary(0.0, cfg.p_max_w, [&](double p) { return relay_lap.ber(p) >= xi; },
                           cfg.max_iterations);
}

RelayInterval feasible_relay_interval(double xi, const HopContext& source_relay,
                                      const HopContext& relay_lap, const SolverConfig& cfg) {
    const auto floor = relay_power_floor(xi, relay_lap, cfg);
    if (!floor) return {};
    double lo = *floor * (1.0 + kFloorMargin);
    const double hi = cfg.p_max_w;
    if (!(lo < hi)) return {};
    auto p2 = [&](double p3) { return source_power_given_relay_power(p3, xi, source_relay, relay_lap); };
    if (p2(hi) > cfg.p_max_w) return {};
    if (p2(lo) > cfg.p_max_w) {
        lo = bisect_boundary(lo, hi, [&](double p3) { return p2(p3) > cfg.p_max_w; }, cfg.max_iterations);
    }
    return RelayInterval{lo, hi, false};
}

PowerAllocation optimize_relay_allocation(double xi, const HopContext& source_relay,
                                          const HopContext& relay_lap, const SolverConfig& cfg) {
    check_target(xi);
    const RelayInterval interval = feasible_relay_interval(xi, source_relay, relay_lap, cfg);
    if (interval.empty) {
        return PowerAllocation{cfg.p_max_w, cfg.p_max_w, 0.5, false};
    }
    auto x = [&](double p3) { return total_power(p3, xi, source_relay, relay_lap); };
    auto slope = [&](double p3) { return total_power_slope(p3, xi, source_relay, relay_lap); };

    double p3 = 0.0;
    if (cfg.method == SolverMethod::gradient) {
        p3 = relay_gradient(interval.lo, interval.hi, x, slope, cfg);
    } else {
        p3 = golden_section(interval.lo, interval.hi, x, cfg.max_iterations);
        if (x(interval.hi) < x(p3)) p3 = interval.hi;
        if (x(interval.lo) < x(p3)) p3 = interval.lo;
    }
    const double p2 = source_power_given_relay_power(p3, xi, source_relay, relay_lap);
    const double achieved =
        ber_relay_combined(source_relay.ber(p2), relay_lap.ber(p3), CombineMode::approx);
    return PowerAllocation{p2, p3, achieved, true};
}

}  // namespace lapcoop
