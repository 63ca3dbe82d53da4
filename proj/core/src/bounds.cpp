/*
   Copyright 2026 The dbf Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include "dbf/bounds.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "dbf/channel.hpp"
#include "dbf/error.hpp"

namespace dbf {

namespace {

constexpr double kE = std::numbers::e;
constexpr double kInvSqrt2Pi = std::numbers::inv_sqrtpi / std::numbers::sqrt2;

// sqrt(pi/2)/e and sqrt(2(1 + ln 2)): per-source slopes of k1 and k2.
const double kAlignedSlope = std::sqrt(std::numbers::pi / 2.0) / kE;
const double kReverseSlope = std::sqrt(2.0 * (1.0 + std::numbers::ln2));

double normal_density(double x) noexcept
{
    return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

// Solves Q(x) = p for p in (0, 1/2); the root is positive.
double upper_tail_inverse(double p)
{
    double lo = 0.0;
    double hi = 38.0; // Q(38) is below the smallest normal double
    const double log_p = std::log(p);
    double x = std::sqrt(-2.0 * log_p) * 0.9; // rough tail guess, refined below
    if (!(x > lo && x < hi))
        x = 0.5 * (lo + hi);

    for (int iter = 0; iter < 200; ++iter) {
        const double q = q_function(x);
        if (q > p)
            lo = x;
        else
            hi = x;
        // Newton on log Q: d/dx log Q = -phi/Q
        const double phi = normal_density(x);
        double next = (q > 0.0 && phi > 0.0) ? x + (std::log(q) - log_p) * q / phi : 0.5 * (lo + hi);
        if (!(next > lo && next < hi))
            next = 0.5 * (lo + hi);
        const double step = std::fabs(next - x);
        x = next;
        if (step <= 4.0 * std::numeric_limits<double>::epsilon() * std::fmax(1.0, std::fabs(x)))
            break;
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::fmax(1.0, std::fabs(x)))
            break;
    }
    return x;
}

void check_fraction(double epsilon, const char* what)
{
    if (!std::isfinite(epsilon))
        throw DomainError(std::string(what) + ": epsilon must be finite");
}

} // namespace

double q_function(double v)
{
    return 0.5 * std::erfc(v / std::numbers::sqrt2);
}

double q_inverse(double p)
{
    if (!(p > 0.0 && p < 1.0))
        throw DomainError("q_inverse: probability must lie in (0, 1)");
    if (p == 0.5)
        return 0.0;
    // 1 - p is exact for p in [1/2, 1).
    if (p > 0.5)
        return -upper_tail_inverse(1.0 - p);
    return upper_tail_inverse(p);
}

double truncation_point(double epsilon)
{
    check_fraction(epsilon, "truncation_point");
    if (!(epsilon > 0.0 && epsilon <= 1.0))
        throw DomainError("truncation_point: epsilon must lie in (0, 1]");
    if (epsilon == 1.0)
        return std::numeric_limits<double>::infinity();
    return q_inverse((1.0 - epsilon) / 2.0);
}

double improvement_constant(double epsilon)
{
    check_fraction(epsilon, "improvement_constant");
    if (!(epsilon > 0.0 && epsilon <= 1.0))
        throw DomainError("improvement_constant: epsilon must lie in (0, 1]");
    if (epsilon == 1.0)
        return 2.0 * abs_moment();
    const double x = truncation_point(epsilon);
    return 2.0 * (-std::expm1(-0.5 * x * x) / epsilon) * abs_moment();
}

double sufficient_training_factor(double epsilon)
{
    check_fraction(epsilon, "sufficient_training_factor");
    if (!(epsilon > 0.0 && epsilon < 0.5))
        throw DomainError("sufficient_training_factor: epsilon must lie in (0, 1/2)");
    const double c = improvement_constant(epsilon);
    return (1.0 - 2.0 * epsilon) * std::exp(1.0 - epsilon) / (c * epsilon) * abs_moment();
}

double max_reverse_fraction() noexcept
{
    return 1.0 / (1.0 + kE * std::sqrt(4.0 / std::numbers::pi * (1.0 + std::numbers::ln2)));
}

BoundParams bound_params(int sources, const NetworkConfig& config)
{
    if (sources < 1)
        throw ConfigError("N", "must be >= 1");
    if (config.groups < 1)
        throw ConfigError("M", "must be >= 1");
    const double eps = config.reverse_fraction;
    if (!(eps >= 0.0))
        throw ConfigError("epsilon_o", "must be >= 0");
    if (!(eps < max_reverse_fraction()))
        throw InfeasibleEpsilonError("epsilon_o=" + std::to_string(eps) +
                                     " is not below the feasibility threshold " +
                                     std::to_string(max_reverse_fraction()));

    const double n = sources;
    const double root_n = std::sqrt(n);
    BoundParams out;
    out.sources = sources;
    out.groups = config.groups;
    out.reverse_fraction = eps;
    out.delta = config.delta;
    out.power = config.power;
    out.noise = config.noise;

    out.aligned_threshold = (1.0 - eps) * (n - root_n) * kAlignedSlope;
    out.reverse_threshold = kReverseSlope * (eps * n + root_n);
    const double noise_floor = n * config.noise / config.power;
    out.interference_threshold = (config.groups - 1) * std::pow(n, 1.0 + config.delta) + noise_floor;

    if (!(out.aligned_threshold > out.reverse_threshold))
        throw InfeasibleEpsilonError("k1 <= k2 at N=" + std::to_string(sources) + " for epsilon_o=" +
                                     std::to_string(eps));

    if (config.groups >= 2) {
        const double slope = (1.0 - eps) * kAlignedSlope - kReverseSlope * eps;
        out.rate_constant = slope * slope / (config.groups - 1);
    }
    const double gap = out.aligned_threshold - out.reverse_threshold;
    out.sinr_threshold = gap * gap / out.interference_threshold;
    return out;
}

DeviationTerms large_deviation_terms(const BoundParams& params)
{
    const double n = params.sources;
    const double eps = params.reverse_fraction;
    DeviationTerms t{};

    // P(sum_{i<=S} |h_i| < k) <= (e k / S * sqrt(2/pi))^S
    const double s_aligned = (1.0 - eps) * n;
    if (s_aligned > 0.0) {
        const double base = kE * params.aligned_threshold / s_aligned * abs_moment();
        t.aligned = base > 0.0 ? std::exp(s_aligned * std::log(base)) : 0.0;
    } else {
        t.aligned = 1.0;
    }

    // P(sum_{i<=S} |h_i| > k) <= (2 exp(-k^2 / (2 S^2)))^S; empty sum never exceeds k > 0
    const double s_reverse = eps * n;
    if (s_reverse > 0.0) {
        const double k = params.reverse_threshold;
        t.reverse = std::exp(s_reverse * (std::numbers::ln2 - k * k / (2.0 * s_reverse * s_reverse)));
    } else {
        t.reverse = 0.0;
    }

    if (params.groups >= 2) {
        const double m1 = params.groups - 1;
        const double excess = params.interference_threshold - n * params.noise / params.power;
        t.interference = 2.0 * m1 * std::exp(-excess / (2.0 * n * m1));
    } else {
        t.interference = 0.0;
    }
    return t;
}

double rate_for_sinr(double sinr)
{
    return 0.5 * std::log2(1.0 + sinr);
}

OutageBound outage_bound(int sources, const NetworkConfig& config)
{
    if (sources < kMinBoundSources)
        throw DomainError("outage_bound: needs N >= " + std::to_string(kMinBoundSources) + ", got " +
                          std::to_string(sources));
    OutageBound out;
    out.params = bound_params(sources, config);
    out.terms = large_deviation_terms(out.params);
    out.bound_finite = out.terms.aligned + out.terms.reverse + out.terms.interference;

    const double n = sources;
    const double root_n = std::sqrt(n);
    out.bound_asymptotic = std::exp(-root_n) + std::exp(-config.reverse_fraction * n - 2.0 * root_n) +
                           2.0 * (config.groups - 1) * std::exp(-0.5 * std::pow(n, config.delta));

    if (out.params.rate_constant)
        out.rate = rate_for_sinr(*out.params.rate_constant * std::pow(n, 1.0 - config.delta));
    else
        out.rate = rate_for_sinr(out.params.sinr_threshold);
    return out;
}

} // namespace dbf
