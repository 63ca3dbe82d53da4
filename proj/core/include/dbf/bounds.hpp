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

#pragma once

#include <optional>

#include "dbf/config.hpp"

namespace dbf {

/// Gaussian tail probability Q(v) = P(Z > v), Z ~ N(0, 1).
double q_function(double v);

/// Inverse of q_function on (0, 1), by safeguarded Newton iteration on Q.
/// Throws DomainError outside (0, 1).
double q_inverse(double p);

/// Truncation point x with P(|h| <= x) = epsilon, i.e. Q^{-1}((1 - epsilon)/2).
/// Returns +inf for epsilon = 1.
double truncation_point(double epsilon);

/// Twice the smallest possible mean of |h| restricted to a set that holds an
/// `epsilon` fraction of the probability mass. Lower-bounds the expected
/// per-source gain improvement when a reverse-aligned source is flipped.
///
///   c(eps) = 2 * (1 - exp(-x^2/2)) / eps * sqrt(2/pi),  x = truncation_point(eps)
///
/// Domain (0, 1]; c(1) = 2 sqrt(2/pi).
double improvement_constant(double epsilon);

/// Training frames per source (k_o) that suffice for an expected gain of at
/// least N(1 - 2 eps) E|h|; independent of N. Domain (0, 1/2).
double sufficient_training_factor(double epsilon);

/// Largest reverse-aligned fraction for which the outage bound is usable:
/// 1 / (1 + e * sqrt((4/pi)(1 + ln 2))) ~= 0.20035.
double max_reverse_fraction() noexcept;

/// Thresholds of the union bound on link outage.
struct BoundParams {
    int sources = 0;                     ///< N
    int groups = 0;                      ///< M
    double reverse_fraction = 0.0;       ///< epsilon_o
    double delta = 0.0;
    double power = 0.0;                  ///< P
    double noise = 0.0;                  ///< N_o

    double aligned_threshold = 0.0;      ///< k1 = (1-eps)(N - sqrt N)/e * sqrt(pi/2)
    double reverse_threshold = 0.0;      ///< k2 = sqrt(2(1+ln 2)) (eps N + sqrt N)
    double interference_threshold = 0.0; ///< k3 = (M-1) N^(1+delta) + N N_o/P
    /// c_1 = ((1-eps) sqrt(pi/2)/e - sqrt(2(1+ln 2)) eps)^2 / (M-1); empty for M = 1.
    std::optional<double> rate_constant;
    /// (k1 - k2)^2 / k3, the exact finite-N SINR threshold covered by the bound.
    double sinr_threshold = 0.0;
};

/// Throws InfeasibleEpsilonError when epsilon_o >= max_reverse_fraction() or k1 <= k2.
BoundParams bound_params(int sources, const NetworkConfig& config);

/// The three large-deviation terms of the outage bound.
struct DeviationTerms {
    double aligned;      ///< P(sum over aligned |h| < k1) bound
    double reverse;      ///< P(sum over reverse-aligned |h| > k2) bound
    double interference; ///< 2(M-1) exp(-(k3 - N N_o/P) / (2N(M-1))); 0 for M = 1
};

DeviationTerms large_deviation_terms(const BoundParams& params);

struct OutageBound {
    BoundParams params;
    DeviationTerms terms;
    double rate;             ///< bits per slot, (1/2) log2(1 + c_1 N^(1-delta)); M = 1 uses the SINR threshold
    double bound_finite;     ///< sum of the three terms
    double bound_asymptotic; ///< e^{-sqrt N} + e^{-eps N - 2 sqrt N} + 2(M-1) e^{-N^delta/2}
};

inline constexpr int kMinBoundSources = 25;

/// Assembles the outage bound for N sources; requires N >= kMinBoundSources.
OutageBound outage_bound(int sources, const NetworkConfig& config);

/// (1/2) log2(1 + sinr), the Gaussian-codebook rate in bits per real slot.
double rate_for_sinr(double sinr);

} // namespace dbf
