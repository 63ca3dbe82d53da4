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

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "dbf/channel.hpp"
#include "dbf/config.hpp"
#include "dbf/random.hpp"

namespace dbf {

/// Where the data-phase weights come from.
enum class WeightsMode {
    trained,   ///< output of the training blocks
    idealized, ///< sign(h) with exactly round(eps N) uniformly chosen sources flipped
};

std::string_view to_string(WeightsMode mode) noexcept;
std::optional<WeightsMode> parse_weights_mode(std::string_view text) noexcept;

/// SINR of link `link` (0-based) during data transmission:
///
///   (P/N) (Sum_j h[i][i][j] w_i[j])^2 / (Sum_{r != i} (P/N) (Sum_j h[i][r][j] w_r[j])^2 + N_o)
double sinr(const ChannelRealization& channels, std::span<const Weights> weights, int link,
            const NetworkConfig& config);

/// sign(h) with exactly `reverse` distinct, uniformly chosen entries negated.
Weights idealized_weights(std::span<const double> h, int reverse, RandomStream& stream);

struct OutageOptions {
    int workers = 1;
    bool all_links = false; ///< also estimate outage of every link, not only link 0
};

struct OutageResult {
    int sources = 0;
    int groups = 0;
    double reverse_fraction = 0.0;
    double delta = 0.0;
    double rate = 0.0;              ///< bits per slot
    std::int64_t trials = 0;
    std::int64_t outages = 0;       ///< link 0
    double outage_empirical = 0.0;
    double standard_error = 0.0;    ///< sqrt(p(1-p)/trials)
    std::optional<double> bound_finite;     ///< absent when the bound does not apply
    std::optional<double> bound_asymptotic;
    WeightsMode mode = WeightsMode::idealized;

    std::vector<double> per_link;   ///< filled when OutageOptions::all_links is set
    /// Mean reverse-aligned fraction of link 0's weights over trials.
    double mean_reverse_fraction = 0.0;
    /// Trials whose link-0 reverse-aligned fraction was <= epsilon_o.
    std::int64_t trials_within_target = 0;
};

/// Monte Carlo outage of link 0 at `rate` over config.trials independent
/// channel draws. Trial t uses stream.derive("trial", t), so results do not
/// depend on the worker count.
OutageResult estimate_outage(const NetworkConfig& config, double rate, WeightsMode mode, const RandomStream& stream,
                             OutageOptions options = {});

struct InterferenceRow {
    int sources = 0;
    std::int64_t trials = 0;
    double mean_trained = 0.0;    ///< E|Sum_j h_cross_j * w_j|^2 with trained w
    double se_trained = 0.0;
    double mean_control = 0.0;    ///< same with w = +1
    double se_control = 0.0;
    double product_mean = 0.0;    ///< mean of individual products h_cross_j * w_j
    double product_se = 0.0;
};

struct InterferenceProbe {
    std::vector<InterferenceRow> rows;
    double slope = 0.0;           ///< least-squares slope of log mean_trained vs log N
    double control_slope = 0.0;
};

/// For each N: trains one group on its own link and measures the power its
/// weights deliver through an independent cross link.
InterferenceProbe interference_scaling_probe(const NetworkConfig& config, std::span<const int> source_counts,
                                             const RandomStream& stream, int workers = 1);

/// Least-squares slope of log(y) against log(x).
double log_log_slope(std::span<const double> x, std::span<const double> y);

} // namespace dbf
