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

#include <span>
#include <string_view>
#include <vector>

#include "dbf/channel.hpp"
#include "dbf/config.hpp"
#include "dbf/random.hpp"

namespace dbf {

// Sequential training (one group per block, others silent) versus an
// overlapped variant where already-trained groups transmit data while later
// groups train. Overlap adds interference to the level estimate, so frames
// must be longer to keep the same estimation variance.

enum class InterferenceSource { monte_carlo, analytic };

std::string_view to_string(InterferenceSource source) noexcept;

struct ProtocolReport {
    int groups = 0;
    int sources = 0;
    double rate = 0.0;              ///< bits per slot of each trained link
    double sigma_i2 = 0.0;          ///< interference power at the training destination
    InterferenceSource sigma_source = InterferenceSource::analytic;
    double frame_ratio = 1.0;       ///< T_f^I / T_f
    double condition_lhs = 0.0;     ///< sigma_I^2 / N_o
    double condition_rhs = 0.0;     ///< 1 - 2/(M+1)
    bool modified_better = false;   ///< condition_lhs < condition_rhs
    double bits_modified = 0.0;     ///< R k_o N T_f^I M(M-1)/2
    double bits_original = 0.0;     ///< R k_o M^2 N (T_f^I - T_f)
};

/// (P/N) Sum_{r < link} |Sum_j h[link][r][j] w_r[j]|^2. `trained` holds the
/// weights of groups 0..link-1 (extra entries are ignored).
double interference_power(const ChannelRealization& channels, std::span<const Weights> trained, int link,
                          const NetworkConfig& config);

/// Proxy link * P for 0-based `link`: each earlier group contributes about P.
double analytic_interference_power(int link, const NetworkConfig& config);

/// Mean interference power seen by each link (index = 0-based link) over
/// config.trials channel draws with trained weights.
std::vector<double> estimate_interference_power(const NetworkConfig& config, const RandomStream& stream,
                                                int workers = 1);

/// 1 + sigma_I^2 / N_o.
double frame_ratio(double sigma_i2, double noise);

/// Evaluates both throughput expressions and the closed-form condition.
/// Requires M >= 2 and rate > 0.
ProtocolReport compare_protocols(double sigma_i2, const NetworkConfig& config, double rate,
                                 InterferenceSource source = InterferenceSource::analytic);

} // namespace dbf
