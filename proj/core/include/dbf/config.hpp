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
#include <string_view>

namespace dbf {

/// How the destination measures the received signal level of a frame.
enum class EstimationMode {
    perfect, ///< exact level, as assumed by the convergence analysis
    noisy,   ///< frame average of T_f noisy slots: Gaussian error of variance N_o/T_f
};

std::string_view to_string(EstimationMode mode) noexcept;
std::optional<EstimationMode> parse_estimation_mode(std::string_view text) noexcept;

/// All parameters of one network scenario.
///
/// JSON/CLI names are given in brackets; they follow the usual notation of
/// the interference-network model (M groups of N single-antenna sources).
struct NetworkConfig {
    int groups = 1;                  ///< [M] number of source groups / destinations
    int sources = 1;                 ///< [N] sources per group
    double power = 1.0;              ///< [P] average transmit power per group (linear)
    double noise = 1.0;              ///< [N_o] noise variance per slot (linear)
    int frame_slots = 1;             ///< [T_f] slots per frame
    double training_factor = 1.0;    ///< [k_o] training frames per group, divided by N
    double reverse_fraction = 0.0;   ///< [epsilon_o] target reverse-aligned fraction
    double delta = 0.5;              ///< [delta] exponent slack of the outage bound
    std::uint64_t seed = 0;          ///< [seed]
    EstimationMode estimation = EstimationMode::perfect; ///< [estimation_mode]
    std::int64_t trials = 1;         ///< [trials] Monte Carlo repetitions

    /// Throws ConfigError naming the first invalid field.
    void validate() const;

    /// Frames in one group's training block, k_o*N rounded to the nearest
    /// integer (at least 1). Frame 0 is initialization.
    std::int64_t training_frames() const noexcept;

    /// epsilon_o*N rounded to the nearest integer count of sources.
    int reverse_count() const noexcept;

    /// Pilot amplitude sqrt(P/N) sent by each source during training.
    double pilot_amplitude() const noexcept;

    /// Variance N_o/T_f of the frame-averaged level estimate.
    double estimation_variance() const noexcept;

    bool operator==(const NetworkConfig&) const = default;
};

} // namespace dbf
