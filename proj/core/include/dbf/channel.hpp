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

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "dbf/config.hpp"
#include "dbf/random.hpp"

namespace dbf {

/// A beamforming weight, always -1 or +1.
using Sign = std::int8_t;
using Weights = std::vector<Sign>;

/// sign(x) with sign(0) = +1.
constexpr Sign sign_of(double x) noexcept { return x < 0.0 ? Sign{-1} : Sign{1}; }

/// Sum_j h_j * w_j.
double combined_gain(std::span<const double> h, std::span<const Sign> w);

/// Number of sources with h_j * w_j > 0.
int aligned_count(std::span<const double> h, std::span<const Sign> w);

/// Sum_j |h_j|, the gain of the beamforming configuration w = sign(h).
double coherent_gain(std::span<const double> h) noexcept;

/// Real fading coefficients h[i][r][j] from source j of group r to destination i.
///
/// Stored destination-major so each link vector h[i][r][.] is contiguous.
class ChannelRealization {
public:
    ChannelRealization() = default;
    ChannelRealization(int groups, int sources);
    ChannelRealization(int groups, int sources, std::vector<double> values);

    int groups() const noexcept { return groups_; }
    int sources() const noexcept { return sources_; }

    double& at(int destination, int group, int source);
    double at(int destination, int group, int source) const;

    /// Coefficients from group `group` to destination `destination`.
    std::span<double> link(int destination, int group);
    std::span<const double> link(int destination, int group) const;

    std::span<const double> values() const noexcept { return values_; }

    /// Throws DimensionError if the shape does not match `config`.
    void check_matches(const NetworkConfig& config) const;

    bool operator==(const ChannelRealization&) const = default;

private:
    std::size_t offset(int destination, int group, int source) const;

    int groups_ = 0;
    int sources_ = 0;
    std::vector<double> values_;
};

/// Draws every coefficient i.i.d. N(0, 1) from `stream`.
ChannelRealization generate_channels(const NetworkConfig& config, RandomStream& stream);

/// E|h| = sqrt(2/pi) for h ~ N(0, 1).
constexpr double abs_moment() noexcept { return std::numbers::sqrt2 * std::numbers::inv_sqrtpi; }

} // namespace dbf
