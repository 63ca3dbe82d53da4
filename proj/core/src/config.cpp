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

#include "dbf/config.hpp"

#include <algorithm>
#include <cmath>

#include "dbf/error.hpp"

namespace dbf {

std::string_view to_string(EstimationMode mode) noexcept
{
    return mode == EstimationMode::perfect ? "perfect" : "noisy";
}

std::optional<EstimationMode> parse_estimation_mode(std::string_view text) noexcept
{
    if (text == "perfect")
        return EstimationMode::perfect;
    if (text == "noisy")
        return EstimationMode::noisy;
    return std::nullopt;
}

void NetworkConfig::validate() const
{
    if (groups < 1)
        throw ConfigError("M", "must be >= 1");
    if (sources < 1)
        throw ConfigError("N", "must be >= 1");
    if (!(power > 0.0) || !std::isfinite(power))
        throw ConfigError("P", "must be a finite value > 0");
    if (!(noise > 0.0) || !std::isfinite(noise))
        throw ConfigError("N_o", "must be a finite value > 0");
    if (frame_slots < 1)
        throw ConfigError("T_f", "must be >= 1");
    if (!(training_factor > 0.0) || !std::isfinite(training_factor))
        throw ConfigError("k_o", "must be a finite value > 0");
    if (!(reverse_fraction >= 0.0) || !(reverse_fraction <= 1.0))
        throw ConfigError("epsilon_o", "must lie in [0, 1]");
    if (!(delta > 0.0) || !std::isfinite(delta))
        throw ConfigError("delta", "must be a finite value > 0");
    if (trials < 1)
        throw ConfigError("trials", "must be >= 1");
}

std::int64_t NetworkConfig::training_frames() const noexcept
{
    return std::max<std::int64_t>(1, std::llround(training_factor * sources));
}

int NetworkConfig::reverse_count() const noexcept
{
    return static_cast<int>(std::lround(reverse_fraction * sources));
}

double NetworkConfig::pilot_amplitude() const noexcept
{
    return std::sqrt(power / sources);
}

double NetworkConfig::estimation_variance() const noexcept
{
    return noise / frame_slots;
}

} // namespace dbf
