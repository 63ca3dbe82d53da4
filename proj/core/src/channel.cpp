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

#include "dbf/channel.hpp"

#include <cmath>
#include <string>

#include "dbf/error.hpp"

namespace dbf {

double combined_gain(std::span<const double> h, std::span<const Sign> w)
{
    if (h.size() != w.size())
        throw DimensionError("combined_gain: channel has " + std::to_string(h.size()) + " entries, weights " +
                             std::to_string(w.size()));
    double sum = 0.0;
    for (std::size_t j = 0; j < h.size(); ++j)
        sum += w[j] < 0 ? -h[j] : h[j];
    return sum;
}

int aligned_count(std::span<const double> h, std::span<const Sign> w)
{
    if (h.size() != w.size())
        throw DimensionError("aligned_count: length mismatch");
    int count = 0;
    for (std::size_t j = 0; j < h.size(); ++j)
        count += (h[j] * w[j] > 0.0) ? 1 : 0;
    return count;
}

double coherent_gain(std::span<const double> h) noexcept
{
    double sum = 0.0;
    for (double x : h)
        sum += std::fabs(x);
    return sum;
}

ChannelRealization::ChannelRealization(int groups, int sources)
    : ChannelRealization(groups, sources,
                         std::vector<double>(static_cast<std::size_t>(groups > 0 ? groups : 0) *
                                             (groups > 0 ? groups : 0) * (sources > 0 ? sources : 0)))
{
}

ChannelRealization::ChannelRealization(int groups, int sources, std::vector<double> values)
    : groups_(groups), sources_(sources), values_(std::move(values))
{
    if (groups < 1 || sources < 1)
        throw DimensionError("channel realization needs at least one group and one source");
    if (values_.size() != static_cast<std::size_t>(groups) * groups * sources)
        throw DimensionError("channel realization expects M*M*N = " +
                             std::to_string(static_cast<std::size_t>(groups) * groups * sources) + " values, got " +
                             std::to_string(values_.size()));
    for (double v : values_)
        if (!std::isfinite(v))
            throw DimensionError("channel realization contains a non-finite coefficient");
}

std::size_t ChannelRealization::offset(int destination, int group, int source) const
{
    if (destination < 0 || destination >= groups_ || group < 0 || group >= groups_ || source < 0 ||
        source >= sources_)
        throw DimensionError("channel index out of range");
    return (static_cast<std::size_t>(destination) * groups_ + group) * sources_ + source;
}

double& ChannelRealization::at(int destination, int group, int source)
{
    return values_[offset(destination, group, source)];
}

double ChannelRealization::at(int destination, int group, int source) const
{
    return values_[offset(destination, group, source)];
}

std::span<double> ChannelRealization::link(int destination, int group)
{
    return {values_.data() + offset(destination, group, 0), static_cast<std::size_t>(sources_)};
}

std::span<const double> ChannelRealization::link(int destination, int group) const
{
    return {values_.data() + offset(destination, group, 0), static_cast<std::size_t>(sources_)};
}

void ChannelRealization::check_matches(const NetworkConfig& config) const
{
    if (groups_ != config.groups || sources_ != config.sources)
        throw DimensionError("channel realization is " + std::to_string(groups_) + "x" + std::to_string(groups_) +
                             "x" + std::to_string(sources_) + " but the configuration has M=" +
                             std::to_string(config.groups) + ", N=" + std::to_string(config.sources));
}

ChannelRealization generate_channels(const NetworkConfig& config, RandomStream& stream)
{
    if (config.groups < 1)
        throw ConfigError("M", "must be >= 1");
    if (config.sources < 1)
        throw ConfigError("N", "must be >= 1");
    std::vector<double> values(static_cast<std::size_t>(config.groups) * config.groups * config.sources);
    for (double& v : values)
        v = stream.normal();
    return ChannelRealization(config.groups, config.sources, std::move(values));
}

} // namespace dbf
