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

#include "dbf/protocol.hpp"

#include <cmath>
#include <string>

#include "dbf/beamforming.hpp"
#include "dbf/error.hpp"
#include "dbf/parallel.hpp"

namespace dbf {

std::string_view to_string(InterferenceSource source) noexcept
{
    return source == InterferenceSource::monte_carlo ? "monte_carlo" : "analytic";
}

double interference_power(const ChannelRealization& channels, std::span<const Weights> trained, int link,
                          const NetworkConfig& config)
{
    channels.check_matches(config);
    if (link < 0 || link >= config.groups)
        throw DimensionError("interference_power: link index out of range");
    if (trained.size() < static_cast<std::size_t>(link))
        throw StateError("interference_power: link " + std::to_string(link) + " needs weights of " +
                         std::to_string(link) + " earlier groups, got " + std::to_string(trained.size()));
    double sum = 0.0;
    for (int r = 0; r < link; ++r) {
        const double g = combined_gain(channels.link(link, r), trained[static_cast<std::size_t>(r)]);
        sum += g * g;
    }
    return config.power / config.sources * sum;
}

double analytic_interference_power(int link, const NetworkConfig& config)
{
    if (link < 0)
        throw DimensionError("analytic_interference_power: link index out of range");
    return link * config.power;
}

std::vector<double> estimate_interference_power(const NetworkConfig& config, const RandomStream& stream, int workers)
{
    config.validate();
    const auto groups = static_cast<std::size_t>(config.groups);
    const auto trials = config.trials;
    std::vector<double> samples(static_cast<std::size_t>(trials) * groups, 0.0);

    parallel_for(trials, workers, [&](std::int64_t t) {
        const RandomStream trial = stream.derive("trial", static_cast<std::uint64_t>(t));
        RandomStream channel_stream = trial.derive("channels");
        const ChannelRealization channels = generate_channels(config, channel_stream);
        const auto trained = train_network(channels, config, trial.derive("training"), TraceOptions{0});
        for (std::size_t i = 0; i < groups; ++i)
            samples[static_cast<std::size_t>(t) * groups + i] =
                interference_power(channels, trained.weights, static_cast<int>(i), config);
    });

    std::vector<double> mean(groups, 0.0);
    for (std::int64_t t = 0; t < trials; ++t)
        for (std::size_t i = 0; i < groups; ++i)
            mean[i] += samples[static_cast<std::size_t>(t) * groups + i];
    for (double& m : mean)
        m /= static_cast<double>(trials);
    return mean;
}

double frame_ratio(double sigma_i2, double noise)
{
    if (!(noise > 0.0))
        throw DomainError("frame_ratio: noise variance must be > 0");
    if (!(sigma_i2 >= 0.0))
        throw DomainError("frame_ratio: interference power must be >= 0");
    return 1.0 + sigma_i2 / noise;
}

ProtocolReport compare_protocols(double sigma_i2, const NetworkConfig& config, double rate, InterferenceSource source)
{
    if (config.groups < 2)
        throw DomainError("compare_protocols: needs M >= 2");
    if (!(rate > 0.0))
        throw DomainError("compare_protocols: rate must be > 0");

    ProtocolReport r;
    r.groups = config.groups;
    r.sources = config.sources;
    r.rate = rate;
    r.sigma_i2 = sigma_i2;
    r.sigma_source = source;
    r.frame_ratio = frame_ratio(sigma_i2, config.noise);
    r.condition_lhs = sigma_i2 / config.noise;
    r.condition_rhs = 1.0 - 2.0 / (config.groups + 1.0);
    r.modified_better = r.condition_lhs < r.condition_rhs;

    const double m = config.groups;
    const double tf = config.frame_slots;
    const double tf_overlap = r.frame_ratio * tf;
    const double common = rate * config.training_factor * config.sources;
    r.bits_modified = common * tf_overlap * m * (m - 1.0) / 2.0;
    r.bits_original = common * m * m * (tf_overlap - tf);
    return r;
}

} // namespace dbf
