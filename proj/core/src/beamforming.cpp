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

#include "dbf/beamforming.hpp"

#include <cmath>
#include <string>

#include "dbf/error.hpp"

namespace dbf {

namespace {

void check_length(std::span<const double> h, const NetworkConfig& config, const char* what)
{
    if (h.size() != static_cast<std::size_t>(config.sources))
        throw DimensionError(std::string(what) + ": channel vector has " + std::to_string(h.size()) +
                             " entries but N=" + std::to_string(config.sources));
}

void flip_into(std::span<const Sign> alpha_hat, RandomStream& stream, Weights& alpha)
{
    const double p = 1.0 / static_cast<double>(alpha_hat.size());
    alpha.assign(alpha_hat.begin(), alpha_hat.end());
    for (Sign& a : alpha)
        if (stream.uniform() < p)
            a = static_cast<Sign>(-a);
}

void record(TrainingTrace& trace, std::int64_t frame, double gain, int aligned, bool accepted)
{
    trace.frame.push_back(frame);
    trace.gain.push_back(gain);
    trace.aligned.push_back(aligned);
    trace.accepted.push_back(accepted ? 1 : 0);
}

} // namespace

GroupInit init_group(std::span<const double> h, const NetworkConfig& config, RandomStream& stream)
{
    check_length(h, config, "init_group");
    GroupInit init{GroupState{Weights(h.size(), Sign{1}), Weights(h.size(), Sign{1}), 0.0}, 0.0};
    init.level = received_level(h, init.state.alpha, config, stream);
    init.state.max_level = init.level;
    return init;
}

Weights perturb(std::span<const Sign> alpha_hat, RandomStream& stream)
{
    Weights alpha;
    flip_into(alpha_hat, stream, alpha);
    return alpha;
}

Weights perturb(std::span<const Sign> alpha_hat, std::span<const double> uniforms)
{
    if (uniforms.size() != alpha_hat.size())
        throw DimensionError("perturb: need one uniform per source");
    const double p = 1.0 / static_cast<double>(alpha_hat.size());
    Weights alpha(alpha_hat.begin(), alpha_hat.end());
    for (std::size_t j = 0; j < alpha.size(); ++j)
        if (uniforms[j] < p)
            alpha[j] = static_cast<Sign>(-alpha[j]);
    return alpha;
}

double received_level(std::span<const double> h, std::span<const Sign> alpha, const NetworkConfig& config,
                      RandomStream& stream)
{
    check_length(h, config, "received_level");
    double level = config.pilot_amplitude() * combined_gain(h, alpha);
    if (config.estimation == EstimationMode::noisy)
        level += std::sqrt(config.estimation_variance()) * stream.normal();
    return level;
}

bool feedback_update(GroupState& state, std::span<const Sign> alpha, double level)
{
    if (!(level > state.max_level))
        return false;
    state.alpha_hat.assign(alpha.begin(), alpha.end());
    state.max_level = level;
    return true;
}

GroupTraining train_group(std::span<const double> h, const NetworkConfig& config, RandomStream& stream,
                          TraceOptions options)
{
    config.validate();
    check_length(h, config, "train_group");
    if (options.decimation < 0)
        throw ConfigError("trace_decimation", "must be >= 0");

    const std::int64_t frames = config.training_frames();
    const std::int64_t every = options.decimation;

    GroupInit init = init_group(h, config, stream);
    GroupState& state = init.state;

    GroupTraining out;
    if (every > 0)
        out.trace.frame.reserve(static_cast<std::size_t>(frames / every + 2));

    double gain = combined_gain(h, state.alpha_hat);
    int aligned = aligned_count(h, state.alpha_hat);
    bool accepted = false;
    if (every > 0 || frames == 1)
        record(out.trace, 0, gain, aligned, false);

    for (std::int64_t t = 1; t < frames; ++t) {
        flip_into(state.alpha_hat, stream, state.alpha);
        const double rx = received_level(h, state.alpha, config, stream);
        accepted = feedback_update(state, state.alpha, rx);
        if (accepted) {
            gain = combined_gain(h, state.alpha_hat);
            aligned = aligned_count(h, state.alpha_hat);
        }
        if ((every > 0 && t % every == 0) || t == frames - 1)
            record(out.trace, t, gain, aligned, accepted);
    }
    out.weights = std::move(state.alpha_hat);
    return out;
}

NetworkTraining train_network(const ChannelRealization& channels, const NetworkConfig& config,
                              const RandomStream& stream, TraceOptions options)
{
    config.validate();
    channels.check_matches(config);
    NetworkTraining out;
    out.weights.reserve(static_cast<std::size_t>(config.groups));
    out.traces.reserve(static_cast<std::size_t>(config.groups));
    for (int i = 0; i < config.groups; ++i) {
        RandomStream group_stream = stream.derive("group", static_cast<std::uint64_t>(i));
        auto trained = train_group(channels.link(i, i), config, group_stream, options);
        out.weights.push_back(std::move(trained.weights));
        out.traces.push_back(std::move(trained.trace));
        out.frames += config.training_frames();
    }
    return out;
}

} // namespace dbf
