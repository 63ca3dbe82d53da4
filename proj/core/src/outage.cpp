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

#include "dbf/outage.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dbf/beamforming.hpp"
#include "dbf/bounds.hpp"
#include "dbf/error.hpp"
#include "dbf/parallel.hpp"

namespace dbf {

std::string_view to_string(WeightsMode mode) noexcept
{
    return mode == WeightsMode::trained ? "trained" : "idealized";
}

std::optional<WeightsMode> parse_weights_mode(std::string_view text) noexcept
{
    if (text == "trained")
        return WeightsMode::trained;
    if (text == "idealized")
        return WeightsMode::idealized;
    return std::nullopt;
}

double sinr(const ChannelRealization& channels, std::span<const Weights> weights, int link,
            const NetworkConfig& config)
{
    channels.check_matches(config);
    if (weights.size() != static_cast<std::size_t>(config.groups))
        throw DimensionError("sinr: need weights for all " + std::to_string(config.groups) + " groups");
    if (link < 0 || link >= config.groups)
        throw DimensionError("sinr: link index out of range");
    for (const auto& w : weights) {
        if (w.size() != static_cast<std::size_t>(config.sources))
            throw DimensionError("sinr: weight vector length differs from N");
        for (Sign s : w)
            if (s != 1 && s != -1)
                throw DomainError("sinr: weights must be -1 or +1");
    }

    const double scale = config.power / config.sources;
    const double signal = combined_gain(channels.link(link, link), weights[link]);
    double interference = 0.0;
    for (int r = 0; r < config.groups; ++r) {
        if (r == link)
            continue;
        const double g = combined_gain(channels.link(link, r), weights[r]);
        interference += scale * g * g;
    }
    return scale * signal * signal / (interference + config.noise);
}

Weights idealized_weights(std::span<const double> h, int reverse, RandomStream& stream)
{
    const auto n = static_cast<int>(h.size());
    if (reverse < 0 || reverse > n)
        throw DomainError("idealized_weights: reverse count must lie in [0, N]");
    Weights w(h.size());
    for (std::size_t j = 0; j < h.size(); ++j)
        w[j] = sign_of(h[j]);
    // partial Fisher-Yates: the first `reverse` slots become a uniform subset
    std::vector<int> idx(h.size());
    std::iota(idx.begin(), idx.end(), 0);
    for (int i = 0; i < reverse; ++i) {
        const int span = n - i;
        int pick = i + static_cast<int>(stream.uniform() * span);
        if (pick >= n)
            pick = n - 1;
        std::swap(idx[i], idx[pick]);
        w[idx[i]] = static_cast<Sign>(-w[idx[i]]);
    }
    return w;
}

OutageResult estimate_outage(const NetworkConfig& config, double rate, WeightsMode mode, const RandomStream& stream,
                             OutageOptions options)
{
    config.validate();
    if (!(rate > 0.0) || std::isnan(rate))
        throw ConfigError("rate", "must be > 0");

    const int groups = config.groups;
    const int reverse = config.reverse_count();
    const std::size_t links = options.all_links ? static_cast<std::size_t>(groups) : 1;
    const auto trials = config.trials;

    std::vector<std::uint8_t> outage(static_cast<std::size_t>(trials) * links, 0);
    std::vector<double> reverse_fraction(static_cast<std::size_t>(trials), 0.0);

    parallel_for(trials, options.workers, [&](std::int64_t t) {
        const RandomStream trial = stream.derive("trial", static_cast<std::uint64_t>(t));
        RandomStream channel_stream = trial.derive("channels");
        const ChannelRealization channels = generate_channels(config, channel_stream);

        std::vector<Weights> weights;
        if (mode == WeightsMode::trained) {
            weights = train_network(channels, config, trial.derive("training"), TraceOptions{0}).weights;
        } else {
            weights.reserve(static_cast<std::size_t>(groups));
            for (int i = 0; i < groups; ++i) {
                RandomStream flips = trial.derive("flips", static_cast<std::uint64_t>(i));
                weights.push_back(idealized_weights(channels.link(i, i), reverse, flips));
            }
        }

        for (std::size_t l = 0; l < links; ++l) {
            const double s = sinr(channels, weights, static_cast<int>(l), config);
            outage[static_cast<std::size_t>(t) * links + l] = rate_for_sinr(s) < rate ? 1 : 0;
        }
        const int aligned = aligned_count(channels.link(0, 0), weights[0]);
        reverse_fraction[static_cast<std::size_t>(t)] =
            static_cast<double>(config.sources - aligned) / config.sources;
    });

    OutageResult r;
    r.sources = config.sources;
    r.groups = groups;
    r.reverse_fraction = config.reverse_fraction;
    r.delta = config.delta;
    r.rate = rate;
    r.trials = trials;
    r.mode = mode;

    std::vector<std::int64_t> per_link(links, 0);
    double reverse_sum = 0.0;
    for (std::int64_t t = 0; t < trials; ++t) {
        for (std::size_t l = 0; l < links; ++l)
            per_link[l] += outage[static_cast<std::size_t>(t) * links + l];
        const double f = reverse_fraction[static_cast<std::size_t>(t)];
        reverse_sum += f;
        if (f <= config.reverse_fraction)
            ++r.trials_within_target;
    }
    r.outages = per_link[0];
    r.outage_empirical = static_cast<double>(r.outages) / static_cast<double>(trials);
    r.standard_error = std::sqrt(r.outage_empirical * (1.0 - r.outage_empirical) / static_cast<double>(trials));
    r.mean_reverse_fraction = reverse_sum / static_cast<double>(trials);
    if (options.all_links)
        for (auto c : per_link)
            r.per_link.push_back(static_cast<double>(c) / static_cast<double>(trials));

    if (config.sources >= kMinBoundSources) {
        try {
            const OutageBound b = outage_bound(config.sources, config);
            r.bound_finite = b.bound_finite;
            r.bound_asymptotic = b.bound_asymptotic;
        } catch (const InfeasibleEpsilonError&) {
            // bound undefined for this epsilon; report the estimate alone
        }
    }
    return r;
}

double log_log_slope(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size() || x.size() < 2)
        throw DimensionError("log_log_slope: need at least two (x, y) pairs");
    double mx = 0.0, my = 0.0;
    const double n = static_cast<double>(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (!(x[k] > 0.0) || !(y[k] > 0.0))
            throw DomainError("log_log_slope: values must be positive");
        mx += std::log(x[k]);
        my += std::log(y[k]);
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double dx = std::log(x[k]) - mx;
        sxy += dx * (std::log(y[k]) - my);
        sxx += dx * dx;
    }
    if (sxx == 0.0)
        throw DomainError("log_log_slope: x values must not all be equal");
    return sxy / sxx;
}

InterferenceProbe interference_scaling_probe(const NetworkConfig& config, std::span<const int> source_counts,
                                             const RandomStream& stream, int workers)
{
    if (source_counts.empty())
        throw ConfigError("sweep", "needs at least one N value");
    config.validate();

    InterferenceProbe probe;
    for (int n : source_counts) {
        if (n < 1)
            throw ConfigError("sweep", "N values must be >= 1");
        NetworkConfig cfg = config;
        cfg.sources = n;
        const auto trials = cfg.trials;

        struct Sample {
            double trained, control, product_sum, product_sq;
        };
        std::vector<Sample> samples(static_cast<std::size_t>(trials));
        const RandomStream base = stream.derive("probe", static_cast<std::uint64_t>(n));

        parallel_for(trials, workers, [&](std::int64_t t) {
            const RandomStream trial = base.derive("trial", static_cast<std::uint64_t>(t));
            RandomStream own_stream = trial.derive("own");
            RandomStream cross_stream = trial.derive("cross");
            RandomStream train_stream = trial.derive("training");
            std::vector<double> own(static_cast<std::size_t>(n)), cross(static_cast<std::size_t>(n));
            for (double& v : own)
                v = own_stream.normal();
            for (double& v : cross)
                v = cross_stream.normal();
            const Weights w = train_group(own, cfg, train_stream, TraceOptions{0}).weights;

            Sample s{};
            double control = 0.0;
            for (std::size_t j = 0; j < cross.size(); ++j) {
                const double p = w[j] < 0 ? -cross[j] : cross[j];
                s.product_sum += p;
                s.product_sq += p * p;
                control += cross[j];
            }
            s.trained = s.product_sum * s.product_sum;
            s.control = control * control;
            samples[static_cast<std::size_t>(t)] = s;
        });

        InterferenceRow row;
        row.sources = n;
        row.trials = trials;
        double st = 0, st2 = 0, sc = 0, sc2 = 0, sp = 0, sp2 = 0;
        for (const auto& s : samples) {
            st += s.trained;
            st2 += s.trained * s.trained;
            sc += s.control;
            sc2 += s.control * s.control;
            sp += s.product_sum;
            sp2 += s.product_sq;
        }
        const double tn = static_cast<double>(trials);
        auto se = [tn](double sum, double sum_sq) {
            if (tn < 2)
                return 0.0;
            const double mean = sum / tn;
            return std::sqrt(std::max(0.0, (sum_sq - tn * mean * mean) / (tn - 1.0)) / tn);
        };
        row.mean_trained = st / tn;
        row.se_trained = se(st, st2);
        row.mean_control = sc / tn;
        row.se_control = se(sc, sc2);
        const double samples_total = tn * n;
        row.product_mean = sp / samples_total;
        row.product_se = samples_total > 1
                             ? std::sqrt(std::max(0.0, (sp2 - samples_total * row.product_mean * row.product_mean) /
                                                           (samples_total - 1.0)) /
                                         samples_total)
                             : 0.0;
        probe.rows.push_back(row);
    }

    if (probe.rows.size() >= 2) {
        std::vector<double> xs, ys, yc;
        for (const auto& r : probe.rows) {
            xs.push_back(r.sources);
            ys.push_back(r.mean_trained);
            yc.push_back(r.mean_control);
        }
        probe.slope = log_log_slope(xs, ys);
        probe.control_slope = log_log_slope(xs, yc);
    }
    return probe;
}

} // namespace dbf
