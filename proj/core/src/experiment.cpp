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

#include "dbf/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <ostream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include <json.hpp>

#include "dbf/beamforming.hpp"
#include "dbf/bounds.hpp"
#include "dbf/channel.hpp"
#include "dbf/csv.hpp"
#include "dbf/markov.hpp"
#include "dbf/outage.hpp"
#include "dbf/parallel.hpp"
#include "dbf/protocol.hpp"

namespace dbf {

using json = nlohmann::json;
namespace fs = std::filesystem;

std::string_view to_string(Command command) noexcept
{
    switch (command) {
    case Command::convergence: return "convergence";
    case Command::markov_verify: return "markov-verify";
    case Command::bounds: return "bounds";
    case Command::outage: return "outage";
    case Command::interference_probe: return "interference-probe";
    case Command::protocol_compare: return "protocol-compare";
    }
    return "unknown";
}

std::optional<Command> parse_command(std::string_view text) noexcept
{
    for (Command c : {Command::convergence, Command::markov_verify, Command::bounds, Command::outage,
                      Command::interference_probe, Command::protocol_compare})
        if (to_string(c) == text)
            return c;
    return std::nullopt;
}

std::string_view to_string(OutputFormat format) noexcept
{
    return format == OutputFormat::csv ? "csv" : "json";
}

std::optional<OutputFormat> parse_format(std::string_view text) noexcept
{
    if (text == "csv")
        return OutputFormat::csv;
    if (text == "json")
        return OutputFormat::json;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Spec parsing

namespace {

const std::set<std::string, std::less<>> kKnownKeys = {
    "command", "M", "N", "P", "N_o", "T_f", "k_o", "epsilon_o", "delta", "seed", "estimation_mode", "trials",
    "sweep", "output_path", "format", "channel", "weights_mode", "rate", "trace_decimation"};

const json& require(const json& doc, const char* key)
{
    auto it = doc.find(key);
    if (it == doc.end())
        throw ConfigError(key, "is required");
    return *it;
}

std::int64_t as_integer(const json& v, const char* key)
{
    if (v.is_number_integer())
        return v.get<std::int64_t>();
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (std::isfinite(d) && d == std::floor(d) && std::fabs(d) < 9.0e15)
            return static_cast<std::int64_t>(d);
    }
    throw ConfigError(key, "must be an integer");
}

int as_int(const json& v, const char* key)
{
    const auto x = as_integer(v, key);
    if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
        throw ConfigError(key, "is out of range");
    return static_cast<int>(x);
}

double as_real(const json& v, const char* key)
{
    if (!v.is_number())
        throw ConfigError(key, "must be a number");
    return v.get<double>();
}

std::string as_string(const json& v, const char* key)
{
    if (!v.is_string())
        throw ConfigError(key, "must be a string");
    return v.get<std::string>();
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte)
{
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return {line, column};
}

} // namespace

std::vector<int> ExperimentSpec::source_counts() const
{
    if (!sweep.empty())
        return sweep;
    return {config.sources};
}

void ExperimentSpec::validate() const
{
    config.validate();
    for (int n : sweep)
        if (n < 1)
            throw ConfigError("sweep", "entries must be >= 1");
    if (output_path.empty())
        throw ConfigError("output_path", "must not be empty");
    if (rate && !(*rate > 0.0 && std::isfinite(*rate)))
        throw ConfigError("rate", "must be a finite value > 0");
    if (trace_decimation < 0)
        throw ConfigError("trace_decimation", "must be >= 0");

    const auto counts = source_counts();
    switch (command) {
    case Command::bounds:
    case Command::outage: {
        const double limit = max_reverse_fraction();
        if (!(config.reverse_fraction < limit))
            throw ConfigError("epsilon_o", fmt::format("must be below the feasibility threshold epsilon_max = {:.6f} "
                                                       "for the {} command",
                                                       limit, to_string(command)));
        if (command == Command::outage && !weights_mode)
            throw ConfigError("weights_mode", "is required for the outage command (trained or idealized)");
        const bool needs_bound = command == Command::bounds || !rate;
        if (needs_bound)
            for (int n : counts)
                if (n < kMinBoundSources)
                    throw ConfigError(sweep.empty() ? "N" : "sweep",
                                      fmt::format("the outage bound needs N >= {}", kMinBoundSources));
        if (needs_bound)
            for (int n : counts) {
                NetworkConfig c = config;
                c.sources = n;
                try {
                    (void)bound_params(n, c);
                } catch (const InfeasibleEpsilonError& e) {
                    throw ConfigError("epsilon_o", e.what());
                }
            }
        break;
    }
    case Command::markov_verify:
        if (channel.empty())
            throw ConfigError("channel", "is required for markov-verify");
        if (channel.size() != static_cast<std::size_t>(config.sources))
            throw ConfigError("channel", fmt::format("has {} entries but N={}", channel.size(), config.sources));
        if (config.sources > MarkovModel::kMaxSources)
            throw ConfigError("N", fmt::format("markov-verify supports N <= {}", MarkovModel::kMaxSources));
        for (double h : channel)
            if (h == 0.0 || !std::isfinite(h))
                throw ConfigError("channel", "entries must be finite and nonzero");
        if (config.estimation != EstimationMode::perfect)
            throw ConfigError("estimation_mode", "markov-verify models perfect estimation only");
        if (!sweep.empty())
            throw ConfigError("sweep", "is not supported by markov-verify");
        break;
    case Command::protocol_compare:
        if (config.groups < 2)
            throw ConfigError("M", "protocol-compare needs M >= 2");
        if (!rate)
            throw ConfigError("rate", "is required for protocol-compare");
        break;
    case Command::convergence:
    case Command::interference_probe:
        break;
    }
}

ExperimentSpec parse_spec(std::string_view json_text, std::optional<Command> command)
{
    json doc;
    try {
        doc = json::parse(json_text.begin(), json_text.end());
    } catch (const json::parse_error& e) {
        const auto [line, column] = line_column(json_text, e.byte);
        throw ParseError(line, column, e.what());
    }
    if (!doc.is_object())
        throw ConfigError("", "configuration must be a JSON object");
    for (const auto& item : doc.items())
        if (!kKnownKeys.contains(item.key()))
            throw ConfigError(item.key(), "unknown key");

    ExperimentSpec spec;
    if (auto it = doc.find("command"); it != doc.end()) {
        const auto text = as_string(*it, "command");
        const auto parsed = parse_command(text);
        if (!parsed)
            throw UnknownCommandError("unknown command '" + text + "'");
        spec.command = *parsed;
    } else if (!command) {
        throw ConfigError("command", "is required (in the file or via --command)");
    }
    if (command)
        spec.command = *command;

    NetworkConfig& c = spec.config;
    c.groups = as_int(require(doc, "M"), "M");
    c.sources = as_int(require(doc, "N"), "N");
    c.power = as_real(require(doc, "P"), "P");
    c.noise = as_real(require(doc, "N_o"), "N_o");
    c.frame_slots = as_int(require(doc, "T_f"), "T_f");
    c.training_factor = as_real(require(doc, "k_o"), "k_o");
    c.reverse_fraction = as_real(require(doc, "epsilon_o"), "epsilon_o");
    c.delta = as_real(require(doc, "delta"), "delta");
    {
        const json& seed = require(doc, "seed");
        if (seed.is_number_unsigned())
            c.seed = seed.get<std::uint64_t>();
        else if (seed.is_number_integer() && seed.get<std::int64_t>() >= 0)
            c.seed = static_cast<std::uint64_t>(seed.get<std::int64_t>());
        else
            throw ConfigError("seed", "must be a non-negative integer");
    }
    {
        const auto text = as_string(require(doc, "estimation_mode"), "estimation_mode");
        const auto mode = parse_estimation_mode(text);
        if (!mode)
            throw ConfigError("estimation_mode", "must be 'perfect' or 'noisy'");
        c.estimation = *mode;
    }
    c.trials = doc.contains("trials") ? as_integer(doc["trials"], "trials") : kDefaultTrials;

    if (auto it = doc.find("sweep"); it != doc.end()) {
        if (!it->is_array())
            throw ConfigError("sweep", "must be an array of N values");
        for (const auto& v : *it)
            spec.sweep.push_back(as_int(v, "sweep"));
    }
    if (auto it = doc.find("format"); it != doc.end()) {
        const auto text = as_string(*it, "format");
        const auto f = parse_format(text);
        if (!f)
            throw ConfigError("format", "must be 'csv' or 'json'");
        spec.format = *f;
    }
    if (auto it = doc.find("output_path"); it != doc.end())
        spec.output_path = as_string(*it, "output_path");
    else
        spec.output_path = fmt::format("{}.{}", to_string(spec.command), to_string(spec.format));

    if (auto it = doc.find("channel"); it != doc.end()) {
        if (!it->is_array())
            throw ConfigError("channel", "must be an array of numbers");
        for (const auto& v : *it)
            spec.channel.push_back(as_real(v, "channel"));
    }
    if (auto it = doc.find("weights_mode"); it != doc.end()) {
        const auto text = as_string(*it, "weights_mode");
        spec.weights_mode = parse_weights_mode(text);
        if (!spec.weights_mode)
            throw ConfigError("weights_mode", "must be 'trained' or 'idealized'");
    }
    if (auto it = doc.find("rate"); it != doc.end())
        spec.rate = as_real(*it, "rate");
    if (auto it = doc.find("trace_decimation"); it != doc.end())
        spec.trace_decimation = as_integer(*it, "trace_decimation");

    spec.validate();
    return spec;
}

ExperimentSpec load_config(const fs::path& path, std::optional<Command> command)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("config", "cannot read '" + path.string() + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_spec(text, command);
}

std::string serialize(const ExperimentSpec& spec)
{
    const NetworkConfig& c = spec.config;
    json doc = {
        {"command", to_string(spec.command)},
        {"M", c.groups},
        {"N", c.sources},
        {"P", c.power},
        {"N_o", c.noise},
        {"T_f", c.frame_slots},
        {"k_o", c.training_factor},
        {"epsilon_o", c.reverse_fraction},
        {"delta", c.delta},
        {"seed", c.seed},
        {"estimation_mode", to_string(c.estimation)},
        {"trials", c.trials},
        {"output_path", spec.output_path.string()},
        {"format", to_string(spec.format)},
        {"trace_decimation", spec.trace_decimation},
    };
    if (!spec.sweep.empty())
        doc["sweep"] = spec.sweep;
    if (!spec.channel.empty())
        doc["channel"] = spec.channel;
    if (spec.weights_mode)
        doc["weights_mode"] = to_string(*spec.weights_mode);
    if (spec.rate)
        doc["rate"] = *spec.rate;
    return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Commands

namespace {

json real_or_null(double v)
{
    return std::isfinite(v) ? json(v) : json(nullptr);
}

json optional_real(const std::optional<double>& v)
{
    return v ? real_or_null(*v) : json(nullptr);
}

std::string optional_csv(const std::optional<double>& v)
{
    return v ? format_real(*v) : std::string("nan");
}

fs::path with_suffix(const fs::path& path, std::string_view suffix)
{
    fs::path out = path.parent_path() / path.stem();
    out += std::string(suffix);
    out += path.extension();
    return out;
}

/// Object for a single point, array for a sweep.
std::string dump_points(const ExperimentSpec& spec, std::vector<json> points)
{
    if (spec.sweep.empty() && points.size() == 1)
        return points.front().dump(2) + "\n";
    return json(std::move(points)).dump(2) + "\n";
}

struct Writer {
    RunArtifacts artifacts;

    void write(const fs::path& path, std::string_view content)
    {
        write_file_atomic(path, content);
        artifacts.files.push_back(path);
    }
};

NetworkConfig with_sources(const NetworkConfig& base, int n)
{
    NetworkConfig c = base;
    c.sources = n;
    return c;
}

void run_convergence(const ExperimentSpec& spec, const RunOptions& options, std::ostream& summary, Writer& out)
{
    const auto counts = spec.source_counts();
    const RandomStream root(spec.config.seed, "convergence");
    std::vector<json> json_points;

    for (int n : counts) {
        const NetworkConfig cfg = with_sources(spec.config, n);
        const auto trials = cfg.trials;
        std::vector<NetworkTraining> runs(static_cast<std::size_t>(trials));
        std::vector<double> coherent(static_cast<std::size_t>(trials) * cfg.groups);

        const RandomStream base = root.derive("N", static_cast<std::uint64_t>(n));
        parallel_for(trials, options.workers, [&](std::int64_t t) {
            const RandomStream trial = base.derive("trial", static_cast<std::uint64_t>(t));
            RandomStream channel_stream = trial.derive("channels");
            const auto channels = generate_channels(cfg, channel_stream);
            runs[static_cast<std::size_t>(t)] =
                train_network(channels, cfg, trial.derive("training"), TraceOptions{spec.trace_decimation});
            for (int i = 0; i < cfg.groups; ++i)
                coherent[static_cast<std::size_t>(t) * cfg.groups + i] = coherent_gain(channels.link(i, i));
        });

        const auto& frames = runs.front().traces.front().frame;
        const std::size_t samples = frames.size();
        const double count = static_cast<double>(trials) * cfg.groups;
        std::vector<double> mean_gain(samples, 0.0), mean_aligned(samples, 0.0);
        for (const auto& run : runs)
            for (const auto& trace : run.traces)
                for (std::size_t k = 0; k < samples; ++k) {
                    mean_gain[k] += trace.gain[k];
                    mean_aligned[k] += trace.aligned[k];
                }
        for (std::size_t k = 0; k < samples; ++k) {
            mean_gain[k] /= count;
            mean_aligned[k] /= count;
        }
        double mean_coherent = 0.0;
        for (double g : coherent)
            mean_coherent += g;
        mean_coherent /= count;

        const fs::path point_path =
            spec.sweep.empty() ? spec.output_path : with_suffix(spec.output_path, fmt::format("_N{}", n));
        if (spec.format == OutputFormat::csv) {
            fmt::memory_buffer buf;
            fmt::format_to(std::back_inserter(buf), "trial,group,t,gain,aligned_count,accepted\n");
            for (std::int64_t t = 0; t < trials; ++t) {
                const auto& run = runs[static_cast<std::size_t>(t)];
                for (int i = 0; i < cfg.groups; ++i) {
                    const auto& trace = run.traces[static_cast<std::size_t>(i)];
                    for (std::size_t k = 0; k < trace.size(); ++k)
                        fmt::format_to(std::back_inserter(buf), "{},{},{},{},{},{}\n", t, i, trace.frame[k],
                                       format_real(trace.gain[k]), trace.aligned[k], int(trace.accepted[k]));
                }
            }
            out.write(point_path, std::string_view(buf.data(), buf.size()));

            fmt::memory_buffer mean;
            fmt::format_to(std::back_inserter(mean), "t,mean_gain,mean_aligned_count,mean_coherent_gain\n");
            for (std::size_t k = 0; k < samples; ++k)
                fmt::format_to(std::back_inserter(mean), "{},{},{},{}\n", frames[k], format_real(mean_gain[k]),
                               format_real(mean_aligned[k]), format_real(mean_coherent));
            out.write(with_suffix(point_path, "_mean"), std::string_view(mean.data(), mean.size()));
        } else {
            json_points.push_back({{"N", n},
                                   {"M", cfg.groups},
                                   {"trials", trials},
                                   {"frames", cfg.training_frames()},
                                   {"mean_coherent_gain", mean_coherent},
                                   {"t", frames},
                                   {"mean_gain", mean_gain},
                                   {"mean_aligned_count", mean_aligned}});
        }
        summary << fmt::format("convergence N={} M={} trials={} frames={} final_mean_gain={:.6g} "
                               "mean_coherent_gain={:.6g} ratio={:.4f}\n",
                               n, cfg.groups, trials, cfg.training_frames(), mean_gain.back(), mean_coherent,
                               mean_gain.back() / mean_coherent);
    }
    if (spec.format == OutputFormat::json)
        out.write(spec.output_path, dump_points(spec, std::move(json_points)));
}

void run_markov_verify(const ExperimentSpec& spec, const RunOptions& options, std::ostream& summary, Writer& out)
{
    const MarkovModel model = build_markov(spec.channel);
    const int n = model.sources();

    if (spec.format == OutputFormat::csv) {
        std::ostringstream os;
        write_markov_csv(os, model);
        out.write(spec.output_path, os.str());
    }

    double row_error = 0.0;
    for (std::uint32_t s = 0; s < model.states(); ++s) {
        const auto r = model.row(s);
        double sum = 0.0;
        for (double p : r)
            sum += p;
        row_error = std::max(row_error, std::fabs(sum - 1.0));
    }

    json transitions = json::array();
    for (std::uint32_t s = 0; s < model.states(); ++s) {
        const Weights w = MarkovModel::weights_of(s, n);
        const int reverse = n - aligned_count(model.channel(), w);
        const double formula = std::pow(1.0 / n, reverse) * std::pow(1.0 - 1.0 / n, n - reverse);
        std::vector<int> wi(w.begin(), w.end());
        transitions.push_back({{"state", s},
                               {"weights", wi},
                               {"reverse_aligned", reverse},
                               {"gain", model.gain(s)},
                               {"probability", model.transition(s, model.absorbing_index())},
                               {"formula", s == model.absorbing_index() ? 1.0 : formula}});
    }

    // Simulated trajectories through the real training loop.
    const std::vector<std::int64_t> checkpoints = {0, 1, 10, 50};
    const auto moments = gain_moments(model, checkpoints.back());
    NetworkConfig cfg = spec.config;
    cfg.sources = n;
    cfg.training_factor = static_cast<double>(checkpoints.back() + 1) / n;
    const auto trials = cfg.trials;
    std::vector<double> sims(static_cast<std::size_t>(trials) * checkpoints.size());
    const RandomStream root(cfg.seed, "markov-verify");
    parallel_for(trials, options.workers, [&](std::int64_t t) {
        RandomStream stream = root.derive("trial", static_cast<std::uint64_t>(t));
        const auto run = train_group(model.channel(), cfg, stream, TraceOptions{1});
        for (std::size_t k = 0; k < checkpoints.size(); ++k)
            sims[static_cast<std::size_t>(t) * checkpoints.size() + k] =
                run.trace.gain[static_cast<std::size_t>(checkpoints[k])];
    });

    json exact = json::array(), simulated = json::array(), stderr_json = json::array(), within = json::array();
    bool verified = row_error < 1e-12;
    for (std::size_t k = 0; k < checkpoints.size(); ++k) {
        double sum = 0.0;
        for (std::int64_t t = 0; t < trials; ++t)
            sum += sims[static_cast<std::size_t>(t) * checkpoints.size() + k];
        const double mean = sum / static_cast<double>(trials);
        const auto step = static_cast<std::size_t>(checkpoints[k]);
        const double se = moments.stddev[step] / std::sqrt(static_cast<double>(trials));
        const bool ok = std::fabs(mean - moments.mean[step]) <= 3.0 * se + 1e-12 * (1.0 + std::fabs(moments.mean[step]));
        verified = verified && ok;
        exact.push_back(moments.mean[step]);
        simulated.push_back(mean);
        stderr_json.push_back(se);
        within.push_back(ok);
    }
    const auto absorption = absorption_time_stats(model);

    if (spec.format == OutputFormat::json) {
        json report = {{"N", n},
                       {"channel", spec.channel},
                       {"states", model.states()},
                       {"start_state", model.start_index()},
                       {"absorbing_state", model.absorbing_index()},
                       {"row_sum_max_error", row_error},
                       {"transitions_to_absorbing", transitions},
                       {"trials", trials},
                       {"t", checkpoints},
                       {"expected_gain_exact", exact},
                       {"expected_gain_simulated", simulated},
                       {"standard_error", stderr_json},
                       {"within_3se", within},
                       {"absorption_time_mean", absorption.mean},
                       {"verified", verified}};
        out.write(spec.output_path, report.dump(2) + "\n");
    }
    summary << fmt::format("markov-verify N={} states={} p(start->absorbing)={:.6g} mean_absorption_time={:.6g} "
                           "verified={}\n",
                           n, model.states(), model.transition(model.start_index(), model.absorbing_index()),
                           absorption.mean, verified ? "true" : "false");
}

json bound_json(const OutageBound& b)
{
    return {{"N", b.params.sources},
            {"M", b.params.groups},
            {"epsilon_o", b.params.reverse_fraction},
            {"delta", b.params.delta},
            {"k1", b.params.aligned_threshold},
            {"k2", b.params.reverse_threshold},
            {"k3", b.params.interference_threshold},
            {"c_1", optional_real(b.params.rate_constant)},
            {"rate", real_or_null(b.rate)},
            {"term1", real_or_null(b.terms.aligned)},
            {"term2", real_or_null(b.terms.reverse)},
            {"term3", real_or_null(b.terms.interference)},
            {"bound_finite", real_or_null(b.bound_finite)},
            {"bound_asymptotic", real_or_null(b.bound_asymptotic)}};
}

void run_bounds(const ExperimentSpec& spec, std::ostream& summary, Writer& out)
{
    std::vector<json> points;
    fmt::memory_buffer buf;
    fmt::format_to(std::back_inserter(buf),
                   "N,M,epsilon_o,delta,k1,k2,k3,c_1,rate,term1,term2,term3,bound_finite,bound_asymptotic\n");
    for (int n : spec.source_counts()) {
        const OutageBound b = outage_bound(n, with_sources(spec.config, n));
        points.push_back(bound_json(b));
        fmt::format_to(std::back_inserter(buf), "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", n, b.params.groups,
                       format_real(b.params.reverse_fraction), format_real(b.params.delta),
                       format_real(b.params.aligned_threshold), format_real(b.params.reverse_threshold),
                       format_real(b.params.interference_threshold), optional_csv(b.params.rate_constant),
                       format_real(b.rate), format_real(b.terms.aligned), format_real(b.terms.reverse),
                       format_real(b.terms.interference), format_real(b.bound_finite),
                       format_real(b.bound_asymptotic));
        summary << fmt::format("bounds N={} M={} epsilon_o={} delta={} rate={:.6g} bound_finite={:.6g} "
                               "bound_asymptotic={:.6g}\n",
                               n, b.params.groups, b.params.reverse_fraction, b.params.delta, b.rate, b.bound_finite,
                               b.bound_asymptotic);
    }
    if (spec.format == OutputFormat::csv)
        out.write(spec.output_path, std::string_view(buf.data(), buf.size()));
    else
        out.write(spec.output_path, dump_points(spec, std::move(points)));
}

void run_outage(const ExperimentSpec& spec, const RunOptions& options, std::ostream& summary, Writer& out)
{
    std::vector<json> points;
    fmt::memory_buffer buf;
    fmt::format_to(std::back_inserter(buf), "N,M,epsilon_o,delta,rate,trials,outage_empirical,stderr,bound_finite,"
                                            "bound_asymptotic,mode\n");
    const RandomStream root(spec.config.seed, "outage");
    for (int n : spec.source_counts()) {
        const NetworkConfig cfg = with_sources(spec.config, n);
        const double rate = spec.rate ? *spec.rate : outage_bound(n, cfg).rate;
        const OutageResult r = estimate_outage(cfg, rate, *spec.weights_mode,
                                               root.derive("N", static_cast<std::uint64_t>(n)),
                                               OutageOptions{options.workers, false});
        fmt::format_to(std::back_inserter(buf), "{},{},{},{},{},{},{},{},{},{},{}\n", n, r.groups,
                       format_real(r.reverse_fraction), format_real(r.delta), format_real(r.rate), r.trials,
                       format_real(r.outage_empirical), format_real(r.standard_error), optional_csv(r.bound_finite),
                       optional_csv(r.bound_asymptotic), to_string(r.mode));
        points.push_back({{"N", n},
                          {"M", r.groups},
                          {"epsilon_o", r.reverse_fraction},
                          {"delta", r.delta},
                          {"rate", r.rate},
                          {"trials", r.trials},
                          {"outage_empirical", r.outage_empirical},
                          {"stderr", r.standard_error},
                          {"bound_finite", optional_real(r.bound_finite)},
                          {"bound_asymptotic", optional_real(r.bound_asymptotic)},
                          {"mode", to_string(r.mode)},
                          {"mean_reverse_fraction", r.mean_reverse_fraction}});
        summary << fmt::format("outage N={} M={} mode={} rate={:.6g} trials={} outage={:.6g} stderr={:.3g} "
                               "bound_finite={}\n",
                               n, r.groups, to_string(r.mode), r.rate, r.trials, r.outage_empirical,
                               r.standard_error, optional_csv(r.bound_finite));
    }
    if (spec.format == OutputFormat::csv)
        out.write(spec.output_path, std::string_view(buf.data(), buf.size()));
    else
        out.write(spec.output_path, dump_points(spec, std::move(points)));
}

void run_interference_probe(const ExperimentSpec& spec, const RunOptions& options, std::ostream& summary,
                            Writer& out)
{
    const auto counts = spec.source_counts();
    const auto probe = interference_scaling_probe(spec.config, counts, RandomStream(spec.config.seed, "interference"),
                                                  options.workers);
    if (spec.format == OutputFormat::csv) {
        fmt::memory_buffer buf;
        fmt::format_to(std::back_inserter(buf),
                       "N,trials,mean_trained,se_trained,mean_control,se_control,product_mean,product_se\n");
        for (const auto& r : probe.rows)
            fmt::format_to(std::back_inserter(buf), "{},{},{},{},{},{},{},{}\n", r.sources, r.trials,
                           format_real(r.mean_trained), format_real(r.se_trained), format_real(r.mean_control),
                           format_real(r.se_control), format_real(r.product_mean), format_real(r.product_se));
        out.write(spec.output_path, std::string_view(buf.data(), buf.size()));
    } else {
        json rows = json::array();
        for (const auto& r : probe.rows)
            rows.push_back({{"N", r.sources},
                            {"trials", r.trials},
                            {"mean_trained", r.mean_trained},
                            {"se_trained", r.se_trained},
                            {"mean_control", r.mean_control},
                            {"se_control", r.se_control},
                            {"product_mean", r.product_mean},
                            {"product_se", r.product_se}});
        json report = {{"rows", rows}, {"slope", probe.slope}, {"control_slope", probe.control_slope}};
        out.write(spec.output_path, report.dump(2) + "\n");
    }
    for (const auto& r : probe.rows)
        summary << fmt::format("interference-probe N={} trials={} mean_trained={:.6g} mean_control={:.6g}\n",
                               r.sources, r.trials, r.mean_trained, r.mean_control);
    if (probe.rows.size() >= 2)
        summary << fmt::format("interference-probe slope={:.4f} control_slope={:.4f}\n", probe.slope,
                               probe.control_slope);
}

void run_protocol_compare(const ExperimentSpec& spec, const RunOptions& options, std::ostream& summary, Writer& out)
{
    std::vector<json> points;
    fmt::memory_buffer buf;
    fmt::format_to(std::back_inserter(buf),
                   "N,M,sigma_I2,sigma_source,frame_ratio,condition_lhs,condition_rhs,modified_better,"
                   "bits_modified,bits_original\n");
    const RandomStream root(spec.config.seed, "protocol");
    for (int n : spec.source_counts()) {
        const NetworkConfig cfg = with_sources(spec.config, n);
        const auto per_link =
            estimate_interference_power(cfg, root.derive("N", static_cast<std::uint64_t>(n)), options.workers);
        // links 1..M-1 are the ones that would train under interference
        double sigma = 0.0;
        for (std::size_t i = 1; i < per_link.size(); ++i)
            sigma += per_link[i];
        sigma /= static_cast<double>(per_link.size() - 1);
        const ProtocolReport r = compare_protocols(sigma, cfg, *spec.rate, InterferenceSource::monte_carlo);

        fmt::format_to(std::back_inserter(buf), "{},{},{},{},{},{},{},{},{},{}\n", n, r.groups,
                       format_real(r.sigma_i2), to_string(r.sigma_source), format_real(r.frame_ratio),
                       format_real(r.condition_lhs), format_real(r.condition_rhs), r.modified_better ? 1 : 0,
                       format_real(r.bits_modified), format_real(r.bits_original));
        points.push_back({{"N", n},
                          {"M", r.groups},
                          {"rate", r.rate},
                          {"sigma_I2", r.sigma_i2},
                          {"sigma_source", to_string(r.sigma_source)},
                          {"sigma_I2_per_link", per_link},
                          {"frame_ratio", r.frame_ratio},
                          {"condition_lhs", r.condition_lhs},
                          {"condition_rhs", r.condition_rhs},
                          {"modified_better", r.modified_better},
                          {"bits_modified", r.bits_modified},
                          {"bits_original", r.bits_original}});
        summary << fmt::format("protocol-compare N={} M={} sigma_I2={:.6g} lhs={:.4g} rhs={:.4g} "
                               "modified_better={}\n",
                               n, r.groups, r.sigma_i2, r.condition_lhs, r.condition_rhs,
                               r.modified_better ? "true" : "false");
    }
    if (spec.format == OutputFormat::csv)
        out.write(spec.output_path, std::string_view(buf.data(), buf.size()));
    else
        out.write(spec.output_path, dump_points(spec, std::move(points)));
}

} // namespace

RunArtifacts run(const ExperimentSpec& spec, const RunOptions& options, std::ostream& summary)
{
    spec.validate();
    RunOptions opts = options;
    opts.workers = resolve_workers(options.workers);
    Writer out;
    switch (spec.command) {
    case Command::convergence: run_convergence(spec, opts, summary, out); break;
    case Command::markov_verify: run_markov_verify(spec, opts, summary, out); break;
    case Command::bounds: run_bounds(spec, summary, out); break;
    case Command::outage: run_outage(spec, opts, summary, out); break;
    case Command::interference_probe: run_interference_probe(spec, opts, summary, out); break;
    case Command::protocol_compare: run_protocol_compare(spec, opts, summary, out); break;
    }
    return std::move(out.artifacts);
}

int exit_code_for(const std::exception& error) noexcept
{
    if (dynamic_cast<const UnknownCommandError*>(&error))
        return kExitUnknownCommand;
    if (dynamic_cast<const ConfigError*>(&error))
        return kExitInvalidConfig;
    if (dynamic_cast<const IoError*>(&error))
        return kExitIo;
    return kExitRuntime;
}

std::string error_line(const std::exception& error)
{
    std::string kind = "runtime";
    std::string field;
    if (dynamic_cast<const UnknownCommandError*>(&error)) {
        kind = "unknown_command";
        field = "command";
    } else if (const auto* parse = dynamic_cast<const ParseError*>(&error)) {
        kind = "parse";
        (void)parse;
    } else if (const auto* cfg = dynamic_cast<const ConfigError*>(&error)) {
        kind = "config";
        field = cfg->field();
    } else if (dynamic_cast<const IoError*>(&error)) {
        kind = "io";
    }
    json line = {{"error", kind}, {"message", error.what()}};
    if (!field.empty())
        line["field"] = field;
    return line.dump();
}

} // namespace dbf
