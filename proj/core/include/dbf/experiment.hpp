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
#include <exception>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dbf/config.hpp"
#include "dbf/error.hpp"
#include "dbf/outage.hpp"

namespace dbf {

enum class Command { convergence, markov_verify, bounds, outage, interference_probe, protocol_compare };
enum class OutputFormat { csv, json };

std::string_view to_string(Command command) noexcept;
std::optional<Command> parse_command(std::string_view text) noexcept;
std::string_view to_string(OutputFormat format) noexcept;
std::optional<OutputFormat> parse_format(std::string_view text) noexcept;

class UnknownCommandError : public Error {
public:
    using Error::Error;
};

/// Malformed JSON; carries the 1-based position of the failure.
class ParseError : public ConfigError {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& message)
        : ConfigError("", "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
          line_(line), column_(column)
    {
    }
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// One experiment: a command, its scenario and where results go.
///
/// The JSON form is a single flat object: the NetworkConfig keys (M, N, P,
/// N_o, T_f, k_o, epsilon_o, delta, seed, estimation_mode, trials) plus
/// command, sweep, output_path, format and the command-specific keys
/// channel (markov-verify), weights_mode (outage), rate and trace_decimation.
struct ExperimentSpec {
    Command command = Command::bounds;
    NetworkConfig config;
    std::vector<int> sweep;               ///< N values; empty means config.sources only
    std::filesystem::path output_path;
    OutputFormat format = OutputFormat::csv;

    std::vector<double> channel;          ///< markov-verify: the fixed channel vector
    std::optional<WeightsMode> weights_mode; ///< outage: required
    std::optional<double> rate;           ///< outage: overrides the bound's rate schedule; protocol-compare: required
    std::int64_t trace_decimation = 1;    ///< convergence: keep every d-th frame

    /// Throws ConfigError naming the offending field.
    void validate() const;

    /// The N values to run: `sweep`, or {config.sources}.
    std::vector<int> source_counts() const;

    bool operator==(const ExperimentSpec&) const = default;
};

inline constexpr std::int64_t kDefaultTrials = 100;

/// Parses and validates a spec. Unknown keys are rejected. `command`, when
/// given, overrides (or supplies) the document's command.
ExperimentSpec parse_spec(std::string_view json_text, std::optional<Command> command = std::nullopt);

/// Reads a JSON file and parses it with parse_spec.
ExperimentSpec load_config(const std::filesystem::path& path, std::optional<Command> command = std::nullopt);

/// Canonical JSON form; parse_spec(serialize(s)) == s.
std::string serialize(const ExperimentSpec& spec);

struct RunOptions {
    int workers = 1;
};

/// Paths of the files an experiment wrote.
struct RunArtifacts {
    std::vector<std::filesystem::path> files;
};

/// Runs the experiment, writing artifacts atomically and one summary line per
/// sweep point to `summary`.
RunArtifacts run(const ExperimentSpec& spec, const RunOptions& options, std::ostream& summary);

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitUnknownCommand = 2,
    kExitInvalidConfig = 3,
    kExitIo = 4,
    kExitRuntime = 5,
};

/// Exit status for an exception escaping run/load_config.
int exit_code_for(const std::exception& error) noexcept;

/// Single-line JSON error record: {"error":kind,"field":...,"message":...}.
std::string error_line(const std::exception& error);

} // namespace dbf
