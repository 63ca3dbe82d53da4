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

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dbf/experiment.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Distributed one-bit-feedback beamforming experiments"};
    std::string config_path;
    std::string command_name;
    std::string out_path;
    std::string format_name;
    int workers = 1;
    std::optional<std::uint64_t> seed;

    app.add_option("--config", config_path, "JSON experiment file")->required();
    app.add_option("--command", command_name,
                   "convergence | markov-verify | bounds | outage | interference-probe | protocol-compare");
    app.add_option("--out", out_path, "Output artifact path (overrides output_path)");
    app.add_option("--format", format_name, "csv or json (overrides format)");
    app.add_option("--workers", workers, "Worker threads; 0 uses all cores")->check(CLI::NonNegativeNumber);
    app.add_option("--seed", seed, "Overrides the config seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int status = app.exit(e);
        return status == 0 ? dbf::kExitOk : dbf::kExitUsage;
    }

    try {
        std::optional<dbf::Command> command;
        if (!command_name.empty()) {
            command = dbf::parse_command(command_name);
            if (!command)
                throw dbf::UnknownCommandError("unknown command '" + command_name + "'");
        }
        dbf::ExperimentSpec spec = dbf::load_config(config_path, command);
        if (!format_name.empty()) {
            const auto format = dbf::parse_format(format_name);
            if (!format)
                throw dbf::ConfigError("format", "must be 'csv' or 'json'");
            spec.format = *format;
        }
        if (!out_path.empty())
            spec.output_path = out_path;
        if (seed)
            spec.config.seed = *seed;
        spec.validate();

        dbf::run(spec, dbf::RunOptions{workers}, std::cout);
        return dbf::kExitOk;
    } catch (const std::exception& e) {
        std::cerr << dbf::error_line(e) << '\n';
        return dbf::exit_code_for(e);
    }
}
