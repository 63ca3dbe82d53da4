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

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include <json.hpp>

#include "dbf/experiment.hpp"

using namespace dbf;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* kMinimal = R"({"M":1,"N":100,"P":100,"N_o":1,"T_f":50,"k_o":10,"epsilon_o":0.1,"delta":0.5,
"seed":42,"trials":50,"estimation_mode":"perfect"})";

json minimal() { return json::parse(kMinimal); }

struct TempDir {
    fs::path path;
    TempDir()
    {
        path = fs::temp_directory_path() / ("dbf-test-" + std::to_string(std::rand()) + "-" +
                                            std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

template <typename Fn>
std::string config_field_of(Fn&& fn)
{
    try {
        fn();
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "<no error>";
}

} // namespace

TEST_SUITE("experiment") {

TEST_CASE("minimal config is accepted with defaults")
{
    const auto spec = parse_spec(kMinimal, Command::convergence);
    CHECK(spec.command == Command::convergence);
    CHECK(spec.config.sources == 100);
    CHECK(spec.config.trials == 50);
    CHECK(spec.config.seed == 42);
    CHECK(spec.format == OutputFormat::csv);
    CHECK(spec.output_path == fs::path("convergence.csv"));

    auto j = minimal();
    j.erase("trials");
    CHECK(parse_spec(j.dump(), Command::convergence).config.trials == kDefaultTrials);
}

TEST_CASE("physics parameters have no defaults")
{
    for (const char* key : {"M", "N", "P", "N_o", "T_f", "k_o", "epsilon_o", "delta", "seed", "estimation_mode"}) {
        auto j = minimal();
        j.erase(key);
        CHECK(config_field_of([&] { parse_spec(j.dump(), Command::convergence); }) == key);
    }
    CHECK(config_field_of([] { parse_spec(kMinimal); }) == "command");
}

TEST_CASE("strict keys and types")
{
    auto j = minimal();
    j["epsilon"] = 0.1;
    CHECK(config_field_of([&] { parse_spec(j.dump(), Command::convergence); }) == "epsilon");

    j = minimal();
    j["N"] = 1.5;
    CHECK(config_field_of([&] { parse_spec(j.dump(), Command::convergence); }) == "N");
    j = minimal();
    j["N"] = 100.0;
    CHECK(parse_spec(j.dump(), Command::convergence).config.sources == 100);
    j = minimal();
    j["P"] = "100";
    CHECK(config_field_of([&] { parse_spec(j.dump(), Command::convergence); }) == "P");
    j = minimal();
    j["seed"] = -1;
    CHECK(config_field_of([&] { parse_spec(j.dump(), Command::convergence); }) == "seed");
    j = minimal();
    j["estimation_mode"] = "fuzzy";
    CHECK(config_field_of([&] { parse_spec(j.dump(), Command::convergence); }) == "estimation_mode");
    j = minimal();
    j["P"] = -1;
    CHECK(config_field_of([&] { parse_spec(j.dump(), Command::convergence); }) == "P");
    j = minimal();
    j["sweep"] = {10, 0};
    CHECK(config_field_of([&] { parse_spec(j.dump(), Command::convergence); }) == "sweep");
    j = minimal();
    j["format"] = "xml";
    CHECK(config_field_of([&] { parse_spec(j.dump(), Command::convergence); }) == "format");
    j = minimal();
    j["command"] = "explode";
    CHECK_THROWS_AS(parse_spec(j.dump()), UnknownCommandError);
}

TEST_CASE("infeasible epsilon is rejected for outage and bounds")
{
    auto j = minimal();
    j["epsilon_o"] = 0.5;
    j["weights_mode"] = "idealized";
    for (Command c : {Command::outage, Command::bounds}) {
        try {
            parse_spec(j.dump(), c);
            FAIL("expected rejection");
        } catch (const ConfigError& e) {
            CHECK(e.field() == "epsilon_o");
            CHECK(std::string(e.what()).find("0.2003") != std::string::npos);
        }
    }
    CHECK_NOTHROW(parse_spec(j.dump(), Command::convergence));
}

TEST_CASE("command-specific requirements")
{
    auto j = minimal();
    CHECK(config_field_of([&] { parse_spec(j.dump(), Command::outage); }) == "weights_mode");
    CHECK(config_field_of([&] { parse_spec(j.dump(), Command::protocol_compare); }) == "M");
    j["M"] = 3;
    CHECK(config_field_of([&] { parse_spec(j.dump(), Command::protocol_compare); }) == "rate");
    j["rate"] = 1.0;
    CHECK_NOTHROW(parse_spec(j.dump(), Command::protocol_compare));

    j = minimal();
    CHECK(config_field_of([&] { parse_spec(j.dump(), Command::markov_verify); }) == "channel");
    j["N"] = 2;
    j["channel"] = {1.0, 2.0, 3.0};
    CHECK(config_field_of([&] { parse_spec(j.dump(), Command::markov_verify); }) == "channel");
    j["channel"] = {1.0, 0.0};
    CHECK(config_field_of([&] { parse_spec(j.dump(), Command::markov_verify); }) == "channel");
    j["channel"] = {1.0, 2.0};
    CHECK_NOTHROW(parse_spec(j.dump(), Command::markov_verify));

    j = minimal();
    j["N"] = 10;
    CHECK(config_field_of([&] { parse_spec(j.dump(), Command::bounds); }) == "N");
}

TEST_CASE("parse errors carry line and column")
{
    const std::string text = "{\n  \"M\": 1,\n  \"N\": ]\n}";
    try {
        parse_spec(text, Command::bounds);
        FAIL("expected parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
        CHECK(e.column() == 8);
        CHECK(std::string(e.what()).find("line 3, column 8") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_spec("[1, 2]", Command::bounds), ConfigError);
}

TEST_CASE("serialize round-trips")
{
    std::vector<ExperimentSpec> specs;
    specs.push_back(parse_spec(kMinimal, Command::convergence));
    auto j = minimal();
    j["M"] = 2;
    j["epsilon_o"] = 0.05;
    j["sweep"] = {50, 100, 200};
    j["weights_mode"] = "trained";
    j["rate"] = 0.123456789012345678;
    j["format"] = "json";
    j["output_path"] = "out/x.json";
    j["seed"] = 18446744073709551615ull;
    j["P"] = 0.1;
    j["estimation_mode"] = "noisy";
    specs.push_back(parse_spec(j.dump(), Command::outage));
    auto k = minimal();
    k["N"] = 3;
    k["channel"] = {0.1, -2.0, 1.0 / 3.0};
    k["trace_decimation"] = 0;
    specs.push_back(parse_spec(k.dump(), Command::markov_verify));

    TempDir dir;
    for (const auto& s : specs) {
        CHECK(parse_spec(serialize(s)) == s);
        const fs::path file = dir.path / "spec.json";
        std::ofstream(file) << serialize(s);
        CHECK(load_config(file) == s);
    }
    CHECK_THROWS_AS(load_config(dir.path / "missing.json"), ConfigError);
}

TEST_CASE("bounds command writes the report")
{
    TempDir dir;
    auto j = minimal();
    j["N"] = 200;
    j["M"] = 2;
    j["epsilon_o"] = 0.05;
    j["format"] = "json";
    j["output_path"] = (dir.path / "b.json").string();
    const auto spec = parse_spec(j.dump(), Command::bounds);
    std::ostringstream summary;
    const auto art = run(spec, {}, summary);
    REQUIRE(art.files.size() == 1);
    const auto report = json::parse(slurp(art.files[0]));
    CHECK(report["c_1"].get<double>() == doctest::Approx(0.1197).epsilon(1e-3));
    CHECK(report["term3"].get<double>() == doctest::Approx(1.70e-3).epsilon(5e-3));
    for (const char* key : {"N", "M", "epsilon_o", "delta", "k1", "k2", "k3", "c_1", "rate", "term1", "term2", "term3",
                            "bound_finite", "bound_asymptotic"})
        CHECK(report.contains(key));
    CHECK(summary.str().find("bounds N=200") == 0);

    // M = 1 has no rate constant
    j["M"] = 1;
    j["format"] = "csv";
    j["output_path"] = (dir.path / "b.csv").string();
    run(parse_spec(j.dump(), Command::bounds), {}, summary);
    const auto csv = slurp(dir.path / "b.csv");
    CHECK(csv.find(",nan,") != std::string::npos);
}

TEST_CASE("markov-verify confirms the transition formula")
{
    TempDir dir;
    auto j = minimal();
    j["N"] = 2;
    j["channel"] = {1.0, 2.0};
    j["format"] = "json";
    j["trials"] = 2000;
    j["output_path"] = (dir.path / "m.json").string();
    std::ostringstream summary;
    run(parse_spec(j.dump(), Command::markov_verify), {}, summary);
    const auto report = json::parse(slurp(dir.path / "m.json"));
    CHECK(report["verified"].get<bool>());
    bool found = false;
    for (const auto& t : report["transitions_to_absorbing"])
        if (t["weights"] == json{-1, -1}) {
            found = true;
            CHECK(t["probability"].get<double>() == doctest::Approx(0.25));
            CHECK(t["formula"].get<double>() == doctest::Approx(0.25));
        }
    CHECK(found);
}

TEST_CASE("convergence CSV reaches 90 percent at 10N")
{
    TempDir dir;
    auto j = minimal();
    j["k_o"] = 10.01;
    j["output_path"] = (dir.path / "c.csv").string();
    std::ostringstream summary;
    const auto art = run(parse_spec(j.dump(), Command::convergence), {}, summary);
    REQUIRE(art.files.size() == 2);
    const auto trace = slurp(dir.path / "c.csv");
    CHECK(trace.rfind("trial,group,t,gain,aligned_count,accepted\n", 0) == 0);

    std::istringstream mean(slurp(dir.path / "c_mean.csv"));
    std::string line;
    std::getline(mean, line);
    CHECK(line == "t,mean_gain,mean_aligned_count,mean_coherent_gain");
    bool seen = false;
    while (std::getline(mean, line)) {
        std::istringstream row(line);
        std::string t, g, a, c;
        std::getline(row, t, ',');
        std::getline(row, g, ',');
        std::getline(row, a, ',');
        std::getline(row, c, ',');
        if (t == "1000") {
            seen = true;
            CHECK(std::stod(g) >= 0.9 * std::stod(c));
        }
    }
    CHECK(seen);
}

TEST_CASE("artifacts are byte-identical across reruns and worker counts")
{
    TempDir dir;
    auto j = minimal();
    j["M"] = 2;
    j["N"] = 60;
    j["epsilon_o"] = 0.05;
    j["trials"] = 200;
    j["weights_mode"] = "trained";
    j["sweep"] = {60, 80};
    const auto spec = parse_spec(j.dump(), Command::outage);
    std::ostringstream summary;
    auto a = spec;
    a.output_path = dir.path / "a.csv";
    auto b = spec;
    b.output_path = dir.path / "b.csv";
    auto c = spec;
    c.output_path = dir.path / "c.csv";
    run(a, {1}, summary);
    run(b, {1}, summary);
    run(c, {4}, summary);
    CHECK(slurp(a.output_path) == slurp(b.output_path));
    CHECK(slurp(a.output_path) == slurp(c.output_path));
    CHECK_FALSE(fs::exists(dir.path / "a.csv.tmp"));
}

TEST_CASE("error classification")
{
    auto j = minimal();
    j["output_path"] = "/nonexistent-dir/x/out.csv";
    j["trials"] = 2;
    j["N"] = 4;
    const auto spec = parse_spec(j.dump(), Command::convergence);
    std::ostringstream summary;
    try {
        run(spec, {}, summary);
        FAIL("expected io error");
    } catch (const std::exception& e) {
        CHECK(exit_code_for(e) == kExitIo);
        CHECK(json::parse(error_line(e))["error"] == "io");
    }
    const ConfigError cfg("P", "bad");
    CHECK(exit_code_for(cfg) == kExitInvalidConfig);
    CHECK(json::parse(error_line(cfg))["field"] == "P");
    CHECK(exit_code_for(UnknownCommandError("x")) == kExitUnknownCommand);
    CHECK(exit_code_for(std::runtime_error("x")) == kExitRuntime);
    CHECK(error_line(std::runtime_error("a\nb")).find('\n') == std::string::npos);
}

#ifdef DBF_CLI_PATH
TEST_CASE("command-line exit codes")
{
    TempDir dir;
    const fs::path cfg = dir.path / "cfg.json";
    auto j = minimal();
    j["N"] = 200;
    j["M"] = 2;
    j["epsilon_o"] = 0.05;
    std::ofstream(cfg) << j.dump();
    const std::string cli = DBF_CLI_PATH;
    auto status = [&](const std::string& args) {
        const int raw = std::system((cli + " " + args + " > " + (dir.path / "log").string() + " 2>&1").c_str());
        return WEXITSTATUS(raw);
    };
    CHECK(status("--config " + cfg.string() + " --command bounds --out " + (dir.path / "o.csv").string()) == 0);
    CHECK(fs::exists(dir.path / "o.csv"));
    CHECK(status("--config " + cfg.string() + " --command nope") == kExitUnknownCommand);
    CHECK(status("--config " + cfg.string() + " --command outage") == kExitInvalidConfig);
    CHECK(status("--config " + cfg.string() + " --command bounds --out /nonexistent-dir/y/o.csv") == kExitIo);
    CHECK(status("--bogus") == kExitUsage);
    CHECK(status("--config " + cfg.string() + " --command bounds --format json --seed 5 --out " +
                 (dir.path / "o.json").string()) == 0);
    CHECK(json::parse(slurp(dir.path / "o.json"))["N"] == 200);
}
#endif

}
