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

#include <benchmark/benchmark.h>

#include "dbf/beamforming.hpp"
#include "dbf/markov.hpp"
#include "dbf/outage.hpp"

namespace {

std::vector<double> channel(int n)
{
    dbf::RandomStream s(1, "bench");
    std::vector<double> h(static_cast<std::size_t>(n));
    for (double& v : h)
        v = s.normal();
    return h;
}

void BM_TrainGroup(benchmark::State& state)
{
    const int n = static_cast<int>(state.range(0));
    const auto h = channel(n);
    dbf::NetworkConfig cfg;
    cfg.sources = n;
    cfg.training_factor = 10.0;
    std::uint64_t i = 0;
    for (auto _ : state) {
        dbf::RandomStream s(2, "train", i++);
        benchmark::DoNotOptimize(dbf::train_group(h, cfg, s, dbf::TraceOptions{0}));
    }
    state.SetItemsProcessed(state.iterations() * cfg.training_frames());
}
BENCHMARK(BM_TrainGroup)->Arg(50)->Arg(200)->Arg(1000);

void BM_MarkovBuild(benchmark::State& state)
{
    const auto h = channel(static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(dbf::build_markov(h));
}
BENCHMARK(BM_MarkovBuild)->DenseRange(4, 10, 2);

void BM_MarkovStep(benchmark::State& state)
{
    const auto model = dbf::build_markov(channel(static_cast<int>(state.range(0))));
    std::vector<double> d(model.states(), 1.0 / static_cast<double>(model.states()));
    for (auto _ : state)
        benchmark::DoNotOptimize(d = model.step(d));
}
BENCHMARK(BM_MarkovStep)->Arg(8)->Arg(10)->Arg(12);

void BM_OutageTrials(benchmark::State& state)
{
    dbf::NetworkConfig cfg;
    cfg.groups = 2;
    cfg.sources = static_cast<int>(state.range(0));
    cfg.power = 10.0;
    cfg.reverse_fraction = 0.05;
    cfg.training_factor = 10.0;
    cfg.trials = 100;
    const auto mode = state.range(1) ? dbf::WeightsMode::trained : dbf::WeightsMode::idealized;
    for (auto _ : state)
        benchmark::DoNotOptimize(dbf::estimate_outage(cfg, 1.0, mode, dbf::RandomStream(3, "outage")));
    state.SetItemsProcessed(state.iterations() * cfg.trials);
}
BENCHMARK(BM_OutageTrials)->Args({200, 0})->Args({200, 1});

} // namespace

BENCHMARK_MAIN();
