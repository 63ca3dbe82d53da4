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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dbf/beamforming.hpp"
#include "dbf/error.hpp"

using namespace dbf;

namespace {

NetworkConfig make_config(int n, double power, double k_o = 10.0)
{
    NetworkConfig c;
    c.groups = 1;
    c.sources = n;
    c.power = power;
    c.noise = 1.0;
    c.frame_slots = 100;
    c.training_factor = k_o;
    return c;
}

std::vector<double> random_channel(int n, std::uint64_t seed)
{
    RandomStream s(seed, "test-channel");
    std::vector<double> h(static_cast<std::size_t>(n));
    for (double& v : h)
        v = s.normal();
    return h;
}

} // namespace

TEST_SUITE("beamforming") {

TEST_CASE("init_group measures the all-ones level")
{
    RandomStream s(1, "t");
    const std::vector<double> h{1.0, -2.0, 0.5};
    const auto init = init_group(h, make_config(3, 3.0), s);
    CHECK(init.level == doctest::Approx(-0.5));
    CHECK(init.state.max_level == doctest::Approx(-0.5));
    CHECK(init.state.alpha_hat == Weights{1, 1, 1});

    const std::vector<double> h1{0.7};
    const auto one = init_group(h1, make_config(1, 1.0), s);
    CHECK(one.level == doctest::Approx(0.7));
    CHECK(one.state.alpha_hat == Weights{1});
}

TEST_CASE("noisy init has variance N_o/T_f")
{
    auto cfg = make_config(3, 3.0);
    cfg.estimation = EstimationMode::noisy;
    const std::vector<double> h{1.0, -2.0, 0.5};
    RandomStream s(2, "noisy");
    const int n = 100'000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double l = init_group(h, cfg, s).level;
        sum += l;
        sq += l * l;
    }
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    CHECK(std::fabs(mean + 0.5) < 4.0 * 0.1 / std::sqrt(double(n)));
    CHECK(std::fabs(var - 0.01) < 0.05 * 0.01);
}

TEST_CASE("received_level examples")
{
    RandomStream s(3, "t");
    const std::vector<double> h{1.0, -2.0, 0.5};
    const auto cfg = make_config(3, 3.0);
    CHECK(received_level(h, Weights{1, 1, 1}, cfg, s) == doctest::Approx(-0.5));
    CHECK(received_level(h, Weights{1, -1, 1}, cfg, s) == doctest::Approx(3.5));
    CHECK_THROWS_AS(received_level(std::vector<double>{1.0, 2.0}, Weights{1, 1}, cfg, s), DimensionError);
}

TEST_CASE("noisy received_level error variance")
{
    auto cfg = make_config(4, 2.0);
    cfg.estimation = EstimationMode::noisy;
    cfg.frame_slots = 40;
    cfg.noise = 2.0;
    const std::vector<double> h{0.3, -1.1, 2.0, 0.4};
    const Weights w{1, -1, 1, -1};
    const double exact = std::sqrt(2.0 / 4.0) * combined_gain(h, w);
    RandomStream s(4, "noise");
    const int n = 100'000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double e = received_level(h, w, cfg, s) - exact;
        sum += e;
        sq += e * e;
    }
    const double mean = sum / n;
    CHECK(sq / n - mean * mean == doctest::Approx(cfg.noise / cfg.frame_slots).epsilon(0.05));
}

TEST_CASE("perturb flip rule")
{
    RandomStream s(5, "flip");
    for (int i = 0; i < 10; ++i)
        CHECK(perturb(Weights{1}, s) == Weights{-1});

    const std::vector<double> u{0.3, 0.005, 0.7};
    CHECK(perturb(Weights{1, 1, 1}, u) == Weights{-1, -1, 1});
    CHECK(perturb(Weights{-1, 1, -1}, u) == Weights{1, -1, -1});
    CHECK_THROWS_AS(perturb(Weights{1, 1}, u), DimensionError);
}

TEST_CASE("expected flips per frame is one")
{
    for (int n : {2, 10, 64}) {
        RandomStream s(6, "flips", static_cast<std::uint64_t>(n));
        const Weights base(static_cast<std::size_t>(n), Sign{1});
        const int frames = 100'000;
        double total = 0.0;
        for (int f = 0; f < frames; ++f) {
            const auto a = perturb(base, s);
            total += static_cast<double>(std::count(a.begin(), a.end(), Sign{-1}));
        }
        const double sd = std::sqrt((1.0 - 1.0 / n) / frames);
        CHECK(std::fabs(total / frames - 1.0) < 4.0 * sd);
    }
}

TEST_CASE("feedback_update accepts only strict improvements")
{
    GroupState st{Weights{1, 1}, Weights{1, 1}, 1.0};
    CHECK(feedback_update(st, Weights{-1, 1}, 1.5));
    CHECK(st.alpha_hat == Weights{-1, 1});
    CHECK(st.max_level == 1.5);

    GroupState tie{Weights{1, 1}, Weights{1, 1}, 1.0};
    CHECK_FALSE(feedback_update(tie, Weights{-1, 1}, 1.0));
    CHECK(tie.alpha_hat == Weights{1, 1});
    CHECK(tie.max_level == 1.0);

    CHECK_FALSE(feedback_update(tie, Weights{-1, -1}, 0.2));
    CHECK(tie.alpha_hat == Weights{1, 1});
    CHECK(tie.max_level == 1.0);
}

TEST_CASE("single source with negative channel flips on frame one")
{
    const std::vector<double> h{-0.7};
    RandomStream s(7, "n1");
    const auto run = train_group(h, make_config(1, 1.0, 5.0), s);
    REQUIRE(run.trace.size() == 5);
    CHECK(run.weights == Weights{-1});
    CHECK(run.trace.gain[0] == doctest::Approx(-0.7));
    for (std::size_t t = 1; t < 5; ++t)
        CHECK(run.trace.gain[t] == doctest::Approx(0.7));
    CHECK(run.trace.accepted[1] == 1);
    CHECK(run.trace.accepted[2] == 0);
}

TEST_CASE("trace decimation keeps every d-th frame and the last")
{
    const auto h = random_channel(10, 8);
    auto cfg = make_config(10, 10.0, 10.0);
    RandomStream a(9, "d"), b(9, "d"), c(9, "d");
    const auto full = train_group(h, cfg, a, TraceOptions{1});
    const auto dec = train_group(h, cfg, b, TraceOptions{7});
    const auto last = train_group(h, cfg, c, TraceOptions{0});
    CHECK(full.trace.size() == 100);
    CHECK(dec.trace.frame.front() == 0);
    CHECK(dec.trace.frame.back() == 99);
    for (std::size_t k = 0; k < dec.trace.size(); ++k) {
        const auto t = static_cast<std::size_t>(dec.trace.frame[k]);
        CHECK(dec.trace.gain[k] == full.trace.gain[t]);
    }
    REQUIRE(last.trace.size() == 1);
    CHECK(last.trace.frame[0] == 99);
    CHECK(full.weights == dec.weights);
    CHECK(full.weights == last.weights);
}

TEST_CASE("monotone gain, bounded by coherent gain, with absorption")
{
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const int n = 5 + static_cast<int>(seed % 20);
        const auto h = random_channel(n, 100 + seed);
        RandomStream s(seed, "mono");
        const auto run = train_group(h, make_config(n, 1.0 + seed, 15.0), s);
        const double top = coherent_gain(h);
        bool absorbed = false;
        for (std::size_t t = 0; t < run.trace.size(); ++t) {
            if (t > 0)
                REQUIRE(run.trace.gain[t] >= run.trace.gain[t - 1]);
            REQUIRE(run.trace.gain[t] <= top * (1.0 + 1e-12));
            if (absorbed)
                REQUIRE(run.trace.accepted[t] == 0);
            if (run.trace.aligned[t] == n) {
                absorbed = true;
                REQUIRE(run.trace.gain[t] == doctest::Approx(top));
            } else {
                REQUIRE(run.trace.gain[t] < top);
            }
        }
    }
}

TEST_CASE("trajectories are scale-equivariant")
{
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const int n = 12;
        const auto h = random_channel(n, 200 + seed);
        std::vector<double> scaled(h);
        const double c = 0.25 + seed;
        for (double& v : scaled)
            v *= c;
        RandomStream a(seed, "scale"), b(seed, "scale");
        const auto cfg = make_config(n, 4.0, 10.0);
        const auto r1 = train_group(h, cfg, a);
        const auto r2 = train_group(scaled, cfg, b);
        CHECK(r1.weights == r2.weights);
        CHECK(r1.trace.accepted == r2.trace.accepted);
        CHECK(r1.trace.aligned == r2.trace.aligned);
        for (std::size_t t = 0; t < r1.trace.size(); ++t)
            REQUIRE(r2.trace.gain[t] == doctest::Approx(c * r1.trace.gain[t]).epsilon(1e-12));
    }
}

TEST_CASE("network training runs one block per group")
{
    NetworkConfig cfg = make_config(8, 2.0, 6.0);
    cfg.groups = 3;
    RandomStream cs(10, "channels");
    const auto channels = generate_channels(cfg, cs);
    const RandomStream stream(10, "training");
    const auto net = train_network(channels, cfg, stream);
    CHECK(net.frames == 3 * 6 * 8);
    REQUIRE(net.weights.size() == 3);
    REQUIRE(net.traces.size() == 3);

    // group i depends only on its own channel and its own stream
    for (int i = 0; i < 3; ++i) {
        RandomStream g = stream.derive("group", static_cast<std::uint64_t>(i));
        CHECK(train_group(channels.link(i, i), cfg, g).weights == net.weights[static_cast<std::size_t>(i)]);
    }
}

TEST_CASE("M=1 network equals train_group")
{
    NetworkConfig cfg = make_config(16, 2.0, 10.0);
    RandomStream cs(11, "channels");
    const auto channels = generate_channels(cfg, cs);
    const RandomStream stream(11, "training");
    const auto net = train_network(channels, cfg, stream);
    RandomStream g = stream.derive("group", 0);
    const auto single = train_group(channels.link(0, 0), cfg, g);
    CHECK(net.weights.front() == single.weights);
    CHECK(net.traces.front().gain == single.trace.gain);
    CHECK(net.frames == cfg.training_frames());
}

TEST_CASE("trained weights are uncorrelated with cross channels")
{
    NetworkConfig cfg = make_config(10, 1.0, 5.0);
    cfg.groups = 2;
    const RandomStream root(12, "independence");
    const int trials = 10'000;
    double sum = 0.0, sq = 0.0;
    for (int t = 0; t < trials; ++t) {
        const RandomStream tr = root.derive("trial", static_cast<std::uint64_t>(t));
        RandomStream cs = tr.derive("channels");
        const auto ch = generate_channels(cfg, cs);
        const auto net = train_network(ch, cfg, tr.derive("training"), TraceOptions{0});
        // destination 0 sees group 1 through a channel group 1 never trained on
        const double x = ch.at(0, 1, 0) * net.weights[1][0];
        sum += x;
        sq += x * x;
    }
    const double mean = sum / trials;
    const double se = std::sqrt((sq / trials - mean * mean) / trials);
    CHECK(std::fabs(mean) < 3.0 * se);
}

TEST_CASE("trained weights are symmetric in sign")
{
    NetworkConfig cfg = make_config(8, 1.0, 20.0);
    const RandomStream root(13, "symmetry");
    const int trials = 10'000;
    int plus = 0;
    for (int t = 0; t < trials; ++t) {
        const RandomStream tr = root.derive("trial", static_cast<std::uint64_t>(t));
        RandomStream cs = tr.derive("channels");
        const auto ch = generate_channels(cfg, cs);
        RandomStream ts = tr.derive("training");
        plus += train_group(ch.link(0, 0), cfg, ts, TraceOptions{0}).weights[0] == 1;
    }
    CHECK(std::fabs(double(plus) / trials - 0.5) < 3.0 * 0.5 / std::sqrt(double(trials)));
}

TEST_CASE("training validates inputs")
{
    RandomStream s(14, "v");
    const auto cfg = make_config(3, 1.0);
    CHECK_THROWS_AS(train_group(std::vector<double>{1.0, 2.0}, cfg, s), DimensionError);
    CHECK_THROWS_AS(train_group(std::vector<double>{1.0, 2.0, 3.0}, cfg, s, TraceOptions{-1}), ConfigError);
    auto bad = cfg;
    bad.training_factor = -1.0;
    CHECK_THROWS_AS(train_group(std::vector<double>{1.0, 2.0, 3.0}, bad, s), ConfigError);
}

}
