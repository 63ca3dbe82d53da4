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

#include <cmath>
#include <numbers>

#include "dbf/channel.hpp"
#include "dbf/error.hpp"
#include "oracle.hpp"

using namespace dbf;

namespace {
NetworkConfig config_of(int m, int n)
{
    NetworkConfig c;
    c.groups = m;
    c.sources = n;
    return c;
}
} // namespace

TEST_SUITE("channel") {

TEST_CASE("single-entry channel has zero mean over regenerations")
{
    const auto cfg = config_of(1, 1);
    const RandomStream root(3, "channel-test");
    const int n = 1'000'000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        RandomStream s = root.derive("draw", static_cast<std::uint64_t>(i));
        const auto ch = generate_channels(cfg, s);
        REQUIRE(ch.values().size() == 1);
        sum += ch.at(0, 0, 0);
    }
    CHECK(std::fabs(sum / n) < 0.004);
}

TEST_CASE("M=2, N=3 tensor has 12 unit-variance entries")
{
    const auto cfg = config_of(2, 3);
    RandomStream s(4, "channel-test");
    double sum = 0.0, sq = 0.0;
    std::int64_t count = 0;
    while (count < 1'000'000) {
        const auto ch = generate_channels(cfg, s);
        REQUIRE(ch.values().size() == 12);
        for (double v : ch.values()) {
            sum += v;
            sq += v * v;
            ++count;
        }
    }
    const double mean = sum / count;
    CHECK(std::fabs(sq / count - mean * mean - 1.0) < 0.005);
}

TEST_CASE("same stream gives identical tensors")
{
    const auto cfg = config_of(3, 5);
    RandomStream a(9, "channels"), b(9, "channels");
    CHECK(generate_channels(cfg, a) == generate_channels(cfg, b));
}

TEST_CASE("abs_moment matches closed form, sampling and quadrature")
{
    CHECK(abs_moment() == doctest::Approx(std::sqrt(2.0 / std::numbers::pi)).epsilon(1e-15));
    CHECK(abs_moment() == doctest::Approx(0.797884560802865).epsilon(1e-14));

    RandomStream s(5, "abs");
    const int n = 1'000'000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i)
        sum += std::fabs(s.normal());
    CHECK(std::fabs(sum / n - 0.7979) < 0.002);

    using boost::math::quadrature::gauss_kronrod;
    const double q = 2.0 * gauss_kronrod<double, 61>::integrate([](double x) { return x * oracle::phi(x); }, 0.0,
                                                                std::numeric_limits<double>::infinity(), 15, 1e-14);
    CHECK(abs_moment() == doctest::Approx(q).epsilon(1e-12));
}

TEST_CASE("sign convention and gains")
{
    CHECK(sign_of(0.0) == 1);
    CHECK(sign_of(-0.0) == 1);
    CHECK(sign_of(-1e-300) == -1);
    const std::vector<double> h{1.0, -2.0, 0.5};
    const Weights w{1, -1, 1};
    CHECK(combined_gain(h, w) == doctest::Approx(3.5));
    CHECK(aligned_count(h, w) == 3);
    CHECK(aligned_count(h, Weights{1, 1, 1}) == 2);
    CHECK(coherent_gain(h) == doctest::Approx(3.5));
    CHECK_THROWS_AS(combined_gain(h, Weights{1, 1}), DimensionError);
}

TEST_CASE("realization shape is validated")
{
    CHECK_THROWS_AS(ChannelRealization(2, 2, std::vector<double>(7, 0.0)), DimensionError);
    CHECK_THROWS_AS(ChannelRealization(0, 2), Error);
    std::vector<double> bad(4, 0.0);
    bad[2] = std::nan("");
    CHECK_THROWS(ChannelRealization(1, 4, bad));

    ChannelRealization ch(2, 3);
    ch.at(1, 0, 2) = 4.0;
    CHECK(ch.link(1, 0)[2] == 4.0);
    CHECK_THROWS(ch.check_matches(config_of(2, 4)));
    CHECK_NOTHROW(ch.check_matches(config_of(2, 3)));
}

}
