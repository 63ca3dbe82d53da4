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

#include "dbf/markov.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include "dbf/csv.hpp"
#include "dbf/error.hpp"

namespace dbf {

MarkovModel MarkovModel::build(std::span<const double> h)
{
    const int n = static_cast<int>(h.size());
    if (n < 1 || n > kMaxSources)
        throw CapacityError("Markov model supports 1 <= N <= " + std::to_string(kMaxSources) + ", got N=" +
                            std::to_string(n));
    for (double x : h)
        if (x == 0.0 || !std::isfinite(x))
            throw DegenerateChannelError("Markov model needs nonzero finite channel coefficients");

    MarkovModel m;
    m.sources_ = n;
    m.h_.assign(h.begin(), h.end());

    const std::size_t count = std::size_t{1} << n;
    m.gains_.resize(count);
    for (std::uint32_t s = 0; s < count; ++s) {
        double g = 0.0;
        for (int j = 0; j < n; ++j)
            g += ((s >> j) & 1u) ? h[j] : -h[j];
        m.gains_[s] = g;
    }

    const double p = 1.0 / n;
    m.mask_prob_.resize(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k)
        m.mask_prob_[k] = std::pow(p, k) * std::pow(1.0 - p, n - k);

    std::uint32_t absorbing = 0;
    for (int j = 0; j < n; ++j)
        if (h[j] > 0.0)
            absorbing |= 1u << j;
    m.absorbing_ = absorbing;

    if (n <= kDenseLimit) {
        m.matrix_.assign(count * count, 0.0);
        for (std::uint32_t s = 0; s < count; ++s)
            m.fill_row(s, std::span<double>(m.matrix_).subspan(s * count, count));
    }
    return m;
}

void MarkovModel::fill_row(std::uint32_t from, std::span<double> out) const
{
    const std::size_t count = states();
    const double g = gains_[from];
    double stay = 0.0;
    for (std::uint32_t to = 0; to < count; ++to) {
        const double prob = mask_prob_[static_cast<std::size_t>(std::popcount(from ^ to))];
        if (to != from && gains_[to] > g) {
            out[to] = prob;
        } else {
            out[to] = 0.0;
            stay += prob;
        }
    }
    out[from] = stay;
}

double MarkovModel::transition(std::uint32_t from, std::uint32_t to) const
{
    const std::size_t count = states();
    if (from >= count || to >= count)
        throw DimensionError("Markov state index out of range");
    if (dense())
        return matrix_[from * count + to];
    if (from != to)
        return gains_[to] > gains_[from] ? mask_prob_[static_cast<std::size_t>(std::popcount(from ^ to))] : 0.0;
    std::vector<double> r(count);
    fill_row(from, r);
    return r[from];
}

std::vector<double> MarkovModel::row(std::uint32_t from) const
{
    const std::size_t count = states();
    if (from >= count)
        throw DimensionError("Markov state index out of range");
    if (dense())
        return {matrix_.begin() + static_cast<std::ptrdiff_t>(from * count),
                matrix_.begin() + static_cast<std::ptrdiff_t>((from + 1) * count)};
    std::vector<double> r(count);
    fill_row(from, r);
    return r;
}

std::vector<double> MarkovModel::step(std::span<const double> distribution) const
{
    const std::size_t count = states();
    if (distribution.size() != count)
        throw DimensionError("distribution size does not match the number of states");
    std::vector<double> next(count, 0.0);
    std::vector<double> scratch(dense() ? 0 : count);
    for (std::uint32_t s = 0; s < count; ++s) {
        const double mass = distribution[s];
        if (mass == 0.0)
            continue;
        const double* r;
        if (dense()) {
            r = matrix_.data() + s * count;
        } else {
            fill_row(s, scratch);
            r = scratch.data();
        }
        for (std::size_t to = 0; to < count; ++to)
            next[to] += mass * r[to];
    }
    return next;
}

Weights MarkovModel::weights_of(std::uint32_t state, int sources)
{
    Weights w(static_cast<std::size_t>(sources));
    for (int j = 0; j < sources; ++j)
        w[j] = ((state >> j) & 1u) ? Sign{1} : Sign{-1};
    return w;
}

std::uint32_t MarkovModel::state_of(std::span<const Sign> weights)
{
    if (weights.size() > static_cast<std::size_t>(kMaxSources))
        throw CapacityError("weight vector too long for a Markov state code");
    std::uint32_t s = 0;
    for (std::size_t j = 0; j < weights.size(); ++j)
        if (weights[j] > 0)
            s |= 1u << j;
    return s;
}

std::vector<double> gain_distribution(const MarkovModel& model, std::int64_t steps)
{
    if (steps < 0)
        throw DomainError("gain_distribution: step count must be >= 0");
    std::vector<double> dist(model.states(), 0.0);
    dist[model.start_index()] = 1.0;
    for (std::int64_t t = 0; t < steps; ++t)
        dist = model.step(dist);
    return dist;
}

double expected_gain_exact(const MarkovModel& model, std::int64_t steps)
{
    const auto dist = gain_distribution(model, steps);
    const auto gains = model.gains();
    return std::inner_product(dist.begin(), dist.end(), gains.begin(), 0.0);
}

GainMoments gain_moments(const MarkovModel& model, std::int64_t max_steps)
{
    if (max_steps < 0)
        throw DomainError("gain_moments: step count must be >= 0");
    GainMoments out;
    std::vector<double> dist(model.states(), 0.0);
    dist[model.start_index()] = 1.0;
    const auto gains = model.gains();
    for (std::int64_t t = 0;; ++t) {
        double m1 = 0.0;
        for (std::size_t s = 0; s < dist.size(); ++s)
            m1 += dist[s] * gains[s];
        // centered second pass; E[g^2] - m1^2 cancels once mass concentrates
        double var = 0.0;
        for (std::size_t s = 0; s < dist.size(); ++s)
            var += dist[s] * (gains[s] - m1) * (gains[s] - m1);
        out.mean.push_back(m1);
        out.stddev.push_back(std::sqrt(var));
        if (t == max_steps)
            break;
        dist = model.step(dist);
    }
    return out;
}

AbsorptionTimes absorption_time_stats(const MarkovModel& model)
{
    const std::size_t count = model.states();
    std::vector<std::uint32_t> order(count);
    std::iota(order.begin(), order.end(), 0u);
    const auto gains = model.gains();
    std::stable_sort(order.begin(), order.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return gains[a] > gains[b]; });

    std::vector<double> tau(count, 0.0);
    for (std::uint32_t s : order) {
        if (s == model.absorbing_index())
            continue;
        const auto r = model.row(s);
        double rhs = 1.0;
        for (std::uint32_t to = 0; to < count; ++to)
            if (to != s && r[to] > 0.0)
                rhs += r[to] * tau[to];
        const double leave = 1.0 - r[s];
        if (!(leave > 0.0))
            throw InternalError("absorbing-chain system is singular at state " + std::to_string(s));
        tau[s] = rhs / leave;
    }
    return {tau[model.start_index()], std::move(tau)};
}

void write_markov_csv(std::ostream& os, const MarkovModel& model)
{
    os << "state_code,gain,p_to_absorbing\n";
    for (std::uint32_t s = 0; s < model.states(); ++s)
        os << s << ',' << format_real(model.gain(s)) << ',' << format_real(model.transition(s, model.absorbing_index()))
           << '\n';
}

} // namespace dbf
