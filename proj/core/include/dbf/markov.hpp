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
#include <iosfwd>
#include <span>
#include <vector>

#include "dbf/channel.hpp"

namespace dbf {

/// Exact transition structure of one group's training loop, viewed as a
/// Markov chain on the 2^N auxiliary weight vectors.
///
/// State codes: bit j is set iff alpha_hat_j = +1. Under perfect estimation
/// the stored maximum level is a function of the state, so the chain is
/// closed on these 2^N states. A proposal is accepted iff it strictly raises
/// Sum_j h_j alpha_hat_j, hence the only absorbing state is sign(h).
///
/// Up to kDenseLimit sources the matrix is stored; above it rows are
/// regenerated on demand.
class MarkovModel {
public:
    static constexpr int kMaxSources = 14;
    static constexpr int kDenseLimit = 10;

    /// Throws CapacityError for N outside [1, kMaxSources] and
    /// DegenerateChannelError if any coefficient is zero or non-finite.
    static MarkovModel build(std::span<const double> h);

    int sources() const noexcept { return sources_; }
    std::size_t states() const noexcept { return gains_.size(); }
    std::uint32_t absorbing_index() const noexcept { return absorbing_; }
    /// Step-1 initialization: every weight +1.
    std::uint32_t start_index() const noexcept { return static_cast<std::uint32_t>(states() - 1); }
    std::span<const double> channel() const noexcept { return h_; }

    /// Sum_j h_j alpha_j for the state's weights.
    double gain(std::uint32_t state) const { return gains_.at(state); }
    std::span<const double> gains() const noexcept { return gains_; }

    /// Probability that a proposal flips exactly `flips` given sources.
    double mask_probability(int flips) const { return mask_prob_.at(static_cast<std::size_t>(flips)); }

    double transition(std::uint32_t from, std::uint32_t to) const;
    std::vector<double> row(std::uint32_t from) const;

    /// One step of the chain applied to a distribution over states.
    std::vector<double> step(std::span<const double> distribution) const;

    bool dense() const noexcept { return !matrix_.empty(); }

    static Weights weights_of(std::uint32_t state, int sources);
    static std::uint32_t state_of(std::span<const Sign> weights);

private:
    MarkovModel() = default;
    void fill_row(std::uint32_t from, std::span<double> out) const;

    int sources_ = 0;
    std::vector<double> h_;
    std::vector<double> gains_;
    std::vector<double> mask_prob_;
    std::uint32_t absorbing_ = 0;
    std::vector<double> matrix_; // row-major, dense models only
};

inline MarkovModel build_markov(std::span<const double> h) { return MarkovModel::build(h); }

/// State distribution after `steps` frames, starting from all +1.
std::vector<double> gain_distribution(const MarkovModel& model, std::int64_t steps);

/// E[Sum_j h_j alpha_hat_j[t]] under the exact chain.
double expected_gain_exact(const MarkovModel& model, std::int64_t steps);

/// Mean and standard deviation of the gain for every t in [0, max_steps].
struct GainMoments {
    std::vector<double> mean;
    std::vector<double> stddev;
};
GainMoments gain_moments(const MarkovModel& model, std::int64_t max_steps);

struct AbsorptionTimes {
    double mean;                        ///< expected frames to absorption from the start state
    std::vector<double> by_start_state; ///< indexed by state code; 0 for the absorbing state
};

/// Expected absorption times. Accepted moves strictly increase the gain, so
/// the linear system is triangular in gain order and is solved by
/// back-substitution.
AbsorptionTimes absorption_time_stats(const MarkovModel& model);

/// CSV rows: state_code, gain, one-step probability of reaching the absorbing state.
void write_markov_csv(std::ostream& os, const MarkovModel& model);

} // namespace dbf
