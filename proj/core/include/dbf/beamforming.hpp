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
#include <span>
#include <vector>

#include "dbf/channel.hpp"
#include "dbf/config.hpp"
#include "dbf/random.hpp"

namespace dbf {

/// Per-group state of the 1-bit feedback training loop.
struct GroupState {
    Weights alpha;      ///< weights transmitted in the current frame
    Weights alpha_hat;  ///< best weights found so far
    double max_level;   ///< largest received level seen so far (amplitude)
};

/// Per-frame history of one group's training block.
///
/// `frame[k]` is the frame index of the k-th stored sample; with decimation d
/// every d-th frame is kept plus the final one.
struct TrainingTrace {
    std::vector<std::int64_t> frame;
    std::vector<double> gain;          ///< Sum_j h_j * alpha_hat_j (no pilot scaling)
    std::vector<int> aligned;          ///< |{j : h_j * alpha_hat_j > 0}|
    std::vector<std::uint8_t> accepted;

    std::size_t size() const noexcept { return frame.size(); }
};

struct TraceOptions {
    /// Store every `decimation`-th frame; 0 keeps only the final frame.
    std::int64_t decimation = 1;
};

struct GroupInit {
    GroupState state;
    double level; ///< L_rx measured in frame 0
};

/// Frame 0: every weight set to +1 and the received level measured.
/// The stream is consumed only in noisy estimation mode.
GroupInit init_group(std::span<const double> h, const NetworkConfig& config, RandomStream& stream);

/// Proposes new weights: each source independently flips its auxiliary
/// weight when its uniform draw falls below 1/N.
Weights perturb(std::span<const Sign> alpha_hat, RandomStream& stream);

/// Same rule with caller-supplied uniforms in [0, 1).
Weights perturb(std::span<const Sign> alpha_hat, std::span<const double> uniforms);

/// sqrt(P/N) * Sum_j h_j alpha_j, plus N(0, N_o/T_f) estimation error in noisy mode.
double received_level(std::span<const double> h, std::span<const Sign> alpha, const NetworkConfig& config,
                      RandomStream& stream);

/// Applies the feedback bit: accepts `alpha` iff `level` > max_level
/// (ties keep the old weights). Returns whether it accepted.
bool feedback_update(GroupState& state, std::span<const Sign> alpha, double level);

struct GroupTraining {
    Weights weights; ///< alpha_hat at the last frame of the block
    TrainingTrace trace;
};

/// Runs one full training block of k_o*N frames on the link vector `h`.
GroupTraining train_group(std::span<const double> h, const NetworkConfig& config, RandomStream& stream,
                          TraceOptions options = {});

struct NetworkTraining {
    std::vector<Weights> weights;       ///< final weights of each group, in group order
    std::vector<TrainingTrace> traces;
    std::int64_t frames = 0;            ///< total frames consumed, M * k_o * N
};

/// Trains groups one after another; group i learns its direct link h[i][i][.]
/// while all other groups are silent.
NetworkTraining train_network(const ChannelRealization& channels, const NetworkConfig& config,
                              const RandomStream& stream, TraceOptions options = {});

} // namespace dbf
