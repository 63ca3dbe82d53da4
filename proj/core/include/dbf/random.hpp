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

#include <array>
#include <cstdint>
#include <limits>
#include <random>
#include <string_view>

namespace dbf {

/// Philox4x32-10 counter-based block cipher (Salmon et al., SC'11).
/// Maps a 128-bit counter and a 64-bit key to 128 pseudo-random bits.
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter apply(Counter ctr, Key key) noexcept;
};

/// 64-bit FNV-1a hash, used to turn purpose labels into key material.
std::uint64_t hash_label(std::string_view label) noexcept;

/// Deterministic random stream keyed by (seed, purpose, index).
///
/// Two streams with equal keys produce identical sequences; streams with
/// different keys are statistically independent. A stream never shares state
/// with another, so trials can run on any thread in any order.
///
/// Satisfies UniformRandomBitGenerator (64-bit output).
class RandomStream {
public:
    using result_type = std::uint64_t;

    RandomStream(std::uint64_t seed, std::string_view purpose, std::uint64_t index = 0);

    /// Independent child stream for a sub-purpose (a trial, a group, ...).
    RandomStream derive(std::string_view purpose, std::uint64_t index = 0) const;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept;

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Standard normal draw.
    double normal() { return normal_(*this); }

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t purpose() const noexcept { return purpose_; }
    std::uint64_t index() const noexcept { return index_; }

private:
    RandomStream(std::uint64_t seed, std::uint64_t purpose, std::uint64_t index, int);

    void refill() noexcept;

    std::uint64_t seed_;
    std::uint64_t purpose_;
    std::uint64_t index_;
    Philox4x32::Key key_{};
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 2> buffer_{};
    unsigned cursor_ = 2;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

} // namespace dbf
