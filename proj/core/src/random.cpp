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

#include "dbf/random.hpp"

namespace dbf {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept
{
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

} // namespace

Philox4x32::Counter Philox4x32::apply(Counter c, Key k) noexcept
{
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, c[0], hi0, lo0);
        mulhilo(kMul1, c[2], hi1, lo1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
        k[0] += kWeyl0;
        k[1] += kWeyl1;
    }
    return c;
}

std::uint64_t hash_label(std::string_view label) noexcept
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : label) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    return h;
}

RandomStream::RandomStream(std::uint64_t seed, std::string_view purpose, std::uint64_t index)
    : RandomStream(seed, hash_label(purpose), index, 0)
{
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t purpose, std::uint64_t index, int)
    : seed_(seed), purpose_(purpose), index_(index)
{
    const std::uint64_t k = splitmix64(seed ^ splitmix64(purpose));
    key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
}

RandomStream RandomStream::derive(std::string_view purpose, std::uint64_t index) const
{
    // Child purpose folds in the parent's full identity.
    const std::uint64_t p = splitmix64(purpose_ ^ splitmix64(index_ + 0x632BE59BD9B4E019ull)) ^ hash_label(purpose);
    return RandomStream(seed_, p, index, 0);
}

void RandomStream::refill() noexcept
{
    const Philox4x32::Counter ctr = {static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                                     static_cast<std::uint32_t>(index_), static_cast<std::uint32_t>(index_ >> 32)};
    const auto out = Philox4x32::apply(ctr, key_);
    buffer_[0] = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
    buffer_[1] = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
    ++block_;
    cursor_ = 0;
}

RandomStream::result_type RandomStream::operator()() noexcept
{
    if (cursor_ == 2)
        refill();
    return buffer_[cursor_++];
}

} // namespace dbf
