/*
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
#include <cmath>
#include <cstdint>

namespace spde {

// Philox4x32-10 counter-based generator.
// Salmon et al., "Parallel random numbers: as easy as 1, 2, 3", SC 2011.
//
// The key is derived from the experiment's master seed and the upper counter
// words carry the path index, so every Monte Carlo path owns a disjoint
// counter range of 2^64 blocks. Streams are reproducible regardless of how
// paths are scheduled across threads.
class Philox4x32 {
  public:
    Philox4x32(std::uint64_t key, std::uint64_t stream)
        : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)},
          counter_{0u, 0u, static_cast<std::uint32_t>(stream),
                   static_cast<std::uint32_t>(stream >> 32)} {}

    /// Next 64-bit word; consumes half a 128-bit block.
    std::uint64_t next_u64() {
        if (block_pos_ == 0) {
            block_ = generate_block(counter_, key_);
            advance_counter();
        }
        std::uint32_t lo = block_[2 * block_pos_];
        std::uint32_t hi = block_[2 * block_pos_ + 1];
        block_pos_ = (block_pos_ + 1) % 2;
        return (static_cast<std::uint64_t>(hi) << 32) | lo;
    }

    /// Uniform double in (0, 1]; 53 significant bits.
    double next_uniform() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    static std::array<std::uint32_t, 4> generate_block(std::array<std::uint32_t, 4> counter,
                                                       std::array<std::uint32_t, 2> key) {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += 0x9E3779B9u;
                key[1] += 0xBB67AE85u;
            }
            counter = single_round(counter, key);
        }
        return counter;
    }

  private:
    static std::array<std::uint32_t, 4> single_round(const std::array<std::uint32_t, 4>& c,
                                                     const std::array<std::uint32_t, 2>& k) {
        std::uint64_t p0 = static_cast<std::uint64_t>(0xD2511F53u) * c[0];
        std::uint64_t p1 = static_cast<std::uint64_t>(0xCD9E8D57u) * c[2];
        std::uint32_t lo0 = static_cast<std::uint32_t>(p0), hi0 = static_cast<std::uint32_t>(p0 >> 32);
        std::uint32_t lo1 = static_cast<std::uint32_t>(p1), hi1 = static_cast<std::uint32_t>(p1 >> 32);
        return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }

    void advance_counter() {
        if (++counter_[0] == 0) ++counter_[1];
        // counter_[2..3] hold the stream id and are never bumped.
    }

    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 4> counter_;
    std::array<std::uint32_t, 4> block_{};
    int block_pos_ = 0;
};

/// Standard normal draws via Box-Muller on Philox uniforms. Draw order is part
/// of the output contract: pairs are produced radius-first and handed out
/// cosine term, then sine term.
class GaussianStream {
  public:
    GaussianStream(std::uint64_t key, std::uint64_t stream) : uniforms_(key, stream) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniforms_.next_uniform();            // (0,1], log is finite
        double u2 = uniforms_.next_uniform();
        double radius = std::sqrt(-2.0 * std::log(u1));
        double angle = 2.0 * M_PI * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

    std::uint64_t next_u64() { return uniforms_.next_u64(); }

  private:
    Philox4x32 uniforms_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

/// Deterministic per-path stream: output depends only on (master_seed,
/// path_index), never on scheduling. Distinct indices select disjoint Philox
/// counter ranges, so streams are exactly non-overlapping.
inline GaussianStream derive_path_stream(std::uint64_t master_seed, std::uint64_t path_index) {
    return GaussianStream(master_seed, path_index);
}

}  // namespace spde
