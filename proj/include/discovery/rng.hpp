// Copyright 2026 The discovery authors
// SPDX-License-Identifier: Apache-2.0
//
// Counter-based random streams.
//
// Every consumer owns an RngStream addressed by (root seed, stream id). The
// generator is Philox4x32-10: the root seed is the 64-bit key, the stream id
// occupies the upper 64 bits of the 128-bit counter and the draw position the
// lower 64 bits, so two streams with different ids never share a counter value.
#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <span>
#include <string_view>

namespace discovery {

/// Deterministic 64-bit mixing of a path of integers into a stream id.
std::uint64_t derive_stream_id(std::initializer_list<std::uint64_t> path);

/// FNV-1a 64-bit hash of a string, for stream ids and cache keys.
std::uint64_t hash_text(std::string_view text);

class RngStream
{
  public:
    using result_type = std::uint64_t;

    RngStream(std::uint64_t root_seed, std::uint64_t stream_id);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01();
    /// Uniform on (0, 1), never returns 0.
    double uniform_open01();
    /// Uniform integer in [0, n).
    std::uint64_t uniform_index(std::uint64_t n);
    /// Standard normal (Marsaglia polar method; the second variate of each
    /// pair is kept for the next call).
    double normal();
    /// Standard exponential.
    double exponential();

    std::uint64_t root_seed() const { return key_; }
    std::uint64_t stream_id() const { return stream_; }

  private:
    void refill();

    std::uint64_t key_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int used_ = 4;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Categorical draw from nonnegative weights summing to ~1 (or any positive
/// total). Returns the index of the selected weight.
std::size_t sample_categorical(std::span<const double> weights, RngStream& rng);

/// One Philox4x32-10 block, exposed for known-answer tests.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

} // namespace discovery
