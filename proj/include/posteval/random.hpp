#pragma once

// Counter-based random numbers. Every stream is addressed by
// (seed, stream id) and every draw by its position in the stream, so a draw
// never depends on how many draws other events consumed. This is what makes
// parallel evaluation reproduce the serial result bit for bit.
//
// Generator: Philox4x32-10 (Salmon et al., SC'11), key = seed, counter =
// (stream id, block index). Uniform doubles use the top 53 bits of a 64-bit
// word; normals use Box-Muller on two uniforms.

#include <array>
#include <cstdint>

namespace posteval {

using PhiloxBlock = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxBlock philox4x32_10(PhiloxBlock counter, PhiloxKey key) noexcept;

/// Sub-stream tags; mixed with the event id to form a stream id.
enum class StreamTag : std::uint32_t {
    Generate = 1,
    CrpsEnsemble = 2,
    SingleDraw = 3,
    Shuffle = 4,
    User = 5,
};

std::uint64_t stream_id(StreamTag tag, std::uint64_t index) noexcept;

class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream) noexcept;

    std::uint64_t next_u64() noexcept;
    /// Uniform in [0, 1).
    double uniform() noexcept;
    /// Uniform in (0, 1).
    double uniform_open() noexcept;
    double normal() noexcept;

private:
    void refill() noexcept;

    PhiloxKey key_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    PhiloxBlock buffer_{};
    int used_ = 4;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace posteval
