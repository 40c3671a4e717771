#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace spde {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as easy
/// as 1, 2, 3"). Stateless: maps a 128-bit counter and 64-bit key to 128 random bits.
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

[[nodiscard]] PhiloxCounter philox4x32(PhiloxCounter counter, PhiloxKey key) noexcept;

/// Counter-addressed Gaussian noise.
///
/// Draw i of step `counter` on stream `stream_id` under `seed` is a pure function of
/// (seed, stream_id, counter, i), so equal addresses reproduce equal numbers and
/// distinct streams never overlap.
class NoiseSource {
public:
    NoiseSource() = default;
    NoiseSource(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t counter = 0) noexcept
        : seed_(seed), stream_id_(stream_id), counter_(counter)
    {}

    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] std::uint64_t stream_id() const noexcept { return stream_id_; }
    [[nodiscard]] std::uint64_t counter() const noexcept { return counter_; }

    /// Fill `out` with independent standard normals for the current step and advance
    /// the counter by one block.
    void next_normals(std::span<double> out) noexcept;

    /// Same draws as next_normals at the given step, without touching the counter.
    void normals_at(std::uint64_t step, std::span<double> out) const noexcept;


private:
    std::uint64_t seed_ = 0;
    std::uint64_t stream_id_ = 0;
    std::uint64_t counter_ = 0;
};

}  // namespace spde
