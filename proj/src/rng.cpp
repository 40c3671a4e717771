#include "spde/rng.hpp"

#include "spde/spectral.hpp"

#include <cmath>

namespace spde {

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

// (0,1), never 0 or 1: 53 random bits plus half an ulp.
inline double to_open_unit(std::uint32_t hi, std::uint32_t lo) noexcept
{
    const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

// Counter word layout: {block, step low, stream low, stream high}; key: seed, with
// the high step word folded into the key so steps beyond 2^32 stay distinct.
inline PhiloxCounter address(std::uint64_t step, std::uint64_t stream, std::uint32_t block) noexcept
{
    return {block, static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(stream),
            static_cast<std::uint32_t>(stream >> 32)};
}

inline PhiloxKey key_for(std::uint64_t seed, std::uint64_t step) noexcept
{
    return {static_cast<std::uint32_t>(seed),
            static_cast<std::uint32_t>(seed >> 32) ^ static_cast<std::uint32_t>(step >> 32)};
}

}  // namespace

PhiloxCounter philox4x32(PhiloxCounter ctr, PhiloxKey key) noexcept
{
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, ctr[0], hi0, lo0);
        mulhilo(kMul1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

void NoiseSource::next_normals(std::span<double> out) noexcept
{
    normals_at(counter_, out);
    ++counter_;
}

void NoiseSource::normals_at(std::uint64_t step, std::span<double> out) const noexcept
{
    const PhiloxKey key = key_for(seed_, step);
    std::uint32_t block = 0;
    for (std::size_t i = 0; i < out.size(); i += 2, ++block) {
        const auto r = philox4x32(address(step, stream_id_, block), key);
        const double u1 = to_open_unit(r[0], r[1]);
        const double u2 = to_open_unit(r[2], r[3]);
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * kPi * u2;
        out[i] = radius * std::cos(angle);
        if (i + 1 < out.size()) {
            out[i + 1] = radius * std::sin(angle);
        }
    }
}

}  // namespace spde
