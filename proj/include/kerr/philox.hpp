#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace kerr {

/// Counter-based Philox4x32-10 generator (Salmon et al., SC 2011).
///
/// Streams are addressed as (key = 64-bit master seed, counter words 2..3 =
/// 64-bit stream index), so any stream of any trajectory can be regenerated
/// independently and in any order. The draw position within a stream lives in
/// counter words 0..1; the top bit of word 1 separates draw domains so that,
/// e.g., initial-condition sampling never consumes the step-noise sequence.
class PhiloxStream {
public:
    enum class Domain : std::uint32_t { step_noise = 0u, initial_condition = 1u };

    PhiloxStream(std::uint64_t seed, std::uint64_t stream_index,
                 Domain domain = Domain::step_noise)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_lo_(static_cast<std::uint32_t>(stream_index)),
          stream_hi_(static_cast<std::uint32_t>(stream_index >> 32)),
          domain_bit_(static_cast<std::uint32_t>(domain) << 31),
          draw_(0) {}

    /// Next 4x32-bit block; advances the draw counter by one.
    std::array<std::uint32_t, 4> next_block() {
        std::array<std::uint32_t, 4> ctr{
            static_cast<std::uint32_t>(draw_),
            static_cast<std::uint32_t>(draw_ >> 32) | domain_bit_,
            stream_lo_, stream_hi_};
        ++draw_;
        std::array<std::uint32_t, 2> key = key_;
        for (int round = 0; round < 10; ++round) {
            ctr = one_round(ctr, key);
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        return ctr;
    }

    /// Uniform double in [0, 1) built from two 32-bit lanes (53-bit mantissa).
    static double to_uniform(std::uint32_t hi, std::uint32_t lo) {
        const std::uint64_t mant = (static_cast<std::uint64_t>(hi >> 6) << 27) | (lo >> 5);
        return static_cast<double>(mant) * 0x1.0p-53;
    }

    /// One pair of independent standard normals via Box-Muller from one block:
    ///   z0 = sqrt(-2 ln u1) cos(2 pi u2),  z1 = sqrt(-2 ln u1) sin(2 pi u2),
    /// with u1 in (0,1] from lanes 0-1 and u2 in [0,1) from lanes 2-3.
    std::pair<double, double> next_gaussian_pair() {
        const auto b = next_block();
        const double u1 = 1.0 - to_uniform(b[0], b[1]);
        const double u2 = to_uniform(b[2], b[3]);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double phi = 2.0 * std::numbers::pi * u2;
        return {r * std::cos(phi), r * std::sin(phi)};
    }

    std::uint64_t draws() const { return draw_; }

private:
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;

    static std::array<std::uint32_t, 4> one_round(const std::array<std::uint32_t, 4>& c,
                                                  const std::array<std::uint32_t, 2>& key) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
        return {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ key[0],
                static_cast<std::uint32_t>(p1),
                static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ key[1],
                static_cast<std::uint32_t>(p0)};
    }

    std::array<std::uint32_t, 2> key_;
    std::uint32_t stream_lo_;
    std::uint32_t stream_hi_;
    std::uint32_t domain_bit_;
    std::uint64_t draw_;
};

} // namespace kerr
