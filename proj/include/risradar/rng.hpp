#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace risradar::rng {

// Philox4x32-10 counter-based generator (Salmon et al., "Parallel random
// numbers: as easy as 1, 2, 3"). Stateless: every 128-bit counter/64-bit key
// pair maps to four independent 32-bit words, so parallel workers can draw
// from disjoint counters without coordination.
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;

    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    static Counter block(std::uint64_t key, Counter ctr) {
        std::uint32_t k0 = static_cast<std::uint32_t>(key);
        std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
            const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
            const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ k0, lo1, hi0 ^ ctr[3] ^ k1, lo0};
            k0 += kWeyl0;
            k1 += kWeyl1;
        }
        return ctr;
    }
};

// (0,1) uniform from one 32-bit word; never returns an endpoint.
inline double u01_open(std::uint32_t w) {
    return (static_cast<double>(w) + 0.5) * 0x1p-32;
}

struct NormalPair {
    double z0;
    double z1;
};

// Two standard normals via Box-Muller from one Philox block (words 0 and 1;
// words 2 and 3 are spare). One block per complex-Gaussian draw keeps the
// counter layout trivially auditable.
inline NormalPair normal_pair(std::uint64_t key, Philox4x32::Counter ctr) {
    const auto w = Philox4x32::block(key, ctr);
    const double u1 = u01_open(w[0]);
    const double u2 = u01_open(w[1]);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(theta), r * std::sin(theta)};
}

struct CnSample {
    double re = 0.0;
    double im = 0.0;

    double abs2() const { return re * re + im * im; }
};

// Circularly-symmetric complex Gaussian CN(0, variance): real and imaginary
// parts are independent N(0, variance/2).
inline CnSample draw_cn(std::uint64_t key, Philox4x32::Counter ctr, double variance) {
    const NormalPair z = normal_pair(key, ctr);
    const double s = std::sqrt(0.5 * variance);
    return {s * z.z0, s * z.z1};
}

} // namespace risradar::rng
