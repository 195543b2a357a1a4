#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace cevld {

/// One keyed block of Philox4x32-10 (Salmon et al., "Parallel random numbers:
/// as easy as 1, 2, 3", SC'11). Exposed for known-answer tests.
inline std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                                  std::array<std::uint32_t, 2> key) {
    constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
    constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(M0) * ctr[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(M1) * ctr[2];
        const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
        const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += W0;
        key[1] += W1;
    }
    return ctr;
}

/// Counter-based substream for one simulated path: the sequence is a pure
/// function of (seed, stream_id), so ensembles are reproducible and
/// independent of the order in which paths are generated.
class PhiloxStream {
public:
    using result_type = std::uint64_t;

    PhiloxStream(std::uint64_t seed, std::uint64_t stream_id)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          hi_{static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32)} {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~static_cast<result_type>(0); }

    result_type operator()() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const auto block = philox4x32_10(
            {static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
             hi_[0], hi_[1]},
            key_);
        ++block_;
        spare_ = (static_cast<std::uint64_t>(block[3]) << 32) | block[2];
        have_spare_ = true;
        return (static_cast<std::uint64_t>(block[1]) << 32) | block[0];
    }

    /// Uniform on (0, 1), bounded away from both endpoints.
    double uniform01() {
        return static_cast<double>(operator()() >> 11) * 0x1p-53 + 0x1p-54;
    }

    /// Standard normal via Box-Muller; pairs are cached.
    double normal() {
        if (have_normal_) {
            have_normal_ = false;
            return spare_normal_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform01()));
        const double th = 2.0 * 3.14159265358979323846 * uniform01();
        spare_normal_ = r * std::sin(th);
        have_normal_ = true;
        return r * std::cos(th);
    }

private:
    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 2> hi_;
    std::uint64_t block_ = 0;
    std::uint64_t spare_ = 0;
    bool have_spare_ = false;
    double spare_normal_ = 0.0;
    bool have_normal_ = false;
};

} // namespace cevld
