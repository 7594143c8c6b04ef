#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace pla {

/// Counter-based generator: output i is a SplitMix64 finaliser applied to
/// key + i * golden-gamma. Streams are addressed by (seed, id) so that any
/// shard of a Monte Carlo run can be regenerated without replaying others.
class Rng {
public:
    explicit Rng(std::uint64_t seed) noexcept : key_(mix(seed ^ 0x6a09e667f3bcc909ULL)) {}

    /// Independent stream for (seed, id).
    static Rng stream(std::uint64_t seed, std::uint64_t id) noexcept
    {
        Rng r(seed);
        r.key_ = mix(r.key_ ^ mix(id + 0x3c6ef372fe94f82bULL));
        return r;
    }

    /// Child stream keyed on this generator's key, not its position.
    [[nodiscard]] Rng split(std::uint64_t id) const noexcept
    {
        Rng r(0);
        r.key_ = mix(key_ ^ mix(id + 0xbb67ae8584caa73bULL));
        return r;
    }

    [[nodiscard]] std::uint64_t counter() const noexcept { return counter_; }

    std::uint64_t next_u64() noexcept { return mix(key_ + (++counter_) * kGamma); }

    /// Uniform on [0, 1).
    double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1].
    double uniform_pos() noexcept { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

    /// Uniform integer on [0, n).
    std::uint64_t below(std::uint64_t n) noexcept
    {
        // Lemire's multiply-shift; bias < n / 2^64 is irrelevant at our sizes.
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    /// Circularly symmetric complex Gaussian with total variance `var`.
    std::complex<double> complex_normal(double var = 1.0) noexcept
    {
        const double r = std::sqrt(-var * std::log(uniform_pos()));
        const double phi = 2.0 * std::numbers::pi * uniform();
        return {r * std::cos(phi), r * std::sin(phi)};
    }

    /// Standard real normal (one Box-Muller branch).
    double normal() noexcept
    {
        const double r = std::sqrt(-2.0 * std::log(uniform_pos()));
        return r * std::cos(2.0 * std::numbers::pi * uniform());
    }

private:
    static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

    static constexpr std::uint64_t mix(std::uint64_t z) noexcept
    {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace pla
