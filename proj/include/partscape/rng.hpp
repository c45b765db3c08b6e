#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <utility>

namespace partscape {

/// Counter-based generator: the i-th output is a SplitMix64 finalizer applied
/// to key + i * gamma. Streams are derived by hashing the key with a stream id,
/// so every chain gets an independent, reproducible sequence regardless of
/// how work is scheduled.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed) noexcept : key_(mix(seed ^ 0x6a09e667f3bcc909ULL)) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept { return next(); }

    std::uint64_t next() noexcept { return mix(key_ + (counter_++) * kGamma); }

    /// Independent child stream; does not advance this generator.
    Rng split(std::uint64_t stream) const noexcept {
        Rng child(0);
        child.key_ = mix(key_ ^ mix(stream + 0x3c6ef372fe94f82bULL));
        return child;
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound), unbiased (Lemire's multiply-shift with rejection).
    std::uint64_t below(std::uint64_t bound) noexcept {
        if (bound <= 1) return 0;
        unsigned __int128 product = static_cast<unsigned __int128>(next()) * bound;
        auto low = static_cast<std::uint64_t>(product);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                product = static_cast<unsigned __int128>(next()) * bound;
                low = static_cast<std::uint64_t>(product);
            }
        }
        return static_cast<std::uint64_t>(product >> 64);
    }

    /// Standard normal via Box-Muller; consumes two outputs per call.
    double normal() noexcept {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Fisher-Yates; the same permutation on every platform.
    template <class T>
    void shuffle(std::span<T> values) noexcept {
        for (std::size_t i = values.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(below(i));
            std::swap(values[i - 1], values[j]);
        }
    }

    std::uint64_t counter() const noexcept { return counter_; }

private:
    static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

    static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace partscape
