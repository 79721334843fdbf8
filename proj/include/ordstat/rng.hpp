#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace ordstat {

inline constexpr std::uint64_t kDefaultSeed = 0xC0FFEE;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Counter-based stream: the i-th draw is a pure function of (key, i), so any
// task can be replayed independently of scheduling.
class CounterRng {
public:
    using result_type = std::uint64_t;

    constexpr CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
        : key_(splitmix64(seed ^ splitmix64(stream + 0x632BE59BD9B4E019ULL))) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept {
        return std::numeric_limits<result_type>::max();
    }

    constexpr result_type operator()() noexcept {
        return splitmix64(key_ + 0x9E3779B97F4A7C15ULL * ++counter_);
    }

    // Uniform on [0, 1).
    double uniform() noexcept {
        return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
    }

    // Uniform on (0, 1].
    double uniform_pos() noexcept { return 1.0 - uniform(); }

    double normal() noexcept {
        // Box-Muller; one value per call keeps the stream position simple.
        double u1 = uniform_pos();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    std::uint64_t below(std::uint64_t bound) noexcept {
        // Lemire's multiply-shift, bias negligible for the bounds used here.
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>((*this)()) * bound) >> 64);
    }

    int sign() noexcept { return ((*this)() >> 63) ? 1 : -1; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace ordstat
