#pragma once

#include "ordstat/rational.hpp"
#include "ordstat/rng.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>

namespace ordstat {

// A value with its standard error; exact results carry the rational and a
// zero standard error.
struct Estimate {
    double value = 0.0;
    double stderr_ = 0.0;
    std::uint64_t trials = 0;
    std::optional<Rational> exact;

    double standard_error() const noexcept { return stderr_; }
};

struct MonteCarlo {
    std::uint64_t trials = 100'000;
    std::uint64_t seed = kDefaultSeed;
    unsigned threads = 1;
};

inline constexpr std::uint64_t kBatchSize = 1024;

// Running mean/variance (Welford), mergeable in a fixed order.
struct Moments {
    std::uint64_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) noexcept {
        ++count;
        const double d = x - mean;
        mean += d / static_cast<double>(count);
        m2 += d * (x - mean);
    }
    void merge(const Moments& o) noexcept {
        if (o.count == 0) return;
        if (count == 0) {
            *this = o;
            return;
        }
        const double total = static_cast<double>(count + o.count);
        const double d = o.mean - mean;
        mean += d * static_cast<double>(o.count) / total;
        m2 += o.m2 + d * d * static_cast<double>(count) * static_cast<double>(o.count) / total;
        count += o.count;
    }
    double standard_error() const noexcept {
        if (count < 2) return 0.0;
        return std::sqrt(m2 / static_cast<double>(count - 1) / static_cast<double>(count));
    }
};

// Mean of trial(rng) over mc.trials draws. Trials are grouped in fixed batches,
// batch b drawing from CounterRng(seed, b), so the result does not depend on
// the thread count.
Estimate monte_carlo_mean(const MonteCarlo& mc, const std::function<double(CounterRng&)>& trial);

}  // namespace ordstat
