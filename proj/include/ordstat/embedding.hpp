#pragma once

#include "ordstat/map_family.hpp"
#include "ordstat/rng.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace ordstat {

// ave over all 2^n sign patterns of |sum_i +-v_i|. n <= 20.
double rademacher_average(std::span<const double> v);

// Estimate from 2^20 random sign patterns, for longer vectors.
double rademacher_average_sampled(std::span<const double> v, std::uint64_t seed);

// Row-major N x n matrix of +-1.
struct SignMatrix {
    std::size_t n = 0;
    std::vector<std::int8_t> signs;

    std::size_t rows() const noexcept { return n == 0 ? 0 : signs.size() / n; }
    std::span<const std::int8_t> row(std::size_t j) const { return {signs.data() + j * n, n}; }
    // First `rows` rows.
    SignMatrix prefix(std::size_t rows) const;
};

// All 2^n sign vectors (n <= 20).
SignMatrix exhaustive_signs(std::size_t n);

// (1/N) sum_j |<eps^j, v>|.
double sign_average(const SignMatrix& s, std::span<const double> v);

struct SignSelection {
    SignMatrix matrix;
    std::vector<std::size_t> tried;  // N at every doubling round
    double worst_deviation = 0.0;    // max over probes of |avg/ave - 1|
};

inline constexpr double kDefaultDelta = 0.25;
inline constexpr std::size_t kSignBudgetFactor = 1024;

// Random signs, N doubling from 4n (nested sets) until every probe v satisfies
// (1-delta) ave <= avg <= (1+delta) ave. BudgetExceeded past 1024 n.
SignSelection select_sign_vectors(std::size_t n, double delta,
                                  const std::vector<std::vector<double>>& probes,
                                  std::uint64_t seed);

struct EmbeddingSpec {
    std::size_t n = 0;
    std::vector<double> weights;   // a, indexed by field element
    SignMatrix signs;
    MapFamily family = MapFamily::symmetric(1);

    std::size_t output_dimension() const;
    double normalization() const;
};

// Weight presets.
std::vector<double> constant_weights(std::size_t n);
// a_i = i^{1/p - 1/2}, i = 1..n.
std::vector<double> power_weights(std::size_t n, double p);

struct EmbeddingOptions {
    double delta = kDefaultDelta;
    std::size_t probes = 16;   // random x; each is paired with every g
    std::uint64_t seed = kDefaultSeed;
};

// Affine family over GF(n) plus sign vectors selected on probe vectors
// (a_{g(i)} x_i)_i.
EmbeddingSpec make_embedding(std::size_t n, std::vector<double> weights,
                             const EmbeddingOptions& opts = {},
                             SignSelection* selection = nullptr);

// Coordinate (g, j) = sum_i eps_i^j a_{g(i)} x_i / (|G| N).
std::vector<double> psi(const EmbeddingSpec& spec, std::span<const double> x);
double psi_l1(const EmbeddingSpec& spec, std::span<const double> x);

struct ReferenceMode {
    bool exact = true;
    std::uint64_t trials = 100'000;  // sampled permutations
    std::uint64_t seed = kDefaultSeed;

    static ReferenceMode sampled(std::uint64_t trials, std::uint64_t seed) {
        return {false, trials, seed};
    }
    // Exact up to n = 8, sampled beyond.
    static ReferenceMode automatic(std::size_t n, std::uint64_t seed = kDefaultSeed) {
        return n <= 8 ? ReferenceMode{} : sampled(100'000, seed);
    }
};

// (1/n!) sum_pi (sum_i |x_i a_{pi(i)}|^2)^{1/2}; exact mode needs n <= 8.
double reference_norm(std::span<const double> a, std::span<const double> x,
                      const ReferenceMode& mode = {});

struct EquivalenceReport {
    std::size_t n = 0;
    double affine_average = 0.0;     // over G_0
    double symmetric_average = 0.0;  // over S_n
    double split_bound = 0.0;        // (1/n) sum_{k<=n} s(k) + ((1/n) sum_{k>n} s(k)^2)^{1/2}
    double affine_ratio = 0.0;       // affine_average / split_bound
    double symmetric_ratio = 0.0;
    double family_ratio = 0.0;       // affine_average / symmetric_average
    double band = 0.0;
    bool within_band = false;        // both ratios in [1/band, band]
};

inline constexpr double kEquivalenceBand = 4.0;

// a is an n x n row-major matrix; n a prime power <= 8.
EquivalenceReport equivalence_averages_check(std::size_t n, std::span<const double> a,
                                             double band = kEquivalenceBand);

struct DistortionReport {
    std::size_t n = 0;
    std::size_t sign_vectors = 0;
    std::size_t samples = 0;
    double min_ratio = 0.0;
    double max_ratio = 0.0;
    double distortion = 0.0;
    std::uint64_t seed = kDefaultSeed;
};

// Ratio ||Psi x||_1 / reference_norm(a, x) over uniform sphere samples.
DistortionReport distortion_report(const EmbeddingSpec& spec, std::size_t samples,
                                   std::uint64_t seed = kDefaultSeed, unsigned threads = 1);

// Same ratio on caller-supplied points.
DistortionReport distortion_on(const EmbeddingSpec& spec,
                               const std::vector<std::vector<double>>& points,
                               const ReferenceMode& mode);

}  // namespace ordstat
