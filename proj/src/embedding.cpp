#include "ordstat/embedding.hpp"

#include "ordstat/errors.hpp"
#include "ordstat/finite_field.hpp"
#include "ordstat/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ordstat {

namespace {

std::vector<double> sphere_point(std::size_t n, CounterRng& rng) {
    std::vector<double> x(n);
    double norm2 = 0.0;
    do {
        norm2 = 0.0;
        for (double& v : x) {
            v = rng.normal();
            norm2 += v * v;
        }
    } while (norm2 == 0.0);
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& v : x) v *= inv;
    return x;
}

double rademacher_checked(std::span<const double> v, std::uint64_t seed) {
    return v.size() <= 20 ? rademacher_average(v) : rademacher_average_sampled(v, seed);
}

}  // namespace

double rademacher_average(std::span<const double> v) {
    if (v.size() > 20) throw DomainTooLarge("rademacher_average enumerates at most 2^20 patterns");
    if (v.empty()) return 0.0;
    // |s| is even in the global sign, so fix the sign of v_0.
    std::vector<double> sums{v[0]};
    sums.reserve(std::size_t{1} << (v.size() - 1));
    for (std::size_t i = 1; i < v.size(); ++i) {
        const std::size_t m = sums.size();
        for (std::size_t k = 0; k < m; ++k) {
            sums.push_back(sums[k] - v[i]);
            sums[k] += v[i];
        }
    }
    for (double& s : sums) s = std::abs(s);
    return pairwise_sum(sums) / static_cast<double>(sums.size());
}

double rademacher_average_sampled(std::span<const double> v, std::uint64_t seed) {
    constexpr std::size_t kPatterns = std::size_t{1} << 20;
    CounterRng rng(seed, 0x5A5A);
    std::vector<double> vals(kPatterns);
    for (double& out : vals) {
        double s = 0.0;
        for (double vi : v) s += rng.sign() * vi;
        out = std::abs(s);
    }
    return pairwise_sum(vals) / static_cast<double>(kPatterns);
}

SignMatrix SignMatrix::prefix(std::size_t r) const {
    if (r > rows()) throw InvalidArgument("sign matrix prefix longer than the matrix");
    SignMatrix out;
    out.n = n;
    out.signs.assign(signs.begin(), signs.begin() + static_cast<std::ptrdiff_t>(r * n));
    return out;
}

SignMatrix exhaustive_signs(std::size_t n) {
    if (n == 0) throw InvalidArgument("n must be >= 1");
    if (n > 20) throw DomainTooLarge("exhaustive sign sets need n <= 20");
    SignMatrix s;
    s.n = n;
    const std::size_t rows = std::size_t{1} << n;
    s.signs.resize(rows * n);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t i = 0; i < n; ++i) s.signs[r * n + i] = ((r >> i) & 1) ? -1 : 1;
    return s;
}

double sign_average(const SignMatrix& s, std::span<const double> v) {
    if (v.size() != s.n) throw InvalidArgument("sign_average: length mismatch");
    const std::size_t rows = s.rows();
    if (rows == 0) throw InvalidArgument("sign matrix is empty");
    double total = 0.0;
    for (std::size_t j = 0; j < rows; ++j) {
        const std::int8_t* e = s.signs.data() + j * s.n;
        double acc = 0.0;
        for (std::size_t i = 0; i < s.n; ++i) acc += e[i] * v[i];
        total += std::abs(acc);
    }
    return total / static_cast<double>(rows);
}

SignSelection select_sign_vectors(std::size_t n, double delta,
                                  const std::vector<std::vector<double>>& probes,
                                  std::uint64_t seed) {
    if (n == 0) throw InvalidArgument("n must be >= 1");
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in (0, 1)");
    if (probes.empty()) throw InvalidArgument("probe set must be nonempty");
    std::vector<double> exact(probes.size());
    for (std::size_t k = 0; k < probes.size(); ++k) {
        if (probes[k].size() != n) throw InvalidArgument("probe length differs from n");
        exact[k] = rademacher_checked(probes[k], seed);
    }

    SignSelection sel;
    sel.matrix.n = n;
    const std::size_t cap = kSignBudgetFactor * n;
    for (std::size_t rows = 4 * n; rows <= cap; rows *= 2) {
        // Row j comes from its own stream, so smaller sets are prefixes of larger ones.
        for (std::size_t j = sel.matrix.rows(); j < rows; ++j) {
            CounterRng rng(seed, j);
            for (std::size_t i = 0; i < n; ++i)
                sel.matrix.signs.push_back(static_cast<std::int8_t>(rng.sign()));
        }
        sel.tried.push_back(rows);
        double worst = 0.0;
        for (std::size_t k = 0; k < probes.size(); ++k) {
            if (exact[k] == 0.0) continue;
            worst = std::max(worst, std::abs(sign_average(sel.matrix, probes[k]) / exact[k] - 1.0));
        }
        sel.worst_deviation = worst;
        if (worst <= delta) return sel;
    }
    throw BudgetExceeded("no sign set of size <= 1024 n met the sandwich");
}

std::size_t EmbeddingSpec::output_dimension() const {
    return static_cast<std::size_t>(family.size()) * signs.rows();
}

double EmbeddingSpec::normalization() const {
    return 1.0 / static_cast<double>(output_dimension());
}

std::vector<double> constant_weights(std::size_t n) { return std::vector<double>(n, 1.0); }

std::vector<double> power_weights(std::size_t n, double p) {
    if (!(p >= 1.0)) throw InvalidArgument("power weights need p >= 1");
    std::vector<double> a(n);
    for (std::size_t i = 0; i < n; ++i)
        a[i] = std::pow(static_cast<double>(i + 1), 1.0 / p - 0.5);
    return a;
}

EmbeddingSpec make_embedding(std::size_t n, std::vector<double> weights,
                             const EmbeddingOptions& opts, SignSelection* selection) {
    if (weights.size() != n) throw InvalidArgument("weights must have length n");
    for (double w : weights)
        if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidArgument("weights must be finite and >= 0");
    if (opts.probes == 0) throw InvalidArgument("at least one probe is required");
    EmbeddingSpec spec;
    spec.n = n;
    spec.weights = std::move(weights);
    spec.family = affine_family(make_field(n));

    std::vector<std::vector<double>> probes;
    std::vector<Element> g(n);
    for (std::size_t k = 0; k < opts.probes; ++k) {
        CounterRng rng(opts.seed, 0x9000'0000ULL + k);
        const auto x = sphere_point(n, rng);
        for (std::uint64_t m = 0; m < spec.family.size(); ++m) {
            spec.family.map_at(m, g);
            std::vector<double> v(n);
            for (std::size_t i = 0; i < n; ++i) v[i] = spec.weights[g[i]] * x[i];
            probes.push_back(std::move(v));
        }
    }
    SignSelection sel = select_sign_vectors(n, opts.delta, probes, opts.seed);
    spec.signs = sel.matrix;
    if (selection) *selection = std::move(sel);
    return spec;
}

std::vector<double> psi(const EmbeddingSpec& spec, std::span<const double> x) {
    const std::size_t n = spec.n;
    if (x.size() != n) throw InvalidArgument("psi: x must have length n");
    const std::size_t rows = spec.signs.rows();
    const std::uint64_t maps = spec.family.size();
    const double scale = spec.normalization();
    std::vector<double> out;
    out.reserve(maps * rows);
    std::vector<Element> g(n);
    std::vector<double> b(n);
    for (std::uint64_t m = 0; m < maps; ++m) {
        spec.family.map_at(m, g);
        for (std::size_t i = 0; i < n; ++i) b[i] = spec.weights[g[i]] * x[i];
        for (std::size_t j = 0; j < rows; ++j) {
            const std::int8_t* e = spec.signs.signs.data() + j * n;
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) acc += e[i] * b[i];
            out.push_back(scale * acc);
        }
    }
    return out;
}

double psi_l1(const EmbeddingSpec& spec, std::span<const double> x) {
    auto v = psi(spec, x);
    for (double& c : v) c = std::abs(c);
    return pairwise_sum(v);
}

double reference_norm(std::span<const double> a, std::span<const double> x,
                      const ReferenceMode& mode) {
    const std::size_t n = a.size();
    if (x.size() != n || n == 0) throw InvalidArgument("reference_norm: a and x must share a length");
    std::vector<double> x2(n), a2(n);
    for (std::size_t i = 0; i < n; ++i) {
        x2[i] = x[i] * x[i];
        a2[i] = a[i] * a[i];
    }
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    auto term = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += x2[i] * a2[perm[i]];
        return std::sqrt(s);
    };
    if (mode.exact) {
        if (n > 8) throw DomainTooLarge("exact permutation average needs n <= 8");
        std::vector<double> terms;
        do terms.push_back(term());
        while (std::next_permutation(perm.begin(), perm.end()));
        return pairwise_sum(terms) / static_cast<double>(terms.size());
    }
    if (mode.trials == 0) throw InvalidArgument("sampled reference needs trials >= 1");
    std::vector<double> terms(mode.trials);
    std::uint64_t t = 0;
    for (std::uint64_t b = 0; t < mode.trials; ++b) {
        CounterRng rng(mode.seed, b);
        for (std::uint64_t k = 0; k < 1024 && t < mode.trials; ++k, ++t) {
            for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
            terms[t] = term();
        }
    }
    return pairwise_sum(terms) / static_cast<double>(terms.size());
}

EquivalenceReport equivalence_averages_check(std::size_t n, std::span<const double> a,
                                             double band) {
    if (a.size() != n * n) throw InvalidArgument("a must be an n x n matrix");
    if (n > 8) throw DomainTooLarge("exact S_n average needs n <= 8");
    EquivalenceReport rep;
    rep.n = n;
    rep.band = band;
    std::vector<double> sq(n * n);
    for (std::size_t k = 0; k < n * n; ++k) sq[k] = a[k] * a[k];

    const MapFamily g0 = affine_family(make_field(n));
    std::vector<Element> g(n);
    std::vector<double> terms;
    for (std::uint64_t m = 0; m < g0.size(); ++m) {
        g0.map_at(m, g);
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += sq[i * n + g[i]];
        terms.push_back(std::sqrt(s));
    }
    rep.affine_average = pairwise_sum(terms) / static_cast<double>(terms.size());

    terms.clear();
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    do {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += sq[i * n + perm[i]];
        terms.push_back(std::sqrt(s));
    } while (std::next_permutation(perm.begin(), perm.end()));
    rep.symmetric_average = pairwise_sum(terms) / static_cast<double>(terms.size());

    std::vector<double> s(n * n);
    for (std::size_t k = 0; k < n * n; ++k) s[k] = std::abs(a[k]);
    std::sort(s.begin(), s.end(), std::greater<>());
    double head = 0.0, tail = 0.0;
    for (std::size_t k = 0; k < n; ++k) head += s[k];
    for (std::size_t k = n; k < n * n; ++k) tail += s[k] * s[k];
    const double nd = static_cast<double>(n);
    rep.split_bound = head / nd + std::sqrt(tail / nd);

    if (rep.split_bound > 0.0) {
        rep.affine_ratio = rep.affine_average / rep.split_bound;
        rep.symmetric_ratio = rep.symmetric_average / rep.split_bound;
    }
    if (rep.symmetric_average > 0.0) rep.family_ratio = rep.affine_average / rep.symmetric_average;
    auto inside = [&](double r) { return r >= 1.0 / band && r <= band; };
    rep.within_band = rep.split_bound == 0.0 ||
                      (inside(rep.affine_ratio) && inside(rep.symmetric_ratio));
    return rep;
}

DistortionReport distortion_on(const EmbeddingSpec& spec,
                               const std::vector<std::vector<double>>& points,
                               const ReferenceMode& mode) {
    if (points.empty()) throw InvalidArgument("distortion needs at least one point");
    DistortionReport rep;
    rep.n = spec.n;
    rep.sign_vectors = spec.signs.rows();
    rep.samples = points.size();
    rep.seed = mode.seed;
    rep.min_ratio = std::numeric_limits<double>::infinity();
    for (const auto& x : points) {
        const double r = psi_l1(spec, x) / reference_norm(spec.weights, x, mode);
        rep.min_ratio = std::min(rep.min_ratio, r);
        rep.max_ratio = std::max(rep.max_ratio, r);
    }
    rep.distortion = rep.max_ratio / rep.min_ratio;
    return rep;
}

DistortionReport distortion_report(const EmbeddingSpec& spec, std::size_t samples,
                                   std::uint64_t seed, unsigned threads) {
    if (samples == 0) throw InvalidArgument("samples must be >= 1");
    const ReferenceMode mode = ReferenceMode::automatic(spec.n, seed);
    std::vector<double> ratios(samples);
    parallel_for(samples, threads, [&](std::size_t k) {
        CounterRng rng(seed, k);
        const auto x = sphere_point(spec.n, rng);
        ratios[k] = psi_l1(spec, x) / reference_norm(spec.weights, x, mode);
    });
    DistortionReport rep;
    rep.n = spec.n;
    rep.sign_vectors = spec.signs.rows();
    rep.samples = samples;
    rep.seed = seed;
    rep.min_ratio = *std::min_element(ratios.begin(), ratios.end());
    rep.max_ratio = *std::max_element(ratios.begin(), ratios.end());
    rep.distortion = rep.max_ratio / rep.min_ratio;
    return rep;
}

}  // namespace ordstat
