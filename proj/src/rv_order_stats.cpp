#include "ordstat/rv_order_stats.hpp"

#include "ordstat/errors.hpp"
#include "ordstat/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ordstat {

namespace {

// Uniform on the open interval (0, 1).
double open_uniform(CounterRng& rng) {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

void check_ells(std::span<const std::size_t> ells, std::size_t n) {
    if (ells.empty()) throw InvalidArgument("at least one ell is required");
    for (std::size_t l : ells)
        if (l == 0 || l > n) throw InvalidArgument("ell must lie in 1..n");
}

}  // namespace

Distribution Distribution::constant(double c) {
    Distribution d("const", QuantileFunction::constant(c));
    d.atoms_ = {c};
    d.probs_ = {1.0};
    return d;
}

Distribution Distribution::two_point(double hi, double p) {
    if (!(p > 0.0 && p < 1.0) || !(hi > 0.0)) throw InvalidArgument("two_point needs 0 < p < 1, hi > 0");
    Distribution d("two-point", QuantileFunction::step({0.0, p, 1.0}, {hi, 0.0}, "two-point"));
    d.atoms_ = {0.0, hi};
    d.probs_ = {1.0 - p, p};
    return d;
}

Distribution Distribution::uniform() { return Distribution("uniform", QuantileFunction::uniform()); }

Distribution Distribution::exponential() {
    Distribution d("exp", QuantileFunction::exponential());
    d.exponential_ = true;
    return d;
}

Distribution Distribution::discrete(std::vector<double> values, std::vector<double> probs,
                                    std::string name) {
    if (values.empty() || values.size() != probs.size())
        throw InvalidArgument("discrete law: values/probabilities mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] >= 0.0) || !(probs[i] > 0.0)) throw InvalidArgument("discrete law: bad atom");
        total += probs[i];
    }
    if (std::abs(total - 1.0) > 1e-12) throw InvalidArgument("discrete law: probabilities must sum to 1");
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] > values[b]; });
    std::vector<double> breaks{0.0}, levels;
    double acc = 0.0;
    for (std::size_t k : order) {
        acc += probs[k];
        breaks.push_back(acc);
        levels.push_back(values[k]);
    }
    breaks.back() = 1.0;
    Distribution d(name, QuantileFunction::step(breaks, levels, name));
    d.atoms_ = std::move(values);
    d.probs_ = std::move(probs);
    return d;
}

Distribution Distribution::by_name(const std::string& name) {
    if (name == "const" || name == "constant") return constant();
    if (name == "two-point" || name == "twopoint") return two_point();
    if (name == "uniform" || name == "unif") return uniform();
    if (name == "exp" || name == "exponential") return exponential();
    throw InvalidArgument("unknown distribution '" + name + "'");
}

double Distribution::sample(CounterRng& rng) const {
    const double z = open_uniform(rng);
    if (exponential_) return -std::log(z);
    return xstar_(z);
}

std::vector<std::vector<Estimate>> simulate_expected_sums(
    const std::vector<std::vector<double>>& xs, const Distribution& dist,
    std::span<const std::size_t> ells, const MonteCarlo& mc) {
    if (xs.empty()) return {};
    const std::size_t n = xs.front().size();
    for (const auto& x : xs)
        if (x.size() != n) throw InvalidArgument("all x must share one length");
    check_ells(ells, n);
    if (mc.trials == 0) throw InvalidArgument("trials must be >= 1");
    const std::size_t top = *std::max_element(ells.begin(), ells.end());
    const std::size_t nx = xs.size(), nl = ells.size();

    std::vector<std::vector<double>> absx(nx, std::vector<double>(n));
    for (std::size_t r = 0; r < nx; ++r)
        for (std::size_t i = 0; i < n; ++i) absx[r][i] = std::abs(xs[r][i]);

    const std::uint64_t batches = (mc.trials + kBatchSize - 1) / kBatchSize;
    std::vector<Moments> parts(batches * nx * nl);
    parallel_for(batches, mc.threads, [&](std::size_t b) {
        CounterRng rng(mc.seed, b);
        const std::uint64_t count = std::min<std::uint64_t>(kBatchSize, mc.trials - b * kBatchSize);
        std::vector<double> draws(count * n);
        for (double& d : draws) d = dist.sample(rng);
        std::vector<double> best(top);
        for (std::size_t r = 0; r < nx; ++r) {
            const double* xr = absx[r].data();
            Moments* out = &parts[(b * nx + r) * nl];
            for (std::uint64_t t = 0; t < count; ++t) {
                const double* row = &draws[t * n];
                std::size_t filled = 0;
                // best[0..filled) kept in decreasing order
                for (std::size_t i = 0; i < n; ++i) {
                    const double v = xr[i] * row[i];
                    if (filled == top && v <= best[top - 1]) continue;
                    std::size_t pos = filled < top ? filled++ : top - 1;
                    while (pos > 0 && best[pos - 1] < v) {
                        best[pos] = best[pos - 1];
                        --pos;
                    }
                    best[pos] = v;
                }
                for (std::size_t k = 0; k < nl; ++k) {
                    double s = 0.0;
                    for (std::size_t j = 0; j < ells[k]; ++j) s += best[j];
                    out[k].add(s);
                }
            }
        }
    });

    std::vector<std::vector<Estimate>> result(nx, std::vector<Estimate>(nl));
    for (std::size_t r = 0; r < nx; ++r)
        for (std::size_t k = 0; k < nl; ++k) {
            Moments m;
            for (std::uint64_t b = 0; b < batches; ++b) m.merge(parts[(b * nx + r) * nl + k]);
            result[r][k] = Estimate{m.mean, m.standard_error(), m.count, std::nullopt};
        }
    return result;
}

Estimate simulate_expected_sum(std::span<const double> x, const Distribution& dist,
                               std::size_t ell, const MonteCarlo& mc) {
    if (x.empty()) throw InvalidArgument("x must be nonempty");
    const std::size_t ells[] = {ell};
    return simulate_expected_sums({std::vector<double>(x.begin(), x.end())}, dist, ells, mc)[0][0];
}

double enumerate_expected_sum(std::span<const double> x, const Distribution& dist,
                              std::size_t ell) {
    if (!dist.is_discrete()) throw InvalidArgument("enumeration needs a discrete law");
    const std::size_t n = x.size();
    if (ell == 0 || ell > n) throw InvalidArgument("ell must lie in 1..n");
    const auto& atoms = dist.atoms();
    const auto& probs = dist.probabilities();
    const std::size_t k = atoms.size();
    double outcomes = 1.0;
    for (std::size_t i = 0; i < n; ++i) outcomes *= static_cast<double>(k);
    if (outcomes > 1e7) throw DomainTooLarge("enumeration over more than 1e7 outcomes");

    std::vector<std::size_t> digit(n, 0);
    std::vector<double> vals(n);
    double total = 0.0;
    while (true) {
        double p = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            p *= probs[digit[i]];
            vals[i] = std::abs(x[i]) * atoms[digit[i]];
        }
        std::partial_sort(vals.begin(), vals.begin() + static_cast<std::ptrdiff_t>(ell), vals.end(),
                          std::greater<>());
        total += p * std::accumulate(vals.begin(), vals.begin() + static_cast<std::ptrdiff_t>(ell), 0.0);
        std::size_t i = 0;
        while (i < n && ++digit[i] == k) digit[i++] = 0;
        if (i == n) break;
    }
    return total;
}

std::vector<std::vector<RatioEstimate>> theorem_ratios(
    const std::vector<std::vector<double>>& xs, const Distribution& dist,
    std::span<const std::size_t> ells, const MonteCarlo& mc) {
    auto sims = simulate_expected_sums(xs, dist, ells, mc);
    std::vector<std::vector<RatioEstimate>> out(xs.size(), std::vector<RatioEstimate>(ells.size()));
    for (std::size_t k = 0; k < ells.size(); ++k) {
        const OrliczFunction m = m_from_quantile(dist.xstar(), ells[k]);
        for (std::size_t r = 0; r < xs.size(); ++r) {
            RatioEstimate& e = out[r][k];
            e.expectation = sims[r][k];
            e.norm = luxemburg_norm(m, xs[r]);
            if (e.norm == 0.0) throw InvalidArgument("theorem_ratio needs x != 0");
            e.ratio = e.expectation.value / e.norm;
            const double half = 1.96 * e.expectation.standard_error() / e.norm;
            e.ci_low = e.ratio - half;
            e.ci_high = e.ratio + half;
        }
    }
    return out;
}

RatioEstimate theorem_ratio(std::span<const double> x, const Distribution& dist, std::size_t ell,
                            const MonteCarlo& mc) {
    const std::size_t ells[] = {ell};
    return theorem_ratios({std::vector<double>(x.begin(), x.end())}, dist, ells, mc)[0][0];
}

double m_from_rv(const Distribution& dist, std::size_t ell, double s) {
    return m_from_rv(dist.xstar(), ell, s);
}

}  // namespace ordstat
