#include "ordstat/order_stats.hpp"

#include "ordstat/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace ordstat {

namespace {


bool all_integral(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) {
        return x == std::floor(x) && std::abs(x) < 0x1.0p52;
    });
}

std::string describe(const BoundReport& r) {
    std::ostringstream os;
    os << "bound violated: n=" << r.n << " ell=" << r.ell << " C_G=" << r.cg
       << " integral=" << r.integral << " expectation=" << r.expectation
       << " lower_ok=" << r.lower_ok << " upper_ok=" << r.upper_ok;
    return os.str();
}

std::string describe(const ReductionReport& r) {
    std::ostringstream os;
    os << "reduction inequality violated: ell=" << r.ell << " C_G=" << r.cg
       << " E S(a)=" << r.expected_a << " E S(a~)=" << r.expected_averaged;
    return os.str();
}

bool leq_tol(double lhs, double rhs, double margin = 0.0, double tol = kBoundTol) {
    return lhs <= rhs + margin + tol * std::max({1.0, std::abs(lhs), std::abs(rhs)});
}

}  // namespace

BivariateFunction::BivariateFunction(std::size_t n, WeightedSpace codomain,
                                     std::vector<double> values)
    : n_(n), codomain_(std::move(codomain)), values_(std::move(values)) {
    if (n_ == 0) throw InvalidArgument("bivariate function needs n >= 1");
    if (values_.size() != n_ * codomain_.size())
        throw InvalidArgument("bivariate function: value table has wrong size");
    for (double& v : values_) {
        if (!std::isfinite(v)) throw InvalidArgument("bivariate function: non-finite value");
        v = std::abs(v);
    }
}

BivariateFunction BivariateFunction::from_rows(const std::vector<std::vector<double>>& rows,
                                               WeightedSpace codomain) {
    std::vector<double> flat;
    for (const auto& r : rows) {
        if (r.size() != codomain.size())
            throw InvalidArgument("bivariate function: row length differs from atom count");
        flat.insert(flat.end(), r.begin(), r.end());
    }
    return BivariateFunction(rows.size(), std::move(codomain), std::move(flat));
}

BivariateFunction BivariateFunction::from_matrix(const std::vector<std::vector<double>>& rows) {
    if (rows.empty() || rows.front().empty()) throw InvalidArgument("empty matrix");
    return from_rows(rows, WeightedSpace::uniform(rows.front().size()));
}

BivariateFunction BivariateFunction::scaled(double lambda) const {
    std::vector<double> v(values_);
    for (double& x : v) x *= lambda;
    return BivariateFunction(n_, codomain_, std::move(v));
}

StepFunction::StepFunction(std::vector<double> breaks, std::vector<double> levels)
    : breaks_(std::move(breaks)), levels_(std::move(levels)) {
    if (breaks_.size() != levels_.size() + 1)
        throw InvalidArgument("step function: need one more break than levels");
    for (std::size_t j = 0; j + 1 < breaks_.size(); ++j)
        if (!(breaks_[j] < breaks_[j + 1]))
            throw InvalidArgument("step function: breaks must increase");
}

double StepFunction::operator()(double t) const {
    if (levels_.empty() || t < 0.0 || t >= length()) return 0.0;
    auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
    return levels_[static_cast<std::size_t>(it - breaks_.begin()) - 1];
}

double StepFunction::integral(double ell) const {
    double total = 0.0;
    for (std::size_t j = 0; j < levels_.size() && breaks_[j] < ell; ++j)
        total += levels_[j] * (std::min(ell, breaks_[j + 1]) - breaks_[j]);
    return total;
}

double StepFunction::measure_above(double s) const {
    double m = 0.0;
    for (std::size_t j = 0; j < levels_.size(); ++j)
        if (levels_[j] > s) m += breaks_[j + 1] - breaks_[j];
    return m;
}

double kmax(std::span<const double> values, std::size_t k) {
    if (k == 0 || k > values.size())
        throw IndexOutOfRange("kmax: k=" + std::to_string(k) + " outside 1.." +
                              std::to_string(values.size()));
    std::vector<double> v(values.begin(), values.end());
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k - 1), v.end(),
                     std::greater<>());
    return v[k - 1];
}

std::vector<std::size_t> rearrangement_order(const BivariateFunction& a) {
    std::vector<std::size_t> order(a.cell_count());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto v = a.values();
    // Flat index order is (row, atom) lexicographic, so a stable sort gives the tie rule.
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return v[x] > v[y]; });
    return order;
}

StepFunction decreasing_rearrangement(const BivariateFunction& a) {
    std::vector<double> breaks{0.0};
    std::vector<double> levels;
    double pos = 0.0;
    for (std::size_t c : rearrangement_order(a)) {
        const double m = a.mass(c);
        if (m <= 0.0) continue;
        pos += m;
        const double level = a.values()[c];
        if (!levels.empty() && levels.back() == level) {
            breaks.back() = pos;
        } else {
            levels.push_back(level);
            breaks.push_back(pos);
        }
    }
    // Absorb rounding so the plateaus tile [0, n) exactly.
    if (!levels.empty()) breaks.back() = a.total_mass();
    return StepFunction(std::move(breaks), std::move(levels));
}

double integral_rearrangement(const BivariateFunction& a, double ell) {
    if (!(ell > 0.0) || ell > a.total_mass())
        throw InvalidArgument("integral_rearrangement: ell must lie in (0, n]");
    if (a.codomain().has_exact()) return to_double(integral_rearrangement_exact(a, Rational(ell)));
    double total = 0.0, pos = 0.0;
    for (std::size_t c : rearrangement_order(a)) {
        if (pos >= ell) break;
        const double m = a.mass(c);
        total += a.values()[c] * (std::min(ell, pos + m) - pos);
        pos += m;
    }
    return total;
}

Rational integral_rearrangement_exact(const BivariateFunction& a, const Rational& ell) {
    if (!a.codomain().has_exact()) throw InvalidArgument("codomain has no exact weights");
    if (ell <= 0 || ell > static_cast<long long>(a.domain_size()))
        throw InvalidArgument("integral_rearrangement: ell must lie in (0, n]");
    const auto& q = *a.codomain().exact_weights;
    Rational total = 0, pos = 0;
    for (std::size_t c : rearrangement_order(a)) {
        if (pos >= ell) break;
        const Rational& m = q[c % a.atom_count()];
        const Rational take = (pos + m <= ell) ? m : Rational(ell - pos);
        total += Rational(a.values()[c]) * take;
        pos += m;
    }
    return total;
}

double order_stat_sum(const BivariateFunction& a, std::span<const Element> g, std::size_t ell) {
    const std::size_t n = a.domain_size();
    if (g.size() != n) throw InvalidArgument("order_stat_sum: map has wrong length");
    if (ell == 0 || ell > n) throw InvalidArgument("order_stat_sum: ell must lie in 1..n");
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (g[i] >= a.atom_count()) throw InvalidArgument("order_stat_sum: map leaves the codomain");
        v[i] = a(i, g[i]);
    }
    std::partial_sort(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(ell), v.end(),
                      std::greater<>());
    return std::accumulate(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(ell), 0.0);
}

std::vector<Estimate> expected_sums_exact(const BivariateFunction& a, const MapFamily& family) {
    if (!family.enumerable()) throw ImplicitFamily();
    const std::size_t n = a.domain_size();
    if (family.domain_size() != n || family.codomain().size() != a.atom_count())
        throw InvalidArgument("family and function shapes differ");
    const std::uint64_t size = family.size();
    std::vector<Estimate> out(n);
    std::vector<Element> g(n);
    std::vector<double> v(n);

    if (family.has_exact_weights()) {
        const bool integral = all_integral(a.values());
        const bool counting = family.uniform_weights();
        std::vector<Rational> acc(n, Rational(0));
        std::vector<__int128> iacc(n, 0);
        std::vector<Rational> qv;
        if (!integral) qv.assign(a.values().begin(), a.values().end());
        std::vector<std::size_t> idx(n);
        for (std::uint64_t m = 0; m < size; ++m) {
            family.map_at(m, g);
            for (std::size_t i = 0; i < n; ++i) idx[i] = i * a.atom_count() + g[i];
            std::sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) {
                return a.values()[x] > a.values()[y];
            });
            if (integral) {
                __int128 prefix = 0;
                if (counting) {
                    for (std::size_t k = 0; k < n; ++k) {
                        prefix += static_cast<long long>(a.values()[idx[k]]);
                        iacc[k] += prefix;
                    }
                } else {
                    const Rational w = family.exact_weight(m);
                    for (std::size_t k = 0; k < n; ++k) {
                        prefix += static_cast<long long>(a.values()[idx[k]]);
                        acc[k] += w * static_cast<long long>(prefix);
                    }
                }
            } else {
                Rational prefix = 0;
                const Rational w = counting ? Rational(1) : family.exact_weight(m);
                for (std::size_t k = 0; k < n; ++k) {
                    prefix += qv[idx[k]];
                    acc[k] += counting ? prefix : Rational(w * prefix);
                }
            }
        }
        const Rational unit = counting ? family.exact_weight(0) : Rational(1);
        for (std::size_t k = 0; k < n; ++k) {
            Rational e;
            if (integral && counting) {
                // __int128 -> cpp_int through two 64-bit halves
                const __int128 x = iacc[k];
                const bool neg = x < 0;
                const unsigned __int128 ux = neg ? static_cast<unsigned __int128>(-x)
                                                 : static_cast<unsigned __int128>(x);
                boost::multiprecision::cpp_int big = static_cast<std::uint64_t>(ux >> 64);
                big <<= 64;
                big += static_cast<std::uint64_t>(ux);
                if (neg) big = -big;
                e = unit * Rational(big);
            } else {
                e = counting ? Rational(unit * acc[k]) : acc[k];
            }
            out[k].value = to_double(e);
            out[k].exact = std::move(e);
            out[k].trials = size;
        }
        return out;
    }

    // Float weights: per-block partial sums reduced in a fixed order.
    constexpr std::uint64_t kBlock = 4096;
    const std::uint64_t blocks = (size + kBlock - 1) / kBlock;
    std::vector<std::vector<double>> partial(n, std::vector<double>(blocks, 0.0));
    for (std::uint64_t b = 0; b < blocks; ++b) {
        for (std::uint64_t m = b * kBlock; m < std::min(size, (b + 1) * kBlock); ++m) {
            family.map_at(m, g);
            for (std::size_t i = 0; i < n; ++i) v[i] = a(i, g[i]);
            std::sort(v.begin(), v.end(), std::greater<>());
            const double w = family.weight(m);
            double prefix = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                prefix += v[k];
                partial[k][b] += w * prefix;
            }
        }
    }
    for (std::size_t k = 0; k < n; ++k) {
        out[k].value = pairwise_sum(partial[k]);
        out[k].trials = size;
    }
    return out;
}

Estimate expected_sum(const BivariateFunction& a, const MapFamily& family, std::size_t ell,
                      const ExpectationMode& mode) {
    const std::size_t n = a.domain_size();
    if (ell == 0 || ell > n) throw InvalidArgument("expected_sum: ell must lie in 1..n");
    if (family.domain_size() != n || family.codomain().size() != a.atom_count())
        throw InvalidArgument("family and function shapes differ");
    if (std::holds_alternative<ExactMode>(mode)) return expected_sums_exact(a, family)[ell - 1];
    const auto& mc = std::get<MonteCarlo>(mode);
    return monte_carlo_mean(mc, [&](CounterRng& rng) {
        thread_local std::vector<Element> g;
        g.resize(n);
        family.sample(rng, g);
        return order_stat_sum(a, g, ell);
    });
}

BoundViolation::BoundViolation(BoundReport report)
    : Error(describe(report)), report_(std::move(report)) {}

ReductionViolation::ReductionViolation(ReductionReport report)
    : Error(describe(report)), report_(std::move(report)) {}

ConstantPair bound_constants(const Rational& cg) {
    const Rational base = 1 + 2 * cg;
    return {Rational(1) / (48 * base * base), Rational(6 * base)};
}

BoundReport check_bounds(const BivariateFunction& a, const MapFamily& family, std::size_t ell,
                         const Rational& cg, const ExpectationMode& mode,
                         bool throw_on_violation, double tol) {
    if (cg <= 0) throw InvalidArgument("C_G must be positive");
    const auto [c, C] = bound_constants(cg);
    BoundReport r;
    r.n = a.domain_size();
    r.atoms = a.atom_count();
    r.ell = ell;
    r.cg = to_double(cg);
    r.lower_constant = to_double(c);
    r.upper_constant = to_double(C);

    const Estimate e = expected_sum(a, family, ell, mode);
    r.expectation = e.value;
    r.standard_error = e.standard_error();
    const bool exact = e.exact.has_value() && a.codomain().has_exact();
    r.exact = exact;
    if (exact) {
        const Rational integral = integral_rearrangement_exact(a, Rational(ell));
        r.integral = to_double(integral);
        r.lower_ok = c * integral <= *e.exact;
        r.upper_ok = *e.exact <= C * integral;
    } else {
        r.integral = integral_rearrangement(a, static_cast<double>(ell));
        const double margin = std::holds_alternative<MonteCarlo>(mode) ? 4.0 * r.standard_error : 0.0;
        r.lower_ok = leq_tol(r.lower_constant * r.integral, r.expectation, margin, tol);
        r.upper_ok = leq_tol(r.expectation, r.upper_constant * r.integral, margin, tol);
    }
    r.lower_slack = r.integral > 0.0 ? r.expectation / (r.lower_constant * r.integral) : 1.0;
    r.upper_slack = r.expectation > 0.0 ? r.upper_constant * r.integral / r.expectation : 1.0;
    if (throw_on_violation && !r.ok()) throw BoundViolation(r);
    return r;
}

BivariateFunction strictify(const BivariateFunction& a) {
    const auto v = a.values();
    const std::size_t cells = v.size();
    // Ascending by (value, flat index): position in this order is the rank of b.
    std::vector<std::size_t> order(cells);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return v[x] < v[y]; });

    double gap = 1.0;
    for (std::size_t k = 1; k < cells; ++k) {
        const double d = v[order[k]] - v[order[k - 1]];
        if (d > 0.0) gap = std::min(gap, d);
    }
    // Each tie group of size m at level t is spread over t + gap * k / (m + 1).
    std::vector<double> b(cells);
    for (std::size_t start = 0; start < cells;) {
        std::size_t end = start;
        while (end < cells && v[order[end]] == v[order[start]]) ++end;
        const double m = static_cast<double>(end - start);
        for (std::size_t k = start; k < end; ++k)
            b[order[k]] = v[order[k]] + gap * static_cast<double>(k - start + 1) / (m + 1.0);
        start = end;
    }
    bool strict = true;
    for (std::size_t k = 1; k < cells && strict; ++k) strict = b[order[k - 1]] < b[order[k]];
    if (!strict) {
        // Offsets lost to rounding; the rank itself is an order-preserving choice.
        for (std::size_t k = 0; k < cells; ++k) b[order[k]] = static_cast<double>(k);
    }
    return BivariateFunction(a.domain_size(), a.codomain(), std::move(b));
}

LevelSet level_set(const BivariateFunction& a, double t) {
    if (t < 0.0 || t > a.total_mass()) throw InvalidArgument("level_set: t must lie in [0, n]");
    LevelSet h;
    if (t == 0.0) return h;
    const auto order = rearrangement_order(a);
    if (a.codomain().has_exact()) {
        const auto& q = *a.codomain().exact_weights;
        const Rational target(t);
        Rational mass = 0;
        for (std::size_t c : order) {
            const Rational& m = q[c % a.atom_count()];
            if (m == 0) continue;
            const Rational before = mass;
            mass += m;
            h.cells.push_back(c);
            if (mass >= target) {
                h.boundary = c;
                h.boundary_fraction = to_double((target - before) / m);
                break;
            }
        }
        h.mass = to_double(mass);
        return h;
    }
    double mass = 0.0;
    for (std::size_t c : order) {
        const double m = a.mass(c);
        if (m <= 0.0) continue;
        const double before = mass;
        mass += m;
        h.cells.push_back(c);
        if (mass >= t * (1.0 - 1e-12)) {
            h.boundary = c;
            h.boundary_fraction = std::min(1.0, (t - before) / m);
            break;
        }
    }
    h.mass = mass;
    return h;
}

namespace {

BivariateFunction indicator(const BivariateFunction& a, const std::vector<std::size_t>& cells) {
    std::vector<double> v(a.cell_count(), 0.0);
    for (std::size_t c : cells) v[c] = 1.0;
    return BivariateFunction(a.domain_size(), a.codomain(), std::move(v));
}

void check_ell(const BivariateFunction& a, std::size_t ell) {
    if (ell == 0 || ell > a.domain_size()) throw InvalidArgument("ell must lie in 1..n");
}

}  // namespace

BivariateFunction averaged_function(const BivariateFunction& a, std::size_t ell) {
    check_ell(a, ell);
    const double value = integral_rearrangement(a, static_cast<double>(ell)) /
                         static_cast<double>(ell);
    const LevelSet h = level_set(a, static_cast<double>(ell));
    std::vector<double> v(a.cell_count(), 0.0);
    for (std::size_t c : h.cells) v[c] = value;
    return BivariateFunction(a.domain_size(), a.codomain(), std::move(v));
}

ReductionReport verify_reduction(const BivariateFunction& a, const MapFamily& family,
                                 std::size_t ell, const Rational& cg, bool throw_on_violation) {
    check_ell(a, ell);
    if (!family.enumerable()) throw ImplicitFamily();
    if (cg <= 0) throw InvalidArgument("C_G must be positive");
    ReductionReport r;
    r.ell = ell;
    r.cg = to_double(cg);
    const Rational lower_c = Rational(1) / (6 + 12 * cg);
    const Rational upper_c = 8 + 16 * cg;
    r.lower_constant = to_double(lower_c);
    r.upper_constant = to_double(upper_c);

    const LevelSet h = level_set(strictify(a), static_cast<double>(ell));
    r.support_mass = h.mass;
    const BivariateFunction ind = indicator(a, h.cells);
    const Estimate es_a = expected_sums_exact(a, family)[ell - 1];
    const Estimate es_ind = expected_sums_exact(ind, family)[ell - 1];
    r.expected_a = es_a.value;

    r.exact = es_a.exact && es_ind.exact && a.codomain().has_exact();
    if (r.exact) {
        const Rational value = integral_rearrangement_exact(a, Rational(ell)) / ell;
        const Rational es_avg = value * *es_ind.exact;
        r.averaged_value = to_double(value);
        r.expected_averaged = to_double(es_avg);
        r.lower_ok = lower_c * *es_a.exact <= es_avg;
        r.upper_ok = es_avg <= upper_c * *es_a.exact;
    } else {
        const double value = integral_rearrangement(a, static_cast<double>(ell)) /
                             static_cast<double>(ell);
        r.averaged_value = value;
        r.expected_averaged = value * es_ind.value;
        r.lower_ok = leq_tol(r.lower_constant * r.expected_a, r.expected_averaged);
        r.upper_ok = leq_tol(r.expected_averaged, r.upper_constant * r.expected_a);
    }
    if (throw_on_violation && !r.ok()) throw ReductionViolation(r);
    return r;
}

}  // namespace ordstat
