#include "ordstat/map_family.hpp"

#include "ordstat/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ordstat {

namespace {

std::vector<std::string> default_atoms(std::size_t size) {
    std::vector<std::string> atoms(size);
    for (std::size_t j = 0; j < size; ++j) atoms[j] = std::to_string(j);
    return atoms;
}

void check_distribution(const std::vector<double>& w, const char* what) {
    if (w.empty()) throw InvalidArgument(std::string(what) + ": no weights");
    double total = 0.0;
    for (double x : w) {
        if (!std::isfinite(x) || x < 0.0)
            throw InvalidArgument(std::string(what) + ": weights must be finite and >= 0");
        total += x;
    }
    if (std::abs(total - 1.0) > kWeightSumTol * static_cast<double>(w.size()) &&
        std::abs(total - 1.0) > kWeightSumTol)
        throw InvalidArgument(std::string(what) + ": weights sum to " + std::to_string(total));
}

std::vector<double> cumulative(const std::vector<double>& w) {
    std::vector<double> c(w.size());
    std::partial_sum(w.begin(), w.end(), c.begin());
    return c;
}

std::size_t pick(const std::vector<double>& cum, double u) {
    // u in [0,1); last index absorbs rounding in the total.
    const double target = u * cum.back();
    auto it = std::upper_bound(cum.begin(), cum.end(), target);
    if (it == cum.end()) --it;
    return static_cast<std::size_t>(it - cum.begin());
}

std::uint64_t factorial(std::size_t n) {
    std::uint64_t f = 1;
    for (std::size_t k = 2; k <= n; ++k) f *= k;
    return f;
}

}  // namespace

WeightedSpace WeightedSpace::uniform(std::size_t size) {
    if (size == 0) throw InvalidArgument("uniform space needs at least one atom");
    WeightedSpace s;
    s.atoms = default_atoms(size);
    s.weights.assign(size, 1.0 / static_cast<double>(size));
    s.exact_weights = std::vector<Rational>(size, Rational(1, static_cast<long long>(size)));
    return s;
}

WeightedSpace WeightedSpace::from_weights(std::vector<double> weights,
                                          std::vector<std::string> atoms) {
    check_distribution(weights, "codomain");
    if (atoms.empty()) atoms = default_atoms(weights.size());
    if (atoms.size() != weights.size())
        throw InvalidArgument("codomain: atom and weight counts differ");
    WeightedSpace s;
    s.atoms = std::move(atoms);
    s.weights = std::move(weights);
    return s;
}

WeightedSpace WeightedSpace::from_exact(std::vector<Rational> weights,
                                        std::vector<std::string> atoms) {
    Rational total = 0;
    for (const auto& w : weights) {
        if (w < 0) throw InvalidArgument("codomain: negative weight");
        total += w;
    }
    if (weights.empty() || total != 1) throw InvalidArgument("codomain: exact weights must sum to 1");
    if (atoms.empty()) atoms = default_atoms(weights.size());
    if (atoms.size() != weights.size())
        throw InvalidArgument("codomain: atom and weight counts differ");
    WeightedSpace s;
    s.atoms = std::move(atoms);
    for (const auto& w : weights) s.weights.push_back(to_double(w));
    s.exact_weights = std::move(weights);
    return s;
}

bool WeightedSpace::is_uniform() const {
    if (exact_weights) {
        return std::all_of(exact_weights->begin(), exact_weights->end(),
                           [&](const Rational& w) { return w == exact_weights->front(); });
    }
    const double u = 1.0 / static_cast<double>(size());
    return std::all_of(weights.begin(), weights.end(),
                       [&](double w) { return std::abs(w - u) <= kProbabilityTol; });
}

MapFamily MapFamily::explicit_family(std::size_t n, WeightedSpace codomain,
                                     std::vector<std::vector<Element>> maps,
                                     std::vector<double> weights,
                                     std::optional<std::vector<Rational>> exact) {
    if (n == 0) throw InvalidArgument("map family: domain must be nonempty");
    if (maps.empty()) throw InvalidArgument("map family: no maps");
    if (maps.size() != weights.size())
        throw InvalidArgument("map family: map and weight counts differ");
    check_distribution(weights, "map family");
    if (exact) {
        if (exact->size() != maps.size())
            throw InvalidArgument("map family: exact weight count differs");
        Rational total = 0;
        for (const auto& w : *exact) total += w;
        if (total != 1) throw InvalidArgument("map family: exact weights must sum to 1");
    }
    MapFamily f;
    f.kind_ = Kind::Explicit;
    f.n_ = n;
    f.label_ = "explicit";
    f.size_ = maps.size();
    f.maps_.reserve(maps.size() * n);
    for (const auto& m : maps) {
        if (m.size() != n) throw InvalidArgument("map family: map has wrong length");
        for (Element e : m) {
            if (e >= codomain.size())
                throw InvalidArgument("map family: map entry outside the codomain");
            f.maps_.push_back(e);
        }
    }
    f.codomain_ = std::move(codomain);
    f.uniform_ = exact ? std::all_of(exact->begin(), exact->end(),
                                     [&](const Rational& w) { return w == exact->front(); })
                       : std::all_of(weights.begin(), weights.end(),
                                     [&](double w) { return w == weights.front(); });
    f.cumulative_ = cumulative(weights);
    f.weights_ = std::move(weights);
    f.exact_ = std::move(exact);
    return f;
}

MapFamily MapFamily::uniform_family(std::size_t n, WeightedSpace codomain,
                                    std::vector<std::vector<Element>> maps) {
    const auto count = static_cast<long long>(maps.size());
    if (count == 0) throw InvalidArgument("map family: no maps");
    std::vector<double> w(maps.size(), 1.0 / static_cast<double>(count));
    std::vector<Rational> exact(maps.size(), Rational(1, count));
    return explicit_family(n, std::move(codomain), std::move(maps), std::move(w), std::move(exact));
}

MapFamily MapFamily::symmetric(std::size_t n) {
    if (n == 0) throw InvalidArgument("symmetric group needs n >= 1");
    if (n > 10) throw DomainTooLarge("symmetric group enumeration limited to n <= 10");
    MapFamily f;
    f.kind_ = Kind::Symmetric;
    f.n_ = n;
    f.codomain_ = WeightedSpace::uniform(n);
    f.label_ = "sym:" + std::to_string(n);
    f.size_ = factorial(n);
    return f;
}

MapFamily MapFamily::product(std::size_t n, WeightedSpace codomain) {
    if (n == 0) throw InvalidArgument("product family needs n >= 1");
    MapFamily f;
    f.kind_ = Kind::Product;
    f.n_ = n;
    f.label_ = "product:" + std::to_string(n) + "x" + std::to_string(codomain.size());
    const double total = std::pow(static_cast<double>(codomain.size()), static_cast<double>(n));
    f.enumerable_ = total <= static_cast<double>(kEnumerationLimit);
    if (f.enumerable_) {
        std::uint64_t s = 1;
        for (std::size_t i = 0; i < n; ++i) s *= codomain.size();
        f.size_ = s;
    }
    f.uniform_ = codomain.is_uniform();
    f.cumulative_ = cumulative(codomain.weights);
    f.codomain_ = std::move(codomain);
    return f;
}

std::uint64_t MapFamily::size() const {
    if (!enumerable_) throw ImplicitFamily();
    return size_;
}

void MapFamily::map_at(std::uint64_t index, std::span<Element> out) const {
    if (!enumerable_) throw ImplicitFamily();
    if (index >= size_) throw IndexOutOfRange("map index out of range");
    if (out.size() != n_) throw InvalidArgument("map buffer has wrong length");
    switch (kind_) {
        case Kind::Explicit:
            std::copy_n(maps_.begin() + static_cast<std::ptrdiff_t>(index * n_), n_, out.begin());
            break;
        case Kind::Symmetric: {
            // Factorial number system, lexicographic order.
            std::vector<Element> pool(n_);
            std::iota(pool.begin(), pool.end(), Element{0});
            std::uint64_t rest = index;
            for (std::size_t i = 0; i < n_; ++i) {
                const std::uint64_t f = factorial(n_ - 1 - i);
                const std::size_t d = static_cast<std::size_t>(rest / f);
                rest %= f;
                out[i] = pool[d];
                pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(d));
            }
            break;
        }
        case Kind::Product: {
            const std::uint64_t base = codomain_.size();
            for (std::size_t i = 0; i < n_; ++i) {
                out[i] = static_cast<Element>(index % base);
                index /= base;
            }
            break;
        }
    }
}

std::vector<Element> MapFamily::map_at(std::uint64_t index) const {
    std::vector<Element> g(n_);
    map_at(index, g);
    return g;
}

double MapFamily::weight(std::uint64_t index) const {
    if (!enumerable_) throw ImplicitFamily();
    if (index >= size_) throw IndexOutOfRange("map index out of range");
    switch (kind_) {
        case Kind::Explicit:
            return weights_[index];
        case Kind::Symmetric:
            return 1.0 / static_cast<double>(size_);
        case Kind::Product: {
            double w = 1.0;
            const std::uint64_t base = codomain_.size();
            for (std::size_t i = 0; i < n_; ++i) {
                w *= codomain_.weights[index % base];
                index /= base;
            }
            return w;
        }
    }
    return 0.0;
}

bool MapFamily::has_exact_weights() const noexcept {
    switch (kind_) {
        case Kind::Explicit:
            return exact_.has_value();
        case Kind::Symmetric:
            return true;
        case Kind::Product:
            return codomain_.has_exact();
    }
    return false;
}

Rational MapFamily::exact_weight(std::uint64_t index) const {
    if (!has_exact_weights()) throw InvalidArgument("family has no exact weights");
    if (!enumerable_) throw ImplicitFamily();
    if (index >= size_) throw IndexOutOfRange("map index out of range");
    switch (kind_) {
        case Kind::Explicit:
            return (*exact_)[index];
        case Kind::Symmetric:
            return Rational(1, static_cast<long long>(size_));
        case Kind::Product: {
            Rational w = 1;
            const std::uint64_t base = codomain_.size();
            for (std::size_t i = 0; i < n_; ++i) {
                w *= (*codomain_.exact_weights)[index % base];
                index /= base;
            }
            return w;
        }
    }
    return 0;
}

void MapFamily::sample(CounterRng& rng, std::span<Element> out) const {
    if (out.size() != n_) throw InvalidArgument("map buffer has wrong length");
    switch (kind_) {
        case Kind::Explicit: {
            const std::size_t m = pick(cumulative_, rng.uniform());
            std::copy_n(maps_.begin() + static_cast<std::ptrdiff_t>(m * n_), n_, out.begin());
            break;
        }
        case Kind::Symmetric:
            std::iota(out.begin(), out.end(), Element{0});
            for (std::size_t i = n_; i > 1; --i)
                std::swap(out[i - 1], out[rng.below(i)]);
            break;
        case Kind::Product:
            for (auto& e : out) e = static_cast<Element>(pick(cumulative_, rng.uniform()));
            break;
    }
}

MapFamily affine_family(const FiniteField& field) {
    const unsigned n = field.order();
    std::vector<std::vector<Element>> maps;
    maps.reserve(static_cast<std::size_t>(n) * n);
    for (Element slope = 0; slope < n; ++slope)
        for (Element shift = 0; shift < n; ++shift) {
            std::vector<Element> g(n);
            for (Element i = 0; i < n; ++i) g[i] = field.add(field.mul(slope, i), shift);
            maps.push_back(std::move(g));
        }
    auto f = MapFamily::uniform_family(n, WeightedSpace::uniform(n), std::move(maps));
    f.set_label("affine:" + std::to_string(n));
    return f;
}

MapFamily symmetric_group(std::size_t n) { return MapFamily::symmetric(n); }

MapFamily full_function_family(std::size_t n, const WeightedSpace& codomain) {
    return MapFamily::product(n, codomain);
}

bool ConditionReport::passes(double cg) const {
    return marginal_ok && best_cg <= cg * (1.0 + kProbabilityTol);
}

double cardinality_lower_bound(std::size_t n, double cg) {
    if (!(cg > 0.0)) throw InvalidArgument("C_G must be positive");
    return static_cast<double>(n) * static_cast<double>(n) / cg;
}

ConditionReport verify_conditions(const MapFamily& family) {
    if (!family.enumerable()) throw ImplicitFamily();
    const std::size_t n = family.domain_size();
    const std::size_t atoms = family.codomain().size();
    const std::uint64_t size = family.size();
    const auto& mu = family.codomain().weights;

    ConditionReport rep;
    rep.family_size = size;
    rep.exact = family.has_exact_weights() && family.codomain().has_exact();

    const std::size_t pairs = n * (n - 1) / 2;
    auto pair_index = [n](std::size_t i1, std::size_t i2) {
        // i1 < i2, row-major over the strict upper triangle
        return i1 * n - i1 * (i1 + 1) / 2 + (i2 - i1 - 1);
    };
    const std::size_t cells = pairs * atoms * atoms;

    // With equal map weights, integer counts scaled by that weight are exact.
    const bool counting = family.uniform_weights();
    std::vector<std::uint64_t> marg_count, joint_count;
    std::vector<double> marg_p, joint_p;
    std::vector<Rational> marg_q, joint_q;
    const bool rational_acc = rep.exact && !counting;
    if (counting) {
        marg_count.assign(n * atoms, 0);
        joint_count.assign(cells, 0);
    } else if (rational_acc) {
        marg_q.assign(n * atoms, 0);
        joint_q.assign(cells, 0);
    } else {
        marg_p.assign(n * atoms, 0.0);
        joint_p.assign(cells, 0.0);
    }

    std::vector<Element> g(n);
    for (std::uint64_t m = 0; m < size; ++m) {
        family.map_at(m, g);
        if (counting) {
            for (std::size_t i = 0; i < n; ++i) ++marg_count[i * atoms + g[i]];
            for (std::size_t i1 = 0; i1 < n; ++i1)
                for (std::size_t i2 = i1 + 1; i2 < n; ++i2)
                    ++joint_count[(pair_index(i1, i2) * atoms + g[i1]) * atoms + g[i2]];
        } else if (rational_acc) {
            const Rational w = family.exact_weight(m);
            for (std::size_t i = 0; i < n; ++i) marg_q[i * atoms + g[i]] += w;
            for (std::size_t i1 = 0; i1 < n; ++i1)
                for (std::size_t i2 = i1 + 1; i2 < n; ++i2)
                    joint_q[(pair_index(i1, i2) * atoms + g[i1]) * atoms + g[i2]] += w;
        } else {
            const double w = family.weight(m);
            for (std::size_t i = 0; i < n; ++i) marg_p[i * atoms + g[i]] += w;
            for (std::size_t i1 = 0; i1 < n; ++i1)
                for (std::size_t i2 = i1 + 1; i2 < n; ++i2)
                    joint_p[(pair_index(i1, i2) * atoms + g[i1]) * atoms + g[i2]] += w;
        }
    }

    const Rational unit_weight =
        counting && rep.exact ? family.exact_weight(0) : Rational(0);
    const double unit_weight_d = counting ? family.weight(0) : 0.0;
    auto joint_double = [&](std::size_t c) {
        if (counting) return static_cast<double>(joint_count[c]) * unit_weight_d;
        if (rational_acc) return to_double(joint_q[c]);
        return joint_p[c];
    };
    auto joint_exact = [&](std::size_t c) -> Rational {
        if (counting) return unit_weight * joint_count[c];
        return joint_q[c];
    };

    // Condition (i) on singletons.
    rep.marginal_ok = true;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < atoms; ++j) {
            const std::size_t c = i * atoms + j;
            if (rep.exact) {
                const Rational p = counting ? unit_weight * marg_count[c] : marg_q[c];
                const Rational diff = abs(p - (*family.codomain().exact_weights)[j]);
                rep.marginal_deviation = std::max(rep.marginal_deviation, to_double(diff));
                if (diff != 0) rep.marginal_ok = false;
            } else {
                const double p = counting ? static_cast<double>(marg_count[c]) * unit_weight_d
                                          : marg_p[c];
                const double diff = std::abs(p - mu[j]);
                rep.marginal_deviation = std::max(rep.marginal_deviation, diff);
                if (diff > kProbabilityTol) rep.marginal_ok = false;
            }
        }

    // Condition (ii): best constant over singletons, zero-weight atoms skipped.
    if (pairs == 0) {
        rep.best_cg = 1.0;
        if (rep.exact) rep.best_cg_exact = Rational(1);
    } else {
        double best = -1.0;
        for (std::size_t c = 0; c < cells; ++c) {
            const std::size_t j2 = c % atoms, j1 = (c / atoms) % atoms;
            const double denom = mu[j1] * mu[j2];
            if (denom <= 0.0) continue;
            best = std::max(best, joint_double(c) / denom);
        }
        std::optional<Rational> best_q;
        std::size_t best_cell = 0;
        for (std::size_t c = 0; c < cells; ++c) {
            const std::size_t j2 = c % atoms, j1 = (c / atoms) % atoms;
            const double denom = mu[j1] * mu[j2];
            if (denom <= 0.0) continue;
            const double r = joint_double(c) / denom;
            if (r < best * (1.0 - 1e-9)) continue;
            if (rep.exact) {
                const auto& q = *family.codomain().exact_weights;
                const Rational rq = joint_exact(c) / (q[j1] * q[j2]);
                if (!best_q || rq > *best_q) {
                    best_q = rq;
                    best_cell = c;
                }
            } else if (!best_q && r == best) {
                best_q = Rational(0);  // marks the witness as found
                best_cell = c;
            }
        }
        const std::size_t pair = best_cell / (atoms * atoms);
        std::size_t i1 = 0;
        while (pair_index(i1, n - 1) < pair) ++i1;
        const std::size_t i2 = pair - pair_index(i1, i1 + 1) + i1 + 1;
        rep.witness = IndexPair{i1, (best_cell / atoms) % atoms, i2, best_cell % atoms};
        if (rep.exact) {
            rep.best_cg_exact = *best_q;
            rep.best_cg = to_double(*best_q);
        } else {
            rep.best_cg = best;
        }
    }

    if (family.codomain().is_uniform()) {
        const double bound = cardinality_lower_bound(atoms, rep.best_cg);
        rep.cardinality_bound = bound;
        if (rep.exact && rep.best_cg_exact) {
            const Rational qb = Rational(static_cast<long long>(atoms * atoms)) / *rep.best_cg_exact;
            rep.cardinality_ok = Rational(static_cast<long long>(size)) >= qb;
        } else {
            rep.cardinality_ok = static_cast<double>(size) >= bound * (1.0 - kProbabilityTol);
        }
    }
    return rep;
}

}  // namespace ordstat
