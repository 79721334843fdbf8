#include "ordstat/orlicz.hpp"

#include "ordstat/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ordstat {

namespace {

constexpr double kConvexTol = 1e-9;

struct Point {
    double x, y;
};

// Lower convex hull of points sorted by x (duplicates in x keep the lowest y).
std::vector<Point> lower_hull(const std::vector<Point>& pts) {
    std::vector<Point> h;
    for (const Point& p : pts) {
        if (!h.empty() && p.x == h.back().x) {
            if (p.y < h.back().y) h.pop_back();
            else continue;
        }
        while (h.size() >= 2) {
            const Point& a = h[h.size() - 2];
            const Point& b = h.back();
            // Drop b when it lies on or above the chord a -> p.
            if ((b.y - a.y) * (p.x - a.x) >= (p.y - a.y) * (b.x - a.x)) h.pop_back();
            else break;
        }
        h.push_back(p);
    }
    return h;
}

OrliczFunction grid_from_points(const std::vector<Point>& pts, std::optional<double> cap,
                                std::optional<double> tail) {
    std::vector<double> s, v;
    for (const Point& p : pts) {
        s.push_back(p.x);
        v.push_back(p.y);
    }
    if (cap) cap = s.back();
    if (tail && s.size() >= 2) {
        const std::size_t m = s.size() - 1;
        const double last = (v[m] - v[m - 1]) / (s[m] - s[m - 1]);
        tail = std::max(*tail, last);
    }
    return OrliczFunction::grid(std::move(s), std::move(v), cap, tail);
}

double bisect_increasing(const std::function<double(double)>& f, double target, double lo,
                         double hi) {
    // Smallest x in [lo, hi] with f(x) >= target, to machine precision.
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (f(mid) >= target) hi = mid;
        else lo = mid;
    }
    return hi;
}

}  // namespace

OrliczFunction OrliczFunction::power(double p, double coef) {
    if (!(p >= 1.0) || !std::isfinite(p)) throw InvalidArgument("power Orlicz function needs p >= 1");
    if (!(coef > 0.0) || !std::isfinite(coef)) throw InvalidArgument("power coefficient must be > 0");
    OrliczFunction m;
    m.kind_ = Kind::Power;
    m.p_ = p;
    m.coef_ = coef;
    m.name_ = "power(p=" + std::to_string(p) + ")";
    return m;
}

OrliczFunction OrliczFunction::hinge(double theta, double slope) {
    if (!(theta >= 0.0) || !(slope > 0.0)) throw InvalidArgument("hinge needs theta >= 0, slope > 0");
    OrliczFunction m = theta > 0.0 ? grid({0.0, theta}, {0.0, 0.0}, std::nullopt, slope)
                                   : grid({0.0}, {0.0}, std::nullopt, slope);
    m.hinge_theta_ = theta;
    m.name_ = "hinge(theta=" + std::to_string(theta) + ")";
    return m;
}

OrliczFunction OrliczFunction::grid(std::vector<double> nodes, std::vector<double> values,
                                    std::optional<double> cap, std::optional<double> tail_slope) {
    if (nodes.empty() || nodes.size() != values.size())
        throw InvalidArgument("grid Orlicz function: node/value mismatch");
    if (nodes.front() != 0.0 || values.front() != 0.0)
        throw InvalidArgument("grid Orlicz function must start at (0, 0)");
    if (cap && tail_slope) throw InvalidArgument("grid Orlicz function: cap and tail slope are exclusive");
    double prev_slope = 0.0;
    for (std::size_t k = 1; k < nodes.size(); ++k) {
        if (!(nodes[k] > nodes[k - 1])) throw InvalidArgument("grid nodes must increase");
        if (!std::isfinite(values[k])) throw InvalidArgument("grid values must be finite");
        const double slope = (values[k] - values[k - 1]) / (nodes[k] - nodes[k - 1]);
        if (slope < -kConvexTol * std::max(1.0, std::abs(values[k])))
            throw InvalidArgument("grid Orlicz function must be nondecreasing");
        if (slope < prev_slope - kConvexTol * std::max(1.0, std::abs(prev_slope)))
            throw InvalidArgument("grid Orlicz function must be convex");
        prev_slope = std::max(prev_slope, slope);
    }
    if (cap) {
        if (std::abs(*cap - nodes.back()) > 1e-12 * std::max(1.0, *cap))
            throw InvalidArgument("grid cap must coincide with the last node");
        if (nodes.size() < 2) throw InvalidArgument("capped grid needs a positive domain");
        cap = nodes.back();
    } else {
        if (!tail_slope) {
            if (nodes.size() < 2) throw InvalidArgument("grid needs two nodes or a tail slope");
            tail_slope = prev_slope;
        }
        if (*tail_slope < prev_slope - kConvexTol * std::max(1.0, prev_slope))
            throw InvalidArgument("tail slope below the last segment slope breaks convexity");
        if (!(*tail_slope > 0.0)) throw InvalidArgument("Orlicz function cannot be constant");
    }
    OrliczFunction m;
    m.kind_ = Kind::Grid;
    m.name_ = "grid";
    m.nodes_ = std::move(nodes);
    m.values_ = std::move(values);
    m.cap_ = cap;
    m.tail_ = tail_slope;
    return m;
}

OrliczFunction OrliczFunction::smooth(std::function<double(double)> value,
                                      std::function<double(double)> derivative, std::string name) {
    if (!value || !derivative) throw InvalidArgument("smooth Orlicz function needs value and derivative");
    OrliczFunction m;
    m.kind_ = Kind::Smooth;
    m.name_ = std::move(name);
    m.value_fn_ = std::move(value);
    m.derivative_fn_ = std::move(derivative);
    return m;
}

double OrliczFunction::operator()(double t) const {
    if (t < 0.0) throw InvalidArgument("Orlicz function evaluated at a negative argument");
    switch (kind_) {
        case Kind::Power:
            return coef_ * std::pow(t, p_);
        case Kind::Smooth:
            return value_fn_(t);
        case Kind::Grid: {
            const double last = nodes_.back();
            if (t >= last) {
                if (t == last) return values_.back();
                if (cap_) return kInfinity;
                return values_.back() + *tail_ * (t - last);
            }
            auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t);
            const std::size_t k = static_cast<std::size_t>(it - nodes_.begin());
            const double w = (t - nodes_[k - 1]) / (nodes_[k] - nodes_[k - 1]);
            return values_[k - 1] + w * (values_[k] - values_[k - 1]);
        }
    }
    return 0.0;
}

double OrliczFunction::derivative(double t) const {
    switch (kind_) {
        case Kind::Power:
            if (p_ == 1.0) return coef_;
            return coef_ * p_ * std::pow(t, p_ - 1.0);
        case Kind::Smooth:
            return derivative_fn_(t);
        case Kind::Grid: {
            const std::size_t m = nodes_.size() - 1;
            auto slope = [&](std::size_t k) {
                return (values_[k] - values_[k - 1]) / (nodes_[k] - nodes_[k - 1]);
            };
            if (t >= nodes_.back()) {
                // At the cap, the left slope is a valid subgradient.
                if (cap_) return t > nodes_.back() ? kInfinity : slope(m);
                return *tail_;
            }
            auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t);
            return slope(static_cast<std::size_t>(it - nodes_.begin()));
        }
    }
    return 0.0;
}

ConjugateTable conjugate_table(const OrliczFunction& m, const ConjugateOptions& opts) {
    switch (m.kind()) {
        case OrliczFunction::Kind::Power: {
            const double p = m.exponent(), c = m.coefficient();
            if (p == 1.0) return {OrliczFunction::grid({0.0, c}, {0.0, 0.0}, c), {}};
            const double q = p / (p - 1.0);
            const double cq = (1.0 - 1.0 / p) * std::pow(p * c, -1.0 / (p - 1.0));
            return {OrliczFunction::power(q, cq), {}};
        }
        case OrliczFunction::Kind::Grid: {
            const auto& s = m.nodes();
            const auto& v = m.values();
            std::vector<Point> pts{{0.0, 0.0}};
            for (std::size_t j = 1; j < s.size(); ++j) {
                const double slope = (v[j] - v[j - 1]) / (s[j] - s[j - 1]);
                pts.push_back({slope, slope * s[j] - v[j]});
            }
            std::optional<double> cap, tail;
            if (m.cap()) {
                tail = s.back();
            } else {
                const double t = *m.tail_slope();
                pts.push_back({t, t * s.back() - v.back()});
                cap = t;
            }
            auto hull = lower_hull(pts);
            if (tail && hull.size() < 2 && *tail == 0.0)
                throw InvalidArgument("conjugate of a degenerate Orlicz function");
            return {grid_from_points(hull, cap, tail), {}};
        }
        case OrliczFunction::Kind::Smooth: {
            if (opts.nodes < 2 || !(opts.t_min > 0.0) || !(opts.t_max > opts.t_min))
                throw InvalidArgument("bad conjugate tabulation options");
            const double x_lo = m.derivative(opts.t_min);
            const double x_hi = m.derivative(opts.t_max);
            if (!(x_hi > x_lo) || !(x_lo >= 0.0))
                throw InvalidArgument("smooth Orlicz function must have increasing derivative");
            std::vector<Point> pts{{0.0, 0.0}};
            std::vector<double> maximizers;
            auto deriv = [&](double t) { return m.derivative(t); };
            const double log_lo = std::log(std::max(x_lo, 1e-300));
            const double log_hi = std::log(x_hi);
            for (std::size_t k = 0; k < opts.nodes; ++k) {
                const double frac = static_cast<double>(k) / static_cast<double>(opts.nodes - 1);
                const double x = x_lo > 0.0 ? std::exp(log_lo + frac * (log_hi - log_lo))
                                            : x_hi * frac;
                if (x <= 0.0) continue;
                const double t = bisect_increasing(deriv, x, 0.0, 2.0 * opts.t_max);
                pts.push_back({x, x * t - m(t)});
                maximizers.push_back(t);
            }
            auto hull = lower_hull(pts);
            return {grid_from_points(hull, std::nullopt, maximizers.back()), std::move(maximizers)};
        }
    }
    throw InvalidArgument("unknown Orlicz function kind");
}

OrliczFunction conjugate(const OrliczFunction& m, const ConjugateOptions& opts) {
    return conjugate_table(m, opts).conjugate;
}

double luxemburg_norm(const OrliczFunction& m, std::span<const double> x, double rel_tol) {
    double largest = 0.0;
    for (double xi : x) {
        if (!std::isfinite(xi)) throw InvalidArgument("luxemburg_norm: non-finite entry");
        largest = std::max(largest, std::abs(xi));
    }
    if (largest == 0.0) return 0.0;
    auto modular = [&](double lambda) {
        double total = 0.0;
        for (double xi : x) {
            if (xi == 0.0) continue;
            total += m(std::abs(xi) / lambda);
            if (!(total <= 1e300)) return kInfinity;
        }
        return total;
    };
    double hi = largest;
    for (int it = 0; modular(hi) > 1.0; ++it) {
        hi *= 2.0;
        if (it > 2000) throw Error("luxemburg_norm: no feasible scale found");
    }
    double lo = hi;
    for (int it = 0; modular(lo) <= 1.0; ++it) {
        lo *= 0.5;
        if (it > 2000) throw Error("luxemburg_norm: modular does not grow");
    }
    const double tol = std::min(rel_tol, 1e-13);
    while (hi - lo > tol * hi) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (modular(mid) <= 1.0) hi = mid;
        else lo = mid;
    }
    return hi;
}

// ---------------------------------------------------------------------------

QuantileFunction QuantileFunction::step(std::vector<double> breaks, std::vector<double> levels,
                                        std::string name) {
    if (breaks.size() != levels.size() + 1 || levels.empty())
        throw InvalidArgument("step quantile: need one more break than levels");
    if (breaks.front() != 0.0 || std::abs(breaks.back() - 1.0) > 1e-12)
        throw InvalidArgument("step quantile must cover [0, 1]");
    breaks.back() = 1.0;
    for (std::size_t k = 0; k < levels.size(); ++k) {
        if (!(breaks[k + 1] > breaks[k])) throw InvalidArgument("step quantile breaks must increase");
        if (!(levels[k] >= 0.0) || !std::isfinite(levels[k]))
            throw InvalidArgument("step quantile levels must be finite and >= 0");
        if (k > 0 && levels[k] > levels[k - 1])
            throw InvalidArgument("step quantile must be nonincreasing");
    }
    QuantileFunction q;
    q.name_ = std::move(name);
    q.breaks_ = std::move(breaks);
    q.levels_ = std::move(levels);
    for (double l : q.levels_)
        if (l > 0.0) q.kinks_.push_back(l);
    for (std::size_t k = 1; k < q.levels_.size(); ++k)
        if (q.levels_[k] != q.levels_[k - 1]) q.jumps_.push_back(q.breaks_[k]);
    return q;
}

QuantileFunction QuantileFunction::constant(double c) {
    if (!(c > 0.0)) throw InvalidArgument("constant quantile must be positive");
    return step({0.0, 1.0}, {c}, "constant");
}

QuantileFunction QuantileFunction::exponential() {
    return closed_form(
        [](double z) { return z <= 0.0 ? kInfinity : -std::log(std::min(z, 1.0)); },
        [](double b) {
            b = std::min(b, 1.0);
            return b <= 0.0 ? 0.0 : b * (1.0 - std::log(b));
        },
        [](double y) { return y <= 0.0 ? 1.0 : std::exp(-y); }, {}, "exponential");
}

QuantileFunction QuantileFunction::uniform() {
    return closed_form(
        [](double z) { return z >= 1.0 ? 0.0 : 1.0 - std::max(z, 0.0); },
        [](double b) {
            b = std::clamp(b, 0.0, 1.0);
            return b - 0.5 * b * b;
        },
        [](double y) { return y <= 0.0 ? 1.0 : std::max(0.0, 1.0 - y); }, {1.0}, "uniform");
}

QuantileFunction QuantileFunction::closed_form(std::function<double(double)> value,
                                               std::function<double(double)> integral,
                                               std::function<double(double)> mass_at_least,
                                               std::vector<double> kinks, std::string name) {
    QuantileFunction q;
    q.name_ = std::move(name);
    q.value_ = std::move(value);
    q.integral_ = std::move(integral);
    q.mass_ = std::move(mass_at_least);
    q.kinks_ = std::move(kinks);
    return q;
}

double QuantileFunction::operator()(double z) const {
    if (!levels_.empty()) {
        if (z < 0.0 || z >= 1.0) return z < 0.0 ? levels_.front() : 0.0;
        auto it = std::upper_bound(breaks_.begin(), breaks_.end(), z);
        return levels_[static_cast<std::size_t>(it - breaks_.begin()) - 1];
    }
    return value_(z);
}

double QuantileFunction::integral(double beta) const {
    if (beta <= 0.0) return 0.0;
    if (!levels_.empty()) {
        double total = 0.0;
        for (std::size_t k = 0; k < levels_.size() && breaks_[k] < beta; ++k)
            total += levels_[k] * (std::min(beta, breaks_[k + 1]) - breaks_[k]);
        return total;
    }
    return integral_(std::min(beta, 1.0));
}

double QuantileFunction::mass_at_least(double y) const {
    if (!levels_.empty()) {
        double m = 0.0;
        for (std::size_t k = 0; k < levels_.size(); ++k)
            if (levels_[k] >= y) m += breaks_[k + 1] - breaks_[k];
        return m;
    }
    return mass_(y);
}

double invert_partial_integral(const QuantileFunction& xstar, double s, double tol) {
    if (s <= 0.0) return 0.0;
    const double total = xstar.mean();
    if (s > total) return kInfinity;
    double lo = 0.0, hi = 1.0;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (xstar.integral(mid) >= s) hi = mid;
        else lo = mid;
    }
    return hi;
}

double mstar_value(const QuantileFunction& xstar, std::size_t ell, double s) {
    if (ell == 0) throw InvalidArgument("ell must be >= 1");
    const double beta = invert_partial_integral(xstar, s);
    return beta / static_cast<double>(ell);
}

OrliczFunction mstar_from_rv(const QuantileFunction& xstar, std::size_t ell, std::size_t nodes) {
    if (ell == 0) throw InvalidArgument("ell must be >= 1");
    if (nodes < 16) throw InvalidArgument("mstar_from_rv needs at least 16 nodes");
    const double total = xstar.mean();
    if (!(total > 0.0)) throw DegenerateQuantile();
    if (!std::isfinite(total)) throw InvalidArgument("quantile function must be integrable");

    // Nodes in beta: uniform, refined geometrically toward both ends, plus jumps.
    std::vector<double> betas{0.0, 1.0};
    const std::size_t uniform = nodes / 2, ends = nodes / 4;
    for (std::size_t k = 1; k < uniform; ++k)
        betas.push_back(static_cast<double>(k) / static_cast<double>(uniform));
    for (std::size_t k = 0; k < ends; ++k) {
        const double e = 1.0 + 11.0 * static_cast<double>(k) / static_cast<double>(ends - 1);
        betas.push_back(std::pow(10.0, -e));
        betas.push_back(1.0 - std::pow(10.0, -1.0 - 5.0 * static_cast<double>(k) /
                                                     static_cast<double>(ends - 1)));
    }
    for (double j : xstar.jumps()) betas.push_back(j);
    std::sort(betas.begin(), betas.end());
    betas.erase(std::unique(betas.begin(), betas.end()), betas.end());

    const double inv_ell = 1.0 / static_cast<double>(ell);
    std::vector<Point> pts;
    for (double b : betas) {
        const double s = xstar.integral(b);
        // Flat stretches of u keep their smallest beta.
        if (!pts.empty() && s <= pts.back().x) continue;
        pts.push_back({s, b * inv_ell});
    }
    pts.front() = {0.0, 0.0};
    auto hull = lower_hull(pts);
    hull.back().x = std::max(hull.back().x, total);
    return grid_from_points(hull, total, std::nullopt);
}

OrliczFunction m_from_quantile(const QuantileFunction& xstar, std::size_t ell, std::size_t nodes) {
    return conjugate(mstar_from_rv(xstar, ell, nodes));
}

double m_from_rv(const QuantileFunction& xstar, std::size_t ell, double s) {
    if (ell == 0) throw InvalidArgument("ell must be >= 1");
    if (s < 0.0) throw InvalidArgument("m_from_rv: s must be >= 0");
    if (s == 0.0) return 0.0;
    const double l = static_cast<double>(ell);
    auto inner = [&](double t) {
        if (t <= 0.0) return 0.0;
        // E |X| 1{|X| >= y} = u(P(|X| >= y))
        return xstar.integral(xstar.mass_at_least(1.0 / (t * l)));
    };
    std::vector<double> cuts{0.0, s};
    for (double y : xstar.kinks())
        if (y > 0.0) {
            const double t = 1.0 / (y * l);
            if (t > 0.0 && t < s) cuts.push_back(t);
        }
    std::sort(cuts.begin(), cuts.end());
    double total = 0.0;
    using boost::math::quadrature::gauss_kronrod;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        if (!(cuts[k + 1] > cuts[k])) continue;
        total += gauss_kronrod<double, 61>::integrate(inner, cuts[k], cuts[k + 1], 20, 1e-13);
    }
    return total;
}

// ---------------------------------------------------------------------------

DualityBracket duality_gap(std::span<const double> f, const OrliczFunction& m,
                           std::size_t budget) {
    DualityBracket out;
    const std::size_t n = f.size();
    out.witness.assign(n, 0.0);
    out.norm = luxemburg_norm(m, f);
    if (out.norm == 0.0) {
        out.lower_ok = out.upper_ok = true;
        return out;
    }
    const OrliczFunction mstar = conjugate(m);
    auto cost = [&](const std::vector<double>& g) {
        double c = 0.0;
        for (double gi : g) c += mstar(std::abs(gi));
        return c;
    };
    auto value = [&](const std::vector<double>& g) {
        double v = 0.0;
        for (std::size_t i = 0; i < n; ++i) v += f[i] * g[i];
        return v;
    };
    auto sgn = [](double x) { return x < 0.0 ? -1.0 : 1.0; };

    // Scale a direction to the boundary of { cost <= 1 }.
    auto to_boundary = [&](std::vector<double> dir) {
        double lo = 0.0, hi = 1.0;
        auto scaled = [&](double t) {
            std::vector<double> g(dir);
            for (double& x : g) x *= t;
            return g;
        };
        for (int it = 0; it < 200 && cost(scaled(hi)) <= 1.0; ++it) {
            lo = hi;
            hi *= 2.0;
        }
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (cost(scaled(mid)) <= 1.0) lo = mid;
            else hi = mid;
        }
        return scaled(lo);
    };

    std::vector<double> best(n, 0.0);
    double best_val = 0.0;
    auto consider = [&](const std::vector<double>& g) {
        if (cost(g) <= 1.0 && value(g) > best_val) {
            best_val = value(g);
            best = g;
        }
    };

    std::vector<double> prop(n);
    for (std::size_t i = 0; i < n; ++i) prop[i] = f[i];
    consider(to_boundary(prop));

    // Young equality candidate: g_i = M'(|f_i| / norm), shrunk into the ball.
    std::vector<double> young(n);
    for (std::size_t i = 0; i < n; ++i)
        young[i] = sgn(f[i]) * m.derivative(std::abs(f[i]) / out.norm);
    const double k = cost(young);
    if (std::isfinite(k)) {
        if (k > 1.0)
            for (double& x : young) x /= k;
        consider(young);
        consider(to_boundary(young));
    }

    // Coordinate ascent: move budget between coordinate pairs.
    std::vector<double> g = best;
    double step = 0.25 * (std::abs(*std::max_element(g.begin(), g.end(), [](double a, double b) {
                              return std::abs(a) < std::abs(b);
                          })) + 1e-12);
    for (std::size_t sweep = 0; sweep < budget && n >= 2 && step > 1e-12; ++sweep) {
        bool improved = false;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j || f[i] == 0.0) continue;
                std::vector<double> trial = g;
                trial[i] += sgn(f[i]) * step;
                // Shrink g_j until feasible.
                double lo = 0.0, hi = 1.0;
                const double gj = trial[j];
                auto at = [&](double t) {
                    trial[j] = gj * (1.0 - t);
                    return cost(trial);
                };
                if (at(1.0) > 1.0) continue;
                if (at(0.0) > 1.0) {
                    for (int it = 0; it < 60; ++it) {
                        const double mid = 0.5 * (lo + hi);
                        if (at(mid) <= 1.0) hi = mid;
                        else lo = mid;
                    }
                    at(hi);
                }
                if (cost(trial) <= 1.0 && value(trial) > value(g) * (1.0 + 1e-15)) {
                    g = trial;
                    improved = true;
                }
            }
        if (!improved) step *= 0.5;
    }
    consider(g);

    out.sup_lower = best_val;
    out.witness = best;

    // Amemiya: sup equals inf_k (1 + sum M(k|f|)) / k; any k is an upper bound.
    auto amemiya = [&](double kk) {
        double s = 1.0;
        for (double fi : f) s += m(kk * std::abs(fi));
        return s / kk;
    };
    double upper = amemiya(1.0 / out.norm);
    double lo = std::log(1e-6 / out.norm), hi = std::log(1e9 / out.norm);
    for (int it = 0; it < 200; ++it) {
        const double a = lo + (hi - lo) * 0.381966, b = hi - (hi - lo) * 0.381966;
        const double fa = amemiya(std::exp(a)), fb = amemiya(std::exp(b));
        upper = std::min({upper, fa, fb});
        if (fa < fb) hi = b;
        else lo = a;
    }
    out.sup_upper = upper;
    const double tol = 1e-9 * out.norm;
    out.lower_ok = out.norm <= out.sup_lower + tol;
    out.upper_ok = out.sup_upper <= 2.0 * out.norm + tol;
    return out;
}

SandwichReport sandwich_check(const QuantileFunction& xstar, std::size_t ell, std::size_t n,
                              std::span<const double> z) {
    if (n == 0 || z.size() != n) throw InvalidArgument("sandwich_check: z must have length n");
    if (ell == 0 || ell > n) throw InvalidArgument("sandwich_check: ell must lie in 1..n");
    std::vector<double> a(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = std::abs(z[i]);
    std::sort(a.begin(), a.end(), std::greater<>());

    std::vector<double> ms(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += ms[i] = mstar_value(xstar, ell, a[i]);
    if (!(total <= 1.0 + 1e-9)) throw NotInBall("sum of M*(|z_i|) exceeds 1");

    const double nd = static_cast<double>(n), ld = static_cast<double>(ell);
    SandwichReport rep;
    const double w = xstar.integral(ld / nd);  // M*(w) = 1/n
    const double thresh = 1.0 / nd;
    while (rep.head < n && ms[rep.head] > thresh * (1.0 + 1e-9)) ++rep.head;

    for (std::size_t i = 0; i < rep.head; ++i) {
        const auto k = static_cast<std::size_t>(std::floor(nd * ms[i] * (1.0 + 1e-12)));
        rep.steps.push_back(std::max<std::size_t>(k, 1));
        const double p = xstar.integral(std::min(1.0, ld * static_cast<double>(rep.steps.back()) / nd));
        rep.head_factor = std::max(rep.head_factor, a[i] / p);
    }
    for (std::size_t i = rep.head; i < n; ++i)
        if (a[i] > 0.0) rep.tail_factor = std::max(rep.tail_factor, a[i] / w);
    rep.constructive_factor = rep.head_factor + rep.tail_factor;

    // Gauge of |z| in B: the positive part of B is { y : sum_i beta(y_i) <= ell }.
    auto needed = [&](double lambda) {
        double s = 0.0;
        for (double ai : a) {
            if (ai == 0.0) continue;
            s += invert_partial_integral(xstar, ai / lambda);
        }
        return s;
    };
    const double top = a.front();
    if (top == 0.0) {
        rep.direct_factor = 0.0;
    } else {
        double hi = std::max(1.0, rep.constructive_factor);
        while (needed(hi) > ld) hi *= 2.0;
        double lo = top / xstar.mean();  // below this some coordinate exceeds E|X|
        if (needed(lo) <= ld) hi = lo;
        for (int it = 0; it < 100 && hi - lo > 1e-13 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (needed(mid) <= ld) hi = mid;
            else lo = mid;
        }
        rep.direct_factor = hi;
    }
    rep.factor = std::min(rep.constructive_factor, rep.direct_factor);
    return rep;
}

std::optional<bool> embedding_hypotheses(const OrliczFunction& m) {
    if (m.kind() != OrliczFunction::Kind::Power) return std::nullopt;
    // c t^p: strictly convex and C^2 for p > 1 (p >= 2 for C^2 at 0 aside),
    // strictly 2-concave for p < 2; M*(1) = 1 fixes the coefficient.
    const double p = m.exponent();
    if (!(p > 1.0 && p < 2.0)) return false;
    const auto mstar = conjugate(m);
    return std::abs(mstar(1.0) - 1.0) < 1e-12;
}

}  // namespace ordstat
