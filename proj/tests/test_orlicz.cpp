#include "ordstat/errors.hpp"
#include "ordstat/orlicz.hpp"
#include "ordstat/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace ordstat;

namespace {

std::vector<double> random_vector(std::mt19937_64& gen, std::size_t n) {
    std::normal_distribution<double> d;
    std::vector<double> x(n);
    for (double& v : x) v = d(gen);
    return x;
}

double lp(const std::vector<double>& x, double p) {
    double s = 0;
    for (double v : x) s += std::pow(std::abs(v), p);
    return std::pow(s, 1.0 / p);
}

// Scales |y| onto { sum M*(|z_i|) = 1 } using the direct inversion.
std::vector<double> boundary_point(const QuantileFunction& q, std::size_t ell, std::vector<double> y) {
    auto total = [&](double lam) {
        double s = 0;
        for (double v : y) s += mstar_value(q, ell, lam * std::abs(v));
        return s;
    };
    double lo = 0, hi = 1;
    while (total(hi) <= 1) hi *= 2;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (total(mid) <= 1 ? lo : hi) = mid;
    }
    for (double& v : y) v *= lo;
    return y;
}

}  // namespace

TEST_CASE("luxemburg norm examples") {
    const std::vector<double> x{3, 4};
    CHECK(luxemburg_norm(OrliczFunction::power(2), x) == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(luxemburg_norm(OrliczFunction::power(1), x) == doctest::Approx(7.0).epsilon(1e-12));
    const std::vector<double> two{2};
    CHECK(luxemburg_norm(OrliczFunction::hinge(1), two) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(luxemburg_norm(OrliczFunction::power(2), std::vector<double>{0, 0}) == 0.0);

    // all-ones vector: 1 / M^{-1}(1/n)
    for (std::size_t n : {1u, 3u, 10u}) {
        const std::vector<double> ones(n, 1.0);
        const double nd = static_cast<double>(n);
        CHECK(luxemburg_norm(OrliczFunction::power(3), ones) == doctest::Approx(std::cbrt(nd)).epsilon(1e-10));
        CHECK(luxemburg_norm(OrliczFunction::hinge(1), ones) == doctest::Approx(1.0 / (1.0 + 1.0 / nd)).epsilon(1e-10));
    }
}

TEST_CASE("luxemburg norm matches p-norms") {
    std::mt19937_64 gen(1);
    for (double p : {1.0, 1.5, 2.0, 3.0}) {
        const auto m = OrliczFunction::power(p);
        for (int t = 0; t < 50; ++t) {
            const auto x = random_vector(gen, 1 + t % 9);
            CHECK(luxemburg_norm(m, x) == doctest::Approx(lp(x, p)).epsilon(1e-9));
        }
    }
}

TEST_CASE("luxemburg norm is a norm") {
    std::mt19937_64 gen(2);
    const OrliczFunction ms[] = {OrliczFunction::power(1.5), OrliczFunction::hinge(0.5),
                                 m_from_quantile(QuantileFunction::exponential(), 2)};
    for (const auto& m : ms)
        for (int t = 0; t < 30; ++t) {
            const auto x = random_vector(gen, 5), y = random_vector(gen, 5);
            std::vector<double> s(5), lx(5);
            for (int i = 0; i < 5; ++i) {
                s[i] = x[i] + y[i];
                lx[i] = 2.5 * x[i];
            }
            const double nx = luxemburg_norm(m, x), ny = luxemburg_norm(m, y);
            CHECK(luxemburg_norm(m, s) <= (nx + ny) * (1 + 1e-9));
            CHECK(luxemburg_norm(m, lx) == doctest::Approx(2.5 * nx).epsilon(1e-9));
        }
}

TEST_CASE("pointwise larger M gives a larger norm") {
    std::mt19937_64 gen(3);
    const auto m1 = OrliczFunction::power(2, 1.0);
    const auto m2 = OrliczFunction::power(2, 3.0);
    const auto h1 = OrliczFunction::hinge(1.0);
    const auto h2 = OrliczFunction::hinge(0.5);
    for (int t = 0; t < 30; ++t) {
        const auto x = random_vector(gen, 4);
        CHECK(luxemburg_norm(m1, x) <= luxemburg_norm(m2, x));
        CHECK(luxemburg_norm(h1, x) <= luxemburg_norm(h2, x));
    }
}

TEST_CASE("capped functions bound the norm from below") {
    const auto m = OrliczFunction::grid({0, 1}, {0, 0.5}, 1.0);
    const std::vector<double> x{3};
    // M(3 / lambda) is finite only for lambda >= 3, where it is 1.5 / lambda.
    CHECK(luxemburg_norm(m, x) == doctest::Approx(3.0).epsilon(1e-10));
}

TEST_CASE("grid validation") {
    CHECK_THROWS_AS(OrliczFunction::grid({0, 1, 2}, {0, 2, 3}), InvalidArgument);  // concave
    CHECK_THROWS_AS(OrliczFunction::grid({0, 1}, {1, 2}), InvalidArgument);        // M(0) != 0
    CHECK_THROWS_AS(OrliczFunction::grid({0, 2, 1}, {0, 1, 2}), InvalidArgument);
    CHECK_THROWS_AS(OrliczFunction::grid({0, 1}, {0, 1}, 2.0), InvalidArgument);   // cap off the grid
    CHECK_THROWS_AS(OrliczFunction::power(0.5), InvalidArgument);
    const auto g = OrliczFunction::grid({0, 1, 2}, {0, 1, 3});
    CHECK(g(1.5) == doctest::Approx(2.0));
    CHECK(g(3.0) == doctest::Approx(5.0));
    CHECK(g.derivative(1.0) == doctest::Approx(2.0));
    const auto c = OrliczFunction::grid({0, 1}, {0, 1}, 1.0);
    CHECK(std::isinf(c(1.5)));
}

TEST_CASE("conjugate examples") {
    const auto half = conjugate(OrliczFunction::power(2, 0.5));
    CHECK(half.exponent() == doctest::Approx(2.0));
    CHECK(half.coefficient() == doctest::Approx(0.5));
    const auto hol = conjugate(OrliczFunction::power(1.5, 1.0 / 1.5));
    CHECK(hol.exponent() == doctest::Approx(3.0));
    CHECK(hol.coefficient() == doctest::Approx(1.0 / 3.0));
    for (double s : {0.1, 1.0, 2.5}) CHECK(hol(s) == doctest::Approx(s * s * s / 3));

    // M(t) = t: M* is 0 up to 1, then +inf.
    const auto l1 = conjugate(OrliczFunction::power(1));
    CHECK(l1(0.7) == 0.0);
    CHECK(std::isinf(l1(1.2)));

    // Hinge (t - 1)_+: M*(s) = s on [0, 1], +inf beyond.
    const auto h = conjugate(OrliczFunction::hinge(1.0));
    CHECK(h(0.5) == doctest::Approx(0.5));
    CHECK(*h.cap() == doctest::Approx(1.0));
    const auto back = conjugate(h);
    for (double t : {0.0, 0.5, 1.0, 2.0, 7.0}) CHECK(back(t) == doctest::Approx(std::max(0.0, t - 1)));
}

TEST_CASE("grid conjugation is exact and involutive") {
    const auto g = OrliczFunction::grid({0, 0.5, 1, 3}, {0, 0.1, 0.5, 2.5}, std::nullopt, 2.0);
    const auto gs = conjugate(g);
    // Brute-force sup over a fine t grid.
    for (double x : {0.1, 0.5, 0.9, 1.3, 1.99}) {
        double best = 0;
        for (int k = 0; k <= 400000; ++k) {
            const double t = k * 1e-4;
            best = std::max(best, x * t - g(t));
        }
        CHECK(gs(x) == doctest::Approx(best).epsilon(1e-6));
    }
    const auto gss = conjugate(gs);
    for (double t = 0; t < 6; t += 0.37) CHECK(gss(t) == doctest::Approx(g(t)).epsilon(1e-12));
}

TEST_CASE("tabulated conjugates of smooth functions are involutive on the grid") {
    struct Case {
        std::function<double(double)> f, df;
    };
    const Case cases[] = {
        {[](double t) { return t * t * t / 3; }, [](double t) { return t * t; }},
        {[](double t) { return std::exp(t) - 1 - t; }, [](double t) { return std::exp(t) - 1; }},
        {[](double t) { return std::pow(t, 1.5); }, [](double t) { return 1.5 * std::sqrt(t); }},
    };
    for (const auto& c : cases) {
        const auto m = OrliczFunction::smooth(c.f, c.df, "test");
        const auto tab = conjugate_table(m, {2048, 1e-4, 5.0});
        const auto mm = conjugate(tab.conjugate);
        double err = 0;
        for (double t : tab.maximizers) err = std::max(err, std::abs(mm(t) - c.f(t)));
        CHECK(err < 1e-6);
    }
}

TEST_CASE("conjugation reverses order") {
    const auto a = OrliczFunction::power(2, 1.0), b = OrliczFunction::power(2, 2.0);
    const auto as = conjugate(a), bs = conjugate(b);
    for (double s : {0.1, 1.0, 3.0}) CHECK(bs(s) <= as(s));
}

TEST_CASE("M* from a random variable") {
    const auto one = QuantileFunction::constant(1.0);
    const auto m2 = mstar_from_rv(one, 2);
    for (double s : {0.0, 0.25, 0.6, 1.0}) CHECK(m2(s) == doctest::Approx(s / 2).epsilon(1e-10));
    CHECK(*m2.cap() == doctest::Approx(1.0));
    CHECK(std::isinf(m2(1.01)));
    const auto m1 = mstar_from_rv(one, 1);
    for (double s : {0.3, 1.0}) CHECK(m1(s) == doctest::Approx(s).epsilon(1e-10));

    const auto ex = QuantileFunction::exponential();
    for (std::size_t ell : {1u, 3u}) {
        const auto m = mstar_from_rv(ex, ell);
        CHECK(*m.cap() == doctest::Approx(1.0).epsilon(1e-12));
        for (double beta : {0.1, 0.5, 1.0}) {
            const double s = beta * (1 - std::log(beta));
            CHECK(m(s) == doctest::Approx(beta / static_cast<double>(ell)).epsilon(1e-6));
            // beta(s) is flat at beta = 1 (X* vanishes there), so check the residual in s.
            const double b = mstar_value(ex, ell, s) * static_cast<double>(ell);
            CHECK(ex.integral(b) == doctest::Approx(s).epsilon(1e-12));
            if (beta < 1) CHECK(b == doctest::Approx(beta).epsilon(1e-10));
        }
        // convex and increasing on the grid
        const auto& s = m.nodes();
        const auto& v = m.values();
        double prev = 0;
        for (std::size_t k = 1; k < s.size(); ++k) {
            const double slope = (v[k] - v[k - 1]) / (s[k] - s[k - 1]);
            CHECK(slope > 0);
            CHECK(slope >= prev * (1 - 1e-9));
            prev = slope;
        }
    }
    CHECK_THROWS_AS(mstar_from_rv(QuantileFunction::step({0, 1}, {0.0}), 1), DegenerateQuantile);
}

TEST_CASE("M from a random variable") {
    const auto one = QuantileFunction::constant(1.0);
    for (double s : {0.0, 0.5, 1.0, 1.5, 4.0}) {
        CHECK(m_from_rv(one, 1, s) == doctest::Approx(std::max(0.0, s - 1)).epsilon(1e-10));
        CHECK(m_from_rv(one, 2, s) == doctest::Approx(std::max(0.0, s - 0.5)).epsilon(1e-10));
    }
    CHECK(m_from_rv(QuantileFunction::exponential(), 2, 0.0) == 0.0);
}

TEST_CASE("quadrature and conjugated grid agree") {
    const QuantileFunction qs[] = {QuantileFunction::constant(1.0), QuantileFunction::exponential(),
                                   QuantileFunction::uniform(),
                                   QuantileFunction::step({0, 0.5, 1}, {2.0, 0.0}, "two-point")};
    for (const auto& q : qs)
        for (std::size_t ell : {1u, 2u, 4u}) {
            const auto m = m_from_quantile(q, ell);
            for (double s = 0.05; s < 6; s *= 1.3) {
                const double a = m_from_rv(q, ell, s), b = m(s);
                CAPTURE(q.name());
                CAPTURE(s);
                if (a > 1e-9) CHECK(std::abs(a - b) <= 1e-4 * a);
                else CHECK(b < 1e-8);
            }
        }
}

TEST_CASE("duality bracket") {
    const std::vector<double> f{3, 4};
    // M = t^2 gives M*(s) = s^2/4, so the sup is 2 ||f||_2 = 10.
    const auto sq = duality_gap(f, OrliczFunction::power(2));
    CHECK(sq.norm == doctest::Approx(5.0));
    CHECK(sq.sup_lower == doctest::Approx(10.0).epsilon(1e-6));
    CHECK(sq.sup_upper == doctest::Approx(10.0).epsilon(1e-6));
    CHECK(sq.ok());

    const std::vector<double> g{1, -2, 0.5};
    const auto l1 = duality_gap(g, OrliczFunction::power(1));
    CHECK(l1.sup_lower == doctest::Approx(3.5).epsilon(1e-9));
    CHECK(l1.witness[1] == doctest::Approx(-1.0));
    CHECK(l1.ok());

    const auto zero = duality_gap(std::vector<double>{0, 0}, OrliczFunction::power(2));
    CHECK(zero.sup_lower == 0.0);
    CHECK(zero.sup_upper == 0.0);

    std::mt19937_64 gen(9);
    const OrliczFunction ms[] = {OrliczFunction::power(1.5), OrliczFunction::power(3),
                                 m_from_quantile(QuantileFunction::exponential(), 1)};
    for (const auto& m : ms)
        for (int t = 0; t < 10; ++t) {
            const auto x = random_vector(gen, 6);
            const auto r = duality_gap(x, m, 50);
            CHECK(r.ok());
            CHECK(r.sup_lower <= r.sup_upper * (1 + 1e-9));
        }
}

TEST_CASE("sandwich examples") {
    const auto one = QuantileFunction::constant(1.0);
    const auto ex = QuantileFunction::exponential();
    for (const auto* q : {&one, &ex}) {
        const std::size_t n = 6, ell = 2;
        const double w = q->integral(static_cast<double>(ell) / n);
        CHECK(mstar_value(*q, ell, w) == doctest::Approx(1.0 / n).epsilon(1e-9));
        const auto rw = sandwich_check(*q, ell, n, std::vector<double>(n, w));
        CHECK(rw.factor == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(rw.constructive_factor == doctest::Approx(1.0).epsilon(1e-9));

        std::vector<double> vertex(n, 0.0);
        vertex[0] = q->integral(static_cast<double>(ell));
        const auto rv = sandwich_check(*q, ell, n, vertex);
        CHECK(rv.factor == doctest::Approx(1.0).epsilon(1e-9));
    }
    CHECK_THROWS_AS(sandwich_check(one, 2, 3, std::vector<double>{1, 1, 1}), NotInBall);
}

TEST_CASE("random boundary points need at most 3B") {
    std::mt19937_64 gen(13);
    std::exponential_distribution<double> e(1.0);
    const auto one = QuantileFunction::constant(1.0);
    for (int t = 0; t < 100; ++t) {
        std::vector<double> y(6);
        for (double& v : y) v = e(gen) * (gen() & 1 ? 1 : -1);
        const auto z = boundary_point(one, 2, y);
        const auto r = sandwich_check(one, 2, 6, z);
        CHECK(r.constructive_factor <= 3.0 + 1e-9);
        CHECK(r.head_factor <= 2.0 + 1e-9);
        CHECK(r.tail_factor <= 1.0 + 1e-9);
        CHECK(r.factor <= 1.0 + 1e-9);
    }
}

TEST_CASE("points of B lie in the M* ball") {
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> u(0, 1);
    const auto ex = QuantileFunction::exponential();
    const std::size_t n = 5, ell = 2;
    for (int t = 0; t < 50; ++t) {
        std::vector<double> alpha(n);
        double sum = 0;
        for (double& a : alpha) sum += a = u(gen);
        double total = 0;
        std::vector<double> z(n);
        for (std::size_t i = 0; i < n; ++i) {
            alpha[i] *= static_cast<double>(ell) / sum;
            z[i] = ex.integral(alpha[i]);
            total += mstar_value(ex, ell, z[i]);
        }
        CHECK(total <= 1.0 + 1e-9);
        CHECK(sandwich_check(ex, ell, n, z).direct_factor <= 1.0 + 1e-9);
    }
}

TEST_CASE("embedding hypotheses for presets") {
    CHECK(embedding_hypotheses(OrliczFunction::power(1.5)).has_value());
    CHECK_FALSE(*embedding_hypotheses(OrliczFunction::power(2.5)));
    CHECK_FALSE(*embedding_hypotheses(OrliczFunction::power(1.0)));
    CHECK_FALSE(embedding_hypotheses(OrliczFunction::hinge(1.0)).has_value());
    // Coefficient with M*(1) = 1, found by bisection.
    const double p = 1.5;
    double lo = 1e-6, hi = 1e6;
    for (int it = 0; it < 200; ++it) {
        const double mid = std::sqrt(lo * hi);
        (conjugate(OrliczFunction::power(p, mid))(1.0) > 1.0 ? lo : hi) = mid;
    }
    CHECK(*embedding_hypotheses(OrliczFunction::power(p, hi)));
}
