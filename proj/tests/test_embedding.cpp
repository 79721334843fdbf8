#include "oracles.hpp"

#include "ordstat/embedding.hpp"
#include "ordstat/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace ordstat;

namespace {

std::vector<double> gaussian(std::mt19937_64& gen, std::size_t n) {
    std::normal_distribution<double> d;
    std::vector<double> v(n);
    for (double& x : v) x = d(gen);
    return v;
}

double l2(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

TEST_CASE("rademacher average examples") {
    CHECK(rademacher_average(std::vector<double>{1}) == 1.0);
    CHECK(rademacher_average(std::vector<double>{1, 1}) == 1.0);
    CHECK(rademacher_average(std::vector<double>{3, 4}) == 4.0);
    CHECK_THROWS_AS(rademacher_average(std::vector<double>(21, 1.0)), DomainTooLarge);
    std::mt19937_64 gen(1);
    for (int t = 0; t < 30; ++t) {
        const auto v = gaussian(gen, 1 + t % 12);
        CHECK(rademacher_average(v) == doctest::Approx(oracle::rademacher(v)).epsilon(1e-12));
    }
    const auto v = gaussian(gen, 24);
    const double est = rademacher_average_sampled(v, 3);
    CHECK(est >= l2(v) / std::sqrt(2.0) * 0.99);
    CHECK(est <= l2(v) * 1.01);
}

TEST_CASE("khintchine bracket") {
    std::mt19937_64 gen(2);
    for (int t = 0; t < 300; ++t) {
        const auto u = gaussian(gen, 1 + t % 16);
        const double r = rademacher_average(u);
        CHECK(r >= l2(u) / std::sqrt(2.0));
        CHECK(r <= l2(u));
    }
}

TEST_CASE("sign selection") {
    // Unit vectors: every sign set reproduces |x_i|.
    const std::vector<std::vector<double>> units{{1, 0}, {0, 1}};
    const auto s2 = select_sign_vectors(2, 0.25, units, 1);
    CHECK(s2.matrix.rows() == 8);
    CHECK(s2.worst_deviation == 0.0);

    std::mt19937_64 gen(3);
    std::vector<std::vector<double>> probes;
    for (int k = 0; k < 50; ++k) probes.push_back(gaussian(gen, 8));
    const auto s8 = select_sign_vectors(8, 0.25, probes, 7);
    CHECK(s8.matrix.rows() <= 1024 * 8);
    for (const auto& v : probes) {
        const double exact = oracle::rademacher(v);
        const double avg = sign_average(s8.matrix, v);
        CHECK(avg >= 0.75 * exact);
        CHECK(avg <= 1.25 * exact);
    }
    CHECK_THROWS_AS(select_sign_vectors(8, 0.0, probes, 7), InvalidArgument);
    CHECK_THROWS_AS(select_sign_vectors(8, 1.0, probes, 7), InvalidArgument);
    CHECK_THROWS_AS(select_sign_vectors(8, 0.25, {}, 7), InvalidArgument);
    CHECK_THROWS_AS(select_sign_vectors(8, 1e-9, probes, 7), BudgetExceeded);
}

TEST_CASE("sign sets are nested across doublings") {
    std::mt19937_64 gen(4);
    std::vector<std::vector<double>> probes;
    for (int k = 0; k < 20; ++k) probes.push_back(gaussian(gen, 6));
    const auto loose = select_sign_vectors(6, 0.5, probes, 11);
    const auto tight = select_sign_vectors(6, 0.05, probes, 11);
    REQUIRE(tight.matrix.rows() >= loose.matrix.rows());
    CHECK(tight.matrix.prefix(loose.matrix.rows()).signs == loose.matrix.signs);
    CHECK(tight.worst_deviation <= 0.05);
    // The exhaustive set has no deviation at all.
    const auto all = exhaustive_signs(6);
    for (const auto& v : probes) CHECK(sign_average(all, v) == doctest::Approx(rademacher_average(v)).epsilon(1e-13));
}

TEST_CASE("psi examples") {
    EmbeddingSpec spec;
    spec.n = 2;
    spec.weights = {1, 1};
    spec.family = affine_family(make_field(2));
    spec.signs.n = 2;
    spec.signs.signs = {1, 1};
    CHECK(spec.output_dimension() == 4);
    CHECK(spec.normalization() == 0.25);
    const std::vector<double> x{0.3, -1.1};
    const auto y = psi(spec, x);
    REQUIRE(y.size() == 4);
    for (std::uint64_t m = 0; m < 4; ++m) {
        const auto g = spec.family.map_at(m);
        // a == 1, so every coordinate is (x_1 + x_2) / 4.
        CHECK(y[m] == doctest::Approx((x[0] + x[1]) * 0.25));
        (void)g;
    }
    const auto z = psi(spec, std::vector<double>{0, 0});
    for (double v : z) CHECK(v == 0.0);
    CHECK_THROWS_AS(psi(spec, std::vector<double>{1}), InvalidArgument);
}

TEST_CASE("psi is linear") {
    std::mt19937_64 gen(5);
    const auto spec = make_embedding(5, power_weights(5, 1.5), {0.25, 8, 3});
    for (int t = 0; t < 10; ++t) {
        const auto x = gaussian(gen, 5), y = gaussian(gen, 5);
        std::vector<double> s(5), lx(5);
        for (int i = 0; i < 5; ++i) {
            s[i] = x[i] + y[i];
            lx[i] = 3.0 * x[i];
        }
        const auto px = psi(spec, x), py = psi(spec, y), ps = psi(spec, s), pl = psi(spec, lx);
        for (std::size_t k = 0; k < px.size(); ++k) {
            CHECK(std::abs(ps[k] - px[k] - py[k]) <= 1e-12);
            CHECK(std::abs(pl[k] - 3.0 * px[k]) <= 1e-12);
        }
        CHECK(psi_l1(spec, lx) == doctest::Approx(3.0 * psi_l1(spec, x)).epsilon(1e-12));
    }
    CHECK(spec.output_dimension() == 25 * spec.signs.rows());
    CHECK(spec.signs.rows() <= 1024 * 5);
}

TEST_CASE("reference norm") {
    std::mt19937_64 gen(6);
    const auto x = gaussian(gen, 5);
    CHECK(reference_norm(constant_weights(5), x) == doctest::Approx(l2(x)).epsilon(1e-13));
    CHECK(reference_norm(std::vector<double>{2, 1}, std::vector<double>{1, 0}) == doctest::Approx(1.5));
    const std::vector<double> a{0.5, 1, 3, 2};
    for (std::size_t i = 0; i < 4; ++i) {
        std::vector<double> e(4, 0.0);
        e[i] = 1;
        CHECK(reference_norm(a, e) == doctest::Approx(1.625));
    }
    CHECK_THROWS_AS(reference_norm(std::vector<double>(9, 1.0), std::vector<double>(9, 1.0)), DomainTooLarge);
    const auto a7 = power_weights(7, 1.5);
    const auto x7 = gaussian(gen, 7);
    const double exact = reference_norm(a7, x7);
    const double sampled = reference_norm(a7, x7, ReferenceMode::sampled(200'000, 9));
    CHECK(sampled == doctest::Approx(exact).epsilon(2e-3));
}

TEST_CASE("equivalence of averages") {
    // Identity, n = 2: the affine family contains the two constant maps, each
    // picking one diagonal entry, so its average is (1 + 1 + sqrt2 + 0) / 4.
    const auto id = equivalence_averages_check(2, std::vector<double>{1, 0, 0, 1});
    CHECK(id.affine_average == doctest::Approx((2 + std::sqrt(2.0)) / 4));
    CHECK(id.symmetric_average == doctest::Approx(std::sqrt(2.0) / 2));
    CHECK(id.family_ratio == doctest::Approx((2 + std::sqrt(2.0)) / (2 * std::sqrt(2.0))));

    for (std::size_t n : {2u, 3u, 4u, 5u}) {
        const auto r = equivalence_averages_check(n, std::vector<double>(n * n, 1.0));
        CHECK(r.affine_average == doctest::Approx(std::sqrt(double(n))));
        CHECK(r.symmetric_average == doctest::Approx(std::sqrt(double(n))));
        CHECK(r.within_band);
    }

    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(-1, 1);
    double lo = 1e9, hi = 0;
    for (int t = 0; t < 100; ++t) {
        std::vector<double> a(16);
        for (double& v : a) v = u(gen);
        const auto r = equivalence_averages_check(4, a);
        CHECK(r.within_band);
        lo = std::min({lo, r.affine_ratio, r.symmetric_ratio});
        hi = std::max({hi, r.affine_ratio, r.symmetric_ratio});
        CHECK(r.family_ratio > 0.5);
        CHECK(r.family_ratio < 2.0);
    }
    MESSAGE("4x4 ratio range to the split bound: [" << lo << ", " << hi << "]");
    CHECK_THROWS_AS(equivalence_averages_check(9, std::vector<double>(81, 1.0)), DomainTooLarge);
}

TEST_CASE("symmetric-group psi equals the permutation Rademacher average") {
    std::mt19937_64 gen(8);
    for (std::size_t n : {2u, 3u, 4u}) {
        EmbeddingSpec spec;
        spec.n = n;
        spec.weights = power_weights(n, 1.3);
        spec.family = symmetric_group(n);
        spec.signs = exhaustive_signs(n);
        const auto x = gaussian(gen, n);
        double expect = 0;
        const auto perms = oracle::all_permutations(static_cast<unsigned>(n));
        for (const auto& p : perms) {
            std::vector<double> v(n);
            for (std::size_t i = 0; i < n; ++i) v[i] = spec.weights[p[i]] * x[i];
            expect += oracle::rademacher(v);
        }
        expect /= static_cast<double>(perms.size());
        CHECK(psi_l1(spec, x) == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("distortion report") {
    // a == 1 with exhaustive signs: each ratio is ave|sum +-x_i| / ||x||_2.
    for (std::size_t n : {2u, 3u, 4u}) {
        EmbeddingSpec spec;
        spec.n = n;
        spec.weights = constant_weights(n);
        spec.family = affine_family(make_field(static_cast<unsigned>(n)));
        spec.signs = exhaustive_signs(n);
        const auto r = distortion_report(spec, 200, 5);
        CHECK(r.min_ratio >= 1 / std::sqrt(2.0) - 1e-12);
        CHECK(r.max_ratio <= 1 + 1e-12);
        CHECK(r.distortion <= std::sqrt(2.0) + 1e-12);

        // Permuting the coordinates of every sample leaves the report unchanged.
        std::mt19937_64 gen(n);
        std::vector<std::vector<double>> pts, moved;
        for (int k = 0; k < 20; ++k) {
            auto x = gaussian(gen, n);
            pts.push_back(x);
            std::rotate(x.begin(), x.begin() + 1, x.end());
            moved.push_back(x);
        }
        const auto p1 = distortion_on(spec, pts, ReferenceMode{});
        const auto p2 = distortion_on(spec, moved, ReferenceMode{});
        CHECK(p1.distortion == doctest::Approx(p2.distortion).epsilon(1e-12));
    }

    // Basis vectors give identical ratios for any weights and any sign set.
    const auto spec = make_embedding(7, power_weights(7, 1.5), {0.25, 4, 1});
    std::vector<std::vector<double>> basis;
    for (std::size_t i = 0; i < 7; ++i) {
        basis.emplace_back(7, 0.0);
        basis.back()[i] = 1.0;
    }
    const auto b = distortion_on(spec, basis, ReferenceMode{});
    CHECK(b.distortion == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(distortion_report(spec, 0), InvalidArgument);

    const auto t1 = distortion_report(spec, 30, 9, 1);
    const auto t3 = distortion_report(spec, 30, 9, 3);
    CHECK(t1.min_ratio == t3.min_ratio);
    CHECK(t1.max_ratio == t3.max_ratio);
}

TEST_CASE("weight presets") {
    CHECK(constant_weights(3) == std::vector<double>{1, 1, 1});
    const auto w = power_weights(4, 1.0);
    CHECK(w[3] == doctest::Approx(std::sqrt(4.0)));
    const auto w2 = power_weights(4, 2.0);
    for (double v : w2) CHECK(v == doctest::Approx(1.0));
    CHECK_THROWS_AS(make_embedding(6, constant_weights(6)), NotPrimePower);
    CHECK_THROWS_AS(make_embedding(5, constant_weights(4)), InvalidArgument);
}
