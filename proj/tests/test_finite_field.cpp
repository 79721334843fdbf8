#include "oracles.hpp"

#include "ordstat/errors.hpp"
#include "ordstat/finite_field.hpp"

#include <doctest.h>

using namespace ordstat;

TEST_CASE("small field examples") {
    CHECK(make_field(2).add(1, 1) == 0);
    CHECK(make_field(3).mul(2, 2) == 1);
    const FiniteField f4 = make_field(4);
    CHECK(f4.reduction_polynomial() == std::vector<unsigned>{1, 1, 1});
    CHECK(f4.mul(2, 2) == 3);
    CHECK(f4.inv(2) == 3);
    CHECK(make_field(5).inv(2) == 3);
    CHECK(make_field(7).inv(1) == 1);
    CHECK_THROWS_AS(make_field(6), NotPrimePower);
    CHECK_THROWS_AS(make_field(12), NotPrimePower);
    CHECK_THROWS_AS(make_field(5).inv(0), ZeroInverse);
}

TEST_CASE("prime power detection") {
    CHECK(prime_power(9) == std::pair<unsigned, unsigned>{3, 2});
    CHECK(prime_power(64) == std::pair<unsigned, unsigned>{2, 6});
    CHECK(prime_power(7) == std::pair<unsigned, unsigned>{7, 1});
    CHECK_FALSE(is_prime_power(1));
    CHECK_FALSE(is_prime_power(10));
    CHECK(is_prime_power(125));
}

TEST_CASE("irreducible polynomial choice") {
    CHECK(find_irreducible(2, 2) == std::vector<unsigned>{1, 1, 1});
    CHECK(find_irreducible(3, 2) == std::vector<unsigned>{1, 0, 1});
    CHECK(find_irreducible(2, 3) == std::vector<unsigned>{1, 1, 0, 1});
    // The chosen polynomial is the first irreducible one in integer-code order.
    for (auto [p, k] : {std::pair{2u, 2u}, {2u, 3u}, {2u, 4u}, {3u, 2u}, {3u, 3u}, {5u, 2u}, {2u, 6u}}) {
        const auto f = find_irreducible(p, k);
        REQUIRE(f.size() == k + 1);
        CHECK(f.back() == 1);
        CHECK(oracle::irreducible(f, p));
        unsigned code = 0;
        for (std::size_t i = f.size() - 1; i-- > 0;) code = code * p + f[i];
        for (unsigned c = 0; c < code; ++c) {
            oracle::Poly g(k + 1, 0);
            unsigned r = c;
            for (unsigned i = 0; i < k; ++i, r /= p) g[i] = r % p;
            g[k] = 1;
            CHECK_FALSE(oracle::irreducible(g, p));
        }
    }
}

TEST_CASE("field axioms by exhaustive scan up to 64") {
    for (unsigned n = 2; n <= 64; ++n) {
        if (!is_prime_power(n)) continue;
        CAPTURE(n);
        const FiniteField f(n);
        const unsigned p = f.characteristic();
        const auto& m = f.reduction_polynomial();
        bool ok = true;
        for (Element x = 0; x < n; ++x) {
            ok &= f.add(x, 0) == x && f.mul(x, 1) == x;
            Element acc = 0;
            for (unsigned k = 0; k < p; ++k) acc = f.add(acc, x);
            ok &= acc == 0;
            if (x) ok &= f.mul(x, f.inv(x)) == 1 && f.inv(f.inv(x)) == x;
            for (Element y = 0; y < n; ++y) {
                ok &= f.add(x, y) == f.add(y, x) && f.mul(x, y) == f.mul(y, x);
                ok &= f.add(x, y) == oracle::field_add(x, y, p);
                if (f.degree() > 1) ok &= f.mul(x, y) == oracle::field_mul(x, y, m, p);
                else ok &= f.mul(x, y) == x * y % n;
                if (n <= 32)
                    for (Element z = 0; z < n; ++z) {
                        ok &= f.add(f.add(x, y), z) == f.add(x, f.add(y, z));
                        ok &= f.mul(f.mul(x, y), z) == f.mul(x, f.mul(y, z));
                        ok &= f.mul(x, f.add(y, z)) == f.add(f.mul(x, y), f.mul(x, z));
                    }
            }
        }
        CHECK(ok);
    }
}

TEST_CASE("affine maps are bijections for a != 0") {
    for (unsigned n : {4u, 8u, 9u, 25u}) {
        const FiniteField f(n);
        for (Element a = 1; a < n; ++a)
            for (Element b = 0; b < n; ++b) {
                std::vector<bool> hit(n, false);
                for (Element x = 0; x < n; ++x) hit[f.add(f.mul(a, x), b)] = true;
                CHECK(std::all_of(hit.begin(), hit.end(), [](bool h) { return h; }));
            }
    }
}

TEST_CASE("large fields use the slow path consistently") {
    const FiniteField big(8192);  // 2^13, beyond the table limit
    for (Element x : {1u, 2u, 77u, 4095u, 8191u}) {
        CHECK(big.mul(x, big.inv(x)) == 1);
        CHECK(big.mul(x, 3) == big.mul(3, x));
    }
}
