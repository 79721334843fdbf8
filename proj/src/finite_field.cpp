#include "ordstat/finite_field.hpp"

#include "ordstat/errors.hpp"

#include <string>
#include <tuple>

namespace ordstat {

namespace {

bool is_prime(unsigned p) {
    if (p < 2) return false;
    for (unsigned d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

// Polynomials over Z_p as coefficient vectors, lowest degree first, trimmed.
using Poly = std::vector<unsigned>;

void trim(Poly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

unsigned inv_mod(unsigned a, unsigned p) {
    // p is prime; Fermat.
    unsigned long long r = 1, b = a % p;
    for (unsigned e = p - 2; e; e >>= 1) {
        if (e & 1) r = r * b % p;
        b = b * b % p;
    }
    return static_cast<unsigned>(r);
}

// Remainder of a modulo b (b nonzero).
Poly poly_mod(Poly a, const Poly& b, unsigned p) {
    trim(a);
    const std::size_t db = b.size() - 1;
    const unsigned lead_inv = inv_mod(b.back(), p);
    while (a.size() >= b.size()) {
        const unsigned f = static_cast<unsigned>(1ULL * a.back() * lead_inv % p);
        const std::size_t shift = a.size() - 1 - db;
        for (std::size_t i = 0; i < b.size(); ++i)
            a[shift + i] = (a[shift + i] + p - static_cast<unsigned>(1ULL * f * b[i] % p)) % p;
        trim(a);
    }
    return a;
}

Poly decode(unsigned x, unsigned p, unsigned len) {
    Poly d(len, 0);
    for (unsigned i = 0; i < len; ++i) {
        d[i] = x % p;
        x /= p;
    }
    return d;
}

}  // namespace

std::pair<unsigned, unsigned> prime_power(unsigned n) {
    if (n < 2) throw NotPrimePower(n);
    unsigned p = 0;
    for (unsigned d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            p = d;
            break;
        }
    }
    if (p == 0) return {n, 1};
    unsigned k = 0;
    unsigned m = n;
    while (m % p == 0) {
        m /= p;
        ++k;
    }
    if (m != 1) throw NotPrimePower(n);
    return {p, k};
}

bool is_prime_power(unsigned n) {
    try {
        prime_power(n);
        return true;
    } catch (const NotPrimePower&) {
        return false;
    }
}

std::vector<unsigned> find_irreducible(unsigned p, unsigned k) {
    if (!is_prime(p)) throw InvalidArgument("characteristic must be prime: " + std::to_string(p));
    if (k < 2) throw InvalidArgument("find_irreducible needs degree >= 2");
    unsigned long long count = 1;
    for (unsigned i = 0; i < k; ++i) count *= p;
    for (unsigned long long code = 0; code < count; ++code) {
        Poly f = decode(static_cast<unsigned>(code), p, k);
        f.push_back(1);
        bool irreducible = true;
        // Monic divisors of degree 1..k/2.
        for (unsigned dd = 1; dd <= k / 2 && irreducible; ++dd) {
            unsigned long long dcount = 1;
            for (unsigned i = 0; i < dd; ++i) dcount *= p;
            for (unsigned long long dc = 0; dc < dcount; ++dc) {
                Poly g = decode(static_cast<unsigned>(dc), p, dd);
                g.push_back(1);
                if (poly_mod(f, g, p).empty()) {
                    irreducible = false;
                    break;
                }
            }
        }
        if (irreducible) return f;
    }
    throw Error("no irreducible polynomial found");  // unreachable
}

FiniteField::FiniteField(unsigned order) : order_(order) {
    if (order < 2) throw InvalidArgument("field order must be >= 2");
    std::tie(p_, k_) = prime_power(order);
    poly_ = k_ == 1 ? Poly{0, 1} : find_irreducible(p_, k_);
    if (order_ <= kTableLimit) {
        mul_table_.resize(static_cast<std::size_t>(order_) * order_);
        for (Element x = 0; x < order_; ++x)
            for (Element y = x; y < order_; ++y) {
                const auto v = static_cast<std::uint16_t>(mul_slow(x, y));
                mul_table_[x * order_ + y] = v;
                mul_table_[y * order_ + x] = v;
            }
        inv_table_.assign(order_, 0);
        for (Element x = 1; x < order_; ++x)
            for (Element y = 1; y < order_; ++y)
                if (mul_table_[x * order_ + y] == 1) {
                    inv_table_[x] = static_cast<std::uint16_t>(y);
                    break;
                }
    }
}

void FiniteField::check(Element x) const {
    if (x >= order_)
        throw IndexOutOfRange("element " + std::to_string(x) + " outside GF(" +
                              std::to_string(order_) + ")");
}

std::vector<unsigned> FiniteField::digits(Element x) const {
    check(x);
    return decode(x, p_, k_);
}

Element FiniteField::from_digits(const std::vector<unsigned>& d) const {
    Element x = 0;
    for (std::size_t i = d.size(); i-- > 0;) x = x * p_ + d[i] % p_;
    check(x);
    return x;
}

Element FiniteField::add(Element x, Element y) const {
    check(x);
    check(y);
    if (k_ == 1) return (x + y) % p_;
    Element r = 0, scale = 1;
    for (unsigned i = 0; i < k_; ++i) {
        r += ((x % p_ + y % p_) % p_) * scale;
        x /= p_;
        y /= p_;
        scale *= p_;
    }
    return r;
}

Element FiniteField::neg(Element x) const {
    check(x);
    Element r = 0, scale = 1;
    for (unsigned i = 0; i < k_; ++i) {
        r += ((p_ - x % p_) % p_) * scale;
        x /= p_;
        scale *= p_;
    }
    return r;
}

Element FiniteField::mul_slow(Element x, Element y) const {
    if (k_ == 1) return static_cast<Element>(1ULL * x * y % p_);
    const Poly a = decode(x, p_, k_);
    const Poly b = decode(y, p_, k_);
    Poly prod(2 * k_ - 1, 0);
    for (unsigned i = 0; i < k_; ++i)
        for (unsigned j = 0; j < k_; ++j)
            prod[i + j] = static_cast<unsigned>((prod[i + j] + 1ULL * a[i] * b[j]) % p_);
    Poly r = poly_mod(prod, poly_, p_);
    r.resize(k_, 0);
    return from_digits(r);
}

Element FiniteField::mul(Element x, Element y) const {
    check(x);
    check(y);
    if (!mul_table_.empty()) return mul_table_[x * order_ + y];
    return mul_slow(x, y);
}

Element FiniteField::inv_slow(Element x) const {
    // x^(n-2) by square-and-multiply; the multiplicative group has order n-1.
    Element r = 1, b = x;
    for (unsigned e = order_ - 2; e; e >>= 1) {
        if (e & 1) r = mul_slow(r, b);
        b = mul_slow(b, b);
    }
    return r;
}

Element FiniteField::inv(Element x) const {
    check(x);
    if (x == 0) throw ZeroInverse();
    if (!inv_table_.empty()) return inv_table_[x];
    return inv_slow(x);
}

FiniteField make_field(unsigned n) { return FiniteField(n); }

}  // namespace ordstat
