#pragma once

#include <cstdint>
#include <vector>

namespace ordstat {

using Element = std::uint32_t;

// GF(p^k). Elements are the integers 0..n-1; the base-p digits of an element
// are its polynomial coefficients, lowest degree first.
class FiniteField {
public:
    static constexpr unsigned kTableLimit = 1u << 12;

    explicit FiniteField(unsigned order);

    unsigned order() const noexcept { return order_; }
    unsigned characteristic() const noexcept { return p_; }
    unsigned degree() const noexcept { return k_; }
    // Monic, coefficients low degree first; {0, 1} (i.e. x) when k == 1.
    const std::vector<unsigned>& reduction_polynomial() const noexcept { return poly_; }

    Element add(Element x, Element y) const;
    Element neg(Element x) const;
    Element sub(Element x, Element y) const { return add(x, neg(y)); }
    Element mul(Element x, Element y) const;
    Element inv(Element x) const;

    // Base-p digit vector of an element.
    std::vector<unsigned> digits(Element x) const;
    Element from_digits(const std::vector<unsigned>& d) const;

private:
    Element mul_slow(Element x, Element y) const;
    Element inv_slow(Element x) const;
    void check(Element x) const;

    unsigned order_;
    unsigned p_;
    unsigned k_;
    std::vector<unsigned> poly_;
    std::vector<std::uint16_t> mul_table_;  // order^2 entries when order <= kTableLimit
    std::vector<std::uint16_t> inv_table_;
};

FiniteField make_field(unsigned n);

// Smallest monic irreducible polynomial of degree k over Z_p, ordered by the
// integer sum c_i p^i (leading coefficients compared first). Requires k >= 2.
std::vector<unsigned> find_irreducible(unsigned p, unsigned k);

// Returns (p, k) with n = p^k, or throws NotPrimePower.
std::pair<unsigned, unsigned> prime_power(unsigned n);

bool is_prime_power(unsigned n);

}  // namespace ordstat
