#pragma once

#include "ordstat/finite_field.hpp"
#include "ordstat/rational.hpp"
#include "ordstat/rng.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ordstat {

inline constexpr double kWeightSumTol = 1e-12;
inline constexpr double kProbabilityTol = 1e-9;

// A finite probability space (Omega, mu). Exact weights are carried alongside
// the doubles whenever they are known, so downstream checks can be exact.
struct WeightedSpace {
    std::vector<std::string> atoms;
    std::vector<double> weights;
    std::optional<std::vector<Rational>> exact_weights;

    static WeightedSpace uniform(std::size_t size);
    static WeightedSpace from_weights(std::vector<double> weights,
                                      std::vector<std::string> atoms = {});
    static WeightedSpace from_exact(std::vector<Rational> weights,
                                    std::vector<std::string> atoms = {});

    std::size_t size() const noexcept { return weights.size(); }
    bool is_uniform() const;
    bool has_exact() const noexcept { return exact_weights.has_value(); }
};

// A probability-weighted collection G of maps {0..n-1} -> Omega.
//
// Symmetric groups and product families are not materialized; their maps are
// decoded from an index on demand. Product families with more than
// kEnumerationLimit maps are sampler-only (implicit).
class MapFamily {
public:
    enum class Kind { Explicit, Symmetric, Product };

    static constexpr std::uint64_t kEnumerationLimit = 10'000'000;

    static MapFamily explicit_family(std::size_t n, WeightedSpace codomain,
                                     std::vector<std::vector<Element>> maps,
                                     std::vector<double> weights,
                                     std::optional<std::vector<Rational>> exact = std::nullopt);
    // Explicit family with uniform weights 1/|G|.
    static MapFamily uniform_family(std::size_t n, WeightedSpace codomain,
                                    std::vector<std::vector<Element>> maps);
    static MapFamily symmetric(std::size_t n);
    static MapFamily product(std::size_t n, WeightedSpace codomain);

    Kind kind() const noexcept { return kind_; }
    std::size_t domain_size() const noexcept { return n_; }
    const WeightedSpace& codomain() const noexcept { return codomain_; }
    const std::string& label() const noexcept { return label_; }
    void set_label(std::string label) { label_ = std::move(label); }

    bool enumerable() const noexcept { return enumerable_; }
    // Number of maps; throws ImplicitFamily for sampler-only families.
    std::uint64_t size() const;

    void map_at(std::uint64_t index, std::span<Element> out) const;
    std::vector<Element> map_at(std::uint64_t index) const;
    double weight(std::uint64_t index) const;
    bool has_exact_weights() const noexcept;
    Rational exact_weight(std::uint64_t index) const;
    // True when every map carries the same weight.
    bool uniform_weights() const noexcept { return uniform_; }

    // Draws one map distributed according to P.
    void sample(CounterRng& rng, std::span<Element> out) const;

private:
    MapFamily() = default;

    Kind kind_ = Kind::Explicit;
    std::size_t n_ = 0;
    WeightedSpace codomain_;
    std::string label_;
    bool enumerable_ = true;
    bool uniform_ = true;
    std::uint64_t size_ = 0;

    // Explicit storage: n_ entries per map.
    std::vector<Element> maps_;
    std::vector<double> weights_;
    std::optional<std::vector<Rational>> exact_;
    std::vector<double> cumulative_;  // sampling table over maps or atoms
};

// G_0 = { i -> l*i + m : l, m in GF(n) } with weights 1/n^2.
MapFamily affine_family(const FiniteField& field);

MapFamily symmetric_group(std::size_t n);

MapFamily full_function_family(std::size_t n, const WeightedSpace& codomain);

struct IndexPair {
    std::size_t i1 = 0, j1 = 0, i2 = 0, j2 = 0;
};

struct ConditionReport {
    bool exact = false;
    bool marginal_ok = false;
    double marginal_deviation = 0.0;  // max |P(g(i)=j) - mu(j)|
    double best_cg = 1.0;
    std::optional<Rational> best_cg_exact;
    std::optional<IndexPair> witness;
    std::uint64_t family_size = 0;
    // Only present for uniform codomains.
    std::optional<double> cardinality_bound;
    std::optional<bool> cardinality_ok;

    // Conditions (i) and (ii) hold with constant `cg`.
    bool passes(double cg) const;
};

ConditionReport verify_conditions(const MapFamily& family);

// n^2 / C_G: no family satisfying both conditions with constant C_G on a
// uniform codomain of size n can be smaller.
double cardinality_lower_bound(std::size_t n, double cg);

}  // namespace ordstat
