#pragma once

#include "ordstat/errors.hpp"
#include "ordstat/estimate.hpp"
#include "ordstat/map_family.hpp"

#include <span>
#include <variant>
#include <vector>

namespace ordstat {

// |a(i, w)| on {0..n-1} x Omega, stored row-major (rows i, columns atoms).
// The atom (i, w) carries sigma-mass mu(w).
class BivariateFunction {
public:
    BivariateFunction(std::size_t n, WeightedSpace codomain, std::vector<double> values);
    static BivariateFunction from_rows(const std::vector<std::vector<double>>& rows,
                                       WeightedSpace codomain);
    // Matrix with uniform codomain of size = column count.
    static BivariateFunction from_matrix(const std::vector<std::vector<double>>& rows);

    std::size_t domain_size() const noexcept { return n_; }
    std::size_t atom_count() const noexcept { return codomain_.size(); }
    std::size_t cell_count() const noexcept { return values_.size(); }
    const WeightedSpace& codomain() const noexcept { return codomain_; }
    std::span<const double> values() const noexcept { return values_; }

    double operator()(std::size_t i, std::size_t w) const { return values_[i * atom_count() + w]; }
    double mass(std::size_t cell) const { return codomain_.weights[cell % atom_count()]; }
    // Total sigma-mass, equal to n.
    double total_mass() const noexcept { return static_cast<double>(n_); }

    BivariateFunction scaled(double lambda) const;

private:
    std::size_t n_;
    WeightedSpace codomain_;
    std::vector<double> values_;
};

// Right-open step function on [0, length): level j on [breaks[j], breaks[j+1]).
class StepFunction {
public:
    StepFunction() = default;
    StepFunction(std::vector<double> breaks, std::vector<double> levels);

    const std::vector<double>& breaks() const noexcept { return breaks_; }
    const std::vector<double>& levels() const noexcept { return levels_; }
    std::size_t plateau_count() const noexcept { return levels_.size(); }
    double length() const noexcept { return breaks_.empty() ? 0.0 : breaks_.back(); }

    double operator()(double t) const;
    // Integral over [0, ell]; the plateau containing ell is split.
    double integral(double ell) const;
    // Lebesgue measure of { t : f(t) > s }.
    double measure_above(double s) const;

private:
    std::vector<double> breaks_;
    std::vector<double> levels_;
};

// k-th largest value counted with multiplicity, 1-based.
double kmax(std::span<const double> values, std::size_t k);

// Cells ordered by (value desc, row asc, atom asc).
std::vector<std::size_t> rearrangement_order(const BivariateFunction& a);

StepFunction decreasing_rearrangement(const BivariateFunction& a);

double integral_rearrangement(const BivariateFunction& a, double ell);
// Exact variant; needs exact codomain weights.
Rational integral_rearrangement_exact(const BivariateFunction& a, const Rational& ell);

// Sum of the ell largest values among a(i, g(i)).
double order_stat_sum(const BivariateFunction& a, std::span<const Element> g, std::size_t ell);

struct ExactMode {};
using ExpectationMode = std::variant<ExactMode, MonteCarlo>;

// E over G of the top-ell sum. Exact mode enumerates G (rational when the
// family carries exact weights); Monte Carlo samples maps from P.
Estimate expected_sum(const BivariateFunction& a, const MapFamily& family, std::size_t ell,
                      const ExpectationMode& mode = ExactMode{});

// Exact expectations for every ell = 1..n from one pass over G.
std::vector<Estimate> expected_sums_exact(const BivariateFunction& a, const MapFamily& family);

struct BoundReport {
    std::size_t n = 0;
    std::size_t atoms = 0;
    std::size_t ell = 0;
    double cg = 1.0;
    double lower_constant = 0.0;  // c = 1 / (48 (1 + 2 C_G)^2)
    double upper_constant = 0.0;  // C = 6 (1 + 2 C_G)
    double integral = 0.0;
    double expectation = 0.0;
    double standard_error = 0.0;
    bool exact = false;
    bool lower_ok = false;
    bool upper_ok = false;
    double lower_slack = 0.0;  // E / (c * integral)
    double upper_slack = 0.0;  // C * integral / E

    bool ok() const noexcept { return lower_ok && upper_ok; }
};

class BoundViolation : public Error {
public:
    explicit BoundViolation(BoundReport report);
    const BoundReport& report() const noexcept { return report_; }

private:
    BoundReport report_;
};

struct ConstantPair {
    Rational lower;
    Rational upper;
};

// (c, C) for the two-sided bound with constant C_G.
ConstantPair bound_constants(const Rational& cg);

inline constexpr double kBoundTol = 1e-9;

// Checks c * int_0^ell a* <= E <= C * int_0^ell a*. Exact arithmetic when the
// family and codomain carry exact weights; relative tolerance `tol` otherwise;
// a 4 standard error margin in Monte Carlo mode. Throws BoundViolation on
// failure unless `throw_on_violation` is false.
BoundReport check_bounds(const BivariateFunction& a, const MapFamily& family, std::size_t ell,
                         const Rational& cg, const ExpectationMode& mode = ExactMode{},
                         bool throw_on_violation = true, double tol = kBoundTol);

// Order-preserving b with pairwise distinct values; ties of a are broken by
// flat cell index, later cells receiving larger values.
BivariateFunction strictify(const BivariateFunction& a);

struct LevelSet {
    std::vector<std::size_t> cells;  // flat indices, largest value first
    double mass = 0.0;               // sigma(h(t))
    std::optional<std::size_t> boundary;
    double boundary_fraction = 0.0;  // part of the boundary atom needed to reach t
};

// Smallest upper level set of sigma-mass >= t.
LevelSet level_set(const BivariateFunction& a, double t);

// (1/ell) int_0^ell a* on h(ell), zero elsewhere.
BivariateFunction averaged_function(const BivariateFunction& a, std::size_t ell);

struct ReductionReport {
    std::size_t ell = 0;
    double cg = 1.0;
    double lower_constant = 0.0;  // 1 / (6 + 12 C_G)
    double upper_constant = 0.0;  // 8 + 16 C_G
    double expected_a = 0.0;
    double expected_averaged = 0.0;
    double averaged_value = 0.0;
    double support_mass = 0.0;
    bool exact = false;
    bool lower_ok = false;
    bool upper_ok = false;

    bool ok() const noexcept { return lower_ok && upper_ok; }
};

class ReductionViolation : public Error {
public:
    explicit ReductionViolation(ReductionReport report);
    const ReductionReport& report() const noexcept { return report_; }

private:
    ReductionReport report_;
};

// Compares E S(a) with E S(a~), where a~ is built from strictify(a).
ReductionReport verify_reduction(const BivariateFunction& a, const MapFamily& family,
                                 std::size_t ell, const Rational& cg,
                                 bool throw_on_violation = true);

}  // namespace ordstat
