#pragma once

#include "ordstat/estimate.hpp"
#include "ordstat/orlicz.hpp"

#include <span>
#include <string>
#include <vector>

namespace ordstat {

// Law of |X| through its decreasing rearrangement X*; samples are X*(U).
class Distribution {
public:
    static Distribution constant(double c = 1.0);
    // |X| = hi with probability p, 0 otherwise.
    static Distribution two_point(double hi = 2.0, double p = 0.5);
    static Distribution uniform();
    static Distribution exponential();
    // Finite law on |X|: values with probabilities summing to 1.
    static Distribution discrete(std::vector<double> values, std::vector<double> probs,
                                 std::string name = "discrete");
    // "const", "two-point", "uniform", "exp" (plus long aliases).
    static Distribution by_name(const std::string& name);

    const std::string& name() const noexcept { return name_; }
    const QuantileFunction& xstar() const noexcept { return xstar_; }
    double mean() const { return xstar_.mean(); }
    double sample(CounterRng& rng) const;

    bool is_discrete() const noexcept { return !atoms_.empty(); }
    const std::vector<double>& atoms() const noexcept { return atoms_; }
    const std::vector<double>& probabilities() const noexcept { return probs_; }

private:
    Distribution(std::string name, QuantileFunction q) : name_(std::move(name)), xstar_(std::move(q)) {}

    std::string name_;
    QuantileFunction xstar_;
    std::vector<double> atoms_;
    std::vector<double> probs_;
    bool exponential_ = false;
};

// E sum_{k<=ell} kmax_i |x_i X_i| by simulation.
Estimate simulate_expected_sum(std::span<const double> x, const Distribution& dist,
                               std::size_t ell, const MonteCarlo& mc = {});

// Same draws shared across all x (same length) and all ell; result[x][ell index].
std::vector<std::vector<Estimate>> simulate_expected_sums(
    const std::vector<std::vector<double>>& xs, const Distribution& dist,
    std::span<const std::size_t> ells, const MonteCarlo& mc = {});

// Exact value for discrete laws by enumerating all atom^n outcomes.
double enumerate_expected_sum(std::span<const double> x, const Distribution& dist,
                              std::size_t ell);

struct RatioEstimate {
    double ratio = 0.0;
    double ci_low = 0.0;   // ratio +- 1.96 standard errors
    double ci_high = 0.0;
    Estimate expectation;
    double norm = 0.0;
};

// simulate_expected_sum / ||x||_M with M = conjugate(mstar_from_rv(X*, ell)).
RatioEstimate theorem_ratio(std::span<const double> x, const Distribution& dist, std::size_t ell,
                            const MonteCarlo& mc = {});

// Batched version sharing draws; result[x][ell index].
std::vector<std::vector<RatioEstimate>> theorem_ratios(
    const std::vector<std::vector<double>>& xs, const Distribution& dist,
    std::span<const std::size_t> ells, const MonteCarlo& mc = {});

double m_from_rv(const Distribution& dist, std::size_t ell, double s);

}  // namespace ordstat
