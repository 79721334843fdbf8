#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ordstat {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Convex nondecreasing M on [0, inf) with M(0) = 0.
//
// Three representations:
//  * Power:  coef * t^p, p >= 1.
//  * Grid:   piecewise linear through (s_k, v_k), s_0 = 0. Beyond the last node
//            the function is either +inf (capped) or continues with a fixed
//            tail slope. The Legendre transform maps this class onto itself
//            exactly, swapping cap and tail slope.
//  * Smooth: user closed form with derivative; conjugated by tabulation.
class OrliczFunction {
public:
    enum class Kind { Power, Grid, Smooth };

    static OrliczFunction power(double p, double coef = 1.0);
    // (t - theta)_+ * slope
    static OrliczFunction hinge(double theta, double slope = 1.0);
    // Exactly one of `cap` (must equal the last node) and `tail_slope` may be
    // given; with neither, the last segment's slope continues.
    static OrliczFunction grid(std::vector<double> nodes, std::vector<double> values,
                               std::optional<double> cap = std::nullopt,
                               std::optional<double> tail_slope = std::nullopt);
    static OrliczFunction smooth(std::function<double(double)> value,
                                 std::function<double(double)> derivative, std::string name);

    Kind kind() const noexcept { return kind_; }
    const std::string& name() const noexcept { return name_; }

    double operator()(double t) const;
    // Right derivative.
    double derivative(double t) const;
    // M = +inf beyond the cap.
    std::optional<double> cap() const noexcept { return cap_; }

    // Power parameters.
    double exponent() const noexcept { return p_; }
    double coefficient() const noexcept { return coef_; }
    // Grid data.
    const std::vector<double>& nodes() const noexcept { return nodes_; }
    const std::vector<double>& values() const noexcept { return values_; }
    std::optional<double> tail_slope() const noexcept { return tail_; }
    // Set for hinge presets so serialization can keep the name.
    std::optional<double> hinge_theta() const noexcept { return hinge_theta_; }

private:
    OrliczFunction() = default;

    Kind kind_ = Kind::Power;
    std::string name_;
    double p_ = 1.0;
    double coef_ = 1.0;
    std::vector<double> nodes_;
    std::vector<double> values_;
    std::optional<double> cap_;
    std::optional<double> tail_;
    std::optional<double> hinge_theta_;
    std::function<double(double)> value_fn_;
    std::function<double(double)> derivative_fn_;
};

struct ConjugateOptions {
    std::size_t nodes = 2048;
    double t_min = 1e-4;   // tabulation range for Smooth functions
    double t_max = 1e2;
};

struct ConjugateTable {
    OrliczFunction conjugate;
    // For Smooth input: the maximizers t_k with M'(t_k) = x_k at the nodes x_k.
    std::vector<double> maximizers;
};

ConjugateTable conjugate_table(const OrliczFunction& m, const ConjugateOptions& opts = {});

// M*(x) = sup_t (x t - M(t)).
OrliczFunction conjugate(const OrliczFunction& m, const ConjugateOptions& opts = {});

inline constexpr double kLuxemburgTol = 1e-10;

// inf { lambda > 0 : sum_i M(|x_i| / lambda) <= 1 } by bisection.
double luxemburg_norm(const OrliczFunction& m, std::span<const double> x,
                      double rel_tol = kLuxemburgTol);

// Decreasing X* on [0, 1] with finite integral.
class QuantileFunction {
public:
    // Step quantile: level k on [breaks[k], breaks[k+1]), breaks from 0 to 1.
    static QuantileFunction step(std::vector<double> breaks, std::vector<double> levels,
                                 std::string name = "step");
    static QuantileFunction constant(double c);
    // ln(1/z): |X| ~ Exp(1).
    static QuantileFunction exponential();
    // 1 - z: |X| ~ U(0, 1).
    static QuantileFunction uniform();
    static QuantileFunction closed_form(std::function<double(double)> value,
                                        std::function<double(double)> integral,
                                        std::function<double(double)> mass_at_least,
                                        std::vector<double> kinks, std::string name);

    const std::string& name() const noexcept { return name_; }
    double operator()(double z) const;
    // u(beta) = int_0^beta X*, with X* = 0 beyond 1.
    double integral(double beta) const;
    double mean() const { return integral(1.0); }
    // Lebesgue measure of { z in [0,1] : X*(z) >= y } = P(|X| >= y).
    double mass_at_least(double y) const;
    // Values of y where mass_at_least changes slope or jumps.
    const std::vector<double>& kinks() const noexcept { return kinks_; }
    // Points in [0,1] where X* jumps.
    const std::vector<double>& jumps() const noexcept { return jumps_; }
    bool is_step() const noexcept { return !levels_.empty(); }
    const std::vector<double>& step_breaks() const noexcept { return breaks_; }
    const std::vector<double>& step_levels() const noexcept { return levels_; }

private:
    QuantileFunction() = default;

    std::string name_;
    std::vector<double> breaks_;
    std::vector<double> levels_;
    std::function<double(double)> value_;
    std::function<double(double)> integral_;
    std::function<double(double)> mass_;
    std::vector<double> kinks_;
    std::vector<double> jumps_;
};

inline constexpr double kBetaTol = 1e-12;

// beta(s) = inf { beta : u(beta) >= s } by bisection.
double invert_partial_integral(const QuantileFunction& xstar, double s, double tol = kBetaTol);

// M*(s) = beta(s) / ell by direct inversion; +inf beyond E|X|.
double mstar_value(const QuantileFunction& xstar, std::size_t ell, double s);

// Grid form of M*(int_0^beta X*) = beta / ell, capped at E|X|.
OrliczFunction mstar_from_rv(const QuantileFunction& xstar, std::size_t ell,
                             std::size_t nodes = 4096);

// M(s) = int_0^s int_{|X| >= 1/(t ell)} |X| dP dt by quadrature.
double m_from_rv(const QuantileFunction& xstar, std::size_t ell, double s);

// conjugate(mstar_from_rv(...)).
OrliczFunction m_from_quantile(const QuantileFunction& xstar, std::size_t ell,
                               std::size_t nodes = 4096);

struct DualityBracket {
    double norm = 0.0;        // Luxemburg norm of f
    double sup_lower = 0.0;   // attained by a feasible g
    double sup_upper = 0.0;   // inf_k (1 + sum M(k|f|)) / k
    std::vector<double> witness;
    bool lower_ok = false;    // norm <= sup_lower
    bool upper_ok = false;    // sup_upper <= 2 norm

    bool ok() const noexcept { return lower_ok && upper_ok; }
};

// Brackets sup { sum f_i g_i : sum M*(|g_i|) <= 1 } and checks it against
// [||f||_M, 2 ||f||_M]. `budget` bounds the coordinate-ascent sweeps.
DualityBracket duality_gap(std::span<const double> f, const OrliczFunction& m,
                           std::size_t budget = 200);

struct SandwichReport {
    double constructive_factor = 0.0;  // from the split z = z' + z''
    double direct_factor = 0.0;        // gauge of z in B via its solid hull
    double factor = 0.0;               // certified: min of the two
    std::size_t head = 0;              // r, coordinates with M*(z_i) > 1/n
    std::vector<std::size_t> steps;    // k_i for the head coordinates
    double head_factor = 0.0;          // z' in head_factor * B (<= 2)
    double tail_factor = 0.0;          // z'' in tail_factor * B (<= 1)
};

// Places z (with sum M*(|z_i|) <= 1) inside factor * B, where
// B = conv{ (eps_i int_0^{alpha_i} X*)_i : sum alpha_i = ell }.
SandwichReport sandwich_check(const QuantileFunction& xstar, std::size_t ell, std::size_t n,
                              std::span<const double> z);

// Strict convexity, twice differentiability and strict 2-concavity with
// M*(1) = 1, for presets; nullopt for functions that cannot be classified.
std::optional<bool> embedding_hypotheses(const OrliczFunction& m);

}  // namespace ordstat
