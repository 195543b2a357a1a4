#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace cevld {

// Drift intercept alpha(.) of dX = (alpha(X) + beta X) dt + sigma X^gamma dB.
// Either a nonnegative constant or a tabulated piecewise-linear function with
// a declared Lipschitz bound, flat-extrapolated outside the table (so it is
// bounded), and nonnegative on [0, nonneg_radius].
class AlphaSpec {
public:
    static AlphaSpec constant(double a0);
    static AlphaSpec table(std::vector<double> states, std::vector<double> values,
                           double lipschitz_bound, double nonneg_radius);

    double operator()(double state) const;

    bool is_constant() const { return constant_; }
    bool is_zero() const { return constant_ && a0_ == 0.0; }
    double constant_value() const;
    /// Upper bound for |alpha|_inf.
    double sup_abs() const;

private:
    AlphaSpec() = default;

    bool constant_ = true;
    double a0_ = 0.0;
    std::vector<double> xs_, ys_;
    double lipschitz_ = 0.0;
    double nonneg_radius_ = 0.0;
};

/// Coefficients of the SDE, restricted to gamma in [1/2, 1), sigma > 0, x0 > 0.
struct ModelParams {
    double gamma;
    double sigma;
    double beta;
    AlphaSpec alpha;
    double x0;

    ModelParams(double gamma_, double sigma_, double beta_, AlphaSpec alpha_, double x0_);

    /// Samples at or below this value are treated as sitting on the boundary
    /// {x = 0} (the indicator in the rate functional and the control map).
    double zero_threshold() const { return 1e-14 * std::max(1.0, x0); }
};

/// x^gamma for state x >= 0; exact sqrt when gamma == 1/2.
inline double pow_state(double x, double gamma) {
    return gamma == 0.5 ? std::sqrt(x) : std::pow(x, gamma);
}

} // namespace cevld
