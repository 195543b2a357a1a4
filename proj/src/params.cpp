#include "cevld/params.hpp"

#include <algorithm>
#include <limits>

namespace cevld {

namespace {

void require(bool cond, const std::string& what) {
    if (!cond) throw std::invalid_argument(what);
}

bool all_finite(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

} // namespace

AlphaSpec AlphaSpec::constant(double a0) {
    require(std::isfinite(a0) && a0 >= 0.0, "alpha: constant intercept must be finite and >= 0");
    AlphaSpec a;
    a.constant_ = true;
    a.a0_ = a0;
    return a;
}

AlphaSpec AlphaSpec::table(std::vector<double> states, std::vector<double> values,
                           double lipschitz_bound, double nonneg_radius) {
    require(states.size() >= 2 && states.size() == values.size(),
            "alpha: table needs >= 2 nodes and matching sizes");
    require(all_finite(states) && all_finite(values), "alpha: table entries must be finite");
    require(std::isfinite(lipschitz_bound) && lipschitz_bound >= 0.0,
            "alpha: Lipschitz bound must be finite and >= 0");
    require(std::isfinite(nonneg_radius) && nonneg_radius >= 0.0,
            "alpha: nonnegativity radius must be finite and >= 0");
    for (std::size_t i = 0; i + 1 < states.size(); ++i) {
        require(states[i + 1] > states[i], "alpha: table states must be strictly increasing");
        const double slope = (values[i + 1] - values[i]) / (states[i + 1] - states[i]);
        require(std::abs(slope) <= lipschitz_bound * (1.0 + 1e-12) + 1e-12,
                "alpha: table slope exceeds declared Lipschitz bound");
    }

    AlphaSpec a;
    a.constant_ = false;
    a.xs_ = std::move(states);
    a.ys_ = std::move(values);
    a.lipschitz_ = lipschitz_bound;
    a.nonneg_radius_ = nonneg_radius;

    // Piecewise-linear minima sit at nodes, so checking node values and the
    // two clamped endpoints certifies alpha >= 0 on [0, nonneg_radius].
    require(a(0.0) >= 0.0 && a(nonneg_radius) >= 0.0,
            "alpha: must be >= 0 on the declared neighborhood of 0");
    for (std::size_t i = 0; i < a.xs_.size(); ++i) {
        if (a.xs_[i] >= 0.0 && a.xs_[i] <= nonneg_radius)
            require(a.ys_[i] >= 0.0, "alpha: must be >= 0 on the declared neighborhood of 0");
    }
    return a;
}

double AlphaSpec::operator()(double state) const {
    if (constant_) return a0_;
    if (state <= xs_.front()) return ys_.front();
    if (state >= xs_.back()) return ys_.back();
    const auto it = std::upper_bound(xs_.begin(), xs_.end(), state);
    const std::size_t j = static_cast<std::size_t>(it - xs_.begin());
    const double t = (state - xs_[j - 1]) / (xs_[j] - xs_[j - 1]);
    return ys_[j - 1] + t * (ys_[j] - ys_[j - 1]);
}

double AlphaSpec::constant_value() const {
    if (!constant_) throw std::logic_error("alpha: not a constant specification");
    return a0_;
}

double AlphaSpec::sup_abs() const {
    if (constant_) return std::abs(a0_);
    double m = 0.0;
    for (double y : ys_) m = std::max(m, std::abs(y));
    return m;
}

ModelParams::ModelParams(double gamma_, double sigma_, double beta_, AlphaSpec alpha_, double x0_)
    : gamma(gamma_), sigma(sigma_), beta(beta_), alpha(std::move(alpha_)), x0(x0_) {
    require(std::isfinite(gamma) && gamma >= 0.5 && gamma < 1.0,
            "params: gamma must lie in [1/2, 1)");
    require(std::isfinite(sigma) && sigma > 0.0, "params: sigma must be > 0");
    require(std::isfinite(beta), "params: beta must be finite");
    require(std::isfinite(x0) && x0 > 0.0, "params: x0 must be > 0");
}

} // namespace cevld
