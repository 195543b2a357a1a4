#include "cevld/rate.hpp"

#include <cmath>
#include <stdexcept>

namespace cevld {

namespace {

void check_nonnegative(const GridPath& p, const char* who) {
    for (double v : p.values)
        if (v < 0.0) throw std::domain_error(std::string(who) + ": path samples must be >= 0");
}

void check_grids_match(const GridPath& phi, const ControlPath& h) {
    if (phi.steps() != h.steps() || std::abs(phi.horizon - h.horizon) > 1e-12 * phi.horizon)
        throw std::invalid_argument("functional_F: path and control grids must match");
}

} // namespace

RateValue rate_I(const GridPath& phi, const ModelParams& params) {
    check_nonnegative(phi, "rate_I");
    const double zt = params.zero_threshold();
    if (phi.values.front() > zt) return RateValue::infinity(RateReason::nonzero_start);

    const std::size_t n = phi.steps();
    const double d = phi.dt();
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = phi.values[i];
        if (v <= zt) continue;
        const double num = (phi.values[i + 1] - phi.values[i]) / d - params.beta * v;
        const double q = num / pow_state(v, params.gamma);
        s += q * q;
    }
    return RateValue::finite(s * d / (2.0 * params.sigma * params.sigma));
}

RateValue rate_script_I(const GridPath& psi, const ModelParams& params) {
    check_nonnegative(psi, "rate_script_I");
    const double zt = params.zero_threshold();
    if (psi.values.front() > zt) return RateValue::infinity(RateReason::nonzero_start);

    const std::size_t n = psi.steps();
    const double d = psi.dt();
    const double omg = 1.0 - params.gamma;
    const double a = params.beta * omg;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double q = (psi.values[i + 1] - psi.values[i]) / d - a * psi.values[i];
        s += q * q;
    }
    return RateValue::finite(s * d / (2.0 * params.sigma * params.sigma * omg * omg));
}

double functional_F(const GridPath& phi, const ControlPath& h, double eps,
                    const ModelParams& params) {
    check_nonnegative(phi, "functional_F");
    check_grids_match(phi, h);
    if (eps < 0.0) throw std::invalid_argument("functional_F: eps must be >= 0");

    const std::size_t n = phi.steps();
    const double d = phi.dt();
    const double aq = eps == 0.0 ? 0.0 : std::pow(eps, 1.0 / (1.0 - params.gamma));
    const auto b_eps = [&](double y) { return aq * params.alpha(y) + params.beta * y; };
    const double two_gamma = 2.0 * params.gamma;

    // Running sums: hv = h(t_i) with h(0) = 0, bi = int_0^{t_i} b^eps(phi) dr.
    double hv = 0.0, bi = 0.0;
    double mid = 0.0, quad = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = phi.values[i];
        mid += (v - bi) * h.hdot[i] * d;
        quad += hv * hv * (two_gamma == 1.0 ? v : std::pow(v, two_gamma)) * d;
        hv += h.hdot[i] * d;
        bi += b_eps(v) * d;
    }
    return hv * phi.values[n] - mid - 0.5 * params.sigma * params.sigma * quad - hv * bi;
}

} // namespace cevld
