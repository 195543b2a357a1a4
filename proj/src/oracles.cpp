#include "cevld/oracles.hpp"

#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>
#include <vector>

namespace cevld {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Ascending series sum_k (z/2)^{2k+nu} / (k! Gamma(k+nu+1)), accumulated as a
// running log-sum-exp; all terms are positive so no cancellation occurs.
double log_bessel_series(double nu, double z) {
    const double lh = std::log(z / 2.0);
    double m = -kInf, acc = 0.0;
    double prev = kInf;
    for (int k = 0; k < 20000; ++k) {
        const double lt = (2.0 * k + nu) * lh - std::lgamma(k + 1.0) - std::lgamma(k + nu + 1.0);
        if (lt > m) {
            acc = acc * std::exp(m - lt) + 1.0;
            m = lt;
        } else {
            acc += std::exp(lt - m);
        }
        if (lt < m - 45.0 && lt < prev) break; // past the peak and negligible
        prev = lt;
    }
    return m + std::log(acc);
}

// I_nu(z) ~ e^z / sqrt(2 pi z) * sum_k (-1)^k a_k(nu) / z^k, truncated at the
// smallest term; consecutive signed terms have ratio ((2k-1)^2 - 4 nu^2)/(8 k z).
double log_bessel_asymptotic(double nu, double z) {
    const double mu = 4.0 * nu * nu;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k <= 40; ++k) {
        const double f = 2.0 * k - 1.0;
        const double next = term * (f * f - mu) / (8.0 * k * z);
        if (std::abs(next) >= std::abs(term)) break;
        term = next;
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return z - 0.5 * std::log(2.0 * 3.14159265358979323846 * z) + std::log(sum);
}

// Bisection for a continuous f with f(lo) and f(hi) of opposite (known)
// signs; runs to floating-point interval exhaustion.
template <class F>
double bisect(F&& f, double lo, double hi, bool increasing) {
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double v = f(mid);
        if ((v < 0.0) == increasing)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

double log_bessel_i(double nu, double z) {
    if (!(nu >= 0.0) || !(z >= 0.0))
        throw std::domain_error("log_bessel_i: requires nu >= 0 and z >= 0");
    if (z == 0.0) return nu == 0.0 ? 0.0 : -kInf;

    const double z_switch = 30.0 + nu * nu;
    if (z <= z_switch) return log_bessel_series(nu, z);

    const double asym = log_bessel_asymptotic(nu, z);
    if (z <= z_switch + 5.0) { // cross-validation band
        const double ser = log_bessel_series(nu, z);
        if (std::abs(ser - asym) > 1e-9)
            std::cerr << "cevld: bessel series/asymptotic disagree by " << std::abs(ser - asym)
                      << " in log at nu=" << nu << " z=" << z << "\n";
    }
    return asym;
}

double cev_density_dT(const ModelParams& p, double T) {
    const double omg = 1.0 - p.gamma;
    const double u = 2.0 * p.beta * omg * T;
    // (1 - e^{-u})/u continued through u = 0
    const double g = u == 0.0 ? 1.0 : -std::expm1(-u) / u;
    return omg * omg * p.sigma * p.sigma * T * g;
}

DensityPoint cev_log_density(double y, const ModelParams& p, double T) {
    if (!p.alpha.is_zero())
        throw std::invalid_argument("cev_log_density: requires alpha == 0 (pure CEV)");
    if (!(y > 0.0)) throw std::domain_error("cev_log_density: y must be > 0");
    if (!(T > 0.0)) throw std::domain_error("cev_log_density: T must be > 0");

    const double omg = 1.0 - p.gamma;
    const double d = cev_density_dT(p, T);
    const double bt = p.beta * omg * T;
    const double nu = 1.0 / (2.0 * omg);
    const double x = p.x0;

    const double xg = std::pow(x, omg);
    const double yg = std::pow(y, omg);
    const double arg = xg * yg * std::exp(-bt) / d;

    const double lf = std::log(omg) - std::log(d) + p.beta * (0.5 - 2.0 * omg) * T -
                      (xg * xg + yg * yg * std::exp(-2.0 * bt)) / (2.0 * d) +
                      0.5 * std::log(x) + (0.5 - 2.0 * p.gamma) * std::log(y) +
                      log_bessel_i(nu, arg);
    return {y, lf};
}

CriticalExponentResult cir_critical_exponent(const ModelParams& p, double T) {
    if (p.gamma != 0.5)
        throw std::invalid_argument("cir_critical_exponent: closed form requires gamma = 1/2");
    if (!(p.beta < 0.0))
        throw std::invalid_argument("cir_critical_exponent: requires mean reversion (beta < 0)");
    if (!(T > 0.0)) throw std::domain_error("cir_critical_exponent: T must be > 0");

    const double pi = 3.14159265358979323846;
    // pi + arctan(g/beta) decreases from pi toward pi/2 while (T/2) g
    // increases, so the root is bracketed by (T/2) g in (pi/2, pi).
    const auto f = [&](double g) { return pi + std::atan(g / p.beta) - 0.5 * T * g; };
    const double g_star = bisect(f, pi / T, 2.0 * pi / T, /*increasing=*/false);

    CriticalExponentResult r;
    r.gamma_star = g_star;
    r.omega_star = 0.5 * T * g_star;
    r.always_finite_below = T * p.beta * p.beta / (2.0 * p.sigma * p.sigma);
    r.u_star = T * (p.beta * p.beta + g_star * g_star) / (2.0 * p.sigma * p.sigma);
    return r;
}

TailSurvival cev_log_survival(double y, const ModelParams& p, double T) {
    if (!(y > 0.0)) throw std::domain_error("cev_log_survival: y must be > 0");
    // Composite Simpson on geometrically refined panels of [y, 10y], combined
    // in log space; the integrand decays fast so panels concentrate near y.
    std::vector<double> nodes;
    nodes.push_back(y);
    double w = y * 1e-4;
    while (nodes.back() < 10.0 * y) {
        nodes.push_back(std::min(nodes.back() + w, 10.0 * y));
        w *= 1.6;
    }
    double m = -kInf, acc = 0.0;
    const auto add = [&](double lt) {
        if (lt > m) {
            acc = acc * std::exp(m - lt) + 1.0;
            m = lt;
        } else {
            acc += std::exp(lt - m);
        }
    };
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        const double a = nodes[i], b = nodes[i + 1], h = b - a;
        const double fa = cev_log_density(a, p, T).log_density;
        const double fm = cev_log_density(0.5 * (a + b), p, T).log_density;
        const double fb = cev_log_density(b, p, T).log_density;
        const double lw = std::log(h / 6.0);
        add(fa + lw);
        add(fm + lw + std::log(4.0));
        add(fb + lw);
    }
    // Tail bound: with g = log f decreasing past 10y,
    // int_{10y}^inf e^g <= e^{g(10y)} / |g'(10y)|.
    const double gb = cev_log_density(10.0 * y, p, T).log_density;
    const double eps = 1e-4 * y;
    const double slope = (cev_log_density(10.0 * y + eps, p, T).log_density - gb) / eps;
    const double log_trunc = slope < 0.0 ? gb - std::log(-slope) : kInf;
    return {m + std::log(acc), log_trunc};
}

} // namespace cevld
