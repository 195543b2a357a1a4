#pragma once

#include "cevld/params.hpp"

namespace cevld {

/// log I_nu(z), nu >= 0, z >= 0. Returns -infinity at z = 0 for nu > 0.
/// Ascending series in log space up to z = 30 + nu^2, large-argument
/// asymptotic expansion beyond; in a small band past the switchover both are
/// evaluated and a disagreement above 1e-9 in log is reported to stderr.
double log_bessel_i(double nu, double z);

struct DensityPoint {
    double y = 0.0;
    double log_density = 0.0;
};

/// log of the CEV terminal density f_{X_T}(y), y > 0 (requires alpha == 0):
/// f(y) = ((1-gamma)/d(T)) e^{beta(-2(1-gamma)+1/2)T}
///        exp(-(x^{2(1-gamma)} + y^{2(1-gamma)} e^{-2 beta (1-gamma) T})/(2 d(T)))
///        x^{1/2} y^{-2 gamma + 1/2} I_{1/(2(1-gamma))}(x^{1-gamma} y^{1-gamma} e^{-beta(1-gamma)T}/d(T)),
/// d(T) = (1-gamma) sigma^2 (1 - e^{-2 beta (1-gamma) T}) / (2 beta),
/// continued through beta = 0 where d(T) = (1-gamma)^2 sigma^2 T.
/// Everything is assembled in log space, so y up to 1e6 does not overflow.
DensityPoint cev_log_density(double y, const ModelParams& params, double T);

/// d(T) above (exposed because the tail constant is c_T = e^{-2 beta(1-gamma)T}/(2 d(T))).
double cev_density_dT(const ModelParams& params, double T);

struct CriticalExponentResult {
    double u_star = 0.0;              // critical exponent of (1/T) int_0^T X dt
    double always_finite_below = 0.0; // T beta^2 / (2 sigma^2)
    double gamma_star = 0.0;          // root of pi + arctan(g/beta) = (T/2) g
    double omega_star = 0.0;          // T gamma_star / 2, in (pi/2, pi)
};

/// Positive critical exponent of the integrated CIR process (gamma = 1/2,
/// beta < 0), obtained by inverting the explosion time: bisects
/// pi + arctan(g/beta) = (T/2) g and returns u* = (T/(2 sigma^2))(beta^2 + g*^2).
CriticalExponentResult cir_critical_exponent(const ModelParams& params, double T);

struct TailSurvival {
    double log_survival = 0.0;     // log int_y^{10y} f(z) dz
    double log_truncation = 0.0;   // log bound for the omitted mass beyond 10y
};

/// Laplace-type quadrature of the CEV survival integral on [y, 10y] with a
/// documented bound on the truncated tail (valid once log f is decreasing
/// there, i.e. for y past the density mode).
TailSurvival cev_log_survival(double y, const ModelParams& params, double T);

} // namespace cevld
