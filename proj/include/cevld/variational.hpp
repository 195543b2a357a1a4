#pragma once

#include <cstddef>
#include <vector>

#include "cevld/params.hpp"
#include "cevld/paths.hpp"

namespace cevld {

/// Leading tail constant of W(X_T >= R) = exp(-R^{2(1-gamma)} (c_T + o(1))):
/// c_T = beta e^{-2 beta (1-gamma) T} / (sigma^2 (1-gamma) (1 - e^{-2 beta (1-gamma) T}))
/// for beta != 0, 1/(2 sigma^2 (1-gamma)^2 T) at beta = 0; evaluated through a
/// cancellation-free expm1 form (series-equivalent near beta = 0).
double constant_cT(const ModelParams& params, double T);

/// Root of the time-average Euler-Lagrange boundary equation:
/// omega cos(omega) = m sin(omega) on (0, pi) for m := T beta (1-gamma) < 1,
/// 0 at m = 1, omega cosh(omega) = m sinh(omega) on (0, inf) for m > 1.
double omega_root(double beta, double T, double gamma = 0.5);

/// Tail constant of the time average (closed form for gamma = 1/2):
/// nu_T = (T beta^2 +/- 4 omega^2 / T) / (2 sigma^2), + on the trigonometric
/// branch, - on the hyperbolic one.
double constant_nuT(const ModelParams& params, double T);

enum class ConstraintKind { terminal, running_sup, time_average, weighted_average };

/// Constraint on the phi-space path: terminal/sup/average of phi >= level.
/// weighted_average uses the signed node weights w_i (size N+1):
/// sum_i w_i phi_i >= level; time_average is the special case
/// w_i = dt/T for i < N (left rectangle), w_N = 0.
struct ConstraintSpec {
    ConstraintKind kind = ConstraintKind::terminal;
    double level = 1.0;
    std::vector<double> weights; // weighted_average only
};

struct VariationalResult {
    GridPath minimizer;   // phi-space
    double value = 0.0;   // attained discrete rate
    bool converged = false;
    std::size_t iterations = 0;
    double quad_tol = 0.0; // Richardson estimate of the quadrature error in value
};

/// Closed-form minimizer of inf { I_T(phi) : phi_0 = 0, phi >= 0, phi_T >= y }:
/// psi-space shape t/T (beta = 0) or sinh(beta(1-gamma)t)/sinh(beta(1-gamma)T),
/// scaled to y^{1-gamma}, mapped back by the inverse Lamperti transform.
/// value = y^{2(1-gamma)} c_T.
VariationalResult terminal_minimizer(double y, const ModelParams& params, double T,
                                     std::size_t steps = 2000);

/// Numerical minimizer of the discrete transformed rate over psi-space paths
/// with psi_0 = 0, psi >= 0 and the transformed constraint, by projected
/// gradient descent (terminal/sup) or an augmented Lagrangian (averages),
/// multi-started from 8 deterministic seeds; returns the phi-space minimizer.
VariationalResult minimize_rate(const ConstraintSpec& spec, const ModelParams& params,
                                double T, std::size_t N);

} // namespace cevld
