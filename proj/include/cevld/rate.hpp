#pragma once

#include "cevld/params.hpp"
#include "cevld/paths.hpp"

namespace cevld {

enum class RateReason {
    finite,
    nonzero_start,
    // Absolute continuity is not decidable from grid samples: every grid path
    // is read as its piecewise-linear (hence absolutely continuous)
    // interpolant, so this reason is never produced by the quadratures below.
    // It exists so callers can represent the full classification.
    not_absolutely_continuous_proxy,
};

/// Value of a rate functional: a finite nonnegative number, or +infinity
/// carrying the reason. An explicit marker rather than an IEEE inf so that
/// "infinite because phi(0) != 0" stays distinguishable from overflow.
struct RateValue {
    double value = 0.0;
    bool infinite = false;
    RateReason reason = RateReason::finite;

    static RateValue finite(double v) { return {v, false, RateReason::finite}; }
    static RateValue infinity(RateReason r) { return {0.0, true, r}; }
};

/// I_T(phi) = (1/(2 sigma^2)) int ((phi' - beta phi)/phi^gamma)^2 1_{phi != 0} dt,
/// +infinity when phi(0) != 0. Left-rectangle quadrature, forward differences.
RateValue rate_I(const GridPath& phi, const ModelParams& params);

/// Rate of the Lamperti-transformed process:
/// (1/(2 sigma^2 (1-gamma)^2)) int (psi' - beta (1-gamma) psi)^2 dt,
/// +infinity when psi(0) != 0. No zero-set indicator: psi' = 0 a.e. on {psi = 0}.
RateValue rate_script_I(const GridPath& psi, const ModelParams& params);

/// Exponent of the exponential (super)martingale:
/// F^eps(phi, h) = h_T phi_T - h_0 phi_0 - h_T int b^eps(phi) dt
///                 - int (phi_s - int_0^s b^eps(phi_r) dr) hdot_s ds
///                 - (sigma^2/2) int h_s^2 phi_s^{2 gamma} ds,
/// with b^eps(y) = eps^{1/(1-gamma)} alpha(y) + beta y and h(0) = 0.
/// eps = 0 selects b^0(y) = beta y.
double functional_F(const GridPath& phi, const ControlPath& h, double eps,
                    const ModelParams& params);

} // namespace cevld
