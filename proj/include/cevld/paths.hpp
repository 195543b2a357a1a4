#pragma once

#include <cstddef>
#include <vector>

#include "cevld/params.hpp"

namespace cevld {

/// A continuous path sampled on the uniform grid t_i = i T / N, i = 0..N.
struct GridPath {
    double horizon = 1.0;
    std::vector<double> values;

    GridPath(double horizon_, std::vector<double> values_);

    std::size_t steps() const { return values.size() - 1; }
    double dt() const { return horizon / static_cast<double>(steps()); }
    double time(std::size_t i) const { return horizon * static_cast<double>(i) / static_cast<double>(steps()); }
};

/// A Cameron-Martin control h, stored through its derivative hdot, piecewise
/// constant on the grid intervals [t_i, t_{i+1}); h(0) = 0 by convention.
struct ControlPath {
    double horizon = 1.0;
    std::vector<double> hdot; // one sample per interval

    ControlPath(double horizon_, std::vector<double> hdot_);

    std::size_t steps() const { return hdot.size(); }
    double dt() const { return horizon / static_cast<double>(steps()); }

    /// Values h(t_i) reconstructed by left-rectangle running sums (N+1 nodes).
    std::vector<double> node_values() const;
};

enum class LampertiDirection { forward, inverse };

/// forward: pointwise x^(1-gamma); inverse: pointwise x^(1/(1-gamma)).
GridPath lamperti(const GridPath& path, double gamma, LampertiDirection direction);

/// The minimal-norm control steering the degenerate ODE along phi:
/// hdot_i = ((phi_{i+1}-phi_i)/dt - beta phi_i) / (sigma phi_i^gamma) where
/// phi_i is above the zero threshold, 0 elsewhere. Forward differences and
/// left-endpoint coefficients, matching the Euler scheme.
ControlPath control_from_path(const GridPath& phi, const ModelParams& params);

/// (1/2) sum hdot_i^2 dt.
double cameron_martin_energy(const ControlPath& h);

/// sup over grid pairs i != j of |w_i - w_j| / |t_i - t_j|^eta, 0 < eta < 1/2.
double holder_norm(const GridPath& path, double eta);

} // namespace cevld
