#include "cevld/paths.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cevld {

namespace {

void check_gamma(double gamma) {
    if (!(gamma >= 0.5 && gamma < 1.0))
        throw std::invalid_argument("lamperti: gamma must lie in [1/2, 1)");
}

} // namespace

GridPath::GridPath(double horizon_, std::vector<double> values_)
    : horizon(horizon_), values(std::move(values_)) {
    if (!(std::isfinite(horizon) && horizon > 0.0))
        throw std::invalid_argument("path: horizon must be finite and > 0");
    if (values.size() < 2)
        throw std::invalid_argument("path: need at least N = 1 step (2 samples)");
    for (double v : values)
        if (!std::isfinite(v)) throw std::invalid_argument("path: samples must be finite");
}

ControlPath::ControlPath(double horizon_, std::vector<double> hdot_)
    : horizon(horizon_), hdot(std::move(hdot_)) {
    if (!(std::isfinite(horizon) && horizon > 0.0))
        throw std::invalid_argument("control: horizon must be finite and > 0");
    if (hdot.empty())
        throw std::invalid_argument("control: need at least one derivative sample");
    for (double v : hdot)
        if (!std::isfinite(v)) throw std::invalid_argument("control: samples must be finite");
}

std::vector<double> ControlPath::node_values() const {
    std::vector<double> h(hdot.size() + 1, 0.0);
    const double d = dt();
    for (std::size_t i = 0; i < hdot.size(); ++i) h[i + 1] = h[i] + hdot[i] * d;
    return h;
}

GridPath lamperti(const GridPath& path, double gamma, LampertiDirection direction) {
    check_gamma(gamma);
    const double p = direction == LampertiDirection::forward ? 1.0 - gamma : 1.0 / (1.0 - gamma);
    std::vector<double> out(path.values.size());
    for (std::size_t i = 0; i < path.values.size(); ++i) {
        const double v = path.values[i];
        if (v < 0.0)
            throw std::domain_error("lamperti: negative sample at index " + std::to_string(i));
        out[i] = p == 0.5 ? std::sqrt(v) : std::pow(v, p);
    }
    return GridPath(path.horizon, std::move(out));
}

ControlPath control_from_path(const GridPath& phi, const ModelParams& params) {
    const std::size_t n = phi.steps();
    const double d = phi.dt();
    const double zt = params.zero_threshold();
    std::vector<double> hdot(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double v = phi.values[i];
        if (v < 0.0)
            throw std::domain_error("control_from_path: negative sample at index " + std::to_string(i));
        if (v <= zt) continue; // zero set carries the zero control
        const double dphi = (phi.values[i + 1] - phi.values[i]) / d;
        hdot[i] = (dphi - params.beta * v) / (params.sigma * pow_state(v, params.gamma));
    }
    return ControlPath(phi.horizon, std::move(hdot));
}

double cameron_martin_energy(const ControlPath& h) {
    const double d = h.dt();
    double s = 0.0;
    for (double v : h.hdot) s += v * v;
    return 0.5 * s * d;
}

double holder_norm(const GridPath& path, double eta) {
    if (!(eta > 0.0 && eta < 0.5))
        throw std::invalid_argument("holder_norm: eta must lie in (0, 1/2)");
    const std::size_t n = path.steps();
    const double d = path.dt();
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j <= n; ++j) {
            const double sep = static_cast<double>(j - i) * d;
            const double r = std::abs(path.values[j] - path.values[i]) / std::pow(sep, eta);
            best = std::max(best, r);
        }
    }
    return best;
}

} // namespace cevld
