#include "cevld/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>

#include "cevld/variational.hpp"

namespace cevld {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double event_functional(TailKind kind, std::span<const double> path, double dt, double T,
                        const std::vector<double>& node_weights) {
    switch (kind) {
        case TailKind::terminal:
            return path.back();
        case TailKind::running_sup:
            return *std::max_element(path.begin(), path.end());
        case TailKind::time_average: {
            double s = 0.0;
            for (std::size_t i = 0; i + 1 < path.size(); ++i) s += path[i];
            return s * dt / T;
        }
        case TailKind::weighted_average: {
            double s = 0.0;
            for (std::size_t i = 0; i < path.size(); ++i) s += node_weights[i] * path[i];
            return s;
        }
    }
    return 0.0;
}

// Fixed-order compensated sum so reductions are reproducible across thread counts.
double kahan_sum(const std::vector<double>& v) {
    double s = 0.0, c = 0.0;
    for (double x : v) {
        const double y = x - c;
        const double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return s;
}

} // namespace

TailEstimate estimate_tail(const TailQuery& query, const ModelParams& params, double T,
                           const SimConfig& config, unsigned n_threads) {
    if (!(query.level > 0.0)) throw std::invalid_argument("estimate_tail: level must be > 0");
    if (query.kind == TailKind::weighted_average) {
        if (query.node_weights.size() != config.steps + 1)
            throw std::invalid_argument("estimate_tail: node_weights must have N + 1 entries");
        for (double w : query.node_weights)
            if (!std::isfinite(w))
                throw std::invalid_argument("estimate_tail: node_weights must be finite");
    }
    const bool is_run = query.is_control.has_value();
    if (is_run && (query.is_control->steps() != config.steps ||
                   std::abs(query.is_control->horizon - T) > 1e-12 * T))
        throw std::invalid_argument("estimate_tail: control grid must match the simulation grid");

    // The functionals are positively homogeneous, so the level-R event for X
    // is the level R eps^{1/(1-gamma)} event for the rescaled process.
    const double scaled_level = query.level * std::pow(config.epsilon, 1.0 / (1.0 - params.gamma));
    const double dt = T / static_cast<double>(config.steps);
    const std::size_t n = config.n_paths;

    std::vector<double> w1(n), w2(n), w(n), wsq(n), hits(n);
    simulate_foreach(params, T, config, query.is_control,
                     [&](std::size_t pid, std::span<const double> path, double lw) {
                         const double v =
                             event_functional(query.kind, path, dt, T, query.node_weights);
                         const double wt = std::exp(lw);
                         const bool hit = v >= scaled_level;
                         w[pid] = wt;
                         wsq[pid] = wt * wt;
                         w1[pid] = hit ? wt : 0.0;
                         w2[pid] = hit ? wt * wt : 0.0;
                         hits[pid] = hit ? 1.0 : 0.0;
                     },
                     n_threads);

    const double nd = static_cast<double>(n);
    const double s1 = kahan_sum(w1);
    const double s2 = kahan_sum(w2);
    const double sw = kahan_sum(w);
    const double sw2 = kahan_sum(wsq);
    const double hit_count = kahan_sum(hits);

    TailEstimate e;
    e.n_paths = n;
    e.probability = s1 / nd;
    e.zero_hits = hit_count == 0.0;
    e.log_probability = e.probability > 0.0 ? std::log(e.probability) : -kInf;
    const double var = n > 1 ? std::max(0.0, (s2 / nd - e.probability * e.probability)) *
                                   nd / (nd - 1.0)
                             : 0.0;
    e.std_error = std::sqrt(var / nd);
    e.effective_sample_size = sw2 > 0.0 ? sw * sw / sw2 : 0.0;
    e.shifted_frequency = hit_count / nd;
    e.shifted_frequency_std_error =
        std::sqrt(std::max(0.0, e.shifted_frequency * (1.0 - e.shifted_frequency)) / nd);
    if (is_run) {
        e.entropy = girsanov_entropy(*query.is_control, config.epsilon);
        if (e.effective_sample_size < 0.1 * nd)
            std::cerr << "cevld: importance-sampling weights are degenerate (ESS "
                      << e.effective_sample_size << " of " << n << " paths)\n";
    } else if (e.zero_hits) {
        e.upper_bound_95 = 1.0 - std::pow(0.05, 1.0 / nd);
    }
    return e;
}

double girsanov_entropy(const ControlPath& h, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("girsanov_entropy: eps must be > 0");
    return cameron_martin_energy(h) / (eps * eps);
}

double entropy_lower_bound(double q_of_A, double entropy) {
    if (!(q_of_A >= 0.0 && q_of_A <= 1.0))
        throw std::invalid_argument("entropy_lower_bound: q_of_A must lie in [0, 1]");
    if (!(entropy >= 0.0)) throw std::invalid_argument("entropy_lower_bound: entropy must be >= 0");
    if (q_of_A == 0.0) return -kInf;
    return std::log(q_of_A) - (std::exp(-1.0) + entropy) / q_of_A;
}

SlopeFit fit_tail_slope(std::span<const double> levels, std::span<const double> log_probs,
                        double gamma) {
    if (levels.size() != log_probs.size() || levels.size() < 3)
        throw std::invalid_argument("fit_tail_slope: need >= 3 matching points");
    const std::size_t n = levels.size();
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(log_probs[i]))
            throw std::invalid_argument("fit_tail_slope: log_probs must be finite");
        x[i] = std::pow(levels[i], 2.0 * (1.0 - gamma));
        y[i] = -log_probs[i];
    }
    const double nd = static_cast<double>(n);
    const double xm = kahan_sum(x) / nd, ym = kahan_sum(y) / nd;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - xm) * (x[i] - xm);
        sxy += (x[i] - xm) * (y[i] - ym);
    }
    SlopeFit f;
    f.slope = sxy / sxx;
    f.intercept = ym - f.slope * xm;
    double ssr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - f.intercept - f.slope * x[i];
        ssr += r * r;
    }
    f.std_error = n > 2 ? std::sqrt(ssr / (nd - 2.0) / sxx) : 0.0;
    return f;
}

ControlPath minimizer_control(TailKind kind, const ModelParams& params, double T,
                              std::size_t steps) {
    GridPath phi = [&] {
        switch (kind) {
            case TailKind::terminal:
            case TailKind::running_sup:
                return terminal_minimizer(1.0, params, T, steps).minimizer;
            case TailKind::time_average: {
                ConstraintSpec spec{ConstraintKind::time_average, 1.0, {}};
                return minimize_rate(spec, params, T, steps).minimizer;
            }
            case TailKind::weighted_average:
                throw std::invalid_argument(
                    "minimizer_control: weighted queries need an explicit minimize_rate call");
        }
        throw std::logic_error("minimizer_control: unreachable");
    }();
    return control_from_path(phi, params);
}

} // namespace cevld
