#include "cevld/variational.hpp"

#include "cevld/rate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace cevld {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr std::size_t kMaxIterations = 100000;

template <class F>
double bisect(F&& f, double lo, double hi, bool increasing) {
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if ((f(mid) < 0.0) == increasing)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Discrete transformed rate J(psi) = kappa sum ((psi_{i+1}-psi_i)/dt - a psi_i)^2 dt,
// the convex quadratic whose constrained minimizers realize the tail constants.
struct PsiObjective {
    double kappa, a, dt;
    std::size_t n;

    double operator()(const std::vector<double>& psi) const {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double q = (psi[i + 1] - psi[i]) / dt - a * psi[i];
            s += q * q;
        }
        return kappa * s * dt;
    }

    void gradient(const std::vector<double>& psi, std::vector<double>& g) const {
        g.assign(n + 1, 0.0);
        const double c = 2.0 * kappa * dt;
        for (std::size_t i = 0; i < n; ++i) {
            const double q = (psi[i + 1] - psi[i]) / dt - a * psi[i];
            g[i] += c * q * (-1.0 / dt - a);
            g[i + 1] += c * q / dt;
        }
        g[0] = 0.0; // psi_0 pinned at 0
    }
};

// Average constraint A(psi) = sum_i w_i psi_i^p >= y on the node weights w_i.
struct AverageConstraint {
    std::vector<double> weights;
    double p = 2.0, y = 1.0;

    double eval(const std::vector<double>& psi) const {
        double s = 0.0;
        for (std::size_t i = 0; i < psi.size(); ++i)
            if (weights[i] != 0.0) s += weights[i] * std::pow(psi[i], p);
        return s;
    }
    void add_gradient(const std::vector<double>& psi, double coef, std::vector<double>& g) const {
        for (std::size_t i = 1; i < psi.size(); ++i)
            if (weights[i] != 0.0) g[i] += coef * p * weights[i] * std::pow(psi[i], p - 1.0);
    }
};

struct Candidate {
    std::vector<double> psi;
    double value = std::numeric_limits<double>::infinity();
    bool converged = false;
    std::size_t iterations = 0;
};

// Projected gradient with a backtracking line search starting at T/|grad|.
// `objective`/`add_extra_gradient` fold in the augmented-Lagrangian term when
// present; `project` encodes psi >= 0, psi_0 = 0 and any pointwise constraint.
Candidate descend(const PsiObjective& obj,
                  const std::function<double(const std::vector<double>&)>& objective,
                  const std::function<void(const std::vector<double>&, std::vector<double>&)>&
                      add_extra_gradient,
                  const std::function<void(std::vector<double>&)>& project,
                  std::vector<double> psi, std::size_t max_iters) {
    const double horizon = obj.dt * static_cast<double>(obj.n);
    project(psi);
    double val = objective(psi);
    std::vector<double> g, trial;
    Candidate c;
    std::size_t it = 0;
    bool done = false;
    double accepted_step = 0.0; // warm start for the backtracking
    while (!done && it < max_iters) {
        ++it;
        obj.gradient(psi, g);
        if (add_extra_gradient) add_extra_gradient(psi, g);
        double gn = 0.0;
        for (double v : g) gn += v * v;
        gn = std::sqrt(gn);
        if (gn == 0.0) {
            c.converged = true;
            break;
        }
        // halving starts at T/|g|; later iterations resume near the last
        // accepted step instead of paying the full descent ladder again
        double step = horizon / gn;
        if (accepted_step > 0.0) step = std::min(step, 4.0 * accepted_step);
        bool moved = false;
        for (int bt = 0; bt < 80; ++bt) {
            trial = psi;
            for (std::size_t j = 1; j <= obj.n; ++j) trial[j] -= step * g[j];
            project(trial);
            const double tv = objective(trial);
            if (tv < val) {
                const double rel = (val - tv) / std::max(1.0, std::abs(val));
                psi.swap(trial);
                val = tv;
                moved = true;
                accepted_step = step;
                if (rel < 1e-10) {
                    c.converged = true;
                    done = true;
                }
                break;
            }
            step *= 0.5;
        }
        if (!moved) {
            c.converged = true; // stationary under the projection
            break;
        }
    }
    c.psi = std::move(psi);
    c.value = val;
    c.iterations = it;
    return c;
}

Candidate solve_augmented_lagrangian(const PsiObjective& obj, const AverageConstraint& con,
                                     std::vector<double> psi, std::size_t budget) {
    const auto project = [](std::vector<double>& v) {
        v[0] = 0.0;
        for (std::size_t j = 1; j < v.size(); ++j) v[j] = std::max(v[j], 0.0);
    };
    double lambda = 0.0;
    double mu = 10.0 * std::max(1.0, obj.kappa);
    double prev_violation = std::numeric_limits<double>::infinity();
    std::size_t total_it = 0;
    bool feas_converged = false;
    bool last_inner_converged = false;

    for (int outer = 0; outer < 40 && total_it < budget; ++outer) {
        const auto penalized = [&](const std::vector<double>& v) {
            const double t = std::max(0.0, lambda / mu + (con.y - con.eval(v)));
            return obj(v) + 0.5 * mu * t * t - 0.5 * lambda * lambda / mu;
        };
        const auto extra = [&](const std::vector<double>& v, std::vector<double>& g) {
            const double t = std::max(0.0, lambda / mu + (con.y - con.eval(v)));
            if (t > 0.0) con.add_gradient(v, -mu * t, g);
        };
        // keep inner solves short enough that the multiplier sees ~10 updates
        const std::size_t inner_cap =
            std::min(std::max<std::size_t>(500, budget / 12), budget - total_it);
        Candidate inner = descend(obj, penalized, extra, project, std::move(psi), inner_cap);
        psi = std::move(inner.psi);
        total_it += inner.iterations;
        last_inner_converged = inner.converged;

        const double gap = con.y - con.eval(psi);
        const double violation = std::max(0.0, gap);
        lambda = std::max(0.0, lambda + mu * gap);
        if (std::abs(gap) < 1e-7 * std::max(1.0, con.y) && inner.converged) {
            feas_converged = true;
            break;
        }
        if (violation > 0.25 * prev_violation) mu *= 4.0;
        prev_violation = violation;
    }

    // Homogeneous polish: J(s psi) = s^2 J and A(s psi) = s^p A, so scaling
    // onto the constraint boundary makes it exactly active and can only
    // decrease the objective when the iterate over-satisfies it.
    const double a_val = con.eval(psi);
    if (a_val > 0.0) {
        const double s = std::pow(con.y / a_val, 1.0 / con.p);
        for (double& v : psi) v *= s;
        if (last_inner_converged && std::abs(a_val - con.y) < 1e-5 * std::max(1.0, con.y))
            feas_converged = true;
    }

    Candidate c;
    c.psi = std::move(psi);
    c.value = obj(c.psi);
    c.converged = feas_converged;
    c.iterations = total_it;
    return c;
}

// Richardson estimate of the quadrature error in the reported value: the
// grid-halving difference of the psi-space objective plus the same difference
// for the phi-space rate (the latter dominates near the degenerate corner, so
// the certificate |rate_I(minimizer) - value| <= 2 quad_tol stays meaningful).
double richardson_quad_tol(const PsiObjective& obj, const std::vector<double>& psi,
                           const GridPath& phi, const ModelParams& params) {
    const double fine = obj(psi);
    if (obj.n % 2 != 0 || obj.n < 4) return 20.0 * obj.dt * std::max(1.0, std::abs(fine));
    PsiObjective coarse{obj.kappa, obj.a, 2.0 * obj.dt, obj.n / 2};
    std::vector<double> half(obj.n / 2 + 1), phalf(obj.n / 2 + 1);
    for (std::size_t i = 0; i < half.size(); ++i) {
        half[i] = psi[2 * i];
        phalf[i] = phi.values[2 * i];
    }
    double phi_side = 0.0;
    const auto rf = rate_I(phi, params);
    const auto rc = rate_I(GridPath(phi.horizon, std::move(phalf)), params);
    if (!rf.infinite && !rc.infinite) phi_side = std::abs(rc.value - rf.value);
    return 2.0 * (std::abs(coarse(half) - fine) + phi_side) + 1e-12 * std::max(1.0, fine);
}

// Eight deterministic start shapes with psi_0 = 0: the closed-form candidates
// (line, sinh at the drift rate, quarter sine, Euler-Lagrange sine) plus
// generic ramps; each gets rescaled onto the constraint before descending.
std::vector<std::vector<double>> seed_shapes(std::size_t n, double aT, double omega) {
    std::vector<std::function<double(double)>> shapes;
    shapes.emplace_back([](double t) { return t; });
    if (aT != 0.0)
        shapes.emplace_back([aT](double t) { return std::sinh(aT * t) / std::sinh(aT); });
    else
        shapes.emplace_back([](double t) { return 0.5 * (t + t * t); });
    shapes.emplace_back([](double t) { return std::sin(0.5 * kPi * t); });
    if (omega > 0.0)
        shapes.emplace_back([omega](double t) { return std::sin(omega * t); });
    else
        shapes.emplace_back([](double t) { return std::sinh(2.0 * t) / std::sinh(2.0); });
    shapes.emplace_back([](double t) { return std::sqrt(t); });
    shapes.emplace_back([](double t) { return t * t; });
    shapes.emplace_back([](double t) { return std::max(0.0, 2.0 * t - 1.0); });
    shapes.emplace_back([](double t) { return std::min(2.0 * t, 1.0); });

    std::vector<std::vector<double>> seeds;
    seeds.reserve(shapes.size());
    for (const auto& s : shapes) {
        std::vector<double> v(n + 1);
        for (std::size_t i = 0; i <= n; ++i)
            v[i] = std::max(0.0, s(static_cast<double>(i) / static_cast<double>(n)));
        seeds.push_back(std::move(v));
    }
    return seeds;
}

} // namespace

double constant_cT(const ModelParams& p, double T) {
    if (!(T > 0.0)) throw std::domain_error("constant_cT: T must be > 0");
    const double omg = 1.0 - p.gamma;
    const double base = 1.0 / (2.0 * p.sigma * p.sigma * omg * omg * T);
    const double u = 2.0 * p.beta * omg * T;
    if (std::abs(p.beta) < 1e-8) {
        // series of u e^{-u} / (1 - e^{-u}) about u = 0 (cancellation-free)
        return base * std::exp(-u) * (1.0 + 0.5 * u + u * u / 12.0);
    }
    return base * std::exp(-u) * u / (-std::expm1(-u));
}

double omega_root(double beta, double T, double gamma) {
    if (!(T > 0.0)) throw std::domain_error("omega_root: T must be > 0");
    if (!(gamma >= 0.5 && gamma < 1.0))
        throw std::domain_error("omega_root: gamma must lie in [1/2, 1)");
    const double m = T * beta * (1.0 - gamma); // T beta / 2 at gamma = 1/2
    if (m == 1.0) return 0.0;
    if (m < 1.0) {
        // omega cos(omega) - m sin(omega): slope 1 - m > 0 at 0+, value -pi at
        // pi; single crossing on (0, pi).
        const auto f = [m](double w) { return w * std::cos(w) - m * std::sin(w); };
        return bisect(f, 0.0, kPi, /*increasing=*/false);
    }
    // omega cosh(omega) - m sinh(omega): slope 1 - m < 0 at 0+, positive for
    // omega >= m; single crossing on (0, inf).
    const auto f = [m](double w) { return w * std::cosh(w) - m * std::sinh(w); };
    return bisect(f, 0.0, m + 1.0, /*increasing=*/true);
}

double constant_nuT(const ModelParams& p, double T) {
    if (p.gamma != 0.5)
        throw std::invalid_argument(
            "constant_nuT: closed form requires gamma = 1/2; use minimize_rate otherwise");
    if (!(T > 0.0)) throw std::domain_error("constant_nuT: T must be > 0");
    const double m = T * p.beta / 2.0;
    const double w = omega_root(p.beta, T, p.gamma);
    const double sgn = m < 1.0 ? 1.0 : -1.0;
    return (T * p.beta * p.beta + sgn * 4.0 * w * w / T) / (2.0 * p.sigma * p.sigma);
}

VariationalResult terminal_minimizer(double y, const ModelParams& p, double T,
                                     std::size_t steps) {
    if (!(y > 0.0)) throw std::domain_error("terminal_minimizer: y must be > 0");
    if (!(T > 0.0)) throw std::domain_error("terminal_minimizer: T must be > 0");
    const double omg = 1.0 - p.gamma;
    const double c = std::pow(y, omg);
    const double a = p.beta * omg;
    std::vector<double> psi(steps + 1);
    for (std::size_t i = 0; i <= steps; ++i) {
        const double t = T * static_cast<double>(i) / static_cast<double>(steps);
        psi[i] = std::abs(p.beta) < 1e-8 ? c * t / T : c * std::sinh(a * t) / std::sinh(a * T);
    }
    GridPath psi_path(T, std::move(psi));
    VariationalResult r{lamperti(psi_path, p.gamma, LampertiDirection::inverse),
                        std::pow(y, 2.0 * omg) * constant_cT(p, T), true, 0, 0.0};
    PsiObjective obj{1.0 / (2.0 * p.sigma * p.sigma * omg * omg), a,
                     T / static_cast<double>(steps), steps};
    r.quad_tol = richardson_quad_tol(obj, psi_path.values, r.minimizer, p);
    return r;
}

VariationalResult minimize_rate(const ConstraintSpec& spec, const ModelParams& p, double T,
                                std::size_t N) {
    if (N < 100) throw std::invalid_argument("minimize_rate: N must be >= 100");
    if (!(T > 0.0)) throw std::domain_error("minimize_rate: T must be > 0");
    if (!(spec.level > 0.0)) throw std::invalid_argument("minimize_rate: level must be > 0");
    if (spec.kind == ConstraintKind::weighted_average && spec.weights.size() != N + 1)
        throw std::invalid_argument("minimize_rate: weights must have N + 1 node entries");

    const double omg = 1.0 - p.gamma;
    const double dt = T / static_cast<double>(N);
    const PsiObjective obj{1.0 / (2.0 * p.sigma * p.sigma * omg * omg), p.beta * omg, dt, N};
    const double c_level = std::pow(spec.level, omg); // transformed terminal/sup level

    const bool average_kind = spec.kind == ConstraintKind::time_average ||
                              spec.kind == ConstraintKind::weighted_average;
    AverageConstraint con;
    if (average_kind) {
        con.p = 1.0 / omg;
        con.y = spec.level;
        if (spec.kind == ConstraintKind::time_average) {
            con.weights.assign(N + 1, dt / T); // left rectangle
            con.weights[N] = 0.0;
        } else {
            con.weights = spec.weights;
            for (double w : con.weights)
                if (!std::isfinite(w))
                    throw std::invalid_argument("minimize_rate: weights must be finite");
        }
    }

    const double omega = omega_root(p.beta, T, 0.5);
    auto seeds = seed_shapes(N, p.beta * omg * T, omega > 0.0 ? omega : 0.0);

    // Rescale each seed onto the active constraint.
    for (auto& s : seeds) {
        if (average_kind) {
            const double av = con.eval(s);
            const double f = av > 0.0 ? std::pow(spec.level / av, 1.0 / con.p) : 1.0;
            for (double& v : s) v *= f;
        } else {
            const double ref = spec.kind == ConstraintKind::terminal
                                   ? s.back()
                                   : *std::max_element(s.begin(), s.end());
            const double f = ref > 0.0 ? c_level / ref : 1.0;
            for (double& v : s) v *= f;
        }
    }

    Candidate best;
    std::size_t total_iterations = 0;
    const std::size_t per_seed_budget = kMaxIterations / seeds.size(); // shared 1e5 cap
    for (auto& seed : seeds) {
        Candidate cand;
        if (average_kind) {
            cand = solve_augmented_lagrangian(obj, con, std::move(seed), per_seed_budget);
        } else if (spec.kind == ConstraintKind::terminal) {
            const auto project = [&](std::vector<double>& v) {
                v[0] = 0.0;
                for (std::size_t j = 1; j < N; ++j) v[j] = std::max(v[j], 0.0);
                v[N] = std::max(v[N], c_level);
            };
            cand = descend(obj, std::cref(obj), nullptr, project, std::move(seed),
                           per_seed_budget);
        } else { // running_sup: raise the current argmax when infeasible
            const auto project = [&](std::vector<double>& v) {
                v[0] = 0.0;
                for (std::size_t j = 1; j <= N; ++j) v[j] = std::max(v[j], 0.0);
                std::size_t arg = 1;
                for (std::size_t j = 2; j <= N; ++j)
                    if (v[j] > v[arg]) arg = j;
                if (v[arg] < c_level) v[arg] = c_level;
            };
            cand = descend(obj, std::cref(obj), nullptr, project, std::move(seed),
                           per_seed_budget);
        }
        total_iterations += cand.iterations;
        if (cand.value < best.value) best = std::move(cand);
    }

    GridPath psi_path(T, std::move(best.psi));
    VariationalResult r{lamperti(psi_path, p.gamma, LampertiDirection::inverse), best.value,
                        best.converged, total_iterations, 0.0};
    r.quad_tol = richardson_quad_tol(obj, psi_path.values, r.minimizer, p);
    return r;
}

} // namespace cevld
