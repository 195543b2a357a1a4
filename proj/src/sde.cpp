#include "cevld/sde.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <iostream>
#include <mutex>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>

#include "cevld/rng.hpp"

namespace cevld {

namespace {

void validate(const SimConfig& cfg) {
    if (!(std::isfinite(cfg.epsilon) && cfg.epsilon > 0.0))
        throw std::invalid_argument("sim: epsilon must be > 0");
    if (cfg.steps < 1) throw std::invalid_argument("sim: steps must be >= 1");
    if (cfg.n_paths < 1) throw std::invalid_argument("sim: n_paths must be >= 1");
}

[[noreturn]] void report_nonfinite(std::size_t path_id, std::size_t step) {
    throw std::runtime_error("sim: non-finite sample on path " + std::to_string(path_id) +
                             " at step " + std::to_string(step));
}

// Full-truncation Euler: drift and diffusion coefficients are evaluated at
// max(X, 0); the iterate itself is not clamped, only the reported state is.
void path_full_truncation(const ModelParams& p, double horizon, const SimConfig& cfg,
                          const ControlPath* h, std::size_t path_id, std::span<double> out,
                          double& log_weight) {
    const std::size_t n = cfg.steps;
    const double dt = horizon / static_cast<double>(n);
    const double sqrt_dt = std::sqrt(dt);
    const double eps = cfg.epsilon;
    const double eq = std::pow(eps, 1.0 / (1.0 - p.gamma));

    PhiloxStream rng(cfg.seed, path_id);
    double x = eq * p.x0;
    out[0] = std::max(x, 0.0);
    double lw = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double xp = std::max(x, 0.0);
        const double diff = p.sigma * pow_state(xp, p.gamma);
        double drift = eq * p.alpha(xp) + p.beta * xp;
        const double dw = sqrt_dt * rng.normal();
        if (h) {
            const double hd = h->hdot[i];
            drift += diff * hd;
            lw -= hd * dw / eps + 0.5 * hd * hd * dt / (eps * eps);
        }
        x += drift * dt + eps * diff * dw;
        if (!std::isfinite(x)) report_nonfinite(path_id, i + 1);
        out[i + 1] = std::max(x, 0.0);
    }
    log_weight = lw;
}

// One-step exact CIR transition: X' = c * chi'^2(d, lambda) with
// d = 4 alpha / sigma^2 (invariant under the eps-rescaling) and the standard
// noncentrality; sampled through the chi-square / shifted-normal
// decomposition for d >= 1 and the Poisson mixture for d < 1.
void path_cir_exact(const ModelParams& p, double horizon, const SimConfig& cfg,
                    std::size_t path_id, std::span<double> out, double& log_weight) {
    const std::size_t n = cfg.steps;
    const double dt = horizon / static_cast<double>(n);
    const double eps = cfg.epsilon;
    const double eq = eps * eps; // gamma = 1/2
    const double s2 = eps * eps * p.sigma * p.sigma;
    const double a = eq * p.alpha.constant_value(); // intercept of the rescaled SDE
    const double d = 4.0 * a / s2;

    double c, lam_coef;
    if (p.beta != 0.0) {
        const double ek = std::exp(p.beta * dt);
        c = s2 * (ek - 1.0) / (4.0 * p.beta);
        lam_coef = 4.0 * p.beta * ek / (s2 * (ek - 1.0));
    } else {
        c = s2 * dt / 4.0;
        lam_coef = 4.0 / (s2 * dt);
    }

    PhiloxStream rng(cfg.seed, path_id);
    double x = eq * p.x0;
    out[0] = x;
    for (std::size_t i = 0; i < n; ++i) {
        const double lam = lam_coef * std::max(x, 0.0);
        double q;
        if (d >= 1.0) {
            const double z = rng.normal() + std::sqrt(lam);
            q = z * z;
            if (d > 1.0) {
                std::gamma_distribution<double> chi2((d - 1.0) / 2.0, 2.0);
                q += chi2(rng);
            }
        } else {
            std::poisson_distribution<long> pois(lam / 2.0);
            const double shape = d / 2.0 + static_cast<double>(pois(rng));
            if (shape > 0.0) {
                std::gamma_distribution<double> chi2(shape, 2.0);
                q = chi2(rng);
            } else {
                q = 0.0; // absorbed at the boundary
            }
        }
        x = c * q;
        if (!std::isfinite(x)) report_nonfinite(path_id, i + 1);
        out[i + 1] = x;
    }
    log_weight = 0.0;
}

void run_over_paths(std::size_t n_paths, unsigned n_threads,
                    const std::function<void(std::size_t)>& work) {
    unsigned nt = n_threads != 0 ? n_threads : std::max(1u, std::thread::hardware_concurrency());
    nt = static_cast<unsigned>(std::min<std::size_t>(nt, n_paths));
    if (nt <= 1) {
        for (std::size_t i = 0; i < n_paths; ++i) work(i);
        return;
    }
    std::exception_ptr first_error;
    std::mutex err_mtx;
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (unsigned t = 0; t < nt; ++t) {
        pool.emplace_back([&, t] {
            const std::size_t lo = n_paths * t / nt;
            const std::size_t hi = n_paths * (t + 1) / nt;
            try {
                for (std::size_t i = lo; i < hi; ++i) work(i);
            } catch (...) {
                std::scoped_lock lock(err_mtx);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

// Lemma-style conditions for convergence of the shifted process to S_0(h):
// positivity of S_0(h) after 0 and a strictly positive control slope near 0.
// Violations are reported, not refused.
bool shift_conditions_hold(const ControlPath& h, const ModelParams& p) {
    if (!(h.hdot.front() > 0.0)) return false;
    const GridPath s0 = solve_controlled_ode(0.0, h, p);
    for (std::size_t i = 1; i < s0.values.size(); ++i)
        if (!(s0.values[i] > 0.0)) return false;
    return true;
}

std::once_flag eps_warn_once, shift_warn_once;

} // namespace

void simulate_foreach(const ModelParams& params, double horizon, const SimConfig& config,
                      const std::optional<ControlPath>& h,
                      const std::function<void(std::size_t, std::span<const double>, double)>& per_path,
                      unsigned n_threads) {
    validate(config);
    if (!(std::isfinite(horizon) && horizon > 0.0))
        throw std::invalid_argument("sim: horizon must be > 0");
    if (h) {
        if (h->steps() != config.steps || std::abs(h->horizon - horizon) > 1e-12 * horizon)
            throw std::invalid_argument("sim: control grid must match the simulation grid");
    }
    if (config.scheme == Scheme::cir_exact) {
        if (params.gamma != 0.5 || !params.alpha.is_constant())
            throw std::invalid_argument("sim: cir-exact requires gamma = 1/2 and constant alpha");
        if (h) throw std::invalid_argument("sim: cir-exact does not support a Girsanov shift");
    }

    run_over_paths(config.n_paths, n_threads, [&](std::size_t pid) {
        thread_local std::vector<double> buf;
        buf.resize(config.steps + 1);
        double lw = 0.0;
        if (config.scheme == Scheme::cir_exact)
            path_cir_exact(params, horizon, config, pid, buf, lw);
        else
            path_full_truncation(params, horizon, config, h ? &*h : nullptr, pid, buf, lw);
        per_path(pid, std::span<const double>(buf.data(), buf.size()), lw);
    });
}

PathEnsemble simulate(const ModelParams& params, double horizon, const SimConfig& config,
                      const std::optional<ControlPath>& h, unsigned n_threads) {
    validate(config);
    PathEnsemble e;
    e.horizon = horizon;
    e.steps = config.steps;
    e.n_paths = config.n_paths;
    e.epsilon = config.epsilon;
    e.seed = config.seed;
    e.values.resize((config.steps + 1) * config.n_paths);
    e.log_weights.assign(config.n_paths, 0.0);

    if (config.epsilon > 1.0) {
        e.epsilon_flagged = true;
        std::call_once(eps_warn_once, [] {
            std::cerr << "cevld: epsilon > 1 on a rescaled run (allowed, flagged)\n";
        });
    }
    if (h && config.scheme == Scheme::full_truncation_euler) {
        e.shift_conditions_ok = shift_conditions_hold(*h, params);
        if (!e.shift_conditions_ok) {
            std::call_once(shift_warn_once, [] {
                std::cerr << "cevld: shift control violates S_0(h) > 0 or hdot > 0 near 0; "
                             "convergence to the selected solution is not guaranteed\n";
            });
        }
    }

    simulate_foreach(params, horizon, config, h,
                     [&](std::size_t pid, std::span<const double> vals, double lw) {
                         std::copy(vals.begin(), vals.end(),
                                   e.values.begin() + pid * (config.steps + 1));
                         e.log_weights[pid] = lw;
                     },
                     n_threads);
    return e;
}

GridPath solve_controlled_ode(double y0, const ControlPath& h, const ModelParams& params) {
    if (!(y0 >= 0.0)) throw std::invalid_argument("ode: y0 must be >= 0");
    const std::size_t n = h.steps();
    const double dt = h.dt();
    const double a = params.beta * (1.0 - params.gamma);
    const double s = params.sigma * (1.0 - params.gamma);

    // q_i = int_0^{t_i} e^{-a s} hdot_s ds, exact per interval.
    std::vector<double> out(n + 1);
    double q = 0.0;
    out[0] = y0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t0 = static_cast<double>(i) * dt;
        const double seg = a == 0.0 ? dt : std::exp(-a * t0) * (-std::expm1(-a * dt)) / a;
        q += h.hdot[i] * seg;
        const double t1 = static_cast<double>(i + 1) * dt;
        out[i + 1] = std::exp(a * t1) * (y0 + s * q);
    }
    return GridPath(h.horizon, std::move(out));
}

ParticularSolution particular_solution(const ControlPath& h, const ModelParams& params) {
    if (std::any_of(h.hdot.begin(), h.hdot.end(), [](double v) { return v < 0.0; }))
        std::cerr << "cevld: particular_solution with hdot < 0 somewhere; "
                     "the inner integral may go negative\n";
    // phi* = psi^{1/(1-gamma)} with psi = S_0(h); the sign of psi is the sign
    // of the inner integral, so clamping psi at 0 clamps the inner integral.
    const GridPath psi = solve_controlled_ode(0.0, h, params);
    const double inv = 1.0 / (1.0 - params.gamma);
    bool clamped = false;
    std::vector<double> out(psi.values.size());
    for (std::size_t i = 0; i < psi.values.size(); ++i) {
        double v = psi.values[i];
        if (v < 0.0) {
            v = 0.0;
            clamped = true;
        }
        out[i] = std::pow(v, inv);
    }
    return {GridPath(h.horizon, std::move(out)), clamped};
}

} // namespace cevld
