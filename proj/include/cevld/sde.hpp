#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "cevld/params.hpp"
#include "cevld/paths.hpp"

namespace cevld {

enum class Scheme {
    full_truncation_euler,
    cir_exact, // noncentral chi-square transition; gamma = 1/2, constant alpha, no shift
};

struct SimConfig {
    double epsilon = 1.0;
    std::size_t steps = 100;
    std::size_t n_paths = 1;
    Scheme scheme = Scheme::full_truncation_euler;
    std::uint64_t seed = 0;
};

/// Simulated trajectories of the rescaled process on the grid t_i = i T / N.
/// Reported states are clamped at 0; log_weights carry the Radon-Nikodym
/// log-density of W against the shifted measure W^{eps,h} (0 when unshifted),
/// so mean(1_event * exp(log_weight)) over a shifted ensemble estimates the
/// unshifted probability of the event.
struct PathEnsemble {
    double horizon = 1.0;
    std::size_t steps = 0;
    std::size_t n_paths = 0;
    double epsilon = 1.0;
    std::uint64_t seed = 0;
    std::vector<double> values;      // (steps + 1) * n_paths, row-major by path
    std::vector<double> log_weights; // n_paths

    bool epsilon_flagged = false;      // epsilon > 1 on a rescaled run
    bool shift_conditions_ok = true;   // S_0(h) > 0 on (0,T] and hdot > 0 near 0

    std::span<const double> path(std::size_t p) const {
        return {values.data() + p * (steps + 1), steps + 1};
    }
    GridPath grid_path(std::size_t p) const {
        const auto s = path(p);
        return GridPath(horizon, std::vector<double>(s.begin(), s.end()));
    }
    double time(std::size_t i) const { return horizon * static_cast<double>(i) / static_cast<double>(steps); }
};

/// Simulate n_paths trajectories of
///   dX = (eps^{1/(1-gamma)} alpha(X) + beta X [+ sigma |X|^gamma hdot]) dt
///        + eps sigma |X|^gamma dW,  X_0 = eps^{1/(1-gamma)} x0,
/// under the configured scheme. Each path uses the counter-based substream
/// (seed, path index); the shifted run reuses the unshifted substream, so
/// shifted/unshifted ensembles are coupled path by path.
PathEnsemble simulate(const ModelParams& params, double horizon, const SimConfig& config,
                      const std::optional<ControlPath>& h = std::nullopt,
                      unsigned n_threads = 0);

/// Streaming variant: per_path(path_id, samples, log_weight) is invoked once
/// per path, possibly concurrently; samples is a thread-local buffer only
/// valid during the call. Use path_id to index preallocated output.
void simulate_foreach(const ModelParams& params, double horizon, const SimConfig& config,
                      const std::optional<ControlPath>& h,
                      const std::function<void(std::size_t, std::span<const double>, double)>& per_path,
                      unsigned n_threads = 0);

/// Exact (variation-of-constants) solution of
///   psi' = beta (1-gamma) psi + sigma (1-gamma) hdot,  psi(0) = y0,
/// with the integral of exp(-beta(1-gamma)s) hdot_s taken exactly on each
/// interval of the piecewise-constant control.
GridPath solve_controlled_ode(double y0, const ControlPath& h, const ModelParams& params);

struct ParticularSolution {
    GridPath path;
    bool clamped = false; // inner integral went negative and was clamped at 0
};

/// The strictly positive solution selected by the vanishing-noise dynamics:
/// phi*_t = e^{beta t} (sigma (1-gamma) int_0^t e^{-beta(1-gamma)s} hdot_s ds)^{1/(1-gamma)}.
ParticularSolution particular_solution(const ControlPath& h, const ModelParams& params);

} // namespace cevld
