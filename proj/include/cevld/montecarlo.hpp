#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "cevld/params.hpp"
#include "cevld/paths.hpp"
#include "cevld/sde.hpp"

namespace cevld {

enum class TailKind { terminal, running_sup, time_average, weighted_average };

/// A rare-event query: the functional kind, the level R > 0 for the base
/// (unrescaled) process, and the estimator. An absent control means the plain
/// frequency estimator; a present control is the Girsanov importance-sampling
/// tilt. node_weights (size N+1, signed) define the weighted-average
/// functional sum_i w_i X_{t_i}.
struct TailQuery {
    TailKind kind = TailKind::terminal;
    double level = 1.0;
    std::optional<ControlPath> is_control;
    std::vector<double> node_weights;
};

struct TailEstimate {
    double probability = 0.0;
    double log_probability = 0.0; // -inf on zero hits
    double std_error = 0.0;       // on the probability scale
    std::size_t n_paths = 0;
    double entropy = 0.0;         // H(W^{eps,h} | W), 0 for plain runs
    double effective_sample_size = 0.0;
    // One-sided 95% Clopper-Pearson upper bound, reported for zero-hit plain
    // runs (NaN otherwise).
    double upper_bound_95 = std::numeric_limits<double>::quiet_NaN();
    bool zero_hits = false;
    // Diagnostics of the shifted run: frequency of the event under the
    // shifted measure (used by the entropy lower bound) and its std error.
    double shifted_frequency = 0.0;
    double shifted_frequency_std_error = 0.0;
};

/// Estimate W(functional(X) >= R) by simulating the rescaled process at
/// config.epsilon against the scaled threshold R eps^{1/(1-gamma)}; with
/// eps = R^{-(1-gamma)} the threshold is 1, with eps = 1 it is R, and the two
/// runs coincide path by path under a shared seed. Plain: empirical frequency.
/// Importance-sampled: mean of 1_event exp(log_weight) on the shifted
/// ensemble, with the weighted-sample variance estimator and
/// ESS = (sum w)^2 / sum w^2. Reductions are fixed-order, so results do not
/// depend on the thread count.
TailEstimate estimate_tail(const TailQuery& query, const ModelParams& params, double T,
                           const SimConfig& config, unsigned n_threads = 0);

/// Relative entropy of the Girsanov shift: H(W^{eps,h} | W) = |hdot|^2_{L2} / (2 eps^2).
double girsanov_entropy(const ControlPath& h, double eps);

/// Lower bound for log P(A) from the relative entropy of a sampling measure Q:
/// log P(A) >= log Q(A) - (e^{-1} + H(Q|P)) / Q(A); -inf at Q(A) = 0.
double entropy_lower_bound(double q_of_A, double entropy);

struct SlopeFit {
    double slope = 0.0;
    double std_error = 0.0;
    double intercept = 0.0;
};

/// Least-squares slope (with intercept) of -log_probs against R^{2(1-gamma)};
/// the LDP predicts slope -> c_T. Requires >= 3 finite points.
SlopeFit fit_tail_slope(std::span<const double> levels, std::span<const double> log_probs,
                        double gamma);

/// The asymptotically efficient tilt for a query: the control steering the
/// limit dynamics along the phi-space minimizer of the level-1 constrained
/// rate problem (terminal/sup use the closed form; averages the numerical
/// minimizer).
ControlPath minimizer_control(TailKind kind, const ModelParams& params, double T,
                              std::size_t steps);

} // namespace cevld
