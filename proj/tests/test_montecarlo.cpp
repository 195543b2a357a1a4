#include <doctest.h>

#include <cmath>
#include <vector>

#include "cevld/montecarlo.hpp"
#include "cevld/rng.hpp"
#include "cevld/variational.hpp"
#include "test_support.hpp"

using namespace cevld;

namespace {

const ModelParams kCir(0.5, 2.0, 0.0, AlphaSpec::constant(1.0), 1.0);

SimConfig base_config(double eps, std::size_t steps, std::size_t n, std::uint64_t seed,
                      Scheme scheme = Scheme::full_truncation_euler) {
    SimConfig c;
    c.epsilon = eps;
    c.steps = steps;
    c.n_paths = n;
    c.seed = seed;
    c.scheme = scheme;
    return c;
}

} // namespace

TEST_CASE("girsanov_entropy closed forms") {
    const ControlPath ones(1.0, std::vector<double>(100, 1.0));
    const ControlPath zeros(1.0, std::vector<double>(100, 0.0));
    CHECK(girsanov_entropy(ones, 1.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(girsanov_entropy(zeros, 1.0) == 0.0);
    CHECK(girsanov_entropy(ones, 0.1) == doctest::Approx(50.0).epsilon(1e-12));
    CHECK_THROWS_AS(girsanov_entropy(ones, 0.0), std::invalid_argument);
}

TEST_CASE("entropy_lower_bound arithmetic and monotonicity") {
    CHECK(entropy_lower_bound(1.0, 0.0) == doctest::Approx(-std::exp(-1.0)).epsilon(1e-12));
    CHECK(entropy_lower_bound(0.5, 2.0) ==
          doctest::Approx(std::log(0.5) - (std::exp(-1.0) + 2.0) / 0.5).epsilon(1e-12));
    CHECK(entropy_lower_bound(0.5, 2.0) == doctest::Approx(-5.4288).epsilon(1e-4));
    // strictly decreasing in the entropy at fixed q
    double prev = entropy_lower_bound(0.3, 0.0);
    for (double H : {0.5, 1.0, 2.0, 4.0}) {
        const double b = entropy_lower_bound(0.3, H);
        CHECK(b < prev);
        prev = b;
    }
    CHECK(entropy_lower_bound(0.0, 1.0) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("fit_tail_slope: exact on affine data, sane under noise") {
    const std::vector<double> levels{10.0, 20.0, 40.0};
    std::vector<double> lp(3);
    for (std::size_t i = 0; i < 3; ++i) lp[i] = -0.5 * levels[i];
    const auto f = fit_tail_slope(levels, lp, 0.5);
    CHECK(f.slope == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(f.std_error == doctest::Approx(0.0).scale(1.0));

    // N(0, 0.05) noise: slope within 3 fitted standard errors
    PhiloxStream rng(5150, 0);
    std::vector<double> lv, noisy;
    for (double r : {10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0}) {
        lv.push_back(r);
        noisy.push_back(-0.5 * r + 0.05 * rng.normal());
    }
    const auto g = fit_tail_slope(lv, noisy, 0.5);
    CHECK(std::abs(g.slope - 0.5) < 3.0 * g.std_error + 1e-12);

    CHECK_THROWS_AS(fit_tail_slope(std::vector<double>{1.0, 2.0}, std::vector<double>{-1.0, -2.0}, 0.5),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        fit_tail_slope(levels, std::vector<double>{-1.0, -2.0, -std::numeric_limits<double>::infinity()}, 0.5),
        std::invalid_argument);
}

TEST_CASE("estimate_tail: plain estimate matches the noncentral chi-square law") {
    // terminal, R = 3, exact transition scheme: no discretization bias
    TailQuery q;
    q.kind = TailKind::terminal;
    q.level = 3.0;
    const auto cfg = base_config(1.0, 8, 1000000, 41, Scheme::cir_exact);
    const auto e = estimate_tail(q, kCir, 1.0, cfg);
    const double truth = testsup::ncx2_survival(1.0, 1.0, 3.0);
    CHECK(std::abs(e.probability - truth) < 3.0 * e.std_error);
    CHECK(e.effective_sample_size == doctest::Approx(static_cast<double>(cfg.n_paths)));
    CHECK(e.entropy == 0.0);

    // nearly-sure event: probability close to 1 and matching the oracle
    TailQuery q0;
    q0.kind = TailKind::terminal;
    q0.level = 0.01;
    const auto e0 = estimate_tail(q0, kCir, 1.0, base_config(1.0, 8, 100000, 42, Scheme::cir_exact));
    const double truth0 = testsup::ncx2_survival(1.0, 1.0, 0.01);
    CHECK(e0.probability > 0.9);
    CHECK(std::abs(e0.probability - truth0) < 3.0 * e0.std_error + 1e-4);
}

TEST_CASE("estimate_tail: scaling equivalence is exact path by path") {
    // (eps = 1, level R) and (eps = R^{-(1-gamma)}, level 1) share the seed
    // stream; with R = 4 the scaling factor is a power of two, so the two
    // estimates agree exactly, not just statistically.
    TailQuery q;
    q.kind = TailKind::running_sup;
    q.level = 4.0;
    const auto e1 = estimate_tail(q, kCir, 1.0, base_config(1.0, 300, 20000, 4242));
    TailQuery q2 = q;
    const auto e2 = estimate_tail(q2, kCir, 1.0, base_config(0.5, 300, 20000, 4242));
    CHECK(e1.probability == e2.probability);
    CHECK(e1.std_error == e2.std_error);
}

TEST_CASE("estimate_tail: zero hits reports the one-sided upper bound") {
    TailQuery q;
    q.kind = TailKind::terminal;
    q.level = 5000.0;
    const auto e = estimate_tail(q, kCir, 1.0, base_config(1.0, 16, 2000, 9, Scheme::cir_exact));
    CHECK(e.zero_hits);
    CHECK(e.probability == 0.0);
    CHECK(e.log_probability == -std::numeric_limits<double>::infinity());
    CHECK(e.upper_bound_95 == doctest::Approx(1.0 - std::pow(0.05, 1.0 / 2000.0)).epsilon(1e-12));
}

TEST_CASE("estimate_tail: importance sampling agrees with plain at a rare level") {
    // R = 12: rare enough that IS shines, common enough that plain still sees
    // hits at 4e5 paths. The two estimators must agree within 3 joint SE.
    TailQuery plain;
    plain.kind = TailKind::terminal;
    plain.level = 12.0;
    const auto ep = estimate_tail(plain, kCir, 1.0, base_config(1.0, 16, 400000, 2718, Scheme::cir_exact));
    REQUIRE(ep.probability > 0.0);

    const std::size_t steps = 400;
    TailQuery is = plain;
    is.is_control = minimizer_control(TailKind::terminal, kCir, 1.0, steps);
    const double eps = std::pow(12.0, -0.5);
    const auto ei = estimate_tail(is, kCir, 1.0, base_config(eps, steps, 20000, 2719));
    const double joint = std::sqrt(ep.std_error * ep.std_error + ei.std_error * ei.std_error);
    CHECK(std::abs(ep.probability - ei.probability) < 3.0 * joint + 0.05 * ep.probability);

    // entropy bookkeeping matches the closed form
    CHECK(ei.entropy ==
          doctest::Approx(girsanov_entropy(*is.is_control, eps)).epsilon(1e-12));
    // entropy sandwich: log p >= bound(q_shift, H) - 3 SE_log
    const double bound = entropy_lower_bound(ei.shifted_frequency, ei.entropy);
    CHECK(ei.log_probability >= bound - 3.0 * ei.std_error / ei.probability);
}

TEST_CASE("estimate_tail: weight sanity at a mildly rare matched level") {
    // Raw-weight ESS of an exponential tilt decays like exp(-2H), so the
    // >= 0.1 n diagnostic is a statement about moderate entropy budgets;
    // rarer levels trip the degeneracy warning instead.
    const std::size_t steps = 300;
    TailQuery is;
    is.kind = TailKind::terminal;
    is.level = 1.5;
    is.is_control = minimizer_control(TailKind::terminal, kCir, 1.0, steps);
    const double eps = std::pow(1.5, -0.5);
    const auto e = estimate_tail(is, kCir, 1.0, base_config(eps, steps, 20000, 151));
    CHECK(e.entropy < 1.0);
    CHECK(e.effective_sample_size >= 0.1 * 20000);
}

TEST_CASE("estimate_tail: time-average and weighted-average kinds") {
    TailQuery avg;
    avg.kind = TailKind::time_average;
    avg.level = 1.2;
    const auto cfg = base_config(1.0, 200, 50000, 77);
    const auto ea = estimate_tail(avg, kCir, 1.0, cfg);

    TailQuery wavg;
    wavg.kind = TailKind::weighted_average;
    wavg.level = 1.2;
    wavg.node_weights.assign(cfg.steps + 1, 1.0 / static_cast<double>(cfg.steps));
    wavg.node_weights[cfg.steps] = 0.0;
    const auto ew = estimate_tail(wavg, kCir, 1.0, cfg);
    CHECK(ea.probability == ew.probability); // same functional, same paths

    CHECK(ea.probability > 0.0);
    CHECK(ea.probability < 1.0);
}

TEST_CASE("LDP direction: eps^2 log p approaches -c_T (widening then tightening band)") {
    // c_T = 0.5; the alpha = 1 drift inflates the tail at moderate eps, so the
    // distance to -c_T first grows and then shrinks along the ladder.
    TailQuery q;
    q.kind = TailKind::terminal;
    const std::size_t steps = 500;
    std::vector<double> dist;
    for (double eps : {0.5, 0.25, 0.125}) {
        const double R = 1.0 / (eps * eps);
        TailQuery is = q;
        is.level = R;
        is.is_control = minimizer_control(TailKind::terminal, kCir, 1.0, steps);
        const auto e = estimate_tail(is, kCir, 1.0, base_config(eps, steps, 40000, 99));
        REQUIRE(e.probability > 0.0);
        const double v = eps * eps * e.log_probability;
        dist.push_back(std::abs(v + 0.5));
    }
    for (double d : dist) CHECK(d < 0.15);       // band around -c_T
    CHECK(dist[2] < dist[1] + 0.02);             // tightening tail of the ladder
}
