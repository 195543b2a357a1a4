// cevld: simulation, rate evaluation, variational constants and rare-event
// tail estimation for CEV/CIR-type square-root diffusions.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cevld/io.hpp"
#include "cevld/montecarlo.hpp"
#include "cevld/oracles.hpp"
#include "cevld/params.hpp"
#include "cevld/rate.hpp"
#include "cevld/sde.hpp"
#include "cevld/variational.hpp"

using nlohmann::json;
using namespace cevld;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

struct ModelFlags {
    double gamma = 0.5;
    double sigma = 1.0;
    double beta = 0.0;
    double alpha = 0.0;
    double x0 = 1.0;
    std::string alpha_table; // CSV state,value
    double alpha_lipschitz = 0.0;
    double alpha_radius = 0.0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--gamma", gamma, "elasticity exponent, in [1/2, 1)");
        cmd->add_option("--sigma", sigma, "volatility, > 0");
        cmd->add_option("--beta", beta, "drift slope (1/time)");
        cmd->add_option("--alpha", alpha, "constant drift intercept, >= 0");
        cmd->add_option("--x0", x0, "initial state, > 0");
        cmd->add_option("--alpha-table", alpha_table,
                        "CSV file `t,value` tabulating alpha(state) (overrides --alpha)");
        cmd->add_option("--alpha-lipschitz", alpha_lipschitz,
                        "declared Lipschitz bound of the alpha table");
        cmd->add_option("--alpha-radius", alpha_radius,
                        "declared radius on which the alpha table is >= 0");
    }

    ModelParams build() const {
        if (alpha_table.empty())
            return ModelParams(gamma, sigma, beta, AlphaSpec::constant(alpha), x0);
        std::ifstream in(alpha_table);
        if (!in) throw std::invalid_argument("cannot open alpha table: " + alpha_table);
        const auto path = read_path_csv(in); // reuse the two-column reader
        std::vector<double> xs(path.values.size()), ys = path.values;
        for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = path.time(i);
        return ModelParams(gamma, sigma, beta,
                           AlphaSpec::table(xs, ys, alpha_lipschitz, alpha_radius), x0);
    }

    void describe(std::vector<std::string>& out) const {
        out.push_back("gamma=" + format_full(gamma));
        out.push_back("sigma=" + format_full(sigma));
        out.push_back("beta=" + format_full(beta));
        if (alpha_table.empty())
            out.push_back("alpha=" + format_full(alpha));
        else
            out.push_back("alpha_table=" + alpha_table);
        out.push_back("x0=" + format_full(x0));
    }

    json to_json() const {
        json j{{"gamma", gamma}, {"sigma", sigma}, {"beta", beta}, {"x0", x0}};
        if (alpha_table.empty())
            j["alpha"] = alpha;
        else
            j["alpha_table"] = alpha_table;
        return j;
    }
};

// Relative output paths resolve against CEVLD_OUTPUT_DIR when set.
std::string resolve_output(const std::string& path) {
    if (path.empty() || path == "-") return path;
    const char* dir = std::getenv("CEVLD_OUTPUT_DIR");
    std::filesystem::path p(path);
    if (dir != nullptr && p.is_relative()) return (std::filesystem::path(dir) / p).string();
    return path;
}

// Writes to the resolved path, or stdout for "" / "-".
void with_output(const std::string& path, const std::function<void(std::ostream&)>& fn) {
    const std::string resolved = resolve_output(path);
    if (resolved.empty() || resolved == "-") {
        fn(std::cout);
        return;
    }
    std::ofstream out(resolved, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot open output file: " + resolved);
    fn(out);
}

std::vector<double> parse_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stod(item));
    }
    if (out.empty()) throw std::invalid_argument("empty numeric list: " + csv);
    return out;
}

Scheme parse_scheme(const std::string& s) {
    if (s == "euler" || s == "full-truncation-euler") return Scheme::full_truncation_euler;
    if (s == "cir-exact") return Scheme::cir_exact;
    throw std::invalid_argument("unknown scheme: " + s + " (euler | cir-exact)");
}

TailKind parse_tail_kind(const std::string& s) {
    if (s == "terminal") return TailKind::terminal;
    if (s == "sup" || s == "running-sup") return TailKind::running_sup;
    if (s == "average" || s == "time-average") return TailKind::time_average;
    if (s == "weighted" || s == "weighted-average") return TailKind::weighted_average;
    throw std::invalid_argument("unknown tail kind: " + s);
}

ConstraintKind parse_constraint_kind(const std::string& s) {
    switch (parse_tail_kind(s)) {
        case TailKind::terminal: return ConstraintKind::terminal;
        case TailKind::running_sup: return ConstraintKind::running_sup;
        case TailKind::time_average: return ConstraintKind::time_average;
        case TailKind::weighted_average: return ConstraintKind::weighted_average;
    }
    throw std::logic_error("unreachable");
}

json rate_to_json(const RateValue& r) {
    json j;
    if (r.infinite) {
        j["infinite"] = true;
        j["reason"] = r.reason == RateReason::nonzero_start ? "nonzero-start"
                                                            : "not-absolutely-continuous-proxy";
    } else {
        j["infinite"] = false;
        j["value"] = r.value;
    }
    return j;
}

// --- subcommand bodies ------------------------------------------------------

int run_constants(const ModelFlags& mf, double T, const std::string& output,
                  const std::string& format) {
    const auto params = mf.build();
    const double cT = constant_cT(params, T);
    const double omega = omega_root(params.beta, T, params.gamma);
    std::optional<double> nuT;
    if (params.gamma == 0.5) nuT = constant_nuT(params, T);

    with_output(output, [&](std::ostream& os) {
        if (format == "json") {
            json j{{"config", mf.to_json()}, {"T", T}, {"c_T", cT}, {"omega", omega}};
            if (nuT)
                j["nu_T"] = *nuT;
            else
                j["nu_T_note"] = "closed form requires gamma = 1/2; use `minimize`";
            os << j.dump(2) << "\n";
        } else {
            std::vector<std::string> cfg;
            mf.describe(cfg);
            cfg.push_back("T=" + format_full(T));
            for (const auto& c : cfg) os << "# " << c << "\n";
            os << "name,value\n";
            os << "c_T," << format_full(cT) << "\n";
            if (nuT) os << "nu_T," << format_full(*nuT) << "\n";
            os << "omega," << format_full(omega) << "\n";
        }
    });
    return kExitOk;
}

int run_simulate(const ModelFlags& mf, double T, SimConfig cfg, const std::string& scheme,
                 double hdot_const, bool hdot_set, const std::string& control_file,
                 const std::string& output, const std::string& format) {
    const auto params = mf.build();
    cfg.scheme = parse_scheme(scheme);

    std::optional<ControlPath> h;
    if (!control_file.empty()) {
        std::ifstream in(control_file);
        if (!in) throw std::invalid_argument("cannot open control file: " + control_file);
        h = read_control_csv(in);
    } else if (hdot_set) {
        h = ControlPath(T, std::vector<double>(cfg.steps, hdot_const));
    }

    const auto ensemble = simulate(params, T, cfg, h);

    std::vector<std::string> comments;
    mf.describe(comments);
    comments.push_back("T=" + format_full(T));
    comments.push_back("eps=" + format_full(cfg.epsilon));
    comments.push_back("steps=" + std::to_string(cfg.steps));
    comments.push_back("paths=" + std::to_string(cfg.n_paths));
    comments.push_back("seed=" + std::to_string(cfg.seed));
    comments.push_back("scheme=" + scheme);
    if (h)
        comments.push_back(control_file.empty() ? "hdot=" + format_full(hdot_const)
                                                : "control=" + control_file);

    with_output(output, [&](std::ostream& os) {
        if (format == "bin")
            write_ensemble_binary(os, ensemble);
        else
            write_ensemble_csv(os, ensemble, comments);
    });
    if (format == "bin") {
        // the binary header carries only (N, n_paths, T, seed); echo the rest
        for (const auto& c : comments) std::cout << "# " << c << "\n";
    }
    return kExitOk;
}

int run_rate(const ModelFlags& mf, const std::string& path_file, const std::string& output) {
    const auto params = mf.build();
    std::ifstream in(path_file);
    if (!in) throw std::invalid_argument("cannot open path file: " + path_file);
    const auto phi = read_path_csv(in);

    const auto rI = rate_I(phi, params);
    const auto psi = lamperti(phi, params.gamma, LampertiDirection::forward);
    const auto rScript = rate_script_I(psi, params);
    const auto h = control_from_path(phi, params);

    with_output(output, [&](std::ostream& os) {
        json j{{"config", mf.to_json()},
               {"path", path_file},
               {"T", phi.horizon},
               {"steps", phi.steps()},
               {"rate_I", rate_to_json(rI)},
               {"rate_script_I", rate_to_json(rScript)},
               {"min_control_energy", cameron_martin_energy(h)}};
        os << j.dump(2) << "\n";
    });
    return kExitOk;
}

int run_minimize(const ModelFlags& mf, double T, const std::string& kind, double level,
                 std::size_t N, const std::string& weights_file,
                 const std::string& minimizer_csv, const std::string& output) {
    const auto params = mf.build();
    ConstraintSpec spec;
    spec.kind = parse_constraint_kind(kind);
    spec.level = level;
    if (spec.kind == ConstraintKind::weighted_average) {
        if (weights_file.empty())
            throw std::invalid_argument("weighted-average requires --weights");
        std::ifstream in(weights_file);
        if (!in) throw std::invalid_argument("cannot open weights file: " + weights_file);
        spec.weights = read_path_csv(in).values;
    }

    const auto r = minimize_rate(spec, params, T, N);

    json j{{"config", mf.to_json()},
           {"T", T},
           {"kind", kind},
           {"level", level},
           {"N", N},
           {"value", r.value},
           {"converged", r.converged},
           {"iterations", r.iterations},
           {"quad_tol", r.quad_tol}};
    if (!minimizer_csv.empty()) {
        std::vector<std::string> comments{"minimizer for kind=" + kind,
                                          "level=" + format_full(level)};
        with_output(minimizer_csv,
                    [&](std::ostream& os) { write_path_csv(os, r.minimizer, comments); });
        j["minimizer_csv"] = resolve_output(minimizer_csv);
    } else {
        j["minimizer"] = r.minimizer.values;
    }
    with_output(output, [&](std::ostream& os) { os << j.dump(2) << "\n"; });
    return kExitOk;
}

int run_tails(const ModelFlags& mf, double T, const std::string& kind,
              const std::string& levels_csv, const std::string& estimator, SimConfig cfg,
              const std::string& scheme, double eps_override, bool eps_set, bool parallel,
              const std::string& output) {
    const auto params = mf.build();
    const auto levels = parse_list(levels_csv);
    const auto tk = parse_tail_kind(kind);
    cfg.scheme = parse_scheme(scheme);
    const bool is_run = estimator == "is" || estimator == "importance-sampled";
    if (!is_run && estimator != "plain")
        throw std::invalid_argument("unknown estimator: " + estimator + " (plain | is)");

    std::optional<ControlPath> control;
    if (is_run) control = minimizer_control(tk, params, T, cfg.steps);

    auto run_one = [&](double R, unsigned threads) {
        TailQuery q;
        q.kind = tk;
        q.level = R;
        if (is_run) q.is_control = control;
        SimConfig c = cfg;
        c.epsilon = eps_set ? eps_override : std::pow(R, -(1.0 - params.gamma));
        return std::make_pair(c.epsilon, estimate_tail(q, params, T, c, threads));
    };

    std::vector<std::pair<double, TailEstimate>> results(levels.size());
    if (parallel) {
        std::vector<std::thread> pool;
        pool.reserve(levels.size());
        for (std::size_t i = 0; i < levels.size(); ++i)
            pool.emplace_back([&, i] { results[i] = run_one(levels[i], 1); });
        for (auto& t : pool) t.join();
    } else {
        for (std::size_t i = 0; i < levels.size(); ++i) results[i] = run_one(levels[i], 0);
    }

    const std::string resolved = resolve_output(output);
    const bool to_stdout = resolved.empty() || resolved == "-";
    const bool fresh = to_stdout || !std::filesystem::exists(resolved) ||
                       std::filesystem::file_size(resolved) == 0;
    std::ofstream file;
    std::ostream* os = &std::cout;
    if (!to_stdout) {
        file.open(resolved, std::ios::app);
        if (!file) throw std::invalid_argument("cannot open ledger: " + resolved);
        os = &file;
    }
    if (fresh) {
        std::vector<std::string> cfg_lines;
        mf.describe(cfg_lines);
        cfg_lines.push_back("T=" + format_full(T));
        cfg_lines.push_back("steps=" + std::to_string(cfg.steps));
        cfg_lines.push_back("scheme=" + scheme);
        cfg_lines.push_back("estimator=" + estimator);
        for (const auto& c : cfg_lines) *os << "# " << c << "\n";
        *os << "kind,R,eps,n_paths,prob,log_prob,stderr,entropy,ess,seed\n";
    }
    for (std::size_t i = 0; i < levels.size(); ++i) {
        const auto& [eps, e] = results[i];
        *os << kind << ',' << format_full(levels[i]) << ',' << format_full(eps) << ','
            << e.n_paths << ',' << format_full(e.probability) << ','
            << format_full(e.log_probability) << ',' << format_full(e.std_error) << ','
            << format_full(e.entropy) << ',' << format_full(e.effective_sample_size) << ','
            << cfg.seed << "\n";
    }
    return kExitOk;
}

int run_figure1(const ModelFlags& mf, double T, const std::string& eps_csv, double hdot,
                SimConfig cfg, const std::string& output) {
    const auto params = mf.build();
    const auto eps_list = parse_list(eps_csv);
    const ControlPath h(T, std::vector<double>(cfg.steps, hdot));
    const auto phi_star = particular_solution(h, params).path;

    std::vector<std::string> comments;
    mf.describe(comments);
    comments.push_back("T=" + format_full(T));
    comments.push_back("hdot=" + format_full(hdot));
    comments.push_back("eps_list=" + eps_csv);
    comments.push_back("steps=" + std::to_string(cfg.steps));
    comments.push_back("paths=" + std::to_string(cfg.n_paths));
    comments.push_back("seed=" + std::to_string(cfg.seed));

    with_output(output, [&](std::ostream& os) {
        for (const auto& c : comments) os << "# " << c << "\n";
        os << "eps,t,mean_path,phi_star\n";
        for (double eps : eps_list) {
            SimConfig c = cfg;
            c.epsilon = eps;
            const auto ensemble = simulate(params, T, c, h);
            std::vector<double> mean(cfg.steps + 1, 0.0);
            for (std::size_t pid = 0; pid < c.n_paths; ++pid) {
                const auto vals = ensemble.path(pid);
                for (std::size_t i = 0; i <= cfg.steps; ++i) mean[i] += vals[i];
            }
            for (double& v : mean) v /= static_cast<double>(c.n_paths);
            for (std::size_t i = 0; i <= cfg.steps; ++i)
                os << format_full(eps) << ',' << format_full(phi_star.time(i)) << ','
                   << format_full(mean[i]) << ',' << format_full(phi_star.values[i]) << "\n";
        }
    });
    return kExitOk;
}

int run_check(const std::string& suite) {
    if (suite != "oracle-consistency")
        throw std::invalid_argument("unknown check suite: " + suite);
    bool all_ok = true;
    auto report = [&](const std::string& name, bool ok, double worst) {
        all_ok = all_ok && ok;
        std::cout << (ok ? "[PASS] " : "[FAIL] ") << name << " (worst " << worst << ")\n";
    };

    // omega/arctan duality
    double worst = 0.0;
    for (double beta : {-0.25, -1.0, -4.0})
        for (double T : {0.5, 1.0, 2.0}) {
            const ModelParams p(0.5, 1.0, beta, AlphaSpec::constant(0.0), 1.0);
            worst = std::max(
                worst, std::abs(omega_root(beta, T) - cir_critical_exponent(p, T).omega_star));
        }
    report("omega/arctan duality", worst <= 1e-9, worst);

    // nu_T vs the CIR critical exponent
    worst = 0.0;
    for (double beta : {-0.25, -1.0, -4.0}) {
        const ModelParams p(0.5, 1.0, beta, AlphaSpec::constant(0.0), 1.0);
        worst = std::max(worst,
                         std::abs(cir_critical_exponent(p, 1.0).u_star - constant_nuT(p, 1.0)));
    }
    report("nu_T equals the integrated-CIR critical exponent", worst <= 1e-6, worst);

    // density tail slope vs c_T (small x0 keeps the finite-y bias small)
    worst = 0.0;
    for (double gamma : {0.5, 0.75})
        for (double beta : {-1.0, 0.0, 1.0}) {
            const ModelParams p(gamma, 0.5, beta, AlphaSpec::constant(0.0), 1e-5);
            std::vector<double> ys, lf;
            for (int i = 0; i < 20; ++i) {
                const double y = std::exp(std::log(100.0) +
                                          (std::log(1000.0) - std::log(100.0)) * i / 19.0);
                ys.push_back(y);
                lf.push_back(cev_log_density(y, p, 1.0).log_density);
            }
            const auto fit = fit_tail_slope(ys, lf, gamma);
            const double c = constant_cT(p, 1.0);
            worst = std::max(worst, std::abs(fit.slope - c) / c);
        }
    report("CEV density tail slope matches c_T within 2%", worst <= 0.02, worst);

    return all_ok ? kExitOk : kExitNumerical;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"large-deviation toolkit for CEV/CIR-type square-root diffusions"};
    app.require_subcommand(1);

    std::function<int()> action;

    { // constants
        auto* cmd =
            app.add_subcommand("constants", "closed-form tail constants c_T, nu_T, omega");
        auto mf = std::make_shared<ModelFlags>();
        auto T = std::make_shared<double>(1.0);
        auto output = std::make_shared<std::string>();
        auto format = std::make_shared<std::string>("json");
        mf->attach(cmd);
        cmd->add_option("--T", *T, "horizon, > 0");
        cmd->add_option("--output,-o", *output, "output file (default stdout)");
        cmd->add_option("--format", *format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
        cmd->callback(
            [=, &action] { action = [=] { return run_constants(*mf, *T, *output, *format); }; });
    }

    { // simulate
        auto* cmd = app.add_subcommand("simulate",
                                       "simulate the rescaled (optionally shifted) process");
        auto mf = std::make_shared<ModelFlags>();
        auto T = std::make_shared<double>(1.0);
        auto cfg = std::make_shared<SimConfig>();
        auto scheme = std::make_shared<std::string>("euler");
        auto hdot = std::make_shared<double>(0.0);
        auto control = std::make_shared<std::string>();
        auto output = std::make_shared<std::string>();
        auto format = std::make_shared<std::string>("csv");
        mf->attach(cmd);
        cmd->add_option("--T", *T, "horizon, > 0");
        cmd->add_option("--eps", cfg->epsilon, "noise scale epsilon, > 0");
        cmd->add_option("--steps", cfg->steps, "time steps N, >= 1");
        cmd->add_option("--paths", cfg->n_paths, "number of paths, >= 1");
        cmd->add_option("--seed", cfg->seed, "64-bit seed");
        cmd->add_option("--scheme", *scheme, "euler | cir-exact");
        auto* hopt = cmd->add_option("--hdot", *hdot, "constant Girsanov shift derivative");
        cmd->add_option("--control", *control, "control CSV `t,hdot` (overrides --hdot)");
        cmd->add_option("--output,-o", *output, "output file (default stdout)");
        cmd->add_option("--format", *format, "csv | bin")->check(CLI::IsMember({"csv", "bin"}));
        cmd->callback([=, &action] {
            const bool hdot_set = hopt->count() > 0;
            action = [=] {
                return run_simulate(*mf, *T, *cfg, *scheme, *hdot, hdot_set, *control, *output,
                                    *format);
            };
        });
    }

    { // rate
        auto* cmd = app.add_subcommand("rate", "evaluate the rate functionals on a path CSV");
        auto mf = std::make_shared<ModelFlags>();
        auto path = std::make_shared<std::string>();
        auto output = std::make_shared<std::string>();
        mf->attach(cmd);
        cmd->add_option("--path", *path, "path CSV `t,value`")->required();
        cmd->add_option("--output,-o", *output, "output file (default stdout)");
        cmd->callback([=, &action] { action = [=] { return run_rate(*mf, *path, *output); }; });
    }

    { // minimize
        auto* cmd =
            app.add_subcommand("minimize", "constrained minimization of the rate functional");
        auto mf = std::make_shared<ModelFlags>();
        auto T = std::make_shared<double>(1.0);
        auto kind = std::make_shared<std::string>("terminal");
        auto level = std::make_shared<double>(1.0);
        auto N = std::make_shared<std::size_t>(2000);
        auto weights = std::make_shared<std::string>();
        auto mincsv = std::make_shared<std::string>();
        auto output = std::make_shared<std::string>();
        mf->attach(cmd);
        cmd->add_option("--T", *T, "horizon, > 0");
        cmd->add_option("--kind", *kind, "terminal | sup | average | weighted");
        cmd->add_option("--level", *level, "constraint level y, > 0");
        cmd->add_option("--N", *N, "grid size, >= 100");
        cmd->add_option("--weights", *weights, "node-weight CSV for kind=weighted");
        cmd->add_option("--minimizer-csv", *mincsv,
                        "write the minimizer path CSV here instead of inlining it");
        cmd->add_option("--output,-o", *output, "output JSON (default stdout)");
        cmd->callback([=, &action] {
            action = [=] {
                return run_minimize(*mf, *T, *kind, *level, *N, *weights, *mincsv, *output);
            };
        });
    }

    { // tails
        auto* cmd =
            app.add_subcommand("tails", "rare-event tail estimates; appends a CSV ledger");
        auto mf = std::make_shared<ModelFlags>();
        auto T = std::make_shared<double>(1.0);
        auto kind = std::make_shared<std::string>("terminal");
        auto levels = std::make_shared<std::string>();
        auto estimator = std::make_shared<std::string>("plain");
        auto cfg = std::make_shared<SimConfig>();
        auto scheme = std::make_shared<std::string>("euler");
        auto eps = std::make_shared<double>(0.0);
        auto parallel = std::make_shared<bool>(false);
        auto output = std::make_shared<std::string>();
        cfg->steps = 500;
        cfg->n_paths = 100000;
        mf->attach(cmd);
        cmd->add_option("--T", *T, "horizon, > 0");
        cmd->add_option("--kind", *kind, "terminal | sup | average");
        cmd->add_option("--levels", *levels, "comma-separated levels R")->required();
        cmd->add_option("--estimator", *estimator, "plain | is");
        cmd->add_option("--steps", cfg->steps, "time steps N");
        cmd->add_option("--paths", cfg->n_paths, "paths per level");
        cmd->add_option("--seed", cfg->seed, "64-bit seed");
        cmd->add_option("--scheme", *scheme, "euler | cir-exact");
        auto* eopt =
            cmd->add_option("--eps", *eps, "fixed epsilon (default: per-level R^{-(1-gamma)})");
        cmd->add_flag("--parallel", *parallel, "run batch levels concurrently");
        cmd->add_option("--output,-o", *output, "ledger CSV, appended (default stdout)");
        cmd->callback([=, &action] {
            const bool eps_set = eopt->count() > 0;
            action = [=] {
                return run_tails(*mf, *T, *kind, *levels, *estimator, *cfg, *scheme, *eps,
                                 eps_set, *parallel, *output);
            };
        });
    }

    { // figure1
        auto* cmd = app.add_subcommand(
            "figure1", "shifted-ensemble mean vs the selected solution along an eps ladder");
        auto mf = std::make_shared<ModelFlags>();
        auto T = std::make_shared<double>(1.0);
        auto eps_list = std::make_shared<std::string>("0.4,0.2,0.1,0.05");
        auto hdot = std::make_shared<double>(1.0);
        auto cfg = std::make_shared<SimConfig>();
        auto output = std::make_shared<std::string>();
        cfg->steps = 1000;
        cfg->n_paths = 2000;
        mf->attach(cmd);
        cmd->add_option("--T", *T, "horizon, > 0");
        cmd->add_option("--eps", *eps_list, "comma-separated epsilon ladder");
        cmd->add_option("--hdot", *hdot, "constant shift derivative");
        cmd->add_option("--steps", cfg->steps, "time steps N");
        cmd->add_option("--paths", cfg->n_paths, "paths per epsilon");
        cmd->add_option("--seed", cfg->seed, "64-bit seed");
        cmd->add_option("--output,-o", *output, "output CSV (default stdout)");
        cmd->callback([=, &action] {
            action = [=] { return run_figure1(*mf, *T, *eps_list, *hdot, *cfg, *output); };
        });
    }

    { // check
        auto* cmd = app.add_subcommand("check", "cross-validate the analytic oracles");
        auto suite = std::make_shared<std::string>("oracle-consistency");
        cmd->add_option("--suite", *suite, "check suite name");
        cmd->callback([=, &action] { action = [=] { return run_check(*suite); }; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    try {
        return action();
    } catch (const std::invalid_argument& e) {
        std::cerr << "cevld: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::domain_error& e) {
        std::cerr << "cevld: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "cevld: " << e.what() << "\n";
        return kExitNumerical;
    }
}
