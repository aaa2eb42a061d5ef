// Command-line front end: calculus queries, samplers, experiments and the
// closed-form self-check suite.

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "orlicz/errors.hpp"
#include "orlicz/experiments.hpp"
#include "orlicz/gibbs.hpp"
#include "orlicz/maxent.hpp"
#include "orlicz/orlicz_function.hpp"
#include "orlicz/samplers.hpp"
#include "orlicz/stats.hpp"

using nlohmann::ordered_json;
using namespace orlicz;

namespace {

struct GlobalOpts {
    std::uint64_t seed = 0;
    std::string out;
    double quad_tol = 1e-12;
    int workers = 1;
};

QuadratureConfig quad_config(const GlobalOpts& g) {
    QuadratureConfig q;
    q.abs_tol = g.quad_tol;
    return q;
}

void emit(const GlobalOpts& g, const ordered_json& j) {
    const std::string text = j.dump(2) + "\n";
    if (g.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(g.out);
    if (!f) throw ConfigError("cannot open output file '" + g.out + "'");
    f << text;
}

ordered_json solution_json(const MaxEntSolution& s) {
    ordered_json j;
    j["mu1_star"] = s.mu1_star;
    j["mu2_star"] = s.mu2_star;
    j["log_partition"] = s.log_partition;
    j["m1"] = s.achieved_m1;
    j["m2"] = s.achieved_m2;
    j["regime"] = to_string(s.regime);
    j["kkt_residual"] = s.kkt_residual;
    j["entropy"] = s.entropy;
    return j;
}

ConstraintType parse_constraint_type(const std::string& s) {
    if (s == "le") return ConstraintType::LessEqual;
    if (s == "eq") return ConstraintType::Equal;
    throw ConfigError("constraint type must be 'le' or 'eq', got '" + s + "'");
}

// ---------------------------------------------------------------- verify --

struct Check {
    std::string name;
    std::function<void()> body;  // throws std::runtime_error on failure
};

void expect(bool ok, const std::string& detail) {
    if (!ok) throw std::runtime_error(detail);
}

void expect_close(double got, double want, double tol, const std::string& what) {
    if (!(std::fabs(got - want) <= tol)) {
        std::ostringstream os;
        os.precision(17);
        os << what << ": got " << got << ", want " << want << " +/- " << tol;
        throw std::runtime_error(os.str());
    }
}

int run_verify(const GlobalOpts& g) {
    const QuadratureConfig q = quad_config(g);
    std::vector<Check> checks;

    checks.push_back({"critical temperature closed form", [&] {
        for (double p : {1.0, 1.5, 2.0, 3.0, 4.0})
            for (double r : {0.1, 0.5, 1.0, 2.0, 10.0}) {
                const double want = -1.0 / (p * r);
                const double got = solve_alpha(OrliczFunction::power(p), r, q);
                expect_close(got, want, 1e-9 * std::fabs(want),
                             "alpha(power:" + std::to_string(p) +
                                 ", R=" + std::to_string(r) + ")");
            }
    }});

    checks.push_back({"log-partition derivative consistency", [&] {
        const double h = 1e-4;
        for (const auto& spec : builtin_potential_specs()) {
            const OrliczFunction v = parse_potential(spec);
            for (double a : {-4.0, -2.0, -1.0, -0.5, -0.1}) {
                const double m = moment(v, v, a, q);
                const double fd =
                    (log_partition(v, a + h, q) - log_partition(v, a - h, q)) /
                    (2.0 * h);
                expect_close(m, fd, 1e-5,
                             spec + " at alpha=" + std::to_string(a));
            }
        }
    }});

    checks.push_back({"threshold closed forms", [&] {
        const Thresholds t1 = compute_thresholds(OrliczFunction::power(2),
                                                 OrliczFunction::power(1), q);
        expect_close(t1.alpha_bar, -std::sqrt(2.0), 1e-6, "alpha_bar(2,1)");
        expect_close(t1.r_bar, 1.0 / std::sqrt(2.0), 1e-6, "r_bar(2,1)");
        expect_close(t1.r_tilde, 1.0, 1e-4, "r_tilde(2,1)");
        const Thresholds t2 = compute_thresholds(OrliczFunction::power(4),
                                                 OrliczFunction::power(2), q);
        expect_close(t2.r_bar, 1.0 / std::sqrt(3.0), 1e-6, "r_bar(4,2)");
        expect_close(t2.r_tilde, 1.0, 1e-4, "r_tilde(4,2)");
    }});

    checks.push_back({"maxent KKT sweep", [&] {
        const OrliczFunction p2 = OrliczFunction::power(2);
        const OrliczFunction p1 = OrliczFunction::power(1);
        const OrliczFunction p4 = OrliczFunction::power(4);
        struct CaseDef {
            OrliczFunction v1, v2;
            double c2;
        };
        std::vector<CaseDef> defs;
        for (double r : {0.3, 0.5, 0.7, 0.85, 1.0, 1.5}) defs.push_back({p2, p1, r});
        for (double r : {0.4, 0.58, 0.8, 1.0, 1.2}) defs.push_back({p4, p2, r});
        for (const auto& d : defs) {
            const MaxEntSolution s = maxent_two_constraints(
                d.v1, 1.0, ConstraintType::LessEqual, d.v2, d.c2,
                ConstraintType::LessEqual, q);
            expect(s.kkt_residual <= 1e-9,
                   "kkt residual " + std::to_string(s.kkt_residual) + " at R=" +
                       std::to_string(d.c2));
            const double slack1 = std::fabs(s.mu1_star * (s.achieved_m1 - 1.0));
            const double slack2 = std::fabs(s.mu2_star * (s.achieved_m2 - d.c2));
            expect(slack1 <= 1e-8 && slack2 <= 1e-8,
                   "complementary slackness at R=" + std::to_string(d.c2));
        }
        // Subcritical identity: the single active multiplier equals -alpha(R).
        const MaxEntSolution sub = maxent_two_constraints(
            p2, 1.0, ConstraintType::LessEqual, p1, 0.5,
            ConstraintType::LessEqual, q);
        expect(sub.regime == Regime::Subcritical, "R=0.5 should be subcritical");
        expect_close(sub.mu2_star, -solve_alpha(p1, 0.5, q), 1e-7,
                     "subcritical multiplier");
        const MaxEntSolution sup = maxent_two_constraints(
            p2, 1.0, ConstraintType::LessEqual, p1, 1.5,
            ConstraintType::LessEqual, q);
        expect(sup.regime == Regime::Supercritical, "R=1.5 should be supercritical");
        expect_close(sup.mu1_star, -solve_alpha(p2, 1.0, q), 1e-7,
                     "supercritical multiplier");
    }});

    checks.push_back({"volume limit vs exact dimensions", [&] {
        for (double p : {1.0, 2.0, 4.0})
            for (double r : {0.5, 1.0, 2.0}) {
                const double limit =
                    log_volume_limit(OrliczFunction::power(p), r, q);
                double prev = std::numeric_limits<double>::infinity();
                for (long n : {10L, 100L, 1000L, 5000L}) {
                    const double gap =
                        std::fabs(exact_lp_log_volume(p, r, n) - limit);
                    expect(gap < prev, "gap must shrink with n");
                    prev = gap;
                }
                expect(prev <= 2e-3, "final gap " + std::to_string(prev));
            }
        expect_close(log_volume_limit(OrliczFunction::power(1), 1.0, q),
                     std::log(2.0) + 1.0, 1e-9, "limit(power:1, R=1)");
        expect_close(log_volume_limit(OrliczFunction::power(2), 1.0, q),
                     0.5 * std::log(2.0 * M_PI) + 0.5, 1e-9,
                     "limit(power:2, R=1)");
    }});

    checks.push_back({"thin-shell rate zero at the typical point", [&] {
        const OrliczFunction v = OrliczFunction::power(4);
        const double alpha = solve_alpha(v, 1.0, q);
        const double x_star =
            std::sqrt(moment(OrliczFunction::power(2), v, alpha, q));
        const ThinshellPoint at_star = thinshell_rate(v, 1.0, 2.0, x_star, q);
        expect(at_star.value <= 1e-6, "J(x*) = " + std::to_string(at_star.value));
        expect(!std::isfinite(thinshell_rate(v, 1.0, 2.0, -0.5, q).value),
               "J must be infinite at negative x");
        expect(thinshell_rate(v, 1.0, 2.0, 0.5 * x_star, q).value > 0.0,
               "J must be positive below x*");
        expect(thinshell_rate(v, 1.0, 2.0, 1.5 * x_star, q).value > 0.0,
               "J must be positive above x*");
    }});

    checks.push_back({"potential axioms", [&] {
        std::vector<double> grid;
        for (int i = -60; i <= 60; ++i) grid.push_back(0.1 * i);
        for (const auto& spec : builtin_potential_specs()) {
            const AxiomReport rep = verify_orlicz(parse_potential(spec), grid);
            expect(rep.all_pass(), spec + " failed the axiom sweep");
        }
    }});

    checks.push_back({"quantile round trip", [&] {
        const GibbsMeasure1D law(OrliczFunction::power(2), -1.0, q);
        for (double u : {0.001, 0.1, 0.25, 0.5, 0.77, 0.9, 0.999}) {
            expect_close(law.cdf(law.quantile(u)), u, 1e-8,
                         "cdf(quantile(u)) at u=" + std::to_string(u));
        }
    }});

    checks.push_back({"zero rate at the matching Gibbs law", [&] {
        // N(0,1) is the Gibbs law of power:2 at R=1, so its rate there is 0.
        std::vector<double> nodes, vals;
        for (int i = 0; i <= 4000; ++i) {
            const double x = -8.0 + 16.0 * i / 4000.0;
            nodes.push_back(x);
            vals.push_back(std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI));
        }
        const GridDensity mu(nodes, vals);
        const double rate = rate_function(OrliczFunction::power(2), 1.0, mu, q);
        expect(std::fabs(rate) <= 1e-4, "rate " + std::to_string(rate));
    }});

    ordered_json cfg;
    cfg["seed"] = g.seed;
    cfg["quad_abs_tol"] = g.quad_tol;
    std::cout << "self-check config " << cfg.dump() << "\n";
    int failures = 0;
    for (const auto& c : checks) {
        try {
            c.body();
            std::cout << "[ok]   " << c.name << "\n";
        } catch (const std::exception& e) {
            ++failures;
            std::cout << "[FAIL] " << c.name << ": " << e.what() << "\n";
        }
    }
    std::cout << (failures == 0 ? "all checks passed"
                                : std::to_string(failures) + " check(s) failed")
              << "\n";
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Gibbs calculus, entropy maximization, samplers and verification "
        "experiments for high-dimensional Orlicz balls"};
    app.require_subcommand(1);

    GlobalOpts g;
    auto* seed_opt =
        app.add_option("--seed", g.seed, "master RNG seed (default 0)");
    auto* out_opt =
        app.add_option("--out", g.out, "output path (default stdout)");
    auto* quad_opt = app.add_option("--quad-tol", g.quad_tol,
                                    "absolute quadrature tolerance");
    auto* workers_opt =
        app.add_option("--workers", g.workers, "max concurrent chains");

    // gibbs ---------------------------------------------------------------
    auto* gibbs_cmd =
        app.add_subcommand("gibbs", "log-partition, moment and variance of a "
                                    "Gibbs potential tilt");
    gibbs_cmd->fallthrough();
    std::string gb_v;
    double gb_r = 0.0, gb_alpha = 0.0;
    gibbs_cmd->add_option("--V", gb_v, "potential spec, e.g. power:2")->required();
    auto* gb_ropt =
        gibbs_cmd->add_option("--R", gb_r, "budget; solves for alpha(R)");
    auto* gb_aopt = gibbs_cmd->add_option("--alpha", gb_alpha, "tilt (< 0)");
    gb_ropt->excludes(gb_aopt);

    // thresholds ----------------------------------------------------------
    auto* thr_cmd = app.add_subcommand(
        "thresholds", "critical radii separating the three regimes");
    thr_cmd->fallthrough();
    std::string th_v1, th_v2;
    thr_cmd->add_option("--V1", th_v1, "primary potential")->required();
    thr_cmd->add_option("--V2", th_v2, "constraint potential")->required();

    // maxent --------------------------------------------------------------
    auto* max_cmd = app.add_subcommand(
        "maxent", "entropy maximization under two moment constraints");
    max_cmd->fallthrough();
    std::string mx_v1, mx_v2, mx_t1 = "le", mx_t2 = "le";
    double mx_c1 = 1.0, mx_c2 = 1.0;
    max_cmd->add_option("--V1", mx_v1)->required();
    max_cmd->add_option("--c1", mx_c1, "bound for E V1 (default 1)");
    max_cmd->add_option("--type1", mx_t1, "le or eq (default le)");
    max_cmd->add_option("--V2", mx_v2)->required();
    max_cmd->add_option("--c2", mx_c2, "bound for E V2 (default 1)");
    max_cmd->add_option("--type2", mx_t2, "le or eq (default le)");

    // thinshell -----------------------------------------------------------
    auto* thin_cmd = app.add_subcommand(
        "thinshell", "rate function of the scaled p-norm on the ball");
    thin_cmd->fallthrough();
    std::string ts_v;
    double ts_p = 2.0, ts_r = 1.0;
    std::vector<double> ts_xs;
    thin_cmd->add_option("--V", ts_v)->required();
    thin_cmd->add_option("--p", ts_p, "norm exponent (default 2)");
    thin_cmd->add_option("--R", ts_r, "ball budget (default 1)");
    thin_cmd->add_option("--x", ts_xs, "evaluation points (repeatable)");

    // volume --------------------------------------------------------------
    auto* vol_cmd = app.add_subcommand(
        "volume", "per-dimension log-volume of the ball and its limit");
    vol_cmd->fallthrough();
    std::string vl_v;
    double vl_r = 1.0;
    long vl_n = 5000;
    vol_cmd->add_option("--V", vl_v)->required();
    vol_cmd->add_option("--R", vl_r, "budget (default 1)");
    vol_cmd->add_option("--n", vl_n, "dimension for the exact formula");

    // sample --------------------------------------------------------------
    auto* smp_cmd = app.add_subcommand(
        "sample", "draw ball-uniform or conditional samples as CSV");
    smp_cmd->fallthrough();
    std::string sp_v1, sp_v2;
    double sp_r = 1.0, sp_eps = 0.0;
    long sp_n = 0, sp_k = 0, sp_count = 1000, sp_kept = 1000, sp_burn = -1,
         sp_thin = 5;
    smp_cmd->add_option("--V1", sp_v1)->required();
    smp_cmd->add_option("--V2", sp_v2, "second ball for conditional sampling");
    smp_cmd->add_option("--R", sp_r, "budget of the sampled/conditioning ball");
    smp_cmd->add_option("--eps", sp_eps, "enlargement of the V2 budget");
    smp_cmd->add_option("--n", sp_n, "dimension")->required();
    smp_cmd->add_option("--k", sp_k, "columns to keep (default all / 1)");
    smp_cmd->add_option("--count", sp_count, "draws for the exact sampler");
    smp_cmd->add_option("--kept", sp_kept, "kept MCMC states");
    smp_cmd->add_option("--burn-in", sp_burn, "sweeps to discard (-1: 2n)");
    smp_cmd->add_option("--thin", sp_thin, "sweeps between kept states");

    // experiment ----------------------------------------------------------
    auto* exp_cmd = app.add_subcommand(
        "experiment", "run a verification experiment from a JSON config");
    exp_cmd->fallthrough();
    std::string ex_config, ex_name;
    std::vector<std::string> ex_potentials;
    double ex_r = 0.0;
    bool ex_dump = false;
    exp_cmd->add_option("--config", ex_config, "JSON config file");
    exp_cmd->add_option("--experiment", ex_name,
                        "experiment name (marginal, conditional, volume, "
                        "thinshell, ldp_rate)");
    exp_cmd->add_option("--potentials", ex_potentials,
                        "potential specs (repeatable)");
    auto* ex_ropt = exp_cmd->add_option("--R", ex_r, "budget");
    exp_cmd->add_flag("--dump-config", ex_dump,
                      "print the resolved config and exit");

    // verify --------------------------------------------------------------
    auto* ver_cmd = app.add_subcommand(
        "verify", "closed-form invariant suite (no sampling)");
    ver_cmd->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(gibbs_cmd)) {
            const OrliczFunction v = parse_potential(gb_v);
            const QuadratureConfig q = quad_config(g);
            if ((gb_ropt->count() == 0) == (gb_aopt->count() == 0))
                throw ConfigError("give exactly one of --R and --alpha");
            const bool from_r = gb_ropt->count() > 0;
            const double alpha = from_r ? solve_alpha(v, gb_r, q) : gb_alpha;
            const GibbsMeasure1D law(v, alpha, q);
            ordered_json j;
            j["config"]["V"] = v.spec_string();
            if (from_r) j["config"]["R"] = gb_r;
            j["config"]["quad_abs_tol"] = g.quad_tol;
            j["alpha"] = alpha;
            j["log_partition"] = law.log_partition();
            j["m_V"] = law.moment();
            j["variance"] = law.variance();
            j["entropy"] = law.law().entropy();
            emit(g, j);
            return 0;
        }

        if (app.got_subcommand(thr_cmd)) {
            const QuadratureConfig q = quad_config(g);
            const Thresholds th = compute_thresholds(parse_potential(th_v1),
                                                     parse_potential(th_v2), q);
            ordered_json j;
            j["config"]["V1"] = th_v1;
            j["config"]["V2"] = th_v2;
            j["config"]["quad_abs_tol"] = g.quad_tol;
            j["alpha_bar"] = th.alpha_bar;
            j["r_bar"] = th.r_bar;
            j["r_tilde"] = th.r_tilde;
            emit(g, j);
            return 0;
        }

        if (app.got_subcommand(max_cmd)) {
            const QuadratureConfig q = quad_config(g);
            const MaxEntSolution s = maxent_two_constraints(
                parse_potential(mx_v1), mx_c1, parse_constraint_type(mx_t1),
                parse_potential(mx_v2), mx_c2, parse_constraint_type(mx_t2), q);
            ordered_json j;
            j["config"]["V1"] = mx_v1;
            j["config"]["c1"] = mx_c1;
            j["config"]["type1"] = mx_t1;
            j["config"]["V2"] = mx_v2;
            j["config"]["c2"] = mx_c2;
            j["config"]["type2"] = mx_t2;
            j["config"]["quad_abs_tol"] = g.quad_tol;
            j.update(solution_json(s));
            emit(g, j);
            return 0;
        }

        if (app.got_subcommand(thin_cmd)) {
            const QuadratureConfig q = quad_config(g);
            const OrliczFunction v = parse_potential(ts_v);
            const double alpha = solve_alpha(v, ts_r, q);
            const double x_star = std::pow(
                moment(OrliczFunction::power(ts_p), v, alpha, q), 1.0 / ts_p);
            std::vector<double> xs = ts_xs;
            if (xs.empty())
                xs = {-0.5,   0.25 * x_star, 0.5 * x_star, 0.75 * x_star,
                      x_star, 1.25 * x_star, 1.5 * x_star, 2.0 * x_star};
            ordered_json j;
            j["config"]["V"] = ts_v;
            j["config"]["p"] = ts_p;
            j["config"]["R"] = ts_r;
            j["config"]["quad_abs_tol"] = g.quad_tol;
            j["x_star"] = x_star;
            j["points"] = ordered_json::array();
            for (double x : xs) {
                const ThinshellPoint pt = thinshell_rate(v, ts_r, ts_p, x, q);
                ordered_json pj;
                pj["x"] = x;
                if (std::isfinite(pt.value))
                    pj["j"] = pt.value;
                else
                    pj["j"] = nullptr;
                pj["infeasible"] = pt.infeasible;
                j["points"].push_back(pj);
            }
            emit(g, j);
            return 0;
        }

        if (app.got_subcommand(vol_cmd)) {
            const QuadratureConfig q = quad_config(g);
            const OrliczFunction v = parse_potential(vl_v);
            const double limit = log_volume_limit(v, vl_r, q);
            ordered_json j;
            j["config"]["V"] = vl_v;
            j["config"]["R"] = vl_r;
            j["config"]["n"] = vl_n;
            j["config"]["quad_abs_tol"] = g.quad_tol;
            j["limit"] = limit;
            if (v.is_pure_power()) {
                const double exact =
                    exact_lp_log_volume(v.pure_power_exponent(), vl_r, vl_n);
                j["exact"] = exact;
                j["gap"] = std::fabs(exact - limit);
            }
            emit(g, j);
            return 0;
        }

        if (app.got_subcommand(smp_cmd)) {
            if (sp_n < 1) throw ConfigError("--n must be >= 1");
            const OrliczFunction v1 = parse_potential(sp_v1);
            std::vector<std::vector<double>> states;
            ordered_json meta;
            meta["V1"] = sp_v1;
            meta["R"] = sp_r;
            meta["n"] = sp_n;
            meta["seed"] = g.seed;
            if (!sp_v2.empty()) {
                const OrliczFunction v2 = parse_potential(sp_v2);
                const std::size_t k =
                    sp_k > 0 ? static_cast<std::size_t>(sp_k) : 1;
                McmcParams params;
                params.burn_in = sp_burn;
                params.thin = sp_thin;
                states = conditional_marginal_samples(
                    v1, v2, sp_r, sp_eps, static_cast<std::size_t>(sp_n), k,
                    static_cast<std::size_t>(sp_kept), params, g.seed);
                meta["V2"] = sp_v2;
                meta["eps"] = sp_eps;
                meta["k"] = k;
                meta["kept"] = sp_kept;
                meta["burn_in"] = params.burn_in;
                meta["thin"] = sp_thin;
            } else if (v1.is_pure_power()) {
                states = sample_lp_ball_exact(v1.pure_power_exponent(), sp_r,
                                              static_cast<std::size_t>(sp_n),
                                              static_cast<std::size_t>(sp_count),
                                              g.seed);
                meta["count"] = sp_count;
                meta["sampler"] = "exact";
            } else {
                const long burn = sp_burn >= 0 ? sp_burn : 2 * sp_n;
                states = mcmc_orlicz_ball(
                    {{v1, sp_r * static_cast<double>(sp_n)}},
                    static_cast<std::size_t>(sp_n),
                    burn + sp_kept * sp_thin, burn, sp_thin, g.seed);
                meta["kept"] = sp_kept;
                meta["burn_in"] = burn;
                meta["thin"] = sp_thin;
                meta["sampler"] = "mcmc";
            }
            if (sp_v2.empty() && sp_k > 0)
                for (auto& row : states)
                    row.resize(std::min<std::size_t>(
                        row.size(), static_cast<std::size_t>(sp_k)));
            if (g.out.empty()) {
                write_samples_csv(std::cout, states, meta.dump());
            } else {
                std::ofstream f(g.out);
                if (!f)
                    throw ConfigError("cannot open output file '" + g.out + "'");
                write_samples_csv(f, states, meta.dump());
            }
            return 0;
        }

        if (app.got_subcommand(exp_cmd)) {
            ExperimentConfig cfg;
            if (!ex_config.empty()) {
                std::ifstream f(ex_config);
                if (!f)
                    throw ConfigError("cannot open config file '" + ex_config +
                                      "'");
                ordered_json j;
                try {
                    f >> j;
                } catch (const nlohmann::json::exception& e) {
                    throw ConfigError("config file is not valid JSON: " +
                                      std::string(e.what()));
                }
                cfg = ExperimentConfig::from_json(j);
            }
            if (!ex_name.empty()) cfg.experiment = ex_name;
            if (!ex_potentials.empty()) cfg.potentials = ex_potentials;
            if (ex_ropt->count() > 0) cfg.r = ex_r;
            if (seed_opt->count() > 0) cfg.seed = g.seed;
            if (workers_opt->count() > 0) cfg.workers = g.workers;
            if (quad_opt->count() > 0) cfg.quad_abs_tol = g.quad_tol;
            if (out_opt->count() > 0) cfg.out = g.out;
            cfg.resolve();
            if (ex_dump) {
                std::cout << cfg.to_json().dump(2) << "\n";
                return 0;
            }
            const ExperimentReport rep = run_experiment(cfg);
            const std::string text = rep.to_json().dump(2) + "\n";
            if (cfg.out.empty()) {
                std::cout << text;
            } else {
                std::string prefix = cfg.out;
                if (prefix.size() > 5 &&
                    prefix.substr(prefix.size() - 5) == ".json")
                    prefix = prefix.substr(0, prefix.size() - 5);
                std::ofstream jf(prefix + ".json");
                if (!jf)
                    throw ConfigError("cannot open output file '" + prefix +
                                      ".json'");
                jf << text;
                std::ofstream cf(prefix + ".csv");
                if (!cf)
                    throw ConfigError("cannot open output file '" + prefix +
                                      ".csv'");
                cf << rep.to_csv();
                std::cout << "experiment " << cfg.experiment << ": "
                          << (rep.pass ? "PASS" : "FAIL") << " ("
                          << rep.wall_clock_seconds << " s), report at "
                          << prefix << ".json\n";
            }
            return rep.pass ? 0 : 1;
        }

        if (app.got_subcommand(ver_cmd)) return run_verify(g);
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
