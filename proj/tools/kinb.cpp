#include "kinb/io.hpp"
#include "kinb/inequalities.hpp"
#include "kinb/suites.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace kinb;

namespace {

enum Exit { ok = 0, config_error = 1, numerical_error = 2, property_failed = 3 };

int cmd_simulate(const fs::path& config_path, const fs::path& out_dir)
{
    const Config cfg = load_config(config_path);
    fs::create_directories(out_dir);
    {
        std::ofstream manifest(out_dir / "manifest.ini");
        write_config(manifest, cfg);
    }
    std::ofstream csv(out_dir / "run.csv");
    if (!csv) throw ConfigError("cannot write into " + out_dir.string());
    write_run_csv_header(csv);
    std::size_t index = 0;
    run(cfg.run, [&](const SpectralState& s, const Monitor& m) {
        write_snapshot(out_dir / snapshot_name(index++), s);
        write_run_csv_row(csv, m);
        csv.flush();
    });
    std::cout << "wrote " << index << " snapshots to " << out_dir.string() << "\n";
    return ok;
}

struct DiagnoseFlags {
    std::vector<std::string> snapshots;
    std::vector<double> window;
    std::optional<double> alpha, beta, lambda;
    std::string config;
    std::string out = "fit.csv";
};

int cmd_diagnose(const DiagnoseFlags& f)
{
    std::vector<SpectralState> states;
    for (const auto& p : f.snapshots) {
        try {
            states.push_back(read_snapshot(fs::path(p)));
        } catch (const NumericalError&) {
            throw;
        } catch (const std::exception& e) {
            throw ConfigError(p + ": " + e.what());
        }
    }
    std::optional<Config> cfg;
    if (!f.config.empty()) cfg = load_config(f.config);

    std::ofstream csv(f.out);
    if (!csv) throw ConfigError("cannot write " + f.out);
    csv << "snapshot,t,alpha_hat,beta_hat,residual,points,weighted_l2,weighted_sup,weighted_h_alpha\n";
    for (std::size_t i = 0; i < states.size(); ++i) {
        const SpectralState& s = states[i];
        const double lo = f.window.empty() ? 1.0 : f.window[0];
        const double hi = f.window.empty() ? 0.5 * s.grid.eta_max : f.window[1];
        const GevreyFit fit = fit_gevrey_order(s, lo, hi);
        GevreyWeight w;
        w.alpha = f.alpha.value_or(std::clamp(fit.alpha_hat, 1e-3, 0.999));
        w.beta = f.beta.value_or(fit.beta_hat / std::max(s.t, 1e-300));
        if (s.t == 0.0 && !f.beta) w.beta = 0.0;
        w.t = s.t;
        if (f.lambda) w.lambda = *f.lambda;
        const WeightedNorms n = weighted_norms(s, w);
        std::printf("%s  t = %.6g\n", f.snapshots[i].c_str(), s.t);
        std::printf("  alpha_hat = %.6f  beta_hat = %.6g  residual = %.3g  points = %d\n", fit.alpha_hat, fit.beta_hat,
                    fit.residual, fit.points);
        std::printf("  weight alpha = %.6g beta = %.6g: l2 = %.10g  sup = %.10g  h_alpha = %.10g\n", w.alpha, w.beta,
                    n.l2, n.sup, n.h_alpha);
        csv << f.snapshots[i] << ',' << format_number(s.t) << ',' << format_number(fit.alpha_hat) << ','
            << format_number(fit.beta_hat) << ',' << format_number(fit.residual) << ',' << fit.points << ','
            << format_number(n.l2) << ',' << format_number(n.sup) << ',' << format_number(n.h_alpha) << '\n';
        if (cfg) {
            if (!std::isfinite(w.lambda)) w.lambda = s.grid.eta_max / std::sqrt(2.0);
            const CommutatorReport c = commutation_error(s, w, cfg->run.cs, cfg->run.quad);
            std::printf("  commutator: lhs = %.6e  rhs_bound = %.6e  I = %.6e  I_plus = %.6e\n", c.lhs, c.rhs_bound,
                        c.I, c.I_plus);
        }
    }
    return ok;
}

struct ConstantsFlags {
    int m = 2;
    int d = 1;
    double nu = 0.25;
    double kappa = 1.0;
    bool bounded = false;
    std::string csv;
};

int cmd_constants(const ConstantsFlags& f)
{
    if (f.m < 2 || f.m > 8) throw ConfigError("--m must lie in [2, 8]");
    if (f.d < 1 || f.d > 8) throw ConfigError("--d must lie in [1, 8]");
    std::printf("alpha_md(m=%d, d=%d) = %.6f\n\n", f.m, f.d, alpha_md(f.m, f.d));

    std::printf("alpha_md table\n%4s", "m\\d");
    for (int d = 1; d <= 8; ++d) std::printf("  %9d", d);
    std::printf("\n");
    for (int m = 2; m <= 8; ++m) {
        std::printf("%4d", m);
        for (int d = 1; d <= 8; ++d) std::printf("  %9.6f", alpha_md(m, d));
        std::printf("\n");
    }

    std::printf("\nKolmogorov-Landau constants with optimised points\n%4s  %14s  %s\n", "m", "C_m", "lambda");
    std::vector<LambdaPoints> points;
    for (int m = 2; m <= 8; ++m) {
        points.push_back(optimize_lambdas(m));
        std::printf("%4d  %14.6f  [", m, kl_constant(points.back()));
        for (Eigen::Index i = 0; i < points.back().lambda.size(); ++i)
            std::printf("%s%.6f", i ? ", " : "", points.back().lambda[i]);
        std::printf("]\n");
    }

    std::printf("\nrequired moment for nu = %g: %d (unbounded), %d (bounded)", f.nu, required_moment(f.nu, false),
                required_moment(f.nu, true));
    std::printf("  -> selected %d\n", required_moment(f.nu, f.bounded));

    CrossSection cs{f.d, f.nu, f.kappa};
    cs.validate();
    std::printf("c_{b,d,2} = %.10g\n", c_bd2(cs));
    if (f.d >= 3) std::printf("c_{b,d}   = %.10g\n", c_bd(cs));

    std::printf("\nLambda_0 defaults (d = %d)\n", f.d);
    for (Part p : {Part::I, Part::II, Part::III}) {
        if (p != Part::I && f.d < 2) {
            std::printf("  part %-3s  n/a (needs d >= 2)\n", to_string(p).c_str());
            continue;
        }
        std::printf("  part %-3s  %.6f\n", to_string(p).c_str(), default_lambda0(p, f.d));
    }

    if (!f.csv.empty()) {
        std::ofstream out(f.csv);
        if (!out) throw ConfigError("cannot write " + f.csv);
        out << "m,n,alpha_md,C_m,lambda\n";
        for (int m = 2; m <= 8; ++m)
            for (int d = 1; d <= 8; ++d) {
                const LambdaPoints& lp = points[std::size_t(m - 2)];
                out << m << ',' << d << ',' << format_number(alpha_md(m, d)) << ',' << format_number(kl_constant(lp))
                    << ',';
                for (Eigen::Index i = 0; i < lp.lambda.size(); ++i) out << (i ? ";" : "") << format_number(lp.lambda[i]);
                out << '\n';
            }
    }
    return ok;
}

int cmd_verify(const std::string& suite, std::uint64_t seed, double cm_scale)
{
    SuiteOptions opt;
    opt.cm_scale = cm_scale;
    const SuiteResult r = run_suite(suite, seed, opt);
    std::printf("suite %s seed %llu: %ld checks, %ld failures\n", r.name.c_str(), (unsigned long long)seed, r.checks,
                r.failures);
    if (r.ok()) return ok;
    std::printf("counterexample: %s\n", r.counterexample.c_str());
    return property_failed;
}

int cmd_induction(const fs::path& run_dir, const fs::path& config_path)
{
    const Config cfg = load_config(config_path);
    const Trajectory traj = load_run(run_dir);
    const ResolvedInduction res = resolve_induction(cfg, traj);
    const InductionSchedule& s = res.schedule;
    const std::vector<HypRow> rows = check_hypotheses(traj, s);
    {
        std::ofstream out(run_dir / "induction.csv");
        if (!out) throw ConfigError("cannot write induction.csv into " + run_dir.string());
        write_induction_csv(out, rows);
    }
    std::printf("part %s  alpha = %.6g  beta = %.6g  T0 = %.6g  m = %d\n", to_string(s.part).c_str(), s.alpha, s.beta,
                s.T0, s.m);
    std::printf("A_m = %.10g  K1 = %.10g  M = %.10g  Lambda_0 = %.6g  n_max = %d\n", res.A, res.K1, s.M, s.lambda0,
                s.n_max);
    int largest = -1;
    for (int N = 0; N <= s.n_max; ++N) {
        bool all = true;
        for (const auto& r : rows)
            if (r.N == N) all = all && r.pass;
        if (!all) break;
        largest = N;
    }
    if (largest < 0) std::printf("chain fails already at Lambda_0 = %.6g\n", s.scale(0));
    else std::printf("chain holds through N = %d, Lambda_N = %.6g\n", largest, s.scale(largest));
    return ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Gevrey smoothing laboratory for the non-cutoff Boltzmann and Kac equations"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    auto* simulate = app.add_subcommand("simulate", "evolve a configured initial datum");
    simulate->add_option("config", config_path, "config file")->required();
    simulate->add_option("out", out_dir, "output directory")->required();

    DiagnoseFlags diag;
    auto* diagnose = app.add_subcommand("diagnose", "fit Gevrey order and weighted norms of snapshots");
    diagnose->add_option("snapshots", diag.snapshots, "snapshot files")->required();
    diagnose->add_option("--fit-window", diag.window, "fit window lo,hi in |eta|")->expected(2)->delimiter(',');
    diagnose->add_option("--alpha", diag.alpha, "weight exponent");
    diagnose->add_option("--beta", diag.beta, "weight rate");
    diagnose->add_option("--lambda", diag.lambda, "weight cutoff");
    diagnose->add_option("--config", diag.config, "config providing kernel and quadrature for the commutator");
    diagnose->add_option("--out", diag.out, "fit table path");

    ConstantsFlags cf;
    auto* constants = app.add_subcommand("constants", "print inequality and kernel constants");
    constants->add_option("--m", cf.m, "moment order");
    constants->add_option("--d", cf.d, "dimension");
    constants->add_option("--nu", cf.nu, "kernel singularity");
    constants->add_option("--kappa", cf.kappa, "kernel prefactor");
    constants->add_flag("--bounded", cf.bounded, "bounded-velocity variant of the moment threshold");
    constants->add_option("--csv", cf.csv, "also write the table as CSV");

    std::string suite;
    std::uint64_t seed = 1;
    double cm_scale = 1.0;
    auto* verify = app.add_subcommand("verify", "run a property suite");
    verify->add_option("suite", suite, "epsilon, kl, ddlemma, expdiff, commutator, geometry or conservation")->required();
    verify->add_option("--seed", seed, "random seed");
    verify->add_option("--corrupt-cm", cm_scale, "scale C_m in the kl suite (test hook)");

    std::string run_dir, ind_config;
    auto* induction = app.add_subcommand("induction", "check the induction hypotheses on a stored run");
    induction->add_option("run", run_dir, "simulate output directory")->required();
    induction->add_option("config", ind_config, "config file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : config_error;
    }

    try {
        if (*simulate) return cmd_simulate(config_path, out_dir);
        if (*diagnose) return cmd_diagnose(diag);
        if (*constants) return cmd_constants(cf);
        if (*verify) return cmd_verify(suite, seed, cm_scale);
        if (*induction) return cmd_induction(run_dir, ind_config);
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return numerical_error;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return config_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return numerical_error;
    }
    return config_error;
}
