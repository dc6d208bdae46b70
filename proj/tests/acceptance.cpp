#include "kinb/io.hpp"
#include "kinb/inequalities.hpp"
#include "kinb/suites.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#ifndef KINB_CONFIG_DIR
#define KINB_CONFIG_DIR "configs"
#endif

using namespace kinb;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* pattern, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

fs::path config_dir = KINB_CONFIG_DIR;

Config load(const std::string& name) { return load_config(config_dir / name); }

Outcome constants()
{
    const int dims[] = {1, 2, 3, 6};
    const double printed[] = {0.847997, 0.736966, 0.652077, 0.485427};
    double worst = 0.0;
    for (int i = 0; i < 4; ++i) worst = std::max(worst, std::abs(alpha_md(2, dims[i]) - printed[i]));
    return {worst <= 1e-6, "max |alpha_md - printed| = " + fmt("%.2e", worst)};
}

Outcome maxwellian()
{
    const Config c = load("maxwellian_kac.ini");
    const Trajectory traj = run(c.run);
    const SpectralState& s0 = traj.snapshots.front();
    double drift = 0.0, mass = 0.0;
    for (const SpectralState& s : traj.snapshots) {
        drift = std::max(drift, (s.values - s0.values).cwiseAbs().maxCoeff());
        mass = std::max(mass, std::abs(s.mass() - s0.mass()));
    }
    return {drift <= 1e-5 && mass <= 1e-10, "node drift " + fmt("%.2e", drift) + ", mass drift " + fmt("%.2e", mass)};
}

Outcome conservation()
{
    const Config c = load("conservation_2d.ini");
    const Trajectory traj = run(c.run);
    const Monitor& m0 = traj.monitors.front();
    if (!m0.entropy) return {false, "no entropy at t = 0"};
    const double tol = 1e-3 * std::abs(*m0.entropy);
    double energy = 0.0;
    bool monotone = true;
    std::optional<double> prev;
    for (const Monitor& m : traj.monitors) {
        energy = std::max(energy, std::abs(m.energy - m0.energy) / std::abs(m0.energy));
        if (!m.entropy) return {false, "entropy unavailable at t = " + fmt("%g", m.t)};
        if (prev && *m.entropy > *prev + tol) monotone = false;
        if (*m.entropy > *m0.entropy + tol) monotone = false;
        prev = m.entropy;
    }
    return {energy <= 1e-4 && monotone, "energy drift " + fmt("%.2e", energy) + ", H " + fmt("%.4f", *m0.entropy) +
                                             " -> " + fmt("%.4f", *traj.monitors.back().entropy) +
                                             (monotone ? " nonincreasing" : " increases")};
}

Outcome fitter()
{
    GridSpec g;
    g.n = 4097;
    g.eta_max = 256.0;
    const SpectralState flat = make_state(g, 0.0, Eigen::VectorXcd::Ones(g.size()));
    bool ok = true;
    std::string detail;
    for (double nu : {0.25, 0.5, 0.75}) {
        const double t = 20.0 / std::pow(2.0 * std::numbers::pi * 128.0, 2.0 * nu);
        const GevreyFit f = fit_gevrey_order(fractional_heat_evolve(flat, nu, t), 2.0, 128.0);
        const double rel = std::abs(f.alpha_hat - nu) / nu;
        ok = ok && rel <= 0.01;
        detail += (detail.empty() ? "" : ", ") + fmt("nu %g", nu) + fmt(": %.5f", f.alpha_hat);
    }
    return {ok, detail};
}

Outcome smoothing()
{
    const Config c = load("smoothing_kac.ini");
    const Trajectory traj = run(c.run);
    auto at = [&](double t) -> const SpectralState& {
        for (const SpectralState& s : traj.snapshots)
            if (std::abs(s.t - t) < 1e-9) return s;
        throw std::runtime_error("missing snapshot");
    };
    const double late = fit_gevrey_order(at(0.5), 2.0, 8.0).alpha_hat;
    const double early = fit_gevrey_order(at(0.05), 2.0, 8.0).alpha_hat;
    return {late >= 0.375 && late <= 0.625 && late > early,
            "alpha_hat(0.5) = " + fmt("%.4f", late) + ", alpha_hat(0.05) = " + fmt("%.4f", early)};
}

std::string tally(const SuiteResult& r)
{
    std::string s = r.name + " " + std::to_string(r.checks - r.failures) + "/" + std::to_string(r.checks);
    if (!r.ok()) s += " [" + r.counterexample + "]";
    return s;
}

Outcome suites(const std::vector<std::string>& names, const std::vector<std::uint64_t>& seeds)
{
    bool ok = true;
    std::string detail;
    for (const std::string& name : names)
        for (std::uint64_t seed : seeds) {
            const SuiteResult r = run_suite(name, seed);
            ok = ok && r.ok();
            detail += (detail.empty() ? "" : ", ") + tally(r) + " seed " + std::to_string(seed);
        }
    return {ok, detail};
}

const Trajectory& reference()
{
    static const Trajectory traj = run(load("kac_reference.ini").run);
    return traj;
}

Outcome induction()
{
    const Config c = load("kac_reference.ini");
    const Trajectory& traj = reference();
    const ResolvedInduction r = resolve_induction(c, traj);
    const int top = max_scale_index(r.schedule.lambda0, r.schedule.factor, c.run.grid.eta_max / std::sqrt(2.0));
    const std::vector<HypRow> rows = check_hypotheses(traj, r.schedule);
    const fs::path out = fs::current_path() / "acceptance_out";
    fs::create_directories(out);
    std::ofstream csv(out / "induction.csv");
    write_induction_csv(csv, rows);
    std::set<int> scales;
    long failed = 0;
    for (const HypRow& row : rows) {
        scales.insert(row.N);
        if (!row.pass) ++failed;
    }
    const bool covered = r.schedule.n_max == top && scales.size() == static_cast<std::size_t>(top + 1);
    return {failed == 0 && covered && !rows.empty(),
            std::to_string(scales.size()) + " scales, " + std::to_string(rows.size() - failed) + "/" +
                std::to_string(rows.size()) + " rows pass, beta " + fmt("%.4g", r.schedule.beta) + ", M " +
                fmt("%.4g", r.schedule.M)};
}

Outcome multiplier_bound()
{
    bool ok = true;
    std::string detail;
    GridSpec g1;
    g1.n = 257;
    g1.eta_max = 16.0;
    GridSpec g2;
    g2.dimension = 2;
    g2.mode = GridMode::full2d;
    g2.n = 65;
    g2.eta_max = 8.0;
    GridSpec g3 = g1;
    g3.dimension = 3;
    g3.mode = GridMode::radial;
    g3.n = 129;
    g3.eta_max = 8.0;
    int checked = 0;
    double worst = 0.0;
    for (const GridSpec& g : {g1, g2, g3}) {
        const Freq shift = g.dimension == 2 ? Freq(0.5, -0.25, 0) : Freq(0.5, 0, 0);
        std::vector<InitialDatum> data{InitialDatum::gaussian(1.0), InitialDatum::laplace(0.5)};
        if (g.full()) {
            data.push_back(InitialDatum::gaussian(0.6, 2.0, shift));
            data.push_back(InitialDatum::mixture({{0.5, shift, 0.7}, {0.5, -shift, 0.7}}));
        }
        const double cdd = c_dgamma(g.dimension, g.dimension);
        for (const InitialDatum& d : data) {
            const double ratio = hinf_weighted_norm(init_state(d, g), 0.0) / (cdd * d.mass());
            worst = std::max(worst, ratio);
            ok = ok && ratio <= 1.0;
            ++checked;
        }
    }
    detail = std::to_string(checked) + " data, max ratio " + fmt("%.3f", worst);

    Config fine = load("kac_reference.ini");
    fine.run.grid.n = 768;
    const Trajectory other = run(fine.run);
    const Trajectory& base = reference();
    const double beta = 5.0;
    double gap = 0.0;
    int compared = 0;
    for (std::size_t i = 0; i < base.snapshots.size() && i < other.snapshots.size(); ++i) {
        const SpectralState& a = base.snapshots[i];
        if (a.t < 0.1 - 1e-9 || beta * a.t - 1.0 > 4.0) continue;
        const double ha = hinf_weighted_norm(a, beta), hb = hinf_weighted_norm(other.snapshots[i], beta);
        if (!std::isfinite(ha) || !std::isfinite(hb)) return {false, detail + "; nonfinite norm at t = " + fmt("%g", a.t)};
        gap = std::max(gap, std::abs(ha - hb) / std::max(ha, hb));
        ++compared;
    }
    ok = ok && compared > 0 && gap <= 0.05;
    return {ok, detail + "; " + std::to_string(compared) + " times, resolution gap " + fmt("%.2e", gap)};
}

struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> check;
};

} // namespace

int main(int argc, char** argv)
{
    const std::vector<Criterion> all = {
        {1, "constant reproduction", constants},
        {2, "Maxwellian fixed point", maxwellian},
        {3, "conservation and H-theorem", conservation},
        {4, "fitter calibration", fitter},
        {5, "Gevrey smoothing", smoothing},
        {6, "commutator sandwich", [] { return suites({"commutator"}, {1}); }},
        {7, "geometry suite", [] { return suites({"geometry"}, {1}); }},
        {8, "inequality suites", [] { return suites({"epsilon", "expdiff", "kl", "ddlemma"}, {1, 2, 3}); }},
        {9, "induction chain", induction},
        {10, "H^-d bound and weighted norm", multiplier_bound},
    };
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.insert(std::stoi(argv[i]));

    int failures = 0;
    for (const Criterion& c : all) {
        if (!wanted.empty() && !wanted.count(c.id)) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (!o.pass) ++failures;
        std::printf("%s %2d %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
