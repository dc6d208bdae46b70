#include "kinb/evolution.hpp"

#include "kinb/gevrey.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace kinb {

void RunConfig::validate() const
{
    grid.validate();
    cs.validate();
    quad.validate(cs);
    datum.validate(grid.dimension);
    if (cs.dimension != grid.dimension) throw ConfigError("kernel dimension differs from grid dimension");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("time dt must be positive");
    if (!(t_end >= dt)) throw ConfigError("time t_end must be at least dt");
    const double ratio = t_end / dt;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio) throw ConfigError("time t_end must be a multiple of dt");
    if (snapshots.empty()) throw ConfigError("time snapshots must not be empty");
    for (std::size_t i = 0; i < snapshots.size(); ++i) {
        const double ts = snapshots[i];
        if (ts < 0.0 || ts > t_end * (1.0 + 1e-12)) throw ConfigError("time snapshots must lie in [0, t_end]");
        if (i > 0 && !(ts > snapshots[i - 1])) throw ConfigError("time snapshots must be strictly increasing");
        const double r = ts / dt;
        if (std::abs(r - std::round(r)) > 1e-9 * std::max(1.0, r))
            throw ConfigError("time snapshots must be multiples of dt");
    }
}

long RunConfig::steps() const
{
    return std::lround(t_end / dt);
}

std::vector<long> RunConfig::snapshot_steps() const
{
    std::vector<long> out;
    for (double ts : snapshots) out.push_back(std::lround(ts / dt));
    return out;
}

SpectralState step(const SpectralState& s, const AngularRule& rule, double dt)
{
    const double rate = loss_rate(s, rule);
    if (dt * rate > 0.5) {
        std::ostringstream msg;
        msg << "step: dt = " << dt << " exceeds the stability guard 0.5/lambda = " << 0.5 / rate;
        throw NumericalError(msg.str());
    }
    SpectralState tmp = s;
    const Eigen::VectorXcd k1 = rhs(s, rule);
    tmp.values = s.values + 0.5 * dt * k1;
    const Eigen::VectorXcd k2 = rhs(tmp, rule);
    tmp.values = s.values + 0.5 * dt * k2;
    const Eigen::VectorXcd k3 = rhs(tmp, rule);
    tmp.values = s.values + dt * k3;
    const Eigen::VectorXcd k4 = rhs(tmp, rule);
    SpectralState out = s;
    out.values = s.values + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    out.t = s.t + dt;
    enforce_hermitian(out);
    if (!out.values.allFinite()) throw NumericalError("step: non-finite values");
    if (sup_ratio(out) > 1.0 + 1e-9) {
        std::ostringstream msg;
        msg << "step: |f(eta)| exceeds f(0) at t = " << out.t << " (ratio " << sup_ratio(out) << ")";
        throw NumericalError(msg.str());
    }
    return out;
}

SpectralState step(const SpectralState& s, const CrossSection& cs, const AngularQuadrature& quad, double dt)
{
    return step(s, build_rule(cs, quad), dt);
}

Monitor monitor(const SpectralState& s)
{
    Monitor m;
    m.t = s.t;
    m.mass = s.mass();
    m.energy = moments(s, 2)[2];
    m.sup_ratio = sup_ratio(s);
    m.tail = tail_monitor(s);
    if (s.grid.full()) m.entropy = entropy_and_llogl(to_physical(s)).H;
    return m;
}

Trajectory run(const RunConfig& config, const SnapshotObserver& observer)
{
    config.validate();
    const AngularRule rule = build_rule(config.cs, config.quad);
    const std::vector<long> marks = config.snapshot_steps();
    Trajectory traj;
    SpectralState s = init_state(config.datum, config.grid);
    std::size_t next = 0;
    const long steps = config.steps();
    for (long k = 0;; ++k) {
        while (next < marks.size() && marks[next] == k) {
            const Monitor m = monitor(s);
            traj.snapshots.push_back(s);
            traj.monitors.push_back(m);
            if (observer) observer(s, m);
            ++next;
        }
        if (k == steps) break;
        s = step(s, rule, config.dt);
        s.t = double(k + 1) * config.dt;
    }
    return traj;
}

namespace {

template <typename F>
double integrate_kernel(const CrossSection& cs, double theta_min, F weight)
{
    AngularQuadrature fine;
    fine.theta_min = theta_min;
    fine.panels = 60;
    fine.nodes_per_panel = 20;
    const GaussRule g = graded_rule(cs.theta_max(), fine, theta_min);
    double acc = 0.0;
    for (std::size_t i = 0; i < g.x.size(); ++i) acc += g.w[i] * cs.kernel(g.x[i]) * weight(g.x[i]);
    return acc;
}

} // namespace

double kac_m4_coefficient(const CrossSection& cs, double theta_min)
{
    // both signs of theta: 2 * int b s^2 c^2
    return 2.0 * integrate_kernel(cs, theta_min, [](double th) {
        const double sc = std::sin(th) * std::cos(th);
        return sc * sc;
    });
}

double isotropic_m4_coefficient(const CrossSection& cs, double theta_min)
{
    return cs.sphere_measure() * integrate_kernel(cs, theta_min, [](double th) {
        const double s = std::sin(th);
        return 0.25 * s * s;
    });
}

MomentReport moment_oracle_check(const Trajectory& traj, const CrossSection& cs, const AngularQuadrature& quad)
{
    const std::size_t n = traj.snapshots.size();
    if (n < 3) throw std::invalid_argument("moment_oracle_check: need at least three snapshots");
    const GridSpec& grid = traj.snapshots.front().grid;
    std::vector<double> t(n);
    std::vector<Eigen::VectorXd> m(n);
    for (std::size_t i = 0; i < n; ++i) {
        t[i] = traj.snapshots[i].t;
        m[i] = moments(traj.snapshots[i], 4);
    }
    auto ddt = [&](std::size_t i, int order) {
        const double h0 = t[i] - t[i - 1], h1 = t[i + 1] - t[i];
        return h0 / (h1 * (h0 + h1)) * (m[i + 1][order] - m[i][order])
               + h1 / (h0 * (h0 + h1)) * (m[i][order] - m[i - 1][order]);
    };
    const bool kac = grid.mode == GridMode::full1d;
    const bool isotropic = grid.mode == GridMode::radial;
    const double coeff = kac ? kac_m4_coefficient(cs, quad.theta_min)
                             : (isotropic ? isotropic_m4_coefficient(cs, quad.theta_min) : 0.0);
    const double d = grid.dimension;
    MomentReport r;
    if (kac || isotropic) r.m4_deviation = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        r.dm0 = std::max(r.dm0, std::abs(ddt(i, 0)));
        r.m2_deviation = std::max(r.m2_deviation, std::abs(ddt(i, 2)) / m[i][2]);
        if (!r.m4_deviation) continue;
        const auto& mi = m[i];
        const double predicted = kac ? 2.0 * coeff * (3.0 * mi[2] * mi[2] - mi[0] * mi[4])
                                     : 2.0 * coeff * ((d + 2.0) * mi[2] * mi[2] / d - mi[0] * mi[4]);
        const double dev = std::abs(ddt(i, 4) - predicted) / std::abs(predicted);
        r.m4_deviation = std::max(*r.m4_deviation, dev);
    }
    return r;
}

} // namespace kinb
