#include "kinb/suites.hpp"

#include "kinb/gevrey.hpp"
#include "kinb/inequalities.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

namespace kinb {

namespace {

using Rng = std::mt19937_64;
constexpr double pi = std::numbers::pi;

double uniform(Rng& rng, double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double log_uniform(Rng& rng, double lo, double hi)
{
    return std::exp(uniform(rng, std::log(lo), std::log(hi)));
}

int pick(Rng& rng, int lo, int hi)
{
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

class Tally {
public:
    explicit Tally(SuiteResult& r) : r_(r) {}

    void check(bool ok, const std::function<std::string()>& describe)
    {
        ++r_.checks;
        if (ok) return;
        if (r_.failures++ == 0) r_.counterexample = describe();
    }

private:
    SuiteResult& r_;
};

std::string fmt(std::initializer_list<std::pair<const char*, double>> fields)
{
    std::ostringstream out;
    out.precision(17);
    bool first = true;
    for (const auto& [k, v] : fields) {
        out << (first ? "" : " ") << k << '=' << v;
        first = false;
    }
    return out.str();
}

void epsilon_suite(Rng& rng, Tally& tally)
{
    using ld = long double;
    for (int i = 0; i < 10000; ++i) {
        const double a = uniform(rng, 0.01, 0.99);
        const double u1 = log_uniform(rng, 1e-6, 1e6);
        const double u2 = u1 * log_uniform(rng, 1.01, 1e3);
        const ld e1 = epsilon<ld>(a, u1), e2 = epsilon<ld>(a, u2);
        tally.check(e2 < e1, [&] { return "decrease in u: " + fmt({{"alpha", a}, {"u1", u1}, {"u2", u2}}); });
        tally.check(e1 <= std::pow(ld(u1), ld(a) - 1) * (1 + 1e-15L),
                    [&] { return "eps <= u^(alpha-1): " + fmt({{"alpha", a}, {"u", u1}}); });

        const double a1 = uniform(rng, 0.0, 0.99);
        const double a2 = uniform(rng, a1 + 0.01, 1.0);
        const double u = log_uniform(rng, 1e-6, 1e6);
        tally.check(epsilon<ld>(a1, u) < epsilon<ld>(a2, u),
                    [&] { return "increase in alpha: " + fmt({{"alpha1", a1}, {"alpha2", a2}, {"u", u}}); });

        const double sm = log_uniform(rng, 1e-4, 1e4), sp = log_uniform(rng, 1e-4, 1e4);
        const ld lhs = std::pow(1 + ld(sm) + ld(sp), ld(a));
        const ld rhs = epsilon<ld>(a, ld(sp) / ld(sm)) * std::pow(1 + ld(sm), ld(a)) + std::pow(1 + ld(sp), ld(a));
        tally.check(lhs <= rhs * (1 + 1e-15L),
                    [&] { return "subadditivity: " + fmt({{"alpha", a}, {"s-", sm}, {"s+", sp}}); });
    }
    for (int m = 1; m <= 16; ++m)
        for (int n = 1; n <= 8; ++n) {
            const double e = epsilon(alpha_md(m, n), 1.0);
            const double target = 2.0 * m / (2.0 * m + n);
            tally.check(std::abs(e - target) <= 1e-12,
                        [&] { return "eps(alpha_md, 1): " + fmt({{"m", double(m)}, {"n", double(n)}, {"eps", e}}); });
        }
}

void kl_suite(Rng& rng, Tally& tally, double cm_scale)
{
    std::map<int, double> cm;
    for (int m = 2; m <= 6; ++m) cm[m] = kl_constant(optimize_lambdas(m)) * cm_scale;
    std::normal_distribution<double> normal;
    for (int i = 0; i < 1000; ++i) {
        const int degree = pick(rng, 0, 6);
        Poly w(degree + 1);
        for (int j = 0; j <= degree; ++j) w[j] = normal(rng);
        const int m = pick(rng, 2, 6);
        const int k = pick(rng, 1, m - 1);
        const double u = uniform(rng, 1e-3, 1.0);
        const KLResult r = kl_check(w, m, k, u, cm[m]);
        tally.check(r.ok(), [&] {
            std::ostringstream out;
            out.precision(17);
            out << "w = [";
            for (int j = 0; j <= degree; ++j) out << (j ? ", " : "") << w[j];
            out << "] m=" << m << " k=" << k << " u=" << u << " C_m=" << cm[m] << " lhs=" << r.lhs
                << " additive_rhs=" << r.rhs_additive << " multiplicative_rhs=" << r.rhs_multiplicative;
            return out.str();
        });
    }
}

TrigPoly random_trig(Rng& rng, int n)
{
    std::normal_distribution<double> normal;
    TrigPoly h;
    h.n = n;
    const int terms = pick(rng, 1, 4);
    for (int j = 0; j < terms; ++j) {
        Eigen::Vector2d k(pick(rng, -3, 3), n == 2 ? pick(rng, -3, 3) : 0);
        h.k.push_back(k);
        h.amp.push_back(normal(rng));
        h.phase.push_back(uniform(rng, 0.0, 2.0 * pi));
    }
    return h;
}

void ddlemma_suite(Rng& rng, Tally& tally)
{
    std::map<int, double> cm;
    for (int m = 2; m <= 3; ++m) cm[m] = kl_constant(optimize_lambdas(m));
    for (int n = 1; n <= 2; ++n)
        for (int f = 0; f < 50; ++f) {
            const TrigPoly h = random_trig(rng, n);
            const int m = pick(rng, 2, 3);
            std::vector<Eigen::Vector2d> pts(1000);
            for (auto& x : pts) x = Eigen::Vector2d(uniform(rng, -5, 5), n == 2 ? uniform(rng, -5, 5) : 0.0);
            const PointwiseResult r = pointwise_from_l2_check(h, m, cm[m], pts);
            tally.check(r.ok, [&] {
                std::ostringstream out;
                out.precision(17);
                out << "n=" << n << " m=" << m << " x=(" << r.worst_x[0] << ", " << r.worst_x[1]
                    << ") ratio=" << r.worst_ratio << " terms:";
                for (std::size_t j = 0; j < h.amp.size(); ++j)
                    out << " [k=(" << h.k[j][0] << "," << h.k[j][1] << ") a=" << h.amp[j] << " phi=" << h.phase[j]
                        << "]";
                return out.str();
            });
        }
}

void expdiff_suite(Rng& rng, Tally& tally)
{
    for (int i = 0; i < 10000; ++i) {
        double sm = log_uniform(rng, 1e-4, 1e4), sp = log_uniform(rng, 1e-4, 1e4);
        if (sm > sp) std::swap(sm, sp);
        const double a = uniform(rng, 0.01, 0.99);
        const double bt = uniform(rng, 0.0, 2.0);
        tally.check(expdiff_check(sm, sp, a, bt),
                    [&] { return fmt({{"s-", sm}, {"s+", sp}, {"alpha", a}, {"beta_t", bt}}); });
    }
}

InitialDatum random_mixture(Rng& rng, double min_width)
{
    std::vector<Component> parts;
    const int count = pick(rng, 2, 3);
    for (int j = 0; j < count; ++j) {
        Component c;
        c.weight = uniform(rng, 0.2, 1.0);
        c.center = Freq(uniform(rng, -1.5, 1.5), 0, 0);
        c.width = uniform(rng, min_width, 1.0);
        parts.push_back(c);
    }
    return InitialDatum::mixture(parts);
}

void commutator_suite(Rng& rng, Tally& tally)
{
    GridSpec grid;
    grid.n = 257;
    grid.eta_max = 16.0;
    const AngularQuadrature quad;
    for (int i = 0; i < 20; ++i) {
        const SpectralState s = init_state(random_mixture(rng, 0.4), grid);
        CrossSection cs;
        cs.nu = pick(rng, 0, 1) ? 0.5 : 0.25;
        GevreyWeight w;
        w.alpha = uniform(rng, 0.1, cs.nu);
        w.beta = 1.0;
        w.t = uniform(rng, 1e-3, 0.1);
        w.lambda = uniform(rng, 4.0, grid.eta_max / std::sqrt(2.0));
        const CommutatorReport r = commutation_error(s, w, cs, quad);
        auto describe = [&] {
            return fmt({{"nu", cs.nu}, {"alpha", w.alpha}, {"beta_t", w.t}, {"lambda", w.lambda}, {"lhs", r.lhs},
                        {"rhs_bound", r.rhs_bound}, {"I", r.I}, {"I_plus", r.I_plus}});
        };
        tally.check(r.lhs <= r.rhs_bound, describe);
        tally.check(r.lhs <= r.I + r.I_plus, describe);
        tally.check(r.rhs_bound <= r.I + r.I_plus, describe);

        GevreyWeight w1 = w, w2 = w;
        w1.t = 1e-4;
        w2.t = 2e-4;
        const double l1 = commutation_error(s, w1, cs, quad).lhs;
        const double l2 = commutation_error(s, w2, cs, quad).lhs;
        tally.check(std::abs(l2 / l1 - 2.0) <= 0.05 * 2.0,
                    [&] { return "linear onset: " + fmt({{"lhs(1e-4)", l1}, {"lhs(2e-4)", l2}, {"alpha", w.alpha}}); });
    }
}

void geometry_suite(Rng& rng, Tally& tally)
{
    std::normal_distribution<double> normal;
    for (int d = 2; d <= 3; ++d)
        for (int i = 0; i < 1000; ++i) {
            Freq eta(normal(rng), normal(rng), d == 3 ? normal(rng) : 0.0);
            eta *= log_uniform(rng, 0.1, 50.0) / eta.norm();
            const double r = eta.norm();
            const double th = uniform(rng, 1e-3, pi / 2.0);
            Freq omega(normal(rng), normal(rng), d == 3 ? normal(rng) : 0.0);
            for (int pass = 0; pass < 2; ++pass) {
                omega -= omega.dot(eta) / (r * r) * eta;
                omega.normalize();
            }
            const Geometry g = collision_geometry(eta, th, omega);
            auto describe = [&](const char* what) {
                return std::string(what) + ": " + fmt({{"d", double(d)}, {"eta_x", eta[0]}, {"eta_y", eta[1]},
                                                       {"eta_z", eta[2]}, {"theta", th}});
            };
            tally.check(std::abs(g.minus.norm() - r * std::sin(0.5 * th)) <= 1e-6 * r,
                        [&] { return describe("|eta-| = |eta| sin(theta/2)"); });
            tally.check(std::abs(g.plus.squaredNorm() + g.minus.squaredNorm() - r * r) <= 1e-6 * r * r,
                        [&] { return describe("pythagoras"); });

            // Jacobian of eta -> eta+ with sigma held fixed
            const Freq sigma = std::cos(th) * eta / r + std::sin(th) * omega;
            auto plus_at = [&](const Freq& e) {
                const double re = e.norm();
                const double c = sigma.dot(e) / re;
                Freq om = sigma;
                for (int pass = 0; pass < 2; ++pass) {
                    om -= om.dot(e) / (re * re) * e;
                    om.normalize();
                }
                return collision_geometry(e, std::acos(std::clamp(c, -1.0, 1.0)), om).plus;
            };
            Eigen::Matrix3d jac = Eigen::Matrix3d::Identity();
            const double h = 1e-5 * r;
            for (int c = 0; c < d; ++c) {
                Freq e1 = eta, e2 = eta;
                e1[c] += h;
                e2[c] -= h;
                jac.col(c) = (plus_at(e1) - plus_at(e2)) / (2.0 * h);
                if (d == 2) jac(2, c) = 0.0;
            }
            if (d == 2) jac(2, 2) = 1.0;
            const double det = jac.determinant();
            const double expected = std::pow(2.0, -d) * (1.0 + std::cos(th));
            tally.check(std::abs(det - expected) <= 1e-6, [&] {
                return describe("jacobian") + " " + fmt({{"det", det}, {"expected", expected}});
            });
        }
    for (int i = 0; i < 1000; ++i) {
        const double eta = uniform(rng, -50.0, 50.0);
        const double th = uniform(rng, -pi / 4.0, pi / 4.0);
        const Geometry g = kac_geometry(eta, th);
        const double r = std::abs(eta);
        tally.check(std::abs(g.minus.norm() - r * std::abs(std::sin(th))) <= 1e-6 * std::max(r, 1.0),
                    [&] { return "kac |eta-|: " + fmt({{"eta", eta}, {"theta", th}}); });
        tally.check(std::abs(g.plus.squaredNorm() + g.minus.squaredNorm() - r * r) <= 1e-6 * std::max(r * r, 1.0),
                    [&] { return "kac pythagoras: " + fmt({{"eta", eta}, {"theta", th}}); });
    }
}

void conservation_suite(Rng& rng, Tally& tally)
{
    for (int i = 0; i < 3; ++i) {
        RunConfig c;
        c.grid.n = 384;
        c.grid.eta_max = 8.0;
        c.grid.stencil = 12;
        c.quad.theta_min = 1e-2;
        c.datum = random_mixture(rng, 0.6);
        c.cs.nu = pick(rng, 0, 1) ? 0.5 : 0.25;
        c.dt = 1e-3;
        c.t_end = 0.05;
        c.snapshots = {0.0, 0.025, 0.05};
        const Trajectory traj = run(c);
        const Monitor& a = traj.monitors.front();
        const Monitor& b = traj.monitors.back();
        auto describe = [&](const char* what) {
            std::ostringstream out;
            out.precision(17);
            out << what << ": nu=" << c.cs.nu << " components:";
            for (const auto& p : c.datum.components)
                out << " [w=" << p.weight << " c=" << p.center[0] << " sigma=" << p.width << "]";
            out << " mass " << a.mass << " -> " << b.mass << ", energy " << a.energy << " -> " << b.energy;
            return out.str();
        };
        tally.check(std::abs(b.mass - a.mass) <= 1e-12 * a.mass, [&] { return describe("mass"); });
        tally.check(std::abs(b.energy - a.energy) <= 1e-6 * a.energy, [&] { return describe("energy"); });
        for (const auto& m : traj.monitors)
            tally.check(m.sup_ratio <= 1.0 + 1e-9, [&] { return describe("sup ratio"); });
        for (std::size_t k = 1; k < traj.monitors.size(); ++k)
            tally.check(*traj.monitors[k].entropy <= *traj.monitors[k - 1].entropy + 1e-3 * std::abs(*a.entropy),
                        [&] { return describe("entropy"); });
    }
}

} // namespace

const std::vector<std::string>& suite_names()
{
    static const std::vector<std::string> names = {"epsilon",   "kl",       "ddlemma",     "expdiff",
                                                   "commutator", "geometry", "conservation"};
    return names;
}

SuiteResult run_suite(const std::string& name, std::uint64_t seed, const SuiteOptions& options)
{
    SuiteResult r;
    r.name = name;
    Tally tally(r);
    Rng rng(seed);
    if (name == "epsilon") epsilon_suite(rng, tally);
    else if (name == "kl") kl_suite(rng, tally, options.cm_scale);
    else if (name == "ddlemma") ddlemma_suite(rng, tally);
    else if (name == "expdiff") expdiff_suite(rng, tally);
    else if (name == "commutator") commutator_suite(rng, tally);
    else if (name == "geometry") geometry_suite(rng, tally);
    else if (name == "conservation") conservation_suite(rng, tally);
    else throw ConfigError("unknown suite '" + name + "'");
    return r;
}

} // namespace kinb
