#include "kinb/gevrey.hpp"

#include "kinb/inequalities.hpp"
#include "kinb/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

namespace kinb {

using std::numbers::pi;

void GevreyWeight::validate() const
{
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("weight alpha must lie in (0,1)");
    if (!(beta >= 0.0) || !std::isfinite(beta)) throw ConfigError("weight beta must be nonnegative");
    if (!(t >= 0.0)) throw ConfigError("weight time must be nonnegative");
    if (!(lambda > 0.0)) throw ConfigError("weight lambda must be positive");
}

double japanese(double r)
{
    return std::sqrt(1.0 + r * r);
}

WeightedNorms weighted_norms(const SpectralState& s, const GevreyWeight& w)
{
    w.validate();
    const double eps1 = epsilon(w.alpha, 1.0);
    WeightedNorms out;
    double l2 = 0.0, ha = 0.0;
    for (Eigen::Index k = 0; k < s.values.size(); ++k) {
        const double r = s.radius(k);
        if (r > w.lambda) continue;
        const double a = std::abs(s.node_value(k));
        const double lg = w.log_g(r);
        const double ga = std::exp(lg) * a;
        l2 += s.cell(k) * ga * ga;
        ha += s.cell(k) * ga * ga * std::pow(1.0 + r * r, w.alpha);
        out.sup = std::max(out.sup, std::exp(eps1 * lg) * a);
    }
    out.l2 = std::sqrt(l2);
    out.h_alpha = std::sqrt(ha);
    return out;
}

SpectralState fractional_heat_evolve(const SpectralState& s0, double nu, double t)
{
    if (!(t >= 0.0)) throw std::invalid_argument("fractional_heat_evolve: t must be nonnegative");
    if (!(nu > 0.0 && nu <= 1.0)) throw std::invalid_argument("fractional_heat_evolve: nu must lie in (0,1]");
    SpectralState s = s0;
    for (Eigen::Index k = 0; k < s.values.size(); ++k)
        s.values[k] *= std::exp(-t * std::pow(2.0 * pi * s.radius(k), 2.0 * nu));
    s.t = s0.t + t;
    return s;
}

GevreyFit fit_gevrey_order(const SpectralState& s, double lo, double hi)
{
    if (!(s.t > 0.0)) throw std::invalid_argument("fit_gevrey_order: state time must be positive");
    if (!(lo < hi)) throw std::invalid_argument("empty fit window");
    const double f0 = s.mass();
    // radius bins: one per node on full-1d and radial grids, averaged shells on full-2d
    std::map<long, std::pair<double, double>> bins; // key -> (sum r, sum |f|)
    std::map<long, int> counts;
    const double h = s.grid.spacing();
    for (Eigen::Index k = 0; k < s.values.size(); ++k) {
        const Freq eta = s.node(k);
        if (s.grid.mode == GridMode::full1d && eta[0] <= 0.0) continue;
        const double r = eta.norm();
        if (r < lo || r > hi) continue;
        const long key = std::lround(r / h);
        bins[key].first += r;
        bins[key].second += std::abs(s.node_value(k));
        counts[key] += 1;
    }
    if (bins.size() < 2) throw std::invalid_argument("empty fit window");
    std::vector<double> x, y;
    for (const auto& [key, acc] : bins) {
        const double c = counts[key];
        const double r = acc.first / c, a = acc.second / c;
        if (!(a > 1e-12)) throw std::invalid_argument("fit window values below noise floor 1e-12");
        const double ratio = a / f0;
        if (!(ratio < 1.0)) throw std::invalid_argument("fit window values are not decaying");
        x.push_back(std::log(japanese(r)));
        y.push_back(std::log(-std::log(ratio)));
    }
    const Eigen::Index n = Eigen::Index(x.size());
    Eigen::MatrixXd A(n, 2);
    Eigen::VectorXd b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        A(i, 0) = 1.0;
        A(i, 1) = x[i];
        b[i] = y[i];
    }
    const Eigen::Vector2d coef = A.colPivHouseholderQr().solve(b);
    GevreyFit fit;
    fit.alpha_hat = 0.5 * coef[1];
    fit.beta_hat = std::exp(coef[0]) / s.t;
    fit.residual = std::sqrt((A * coef - b).squaredNorm() / double(n));
    fit.points = int(n);
    return fit;
}

namespace {

// Nodes inside radius lambda, with their cell measures.
std::vector<Eigen::Index> nodes_within(const SpectralState& s, double lambda)
{
    std::vector<Eigen::Index> out;
    for (Eigen::Index k = 0; k < s.values.size(); ++k)
        if (s.radius(k) <= lambda) out.push_back(k);
    return out;
}

// Azimuthal directions orthogonal to eta with their weights.
void azimuth_for(const Freq& eta, int d, int nodes, std::vector<Freq>& dirs, std::vector<double>& wts)
{
    dirs.clear();
    wts.clear();
    const double r = eta.norm();
    if (d == 2) {
        Freq perp = r > 0.0 ? Freq(-eta[1] / r, eta[0] / r, 0.0) : Freq(0.0, 1.0, 0.0);
        dirs = {perp, -perp};
        wts = {1.0, 1.0};
        return;
    }
    // d = 3: orthonormal frame around eta
    Freq e = r > 0.0 ? Freq(eta / r) : Freq(1.0, 0.0, 0.0);
    Freq a = std::abs(e[0]) < 0.9 ? Freq(1.0, 0.0, 0.0) : Freq(0.0, 1.0, 0.0);
    Freq u = (a - a.dot(e) * e).normalized();
    Freq v = e.cross(u);
    for (int j = 0; j < nodes; ++j) {
        const double phi = 2.0 * pi * j / nodes;
        dirs.push_back(std::cos(phi) * u + std::sin(phi) * v);
        wts.push_back(2.0 * pi / nodes);
    }
}

struct CommutatorTerms {
    cplx lhs = 0.0;
    double rhs_bound = 0.0;
    double I = 0.0;
};

} // namespace

CommutatorReport commutation_error(const SpectralState& s, const GevreyWeight& w, const CrossSection& cs,
                                   const AngularQuadrature& quad)
{
    w.validate();
    if (cs.dimension != s.grid.dimension) throw std::invalid_argument("commutation_error: dimension mismatch");
    const double lambda = std::min(w.lambda, s.limit());
    if (lambda > s.grid.eta_max / std::sqrt(2.0) * (1.0 + 1e-12))
        throw std::invalid_argument("commutation_error: lambda must not exceed eta_max/sqrt(2)");
    const AngularRule rule = build_rule(cs, quad);
    const Interpolator f(s);
    const int d = s.grid.dimension;
    const double a = w.alpha, bt = w.beta * w.t;
    const double sphere = cs.sphere_measure();
    const std::vector<Eigen::Index> inner = nodes_within(s, lambda);
    const double cut = lambda / std::sqrt(2.0);

    std::vector<CommutatorTerms> parts(inner.size());
    parallel_for(std::ptrdiff_t(inner.size()), [&](std::ptrdiff_t idx) {
        const Eigen::Index k = inner[idx];
        const Freq eta = s.node(k);
        const double r = eta.norm();
        if (r == 0.0) return;
        const cplx fe = s.node_value(k);
        const double lg = w.log_g(r);
        const double ge = std::exp(lg);
        const double jap2a = std::pow(1.0 + r * r, a);
        CommutatorTerms t;
        for (std::size_t i = 0; i < rule.theta.size(); ++i) {
            const double th = rule.theta[i];
            const double wi = rule.weight[i];
            // (eta+, eta-) pairs and multiplicities for this angle
            std::vector<std::pair<Freq, Freq>> pairs;
            double mult = 1.0;
            double ratio_pm; // |eta+|^2 / |eta-|^2
            double eps_I;
            double shrink;   // 1 - |eta+|^2/|eta|^2
            double i_factor; // sin^2 of the polar angle
            if (d == 1) {
                pairs.push_back({Freq(r * std::cos(th), 0, 0) * (eta[0] > 0 ? 1.0 : -1.0),
                                 Freq(r * std::sin(th), 0, 0) * (eta[0] > 0 ? 1.0 : -1.0)});
                const double cot = std::cos(th) / std::sin(th);
                ratio_pm = cot * cot;
                eps_I = epsilon(a, ratio_pm);
                shrink = std::sin(th) * std::sin(th);
                i_factor = shrink;
            } else {
                const double cth = std::cos(0.5 * th), sth = std::sin(0.5 * th);
                ratio_pm = (cth * cth) / (sth * sth);
                eps_I = epsilon(a, ratio_pm);
                shrink = sth * sth;
                i_factor = std::sin(th) * std::sin(th);
                if (s.grid.mode == GridMode::radial) {
                    pairs.push_back({Freq(r * cth * cth, r * sth * cth, 0), Freq(r * sth * sth, -r * sth * cth, 0)});
                    mult = sphere;
                } else {
                    const Freq perp(-eta[1] / r, eta[0] / r, 0.0);
                    for (int sign = -1; sign <= 1; sign += 2) {
                        const Geometry g = collision_geometry(eta, th, sign * perp);
                        pairs.push_back({g.plus, g.minus});
                    }
                }
            }
            const double eps_pm = epsilon(a, ratio_pm);
            for (const auto& [ep, em] : pairs) {
                const double rp = ep.norm(), rm = em.norm();
                const cplx fp = f(ep), fm = f(em);
                const double lgp = w.log_g(rp), lgm = w.log_g(rm);
                // G(eta+) - G(eta) = G(eta) expm1(log G(eta+) - log G(eta))
                const cplx diff = ge * std::expm1(lgp - lg);
                t.lhs += mult * wi * fm * fp * diff * std::conj(ge * fe);
                t.rhs_bound += mult * wi * shrink * std::exp(eps_pm * lgm + lgp + lg) * std::abs(fm) * std::abs(fp)
                               * std::abs(fe) * std::pow(1.0 + rp * rp, a);
                if (rm <= cut)
                    t.I += mult * wi * i_factor * std::exp(eps_I * lgm) * std::abs(fm) * ge * ge * std::norm(fe) * jap2a;
            }
        }
        t.lhs *= s.cell(k);
        t.rhs_bound *= s.cell(k);
        t.I *= s.cell(k);
        parts[idx] = t;
    });

    CommutatorReport rep;
    cplx lhs = 0.0;
    for (const auto& p : parts) {
        lhs += p.lhs;
        rep.rhs_bound += p.rhs_bound;
        rep.I += p.I;
    }
    rep.lhs = std::abs(lhs);
    rep.rhs_bound *= 2.0 * a * bt;
    rep.I *= a * bt;

    // I+ : integrate over eta+ nodes
    std::vector<double> plus_parts(inner.size(), 0.0);
    if (d == 1) {
        parallel_for(std::ptrdiff_t(inner.size()), [&](std::ptrdiff_t idx) {
            const Eigen::Index k = inner[idx];
            const double ep = s.node(k)[0];
            const double rp = std::abs(ep);
            const double gp2 = std::exp(2.0 * w.log_g(rp)) * std::norm(s.node_value(k));
            double acc = 0.0;
            for (std::size_t i = 0; i < rule.theta.size(); ++i) {
                const double th = rule.theta[i];
                const double em = ep * std::tan(th);
                if (std::abs(em) > cut) continue;
                const double cot = 1.0 / std::tan(th);
                const double sn = std::sin(th);
                acc += rule.weight[i] * sn * sn * std::exp(epsilon(a, cot * cot) * w.log_g(std::abs(em)))
                       * std::abs(f.at1(em));
            }
            plus_parts[idx] = s.cell(k) * gp2 * std::pow(1.0 + rp * rp, a) * acc;
        });
        for (double p : plus_parts) rep.I_plus += p;
        rep.I_plus *= std::sqrt(2.0) * a * bt;
        return rep;
    }
    const GaussRule vr = graded_rule(pi / 4.0, quad, 0.5 * quad.theta_min);
    parallel_for(std::ptrdiff_t(inner.size()), [&](std::ptrdiff_t idx) {
        const Eigen::Index k = inner[idx];
        const Freq ep = s.node(k);
        const double rp = ep.norm();
        const double gp2 = std::exp(2.0 * w.log_g(rp)) * std::norm(s.node_value(k));
        if (gp2 == 0.0 || rp == 0.0) return;
        std::vector<Freq> dirs;
        std::vector<double> wts;
        azimuth_for(ep, d, quad.azimuthal_nodes, dirs, wts);
        if (s.grid.mode == GridMode::radial) {
            dirs = {dirs.front()};
            wts = {sphere};
        }
        double acc = 0.0;
        for (std::size_t j = 0; j < vr.x.size(); ++j) {
            const double vt = vr.x[j];
            const double tn = std::tan(vt);
            if (rp * tn > cut) continue;
            const double sn = std::sin(vt);
            const double kern = std::pow(sn, d) * cs.b(2.0 * vt);
            const double e = epsilon(a, 1.0 / (tn * tn));
            for (std::size_t o = 0; o < dirs.size(); ++o) {
                const Freq em = -rp * tn * dirs[o];
                acc += vr.w[j] * wts[o] * kern * std::exp(e * w.log_g(em.norm())) * std::abs(f(em));
            }
        }
        plus_parts[idx] = s.cell(k) * gp2 * std::pow(1.0 + rp * rp, a) * acc;
    });
    for (double p : plus_parts) rep.I_plus += p;
    rep.I_plus *= std::exp2(d) * a * bt;
    return rep;
}

namespace {

// int_lo^hi g(theta) dtheta for integrands with a theta^{1-2nu} endpoint at 0.
template <typename F>
double kernel_integral(const CrossSection& cs, double lo, double hi, F g)
{
    AngularQuadrature q;
    q.panels = 80;
    q.nodes_per_panel = 16;
    const double bottom = lo > 0.0 ? lo : 1e-14 * hi;
    const GaussRule r = graded_rule(hi, q, bottom);
    double acc = 0.0;
    for (std::size_t i = 0; i < r.x.size(); ++i) acc += r.w[i] * g(r.x[i]);
    if (lo == 0.0) acc += cs.kappa * std::pow(bottom, 2.0 - 2.0 * cs.nu) / (2.0 - 2.0 * cs.nu);
    return acc;
}

} // namespace

double c_bd2(const CrossSection& cs)
{
    cs.validate();
    const double hi = cs.theta_max();
    const double one_side = kernel_integral(cs, 0.0, hi, [&](double th) {
        const double s = std::sin(th);
        return s * s * cs.kernel(th);
    });
    return cs.dimension == 1 ? 2.0 * one_side : one_side;
}

double c_bd(const CrossSection& cs)
{
    return cs.dimension >= 3 ? cs.sphere_measure() * c_bd2(cs) : c_bd2(cs);
}

double c_theta0(const CrossSection& cs, double theta0)
{
    return cs.b(theta0);
}

double c_vartheta0(const CrossSection& cs, double vartheta0)
{
    return cs.b(2.0 * vartheta0);
}

std::string to_string(Part p)
{
    switch (p) {
    case Part::I: return "I";
    case Part::II: return "II";
    case Part::III: return "III";
    }
    return "?";
}

Part parse_part(const std::string& text)
{
    if (text == "I" || text == "1") return Part::I;
    if (text == "II" || text == "2") return Part::II;
    if (text == "III" || text == "3") return Part::III;
    throw ConfigError("unknown induction part '" + text + "'");
}

double default_lambda0(Part part, int d)
{
    const double gap = std::sqrt(2.0) - 1.0;
    switch (part) {
    case Part::I: return 4.0 * std::sqrt(double(d)) / gap;
    case Part::II: return 4.0 * std::sqrt(2.0) / gap;
    case Part::III: return 3.0;
    }
    return 0.0;
}

double theta0_bound(double alpha, int m)
{
    const double target = 2.0 * m / (2.0 * m + 2.0);
    auto eps_at = [&](double th) {
        const double c = 1.0 / std::tan(0.5 * th);
        return epsilon(alpha, c * c);
    };
    if (eps_at(pi / 2.0) <= target) return pi / 2.0;
    double lo = 0.0, hi = pi / 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (eps_at(mid) <= target) lo = mid; else hi = mid;
    }
    return lo;
}

void InductionSchedule::validate(int d) const
{
    if (!(lambda0 > 0.0)) throw ConfigError("induction lambda0 must be positive");
    if (!(factor > 1.0)) throw ConfigError("induction factor must exceed 1");
    if (n_max < 0) throw ConfigError("induction n_max must be nonnegative");
    if (!(M >= 0.0)) throw ConfigError("induction M must be nonnegative");
    if (!(B > 0.0)) throw ConfigError("induction B must be positive");
    if (!(beta >= 0.0)) throw ConfigError("induction beta must be nonnegative");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("induction alpha must lie in (0,1)");
    if (!(T0 > 0.0)) throw ConfigError("induction T0 must be positive");
    if (m < 2) throw ConfigError("induction m must be at least 2");
    if (part != Part::I && d < 2) throw ConfigError("induction parts II and III need dimension at least 2");
    if (part == Part::III) {
        const double bound = theta0_bound(alpha, m);
        if (!(theta0 > 0.0 && theta0 < pi / 4.0)) throw ConfigError("induction theta0 must lie in (0, pi/4)");
        if (!(vartheta0 > 0.0 && vartheta0 < pi / 4.0)) throw ConfigError("induction vartheta0 must lie in (0, pi/4)");
        if (theta0 > bound) {
            std::ostringstream msg;
            msg << "induction theta0 = " << theta0 << " violates eps(alpha, cot^2(theta0/2)) <= 2m/(2m+2); "
                << "bisection gives the largest admissible theta0 = " << bound;
            throw ConfigError(msg.str());
        }
    }
}

int max_scale_index(double lambda0, double factor, double limit)
{
    int n = -1;
    while (std::pow(factor, n + 1) * lambda0 <= limit * (1.0 + 1e-12)) ++n;
    return n;
}

double beta_recommendation(const BetaInputs& in, const CrossSection& cs)
{
    if (!(in.M >= 0.0) || !(in.T0 > 0.0) || !(in.alpha > 0.0)) throw std::invalid_argument("beta_recommendation: bad inputs");
    const double d = cs.dimension;
    const double spread = 1.0 + std::exp2(d - 1.0);
    switch (in.part) {
    case Part::I: return in.c_tilde / (spread * c_bd(cs) * in.alpha * in.T0 * in.M + 1.0);
    case Part::II:
        return std::min(in.c_tilde / (spread * c_bd2(cs) * in.alpha * in.T0 * in.M + 1.0), 1.0 / in.T0);
    case Part::III: {
        const double ct = c_theta0(cs, in.theta0), cv = c_vartheta0(cs, in.vartheta0);
        const double denom = in.alpha * in.T0 * (spread * c_bd2(cs) * in.M2 + (ct + std::exp2(d) * cv) * in.M) + 1.0;
        return std::min(in.c_tilde / denom, 1.0 / in.T0);
    }
    }
    return 0.0;
}

double hyp1_value(const SpectralState& s, const GevreyWeight& w, double lambda)
{
    GevreyWeight cut = w;
    cut.lambda = lambda;
    return weighted_norms(s, cut).sup;
}

double hyp2_value(const SpectralState& s, const GevreyWeight& w, double lambda, const HypothesisOptions& opt)
{
    const int d = s.grid.dimension;
    if (d < 2) throw std::invalid_argument("hyp2: needs dimension at least 2");
    const Interpolator f(s);
    const double eps1 = epsilon(w.alpha, 1.0);
    std::vector<Freq> zetas;
    if (s.grid.mode == GridMode::radial) {
        zetas.push_back(Freq(1, 0, 0));
    } else {
        zetas = {Freq(1, 0, 0), Freq(-1, 0, 0), Freq(0, 1, 0), Freq(0, -1, 0)};
        std::mt19937_64 rng(opt.seed);
        std::uniform_real_distribution<double> ang(0.0, 2.0 * pi);
        for (int i = 0; i < opt.random_directions; ++i) {
            const double p = ang(rng);
            zetas.emplace_back(std::cos(p), std::sin(p), 0.0);
        }
    }
    double best = 0.0;
    std::vector<Freq> dirs;
    std::vector<double> wts;
    const int L = opt.lattice;
    for (const Freq& z : zetas) {
        azimuth_for(z, d, opt.azimuthal_nodes, dirs, wts);
        for (int i = 0; i < L; ++i) {
            const double R = lambda * i / (L - 1);
            for (int j = 0; j < L; ++j) {
                const double phi = pi / 4.0 + (pi / 4.0) * j / (L - 1);
                const double zc = R * std::cos(phi), rho = R * std::sin(phi);
                double acc = 0.0;
                for (std::size_t o = 0; o < dirs.size(); ++o) {
                    const Freq p = zc * z - rho * dirs[o];
                    acc += wts[o] * std::exp(eps1 * w.log_g(p.norm())) * std::abs(f(p));
                }
                best = std::max(best, acc);
            }
        }
    }
    return best;
}

double hyp3_value(const SpectralState& s, const GevreyWeight& w, double lambda, int m, double theta0,
                  double vartheta0, const HypothesisOptions& opt)
{
    const int d = s.grid.dimension;
    if (d < 2) throw std::invalid_argument("hyp3: needs dimension at least 2");
    if (std::sqrt(2.0) * lambda > s.grid.eta_max * (1.0 + 1e-12))
        throw std::invalid_argument("hyp3: sqrt(2) lambda exceeds eta_max");
    const Interpolator f(s);
    const double expo = 2.0 * m / (2.0 * m + 1.0);
    const GaussRule tr = gauss_legendre(opt.theta_nodes, theta0, pi / 2.0);
    const GaussRule vr = gauss_legendre(opt.theta_nodes, vartheta0, pi / 4.0);
    const std::vector<Eigen::Index> nodes = nodes_within(s, std::sqrt(2.0) * lambda);
    std::vector<double> vals(nodes.size(), 0.0);
    parallel_for(std::ptrdiff_t(nodes.size()), [&](std::ptrdiff_t idx) {
        const Freq eta = s.node(nodes[idx]);
        const double r = eta.norm();
        if (r == 0.0) return;
        std::vector<Freq> dirs;
        std::vector<double> wts;
        azimuth_for(eta, d, opt.azimuthal_nodes, dirs, wts);
        auto term = [&](const Freq& em) {
            const double rm = em.norm();
            if (rm > lambda) return 0.0;
            return std::exp(expo * w.log_g(rm)) * std::abs(f(em));
        };
        double first = 0.0, second = 0.0;
        for (std::size_t i = 0; i < tr.x.size(); ++i) {
            const double th = tr.x[i];
            const double sh = std::sin(0.5 * th), ch = std::cos(0.5 * th);
            for (std::size_t o = 0; o < dirs.size(); ++o) {
                const Freq em = r * sh * sh * eta / r - r * sh * ch * dirs[o];
                first += tr.w[i] * wts[o] * term(em);
            }
        }
        for (std::size_t i = 0; i < vr.x.size(); ++i) {
            const double tn = std::tan(vr.x[i]);
            for (std::size_t o = 0; o < dirs.size(); ++o) second += vr.w[i] * wts[o] * term(-r * tn * dirs[o]);
        }
        vals[idx] = std::max(first, second);
    });
    return vals.empty() ? 0.0 : *std::max_element(vals.begin(), vals.end());
}

std::vector<HypRow> check_hypotheses(const Trajectory& traj, const InductionSchedule& sched,
                                     const HypothesisOptions& opt)
{
    if (traj.snapshots.empty()) throw std::invalid_argument("check_hypotheses: empty trajectory");
    const GridSpec& grid = traj.snapshots.front().grid;
    sched.validate(grid.dimension);
    const double limit = grid.eta_max / std::sqrt(2.0);
    if (sched.scale(sched.n_max) > limit * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "schedule exceeds grid: Lambda_" << sched.n_max << " = " << sched.scale(sched.n_max)
            << " > eta_max/sqrt(2) = " << limit << "; raise eta_max or lower n_max";
        throw ConfigError(msg.str());
    }
    std::vector<HypRow> rows;
    for (int N = 0; N <= sched.n_max; ++N) {
        const double scale = sched.scale(N);
        for (const auto& s : traj.snapshots) {
            if (s.t > sched.T0 * (1.0 + 1e-12)) continue;
            GevreyWeight w{sched.alpha, sched.beta, s.t, std::numeric_limits<double>::infinity()};
            HypRow row;
            row.N = N;
            row.t = s.t;
            row.scale = scale;
            row.hyp1 = hyp1_value(s, w, scale);
            double value = row.hyp1;
            if (sched.part == Part::II) {
                row.hyp2 = hyp2_value(s, w, scale, opt);
                value = *row.hyp2;
            } else if (sched.part == Part::III) {
                row.hyp3 = hyp3_value(s, w, scale, sched.m, sched.theta0, sched.vartheta0, opt);
                value = *row.hyp3;
            }
            row.empirical_M = value;
            GevreyWeight cap = w;
            cap.lambda = std::sqrt(2.0) * scale;
            row.weighted_l2 = weighted_norms(s, cap).l2;
            row.cap_ok = row.weighted_l2 <= sched.B;
            row.pass = value <= sched.M && row.cap_ok;
            rows.push_back(row);
        }
    }
    return rows;
}

double moment_bound(const Trajectory& traj, int m)
{
    double best = 0.0;
    for (const auto& s : traj.snapshots) {
        double value;
        if (m == 2 || m == 4) {
            const Eigen::VectorXd mo = moments(s, 4);
            value = m == 2 ? mo[0] + mo[2] : mo[0] + 2.0 * mo[2] + mo[4];
        } else if (s.grid.full()) {
            const PhysicalDensity rho = to_physical(s);
            value = 0.0;
            const int N = rho.side;
            for (Eigen::Index k = 0; k < rho.samples.size(); ++k) {
                const double vx = rho.velocity(int(k % N));
                const double vy = rho.dimension == 2 ? rho.velocity(int(k / N)) : 0.0;
                value += rho.cell() * std::pow(1.0 + vx * vx + vy * vy, 0.5 * m) * std::max(0.0, rho.samples[k]);
            }
        } else {
            throw std::invalid_argument("moment_bound: odd moment orders need a full grid");
        }
        best = std::max(best, value);
    }
    return best;
}

double empirical_k1(const Trajectory& traj, double alpha, double beta, double T0, int m, double lambda)
{
    double best = 0.0;
    for (const auto& s : traj.snapshots) {
        if (s.t > T0 * (1.0 + 1e-12)) continue;
        const double expo = 2.0 * m / (2.0 * m + s.grid.dimension);
        GevreyWeight w{alpha, beta, s.t, lambda};
        for (Eigen::Index k = 0; k < s.values.size(); ++k) {
            const double r = s.radius(k);
            if (r > lambda) continue;
            best = std::max(best, std::exp(expo * w.log_g(r)) * std::abs(s.node_value(k)));
        }
    }
    return best;
}

double hinf_weighted_norm(const SpectralState& s, double beta)
{
    if (!(s.t >= 0.0)) throw std::invalid_argument("hinf_weighted_norm: negative time");
    const double p = beta * s.t - s.grid.dimension;
    double acc = 0.0;
    for (Eigen::Index k = 0; k < s.values.size(); ++k) {
        const double r = s.radius(k);
        acc += s.cell(k) * std::pow(1.0 + r * r, p) * std::norm(s.node_value(k));
    }
    return std::sqrt(acc);
}

static double sphere_area(int d)
{
    switch (d) {
    case 1: return 2.0;
    case 2: return 2.0 * pi;
    case 3: return 4.0 * pi;
    default: return 2.0 * std::pow(pi, 0.5 * d) / std::tgamma(0.5 * d);
    }
}

double c_dgamma(int d, double gamma)
{
    if (!(2.0 * gamma > d)) throw std::invalid_argument("c_dgamma: need 2 gamma > d");
    // r = tan(phi): integrand |S^{d-1}| sin^{d-1} cos^{2 gamma - d - 1} on [0, pi/2]
    const GaussRule g = gauss_legendre(200, 0.0, pi / 2.0);
    double acc = 0.0;
    for (std::size_t i = 0; i < g.x.size(); ++i)
        acc += g.w[i] * std::pow(std::sin(g.x[i]), d - 1) * std::pow(std::cos(g.x[i]), 2.0 * gamma - d - 1.0);
    return std::sqrt(sphere_area(d) * acc);
}

double llogl_constant(int d)
{
    const double delta = 1.0 / (d + 2.0);
    const double c = c_dgamma(d, (1.0 - delta) / delta);
    return std::pow(c * c, delta) / (std::numbers::e * delta);
}

EntropyReport entropy_and_llogl(const PhysicalDensity& rho)
{
    EntropyReport r;
    const int N = rho.side;
    const double cell = rho.cell();
    for (Eigen::Index k = 0; k < rho.samples.size(); ++k) {
        double f = rho.samples[k];
        if (f < -1e-8) throw NumericalError("entropy_and_llogl: negative density sample");
        f = std::max(f, 0.0);
        const double vx = rho.velocity(int(k % N));
        const double vy = rho.dimension == 2 ? rho.velocity(int(k / N)) : 0.0;
        if (f > 0.0) r.H += cell * f * std::log(f);
        r.llogl += cell * f * std::log1p(f);
        r.mass += cell * f;
        r.m2 += cell * (vx * vx + vy * vy) * f;
    }
    const double delta = 1.0 / (rho.dimension + 2.0);
    r.bound = std::log(2.0) * r.mass + r.H + llogl_constant(rho.dimension) * std::pow(r.mass + r.m2, 1.0 - delta);
    r.bound_ok = r.llogl <= r.bound;
    return r;
}

} // namespace kinb
