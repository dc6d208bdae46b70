#include "kinb/collision.hpp"

#include "kinb/parallel.hpp"

#include <cmath>
#include <numbers>

namespace kinb {

using std::numbers::pi;

void CrossSection::validate() const
{
    if (dimension < 1 || dimension > 3) throw ConfigError("kernel dimension must be 1, 2 or 3");
    if (!(nu > 0.0 && nu < 1.0)) throw ConfigError("kernel nu must lie in (0,1)");
    if (!(kappa > 0.0) || !std::isfinite(kappa)) throw ConfigError("kernel kappa must be positive");
}

double CrossSection::theta_max() const
{
    return dimension == 1 ? pi / 4.0 : pi / 2.0;
}

double CrossSection::kernel(double theta) const
{
    return kappa * std::pow(std::abs(theta), -1.0 - 2.0 * nu);
}

double CrossSection::b(double theta) const
{
    if (dimension <= 2) return kernel(theta);
    return kernel(theta) / std::pow(std::sin(theta), dimension - 2);
}

double CrossSection::sphere_measure() const
{
    switch (dimension) {
    case 2: return 2.0;
    case 3: return 2.0 * pi;
    default: return 1.0;
    }
}

void AngularQuadrature::validate(const CrossSection& cs) const
{
    if (!(theta_min > 0.0) || !(theta_min < cs.theta_max())) throw ConfigError("quad theta_min must lie in (0, theta_max)");
    if (panels < 1) throw ConfigError("quad panels must be positive");
    if (nodes_per_panel < 1 || nodes_per_panel > 64) throw ConfigError("quad nodes_per_panel must lie in [1,64]");
    if (azimuthal_nodes < 1) throw ConfigError("quad azimuthal_nodes must be positive");
}

double AngularQuadrature::ratio(const CrossSection& cs) const
{
    return std::pow(theta_min / cs.theta_max(), 1.0 / panels);
}

double AngularRule::mass() const
{
    double s = 0.0;
    for (double w : weight) s += w;
    double a = 0.0;
    for (double w : azimuth_weight) a += w;
    return dimension == 1 ? s : s * a;
}

GaussRule graded_rule(double top, const AngularQuadrature& quad, double bottom)
{
    const double rho = std::pow(bottom / top, 1.0 / quad.panels);
    const GaussRule base = gauss_legendre(quad.nodes_per_panel);
    GaussRule out;
    double hi = top;
    for (int p = 0; p < quad.panels; ++p) {
        const double lo = p + 1 == quad.panels ? bottom : hi * rho;
        const double mid = 0.5 * (hi + lo), half = 0.5 * (hi - lo);
        for (std::size_t i = 0; i < base.x.size(); ++i) {
            out.x.push_back(mid + half * base.x[i]);
            out.w.push_back(half * base.w[i]);
        }
        hi = lo;
    }
    return out;
}

AngularRule build_rule(const CrossSection& cs, const AngularQuadrature& quad)
{
    cs.validate();
    quad.validate(cs);
    const GaussRule g = graded_rule(cs.theta_max(), quad, quad.theta_min);
    AngularRule r;
    r.dimension = cs.dimension;
    for (std::size_t i = 0; i < g.x.size(); ++i) {
        const double w = g.w[i] * cs.kernel(g.x[i]);
        r.theta.push_back(g.x[i]);
        r.weight.push_back(w);
        if (cs.dimension == 1) {
            r.theta.push_back(-g.x[i]);
            r.weight.push_back(w);
        }
    }
    if (cs.dimension == 2) {
        r.azimuth = {Freq(0, 1, 0), Freq(0, -1, 0)};
        r.azimuth_weight = {1.0, 1.0};
    } else if (cs.dimension == 3) {
        for (int j = 0; j < quad.azimuthal_nodes; ++j) {
            const double phi = 2.0 * pi * j / quad.azimuthal_nodes;
            r.azimuth.emplace_back(0.0, std::cos(phi), std::sin(phi));
            r.azimuth_weight.push_back(2.0 * pi / quad.azimuthal_nodes);
        }
    }
    for (double w : r.weight)
        if (!(w > 0.0) || !std::isfinite(w)) throw ConfigError("quadrature produced a non-positive weight");
    return r;
}

Geometry collision_geometry(const Freq& eta, double theta, const Freq& omega)
{
    const double r = eta.norm();
    if (!(r > 0.0)) throw std::invalid_argument("collision_geometry: eta must be nonzero");
    if (std::abs(omega.dot(eta)) > 1e-12 * std::max(1.0, r) || std::abs(omega.norm() - 1.0) > 1e-12)
        throw std::invalid_argument("collision_geometry: omega must be a unit vector orthogonal to eta");
    if (theta < 0.0 || theta > pi / 2.0 + 1e-15) throw std::invalid_argument("collision_geometry: theta outside [0, pi/2]");
    const Freq sigma = std::cos(theta) * eta / r + std::sin(theta) * omega;
    Geometry g;
    g.plus = 0.5 * (eta + r * sigma);
    g.minus = eta - g.plus;
    return g;
}

Geometry kac_geometry(double eta, double theta)
{
    return {Freq(eta * std::cos(theta), 0, 0), Freq(eta * std::sin(theta), 0, 0)};
}

Eigen::VectorXcd rhs_bilinear(const SpectralState& g, const SpectralState& f, const AngularRule& rule)
{
    if (g.grid != f.grid) throw std::invalid_argument("rhs: states live on different grids");
    if (rule.dimension != f.grid.dimension) throw std::invalid_argument("rhs: kernel dimension does not match grid");
    const Interpolator ig(g), jf(f);
    const cplx g0 = g.node_value(g.origin());
    const Eigen::Index size = f.grid.size();
    const Eigen::Index origin = f.origin();
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(size);
    const std::size_t q = rule.theta.size();

    // cos/sin tables shared by all nodes
    std::vector<double> c(q), s(q), ch(q), sh(q);
    for (std::size_t i = 0; i < q; ++i) {
        c[i] = std::cos(rule.theta[i]);
        s[i] = std::sin(rule.theta[i]);
        ch[i] = std::cos(0.5 * rule.theta[i]);
        sh[i] = std::sin(0.5 * rule.theta[i]);
    }

    switch (f.grid.mode) {
    case GridMode::full1d: {
        const Eigen::Index count = size - origin - 1;
        parallel_for(count, [&](std::ptrdiff_t idx) {
            const Eigen::Index k = origin + 1 + idx;
            const double eta = f.node(k)[0];
            const cplx loss = g0 * f.node_value(k);
            cplx acc = 0.0;
            for (std::size_t i = 0; i < q; ++i)
                acc += rule.weight[i] * (ig.at1(eta * s[i]) * jf.at1(eta * c[i]) - loss);
            out[k] = acc;
        });
        break;
    }
    case GridMode::full2d: {
        const Eigen::Index count = size - origin - 1;
        parallel_for(count, [&](std::ptrdiff_t idx) {
            const Eigen::Index k = origin + 1 + idx;
            const Freq eta = f.node(k);
            const double ex = eta[0], ey = eta[1];
            const cplx loss = g0 * f.node_value(k);
            cplx acc = 0.0;
            for (std::size_t i = 0; i < q; ++i) {
                // eta+ = ((1+cos) eta +/- sin * perp(eta)) / 2 with perp(eta) = (-ey, ex)
                const double ax = 0.5 * (1.0 + c[i]) * ex, ay = 0.5 * (1.0 + c[i]) * ey;
                const double bx = -0.5 * s[i] * ey, by = 0.5 * s[i] * ex;
                cplx term = 0.0;
                for (int sign = -1; sign <= 1; sign += 2) {
                    const double px = ax + sign * bx, py = ay + sign * by;
                    term += ig.at2(ex - px, ey - py) * jf.at2(px, py) - loss;
                }
                acc += rule.weight[i] * term;
            }
            out[k] = acc;
        });
        break;
    }
    case GridMode::radial: {
        double sphere = 0.0;
        for (double w : rule.azimuth_weight) sphere += w;
        parallel_for(size - 1, [&](std::ptrdiff_t idx) {
            const Eigen::Index k = 1 + idx;
            const double r = f.radius(k);
            const double loss = (g0 * f.node_value(k)).real();
            double acc = 0.0;
            for (std::size_t i = 0; i < q; ++i)
                acc += rule.weight[i] * (ig.atr(r * sh[i]).real() * jf.atr(r * ch[i]).real() - loss);
            out[k] = sphere * acc;
        });
        break;
    }
    }
    if (f.grid.full())
        for (Eigen::Index k = origin + 1; k < size; ++k) out[f.mirror(k)] = std::conj(out[k]);
    out[origin] = 0.0;
    if (!out.allFinite()) throw NumericalError("rhs: non-finite value");
    return out;
}

Eigen::VectorXcd rhs(const SpectralState& s, const AngularRule& rule)
{
    return rhs_bilinear(s, s, rule);
}

double loss_rate(const SpectralState& s, const AngularRule& rule)
{
    return s.mass() * rule.mass();
}

double truncation_error_formula(const CrossSection& cs, double c2, double theta_min)
{
    const double e = 2.0 - 2.0 * cs.nu;
    return cs.kappa * c2 * std::pow(theta_min, e) / e;
}

double truncation_error_bound_at(const SpectralState& s, const CrossSection& cs, double theta_min, Eigen::Index k)
{
    if (!(theta_min > 0.0 && theta_min <= pi / 4.0))
        throw std::invalid_argument("truncation_error_bound: theta_min must lie in (0, pi/4]");
    const double f0 = s.mass();
    const double m2 = std::max(0.0, moments(s, 2)[2]);
    const double r = s.radius(k);
    const double tp = 2.0 * pi;
    double c2 = tp * tp * m2 * f0 * r * r + tp * r * f0 * std::sqrt(f0 * m2);
    if (cs.dimension >= 2) c2 *= cs.sphere_measure() / 2.0;
    return truncation_error_formula(cs, c2, theta_min);
}

double truncation_error_bound(const SpectralState& s, const CrossSection& cs, double theta_min)
{
    Eigen::Index far = 0;
    for (Eigen::Index k = 0; k < s.values.size(); ++k)
        if (s.radius(k) > s.radius(far)) far = k;
    return truncation_error_bound_at(s, cs, theta_min, far);
}

Coercivity coercivity_probe(const SpectralState& g, const SpectralState& f, const CrossSection& cs,
                            const AngularRule& rule)
{
    if (cs.dimension != f.grid.dimension) throw std::invalid_argument("coercivity_probe: dimension mismatch");
    const Eigen::VectorXcd q = rhs_bilinear(g, f, rule);
    Coercivity c;
    for (Eigen::Index k = 0; k < q.size(); ++k) {
        const double cell = f.cell(k);
        const cplx fk = f.node_value(k);
        c.dissipation -= cell * (std::conj(fk) * q[k]).real();
        const double r2 = f.radius(k) * f.radius(k);
        c.l2_norm2 += cell * std::norm(fk);
        c.h_nu_norm2 += cell * std::pow(1.0 + r2, cs.nu) * std::norm(fk);
    }
    if (!std::isfinite(c.dissipation)) throw NumericalError("coercivity_probe: non-finite dissipation");
    return c;
}

} // namespace kinb
