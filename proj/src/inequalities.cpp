#include "kinb/inequalities.hpp"
#include "kinb/quadrature.hpp"

#include <algorithm>
#include <numbers>
#include <random>
#include <stdexcept>

namespace kinb {

double alpha_md(int m, int n)
{
    if (m < 1 || n < 1) throw std::invalid_argument("alpha_md: m and n must be positive");
    return std::log2(double(4 * m + n) / double(2 * m + n));
}

int required_moment(double nu, bool bounded)
{
    if (!(nu > 0.0 && nu < 1.0)) throw std::invalid_argument("required_moment: nu must lie in (0,1)");
    const double p = std::exp2(nu);
    double threshold = (p - 1.0) / (2.0 - p);
    if (bounded) threshold /= 2.0;
    // guard against representation error at exact integers
    const double c = std::ceil(threshold - 1e-12);
    return std::max(2, int(c));
}

InversePower from_inverse_power(double s)
{
    if (!(s > 2.0)) throw std::invalid_argument("from_inverse_power: s must exceed 2");
    if (std::isinf(s)) return {1.0, 0.0, false};
    const double gamma = (s - 5.0) / (s - 1.0);
    return {gamma, 1.0 / (s - 1.0), std::abs(gamma) < 1e-12};
}

void LambdaPoints::validate() const
{
    if (m < 2) throw std::invalid_argument("LambdaPoints: m must be at least 2");
    if (lambda.size() != m - 1) throw std::invalid_argument("LambdaPoints: need m-1 points");
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        if (!(lambda[i] > 0.0 && lambda[i] <= 1.0))
            throw std::invalid_argument("LambdaPoints: points must lie in (0,1]");
        if (i > 0 && !(lambda[i] > lambda[i - 1]))
            throw std::invalid_argument("LambdaPoints: duplicate or unsorted points");
    }
}

double vandermonde_inverse_norm(const Eigen::VectorXd& lambda)
{
    double best = 0.0;
    for (Eigen::Index b = 0; b < lambda.size(); ++b) {
        double term = 1.0 / lambda[b];
        for (Eigen::Index v = 0; v < lambda.size(); ++v) {
            if (v == b) continue;
            const double gap = std::abs(lambda[v] - lambda[b]);
            if (gap == 0.0) return std::numeric_limits<double>::infinity();
            term *= (1.0 + lambda[v]) / gap;
        }
        best = std::max(best, term);
    }
    return best;
}

static double kl_prefactor(int m)
{
    double f = std::exp2(m) * (m - 1);
    for (int i = 2; i <= m; ++i) f *= i;
    return f;
}

double kl_constant(const LambdaPoints& points)
{
    points.validate();
    return kl_prefactor(points.m) * vandermonde_inverse_norm(points.lambda);
}

LambdaPoints optimize_lambdas(int m, std::uint64_t seed)
{
    if (m < 2 || m > 8) throw std::invalid_argument("optimize_lambdas: m must lie in [2,8]");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const int dim = m - 1;
    Eigen::VectorXd best;
    double best_val = std::numeric_limits<double>::infinity();

    auto line_min = [&](Eigen::VectorXd& x, int i) {
        double fx = vandermonde_inverse_norm(x);
        double arg = x[i];
        const int scan = 64;
        for (int k = 1; k <= scan; ++k) {
            Eigen::VectorXd y = x;
            y[i] = double(k) / scan;
            const double fy = vandermonde_inverse_norm(y);
            if (fy < fx) { fx = fy; arg = y[i]; }
        }
        double lo = std::max(1e-6, arg - 1.0 / scan), hi = std::min(1.0, arg + 1.0 / scan);
        const double g = (std::sqrt(5.0) - 1.0) / 2.0;
        for (int it = 0; it < 80; ++it) {
            const double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
            Eigen::VectorXd ya = x, yb = x;
            ya[i] = a;
            yb[i] = b;
            if (vandermonde_inverse_norm(ya) < vandermonde_inverse_norm(yb)) hi = b; else lo = a;
        }
        Eigen::VectorXd y = x;
        y[i] = 0.5 * (lo + hi);
        const double fy = vandermonde_inverse_norm(y);
        if (fy < fx) { fx = fy; arg = y[i]; }
        x[i] = arg;
        return fx;
    };

    for (int start = 0; start < 16; ++start) {
        Eigen::VectorXd x(dim);
        for (int i = 0; i < dim; ++i) x[i] = unif(rng);
        double fx = vandermonde_inverse_norm(x);
        for (int sweep = 0; sweep < 200; ++sweep) {
            const double before = fx;
            for (int i = 0; i < dim; ++i) fx = line_min(x, i);
            if (before - fx <= 1e-13 * before) break;
        }
        if (fx < best_val) { best_val = fx; best = x; }
    }
    std::sort(best.data(), best.data() + best.size());
    return {m, best};
}

double poly_eval(const Poly& p, double x)
{
    double acc = 0.0;
    for (Eigen::Index i = p.size() - 1; i >= 0; --i) acc = acc * x + p[i];
    return acc;
}

Poly poly_derivative(const Poly& p, int k)
{
    Poly q = p;
    for (int r = 0; r < k; ++r) {
        if (q.size() <= 1) return Poly::Zero(1);
        Poly d(q.size() - 1);
        for (Eigen::Index i = 1; i < q.size(); ++i) d[i - 1] = double(i) * q[i];
        q = d;
    }
    return q;
}

double sup_norm01(const Poly& p)
{
    const int samples = 2048;
    const Poly dp = poly_derivative(p);
    double best = std::max(std::abs(poly_eval(p, 0.0)), std::abs(poly_eval(p, 1.0)));
    double xa = 0.0, da = poly_eval(dp, 0.0);
    for (int i = 1; i <= samples; ++i) {
        const double xb = double(i) / samples;
        const double db = poly_eval(dp, xb);
        best = std::max(best, std::abs(poly_eval(p, xb)));
        if ((da < 0.0) != (db < 0.0)) {
            double lo = xa, hi = xb, flo = da;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = poly_eval(dp, mid);
                if ((fm < 0.0) == (flo < 0.0)) { lo = mid; flo = fm; } else hi = mid;
            }
            best = std::max(best, std::abs(poly_eval(p, 0.5 * (lo + hi))));
        }
        xa = xb;
        da = db;
    }
    return best;
}

KLResult kl_check(const Poly& w, int m, int k, double u, double cm)
{
    if (w.size() == 0 || w.cwiseAbs().maxCoeff() == 0.0)
        throw std::invalid_argument("kl_check: degenerate zero polynomial");
    if (k < 1 || k > m - 1) throw std::invalid_argument("kl_check: need 1 <= k <= m-1");
    if (!(u > 0.0 && u <= 1.0)) throw std::invalid_argument("kl_check: u must lie in (0,1]");
    const double n0 = sup_norm01(w);
    const double nk = sup_norm01(poly_derivative(w, k));
    const double nm = sup_norm01(poly_derivative(w, m));
    KLResult r;
    r.lhs = nk;
    r.rhs_additive = cm * (n0 / std::pow(u, k) + std::pow(u, m - k) * nm);
    r.rhs_multiplicative = 2.0 * cm * std::pow(n0, 1.0 - double(k) / m)
                           * std::max(std::pow(n0, double(k) / m), std::pow(nm, double(k) / m));
    const double slack = 1e-10 * std::max(1.0, nk);
    r.additive = nk <= r.rhs_additive + slack;
    r.multiplicative = nk <= r.rhs_multiplicative + slack;
    return r;
}

double TrigPoly::operator()(const Eigen::Vector2d& x) const
{
    double acc = 0.0;
    for (std::size_t j = 0; j < amp.size(); ++j) {
        const double arg = n == 1 ? k[j][0] * x[0] : k[j].dot(x);
        acc += amp[j] * std::cos(arg + phase[j]);
    }
    return acc;
}

double TrigPoly::sup_bound() const
{
    double s = 0.0;
    for (double a : amp) s += std::abs(a);
    return s;
}

double TrigPoly::derivative_bound(int m) const
{
    double s = 0.0;
    for (std::size_t j = 0; j < amp.size(); ++j) {
        double kmax = n == 1 ? std::abs(k[j][0]) : k[j].cwiseAbs().maxCoeff();
        s += std::abs(amp[j]) * std::pow(kmax, m);
    }
    return s;
}

double chain_constant(const TrigPoly& h, int m, double cm)
{
    const double n0 = h.sup_bound();
    const double nm = h.derivative_bound(m);
    const double root0 = std::pow(n0, 1.0 / m), rootm = std::pow(nm, 1.0 / m);
    double total = 1.0;
    for (int i = 1; i <= h.n; ++i) {
        const double q = 2.0 + double(h.n - i + 1) / m;
        const double p = q + 1.0 - 1.0 / m;
        total *= 2.0 * p * cm * std::max(root0, rootm) + root0;
    }
    return total;
}

double cube_l2_squared(const TrigPoly& h, const Eigen::Vector2d& x, int nodes_per_axis)
{
    const GaussRule g = gauss_legendre(nodes_per_axis);
    const auto& nodes = g.x;
    const auto& weights = g.w;
    auto side = [](double c) { return c >= 0.0 ? c : c - 2.0; };
    const double a0 = side(x[0]), a1 = side(x[1]);
    double acc = 0.0;
    // each axis has length 2, so the affine Jacobian is 1 per axis
    if (h.n == 1) {
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const double v = h(Eigen::Vector2d(a0 + 1.0 + nodes[i], 0.0));
            acc += weights[i] * v * v;
        }
        return acc;
    }
    for (std::size_t i = 0; i < nodes.size(); ++i)
        for (std::size_t j = 0; j < nodes.size(); ++j) {
            const double v = h(Eigen::Vector2d(a0 + 1.0 + nodes[i], a1 + 1.0 + nodes[j]));
            acc += weights[i] * weights[j] * v * v;
        }
    return acc;
}

PointwiseResult pointwise_from_l2_check(const TrigPoly& h, int m, double cm,
                                        const std::vector<Eigen::Vector2d>& points)
{
    if (h.n != 1 && h.n != 2) throw std::invalid_argument("pointwise_from_l2_check: n must be 1 or 2");
    if (h.k.size() != h.amp.size() || h.amp.size() != h.phase.size())
        throw std::invalid_argument("pointwise_from_l2_check: not a trigonometric polynomial");
    for (const auto& a : h.amp)
        if (!std::isfinite(a)) throw std::invalid_argument("pointwise_from_l2_check: not band-limited");
    PointwiseResult r;
    r.constant = chain_constant(h, m, cm);
    const double power = double(2 * m + h.n) / m;
    for (const auto& x : points) {
        const double lhs = std::pow(std::abs(h(x)), power);
        const double rhs = r.constant * cube_l2_squared(h, x);
        const double ratio = rhs > 0.0 ? lhs / rhs : (lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
        if (ratio > r.worst_ratio) { r.worst_ratio = ratio; r.worst_x = x; }
        if (lhs > rhs * (1.0 + 1e-12)) r.ok = false;
    }
    return r;
}

bool expdiff_check(double s_minus, double s_plus, double alpha, double bt)
{
    if (!(s_plus > 0.0) || s_minus < 0.0 || s_minus > s_plus)
        throw std::invalid_argument("expdiff_check: need 0 <= s- <= s+ and s+ > 0");
    return expdiff_sides<long double>(s_minus, s_plus, alpha, bt).holds;
}

} // namespace kinb
