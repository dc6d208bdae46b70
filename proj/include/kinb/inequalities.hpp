#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace kinb {

// (1+u)^a - u^a, with the u -> infinity limit 0.
template <typename Scalar>
Scalar epsilon(Scalar alpha, Scalar u)
{
    using std::exp;
    using std::expm1;
    using std::log;
    using std::log1p;
    using std::pow;
    if (u == std::numeric_limits<Scalar>::infinity()) return Scalar(0);
    if (u <= Scalar(0)) return Scalar(1);
    if (u <= Scalar(1)) return pow(Scalar(1) + u, alpha) - pow(u, alpha);
    return pow(u, alpha) * expm1(alpha * log1p(Scalar(1) / u));
}

double alpha_md(int m, int n);
int required_moment(double nu, bool bounded);

struct InversePower {
    double gamma;
    double nu;
    bool maxwellian;
};
InversePower from_inverse_power(double s);

struct LambdaPoints {
    int m = 2;
    Eigen::VectorXd lambda;

    void validate() const;
};

double vandermonde_inverse_norm(const Eigen::VectorXd& lambda);
double kl_constant(const LambdaPoints& points);
LambdaPoints optimize_lambdas(int m, std::uint64_t seed = 20240611);

// Polynomials on [0,1] in the monomial basis, lowest degree first.
using Poly = Eigen::VectorXd;
double poly_eval(const Poly& p, double x);
Poly poly_derivative(const Poly& p, int k = 1);
double sup_norm01(const Poly& p);

struct KLResult {
    bool additive = false;
    bool multiplicative = false;
    double lhs = 0;
    double rhs_additive = 0;
    double rhs_multiplicative = 0;
    bool ok() const { return additive && multiplicative; }
};
KLResult kl_check(const Poly& w, int m, int k, double u, double cm);

// Real trigonometric polynomial sum_j a_j cos(k_j . x + phi_j) on R^n, n in {1,2}.
struct TrigPoly {
    int n = 1;
    std::vector<Eigen::Vector2d> k;
    std::vector<double> amp;
    std::vector<double> phase;

    double operator()(const Eigen::Vector2d& x) const;
    double sup_bound() const;
    double derivative_bound(int m) const;
};

struct PointwiseResult {
    bool ok = true;
    double constant = 0;
    double worst_ratio = 0;
    Eigen::Vector2d worst_x = Eigen::Vector2d::Zero();
};
double chain_constant(const TrigPoly& h, int m, double cm);
double cube_l2_squared(const TrigPoly& h, const Eigen::Vector2d& x, int nodes = 24);
PointwiseResult pointwise_from_l2_check(const TrigPoly& h, int m, double cm,
                                        const std::vector<Eigen::Vector2d>& points);

template <typename Scalar = long double>
struct ExpdiffSides {
    Scalar lhs;
    Scalar rhs;
    Scalar log_lhs;
    Scalar log_rhs;
    bool holds;
};

// Both sides of |G(s) - G(s+)| <= 2 a bt (1+s+)^a (1 - s+/s) G(s-)^eps G(s+),
// G(s) = exp(bt (1+s)^a), s = s- + s+; logs are relative to G(s+).
template <typename Scalar = long double>
ExpdiffSides<Scalar> expdiff_sides(Scalar s_minus, Scalar s_plus, Scalar alpha, Scalar bt)
{
    using std::exp;
    using std::expm1;
    using std::log;
    using std::log1p;
    using std::pow;
    const Scalar inf = std::numeric_limits<Scalar>::infinity();
    const Scalar s = s_minus + s_plus;
    const Scalar top = pow(Scalar(1) + s_plus, alpha);
    const Scalar gplus = bt * top;
    ExpdiffSides<Scalar> out{};
    if (s_minus == Scalar(0) || bt == Scalar(0)) {
        out.lhs = 0;
        out.log_lhs = -inf;
        out.rhs = 2 * alpha * bt * top * (s_minus / s) * exp(gplus);
        out.log_rhs = out.rhs > 0 ? log(out.rhs) - gplus : -inf;
        out.holds = true;
        return out;
    }
    const Scalar delta = top * expm1(alpha * log1p(s_minus / (Scalar(1) + s_plus)));
    const Scalar eps = epsilon<Scalar>(alpha, s_plus / s_minus);
    out.log_lhs = log(expm1(bt * delta));
    out.log_rhs = log(2 * alpha * bt * top * s_minus / s) + eps * bt * pow(Scalar(1) + s_minus, alpha);
    out.lhs = exp(out.log_lhs + gplus);
    out.rhs = exp(out.log_rhs + gplus);
    out.holds = out.log_lhs <= out.log_rhs;
    return out;
}

bool expdiff_check(double s_minus, double s_plus, double alpha, double bt);

} // namespace kinb
