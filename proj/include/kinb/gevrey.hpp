#pragma once

#include "kinb/evolution.hpp"

#include <optional>

namespace kinb {

// G(t, eta) = exp(beta t <eta>^{2 alpha}), cut off at |eta| > lambda.
struct GevreyWeight {
    double alpha = 0.5;
    double beta = 0.0;
    double t = 0.0;
    double lambda = std::numeric_limits<double>::infinity();

    void validate() const;
    double log_g(double r) const { return beta * t * std::pow(1.0 + r * r, alpha); }
    double g(double r) const { return std::exp(log_g(r)); }
    double g_cut(double r) const { return r <= lambda ? g(r) : 0.0; }
};

double japanese(double r); // <eta> = sqrt(1 + r^2)

struct WeightedNorms {
    double l2 = 0.0;
    double sup = 0.0;
    double h_alpha = 0.0;
};
WeightedNorms weighted_norms(const SpectralState& s, const GevreyWeight& w);

SpectralState fractional_heat_evolve(const SpectralState& s0, double nu, double t);

struct GevreyFit {
    double alpha_hat = 0.0;
    double beta_hat = 0.0;
    double residual = 0.0;
    int points = 0;
};
// Regression of log(-log(|f|/f(0))) on log <eta> over [lo, hi].
GevreyFit fit_gevrey_order(const SpectralState& s, double lo, double hi);

struct CommutatorReport {
    double lhs = 0.0;
    double rhs_bound = 0.0;
    double I = 0.0;
    double I_plus = 0.0;
};
CommutatorReport commutation_error(const SpectralState& s, const GevreyWeight& w, const CrossSection& cs,
                                   const AngularQuadrature& quad);

// Kernel constants of the induction step, integrated over the full support.
double c_bd(const CrossSection& cs);
double c_bd2(const CrossSection& cs);
double c_theta0(const CrossSection& cs, double theta0);
double c_vartheta0(const CrossSection& cs, double vartheta0);

enum class Part { I = 1, II = 2, III = 3 };
std::string to_string(Part p);
Part parse_part(const std::string& text);

double default_lambda0(Part part, int d);
constexpr double kScaleFactor = 1.2071067811865475244; // (1 + sqrt 2) / 2

// Largest theta0 with eps(alpha, cot^2(theta0/2)) <= 2m/(2m+2), by bisection.
double theta0_bound(double alpha, int m);

struct InductionSchedule {
    Part part = Part::I;
    double lambda0 = 0.0;
    double factor = kScaleFactor;
    int n_max = 0;
    double M = 1.0;
    double B = std::numeric_limits<double>::infinity();
    double beta = 0.0;
    double alpha = 0.5;
    double T0 = 1.0;
    int m = 2;
    double theta0 = 0.0;
    double vartheta0 = 0.0;

    double scale(int n) const { return std::pow(factor, n) * lambda0; }
    void validate(int d) const;
};

// Largest N with Lambda_N <= limit, or -1 when even Lambda_0 is too large.
int max_scale_index(double lambda0, double factor, double limit);

struct BetaInputs {
    double M = 1.0;
    double T0 = 1.0;
    double alpha = 0.5;
    Part part = Part::I;
    double c_tilde = 1.0;
    double M2 = 1.0;       // part III only
    double theta0 = 0.0;    // part III only
    double vartheta0 = 0.0; // part III only
};
double beta_recommendation(const BetaInputs& in, const CrossSection& cs);

struct HypRow {
    int N = 0;
    double t = 0.0;
    double scale = 0.0;
    double hyp1 = 0.0;
    std::optional<double> hyp2;
    std::optional<double> hyp3;
    double empirical_M = 0.0;
    double weighted_l2 = 0.0;
    bool cap_ok = true;
    bool pass = true;
};

struct HypothesisOptions {
    int random_directions = 64;
    int lattice = 32;
    int azimuthal_nodes = 16;
    int theta_nodes = 32;
    std::uint64_t seed = 7;
};

double hyp1_value(const SpectralState& s, const GevreyWeight& w, double lambda);
double hyp2_value(const SpectralState& s, const GevreyWeight& w, double lambda, const HypothesisOptions& opt = {});
double hyp3_value(const SpectralState& s, const GevreyWeight& w, double lambda, int m, double theta0,
                  double vartheta0, const HypothesisOptions& opt = {});

std::vector<HypRow> check_hypotheses(const Trajectory& traj, const InductionSchedule& schedule,
                                     const HypothesisOptions& opt = {});

// sup_t <v>^m moment bound A_m from the snapshots
double moment_bound(const Trajectory& traj, int m);
// sup over snapshots with t <= T0 and |eta| <= lambda of G^{2m/(2m+d)} |f|
double empirical_k1(const Trajectory& traj, double alpha, double beta, double T0, int m, double lambda);

double hinf_weighted_norm(const SpectralState& s, double beta);
double c_dgamma(int d, double gamma); // (int <eta>^{-2 gamma})^{1/2}

struct EntropyReport {
    double H = 0.0;
    double llogl = 0.0;
    double mass = 0.0;
    double m2 = 0.0;
    double bound = 0.0;
    bool bound_ok = false;
};
double llogl_constant(int d);
EntropyReport entropy_and_llogl(const PhysicalDensity& rho);

} // namespace kinb
