#pragma once

#include "kinb/quadrature.hpp"
#include "kinb/spectral.hpp"

#include <utility>

namespace kinb {

// Power-law angular kernel. For d >= 2, sin^{d-2}(theta) b(cos theta) = kappa theta^{-1-2nu}
// on (0, pi/2]; for d = 1, b1(theta) = kappa |theta|^{-1-2nu} on [-pi/4, pi/4].
struct CrossSection {
    int dimension = 1;
    double nu = 0.25;
    double kappa = 1.0;

    void validate() const;
    double theta_max() const;
    double kernel(double theta) const;
    double b(double theta) const;
    // measure of the azimuthal sphere S^{d-2}: two points for d = 2, 2 pi for d = 3
    double sphere_measure() const;

    bool operator==(const CrossSection&) const = default;
};

struct AngularQuadrature {
    double theta_min = 1e-3;
    int panels = 24;
    int nodes_per_panel = 8;
    int azimuthal_nodes = 16;

    void validate(const CrossSection& cs) const;
    double ratio(const CrossSection& cs) const;

    bool operator==(const AngularQuadrature&) const = default;
};

// Polar nodes with weights that already include the kernel. For d = 1 both signs of theta
// are present; for d >= 2 the azimuthal measure is applied separately.
struct AngularRule {
    int dimension = 1;
    std::vector<double> theta;
    std::vector<double> weight;
    std::vector<Freq> azimuth; // unit vectors on S^{d-2} orthogonal to e1 (d = 3)
    std::vector<double> azimuth_weight;

    double mass() const; // kernel mass including the azimuthal measure
};

// Graded Gauss-Legendre panels on [theta_min, top] with plain dtheta weights.
GaussRule graded_rule(double top, const AngularQuadrature& quad, double bottom);

AngularRule build_rule(const CrossSection& cs, const AngularQuadrature& quad);

struct Geometry {
    Freq plus;
    Freq minus;
};

// eta+ = (eta + |eta| sigma)/2 with sigma = cos(theta) eta/|eta| + sin(theta) omega.
Geometry collision_geometry(const Freq& eta, double theta, const Freq& omega);
Geometry kac_geometry(double eta, double theta);

// Q(g,f)^(eta) at every node; the bracket g(eta-) f(eta+) - g(0) f(eta) is never split.
Eigen::VectorXcd rhs_bilinear(const SpectralState& g, const SpectralState& f, const AngularRule& rule);
Eigen::VectorXcd rhs(const SpectralState& s, const AngularRule& rule);

// Loss rate f(0) times the kernel mass; bounds the stable explicit step.
double loss_rate(const SpectralState& s, const AngularRule& rule);

// Bound on the omitted |theta| < theta_min contribution at node k.
double truncation_error_bound_at(const SpectralState& s, const CrossSection& cs, double theta_min, Eigen::Index k);
// Same bound at the outermost node, or for a given curvature constant.
double truncation_error_bound(const SpectralState& s, const CrossSection& cs, double theta_min);
double truncation_error_formula(const CrossSection& cs, double c2, double theta_min);

struct Coercivity {
    double dissipation = 0.0;
    double h_nu_norm2 = 0.0;
    double l2_norm2 = 0.0;
};
Coercivity coercivity_probe(const SpectralState& g, const SpectralState& f, const CrossSection& cs,
                            const AngularRule& rule);

} // namespace kinb
