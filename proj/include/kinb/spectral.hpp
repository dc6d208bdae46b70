#pragma once

#include "kinb/errors.hpp"

#include <Eigen/Dense>

#include <complex>
#include <limits>
#include <string>
#include <vector>

namespace kinb {

using cplx = std::complex<double>;
using Freq = Eigen::Vector3d;

enum class GridMode { full1d, full2d, radial };

constexpr int kMaxStencil = 20;

std::string to_string(GridMode mode);
GridMode parse_grid_mode(const std::string& text);

struct GridSpec {
    int dimension = 1;
    GridMode mode = GridMode::full1d;
    int n = 256;
    double eta_max = 16.0;
    int stencil = 16; // Lagrange points per axis, even, at most kMaxStencil

    void validate() const;
    double spacing() const { return eta_max / (n - 1); }
    // nodes per axis: 2n-1 on full grids, n radially
    int side() const { return mode == GridMode::radial ? n : 2 * n - 1; }
    Eigen::Index size() const;
    bool full() const { return mode != GridMode::radial; }

    bool operator==(const GridSpec&) const = default;
};

struct SpectralState {
    GridSpec grid;
    double t = 0.0;
    Eigen::VectorXcd values;
    double cutoff = std::numeric_limits<double>::infinity();

    Eigen::Index origin() const { return grid.full() ? (grid.size() - 1) / 2 : 0; }
    // index of -eta on full grids
    Eigen::Index mirror(Eigen::Index k) const { return grid.size() - 1 - k; }
    Freq node(Eigen::Index k) const;
    double radius(Eigen::Index k) const { return node(k).norm(); }
    double mass() const { return values[origin()].real(); }
    double limit() const { return std::min(grid.eta_max, cutoff); }
    // node value with the cutoff indicator applied
    cplx node_value(Eigen::Index k) const { return radius(k) <= cutoff ? values[k] : cplx(0.0); }
    // shell or cell measure attached to node k
    double cell(Eigen::Index k) const;
};

SpectralState make_state(const GridSpec& grid, double t, Eigen::VectorXcd values);
SpectralState restrict_to(const SpectralState& s, double lambda);
void enforce_hermitian(SpectralState& s);
double hermitian_defect(const SpectralState& s);
double sup_ratio(const SpectralState& s);
double tail_monitor(const SpectralState& s);

enum class DatumKind { gaussian, gaussian_mixture, laplace };

std::string to_string(DatumKind kind);
DatumKind parse_datum_kind(const std::string& text);

struct Component {
    double weight = 1.0;
    Freq center = Freq::Zero();
    double width = 1.0; // sigma for Gaussians, a for Laplace
};

struct InitialDatum {
    DatumKind kind = DatumKind::gaussian;
    std::vector<Component> components{Component{}};

    static InitialDatum gaussian(double sigma, double mass = 1.0, Freq center = Freq::Zero());
    static InitialDatum laplace(double a, double mass = 1.0, Freq center = Freq::Zero());
    static InitialDatum mixture(std::vector<Component> parts);

    void validate(int dimension) const;
    double mass() const;
    cplx transform(const Freq& eta, int dimension) const;
    double density(const Freq& v, int dimension) const;
    double second_moment(int dimension) const;
};

SpectralState init_state(const InitialDatum& datum, const GridSpec& grid);

// Local Lagrange interpolation; zero beyond the state's limit.
class Interpolator {
public:
    explicit Interpolator(const SpectralState& s);

    cplx operator()(const Freq& p) const;
    cplx at1(double x) const;
    cplx at2(double x, double y) const;
    cplx atr(double r) const;

private:
    const cplx* v_;
    GridMode mode_;
    int n_;
    int side_;
    int p_;
    double inv_h_;
    double limit_;
    double denom_[kMaxStencil];

    int weights(double u, double* w) const;
    cplx fetch(int j) const;
};

cplx interpolate(const SpectralState& s, const Freq& p);

// Moments m_0..m_order from the periodised density; m_0 is f(0).
// Odd orders on full-2d grids are vector norms; radial odd moments vanish.
Eigen::VectorXd moments(const SpectralState& s, int order);

struct PhysicalDensity {
    int dimension = 1;
    int side = 0;
    double dv = 0.0;
    Eigen::VectorXd samples; // row-major in (v_y, v_x) for d=2

    double velocity(int a) const { return (a - (side - 1) / 2) * dv; }
    double cell() const { return dimension == 1 ? dv : dv * dv; }
};

PhysicalDensity to_physical(const SpectralState& s);

} // namespace kinb
