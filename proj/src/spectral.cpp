#include "kinb/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace kinb {

using std::numbers::pi;

std::string to_string(GridMode mode)
{
    switch (mode) {
    case GridMode::full1d: return "full-1d";
    case GridMode::full2d: return "full-2d";
    case GridMode::radial: return "radial";
    }
    return "?";
}

GridMode parse_grid_mode(const std::string& text)
{
    if (text == "full-1d") return GridMode::full1d;
    if (text == "full-2d") return GridMode::full2d;
    if (text == "radial") return GridMode::radial;
    throw ConfigError("unknown grid mode '" + text + "'");
}

void GridSpec::validate() const
{
    if (dimension < 1 || dimension > 3) throw ConfigError("grid dimension must be 1, 2 or 3");
    if (mode == GridMode::full1d && dimension != 1) throw ConfigError("full-1d requires dimension 1");
    if (mode == GridMode::full2d && dimension != 2) throw ConfigError("full-2d requires dimension 2");
    if (mode == GridMode::radial && dimension == 1) throw ConfigError("radial mode requires dimension 2 or 3");
    if (n < 16) throw ConfigError("grid n must be at least 16");
    if (!(eta_max > 0.0) || !std::isfinite(eta_max)) throw ConfigError("grid eta_max must be positive");
    if (stencil < 4 || stencil > kMaxStencil || stencil % 2)
        throw ConfigError("grid stencil must be even and in [4," + std::to_string(kMaxStencil) + "]");
}

Eigen::Index GridSpec::size() const
{
    const Eigen::Index s = side();
    return mode == GridMode::full2d ? s * s : s;
}

Freq SpectralState::node(Eigen::Index k) const
{
    const double h = grid.spacing();
    const int n = grid.n;
    switch (grid.mode) {
    case GridMode::full1d: return Freq((k - (n - 1)) * h, 0.0, 0.0);
    case GridMode::full2d: {
        const Eigen::Index s = grid.side();
        return Freq((k % s - (n - 1)) * h, (k / s - (n - 1)) * h, 0.0);
    }
    case GridMode::radial: return Freq(k * h, 0.0, 0.0);
    }
    return Freq::Zero();
}

double SpectralState::cell(Eigen::Index k) const
{
    const double h = grid.spacing();
    switch (grid.mode) {
    case GridMode::full1d: return h;
    case GridMode::full2d: return h * h;
    case GridMode::radial: break;
    }
    const double r = k * h;
    const double lo = k == 0 ? 0.0 : r - 0.5 * h;
    const double hi = k == grid.n - 1 ? r : r + 0.5 * h;
    if (grid.dimension == 2) return pi * (hi * hi - lo * lo);
    return 4.0 * pi / 3.0 * (hi * hi * hi - lo * lo * lo);
}

SpectralState make_state(const GridSpec& grid, double t, Eigen::VectorXcd values)
{
    grid.validate();
    if (values.size() != grid.size()) throw std::invalid_argument("make_state: value count does not match grid");
    SpectralState s;
    s.grid = grid;
    s.t = t;
    s.values = std::move(values);
    return s;
}

SpectralState restrict_to(const SpectralState& s, double lambda)
{
    if (!(lambda > 0.0)) throw std::invalid_argument("restrict_to: cutoff must be positive");
    SpectralState r = s;
    r.cutoff = std::min(s.cutoff, lambda);
    return r;
}

void enforce_hermitian(SpectralState& s)
{
    if (!s.grid.full()) {
        s.values = s.values.real().cast<cplx>();
        return;
    }
    const Eigen::Index n = s.values.size();
    for (Eigen::Index k = 0; k < n / 2; ++k) {
        const cplx avg = 0.5 * (s.values[k] + std::conj(s.values[n - 1 - k]));
        s.values[k] = avg;
        s.values[n - 1 - k] = std::conj(avg);
    }
    s.values[s.origin()] = s.values[s.origin()].real();
}

double hermitian_defect(const SpectralState& s)
{
    if (!s.grid.full()) return s.values.imag().cwiseAbs().maxCoeff();
    double worst = 0.0;
    const Eigen::Index n = s.values.size();
    for (Eigen::Index k = 0; k < n; ++k)
        worst = std::max(worst, std::abs(s.values[k] - std::conj(s.values[n - 1 - k])));
    return worst;
}

double sup_ratio(const SpectralState& s)
{
    return s.values.cwiseAbs().maxCoeff() / s.mass();
}

double tail_monitor(const SpectralState& s)
{
    double worst = 0.0;
    for (Eigen::Index k = 0; k < s.values.size(); ++k)
        if (s.radius(k) >= 0.9 * s.grid.eta_max) worst = std::max(worst, std::abs(s.values[k]));
    return worst;
}

std::string to_string(DatumKind kind)
{
    switch (kind) {
    case DatumKind::gaussian: return "gaussian";
    case DatumKind::gaussian_mixture: return "gaussian-mixture";
    case DatumKind::laplace: return "laplace";
    }
    return "?";
}

DatumKind parse_datum_kind(const std::string& text)
{
    if (text == "gaussian") return DatumKind::gaussian;
    if (text == "gaussian-mixture") return DatumKind::gaussian_mixture;
    if (text == "laplace") return DatumKind::laplace;
    throw ConfigError("unknown initial datum kind '" + text + "'");
}

InitialDatum InitialDatum::gaussian(double sigma, double mass, Freq center)
{
    return {DatumKind::gaussian, {Component{mass, center, sigma}}};
}

InitialDatum InitialDatum::laplace(double a, double mass, Freq center)
{
    return {DatumKind::laplace, {Component{mass, center, a}}};
}

InitialDatum InitialDatum::mixture(std::vector<Component> parts)
{
    return {DatumKind::gaussian_mixture, std::move(parts)};
}

void InitialDatum::validate(int dimension) const
{
    if (components.empty()) throw ConfigError("initial datum needs at least one component");
    if (kind != DatumKind::gaussian_mixture && components.size() != 1)
        throw ConfigError("gaussian and laplace data take exactly one component");
    for (const auto& c : components) {
        if (!(c.weight > 0.0) || !std::isfinite(c.weight)) throw ConfigError("component weights must be positive");
        if (!(c.width > 0.0) || !std::isfinite(c.width)) throw ConfigError("component widths must be positive");
        for (int i = dimension; i < 3; ++i)
            if (c.center[i] != 0.0) throw ConfigError("component center has more coordinates than the dimension");
    }
}

double InitialDatum::mass() const
{
    double m = 0.0;
    for (const auto& c : components) m += c.weight;
    return m;
}

cplx InitialDatum::transform(const Freq& eta, int) const
{
    cplx acc = 0.0;
    const double r2 = eta.squaredNorm();
    for (const auto& c : components) {
        const cplx shift = std::polar(1.0, -2.0 * pi * c.center.dot(eta));
        const double a = c.width;
        const double mag = kind == DatumKind::laplace ? 1.0 / (1.0 + 4.0 * pi * pi * a * a * r2)
                                                      : std::exp(-2.0 * pi * pi * a * a * r2);
        acc += c.weight * mag * shift;
    }
    return acc;
}

double InitialDatum::density(const Freq& v, int dimension) const
{
    double acc = 0.0;
    for (const auto& c : components) {
        const double r = (v - c.center).norm();
        const double a = c.width;
        if (kind == DatumKind::laplace) {
            if (dimension == 1) acc += c.weight * std::exp(-r / a) / (2.0 * a);
            else if (dimension == 2) acc += c.weight * std::cyl_bessel_k(0.0, r / a) / (2.0 * pi * a * a);
            else acc += c.weight * std::exp(-r / a) / (4.0 * pi * a * a * r);
        } else {
            acc += c.weight * std::exp(-r * r / (2.0 * a * a)) / std::pow(2.0 * pi * a * a, 0.5 * dimension);
        }
    }
    return acc;
}

double InitialDatum::second_moment(int dimension) const
{
    double acc = 0.0;
    for (const auto& c : components) {
        const double a2 = c.width * c.width;
        const double spread = kind == DatumKind::laplace ? 2.0 * dimension * a2 : dimension * a2;
        acc += c.weight * (spread + c.center.squaredNorm());
    }
    return acc;
}

SpectralState init_state(const InitialDatum& datum, const GridSpec& grid)
{
    grid.validate();
    datum.validate(grid.dimension);
    if (grid.mode == GridMode::radial)
        for (const auto& c : datum.components)
            if (c.center.norm() != 0.0) throw ConfigError("radial grids require centered (isotropic) data");
    SpectralState s;
    s.grid = grid;
    s.values.resize(grid.size());
    for (Eigen::Index k = 0; k < s.values.size(); ++k) s.values[k] = datum.transform(s.node(k), grid.dimension);
    enforce_hermitian(s);
    return s;
}

Interpolator::Interpolator(const SpectralState& s)
    : v_(s.values.data()), mode_(s.grid.mode), n_(s.grid.n), side_(s.grid.side()), p_(s.grid.stencil),
      inv_h_(1.0 / s.grid.spacing()), limit_(s.limit())
{
    if (!s.values.allFinite()) throw NumericalError("interpolate: state contains non-finite values");
    for (int j = 0; j < p_; ++j) {
        double d = 1.0;
        for (int k = 0; k < p_; ++k)
            if (k != j) d *= double(j - k);
        denom_[j] = d;
    }
}

// Fills w[0..p) for nodes base..base+p-1 and returns base.
int Interpolator::weights(double u, double* w) const
{
    const double fl = std::floor(u);
    // shift the stencil inward at the outer edge instead of reading zeros
    const int top = n_ - p_;
    const int bottom = mode_ == GridMode::radial ? -(p_ / 2 - 1) : -(n_ - 1);
    const int base = std::clamp(int(fl) - (p_ / 2 - 1), bottom, top);
    const double s = u - base;
    if (u == fl) {
        for (int j = 0; j < p_; ++j) w[j] = 0.0;
        w[int(fl) - base] = 1.0;
        return base;
    }
    double prod = 1.0;
    for (int k = 0; k < p_; ++k) prod *= s - k;
    for (int j = 0; j < p_; ++j) w[j] = prod / ((s - j) * denom_[j]);
    return base;
}

cplx Interpolator::fetch(int j) const
{
    if (mode_ == GridMode::radial) {
        j = std::abs(j);
        return j < n_ ? v_[j] : cplx(0.0);
    }
    const int off = j + (n_ - 1);
    return off >= 0 && off < side_ ? v_[off] : cplx(0.0);
}

cplx Interpolator::at1(double x) const
{
    if (std::abs(x) > limit_) return 0.0;
    double w[kMaxStencil];
    const int base = weights(x * inv_h_, w);
    cplx acc = 0.0;
    for (int j = 0; j < p_; ++j) acc += w[j] * fetch(base + j);
    return acc;
}

cplx Interpolator::atr(double r) const
{
    r = std::abs(r);
    if (r > limit_) return 0.0;
    double w[kMaxStencil];
    const int base = weights(r * inv_h_, w);
    double acc = 0.0;
    if (base >= 0 && base + p_ <= n_) {
        for (int j = 0; j < p_; ++j) acc += w[j] * v_[base + j].real();
    } else {
        for (int j = 0; j < p_; ++j) acc += w[j] * fetch(base + j).real();
    }
    return acc;
}

cplx Interpolator::at2(double x, double y) const
{
    if (x * x + y * y > limit_ * limit_) return 0.0;
    double wx[kMaxStencil], wy[kMaxStencil];
    const int bx = weights(x * inv_h_, wx) + (n_ - 1);
    const int by = weights(y * inv_h_, wy) + (n_ - 1);
    cplx acc = 0.0;
    const bool inside = bx >= 0 && by >= 0 && bx + p_ <= side_ && by + p_ <= side_;
    for (int b = 0; b < p_; ++b) {
        const int row = by + b;
        if (!inside && (row < 0 || row >= side_)) continue;
        const cplx* line = v_ + std::ptrdiff_t(row) * side_;
        cplx racc = 0.0;
        if (inside) {
            for (int a = 0; a < p_; ++a) racc += wx[a] * line[bx + a];
        } else {
            for (int a = 0; a < p_; ++a) {
                const int col = bx + a;
                if (col >= 0 && col < side_) racc += wx[a] * line[col];
            }
        }
        acc += wy[b] * racc;
    }
    return acc;
}

cplx Interpolator::operator()(const Freq& p) const
{
    switch (mode_) {
    case GridMode::full1d: return at1(p[0]);
    case GridMode::full2d: return at2(p[0], p[1]);
    case GridMode::radial: return atr(p.norm());
    }
    return 0.0;
}

cplx interpolate(const SpectralState& s, const Freq& p)
{
    return Interpolator(s)(p);
}

namespace {

// Periodised inverse transform by direct DFT, without the positivity check.
PhysicalDensity reconstruct(const SpectralState& s)
{
    const int n = s.grid.n;
    const int N = s.grid.side();
    const double h = s.grid.spacing();
    PhysicalDensity out;
    out.dimension = s.grid.dimension;
    out.side = N;
    out.dv = 1.0 / (N * h);
    std::vector<cplx> twiddle(N);
    for (int k = 0; k < N; ++k) twiddle[k] = std::polar(1.0, 2.0 * pi * k / N);
    auto phase = [&](int a, int j) {
        long long p = (long long)(a - (n - 1)) * (j - (n - 1));
        p %= N;
        if (p < 0) p += N;
        return twiddle[p];
    };
    if (s.grid.mode == GridMode::full1d) {
        out.samples.resize(N);
        for (int a = 0; a < N; ++a) {
            cplx acc = 0.0;
            for (int j = 0; j < N; ++j) acc += s.node_value(j) * phase(a, j);
            out.samples[a] = acc.real() * h;
        }
    } else {
        // rows first (transform along eta_x), then columns
        Eigen::MatrixXcd tmp(N, N); // (row j_y, velocity a_x)
        for (int jy = 0; jy < N; ++jy)
            for (int a = 0; a < N; ++a) {
                cplx acc = 0.0;
                for (int jx = 0; jx < N; ++jx) acc += s.node_value(Eigen::Index(jy) * N + jx) * phase(a, jx);
                tmp(jy, a) = acc;
            }
        out.samples.resize(Eigen::Index(N) * N);
        for (int b = 0; b < N; ++b)
            for (int a = 0; a < N; ++a) {
                cplx acc = 0.0;
                for (int jy = 0; jy < N; ++jy) acc += tmp(jy, a) * phase(b, jy);
                out.samples[Eigen::Index(b) * N + a] = acc.real() * h * h;
            }
    }
    return out;
}

// Even extension of a radial profile onto a full 1d grid: the marginal along one axis.
SpectralState radial_line(const SpectralState& s)
{
    GridSpec g = s.grid;
    g.dimension = 1;
    g.mode = GridMode::full1d;
    Eigen::VectorXcd v(g.size());
    for (int j = 0; j < g.side(); ++j) v[j] = s.node_value(std::abs(j - (g.n - 1)));
    return make_state(g, s.t, v);
}

} // namespace

Eigen::VectorXd moments(const SpectralState& s, int order)
{
    if (order < 0 || order > 4) throw std::invalid_argument("moments: order must lie in [0,4]");
    Eigen::VectorXd m = Eigen::VectorXd::Zero(order + 1);
    m[0] = s.mass();
    const int d = s.grid.dimension;
    if (s.grid.mode == GridMode::radial) {
        const Eigen::VectorXd line = moments(radial_line(s), order);
        if (order >= 2) m[2] = d * line[2];
        if (order >= 4) m[4] = d * (d + 2) * line[4] / 3.0;
        return m;
    }
    const PhysicalDensity rho = reconstruct(s);
    const int N = rho.side;
    if (s.grid.mode == GridMode::full1d) {
        for (int a = 0; a < N; ++a) {
            const double v = rho.velocity(a);
            double p = rho.samples[a] * rho.cell();
            for (int k = 1; k <= order; ++k) m[k] += (p *= v);
        }
        return m;
    }
    Eigen::Vector2d first = Eigen::Vector2d::Zero(), third = Eigen::Vector2d::Zero();
    double second = 0.0, fourth = 0.0;
    for (int b = 0; b < N; ++b)
        for (int a = 0; a < N; ++a) {
            const Eigen::Vector2d v(rho.velocity(a), rho.velocity(b));
            const double w = rho.samples[Eigen::Index(b) * N + a] * rho.cell();
            const double v2 = v.squaredNorm();
            first += w * v;
            second += w * v2;
            third += w * v2 * v;
            fourth += w * v2 * v2;
        }
    if (order >= 1) m[1] = first.norm();
    if (order >= 2) m[2] = second;
    if (order >= 3) m[3] = third.norm();
    if (order >= 4) m[4] = fourth;
    return m;
}

PhysicalDensity to_physical(const SpectralState& s)
{
    if (!s.grid.full()) throw std::invalid_argument("to_physical: radial grids have no physical reconstruction");
    PhysicalDensity out = reconstruct(s);
    if (out.samples.minCoeff() < -1e-8)
        throw NumericalError("to_physical: reconstructed density has samples below -1e-8 (under-resolved)");
    return out;
}

} // namespace kinb
