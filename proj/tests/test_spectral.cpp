#include "kinb/spectral.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace kinb;

namespace {

constexpr double pi = std::numbers::pi;

GridSpec line(int n, double eta_max)
{
    GridSpec g;
    g.n = n;
    g.eta_max = eta_max;
    return g;
}

GridSpec plane(int n, double eta_max)
{
    GridSpec g;
    g.dimension = 2;
    g.mode = GridMode::full2d;
    g.n = n;
    g.eta_max = eta_max;
    return g;
}

double worst_interpolation_error(const InitialDatum& d, const GridSpec& g, std::uint64_t seed)
{
    const SpectralState s = init_state(d, g);
    const Interpolator f(s);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-g.eta_max, g.eta_max);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        Freq p(u(rng), g.dimension == 2 ? u(rng) : 0.0, 0.0);
        if (g.mode == GridMode::radial) p = Freq(std::abs(p[0]), 0.0, 0.0);
        if (p.norm() > g.eta_max) continue;
        worst = std::max(worst, std::abs(f(p) - d.transform(p, g.dimension)));
    }
    return worst;
}

} // namespace

TEST_CASE("grid validation")
{
    GridSpec g = line(8, 4.0);
    CHECK_THROWS_AS(g.validate(), ConfigError);
    g = line(64, 4.0);
    g.mode = GridMode::full2d;
    CHECK_THROWS_AS(g.validate(), ConfigError);
    g = line(64, 4.0);
    g.mode = GridMode::radial;
    CHECK_THROWS_AS(g.validate(), ConfigError);
    g.dimension = 3;
    CHECK_NOTHROW(g.validate());
    g.stencil = 7;
    CHECK_THROWS_AS(g.validate(), ConfigError);
    CHECK(parse_grid_mode("full-2d") == GridMode::full2d);
    CHECK(to_string(GridMode::radial) == "radial");
}

TEST_CASE("init_state closed-form transforms")
{
    const GridSpec g = line(257, 16.0);
    const SpectralState gauss = init_state(InitialDatum::gaussian(1.0), g);
    CHECK(gauss.mass() == 1.0);
    CHECK(gauss.t == 0.0);
    for (Eigen::Index k = 0; k < gauss.values.size(); k += 17) {
        const double eta = gauss.node(k)[0];
        CHECK(std::abs(gauss.values[k] - std::exp(-2.0 * pi * pi * eta * eta)) < 1e-15);
    }
    const SpectralState lap = init_state(InitialDatum::laplace(1.0), g);
    for (Eigen::Index k = 0; k < lap.values.size(); k += 13) {
        const double eta = lap.node(k)[0];
        CHECK(std::abs(lap.values[k] - 1.0 / (1.0 + 4.0 * pi * pi * eta * eta)) < 1e-15);
    }
    const InitialDatum pair =
        InitialDatum::mixture({{0.5, Freq(1.3, 0, 0), 0.7}, {0.5, Freq(-1.3, 0, 0), 0.7}});
    const SpectralState mix = init_state(pair, g);
    CHECK(mix.mass() == doctest::Approx(1.0).epsilon(1e-15));
    for (Eigen::Index k = 0; k < mix.values.size(); ++k) {
        CHECK(std::abs(mix.values[k].imag()) < 1e-15);
        CHECK(std::abs(mix.values[k] - mix.values[mix.mirror(k)]) < 1e-15);
    }
    CHECK(hermitian_defect(init_state(InitialDatum::gaussian(0.8, 2.0, Freq(0.4, 0, 0)), g)) <= 1e-12);
    CHECK_THROWS_AS(init_state(InitialDatum::gaussian(1.0, 1.0, Freq(0.5, 0, 0)),
                               GridSpec{3, GridMode::radial, 64, 4.0}),
                    ConfigError);
    CHECK_THROWS_AS(InitialDatum::gaussian(-1.0).validate(1), ConfigError);
}

TEST_CASE("interpolation conventions")
{
    const SpectralState s = init_state(InitialDatum::gaussian(1.0, 1.0, Freq(0.3, 0, 0)), line(257, 16.0));
    const Interpolator f(s);
    for (Eigen::Index k : {0, 3, 128, 200, 256, 511, 512})
        CHECK(f(s.node(k)) == s.values[k]);
    CHECK(f(Freq(32.0, 0, 0)) == cplx(0.0));
    CHECK(f(Freq(-32.0, 0, 0)) == cplx(0.0));
    // conjugate symmetry of the interpolant
    for (double x : {0.013, 0.77, 3.14159}) CHECK(std::abs(f(Freq(-x, 0, 0)) - std::conj(f(Freq(x, 0, 0)))) < 1e-15);

    const SpectralState cut = restrict_to(s, 4.0);
    const Interpolator fc(cut);
    CHECK(fc(Freq(4.5, 0, 0)) == cplx(0.0));
    CHECK(fc(Freq(3.5, 0, 0)) == f(Freq(3.5, 0, 0)));
}

TEST_CASE("Gaussian interpolation between nodes at spacing 1/16")
{
    const GridSpec g = line(257, 16.0);
    REQUIRE(g.spacing() <= 1.0 / 16.0);
    const SpectralState s = init_state(InitialDatum::gaussian(1.0), g);
    const Interpolator f(s);
    double worst = 0.0;
    for (Eigen::Index k = 0; k + 1 < s.values.size(); ++k) {
        const double mid = s.node(k)[0] + 0.5 * g.spacing();
        worst = std::max(worst, std::abs(f(Freq(mid, 0, 0)) - std::exp(-2.0 * pi * pi * mid * mid)));
    }
    CHECK(worst <= 1e-6);
}

TEST_CASE("catalog interpolation at random points")
{
    // Laplace data are analytic only in a strip of half-width 1/(2 pi a); a <= 1/4 keeps
    // the strip wide against spacing 1/16.
    const GridSpec g1 = line(257, 16.0);
    const GridSpec g2 = plane(65, 4.0);
    const InitialDatum data1[] = {
        InitialDatum::gaussian(1.0),
        InitialDatum::gaussian(0.9, 1.5, Freq(0.7, 0, 0)),
        InitialDatum::laplace(0.25),
        InitialDatum::mixture({{0.3, Freq(-1.0, 0, 0), 0.8}, {0.7, Freq(0.5, 0, 0), 1.0}}),
    };
    for (const auto& d : data1) CHECK(worst_interpolation_error(d, g1, 11) <= 1e-5);
    const InitialDatum data2[] = {
        InitialDatum::gaussian(1.0, 1.0, Freq(0.5, 0.2, 0)),
        InitialDatum::laplace(0.25),
        InitialDatum::mixture({{0.5, Freq(1.0, 0, 0), 0.9}, {0.5, Freq(-1.0, 0.5, 0), 1.0}}),
    };
    for (const auto& d : data2) CHECK(worst_interpolation_error(d, g2, 12) <= 1e-5);
    GridSpec r = line(65, 4.0);
    r.dimension = 3;
    r.mode = GridMode::radial;
    CHECK(worst_interpolation_error(InitialDatum::gaussian(1.0), r, 13) <= 1e-5);
    CHECK(worst_interpolation_error(InitialDatum::laplace(0.25), r, 14) <= 1e-5);
}

TEST_CASE("moments")
{
    const SpectralState g = init_state(InitialDatum::gaussian(1.0), line(257, 16.0));
    const Eigen::VectorXd m = moments(g, 4);
    CHECK(m[0] == g.values[g.origin()].real());
    CHECK(m[0] == 1.0);
    CHECK(std::abs(m[1]) < 1e-12);
    CHECK(m[2] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m[4] == doctest::Approx(3.0).epsilon(1e-12));

    const SpectralState shifted = init_state(InitialDatum::gaussian(0.7, 1.0, Freq(0.3, 0, 0)), line(257, 16.0));
    const Eigen::VectorXd ms = moments(shifted, 4);
    CHECK(ms[1] == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(ms[2] == doctest::Approx(0.58).epsilon(1e-12));
    CHECK(ms[3] == doctest::Approx(0.027 + 3 * 0.3 * 0.49).epsilon(1e-12));

    // Laplace: f(v) = exp(-|v|)/2 has m2 = 2, m4 = 24
    const SpectralState lap = init_state(InitialDatum::laplace(1.0), line(2049, 64.0));
    const Eigen::VectorXd ml = moments(lap, 4);
    CHECK(ml[2] == doctest::Approx(2.0).epsilon(1e-5));
    CHECK(ml[4] == doctest::Approx(24.0).epsilon(1e-3));

    // radial and full-2d computations agree on matched data
    GridSpec r = line(64, 4.0);
    r.dimension = 2;
    r.mode = GridMode::radial;
    const InitialDatum iso = InitialDatum::gaussian(0.8, 1.0);
    const double m2r = moments(init_state(iso, r), 2)[2];
    const double m2f = moments(init_state(iso, plane(64, 4.0)), 2)[2];
    CHECK(std::abs(m2r - m2f) <= 1e-6);
    CHECK(m2r == doctest::Approx(2 * 0.64).epsilon(1e-10));
    r.dimension = 3;
    CHECK(moments(init_state(iso, r), 4)[2] == doctest::Approx(3 * 0.64).epsilon(1e-10));
    CHECK(moments(init_state(iso, r), 4)[4] == doctest::Approx(15 * 0.64 * 0.64).epsilon(1e-10));
}

TEST_CASE("physical reconstruction")
{
    const SpectralState g = init_state(InitialDatum::gaussian(1.0), line(257, 16.0));
    const PhysicalDensity rho = to_physical(g);
    CHECK(rho.samples.sum() * rho.cell() == doctest::Approx(g.mass()).epsilon(1e-8));
    double worst = 0.0;
    for (int a = 0; a < rho.side; ++a) {
        const double v = rho.velocity(a);
        worst = std::max(worst, std::abs(rho.samples[a] - std::exp(-0.5 * v * v) / std::sqrt(2.0 * pi)));
    }
    CHECK(worst <= 1e-6);

    const SpectralState g2 = init_state(InitialDatum::gaussian(0.9, 1.0, Freq(0.3, -0.2, 0)), plane(48, 4.0));
    const PhysicalDensity rho2 = to_physical(g2);
    CHECK(rho2.samples.sum() * rho2.cell() == doctest::Approx(1.0).epsilon(1e-8));
    const InitialDatum d2 = InitialDatum::gaussian(0.9, 1.0, Freq(0.3, -0.2, 0));
    worst = 0.0;
    for (int b = 0; b < rho2.side; ++b)
        for (int a = 0; a < rho2.side; ++a) {
            const double exact = d2.density(Freq(rho2.velocity(a), rho2.velocity(b), 0), 2);
            worst = std::max(worst, std::abs(rho2.samples[Eigen::Index(b) * rho2.side + a] - exact));
        }
    CHECK(worst <= 1e-6);

    // the Fourier tail of a Laplace datum beyond eta_max costs 1/(2 pi^2 eta_max) at the peak
    const SpectralState lap = init_state(InitialDatum::laplace(1.0), line(2049, 64.0));
    const PhysicalDensity rl = to_physical(lap);
    CHECK(rl.samples[(rl.side - 1) / 2] == doctest::Approx(0.5).epsilon(2e-3));

    GridSpec r = line(64, 4.0);
    r.dimension = 2;
    r.mode = GridMode::radial;
    CHECK_THROWS_AS(to_physical(init_state(InitialDatum::gaussian(1.0), r)), std::invalid_argument);

    // a transform that is not positive definite reconstructs to a signed density
    SpectralState bad = g;
    for (Eigen::Index k = 0; k < bad.values.size(); ++k)
        if (std::abs(bad.node(k)[0]) > 1.0) bad.values[k] = 0.5;
    CHECK_THROWS_AS(to_physical(bad), NumericalError);
}

TEST_CASE("hermitian enforcement and monitors")
{
    SpectralState s = init_state(InitialDatum::gaussian(1.0, 1.0, Freq(0.5, 0, 0)), line(64, 4.0));
    s.values[10] += cplx(1e-3, 2e-3);
    CHECK(hermitian_defect(s) > 1e-4);
    enforce_hermitian(s);
    CHECK(hermitian_defect(s) <= 1e-15);
    CHECK(s.values[s.origin()].imag() == 0.0);
    CHECK(sup_ratio(s) <= 1.0 + 1e-12);
    const SpectralState lap = init_state(InitialDatum::laplace(1.0), line(64, 4.0));
    CHECK(tail_monitor(lap) == doctest::Approx(1.0 / (1.0 + 4.0 * pi * pi * 3.6 * 3.6)).epsilon(0.05));
}
