#include "kinb/errors.hpp"
#include "kinb/inequalities.hpp"
#include "kinb/suites.hpp"

#include <boost/multiprecision/cpp_dec_float.hpp>

#include <doctest.h>

#include <cmath>

using namespace kinb;
using mp50 = boost::multiprecision::cpp_dec_float_50;

TEST_CASE("epsilon closed forms")
{
    CHECK(epsilon(0.5, 1.0) == doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-15));
    CHECK(epsilon(0.5, 1.0) == doctest::Approx(0.4142136).epsilon(1e-7));
    for (double u : {0.0, 0.3, 1.0, 7.0, 1e8}) CHECK(epsilon(1.0, u) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(epsilon(0.5, 3.0) == doctest::Approx(2.0 - std::sqrt(3.0)).epsilon(1e-14));
    CHECK(epsilon(0.3, std::numeric_limits<double>::infinity()) == 0.0);
    // large u keeps relative accuracy where the naive difference cancels
    const mp50 u("1e12"), a("0.3");
    const mp50 exact = pow(1 + u, a) - pow(u, a);
    CHECK(epsilon(0.3, 1e12) == doctest::Approx(exact.convert_to<double>()).epsilon(1e-13));
}

TEST_CASE("alpha_md printed values and defining identity")
{
    CHECK(std::abs(alpha_md(2, 1) - 0.847997) < 1e-6);
    CHECK(std::abs(alpha_md(2, 2) - 0.736966) < 1e-6);
    CHECK(std::abs(alpha_md(2, 3) - 0.652077) < 1e-6);
    CHECK(std::abs(alpha_md(2, 6) - 0.485427) < 1e-6);
    for (int m = 1; m <= 16; ++m)
        for (int n = 1; n <= 8; ++n)
            CHECK(std::abs(epsilon(alpha_md(m, n), 1.0) - 2.0 * m / (2.0 * m + n)) <= 1e-12);
    double prev = 0.0;
    for (int m = 1; m <= 4000; m *= 2) {
        CHECK(alpha_md(m, 3) > prev);
        prev = alpha_md(m, 3);
    }
    CHECK(prev == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("required moment thresholds")
{
    const double edge = std::log(9.0 / 5.0) / std::log(2.0);
    CHECK(required_moment(edge, true) == 2);
    CHECK(required_moment(0.25, false) == 2);
    CHECK(required_moment(0.25, true) == 2);
    // (2^0.9 - 1)/(2 - 2^0.9) in 50 digits
    const mp50 p = pow(mp50(2), mp50("0.9"));
    const double threshold = ((p - 1) / (2 - p)).convert_to<double>();
    CHECK(threshold == doctest::Approx(6.46).epsilon(1e-3));
    CHECK(required_moment(0.9, false) == int(std::ceil(threshold)));
    CHECK(required_moment(0.9, false) == 7);
    CHECK(required_moment(0.9, true) == 4);
}

TEST_CASE("inverse power law")
{
    const InversePower p5 = from_inverse_power(5.0);
    CHECK(p5.gamma == 0.0);
    CHECK(p5.nu == 0.25);
    CHECK(p5.maxwellian);
    const InversePower p3 = from_inverse_power(3.0);
    CHECK(p3.gamma == doctest::Approx(-1.0));
    CHECK(p3.nu == doctest::Approx(0.5));
    const InversePower inf = from_inverse_power(std::numeric_limits<double>::infinity());
    CHECK(inf.gamma == 1.0);
    CHECK(inf.nu == 0.0);
    CHECK_THROWS_AS(from_inverse_power(2.0), std::invalid_argument);
}

TEST_CASE("Kolmogorov-Landau constant")
{
    LambdaPoints one{2, Eigen::VectorXd::Ones(1)};
    CHECK(kl_constant(one) == doctest::Approx(8.0).epsilon(1e-15));

    for (int m = 2; m <= 6; ++m) {
        Eigen::VectorXd lam(m - 1);
        for (int i = 0; i < m - 1; ++i) lam[i] = (i + 1.0) / (m - 1) * 0.9 + 0.05 * (i == 0);
        // V_{ij} = lambda_j^i, i = 1..m-1; the norm is the max absolute row sum of the inverse
        Eigen::MatrixXd V(m - 1, m - 1);
        for (int i = 0; i < m - 1; ++i)
            for (int j = 0; j < m - 1; ++j) V(i, j) = std::pow(lam[j], i + 1);
        const Eigen::MatrixXd inv = V.inverse();
        double direct = 0.0;
        for (int r = 0; r < m - 1; ++r) direct = std::max(direct, inv.row(r).cwiseAbs().sum());
        CHECK(vandermonde_inverse_norm(lam) == doctest::Approx(direct).epsilon(1e-10));
    }

    Eigen::VectorXd half(2);
    half << 0.5, 1.0;
    const double c3 = kl_constant(LambdaPoints{3, half});
    CHECK(optimize_lambdas(3).lambda.size() == 2);
    CHECK(kl_constant(optimize_lambdas(3)) <= c3 * (1.0 + 1e-12));

    const LambdaPoints m2 = optimize_lambdas(2);
    CHECK(m2.lambda[0] == doctest::Approx(1.0));
    CHECK(kl_constant(m2) == doctest::Approx(8.0));

    const LambdaPoints a = optimize_lambdas(5, 99), b = optimize_lambdas(5, 99);
    CHECK(a.lambda == b.lambda);

    double prev = 0.0;
    for (double scale : {1.0, 0.1, 0.01}) {
        const double c = kl_constant(LambdaPoints{3, half * scale});
        CHECK(c > prev);
        prev = c;
    }
    Eigen::VectorXd dup(2);
    dup << 0.5, 0.5;
    CHECK_THROWS_AS(kl_constant(LambdaPoints{3, dup}), std::invalid_argument);
}

TEST_CASE("kl_check examples")
{
    Poly x2(3);
    x2 << 0, 0, 1;
    const KLResult r = kl_check(x2, 2, 1, 1.0, 8.0);
    CHECK(r.lhs == doctest::Approx(2.0));
    CHECK(r.rhs_additive == doctest::Approx(24.0));
    CHECK(r.ok());

    Poly c(1);
    c << 3.0;
    const KLResult rc = kl_check(c, 3, 2, 0.5, 768.0);
    CHECK(rc.lhs == 0.0);
    CHECK(rc.ok());
    CHECK_THROWS_AS(kl_check(Poly::Zero(3), 2, 1, 1.0, 8.0), std::invalid_argument);
}

TEST_CASE("polynomial sup norm finds an interior extremum")
{
    Poly q(4);
    q << 0.0, 1.0, -3.0, 2.0; // x(1-x)(1-2x) has extremum value sqrt(3)/18
    CHECK(sup_norm01(q) == doctest::Approx(std::sqrt(3.0) / 18.0).epsilon(1e-12));
}

TEST_CASE("pointwise from L2 examples")
{
    const double c2 = 8.0;
    TrigPoly one;
    one.n = 1;
    one.k = {Eigen::Vector2d::Zero()};
    one.amp = {1.0};
    one.phase = {0.0};
    const PointwiseResult r = pointwise_from_l2_check(one, 2, c2, {Eigen::Vector2d(0.3, 0.0)});
    // |H|^{5/2} <= L * 2 with L from the chain constant
    const double q = 2.0 + 1.0 / 2.0, p = q + 1.0 - 0.5;
    CHECK(r.constant == doctest::Approx(2.0 * p * c2 * 1.0 + 1.0));
    CHECK(cube_l2_squared(one, Eigen::Vector2d(0.3, 0.0)) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(r.ok);

    TrigPoly zero = one;
    zero.amp = {0.0};
    CHECK(pointwise_from_l2_check(zero, 2, c2, {Eigen::Vector2d(1.0, 0.0)}).ok);

    // the oriented cube sits on the far side of x from the origin
    TrigPoly wave;
    wave.n = 1;
    wave.k = {Eigen::Vector2d(1.0, 0.0)};
    wave.amp = {1.0};
    wave.phase = {0.0};
    const double expect_pos = 1.0 + (std::sin(2.0 * 2.5) - std::sin(2.0 * 0.5)) / 4.0; // int_{0.5}^{2.5} cos^2
    CHECK(cube_l2_squared(wave, Eigen::Vector2d(0.5, 0.0)) == doctest::Approx(expect_pos).epsilon(1e-12));
    const double expect_neg = 1.0 + (std::sin(2.0 * -0.5) - std::sin(2.0 * -2.5)) / 4.0;
    CHECK(cube_l2_squared(wave, Eigen::Vector2d(-0.5, 0.0)) == doctest::Approx(expect_neg).epsilon(1e-12));
}

TEST_CASE("expdiff against a 50 digit oracle")
{
    CHECK(expdiff_check(0.0, 1.0, 0.5, 1.0));
    const auto sides = expdiff_sides<long double>(1.0L, 1.0L, 0.5L, 1.0L);
    using std::exp;
    const mp50 one(1), a("0.5"), bt(1);
    auto G = [&](const mp50& s) { return exp(bt * pow(one + s, a)); };
    const mp50 lhs = abs(G(mp50(2)) - G(mp50(1)));
    const mp50 eps = pow(mp50(2), a) - 1;
    const mp50 rhs = 2 * a * bt * pow(mp50(2), a) * (one - one / 2) * pow(G(mp50(1)), eps) * G(mp50(1));
    CHECK(double(sides.lhs) == doctest::Approx(lhs.convert_to<double>()).epsilon(1e-12));
    CHECK(double(sides.rhs) == doctest::Approx(rhs.convert_to<double>()).epsilon(1e-12));
    CHECK(sides.holds);
    CHECK_THROWS_AS(expdiff_check(2.0, 1.0, 0.5, 1.0), std::invalid_argument);
}

TEST_CASE("inequality suites pass under three seeds")
{
    for (const char* name : {"epsilon", "expdiff", "kl"})
        for (std::uint64_t seed : {1u, 2u, 3u}) {
            const SuiteResult r = run_suite(name, seed);
            INFO(name << " seed " << seed << ": " << r.counterexample);
            CHECK(r.ok());
        }
}

TEST_CASE("corrupted C_m produces a counterexample")
{
    SuiteOptions opt;
    opt.cm_scale = 1e-3;
    const SuiteResult r = run_suite("kl", 1, opt);
    CHECK_FALSE(r.ok());
    CHECK(r.counterexample.find("m=") != std::string::npos);
    CHECK_THROWS_AS(run_suite("nosuch", 1), ConfigError);
}
