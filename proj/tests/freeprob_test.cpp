#include <cmath>
#include <numbers>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <gtest/gtest.h>

#include "freespec/error.hpp"
#include "freespec/freeprob.hpp"

using namespace freespec;
using std::numbers::pi;

namespace {

// Integral of f against the MP density by tanh-sinh (copes with the square
// root edges and the 1/sqrt(x) edge at c = 1).
template <class F>
double mp_integral(const MpParams& p, F f) {
    boost::math::quadrature::tanh_sinh<double> q;
    return q.integrate([&](double x) { return f(x) * mp_density(p, x); }, p.lower_edge(),
                       p.upper_edge());
}

Complex mp_cauchy_oracle(const MpParams& p, Complex z) {
    const double re = mp_integral(p, [&](double x) { return (1.0 / (z - x)).real(); });
    const double im = mp_integral(p, [&](double x) { return (1.0 / (z - x)).imag(); });
    return {re, im};
}

// Semicircle of variance v.
Complex semicircle(double v, Complex z) {
    // Product of principal roots: cut exactly on [-2 sqrt v, 2 sqrt v].
    const double e = 2.0 * std::sqrt(v);
    return (z - std::sqrt(z - e) * std::sqrt(z + e)) / (2.0 * v);
}

CMatrix scalar(Complex z) {
    CMatrix m(1, 1);
    m(0, 0) = z;
    return m;
}

CauchyTransform semicircle_transform(double v) {
    return [v](const CMatrix& b) { return scalar(semicircle(v, b(0, 0))); };
}

double second_moment(const SpectralDensity& d, double center = 0.0) {
    double m = 0.0;
    for (std::size_t i = 0; i + 1 < d.grid.size(); ++i) {
        const double h = d.grid[i + 1] - d.grid[i];
        const auto f = [&](std::size_t k) {
            const double x = d.grid[k] - center;
            return x * x * d.values[k];
        };
        m += 0.5 * h * (f(i) + f(i + 1));
    }
    return m;
}

double first_moment(const SpectralDensity& d) {
    double m = 0.0;
    for (std::size_t i = 0; i + 1 < d.grid.size(); ++i)
        m += 0.5 * (d.grid[i + 1] - d.grid[i]) *
             (d.grid[i] * d.values[i] + d.grid[i + 1] * d.values[i + 1]);
    return m;
}

}  // namespace

TEST(CauchyMp, MatchesQuadrature) {
    for (const MpParams p : {MpParams{1.0, 1.0}, MpParams{0.3, 1.0}, MpParams{0.7, 2.5}})
        for (Complex z : {Complex(0.7, 0.5), Complex(-1.0, 0.1), Complex(2.0, 3.0),
                          Complex(5.0, 0.05)}) {
            const Complex want = mp_cauchy_oracle(p, z);
            EXPECT_NEAR(std::abs(cauchy_mp(p, z) - want), 0.0, 1e-8)
                << "c=" << p.ratio << " z=" << z;
        }
}

TEST(CauchyMp, HerglotzAndAsymptotics) {
    const MpParams p{0.5, 1.0};
    for (double x = -3.0; x <= 6.0; x += 0.37) EXPECT_LT(cauchy_mp(p, {x, 1e-3}).imag(), 0.0);
    const Complex z(1e6, 1.0);
    EXPECT_NEAR(std::abs(z * cauchy_mp(p, z) - 1.0), 0.0, 1e-5);
    EXPECT_THROW(cauchy_mp(p, {1.0, 0.0}), DomainError);
    EXPECT_THROW(cauchy_mp(p, {1.0, -1.0}), DomainError);
}

TEST(CauchyMp, NearAxisKnownPoint) {
    // Close to the real axis -Im G / pi approaches the density.
    const MpParams p{1.0, 1.0};
    const Complex g = cauchy_mp(p, {0.7, 1e-7});
    EXPECT_NEAR(-g.imag() / pi, mp_density(p, 0.7), 1e-5);
}

TEST(CauchyMp, AnalyticContinuationAgrees) {
    const MpParams p{0.4, 1.3};
    for (Complex z : {Complex(0.3, 0.2), Complex(3.0, 1.0)})
        EXPECT_NEAR(std::abs(cauchy_mp_analytic(p, z) - cauchy_mp(p, z)), 0.0, 1e-12);
    // Outside the support on the real axis the transform is real.
    EXPECT_NEAR(cauchy_mp_analytic(p, {6.0, 0.0}).imag(), 0.0, 1e-14);
}

TEST(OperatorCauchy, ScalarCoefficientReducesToMp) {
    const MpParams p{1.0, 1.0};
    RMatrix one(1, 1);
    one(0, 0) = 1.0;
    const Complex z(0.7, 1e-3);
    const auto g = WishartTransform(one, p)(scalar(z));
    EXPECT_NEAR(std::abs(g(0, 0) - cauchy_mp(p, z)), 0.0, 1e-12);
    // Scaled coefficient: E[(z - a x)^{-1}] = G(z / a) / a.
    one(0, 0) = -2.0;
    const auto g2 = WishartTransform(one, p)(scalar(z));
    const Complex ref{mp_integral(p, [&](double x) { return (1.0 / (z + 2.0 * x)).real(); }),
                      mp_integral(p, [&](double x) { return (1.0 / (z + 2.0 * x)).imag(); })};
    EXPECT_NEAR(std::abs(g2(0, 0) - ref), 0.0, 1e-7);
}

TEST(OperatorCauchy, ZeroCoefficientIsInverse) {
    RMatrix zero = RMatrix::Zero(3, 3);
    CMatrix b(3, 3);
    b << Complex(1, 2), 0.5, 0, 0.5, Complex(-1, 1), 0.2, 0, 0.2, Complex(0, 3);
    const CMatrix inv = b.inverse();
    for (auto method : {WishartMethod::Spectral, WishartMethod::Quadrature}) {
        const auto g = WishartTransform(zero, {0.5, 1.0}, method)(b);
        EXPECT_LT(max_norm(g - inv), 1e-12);
    }
}

TEST(OperatorCauchy, ThreeByThreeAgainstQuadrature) {
    const MpParams p{0.8, 1.0};
    RMatrix a(3, 3);
    a << 0, 0, 0, 0, 1, 0.3, 0, 0.3, -1;
    CMatrix b(3, 3);
    b << Complex(0.4, 0.5), 1.0, 0.0, 1.0, Complex(0.0, 0.7), 0.1, 0.0, 0.1, Complex(-0.2, 0.9);
    CMatrix oracle(3, 3);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
            const auto entry = [&](double x, bool imag) {
                const CMatrix inv = (b - a.cast<Complex>() * x).inverse();
                return imag ? inv(r, c).imag() : inv(r, c).real();
            };
            oracle(r, c) = {mp_integral(p, [&](double x) { return entry(x, false); }),
                            mp_integral(p, [&](double x) { return entry(x, true); })};
        }
    EXPECT_LT(max_norm(operator_cauchy_wishart(a, p, b) - oracle), 1e-7);
    EXPECT_LT(max_norm(WishartTransform(a, p)(b) - oracle), 1e-7);
    EXPECT_LT(max_norm(WishartTransform(a, p, WishartMethod::Quadrature)(b) - oracle), 1e-7);
}

TEST(OperatorCauchy, RejectsBadInputs) {
    RMatrix a(2, 2);
    a << 1, 2, 0, 1;  // not symmetric
    EXPECT_THROW(WishartTransform(a, {1.0, 1.0}), InvalidArgument);
    QuadratureConfig tight;
    tight.max_panels = 16;
    tight.tolerance = 1e-300;
    RMatrix one = RMatrix::Identity(1, 1);
    EXPECT_THROW(operator_cauchy_wishart(one, {1.0, 1.0}, scalar({1.0, 1e-3}), tight),
                 NonConvergenceError);
}

TEST(HTransform, Definition) {
    const CMatrix b = scalar({0.3, 2.0});
    const CMatrix g = scalar({0.1, -0.4});
    EXPECT_NEAR(std::abs(h_transform(g, b)(0, 0) - (1.0 / g(0, 0) - b(0, 0))), 0.0, 1e-15);
    EXPECT_THROW(h_transform(scalar(0.0), b), ConditioningError);
}

TEST(Subordination, ZeroSummandIsIdentity) {
    const MpParams p{0.5, 1.0};
    RMatrix one = RMatrix::Identity(1, 1);
    const auto gx = WishartTransform(one, p);
    const auto gy = point_mass_transform(CMatrix::Zero(1, 1));
    const Complex z(1.2, 0.3);
    const auto r = subordination_sum(gx, gy, scalar(z));
    EXPECT_NEAR(std::abs(r.g(0, 0) - cauchy_mp(p, z)), 0.0, 1e-9);
}

TEST(Subordination, SemicirclesAdd) {
    // Free sum of semicircles with variances 1 and 2 is a semicircle of variance 3.
    for (Complex z : {Complex(0.5, 0.2), Complex(-2.0, 0.05), Complex(4.0, 1.0)}) {
        const auto r = subordination_sum(semicircle_transform(1.0), semicircle_transform(2.0),
                                         scalar(z));
        EXPECT_NEAR(std::abs(r.g(0, 0) - semicircle(3.0, z)), 0.0, 1e-8) << z;
        EXPECT_GT(r.iterations, 0);
    }
}

TEST(Subordination, BudgetExhaustion) {
    FixedPointConfig config;
    config.max_iterations = 1;
    config.tolerance = 1e-300;
    try {
        subordination_sum(semicircle_transform(1.0), semicircle_transform(1.0), scalar({0.1, 1e-4}),
                          config);
        FAIL();
    } catch (const NonConvergenceError& e) {
        EXPECT_EQ(e.iterations(), 1);
        EXPECT_GT(e.residual(), 0.0);
    }
    config.damping = 0.0;
    EXPECT_THROW(validate(config), InvalidArgument);
}

TEST(StieltjesInversion, Semicircle) {
    const auto grid = uniform_grid(-3.0, 3.0, 601);
    const double y = 1e-5;
    std::vector<Complex> g;
    for (double x : grid) g.push_back(semicircle(1.0, {x, y}));
    const auto d = stieltjes_invert(g, grid, y);
    for (std::size_t i = 0; i < grid.size(); i += 37) {
        const double x = grid[i];
        const double want = std::abs(x) < 2.0 ? std::sqrt(4.0 - x * x) / (2.0 * pi) : 0.0;
        EXPECT_NEAR(d.values[i], want, 2e-3) << x;
    }
    EXPECT_NEAR(d.total_mass(), 1.0, 2e-3);
    ASSERT_EQ(d.support_intervals.size(), 1u);
    EXPECT_NEAR(d.support_intervals[0].first, -2.0, 0.03);
    EXPECT_NEAR(d.support_intervals[0].second, 2.0, 0.03);
}

TEST(StieltjesInversion, PointMassAtZero) {
    // G = 1/z smoothed at height y: a Cauchy bump of unit mass.
    const double y = 0.01;
    const auto grid = uniform_grid(-5.0, 5.0, 10001);
    std::vector<Complex> g;
    for (double x : grid) g.push_back(1.0 / Complex(x, y));
    const auto d = stieltjes_invert(g, grid, y, 1e-12);
    EXPECT_NEAR(d.total_mass(), 1.0 - 2.0 * std::atan(y / 5.0) / pi, 1e-4);
    EXPECT_NEAR(d.values[5000], 1.0 / (pi * y), 1e-6);
}

TEST(PointMasses, CornerRecovery) {
    AsdOptions options;
    options.corner_extrapolation = true;
    for (auto [a, b] : {std::pair{0.0, 1.0}, {2.0, -1.0}, {0.5, 0.5}})
        for (Complex z : {Complex(0.3, 0.4), Complex(4.0, 0.1), Complex(-1.0, 2.0)}) {
            const Complex want = 1.0 / (z - (b - a) * (b - a));
            EXPECT_LT(std::abs(p2_transform_point_masses(a, b, z, options) - want), 1e-6);
        }
    // Without extrapolation the corner error is O(eps).
    const Complex z(0.3, 0.4);
    EXPECT_LT(std::abs(p2_transform_point_masses(0.0, 1.0, z) - 1.0 / (z - 1.0)), 1e-4);
}

TEST(Linearization, Shape) {
    const auto l = linearize_p2();
    EXPECT_EQ(l.dim(), 3);
    EXPECT_TRUE(l.c.isApprox(l.c.transpose()));
    EXPECT_TRUE(l.b0.isApprox(l.b0.transpose()));
    EXPECT_TRUE(l.b1.isApprox(l.b1.transpose()));
}

TEST(AsdP1, SymmetricWithUnitMassAndVarianceTwo) {
    const MpParams p{1.0, 1.0};
    const auto grid = uniform_grid(-4.0, 4.0, 801);
    const auto d = asd_p1(p, p, grid);
    EXPECT_NEAR(d.total_mass(), 1.0, 5e-3);
    for (std::size_t i = 0; i < grid.size(); ++i)
        EXPECT_NEAR(d.values[i], d.values[grid.size() - 1 - i], 1e-6);
    // var(S1 - S0) = c s^4 + c s^4.
    EXPECT_NEAR(second_moment(d), 2.0, 0.02);
    EXPECT_EQ(d.invalid_points(), 0u);
}

TEST(AsdP1, UnequalParametersHaveShiftedMean) {
    const MpParams p0{0.5, 1.0}, p1{0.5, 2.0};
    const auto d = asd_p1(p0, p1, uniform_grid(-4.0, 8.0, 1201));
    EXPECT_NEAR(d.total_mass(), 1.0, 5e-3);
    EXPECT_NEAR(first_moment(d), 1.0, 0.01);
    // var = 0.5 * 1 + 0.5 * 4.
    EXPECT_NEAR(second_moment(d, 1.0), 2.5, 0.03);
}

TEST(AsdP2, MeanMatchesSecondMomentOfDifference) {
    const MpParams p{1.0, 1.0};
    const auto d = asd_p2(p, p, uniform_grid(-0.5, 16.5, 1024));
    EXPECT_NEAR(d.total_mass(), 1.0, 0.01);
    EXPECT_NEAR(first_moment(d), 2.0, 0.05);
    for (double v : d.values) EXPECT_GE(v, 0.0);
    ASSERT_FALSE(d.support_intervals.empty());
    EXPECT_LT(d.support_intervals.front().first, 0.1);
}

TEST(AsdP2, SerialAndParallelAgree) {
    const MpParams p{1.0, 1.0};
    const auto grid = uniform_grid(-0.5, 16.5, 64);
    AsdOptions serial;
    serial.parallel = false;
    const auto a = asd_p2(p, p, grid);
    const auto b = asd_p2(p, p, grid, serial);
    EXPECT_EQ(a.values, b.values);
}
