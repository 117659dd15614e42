#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "freespec/error.hpp"
#include "freespec/gridsim.hpp"
#include "freespec/locate.hpp"

using namespace freespec;

namespace {

DetectionReport report_with(PolynomialKind kind, std::vector<double> eigenvalues,
                            std::vector<std::size_t> outliers) {
    DetectionReport r;
    r.polynomial = kind;
    r.eigenvalues = std::move(eigenvalues);
    r.outlier_indices = std::move(outliers);
    for (auto k : r.outlier_indices) r.outliers.push_back(r.eigenvalues[k]);
    r.verdict = r.outliers.empty() ? Verdict::H0Retained : Verdict::Anomaly;
    return r;
}

}  // namespace

TEST(Locate, BasisVectorGivesItsChannel) {
    // Outlier eigenvector e3 (0-based channel 2).
    const Matrix v = Matrix::Identity(5, 5);
    const auto r = report_with(PolynomialKind::P2, {0.1, 0.2, 9.0, 0.3, 0.4}, {2});
    const auto loc = locate(r, v);
    EXPECT_EQ(loc.loc, 2u);
    EXPECT_DOUBLE_EQ(loc.indicator[2], 1.0);
    EXPECT_EQ(loc.outlier_count, 1u);
    EXPECT_EQ(loc.outlier_eigenvalues, std::vector<double>{9.0});
}

TEST(Locate, WeightedAcrossOutliers) {
    const Matrix v = Matrix::Identity(4, 4);
    // Outliers 3 on channel 1 and 1 on channel 3: L = (0, 0.75, 0, 0.25).
    const auto r = report_with(PolynomialKind::P2, {0.0, 3.0, 0.0, 1.0}, {1, 3});
    const auto loc = locate(r, v);
    EXPECT_DOUBLE_EQ(loc.indicator[1], 0.75);
    EXPECT_DOUBLE_EQ(loc.indicator[3], 0.25);
    EXPECT_NEAR(std::accumulate(loc.indicator.begin(), loc.indicator.end(), 0.0), 1.0, 1e-15);
}

TEST(Locate, TieTakesLowestChannel) {
    Matrix v = Matrix::Identity(6, 6);
    // Column 0 spread equally over channels 2 and 5.
    v.col(0).setZero();
    v(2, 0) = v(5, 0) = 1.0 / std::sqrt(2.0);
    v.col(2).setZero();
    v(0, 2) = 1.0;
    v.col(5).setZero();
    v(2, 5) = -1.0 / std::sqrt(2.0);
    v(5, 5) = 1.0 / std::sqrt(2.0);
    const auto r = report_with(PolynomialKind::P2, {7.0, 0.0, 0.0, 0.0, 0.0, 0.0}, {0});
    EXPECT_EQ(locate(r, v).loc, 2u);
}

TEST(Locate, P1UsesMagnitudes) {
    const Matrix v = Matrix::Identity(3, 3);
    const auto r = report_with(PolynomialKind::P1, {-3.0, 0.0, 1.0}, {0, 2});
    const auto loc = locate(r, v);
    EXPECT_DOUBLE_EQ(loc.indicator[0], 0.75);
    EXPECT_EQ(loc.loc, 0u);
}

TEST(Locate, PermutationEquivariance) {
    const auto w = simulate(build_model(12, 1, 0.0), 40,
                            {{EventKind::Step, 4, 20, 39, 8.0}}, 2);
    const auto s0 = sample_covariance(preprocess(simulate(build_model(12, 1, 0.0), 40, {}, 3),
                                                 kDefaultEta, 1));
    const auto s1 = sample_covariance(preprocess(w, kDefaultEta, 2));
    SpectralDensity asd;
    asd.grid = {0.0, 1.0};
    asd.values = {1.0, 1.0};
    asd.support_intervals = {{0.0, 0.5}};
    Matrix v;
    const auto r = detect(PolynomialKind::P2, s0, s1, asd, 0.1, &v);
    const auto base = locate(r, v);

    Eigen::PermutationMatrix<Eigen::Dynamic> perm(12);
    for (int i = 0; i < 12; ++i) perm.indices()[i] = (i * 5) % 12;
    SampleCovariance p0{perm * s0.matrix * perm.transpose(), 40};
    SampleCovariance p1{perm * s1.matrix * perm.transpose(), 40};
    Matrix pv;
    const auto pr = detect(PolynomialKind::P2, p0, p1, asd, 0.1, &pv);
    const auto permuted = locate(pr, pv);
    for (int i = 0; i < 12; ++i)
        EXPECT_NEAR(permuted.indicator[std::size_t(perm.indices()[i])], base.indicator[std::size_t(i)],
                    1e-9);
    EXPECT_EQ(permuted.loc, std::size_t(perm.indices()[Eigen::Index(base.loc)]));
}

TEST(Locate, Preconditions) {
    const Matrix v = Matrix::Identity(3, 3);
    EXPECT_THROW(locate(report_with(PolynomialKind::P2, {0.0, 0.0, 0.0}, {}), v), PreconditionError);
    EXPECT_THROW(locate(report_with(PolynomialKind::P2, {-2.0, 0.0, 2.0}, {0, 2}), v),
                 PreconditionError);
    const auto ok = report_with(PolynomialKind::P2, {0.0, 0.0, 2.0}, {2});
    EXPECT_THROW(locate(ok, Matrix::Identity(4, 4)), InvalidArgument);
    EXPECT_THROW(locate(ok, 2.0 * v), InvalidArgument);
}

TEST(Components, BasisVectorIsMaximallyLocalized) {
    const Matrix v = Matrix::Identity(100, 100);
    const auto d = eigenvector_component_distribution(v, {0});
    EXPECT_EQ(d.components.size(), 100u);
    EXPECT_NEAR(d.components[0], 10.0, 1e-12);  // scaled to norm sqrt(N)
    EXPECT_GT(d.ks, 0.45);
}

TEST(Components, RandomOrthogonalIsGaussian) {
    const auto x = sample_gaussian_matrix(200, 200, 4);
    const Eigen::HouseholderQR<Matrix> qr(x.data());
    const Matrix q = qr.householderQ();
    std::vector<std::size_t> all(200);
    std::iota(all.begin(), all.end(), std::size_t{0});
    EXPECT_LT(eigenvector_component_distribution(q, all).ks, 0.02);
    EXPECT_THROW(eigenvector_component_distribution(q, {}), InvalidArgument);
    EXPECT_THROW(eigenvector_component_distribution(q, {200}), InvalidArgument);
}

TEST(LimBaseline, FindsDifferingChannel) {
    Matrix a = sample_gaussian_matrix(6, 20, 1).data();
    Matrix b = a;
    b.row(3).array() += 5.0;
    const auto r = lim_baseline(MeasurementWindow(a), MeasurementWindow(b));
    EXPECT_EQ(r.loc, 3u);
    EXPECT_NEAR(r.indicator[3], 1.0, 1e-12);
}

TEST(LimBaseline, ZeroDifferenceIsUniform) {
    const auto a = sample_gaussian_matrix(4, 8, 1);
    const auto r = lim_baseline(a, a);
    EXPECT_EQ(r.loc, 0u);
    for (double l : r.indicator) EXPECT_DOUBLE_EQ(l, 0.25);
    EXPECT_THROW(lim_baseline(a, sample_gaussian_matrix(4, 9, 1)), InvalidArgument);
}

TEST(Series, TracksEventOnset) {
    const auto model = build_model(40, 3, 0.2);
    const auto reference = simulate(model, 80, {}, 1);
    const auto stream = simulate(model, 240, {{EventKind::Step, 7, 200, 239, 20.0}}, 2);
    const MpParams p{0.5, 1.0};
    const auto asd = compute_asd(PolynomialKind::P2, p, p, default_grid(PolynomialKind::P2, p, p, 512));
    SeriesOptions options;
    options.stride = 20;
    const auto series = locate_series(reference, stream, asd, options);
    ASSERT_EQ(series.size(), 9u);
    EXPECT_EQ(series.front().t_index, 79);
    EXPECT_EQ(series.back().t_index, 239);
    EXPECT_EQ(series.front().outlier_count, 0u);
    EXPECT_FALSE(series.front().loc.has_value());
    ASSERT_TRUE(series.back().loc.has_value());
    EXPECT_EQ(*series.back().loc, 7u);
    const auto j = to_json(series.front());
    EXPECT_TRUE(j["loc"].is_null());
    options.stride = 0;
    EXPECT_THROW(locate_series(reference, stream, asd, options), InvalidArgument);
}
