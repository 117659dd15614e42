// The OpenMP kernels must reproduce their serial references exactly.

#include <gtest/gtest.h>
#include <omp.h>

#include "freespec/error.hpp"
#include "freespec/freeprob.hpp"
#include "freespec/sweep.hpp"

using namespace freespec;

namespace {

class Threads : public ::testing::Test {
protected:
    void SetUp() override {
        saved_ = omp_get_max_threads();
        omp_set_num_threads(4);  // exercise the parallel path even on one core
    }
    void TearDown() override { omp_set_num_threads(saved_); }
    int saved_ = 1;
};

}  // namespace

TEST_F(Threads, SweepMatchesSerial) {
    std::vector<Complex> points;
    for (int i = 0; i < 257; ++i) points.emplace_back(-3.0 + 0.025 * i, 1e-3);
    const MpParams p{0.6, 1.0};
    const auto fn = [&](Complex z) { return cauchy_mp(p, z); };
    const auto a = sweep_parallel(points, fn);
    const auto b = sweep_serial(points, fn);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].value, b[i].value);
        EXPECT_EQ(a[i].status, b[i].status);
    }
}

TEST_F(Threads, SweepMarksIllConditionedPoints) {
    const std::vector<Complex> points{{1.0, 1.0}, {2.0, 1.0}, {3.0, 1.0}};
    const auto fn = [](Complex z) -> Complex {
        if (z.real() == 2.0) throw ConditioningError(1e20, "test");
        return z;
    };
    for (const auto& r : {sweep_parallel(points, fn), sweep_serial(points, fn)}) {
        EXPECT_EQ(r[0].status, PointStatus::Ok);
        EXPECT_EQ(r[1].status, PointStatus::IllConditioned);
        EXPECT_EQ(r[2].value, points[2]);
    }
}

TEST_F(Threads, SweepPropagatesOtherErrors) {
    const std::vector<Complex> points{{1.0, 1.0}, {2.0, 1.0}};
    const auto fn = [](Complex z) -> Complex {
        if (z.real() == 2.0) throw NonConvergenceError(1.0, 5, "test");
        return z;
    };
    EXPECT_THROW(sweep_parallel(points, fn), NonConvergenceError);
    EXPECT_THROW(sweep_serial(points, fn), NonConvergenceError);
}

TEST_F(Threads, EsdMatchesSerial) {
    const auto x = sample_gaussian_matrix(40, 50, 3);
    EXPECT_EQ(esd_eigenvalues(x, 7, kDefaultEta, 11), esd_eigenvalues_serial(x, 7, kDefaultEta, 11));
}

TEST_F(Threads, AsdIndependentOfThreadCount) {
    const MpParams p{1.0, 1.0};
    const auto grid = uniform_grid(-4.0, 4.0, 97);
    const auto a = asd_p1(p, p, grid);
    omp_set_num_threads(1);
    const auto b = asd_p1(p, p, grid);
    EXPECT_EQ(a.values, b.values);
    EXPECT_EQ(a.support_intervals, b.support_intervals);
}
