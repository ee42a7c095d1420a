#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "mggp/fitting.hpp"
#include "mggp/rng.hpp"
#include "support/oracles.hpp"

using namespace mggp;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using oracle::jacobi_pinv;

namespace {

MatrixXd design_with_ones(const MatrixXd& cols) {
    MatrixXd d(cols.rows(), cols.cols() + 1);
    d.col(0).setOnes();
    d.rightCols(cols.cols()) = cols;
    return d;
}

VectorXd fitted(const MatrixXd& d, const WeightVector& w) { return d * w.stacked(); }

} // namespace

TEST(LeastSquares, ExactLine) {
    MatrixXd g(3, 1);
    g << 0, 1, 2;
    VectorXd y(3);
    y << 1, 3, 5;
    const auto w = least_squares(design_with_ones(g), y);
    EXPECT_NEAR(w.w0, 1.0, 1e-10);
    EXPECT_NEAR(w.w(0), 2.0, 1e-10);
}

TEST(LeastSquares, InterceptOnlyIsMean) {
    const MatrixXd d = MatrixXd::Ones(5, 1);
    VectorXd y(5);
    y << 1, 2, 3, 4, 10;
    const auto w = least_squares(d, y);
    EXPECT_NEAR(w.w0, 4.0, 1e-12);
    EXPECT_EQ(w.size(), 0);
}

TEST(LeastSquares, DuplicateColumnsGetMinimumNorm) {
    MatrixXd g(4, 2);
    g << 0, 0, 1, 1, 2, 2, 3, 3;
    VectorXd y(4);
    y << 0, 2, 4, 6;
    const MatrixXd d = design_with_ones(g);
    const auto w = least_squares(d, y);
    EXPECT_NEAR(w.w0, 0.0, 1e-10);
    EXPECT_NEAR(w.w(0), 1.0, 1e-10);
    EXPECT_NEAR(w.w(1), 1.0, 1e-10);
    const VectorXd oracle = jacobi_pinv(d) * y;
    EXPECT_LT((w.stacked() - oracle).norm(), 1e-10);
}

TEST(LeastSquares, AgreesWithJacobiPseudoInverse) {
    Rng rng(20);
    for (int rep = 0; rep < 200; ++rep) {
        const auto n = static_cast<Eigen::Index>(1 + uniform_index(rng, 50));
        const auto t = static_cast<Eigen::Index>(uniform_index(rng, 11));
        MatrixXd g(n, t);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < t; ++j) g(i, j) = uniform_real(rng, -3, 3);
        // Every fourth system gets an exactly repeated or scaled column.
        if (t >= 2 && rep % 4 == 0) g.col(t - 1) = 2.5 * g.col(0);
        VectorXd y(n);
        for (Eigen::Index i = 0; i < n; ++i) y(i) = uniform_real(rng, -5, 5);
        const MatrixXd d = design_with_ones(g);
        const auto w = least_squares(d, y);
        const VectorXd oracle = jacobi_pinv(d) * y;
        const double scale = std::max(1.0, (d * oracle).norm());
        EXPECT_LT((fitted(d, w) - d * oracle).norm() / scale, 1e-8) << "rep " << rep << " n " << n << " t " << t;
        if (n > t + 1 && rep % 4 != 0) {
            // Full column rank: the coefficients themselves are unique.
            EXPECT_LT((w.stacked() - oracle).norm() / std::max(1.0, oracle.norm()), 1e-7) << "rep " << rep;
        }
    }
}

TEST(LeastSquares, MatchesNormalEquationsWhenWellConditioned) {
    Rng rng(21);
    for (int rep = 0; rep < 200; ++rep) {
        const auto t = static_cast<Eigen::Index>(uniform_index(rng, 8));
        const Eigen::Index n = 20 + static_cast<Eigen::Index>(uniform_index(rng, 40));
        MatrixXd g(n, t);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < t; ++j) g(i, j) = uniform_real(rng, -1, 1);
        VectorXd y(n);
        for (Eigen::Index i = 0; i < n; ++i) y(i) = uniform_real(rng, -1, 1);
        const MatrixXd d = design_with_ones(g);
        const VectorXd normal = (d.transpose() * d).ldlt().solve(d.transpose() * y);
        EXPECT_LT((least_squares(d, y).stacked() - normal).norm(), 1e-9);
    }
}

TEST(LeastSquares, ResidualIsLocallyOptimal) {
    Rng rng(22);
    MatrixXd g(60, 3);
    for (Eigen::Index i = 0; i < g.rows(); ++i)
        for (Eigen::Index j = 0; j < 3; ++j) g(i, j) = uniform_real(rng, -2, 2);
    VectorXd y(60);
    for (Eigen::Index i = 0; i < 60; ++i) y(i) = std::sin(g(i, 0)) + g(i, 1) * g(i, 2);
    const MatrixXd d = design_with_ones(g);
    const VectorXd best = least_squares(d, y).stacked();
    const double base = (d * best - y).squaredNorm();
    for (int k = 0; k < 200; ++k) {
        VectorXd probe = best;
        for (Eigen::Index j = 0; j < probe.size(); ++j) probe(j) += uniform_real(rng, -1e-3, 1e-3);
        EXPECT_GE((d * probe - y).squaredNorm(), base - 1e-12);
    }
}

TEST(LeastSquares, RejectsNonFiniteAndMismatchedInput) {
    MatrixXd d = MatrixXd::Ones(3, 2);
    d(1, 1) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(least_squares(d, VectorXd::Ones(3)), IllConditioned);
    EXPECT_THROW(least_squares(MatrixXd::Ones(3, 2), VectorXd::Ones(4)), std::invalid_argument);
}

TEST(Metrics, RmseExamples) {
    VectorXd y(3), yhat(3);
    y << 1, 2, 3;
    EXPECT_EQ(rmse(y, y), 0.0);
    yhat << 2, 3, 4;
    EXPECT_NEAR(rmse(y, yhat), 1.0, 1e-15);
}

TEST(Metrics, RSquaredExamples) {
    VectorXd y(3);
    y << 1, 2, 3;
    EXPECT_NEAR(r_squared(y, y), 1.0, 1e-15);
    EXPECT_NEAR(r_squared(y, VectorXd::Constant(3, 2.0)), 0.0, 1e-15);
    EXPECT_THROW(r_squared(VectorXd::Constant(3, 4.0), y), DegenerateTarget);
}

TEST(Metrics, RmseAndRSquaredAreConsistent) {
    Rng rng(23);
    for (int rep = 0; rep < 100; ++rep) {
        const Eigen::Index n = 5 + static_cast<Eigen::Index>(uniform_index(rng, 100));
        VectorXd y(n), yhat(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            y(i) = uniform_real(rng, -3, 3);
            yhat(i) = y(i) + uniform_real(rng, -1, 1);
        }
        const double var = (y.array() - y.mean()).square().sum() / static_cast<double>(n);
        const auto m = fit_metrics(y, yhat);
        EXPECT_NEAR(m.r2, 1 - m.rmse * m.rmse / var, 1e-12);
    }
}
