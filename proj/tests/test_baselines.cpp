#include <random>
#include <set>

#include <gtest/gtest.h>

#include "mggp/baselines.hpp"

using namespace mggp;

namespace {

Dataset synthetic(std::uint64_t seed, Eigen::Index n = 192, double noise = 0.01) {
    Rng rng(seed);
    return synth_generate(rng, n, noise);
}

double train_rmse(const Dataset& d, BaselineKind k) { return fit_baseline(d, k).second.rmse; }

} // namespace

TEST(Design, ShapesAndIntercept) {
    const Dataset d = synthetic(1, 40);
    const int expect[4] = {7, 22, 13, 28};
    for (std::size_t i = 0; i < kAllBaselines.size(); ++i) {
        const auto m = build_design(d, kAllBaselines[i]);
        EXPECT_EQ(m.rows(), 40);
        EXPECT_EQ(m.cols(), expect[i]);
        EXPECT_EQ(term_count(kAllBaselines[i]), expect[i]);
        EXPECT_TRUE((m.col(0).array() == 1.0).all());
    }
}

TEST(Design, ColumnOrder) {
    Eigen::MatrixXd x(1, kInputCount);
    x << 2, 3, 5, 7, 11, 13;
    const auto m = build_design(x, BaselineKind::Quadratic);
    EXPECT_EQ(m(0, 1), 2);
    EXPECT_EQ(m(0, 6), 13);
    EXPECT_EQ(m(0, 7), 2 * 3);   // x1x2
    EXPECT_EQ(m(0, 11), 2 * 13); // x1x6
    EXPECT_EQ(m(0, 12), 3 * 5);  // x2x3
    EXPECT_EQ(m(0, 21), 11 * 13); // x5x6
    EXPECT_EQ(m(0, 22), 4);      // x1^2
    EXPECT_EQ(m(0, 27), 169);    // x6^2
    const auto pq = build_design(x, BaselineKind::PureQuadratic);
    EXPECT_EQ(pq(0, 7), 4);
    const auto labels = baseline_terms(BaselineKind::Interactions);
    EXPECT_EQ(term_label(labels[7]), "x1x2");
    EXPECT_EQ(term_label(baseline_terms(BaselineKind::Quadratic)[27]), "x6^2");
    std::set<std::string> distinct;
    for (const auto& t : baseline_terms(BaselineKind::Quadratic)) distinct.insert(term_label(t));
    EXPECT_EQ(distinct.size(), 28u);
}

TEST(Fit, ExactLinearModel) {
    Dataset d = synthetic(2);
    for (Eigen::Index r = 0; r < d.rows(); ++r) (*d.target)(r) = 3 + 2 * d.inputs(r, 0) - d.inputs(r, 1);
    const auto [model, metrics] = fit_baseline(d, BaselineKind::Linear);
    const double expect[7] = {3, 2, -1, 0, 0, 0, 0};
    ASSERT_EQ(model.coefficients.size(), 7);
    for (int i = 0; i < 7; ++i) EXPECT_NEAR(model.coefficients(i), expect[i], 1e-8) << i;
    EXPECT_GE(metrics.r2, 1 - 1e-12);
}

TEST(Fit, ExactInteraction) {
    Dataset d = synthetic(3);
    for (Eigen::Index r = 0; r < d.rows(); ++r) (*d.target)(r) = 1 + d.inputs(r, 0) * d.inputs(r, 1);
    EXPECT_LE(train_rmse(d, BaselineKind::Quadratic), 1e-8);
}

TEST(Fit, NeedsMoreRowsThanTerms) {
    EXPECT_THROW(fit_baseline(synthetic(4, 28), BaselineKind::Quadratic), Error);
    EXPECT_NO_THROW(fit_baseline(synthetic(4, 29), BaselineKind::Quadratic));
}

TEST(Predict, ZeroAndInterceptOnly) {
    const Dataset d = synthetic(5, 30);
    BaselineModel m;
    m.kind = BaselineKind::Interactions;
    m.coefficients = Eigen::VectorXd::Zero(22);
    EXPECT_TRUE((predict_baseline(m, d).array() == 0.0).all());
    m.coefficients(0) = 0.42;
    EXPECT_TRUE((predict_baseline(m, d).array() == 0.42).all());
}

TEST(Predict, MatchesFitTimeValues) {
    const Dataset d = synthetic(6);
    for (auto k : kAllBaselines) {
        const auto [model, metrics] = fit_baseline(d, k);
        const auto yhat = predict_baseline(model, d);
        EXPECT_NEAR(rmse(d.y(), yhat), metrics.rmse, 1e-12);
    }
}

TEST(Nesting, LargerSpanNeverFitsWorse) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const Dataset d = synthetic(100 + seed, 60 + static_cast<Eigen::Index>(seed % 5) * 40, 0.02);
        const double lin = train_rmse(d, BaselineKind::Linear);
        const double inter = train_rmse(d, BaselineKind::Interactions);
        const double pure = train_rmse(d, BaselineKind::PureQuadratic);
        const double quad = train_rmse(d, BaselineKind::Quadratic);
        EXPECT_LE(quad, inter);
        EXPECT_LE(quad, pure);
        EXPECT_LE(inter, lin);
        EXPECT_LE(pure, lin);
    }
}

TEST(NoiseFloor, QuadraticTruthRecoversSigma) {
    const double sigma = 0.01;
    Dataset d = synthetic(7, 2000, 0.0);
    Rng rng(77);
    std::normal_distribution<double> noise(0.0, sigma);
    for (Eigen::Index r = 0; r < d.rows(); ++r) {
        const auto x = d.inputs.row(r);
        (*d.target)(r) = 0.3 + 0.01 * x(0) - 0.2 * x(4) * x(5) + 0.4 * x(4) * x(4) + 1e-4 * x(2) + noise(rng);
    }
    const double e = train_rmse(d, BaselineKind::Quadratic);
    EXPECT_GE(e, 0.8 * sigma);
    EXPECT_LE(e, 1.05 * sigma);
}

TEST(Report, FourRowsWithOptionalHoldout) {
    const Dataset a = synthetic(8), b = synthetic(9, 50);
    const auto rows = baseline_report(a, &b);
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(baseline_name(rows[2].kind), "Pure quadratic");
    for (const auto& r : rows) EXPECT_TRUE(r.holdout);
    EXPECT_FALSE(baseline_report(a)[0].holdout);
}
