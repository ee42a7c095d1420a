#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

#include "mggp/error.hpp"

namespace mggp {

/// Bias plus one weight per gene column.
struct WeightVector {
    double w0 = 0.0;
    Eigen::VectorXd w;

    Eigen::Index size() const noexcept { return w.size(); }

    /// Coefficients in design-column order: [w0, w1, ..., wT].
    Eigen::VectorXd stacked() const {
        Eigen::VectorXd c(w.size() + 1);
        c(0) = w0;
        c.tail(w.size()) = w;
        return c;
    }
};

struct FitMetrics {
    double rmse = 0.0;
    double r2 = 0.0;
};

/// Relative rank tolerance applied to the pivoted orthogonal factorization.
inline double rank_tolerance(Eigen::Index rows, Eigen::Index cols) {
    return static_cast<double>(std::max(rows, cols)) * std::numeric_limits<double>::epsilon();
}

/// Minimum-norm least-squares weights for `design` (n x (T+1), leading column
/// of ones) against `y`. Rank deficiency is resolved by a complete orthogonal
/// decomposition; columns whose pivot falls below
/// max(n, T+1) * eps * (largest column norm) are treated as dependent.
/// Throws IllConditioned when the solution is not finite.
inline WeightVector least_squares(const Eigen::MatrixXd& design, const Eigen::VectorXd& y) {
    if (design.rows() < 1 || design.cols() < 1) throw std::invalid_argument("least_squares: empty design");
    if (design.rows() != y.size()) throw std::invalid_argument("least_squares: row count mismatch");
    if (!design.allFinite() || !y.allFinite()) throw IllConditioned("least_squares: non-finite input");

    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
    cod.setThreshold(rank_tolerance(design.rows(), design.cols()));
    cod.compute(design);
    const Eigen::VectorXd coef = cod.solve(y);
    if (!coef.allFinite()) throw IllConditioned("least_squares: non-finite weights");

    WeightVector out;
    out.w0 = coef(0);
    out.w = coef.tail(coef.size() - 1);
    return out;
}

inline double rmse(const Eigen::VectorXd& y, const Eigen::VectorXd& yhat) {
    if (y.size() != yhat.size() || y.size() < 1) throw std::invalid_argument("rmse: length mismatch");
    return std::sqrt((y - yhat).squaredNorm() / static_cast<double>(y.size()));
}

/// Coefficient of determination, 1 - SS_res / SS_tot, with the mean taken over `y` itself.
inline double r_squared(const Eigen::VectorXd& y, const Eigen::VectorXd& yhat) {
    if (y.size() != yhat.size() || y.size() < 2) throw std::invalid_argument("r_squared: need equal lengths >= 2");
    const double mean = y.mean();
    const double ss_tot = (y.array() - mean).square().sum();
    if (ss_tot == 0.0) throw DegenerateTarget("r_squared: target has zero variance");
    return 1.0 - (y - yhat).squaredNorm() / ss_tot;
}

inline FitMetrics fit_metrics(const Eigen::VectorXd& y, const Eigen::VectorXd& yhat) {
    return {rmse(y, yhat), r_squared(y, yhat)};
}

} // namespace mggp
