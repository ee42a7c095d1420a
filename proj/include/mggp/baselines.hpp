#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mggp/dataio.hpp"
#include "mggp/fitting.hpp"

namespace mggp {

enum class BaselineKind { Linear, Interactions, PureQuadratic, Quadratic };

inline constexpr std::array<BaselineKind, 4> kAllBaselines = {
    BaselineKind::Linear, BaselineKind::Interactions, BaselineKind::PureQuadratic, BaselineKind::Quadratic};

inline constexpr std::string_view baseline_name(BaselineKind k) {
    switch (k) {
    case BaselineKind::Linear: return "Linear";
    case BaselineKind::Interactions: return "Interactions";
    case BaselineKind::PureQuadratic: return "Pure quadratic";
    case BaselineKind::Quadratic: return "Quadratic";
    }
    return "?";
}

inline constexpr std::string_view baseline_characteristics(BaselineKind k) {
    switch (k) {
    case BaselineKind::Linear: return "intercept and linear terms";
    case BaselineKind::Interactions: return "intercept, linear terms and all products of pairs of distinct predictors";
    case BaselineKind::PureQuadratic: return "intercept, linear terms, and squared terms";
    case BaselineKind::Quadratic: return "intercept, linear terms, interactions, and squared terms";
    }
    return "?";
}

constexpr bool has_interactions(BaselineKind k) { return k == BaselineKind::Interactions || k == BaselineKind::Quadratic; }
constexpr bool has_squares(BaselineKind k) { return k == BaselineKind::PureQuadratic || k == BaselineKind::Quadratic; }

constexpr int term_count(BaselineKind k) {
    return 1 + kInputCount + (has_interactions(k) ? kInputCount * (kInputCount - 1) / 2 : 0) + (has_squares(k) ? kInputCount : 0);
}

/// Input indices of one design term; an empty list is the intercept.
using Term = std::vector<int>;

/// Terms in column order: intercept, x1..x6, pairs (i < j) lexicographically, squares.
inline std::vector<Term> baseline_terms(BaselineKind k) {
    std::vector<Term> terms{{}};
    for (int i = 0; i < kInputCount; ++i) terms.push_back({i});
    if (has_interactions(k)) {
        for (int i = 0; i < kInputCount; ++i)
            for (int j = i + 1; j < kInputCount; ++j) terms.push_back({i, j});
    }
    if (has_squares(k)) {
        for (int i = 0; i < kInputCount; ++i) terms.push_back({i, i});
    }
    return terms;
}

inline std::string term_label(const Term& t) {
    if (t.empty()) return "1";
    if (t.size() == 2 && t[0] == t[1]) return "x" + std::to_string(t[0] + 1) + "^2";
    std::string s;
    for (int v : t) s += "x" + std::to_string(v + 1);
    return s;
}

inline Eigen::MatrixXd build_design(const Eigen::MatrixXd& inputs, BaselineKind k) {
    const auto terms = baseline_terms(k);
    Eigen::MatrixXd m(inputs.rows(), static_cast<Eigen::Index>(terms.size()));
    for (std::size_t c = 0; c < terms.size(); ++c) {
        Eigen::VectorXd col = Eigen::VectorXd::Ones(inputs.rows());
        for (int v : terms[c]) col.array() *= inputs.col(v).array();
        m.col(static_cast<Eigen::Index>(c)) = col;
    }
    return m;
}

inline Eigen::MatrixXd build_design(const Dataset& d, BaselineKind k) { return build_design(d.inputs, k); }

struct BaselineModel {
    BaselineKind kind = BaselineKind::Linear;
    Eigen::VectorXd coefficients; // one per term, in baseline_terms order
    std::vector<std::string> term_labels;
};

inline Eigen::VectorXd predict_baseline(const BaselineModel& m, const Dataset& d) {
    return build_design(d, m.kind) * m.coefficients;
}

/// Least-squares fit on unscaled inputs; metrics on the same data.
inline std::pair<BaselineModel, FitMetrics> fit_baseline(const Dataset& d, BaselineKind k) {
    if (d.rows() <= term_count(k)) throw Error("fit_baseline: need more rows than terms");
    const Eigen::MatrixXd design = build_design(d, k);
    const WeightVector w = least_squares(design, d.y());

    BaselineModel m;
    m.kind = k;
    m.coefficients = w.stacked();
    for (const auto& t : baseline_terms(k)) m.term_labels.push_back(term_label(t));
    const Eigen::VectorXd fitted = design * m.coefficients;
    return {std::move(m), fit_metrics(d.y(), fitted)};
}

struct BaselineRow {
    BaselineKind kind;
    FitMetrics train;
    std::optional<FitMetrics> holdout;
};

/// All four families fitted on `train`, optionally scored on `holdout`.
inline std::vector<BaselineRow> baseline_report(const Dataset& train, const Dataset* holdout = nullptr) {
    std::vector<BaselineRow> rows;
    for (auto k : kAllBaselines) {
        auto [model, metrics] = fit_baseline(train, k);
        BaselineRow row{k, metrics, std::nullopt};
        if (holdout && holdout->has_target()) row.holdout = fit_metrics(holdout->y(), predict_baseline(model, *holdout));
        rows.push_back(row);
    }
    return rows;
}

} // namespace mggp
