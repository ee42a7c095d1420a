#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mggp {

struct ParetoPoint {
    std::size_t id = 0;
    double fitness = 0.0; // lower is better
    int complexity = 0;   // lower is better

    friend bool operator==(const ParetoPoint&, const ParetoPoint&) = default;
};

/// Weak dominance on both objectives with a strict improvement on at least one.
inline bool dominates(const ParetoPoint& p, const ParetoPoint& q) noexcept {
    return p.fitness <= q.fitness && p.complexity <= q.complexity &&
           (p.fitness < q.fitness || p.complexity < q.complexity);
}

/// Non-dominated subset, sorted by complexity then fitness (then id).
/// Points with non-finite fitness are dropped; equal pairs are all kept.
inline std::vector<ParetoPoint> pareto_front(std::vector<ParetoPoint> points) {
    std::erase_if(points, [](const ParetoPoint& p) { return !std::isfinite(p.fitness); });
    std::sort(points.begin(), points.end(), [](const ParetoPoint& a, const ParetoPoint& b) {
        if (a.fitness != b.fitness) return a.fitness < b.fitness;
        if (a.complexity != b.complexity) return a.complexity < b.complexity;
        return a.id < b.id;
    });

    // Any dominator of q sorts strictly before q's (fitness, complexity) group,
    // so q survives iff every earlier group is more complex.
    std::vector<ParetoPoint> front;
    int best_complexity = std::numeric_limits<int>::max();
    for (std::size_t i = 0; i < points.size();) {
        std::size_t j = i;
        while (j < points.size() && points[j].fitness == points[i].fitness && points[j].complexity == points[i].complexity) ++j;
        if (points[i].complexity < best_complexity) {
            front.insert(front.end(), points.begin() + static_cast<std::ptrdiff_t>(i), points.begin() + static_cast<std::ptrdiff_t>(j));
            best_complexity = points[i].complexity;
        }
        i = j;
    }

    std::sort(front.begin(), front.end(), [](const ParetoPoint& a, const ParetoPoint& b) {
        if (a.complexity != b.complexity) return a.complexity < b.complexity;
        if (a.fitness != b.fitness) return a.fitness < b.fitness;
        return a.id < b.id;
    });
    return front;
}

struct FrontTags {
    std::size_t a = 0; // index into the front: lowest fitness
    std::size_t c = 0; // lowest complexity
    std::optional<std::size_t> b; // knee
};

/// Representative members of a front sorted by pareto_front. The knee is the
/// member farthest from the chord joining the extremes, with both axes
/// normalized to [0, 1] over the front.
inline std::optional<FrontTags> tag_front(const std::vector<ParetoPoint>& front) {
    if (front.empty()) return std::nullopt;
    FrontTags t;
    t.c = 0;
    t.a = 0;
    for (std::size_t i = 1; i < front.size(); ++i) {
        if (front[i].fitness < front[t.a].fitness) t.a = i;
    }
    if (front.size() < 3) return t;

    const double f_lo = front[t.a].fitness, f_hi = front[t.c].fitness;
    const double c_lo = front[t.c].complexity, c_hi = front[t.a].complexity;
    const double f_span = f_hi - f_lo, c_span = c_hi - c_lo;
    if (!(f_span > 0.0) || !(c_span > 0.0)) return t;

    auto norm = [&](const ParetoPoint& p) {
        return std::pair{(p.complexity - c_lo) / c_span, (p.fitness - f_lo) / f_span};
    };
    const auto [ax, ay] = norm(front[t.a]);
    const auto [cx, cy] = norm(front[t.c]);
    const double dx = ax - cx, dy = ay - cy;
    const double len = std::hypot(dx, dy);

    double best = 0.0;
    for (std::size_t i = 0; i < front.size(); ++i) {
        if (i == t.a || i == t.c) continue;
        const auto [px, py] = norm(front[i]);
        const double dist = std::abs(dx * (cy - py) - (cx - px) * dy) / len;
        if (dist > best) {
            best = dist;
            t.b = i;
        }
    }
    return t;
}

} // namespace mggp
