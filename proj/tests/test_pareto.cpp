#include <algorithm>
#include <limits>

#include <gtest/gtest.h>

#include "mggp/pareto.hpp"
#include "mggp/rng.hpp"
#include "support/oracles.hpp"

using namespace mggp;

namespace {

ParetoPoint pt(std::size_t id, double f, int c) { return {id, f, c}; }

std::vector<ParetoPoint> random_points(Rng& rng, std::size_t n, bool coarse) {
    std::vector<ParetoPoint> pts;
    for (std::size_t i = 0; i < n; ++i) {
        const double f = coarse ? static_cast<double>(uniform_index(rng, 10)) : uniform_real(rng, 0, 1);
        const int c = static_cast<int>(1 + uniform_index(rng, coarse ? 10 : 200));
        pts.push_back(pt(i, f, c));
    }
    return pts;
}

} // namespace

TEST(Dominance, Examples) {
    EXPECT_TRUE(dominates(pt(0, 1, 1), pt(1, 2, 2)));
    EXPECT_FALSE(dominates(pt(0, 1, 2), pt(1, 2, 1)));
    EXPECT_FALSE(dominates(pt(1, 2, 1), pt(0, 1, 2)));
    EXPECT_FALSE(dominates(pt(0, 1, 1), pt(1, 1, 1)));
    EXPECT_TRUE(dominates(pt(0, 1, 1), pt(1, 1, 2)));
}

TEST(Front, Example) {
    const auto front = pareto_front({pt(0, 1, 3), pt(1, 2, 2), pt(2, 3, 1), pt(3, 3, 3)});
    ASSERT_EQ(front.size(), 3u);
    EXPECT_EQ(front[0], pt(2, 3, 1));
    EXPECT_EQ(front[1], pt(1, 2, 2));
    EXPECT_EQ(front[2], pt(0, 1, 3));
}

TEST(Front, SingletonEmptyAndIdentical) {
    EXPECT_TRUE(pareto_front({}).empty());
    EXPECT_EQ(pareto_front({pt(4, 0.5, 9)}).size(), 1u);
    EXPECT_EQ(pareto_front({pt(0, 0.5, 9), pt(1, 0.5, 9), pt(2, 0.5, 9)}).size(), 3u);
}

TEST(Front, NonFiniteExcluded) {
    const double inf = std::numeric_limits<double>::infinity();
    const auto front = pareto_front({pt(0, inf, 1), pt(1, 0.4, 5), pt(2, std::nan(""), 1)});
    ASSERT_EQ(front.size(), 1u);
    EXPECT_EQ(front[0].id, 1u);
}

TEST(Front, MatchesBruteForce) {
    Rng rng(1);
    for (int rep = 0; rep < 1000; ++rep) {
        const auto pts = random_points(rng, uniform_index(rng, 501), rep % 2 == 0);
        ASSERT_EQ(pareto_front(pts), oracle::brute_force_front(pts)) << "set " << rep;
    }
}

TEST(Front, AntichainAndCoverage) {
    Rng rng(2);
    for (int rep = 0; rep < 100; ++rep) {
        const auto pts = random_points(rng, 200, rep % 2 == 1);
        const auto front = pareto_front(pts);
        for (const auto& p : front)
            for (const auto& q : front) EXPECT_FALSE(dominates(p, q));
        for (const auto& q : pts) {
            if (std::find(front.begin(), front.end(), q) != front.end()) continue;
            EXPECT_TRUE(std::any_of(front.begin(), front.end(), [&](const ParetoPoint& p) { return dominates(p, q); }));
        }
    }
}

TEST(Tags, ExtremesAndKnee) {
    // Sorted by complexity: (0.9,1) (0.3,2) (0.25,6) (0.2,10)
    const std::vector<ParetoPoint> front = {pt(0, 0.9, 1), pt(1, 0.3, 2), pt(2, 0.25, 6), pt(3, 0.2, 10)};
    const auto t = tag_front(front);
    ASSERT_TRUE(t);
    EXPECT_EQ(t->c, 0u);
    EXPECT_EQ(t->a, 3u);
    ASSERT_TRUE(t->b);
    EXPECT_EQ(*t->b, 1u);
}

TEST(Tags, SmallFronts) {
    EXPECT_FALSE(tag_front({}));
    const auto one = tag_front({pt(0, 0.5, 3)});
    ASSERT_TRUE(one);
    EXPECT_EQ(one->a, 0u);
    EXPECT_EQ(one->c, 0u);
    EXPECT_FALSE(one->b);
    const auto two = tag_front({pt(0, 0.5, 3), pt(1, 0.1, 8)});
    EXPECT_EQ(two->a, 1u);
    EXPECT_FALSE(two->b);
}
