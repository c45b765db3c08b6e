#include <gtest/gtest.h>

#include "support.hpp"

using namespace partscape;
using partscape::testing::optimal_kcenter_radius;
using partscape::testing::scratch_dir;

namespace {

DistanceMatrix line_matrix(const std::vector<double>& xs) {
    Matrix m(xs.size(), xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = 0; j < xs.size(); ++j) m(i, j) = std::abs(xs[i] - xs[j]);
    return DistanceMatrix(std::move(m), "line");
}

DistanceMatrix random_metric(std::size_t m, Rng& rng) {
    Matrix pts(m, 2);
    for (double& v : pts.data()) v = rng.uniform() * 10;
    return partscape::testing::euclidean_matrix(pts);
}

}  // namespace

TEST(Gonzalez, LineExample) {
    const auto d = line_matrix({0, 1, 10});
    const auto g = gonzalez_kcenter(d, 2, 0);
    EXPECT_EQ(g.representatives, (std::vector<std::size_t>{0, 2}));
    EXPECT_EQ(g.assignment, (std::vector<std::size_t>{0, 0, 2}));
    EXPECT_EQ(g.radius(), 1.0);
    EXPECT_EQ(optimal_kcenter_radius(d, 2), 1.0);
}

TEST(Gonzalez, SaturatedWhenKEqualsM) {
    const auto d = line_matrix({0, 3, 4, 9});
    const auto g = gonzalez_kcenter(d, 4, 1);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(g.assignment[i], i);
    EXPECT_EQ(g.radius(), 0.0);
}

TEST(Gonzalez, TiesGoToLowestIndex) {
    const DistanceMatrix flat(Matrix(4, 4, 1.0), "flat");
    Matrix m = flat.values();
    for (std::size_t i = 0; i < 4; ++i) m(i, i) = 0;
    const auto g = gonzalez_kcenter(DistanceMatrix(m, "flat"), 2, 2);
    EXPECT_EQ(g.representatives, (std::vector<std::size_t>{2, 0}));
    EXPECT_EQ(g.assignment, (std::vector<std::size_t>{0, 0, 2, 0}));
}

TEST(Gonzalez, Errors) {
    const auto d = line_matrix({0, 1});
    EXPECT_THROW(gonzalez_kcenter(d, 3, 0), ParameterError);
    EXPECT_THROW(gonzalez_kcenter(d, 0, 0), ParameterError);
    EXPECT_THROW(gonzalez_kcenter(d, 1, 2), ParameterError);
}

TEST(Gonzalez, TwoApproximationAgainstExhaustiveSearch) {
    Rng rng(1);
    for (int t = 0; t < 60; ++t) {
        const std::size_t m = 2 + rng.below(9);
        const std::size_t k = 1 + rng.below(std::min<std::size_t>(3, m));
        const auto d = random_metric(m, rng);
        const auto g = gonzalez_kcenter(d, k, rng.below(m));
        EXPECT_LE(g.radius(), 2 * optimal_kcenter_radius(d, k) + 1e-12);
        for (std::size_t i = 0; i < m; ++i) {
            double nearest = 1e300;
            for (std::size_t r : g.representatives) nearest = std::min(nearest, d(i, r));
            EXPECT_EQ(g.distance[i], nearest);
        }
    }
}

TEST(Summary, LineExample) {
    const auto d = line_matrix({0, 1, 10});
    const auto s = summarize_grouping(d, gonzalez_kcenter(d, 2, 0));
    ASSERT_EQ(s.size(), 2u);
    EXPECT_EQ(s[0].members, (std::vector<std::size_t>{0, 1}));
    EXPECT_EQ(s[0].member_distances, (std::vector<double>{0, 1}));
    EXPECT_DOUBLE_EQ(s[0].spread_variance, 0.25);
    EXPECT_EQ(*s[1].nearest_other, 10.0);
}

TEST(Summary, SingleRepresentativeHasNoNeighbour) {
    const auto d = line_matrix({0, 1, 10});
    const auto s = summarize_grouping(d, gonzalez_kcenter(d, 1, 0));
    EXPECT_FALSE(s[0].nearest_other.has_value());
}

TEST(Summary, AllZeroDistances) {
    const DistanceMatrix d(Matrix(5, 5, 0.0), "zero");
    for (const auto& r : summarize_grouping(d, gonzalez_kcenter(d, 2, 0))) {
        for (double x : r.member_distances) EXPECT_EQ(x, 0.0);
        EXPECT_EQ(r.spread_variance, 0.0);
    }
}

TEST(Grouping, BestQualityIndex) {
    EXPECT_EQ(best_quality_index({1, 3, 2, 3}), 1u);
    EXPECT_THROW(best_quality_index({}), ParameterError);
}

TEST(Grouping, FileRoundTrip) {
    Rng rng(2);
    const auto d = random_metric(12, rng);
    const auto g = gonzalez_kcenter(d, 4, 3);
    const auto dir = scratch_dir("grouping");
    write_grouping(dir + "/g.txt", g);
    EXPECT_EQ(read_grouping(dir + "/g.txt"), g);
    write_grouping_summary(dir + "/s.csv", summarize_grouping(d, gonzalez_kcenter(d, 1, 0)));
    EXPECT_NE(partscape::read_file(dir + "/s.csv").find(",NA"), std::string::npos);
}

TEST(Gonzalez, RadiusNonincreasingInK) {
    Rng rng(3);
    const auto d = random_metric(15, rng);
    double previous = INFINITY;
    for (std::size_t k = 1; k <= 15; ++k) {
        const double r = gonzalez_kcenter(d, k, 4).radius();
        EXPECT_LE(r, previous);
        previous = r;
    }
}
