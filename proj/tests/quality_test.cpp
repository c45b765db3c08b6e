#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"

using namespace partscape;
using partscape::testing::line_points;
using partscape::testing::random_partition;
using partscape::testing::random_points;

namespace {

double naive_kernel_quality(const Partition& p, const PointSet& pts, double sigma) {
    double total = 0.0;
    for (std::size_t a = 0; a < p.size(); ++a)
        for (std::size_t b = 0; b < p.size(); ++b)
            if (p[a] == p[b]) {
                double d2 = 0.0;
                for (std::size_t k = 0; k < pts.dim(); ++k) d2 += (pts[a][k] - pts[b][k]) * (pts[a][k] - pts[b][k]);
                total += std::exp(-d2 / (2 * sigma * sigma));
            }
    return total;
}

// SSQ from pairwise distances: sum_j (1 / (2|X_j|)) sum_{a,b in X_j} |a - b|^2.
double pairwise_ssq(const Partition& p, const PointSet& pts) {
    double total = 0.0;
    for (const auto& cluster : p.members()) {
        double acc = 0.0;
        for (std::size_t a : cluster)
            for (std::size_t b : cluster) acc += squared_distance(pts[a], pts[b]);
        total += acc / (2.0 * static_cast<double>(cluster.size()));
    }
    return total;
}

Partition moved(const Partition& p, std::size_t point, Label target) {
    std::vector<Label> labels(p.labels().begin(), p.labels().end());
    labels[point] = target;
    return Partition(std::move(labels), p.clusters());
}

}  // namespace

TEST(KernelQuality, CoincidentPair) {
    const auto pts = line_points({2.0, 2.0});
    EXPECT_DOUBLE_EQ(kernel_quality(Partition({0, 0}), pts, KernelSpec{0.3}), 4.0);
}

TEST(KernelQuality, SingletonsCountSelfTermsOnly) {
    const auto pts = line_points({0, 1, 2, 3, 4});
    EXPECT_DOUBLE_EQ(kernel_quality(Partition({0, 1, 2, 3, 4}), pts, KernelSpec{1.0}), 5.0);
}

TEST(KernelQuality, HandExpansion) {
    const auto pts = line_points({0, 1, 10});
    const Partition p({0, 0, 1});
    const double expected = 3.0 + 2.0 * std::exp(-0.5);
    EXPECT_NEAR(kernel_quality(p, pts, KernelSpec{1.0}), expected, 1e-15);
    EXPECT_NEAR(naive_kernel_quality(p, pts, 1.0), expected, 1e-15);
    EXPECT_NEAR(kernel_quality(p, gram_matrix(pts, KernelSpec{1.0})), expected, 1e-15);
}

TEST(KernelQuality, MatchesNaiveOnRandomData) {
    Rng rng(3);
    for (int t = 0; t < 20; ++t) {
        const auto pts = random_points(15, 3, rng);
        const auto p = random_partition(15, 4, rng);
        EXPECT_NEAR(kernel_quality(p, pts, KernelSpec{2.5}), naive_kernel_quality(p, pts, 2.5), 1e-12);
    }
}

TEST(KmeansQuality, Examples) {
    EXPECT_DOUBLE_EQ(kmeans_quality(Partition({0, 1, 2}), line_points({0, 5, 9})), 1.0 / kmeans_epsilon);
    EXPECT_DOUBLE_EQ(within_cluster_ssq(Partition({0, 0}), line_points({-1, 1})), 2.0);
    EXPECT_DOUBLE_EQ(kmeans_quality(Partition({0, 0}), line_points({-1, 1})), 1.0 / (2.0 + kmeans_epsilon));
    const auto pts = line_points({0, 2, 10, 12});
    EXPECT_DOUBLE_EQ(within_cluster_ssq(Partition({0, 0, 1, 1}), pts), 4.0);
    EXPECT_NEAR(kmeans_quality(Partition({0, 0, 1, 1}), pts), 0.25, 1e-12);
}

TEST(KmeansQuality, MatchesPairwiseIdentity) {
    Rng rng(4);
    for (int t = 0; t < 20; ++t) {
        const auto pts = random_points(12, 2, rng);
        const auto p = random_partition(12, 3, rng);
        EXPECT_NEAR(within_cluster_ssq(p, pts), pairwise_ssq(p, pts), 1e-9);
    }
}

TEST(QualityKind, ParseAndName) {
    EXPECT_EQ(parse_quality_kind("kernel"), QualityKind::kernel);
    EXPECT_EQ(parse_quality_kind("kmeans"), QualityKind::kmeans);
    EXPECT_EQ(to_string(QualityKind::kmeans), "kmeans");
    EXPECT_THROW(parse_quality_kind("dbscan"), ParameterError);
}

class CacheTest : public ::testing::TestWithParam<QualityKind> {};

TEST_P(CacheTest, NoOpMoveReturnsCurrentQuality) {
    Rng rng(1);
    auto pts = std::make_shared<const PointSet>(random_points(10, 2, rng));
    const auto p = random_partition(10, 3, rng);
    const KernelSpec k{1.5};
    auto cache = make_cache(pts, p, GetParam(), k);
    const double q = quality(p, *pts, GetParam(), k);
    EXPECT_NEAR(cache.quality(), q, 1e-12 * q);
    for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(cache.quality_delta(i, p[i]), cache.quality());
}

TEST_P(CacheTest, EverySingleMoveMatchesRecomputation) {
    Rng rng(2);
    const KernelSpec k{1.2};
    for (int t = 0; t < 10; ++t) {
        auto pts = std::make_shared<const PointSet>(random_points(8, 2, rng));
        const auto p = random_partition(8, 3, rng);
        const auto cache = make_cache(pts, p, GetParam(), k);
        for (std::size_t i = 0; i < 8; ++i) {
            if (p.cluster_sizes()[p[i]] == 1) continue;
            for (Label j = 0; j < 3; ++j) {
                const double fresh = quality(moved(p, i, j), *pts, GetParam(), k);
                EXPECT_NEAR(cache.quality_delta(i, j), fresh, 1e-9 * fresh);
            }
        }
    }
}

TEST_P(CacheTest, MoveAndBackRestoresQuality) {
    Rng rng(5);
    auto pts = std::make_shared<const PointSet>(random_points(10, 2, rng));
    const auto p = random_partition(10, 2, rng);
    auto cache = make_cache(pts, p, GetParam(), KernelSpec{1.0});
    const double before = cache.quality();
    std::size_t point = 0;
    while (p.cluster_sizes()[p[point]] == 1) ++point;
    const Label home = p[point];
    cache.apply_move(point, 1 - home);
    cache.apply_move(point, home);
    EXPECT_NEAR(cache.quality(), before, 1e-9 * before);
    EXPECT_NO_THROW(cache.verify());
}

TEST_P(CacheTest, RandomMoveSequenceMatchesRecomputation) {
    Rng rng(6);
    auto pts = std::make_shared<const PointSet>(random_points(20, 3, rng));
    const KernelSpec k{2.0};
    auto cache = make_cache(pts, random_partition(20, 4, rng), GetParam(), k);
    int applied = 0;
    while (applied < 50) {
        const std::size_t point = rng.below(20);
        const Label target = static_cast<Label>(rng.below(4));
        if (cache.cluster_size(cache.label(point)) == 1 && target != cache.label(point)) continue;
        cache.apply_move(point, target);
        ++applied;
    }
    const double fresh = quality(cache.partition(), *pts, GetParam(), k);
    EXPECT_NEAR(cache.quality(), fresh, 1e-9 * fresh);
    EXPECT_NO_THROW(cache.verify());
}

TEST_P(CacheTest, MovingASingletonIsRejected) {
    auto pts = std::make_shared<const PointSet>(line_points({0, 1, 2, 3}));
    auto cache = make_cache(pts, Partition({0, 0, 0, 1}), GetParam(), KernelSpec{1.0});
    EXPECT_THROW(cache.apply_move(3, 0), EmptyClusterError);
    EXPECT_THROW(cache.apply_move(9, 0), ParameterError);
    EXPECT_THROW(cache.apply_move(0, 7), ParameterError);
}

INSTANTIATE_TEST_SUITE_P(Kinds, CacheTest, ::testing::Values(QualityKind::kernel, QualityKind::kmeans),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(Kernel, MedianBandwidthAllPairsOnSmallSets) {
    // Pairwise distances of {0, 1, 3}: 1, 2, 3; median 2.
    EXPECT_DOUBLE_EQ(median_bandwidth(line_points({0, 1, 3}), 1), 2.0);
    EXPECT_THROW(median_bandwidth(line_points({4, 4, 4}), 1), NumericError);
}

TEST(Kernel, RejectsBadBandwidth) {
    EXPECT_THROW(KernelSpec{0.0}.validate(), ParameterError);
    EXPECT_THROW(KernelSpec{-1.0}.validate(), ParameterError);
}
