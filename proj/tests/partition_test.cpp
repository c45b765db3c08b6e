#include <gtest/gtest.h>

#include <set>

#include "support.hpp"

using namespace partscape;

TEST(Partition, CanonicalRelabelsByFirstOccurrence) {
    EXPECT_EQ(canonicalize(Partition({1, 1, 0, 2})).labels()[2], 1u);
    const auto c = canonical_labels(std::vector<Label>{1, 1, 0, 2});
    EXPECT_EQ(c, (std::vector<Label>{0, 0, 1, 2}));
    EXPECT_EQ(canonical_labels(c), c);
    EXPECT_TRUE(Partition({0, 0, 1, 2}).is_canonical());
    EXPECT_FALSE(Partition({1, 1, 0, 2}).is_canonical());
}

TEST(Partition, EqualityIgnoresLabelNames) {
    EXPECT_EQ(Partition({1, 1, 0}), Partition({0, 0, 1}));
    EXPECT_FALSE(Partition({0, 1, 1}) == Partition({0, 0, 1}));
}

TEST(Partition, RejectsEmptyClustersAndOutOfRangeLabels) {
    EXPECT_THROW(Partition({2, 2, 2}, 3), InvariantError);
    EXPECT_THROW(Partition({0, 3}, 2), InvariantError);
}

TEST(Partition, ClusterSizesAndMembers) {
    const Partition p({0, 1, 0, 2, 0});
    EXPECT_EQ(p.cluster_sizes(), (std::vector<std::size_t>{3, 1, 1}));
    EXPECT_EQ(p.members()[0], (std::vector<std::size_t>{0, 2, 4}));
}

TEST(Confusion, CountsCoOccurrences) {
    const auto m = confusion(Partition({0, 0, 1}), Partition({0, 1, 1}));
    EXPECT_EQ(m(0, 0), 1u);
    EXPECT_EQ(m(0, 1), 1u);
    EXPECT_EQ(m(1, 0), 0u);
    EXPECT_EQ(m(1, 1), 1u);
    EXPECT_EQ(m.n, 3u);
}

TEST(Confusion, IdenticalPartitionsAreDiagonal) {
    const auto m = confusion(Partition({0, 0, 1}), Partition({0, 0, 1}));
    EXPECT_EQ(m(0, 0), 2u);
    EXPECT_EQ(m(1, 1), 1u);
    EXPECT_EQ(m(0, 1) + m(1, 0), 0u);
}

TEST(Confusion, SizeMismatch) {
    EXPECT_THROW(confusion(Partition({0, 1}), Partition({0, 1, 1})), DimensionError);
}

TEST(Partition, LineRoundTrip) {
    const Partition p({0, 2, 1, 1, 0});
    EXPECT_EQ(to_line(p), "0 2 1 1 0");
    EXPECT_EQ(parse_line(to_line(p), 3).labels().size(), 5u);
    EXPECT_EQ(parse_line("0 2 1 1 0", 3), p);
    EXPECT_THROW(parse_labels("0 x 1"), ParseError);
}

TEST(Enumerate, StirlingRecurrenceValues) {
    EXPECT_EQ(stirling2(3, 2), 3u);
    EXPECT_EQ(stirling2(4, 2), 7u);
    EXPECT_EQ(stirling2(8, 2), 127u);
    EXPECT_EQ(stirling2(5, 3), 25u);
    EXPECT_EQ(stirling2(4, 4), 1u);
    EXPECT_EQ(stirling2(3, 4), 0u);
}

TEST(Enumerate, SmallCasesListed) {
    const auto three = enumerate_partitions(3, 2);
    ASSERT_EQ(three.size(), 3u);
    std::set<std::string> lines;
    for (const auto& p : three) lines.insert(to_line(p));
    EXPECT_EQ(lines, (std::set<std::string>{"0 0 1", "0 1 0", "0 1 1"}));
    const auto singletons = enumerate_partitions(3, 3);
    ASSERT_EQ(singletons.size(), 1u);
    EXPECT_EQ(to_line(singletons[0]), "0 1 2");
}

// Independent oracle: every label vector in s^n, canonicalized, deduplicated,
// keeping only those with exactly s clusters.
TEST(Enumerate, MatchesBruteForceOverAllLabelVectors) {
    for (std::size_t n = 1; n <= 7; ++n) {
        for (std::size_t s = 1; s <= n; ++s) {
            std::set<std::vector<Label>> expected;
            std::vector<Label> v(n, 0);
            for (;;) {
                if (std::set<Label>(v.begin(), v.end()).size() == s) expected.insert(canonical_labels(v));
                std::size_t i = 0;
                while (i < n && ++v[i] == s) v[i++] = 0;
                if (i == n) break;
            }
            const auto listed = enumerate_partitions(n, s);
            std::set<std::vector<Label>> got;
            for (const auto& p : listed) {
                EXPECT_TRUE(p.is_canonical());
                got.insert(std::vector<Label>(p.labels().begin(), p.labels().end()));
            }
            EXPECT_EQ(got.size(), listed.size()) << "duplicates for n=" << n << " s=" << s;
            EXPECT_EQ(got, expected) << "n=" << n << " s=" << s;
            EXPECT_EQ(listed.size(), stirling2(n, s));
        }
    }
}

TEST(Enumerate, RejectsLargeOrInvalid) {
    EXPECT_THROW(enumerate_partitions(13, 2), ScaleError);
    EXPECT_THROW(enumerate_partitions(4, 0), ParameterError);
    EXPECT_THROW(enumerate_partitions(4, 5), ParameterError);
}

TEST(Rng, SameSeedSameStream) {
    Rng a(11), b(11), c(12);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next(), b.next());
    EXPECT_NE(Rng(11).next(), c.next());
    EXPECT_NE(Rng(11).split(1).next(), Rng(11).split(2).next());
}

TEST(Rng, BelowIsRoughlyUniform) {
    Rng rng(5);
    std::vector<int> counts(7, 0);
    const int draws = 70000;
    for (int i = 0; i < draws; ++i) ++counts[rng.below(7)];
    for (int c : counts) EXPECT_NEAR(c, draws / 7.0, 5 * std::sqrt(draws / 7.0));
}

TEST(Rng, NormalMoments) {
    Rng rng(9);
    double sum = 0, sq = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double x = rng.normal();
        sum += x;
        sq += x * x;
    }
    EXPECT_NEAR(sum / n, 0.0, 0.01);
    EXPECT_NEAR(sq / n, 1.0, 0.02);
}
