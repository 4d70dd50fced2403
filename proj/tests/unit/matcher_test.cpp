#include <algorithm>
#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "gridreg/error.hpp"
#include "gridreg/matcher.hpp"
#include "gridreg/rng.hpp"

namespace gridreg {
namespace {

DescriptorSet random_descriptors(CounterRng& rng, int n, int dim) {
    DescriptorSet s;
    s.grid = {16, 16, n, 1};
    s.dim = dim;
    s.data.resize(static_cast<std::size_t>(n) * dim);
    for (float& v : s.data) v = static_cast<float>(rng.normal());
    normalize_rows(s);
    return s;
}

// Full stable sort by (distance, index): the reference selection.
std::vector<int> brute_force_smallest(std::span<const float> row, int k) {
    std::vector<int> idx(row.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return row[a] < row[b]; });
    idx.resize(std::min<std::size_t>(k, idx.size()));
    return idx;
}

TEST(DistanceMatrix, SelfDistanceDiagonalIsMinusOne) {
    CounterRng rng(1, 0);
    const DescriptorSet f = random_descriptors(rng, 30, 16);
    const DistanceMatrix d = distance_matrix(f, f);
    for (int i = 0; i < 30; ++i) {
        EXPECT_NEAR(d(i, i), -1.0f, 1e-6);
        for (int j = 0; j < 30; ++j) {
            EXPECT_GE(d(i, j), -1.0f);
            EXPECT_LE(d(i, j), 1.0f);
            if (j != i) {
                EXPECT_GT(d(i, j), d(i, i));
            }
        }
    }
}

TEST(DistanceMatrix, MatchesLoopDotProducts) {
    CounterRng rng(2, 0);
    const DescriptorSet a = random_descriptors(rng, 13, 9);
    const DescriptorSet b = random_descriptors(rng, 17, 9);
    const DistanceMatrix d = distance_matrix(a, b);
    ASSERT_EQ(d.rows(), 13);
    ASSERT_EQ(d.cols(), 17);
    for (int i = 0; i < 13; ++i) {
        for (int j = 0; j < 17; ++j) {
            double s = 0.0;
            for (int k = 0; k < 9; ++k) s += static_cast<double>(a.row(i)[k]) * b.row(j)[k];
            EXPECT_NEAR(d(i, j), -s, 1e-6);
        }
    }
}

TEST(DistanceMatrix, OrthogonalAndZeroRows) {
    DescriptorSet a;
    a.grid = {16, 16, 2, 1};
    a.dim = 2;
    a.data = {1.0f, 0.0f, 0.0f, 0.0f};
    DescriptorSet b = a;
    b.data = {0.0f, 1.0f, 1.0f, 0.0f};
    const DistanceMatrix d = distance_matrix(a, b);
    EXPECT_EQ(d(0, 0), 0.0f);
    EXPECT_EQ(d(0, 1), -1.0f);
    EXPECT_EQ(d(1, 0), 0.0f);
    EXPECT_EQ(d(1, 1), 0.0f);
}

TEST(DistanceMatrix, DimensionMismatch) {
    CounterRng rng(3, 0);
    EXPECT_THROW(distance_matrix(random_descriptors(rng, 3, 4), random_descriptors(rng, 3, 5)),
                 DimensionError);
}

TEST(CandidateCounts, AreaRatioExamples) {
    EXPECT_EQ(candidate_counts(1, 16, {512, 512}, {512, 512}).k_c, 1);
    EXPECT_EQ(candidate_counts(1, 16, {512, 512}, {512, 512}).k_f, 4);
    EXPECT_EQ(candidate_counts(1, 16, {512, 512}, {1024, 1024}).k_c, 2);
    EXPECT_EQ(candidate_counts(1, 16, {512, 512}, {1024, 1024}).k_f, 8);
    // 1.5 rounds half up; tiny values clamp to 1.
    EXPECT_EQ(candidate_counts(1, 24, {100, 100}, {100, 100}).k_c, 2);
    EXPECT_EQ(candidate_counts(1, 1, {100, 100}, {100, 100}).k_c, 1);
}

TEST(CandidateSets, TiesGoToLowerIndex) {
    const DistanceMatrix d(1, 5, {0.5f, -0.2f, -0.2f, 0.1f, -0.2f});
    const CandidateSets cs = candidate_sets(d, 3, 16, {100, 100}, {100, 100});
    EXPECT_EQ(cs.p_c[0], (std::vector<int>{1, 2, 4}));
    EXPECT_EQ(smallest_k(d.row(0), 2), (std::vector<int>{1, 2}));
}

TEST(CandidateSets, BruteForceOracleOnRandomMatrices) {
    CounterRng rng(4, 0);
    for (int k = 0; k < 50; ++k) {
        const int rows = 1 + static_cast<int>(rng.uniform_index(200));
        const int cols = 1 + static_cast<int>(rng.uniform_index(200));
        std::vector<float> data(static_cast<std::size_t>(rows) * cols);
        // Coarse quantisation forces plenty of ties.
        for (float& v : data) v = static_cast<float>(std::round(rng.uniform(-1, 1) * 20) / 20);
        const DistanceMatrix d(rows, cols, data);
        const int kk = 1 + static_cast<int>(rng.uniform_index(4));
        const CandidateSets cs = candidate_sets(d, kk, 16, {100, 100}, {100, 100});
        ASSERT_EQ(cs.k_f, std::min(4 * kk, cols));
        ASSERT_EQ(cs.clamped, 4 * kk > cols);
        for (int i = 0; i < rows; ++i) {
            EXPECT_EQ(cs.p_c[i], brute_force_smallest(d.row(i), cs.k_c));
            EXPECT_EQ(cs.p_f[i], brute_force_smallest(d.row(i), cs.k_f));
            EXPECT_TRUE(std::equal(cs.p_c[i].begin(), cs.p_c[i].end(), cs.p_f[i].begin()));
            for (std::size_t t = 1; t < cs.p_f[i].size(); ++t) {
                EXPECT_LE(d(i, cs.p_f[i][t - 1]), d(i, cs.p_f[i][t]));
            }
        }
    }
}

TEST(CandidateSets, InvalidK) {
    const DistanceMatrix d(1, 2, {0.0f, 0.0f});
    EXPECT_THROW(candidate_sets(d, 0, 16, {1, 1}, {1, 1}), InputError);
}

}  // namespace
}  // namespace gridreg
