#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "gridreg/affine.hpp"
#include "gridreg/descriptors.hpp"
#include "gridreg/error.hpp"
#include "gridreg/grid.hpp"
#include "gridreg/synth.hpp"
#include "test_support.hpp"

namespace gridreg {
namespace {

double norm(std::span<const float> v) {
    double s = 0.0;
    for (float x : v) s += static_cast<double>(x) * x;
    return std::sqrt(s);
}

// Independent re-derivation: 16x16 block means, z-score, L2.
std::vector<double> block_mean_oracle(const ImageBuffer& p) {
    const int b = p.width() / 16;
    std::vector<double> m(256, 0.0);
    for (int y = 0; y < p.height(); ++y) {
        for (int x = 0; x < p.width(); ++x) m[(y / b) * 16 + x / b] += p.at(x, y);
    }
    for (double& v : m) v /= b * b;
    const double mean = std::accumulate(m.begin(), m.end(), 0.0) / 256.0;
    double var = 0.0;
    for (double v : m) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / 256.0);
    double n = 0.0;
    for (double& v : m) {
        v = (v - mean) / sd;
        n += v * v;
    }
    for (double& v : m) v /= std::sqrt(n);
    return m;
}

TEST(BaselineDescriptor, ConstantPatchIsZero) {
    const auto d = baseline_descriptor(ImageBuffer::constant(64, 64, 0.3f));
    ASSERT_EQ(d.size(), 256u);
    for (float v : d) EXPECT_EQ(v, 0.0f);
}

TEST(BaselineDescriptor, UnitNormAndMatchesOracle) {
    for (std::uint64_t s = 0; s < 5; ++s) {
        const ImageBuffer p = test::random_image(64, 64, s);
        const auto d = baseline_descriptor(p);
        EXPECT_NEAR(norm(d), 1.0, 1e-6);
        const auto ref = block_mean_oracle(p);
        for (int i = 0; i < 256; ++i) EXPECT_NEAR(d[i], ref[i], 1e-5);
    }
}

TEST(BaselineDescriptor, IntensityAffineInvariant) {
    const ImageBuffer p = test::random_image(128, 128, 3);
    std::vector<float> px(p.pixels().begin(), p.pixels().end());
    for (float& v : px) v = 0.1f + 0.5f * v;
    const auto a = baseline_descriptor(p);
    const auto b = baseline_descriptor(ImageBuffer(128, 128, std::move(px)));
    for (int i = 0; i < 256; ++i) EXPECT_NEAR(a[i], b[i], 1e-6);
}

TEST(BaselineDescriptor, SideNotDivisibleBy16) {
    EXPECT_THROW(baseline_descriptor(ImageBuffer(40, 40)), InputError);
    EXPECT_THROW(baseline_descriptor(ImageBuffer(32, 48)), InputError);
}

TEST(PolarDescriptor, UnitNormConstantZeroAndDim) {
    const auto z = polar_descriptor(ImageBuffer::constant(64, 64, 0.5f));
    ASSERT_EQ(z.size(), 128u);
    for (float v : z) EXPECT_EQ(v, 0.0f);
    const auto d = polar_descriptor(make_textured_base(128, 128, 4));
    EXPECT_NEAR(norm(d), 1.0, 1e-6);
}

TEST(PolarDescriptor, QuarterTurnAndFlipInvariant) {
    const ImageBuffer p = make_textured_base(128, 128, 9);
    const double c = 63.5;
    // Exact pixel permutations: no interpolation error.
    const AffineTransform2D quarter({0, -1, 2 * c, 1, 0, 0});
    const AffineTransform2D flip({-1, 0, 2 * c, 0, 1, 0});
    const auto d0 = polar_descriptor(p);
    for (const auto& t : {quarter, flip, quarter.compose(flip)}) {
        const auto d1 = polar_descriptor(warp_image(p, t, 128, 128));
        double dot = 0.0;
        for (std::size_t i = 0; i < d0.size(); ++i) dot += static_cast<double>(d0[i]) * d1[i];
        EXPECT_GT(dot, 0.995);
    }
}

TEST(PolarDescriptor, ArbitraryRotationKeepsHighSimilarity) {
    const ImageBuffer base = make_textured_base(256, 256, 11);
    const ImageBuffer p = warp_image(base, AffineTransform2D::translation(64, 64), 128, 128);
    const auto d0 = polar_descriptor(p);
    for (double deg : {17.0, 45.0, 133.0, 250.0}) {
        const AffineTransform2D rot =
            AffineTransform2D::rotation(deg * 3.14159265358979 / 180.0, {127.5, 127.5});
        const AffineTransform2D to_base = rot.compose(AffineTransform2D::translation(64, 64));
        const auto d1 = polar_descriptor(warp_image(base, to_base, 128, 128));
        double dot = 0.0;
        for (std::size_t i = 0; i < d0.size(); ++i) dot += static_cast<double>(d0[i]) * d1[i];
        EXPECT_GT(dot, 0.9) << deg;
    }
}

TEST(ComputeDescriptors, SingleGridPoint) {
    const ImageBuffer img = test::random_image(256, 256, 1);
    const DescriptorSet set = compute_descriptors(img, gridize(img, 256, 16),
                                                  make_baseline_provider(), "sar");
    EXPECT_EQ(set.rows(), 1);
    EXPECT_EQ(set.dim, 256);
    EXPECT_EQ(set.modality, "sar");
}

TEST(ComputeDescriptors, SixPointGridHasUnitRowsInIndexOrder) {
    const ImageBuffer img = test::random_image(288, 272, 2);
    const GridSpec g = gridize(img, 256, 16);
    const DescriptorSet set = compute_descriptors(img, g, make_baseline_provider());
    ASSERT_EQ(set.rows(), 6);
    ASSERT_EQ(set.data.size(), 6u * 256u);
    for (int i = 0; i < 6; ++i) {
        EXPECT_NEAR(norm(set.row(i)), 1.0, 1e-5);
        const auto direct = baseline_descriptor(extract_patch(img, g, i));
        for (int k = 0; k < 256; ++k) EXPECT_NEAR(set.row(i)[k], direct[k], 1e-6);
    }
}

TEST(ComputeDescriptors, DeterministicAcrossRuns) {
    const ImageBuffer img = make_textured_base(300, 280, 5);
    const GridSpec g = gridize(img, 128, 16);
    const auto a = compute_descriptors(img, g, make_polar_provider());
    const auto b = compute_descriptors(img, g, make_polar_provider());
    EXPECT_EQ(a, b);
}

TEST(ComputeDescriptors, StoredRowsAreUnitOrZero) {
    ImageBuffer img = make_textured_base(192, 192, 6);
    for (int y = 0; y < 64; ++y) {
        for (int x = 0; x < 64; ++x) img.at(x, y) = 0.5f;
    }
    const GridSpec g = gridize(img, 64, 16);
    for (const auto& provider : {make_baseline_provider(), make_polar_provider()}) {
        const DescriptorSet set = compute_descriptors(img, g, provider);
        bool saw_zero = false;
        for (int i = 0; i < set.rows(); ++i) {
            const double n = norm(set.row(i));
            if (n == 0.0) {
                saw_zero = true;
            } else {
                EXPECT_NEAR(n, 1.0, 1e-5);
            }
        }
        EXPECT_TRUE(saw_zero);
    }
}

TEST(ComputeDescriptors, ProviderContractViolations) {
    const ImageBuffer img = test::random_image(64, 64, 7);
    const GridSpec g = gridize(img, 32, 16);
    int calls = 0;
    const DescriptorFn inconsistent = [&](const ImageBuffer&) {
        return std::vector<float>(++calls % 2 ? 4 : 5, 1.0f);
    };
    const DescriptorFn empty = [](const ImageBuffer&) { return std::vector<float>{}; };
    const DescriptorFn nan = [](const ImageBuffer&) { return std::vector<float>{NAN, 1.0f}; };
    EXPECT_THROW(compute_descriptors(img, g, inconsistent), ContractError);
    EXPECT_THROW(compute_descriptors(img, g, empty), ContractError);
    EXPECT_THROW(compute_descriptors(img, g, nan), ContractError);
}

TEST(NormalizeRows, ZeroRowsStayZero) {
    DescriptorSet set;
    set.grid = {16, 16, 2, 1};
    set.dim = 2;
    set.data = {3.0f, 4.0f, 0.0f, 0.0f};
    normalize_rows(set);
    EXPECT_FLOAT_EQ(set.data[0], 0.6f);
    EXPECT_FLOAT_EQ(set.data[1], 0.8f);
    EXPECT_EQ(set.data[2], 0.0f);
    EXPECT_EQ(set.data[3], 0.0f);
}

}  // namespace
}  // namespace gridreg
