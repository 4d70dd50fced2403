#include <gtest/gtest.h>

#include "gridreg/error.hpp"
#include "gridreg/grid.hpp"
#include "test_support.hpp"

namespace gridreg {
namespace {

TEST(Gridize, SinglePatch) {
    const GridSpec g = gridize(256, 256, 256, 16);
    EXPECT_EQ(g.n_w, 1);
    EXPECT_EQ(g.n_h, 1);
}

TEST(Gridize, WideImageArithmetic) {
    const GridSpec g = gridize(906, 891, 256, 16);
    EXPECT_EQ(g.n_w, 41);
    EXPECT_EQ(g.n_h, 40);
    EXPECT_EQ(g.size(), 1640);
}

TEST(Gridize, CountsMatchBruteForceEnumeration) {
    for (int w = 16; w <= 80; w += 7) {
        for (int h = 16; h <= 80; h += 5) {
            for (int patch : {16, 32}) {
                for (int step : {1, 3, 16}) {
                    if (patch > std::min(w, h)) {
                        EXPECT_THROW(gridize(w, h, patch, step), InputError);
                        continue;
                    }
                    int nx = 0;
                    for (int x = 0; x + patch <= w; x += step) ++nx;
                    int ny = 0;
                    for (int y = 0; y + patch <= h; y += step) ++ny;
                    const GridSpec g = gridize(w, h, patch, step);
                    EXPECT_EQ(g.n_w, nx);
                    EXPECT_EQ(g.n_h, ny);
                }
            }
        }
    }
    const GridSpec g = gridize(288, 272, 256, 16);
    EXPECT_EQ(g.n_w, 3);
    EXPECT_EQ(g.n_h, 2);
    EXPECT_EQ(g.size(), 6);
}

TEST(Gridize, InvalidArguments) {
    EXPECT_THROW(gridize(100, 100, 256, 16), InputError);
    EXPECT_THROW(gridize(300, 300, 256, 0), InputError);
    EXPECT_THROW(gridize(300, 300, 0, 16), InputError);
}

TEST(GridSpec, CentreConvention) {
    const GridSpec g = gridize(288, 272, 256, 16);
    EXPECT_EQ(g.center(0), (Point2{128, 128}));
    EXPECT_EQ(g.center(5), (Point2{2 * 16 + 128, 16 + 128}));
}

TEST(ExtractPatch, TopLeftOriginAndLastIndex) {
    ImageBuffer img(288, 272);
    for (int y = 0; y < 272; ++y) {
        for (int x = 0; x < 288; ++x) img.at(x, y) = static_cast<float>((x + 1000 * y) % 997) / 997.0f;
    }
    const GridSpec g = gridize(img, 256, 16);
    const ImageBuffer p0 = extract_patch(img, g, 0);
    EXPECT_EQ(p0.width(), 256);
    EXPECT_EQ(p0.at(0, 0), img.at(0, 0));
    EXPECT_EQ(p0.at(255, 255), img.at(255, 255));
    const ImageBuffer last = extract_patch(img, g, g.size() - 1);
    EXPECT_EQ(g.top_left(g.size() - 1), (Point2{32, 16}));
    EXPECT_EQ(last.at(0, 0), img.at(32, 16));
    EXPECT_EQ(last.at(255, 255), img.at(287, 271));
}

TEST(ExtractPatch, ConstantImageGivesConstantPatch) {
    const ImageBuffer img = ImageBuffer::constant(40, 40, 0.25f);
    const GridSpec g = gridize(img, 16, 8);
    for (int i = 0; i < g.size(); ++i) {
        const ImageBuffer p = extract_patch(img, g, i);
        for (float v : p.pixels()) EXPECT_EQ(v, 0.25f);
    }
}

TEST(ExtractPatch, NeverReadsOutsideTheImage) {
    // Exhaustive over small images: every pixel of every patch is a copy of
    // the pixel at top_left + offset, which is checked to lie in bounds.
    for (int w = 16; w <= 40; w += 3) {
        for (int h = 16; h <= 40; h += 4) {
            const ImageBuffer img = test::random_image(w, h, static_cast<std::uint64_t>(w * 100 + h));
            for (int step : {1, 5, 16}) {
                const GridSpec g = gridize(img, 16, step);
                for (int i = 0; i < g.size(); ++i) {
                    const Point2 tl = g.top_left(i);
                    ASSERT_LE(tl.x + 16, w);
                    ASSERT_LE(tl.y + 16, h);
                    const ImageBuffer p = extract_patch(img, g, i);
                    for (int y = 0; y < 16; ++y) {
                        for (int x = 0; x < 16; ++x) {
                            ASSERT_EQ(p.at(x, y), img.at(static_cast<int>(tl.x) + x,
                                                         static_cast<int>(tl.y) + y));
                        }
                    }
                }
            }
        }
    }
}

TEST(ExtractPatch, Errors) {
    const ImageBuffer img(64, 64);
    const GridSpec g = gridize(img, 32, 16);
    EXPECT_THROW(extract_patch(img, g, -1), IndexError);
    EXPECT_THROW(extract_patch(img, g, g.size()), IndexError);
    const GridSpec big = gridize(128, 128, 32, 16);
    EXPECT_THROW(extract_patch(img, big, 0), DimensionError);
}

}  // namespace
}  // namespace gridreg
