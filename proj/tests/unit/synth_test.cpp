#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "gridreg/error.hpp"
#include "gridreg/metrics.hpp"
#include "gridreg/synth.hpp"

namespace gridreg {
namespace {

const ImageBuffer& base() {
    static const ImageBuffer b = make_textured_base(640, 640, 3);
    return b;
}

TEST(Synth, LevelTable) {
    EXPECT_EQ(level_spec(Level::Lm1).roa_lo, 0.6);
    EXPECT_EQ(level_spec(Level::Lm1).roa_hi, 0.8);
    EXPECT_EQ(level_spec(Level::L0).rso, 4.0);
    EXPECT_EQ(level_spec(Level::L1).rso, 9.0);
    EXPECT_EQ(level_spec(Level::L2).rso, 14.0);
    for (Level l : {Level::Lm1, Level::L0, Level::L1, Level::L2}) {
        EXPECT_EQ(parse_level(to_string(l)), l);
    }
    EXPECT_EQ(parse_level("Lm1"), Level::Lm1);
    EXPECT_THROW(parse_level("L3"), InputError);
}

TEST(Synth, NoRotationDrawIsPureTranslation) {
    SynthOptions o;
    o.random_rotation = false;
    o.random_flip = false;
    const SynthCase c = synth_pair(base(), Level::L0, 5, o);
    EXPECT_EQ(c.t_gt[0], 1.0);
    EXPECT_EQ(c.t_gt[1], 0.0);
    EXPECT_EQ(c.t_gt[3], 0.0);
    EXPECT_EQ(c.t_gt[4], 1.0);
    EXPECT_EQ(mee(c.t_gt, c.t_gt, {c.source.width(), c.source.height()},
                  {c.reference.width(), c.reference.height()}),
              0.0);
}

TEST(Synth, L2ReferenceAreaIsFourteenTimesSource) {
    const SynthCase c = synth_pair(base(), Level::L2, 1);
    const double side = c.reference.width() / std::sqrt(14.0);
    EXPECT_LE(std::abs(c.source.width() - side), 1.0);
    EXPECT_LE(std::abs(c.source.height() - side), 1.0);
}

TEST(Synth, Deterministic) {
    SynthOptions o;
    o.speckle = true;
    o.occlusions = true;
    for (Level l : {Level::Lm1, Level::L1}) {
        const SynthCase a = synth_pair(base(), l, 9, o);
        const SynthCase b = synth_pair(base(), l, 9, o);
        EXPECT_EQ(a.source, b.source);
        EXPECT_EQ(a.reference, b.reference);
        EXPECT_EQ(a.t_gt, b.t_gt);
    }
}

TEST(Synth, MeasuredGeometryMatchesLevel) {
    for (Level l : {Level::Lm1, Level::L0, Level::L1, Level::L2}) {
        const LevelSpec spec = level_spec(l);
        for (std::uint64_t seed = 0; seed < 8; ++seed) {
            const SynthCase c = synth_pair(base(), l, seed);
            const Extent src{c.source.width(), c.source.height()};
            const Extent ref{c.reference.width(), c.reference.height()};
            const double roa = overlap_ratio(c.t_gt, src, ref, 1);
            const double rso = static_cast<double>(ref.width) * ref.height / (src.width * src.height);
            EXPECT_GE(roa, spec.roa_lo * 0.98) << to_string(l) << " seed " << seed;
            EXPECT_LE(roa, spec.roa_hi * 1.02) << to_string(l) << " seed " << seed;
            EXPECT_NEAR(rso, spec.rso, 0.02 * spec.rso);
            EXPECT_NEAR(c.degradations.roa, roa, 0.01);
            EXPECT_NEAR(std::abs(c.t_gt.det()), 1.0, 1e-12);
        }
    }
}

TEST(Synth, SourceContentMatchesReferenceUnderGroundTruth) {
    const SynthCase c = synth_pair(base(), Level::L0, 4);
    double sum = 0.0;
    int n = 0;
    for (int y = 0; y < c.source.height(); y += 3) {
        for (int x = 0; x < c.source.width(); x += 3) {
            const Point2 q = c.t_gt({static_cast<double>(x), static_cast<double>(y)});
            sum += std::abs(c.source.at(x, y) - c.reference.sample_bilinear(q.x, q.y));
            ++n;
        }
    }
    EXPECT_LT(sum / n, 1e-6);
}

TEST(Synth, WarpThenInverseRecoversSmoothCrop) {
    const ImageBuffer smooth = warp_image(make_textured_base(256, 256, 8),
                                          AffineTransform2D({0.25, 0, 0, 0, 0.25, 0}), 256, 256);
    const AffineTransform2D t =
        AffineTransform2D::rotation(0.7, {128, 128}).compose(AffineTransform2D::translation(3.3, -2.1));
    const ImageBuffer fwd = warp_image(smooth, t, 256, 256);
    const ImageBuffer back = warp_image(fwd, t.inverse(), 256, 256);
    double sum = 0.0;
    int n = 0;
    for (int y = 96; y < 160; ++y) {
        for (int x = 96; x < 160; ++x) {
            sum += std::abs(back.at(x, y) - smooth.at(x, y));
            ++n;
        }
    }
    EXPECT_LE(sum / n, 0.02);
}

TEST(Synth, DegradationsAreRecorded) {
    SynthOptions o;
    o.speckle = true;
    o.occlusions = true;
    const SynthCase c = synth_pair(base(), Level::L0, 2, o);
    EXPECT_EQ(c.degradations.speckle_looks, 4.0);
    ASSERT_EQ(c.degradations.occluders.size(), 3u);
    long long area = 0;
    for (const Rect& r : c.degradations.occluders) area += static_cast<long long>(r.w) * r.h;
    EXPECT_LE(area, 0.10 * c.source.width() * c.source.height());
    for (float v : c.source.pixels()) {
        EXPECT_GE(v, 0.0f);
        EXPECT_LE(v, 1.0f);
    }
}

TEST(Synth, BaseTooSmall) {
    EXPECT_THROW(synth_pair(make_textured_base(40, 40, 0), Level::L2, 0), InputError);
}

TEST(Bench, EmptyCaseListGivesHeaderOnly) {
    std::ostringstream out;
    write_bench_header(out);
    EXPECT_EQ(out.str(), "case_id,level,seed,mee_px,success25,success50,success75,success100,wall_ms\n");
}

TEST(Bench, RowFormatAndFailureIsInfinite) {
    BenchRow row;
    row.case_id = "L0_s3";
    row.level = Level::L0;
    row.seed = 3;
    row.mee_px = std::numeric_limits<double>::infinity();
    std::ostringstream out;
    write_bench_row(out, row);
    EXPECT_EQ(out.str(), "L0_s3,L0,3,inf,0,0,0,0,0.0\n");
}

TEST(Bench, RunCaseIsDeterministicWithoutTiming) {
    const SynthCase c = synth_pair(base(), Level::L1, 6);
    EngineConfig cfg;
    cfg.patch = 128;
    cfg.descriptor = DescriptorMode::Polar;
    cfg.iter_cap = 3000;
    std::ostringstream a;
    std::ostringstream b;
    write_bench_row(a, run_case(c, cfg, false));
    write_bench_row(b, run_case(c, cfg, false));
    EXPECT_EQ(a.str(), b.str());
}

}  // namespace
}  // namespace gridreg
