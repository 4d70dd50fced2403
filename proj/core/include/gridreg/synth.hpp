#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "gridreg/affine.hpp"
#include "gridreg/config.hpp"
#include "gridreg/image.hpp"

namespace gridreg {

/// Difficulty levels: reference/source overlap ratio (ROA) and area ratio
/// (RSO).
enum class Level { Lm1, L0, L1, L2 };

struct LevelSpec {
    double roa_lo = 1.0;
    double roa_hi = 1.0;
    double rso = 4.0;
};

LevelSpec level_spec(Level level);
/// "L-1", "L0", "L1", "L2".
std::string to_string(Level level);
/// Accepts the names above and "Lm1". Throws InputError otherwise.
Level parse_level(const std::string& text);

struct Rect {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;
    float value = 0.0f;
};

struct SynthOptions {
    bool random_rotation = true;   // uniform angle in [0, 360)
    bool random_flip = true;       // horizontal flip with probability 1/2
    bool speckle = false;          // multiplicative Gamma(L, 1/L) on the source
    double looks = 4.0;
    bool occlusions = false;       // filled rectangles on the source
    int occluder_count = 3;
    double occluder_max_fraction = 0.10;
    int reference_side = 0;        // 0: derived from the base size
};

struct Degradations {
    double rotation_deg = 0.0;
    bool flipped = false;
    double speckle_looks = 0.0;    // 0: none
    std::vector<Rect> occluders;
    double roa = 1.0;              // measured on the emitted geometry
    double rso = 0.0;
};

struct SynthCase {
    ImageBuffer source;
    ImageBuffer reference;
    AffineTransform2D t_gt;  // source pixel -> reference pixel
    Level level = Level::L0;
    std::uint64_t seed = 0;
    Degradations degradations;
};

/// Procedural scene: multi-octave value noise with rectangular structures
/// and linear features, scaled into [0.05, 0.95].
ImageBuffer make_textured_base(int width, int height, std::uint64_t seed);

/// out(x, y) = src.sample_bilinear(out_to_src(x, y)), `fill` outside src.
ImageBuffer warp_image(const ImageBuffer& src, const AffineTransform2D& out_to_src, int out_width,
                       int out_height, float fill = 0.0f);

/// Fraction of source pixels (sampled at `stride`) whose image under t lands
/// in [0, W_ref - 1] x [0, H_ref - 1].
double overlap_ratio(const AffineTransform2D& t, Extent source, Extent reference, int stride = 2);

/// Reference: a square crop of `base`. Source: a smaller square resampled from
/// the base under a random rotation/flip/translation so that the level's ROA
/// and RSO hold. Deterministic in (base, level, seed, options). Throws
/// InputError when the base is too small for the level.
SynthCase synth_pair(const ImageBuffer& base, Level level, std::uint64_t seed,
                     const SynthOptions& options = {});

struct BenchRow {
    std::string case_id;
    Level level = Level::L0;
    std::uint64_t seed = 0;
    double mee_px = 0.0;  // +inf when the solver failed
    bool success[4] = {false, false, false, false};
    double wall_ms = 0.0;
    int step = 0;
    double beta = 0.0;
};

/// Registers one case with `cfg` and scores it against t_gt. Solver failure
/// is recorded as MEE = +inf.
BenchRow run_case(const SynthCase& c, const EngineConfig& cfg, bool timing = true);

/// Columns case_id,level,seed,mee_px,success25,success50,success75,success100,wall_ms
/// with step,beta appended when `sweep_columns` is set.
void write_bench_header(std::ostream& out, bool sweep_columns = false);
void write_bench_row(std::ostream& out, const BenchRow& row, bool sweep_columns = false);

}  // namespace gridreg
