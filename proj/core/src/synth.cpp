#include "gridreg/synth.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>

#include "gridreg/engine.hpp"
#include "gridreg/error.hpp"
#include "gridreg/metrics.hpp"
#include "gridreg/rng.hpp"

namespace gridreg {

namespace {

constexpr std::uint64_t kStreamBase = 0;
constexpr std::uint64_t kStreamGeometry = 1;
constexpr std::uint64_t kStreamSpeckle = 2;
constexpr std::uint64_t kStreamOccluders = 3;

double smooth(double t) { return t * t * (3.0 - 2.0 * t); }

// Value noise: random lattice values blended with a smoothstep kernel.
void add_value_noise(std::vector<double>& acc, int w, int h, int cell, double amp,
                     CounterRng& rng) {
    const int gw = w / cell + 2;
    const int gh = h / cell + 2;
    std::vector<double> lattice(static_cast<std::size_t>(gw) * gh);
    for (double& v : lattice) v = rng.uniform(-1.0, 1.0);
    for (int y = 0; y < h; ++y) {
        const double fy = static_cast<double>(y) / cell;
        const int iy = static_cast<int>(fy);
        const double ty = smooth(fy - iy);
        for (int x = 0; x < w; ++x) {
            const double fx = static_cast<double>(x) / cell;
            const int ix = static_cast<int>(fx);
            const double tx = smooth(fx - ix);
            const auto at = [&](int gx, int gy) {
                return lattice[static_cast<std::size_t>(gy) * gw + gx];
            };
            const double top = at(ix, iy) * (1 - tx) + at(ix + 1, iy) * tx;
            const double bot = at(ix, iy + 1) * (1 - tx) + at(ix + 1, iy + 1) * tx;
            acc[static_cast<std::size_t>(y) * w + x] += amp * (top * (1 - ty) + bot * ty);
        }
    }
}

}  // namespace

LevelSpec level_spec(Level level) {
    switch (level) {
        case Level::Lm1: return {0.6, 0.8, 4.0};
        case Level::L0: return {1.0, 1.0, 4.0};
        case Level::L1: return {1.0, 1.0, 9.0};
        case Level::L2: return {1.0, 1.0, 14.0};
    }
    return {};
}

std::string to_string(Level level) {
    switch (level) {
        case Level::Lm1: return "L-1";
        case Level::L0: return "L0";
        case Level::L1: return "L1";
        case Level::L2: return "L2";
    }
    return "L0";
}

Level parse_level(const std::string& text) {
    if (text == "L-1" || text == "Lm1") return Level::Lm1;
    if (text == "L0") return Level::L0;
    if (text == "L1") return Level::L1;
    if (text == "L2") return Level::L2;
    throw InputError("unknown level '" + text + "' (L-1 | L0 | L1 | L2)");
}

ImageBuffer make_textured_base(int width, int height, std::uint64_t seed) {
    if (width < 16 || height < 16) {
        throw InputError("textured base must be at least 16x16");
    }
    CounterRng rng(seed, kStreamBase);
    std::vector<double> acc(static_cast<std::size_t>(width) * height, 0.0);
    const int cells[] = {128, 64, 32, 16, 8, 4};
    const double amps[] = {1.0, 0.7, 0.5, 0.35, 0.25, 0.15};
    for (int o = 0; o < 6; ++o) add_value_noise(acc, width, height, cells[o], amps[o], rng);

    // Blocks of uniform intensity, sizes comparable to a fraction of a patch.
    const int n_rects = std::max(4, width * height / 6000);
    for (int r = 0; r < n_rects; ++r) {
        const int rw = 6 + static_cast<int>(rng.uniform_index(60));
        const int rh = 6 + static_cast<int>(rng.uniform_index(60));
        const int x0 = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(width)));
        const int y0 = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(height)));
        const double v = rng.uniform(-1.5, 1.5);
        for (int y = y0; y < std::min(height, y0 + rh); ++y) {
            for (int x = x0; x < std::min(width, x0 + rw); ++x) {
                acc[static_cast<std::size_t>(y) * width + x] = v;
            }
        }
    }
    // Straight bands.
    const int n_lines = std::max(2, (width + height) / 200);
    for (int l = 0; l < n_lines; ++l) {
        const double theta = rng.uniform(0.0, std::numbers::pi);
        const double nx = std::cos(theta);
        const double ny = std::sin(theta);
        const double off = rng.uniform(0.0, std::hypot(width, height)) -
                           0.5 * std::hypot(width, height);
        const double half = rng.uniform(1.5, 4.0);
        const double v = rng.uniform(-1.5, 1.5);
        const double cx = 0.5 * width;
        const double cy = 0.5 * height;
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) {
                const double s = (x - cx) * nx + (y - cy) * ny - off;
                if (std::abs(s) <= half) acc[static_cast<std::size_t>(y) * width + x] = v;
            }
        }
    }

    const auto [lo, hi] = std::minmax_element(acc.begin(), acc.end());
    const double span = std::max(*hi - *lo, 1e-12);
    std::vector<float> px(acc.size());
    for (std::size_t i = 0; i < acc.size(); ++i) {
        px[i] = static_cast<float>(0.05 + 0.9 * (acc[i] - *lo) / span);
    }
    return ImageBuffer(width, height, std::move(px));
}

ImageBuffer warp_image(const ImageBuffer& src, const AffineTransform2D& out_to_src, int out_width,
                       int out_height, float fill) {
    if (out_width < 1 || out_height < 1) {
        throw InputError("warp output must be non-empty");
    }
    std::vector<float> px(static_cast<std::size_t>(out_width) * out_height);
    for (int y = 0; y < out_height; ++y) {
        for (int x = 0; x < out_width; ++x) {
            const Point2 q = out_to_src({static_cast<double>(x), static_cast<double>(y)});
            px[static_cast<std::size_t>(y) * out_width + x] = src.sample_bilinear(q.x, q.y, fill);
        }
    }
    return ImageBuffer(out_width, out_height, std::move(px));
}

double overlap_ratio(const AffineTransform2D& t, Extent source, Extent reference, int stride) {
    if (stride < 1) throw InputError("stride must be >= 1");
    long long inside = 0;
    long long total = 0;
    for (int y = 0; y < source.height; y += stride) {
        for (int x = 0; x < source.width; x += stride) {
            const Point2 q = t({static_cast<double>(x), static_cast<double>(y)});
            ++total;
            if (q.x >= 0.0 && q.y >= 0.0 && q.x <= reference.width - 1.0 &&
                q.y <= reference.height - 1.0) {
                ++inside;
            }
        }
    }
    return total == 0 ? 0.0 : static_cast<double>(inside) / static_cast<double>(total);
}

SynthCase synth_pair(const ImageBuffer& base, Level level, std::uint64_t seed,
                     const SynthOptions& options) {
    const LevelSpec spec = level_spec(level);
    const int base_side = std::min(base.width(), base.height());
    const bool partial = spec.roa_hi < 1.0;
    int ref_side = options.reference_side;
    if (ref_side <= 0) {
        ref_side = partial ? static_cast<int>(std::lround(0.6 * base_side)) : base_side;
    }
    if (ref_side > base_side) {
        throw InputError("reference side exceeds the base image");
    }
    const int src_side = static_cast<int>(std::lround(ref_side / std::sqrt(spec.rso)));
    if (src_side < 16) {
        throw InputError("base image too small for level " + to_string(level));
    }
    const Point2 ref_offset{std::floor(0.5 * (base.width() - ref_side)),
                            std::floor(0.5 * (base.height() - ref_side))};

    CounterRng rng(seed, kStreamGeometry);
    SynthCase out;
    out.level = level;
    out.seed = seed;
    Degradations& deg = out.degradations;

    const double theta =
        options.random_rotation ? rng.uniform(0.0, 2.0 * std::numbers::pi) : 0.0;
    deg.flipped = options.random_flip ? rng.bernoulli(0.5) : false;
    deg.rotation_deg = theta * 180.0 / std::numbers::pi;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const double fx = deg.flipped ? -1.0 : 1.0;
    // Linear part R(theta) * diag(fx, 1), taking the source centre to `centre`.
    const double half_src = 0.5 * (src_side - 1);
    const auto make_t = [&](Point2 centre) {
        const double a = c * fx;
        const double b = -s;
        const double cc = s * fx;
        const double d = c;
        return AffineTransform2D({a, b, centre.x - (a * half_src + b * half_src), cc, d,
                                  centre.y - (cc * half_src + d * half_src)});
    };
    const Extent src_ext{src_side, src_side};
    const Extent ref_ext{ref_side, ref_side};
    const Extent base_ext{base.width(), base.height()};
    const auto inside_base = [&](const AffineTransform2D& t_ref) {
        const AffineTransform2D to_base =
            AffineTransform2D::translation(ref_offset.x, ref_offset.y).compose(t_ref);
        return overlap_ratio(to_base, src_ext, base_ext, std::max(1, src_side - 1)) == 1.0;
    };

    AffineTransform2D t_gt;
    if (!partial) {
        const double extent = half_src * (std::abs(c) + std::abs(s));
        const double lo = extent;
        const double hi = (ref_side - 1) - extent;
        if (hi < lo) throw InputError("source does not fit inside the reference");
        t_gt = make_t({rng.uniform(lo, hi), rng.uniform(lo, hi)});
    } else {
        const double target = rng.uniform(spec.roa_lo, spec.roa_hi);
        const Point2 ref_centre{0.5 * (ref_side - 1), 0.5 * (ref_side - 1)};
        bool placed = false;
        for (int attempt = 0; attempt < 64 && !placed; ++attempt) {
            const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
            const Point2 dir{std::cos(phi), std::sin(phi)};
            const auto at = [&](double dist) {
                return make_t({ref_centre.x + dist * dir.x, ref_centre.y + dist * dir.y});
            };
            // Overlap decreases monotonically along the ray from the centre.
            double near = 0.0;
            double far = ref_side;
            for (int it = 0; it < 40; ++it) {
                const double mid = 0.5 * (near + far);
                if (overlap_ratio(at(mid), src_ext, ref_ext, 4) >= target) {
                    near = mid;
                } else {
                    far = mid;
                }
            }
            const AffineTransform2D cand = at(near);
            if (inside_base(cand)) {
                t_gt = cand;
                placed = true;
            }
        }
        if (!placed) {
            throw InputError("base image too small to place a partial-overlap source");
        }
    }
    out.t_gt = t_gt;
    deg.roa = overlap_ratio(t_gt, src_ext, ref_ext, 2);
    deg.rso = static_cast<double>(ref_side) * ref_side / (static_cast<double>(src_side) * src_side);

    const AffineTransform2D src_to_base =
        AffineTransform2D::translation(ref_offset.x, ref_offset.y).compose(t_gt);
    out.source = warp_image(base, src_to_base, src_side, src_side);
    out.reference = warp_image(base, AffineTransform2D::translation(ref_offset.x, ref_offset.y),
                               ref_side, ref_side);

    const auto src_px = out.source.pixels();
    std::vector<float> px(src_px.begin(), src_px.end());
    if (options.occlusions && options.occluder_count > 0) {
        CounterRng orng(seed, kStreamOccluders);
        const double per_rect =
            options.occluder_max_fraction * src_side * src_side / options.occluder_count;
        for (int r = 0; r < options.occluder_count; ++r) {
            const double aspect = orng.uniform(0.5, 2.0);
            const double area = orng.uniform(0.5, 1.0) * per_rect;
            Rect rect;
            rect.w = std::clamp(static_cast<int>(std::sqrt(area * aspect)), 1, src_side);
            rect.h = std::clamp(static_cast<int>(area / std::max(rect.w, 1)), 1, src_side);
            rect.x = static_cast<int>(orng.uniform_index(static_cast<std::uint64_t>(src_side - rect.w + 1)));
            rect.y = static_cast<int>(orng.uniform_index(static_cast<std::uint64_t>(src_side - rect.h + 1)));
            rect.value = static_cast<float>(orng.uniform01());
            for (int y = rect.y; y < rect.y + rect.h; ++y) {
                for (int x = rect.x; x < rect.x + rect.w; ++x) {
                    px[static_cast<std::size_t>(y) * src_side + x] = rect.value;
                }
            }
            deg.occluders.push_back(rect);
        }
    }
    if (options.speckle) {
        if (!(options.looks > 0.0)) throw InputError("looks must be positive");
        CounterRng srng(seed, kStreamSpeckle);
        for (float& v : px) {
            v = static_cast<float>(std::clamp(v * srng.gamma(options.looks, 1.0 / options.looks),
                                              0.0, 1.0));
        }
        deg.speckle_looks = options.looks;
    }
    out.source = ImageBuffer(src_side, src_side, std::move(px));
    return out;
}

BenchRow run_case(const SynthCase& c, const EngineConfig& cfg, bool timing) {
    BenchRow row;
    row.level = c.level;
    row.seed = c.seed;
    row.case_id = to_string(c.level) + "_s" + std::to_string(c.seed);
    row.step = cfg.step;
    row.beta = cfg.beta;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        const RegistrationResult r = register_images(c.source, c.reference, cfg);
        row.mee_px = mee(r.solve.t_optimal, c.t_gt, {c.source.width(), c.source.height()},
                         {c.reference.width(), c.reference.height()}, cfg.mee_stride);
    } catch (const NoSolutionError&) {
        row.mee_px = std::numeric_limits<double>::infinity();
    }
    const auto t1 = std::chrono::steady_clock::now();
    row.wall_ms = timing ? std::chrono::duration<double, std::milli>(t1 - t0).count() : 0.0;
    for (int i = 0; i < 4; ++i) row.success[i] = row.mee_px <= kDefaultThresholds[i];
    return row;
}

void write_bench_header(std::ostream& out, bool sweep_columns) {
    out << "case_id,level,seed,mee_px,success25,success50,success75,success100,wall_ms";
    if (sweep_columns) out << ",step,beta";
    out << '\n';
}

void write_bench_row(std::ostream& out, const BenchRow& row, bool sweep_columns) {
    char buf[64];
    out << row.case_id << ',' << to_string(row.level) << ',' << row.seed << ',';
    if (std::isinf(row.mee_px)) {
        out << "inf";
    } else {
        std::snprintf(buf, sizeof buf, "%.4f", row.mee_px);
        out << buf;
    }
    for (bool s : row.success) out << ',' << (s ? 1 : 0);
    std::snprintf(buf, sizeof buf, "%.1f", row.wall_ms);
    out << ',' << buf;
    if (sweep_columns) {
        std::snprintf(buf, sizeof buf, "%g", row.beta);
        out << ',' << row.step << ',' << buf;
    }
    out << '\n';
}

}  // namespace gridreg
