#include "gridreg/descriptors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "gridreg/error.hpp"
#include "gridreg/parallel.hpp"

namespace gridreg {

namespace {

constexpr int kBlocks = 16;
constexpr double kMinStd = 1e-8;

// z-score then L2-normalise; zero vector when the spread vanishes.
std::vector<float> standardize(const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= n;
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    const double sd = std::sqrt(var / n);
    std::vector<float> out(v.size(), 0.0f);
    if (sd < kMinStd) {
        return out;
    }
    double norm2 = 0.0;
    std::vector<double> z(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        z[i] = (v[i] - mean) / sd;
        norm2 += z[i] * z[i];
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<float>(z[i] * inv);
    return out;
}

// Mean over the (2r+1)^2 window around each pixel, window clipped to the patch.
std::vector<double> box_filter(const ImageBuffer& patch, int r) {
    const int w = patch.width();
    const int h = patch.height();
    std::vector<double> integral(static_cast<std::size_t>(w + 1) * (h + 1), 0.0);
    for (int y = 0; y < h; ++y) {
        double row = 0.0;
        for (int x = 0; x < w; ++x) {
            row += patch.at(x, y);
            integral[(y + 1) * (w + 1) + x + 1] = integral[y * (w + 1) + x + 1] + row;
        }
    }
    std::vector<double> out(static_cast<std::size_t>(w) * h);
    for (int y = 0; y < h; ++y) {
        const int y0 = std::max(0, y - r), y1 = std::min(h, y + r + 1);
        for (int x = 0; x < w; ++x) {
            const int x0 = std::max(0, x - r), x1 = std::min(w, x + r + 1);
            const double s = integral[y1 * (w + 1) + x1] - integral[y0 * (w + 1) + x1] -
                             integral[y1 * (w + 1) + x0] + integral[y0 * (w + 1) + x0];
            out[static_cast<std::size_t>(y) * w + x] = s / ((x1 - x0) * (y1 - y0));
        }
    }
    return out;
}

double bilinear(const std::vector<double>& img, int w, int h, double x, double y) {
    x = std::clamp(x, 0.0, static_cast<double>(w - 1));
    y = std::clamp(y, 0.0, static_cast<double>(h - 1));
    const int x0 = std::min(static_cast<int>(x), w - 2);
    const int y0 = std::min(static_cast<int>(y), h - 2);
    const double fx = x - x0, fy = y - y0;
    const auto at = [&](int xx, int yy) { return img[static_cast<std::size_t>(yy) * w + xx]; };
    return (at(x0, y0) * (1 - fx) + at(x0 + 1, y0) * fx) * (1 - fy) +
           (at(x0, y0 + 1) * (1 - fx) + at(x0 + 1, y0 + 1) * fx) * fy;
}

}  // namespace

std::vector<float> baseline_descriptor(const ImageBuffer& patch) {
    const int side = patch.width();
    if (side != patch.height() || side % kBlocks != 0 || side == 0) {
        throw InputError("baseline descriptor needs a square patch with side divisible by 16, got " +
                         std::to_string(patch.width()) + "x" + std::to_string(patch.height()));
    }
    const int block = side / kBlocks;
    std::vector<double> means(kBlocks * kBlocks, 0.0);
    for (int y = 0; y < side; ++y) {
        for (int x = 0; x < side; ++x) {
            means[(y / block) * kBlocks + x / block] += patch.at(x, y);
        }
    }
    const double inv_area = 1.0 / (static_cast<double>(block) * block);
    for (double& m : means) m *= inv_area;
    return standardize(means);
}

std::vector<float> polar_descriptor(const ImageBuffer& patch, const PolarDescriptorParams& p) {
    const int side = patch.width();
    if (side != patch.height() || side < 8) {
        throw InputError("polar descriptor needs a square patch of side >= 8");
    }
    if (p.rings < 1 || p.angles < 2 || p.harmonics < 1 || p.harmonics > p.angles / 2 + 1) {
        throw InputError("invalid polar descriptor parameters");
    }
    const double max_radius = (side - 1) / 2.0;
    const double spacing = max_radius / (p.rings + 0.5);
    const int box_radius = std::max(1, static_cast<int>(std::lround(spacing / 2.0)));
    const std::vector<double> smooth = box_filter(patch, box_radius);
    const double cx = (side - 1) / 2.0;
    const double cy = (side - 1) / 2.0;

    std::vector<double> samples(static_cast<std::size_t>(p.rings) * p.angles);
    for (int k = 0; k < p.rings; ++k) {
        const double radius = spacing * (k + 1);
        for (int j = 0; j < p.angles; ++j) {
            const double theta = 2.0 * std::numbers::pi * j / p.angles;
            samples[static_cast<std::size_t>(k) * p.angles + j] =
                bilinear(smooth, side, side, cx + radius * std::cos(theta),
                         cy + radius * std::sin(theta));
        }
    }
    double mean = 0.0;
    for (double s : samples) mean += s;
    mean /= static_cast<double>(samples.size());
    double var = 0.0;
    for (double s : samples) var += (s - mean) * (s - mean);
    const double sd = std::sqrt(var / static_cast<double>(samples.size()));
    const int dim = p.rings * p.harmonics;
    if (sd < kMinStd) {
        return std::vector<float>(dim, 0.0f);
    }
    for (double& s : samples) s = (s - mean) / sd;

    std::vector<double> features(dim);
    for (int k = 0; k < p.rings; ++k) {
        const double* ring = samples.data() + static_cast<std::size_t>(k) * p.angles;
        for (int h = 0; h < p.harmonics; ++h) {
            double re = 0.0, im = 0.0;
            for (int j = 0; j < p.angles; ++j) {
                const double phase = 2.0 * std::numbers::pi * h * j / p.angles;
                re += ring[j] * std::cos(phase);
                im -= ring[j] * std::sin(phase);
            }
            // h = 0 keeps its sign: the ring mean is already invariant.
            features[k * p.harmonics + h] =
                (h == 0 ? re : std::hypot(re, im)) / p.angles;
        }
    }
    return standardize(features);
}

DescriptorFn make_baseline_provider() {
    return [](const ImageBuffer& patch) { return baseline_descriptor(patch); };
}

DescriptorFn make_polar_provider(PolarDescriptorParams params) {
    return [params](const ImageBuffer& patch) { return polar_descriptor(patch, params); };
}

void normalize_rows(DescriptorSet& set) {
    for (int i = 0; i < set.rows(); ++i) {
        auto r = set.row(i);
        double norm2 = 0.0;
        for (float v : r) norm2 += static_cast<double>(v) * v;
        const double norm = std::sqrt(norm2);
        if (norm < 1e-12) {
            std::fill(r.begin(), r.end(), 0.0f);
            continue;
        }
        for (float& v : r) v = static_cast<float>(v / norm);
    }
    set.normalized = true;
}

DescriptorSet compute_descriptors(const ImageBuffer& image, const GridSpec& spec,
                                  const DescriptorFn& provider, std::string modality) {
    const int n = spec.size();
    if (n < 1) {
        throw InputError("grid has no points");
    }
    std::vector<std::vector<float>> rows(n);
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
        rows[i] = provider(extract_patch(image, spec, static_cast<int>(i)));
    });
    const std::size_t dim = rows[0].size();
    if (dim == 0) {
        throw ContractError("descriptor provider returned an empty vector");
    }
    DescriptorSet set;
    set.grid = spec;
    set.dim = static_cast<int>(dim);
    set.modality = std::move(modality);
    set.data.resize(static_cast<std::size_t>(n) * dim);
    for (int i = 0; i < n; ++i) {
        if (rows[i].size() != dim) {
            throw ContractError("descriptor provider returned dimension " +
                                std::to_string(rows[i].size()) + " at grid index " +
                                std::to_string(i) + ", expected " + std::to_string(dim));
        }
        for (float v : rows[i]) {
            if (!std::isfinite(v)) {
                throw ContractError("descriptor provider returned a non-finite value at grid index " +
                                    std::to_string(i));
            }
        }
        std::copy(rows[i].begin(), rows[i].end(), set.row(i).begin());
    }
    normalize_rows(set);
    return set;
}

}  // namespace gridreg
