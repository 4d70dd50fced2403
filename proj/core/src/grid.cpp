#include "gridreg/grid.hpp"

#include <algorithm>
#include <string>

#include "gridreg/error.hpp"

namespace gridreg {

GridSpec gridize(int width, int height, int patch, int step) {
    if (step < 1) {
        throw InputError("grid step must be >= 1");
    }
    if (patch < 1) {
        throw InputError("patch size must be >= 1");
    }
    if (patch > std::min(width, height)) {
        throw InputError("patch " + std::to_string(patch) + " larger than image " +
                         std::to_string(width) + "x" + std::to_string(height));
    }
    GridSpec spec;
    spec.patch = patch;
    spec.step = step;
    spec.n_w = (width - patch) / step + 1;
    spec.n_h = (height - patch) / step + 1;
    return spec;
}

GridSpec gridize(const ImageBuffer& image, int patch, int step) {
    return gridize(image.width(), image.height(), patch, step);
}

ImageBuffer extract_patch(const ImageBuffer& image, const GridSpec& spec, int index) {
    if (index < 0 || index >= spec.size()) {
        throw IndexError("grid index " + std::to_string(index) + " outside [0, " +
                         std::to_string(spec.size()) + ")");
    }
    if (spec.covered_width() > image.width() || spec.covered_height() > image.height()) {
        throw DimensionError("grid does not fit inside the image");
    }
    const int x0 = spec.col(index) * spec.step;
    const int y0 = spec.row(index) * spec.step;
    std::vector<float> out(static_cast<std::size_t>(spec.patch) * spec.patch);
    const auto src = image.pixels();
    for (int y = 0; y < spec.patch; ++y) {
        const auto row_begin = src.begin() + static_cast<std::ptrdiff_t>(y0 + y) * image.width() + x0;
        std::copy(row_begin, row_begin + spec.patch,
                  out.begin() + static_cast<std::ptrdiff_t>(y) * spec.patch);
    }
    return ImageBuffer(spec.patch, spec.patch, std::move(out));
}

}  // namespace gridreg
