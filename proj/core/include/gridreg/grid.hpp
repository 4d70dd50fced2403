#pragma once

#include "gridreg/affine.hpp"
#include "gridreg/image.hpp"

namespace gridreg {

/// Sliding-window grid over an image. Patch (k_x, k_y) has its top-left
/// corner at (k_x * step, k_y * step) and is fully contained in the image;
/// its centre is the grid point. Index i = i_y * n_w + i_x.
struct GridSpec {
    int patch = 256;
    int step = 16;
    int n_w = 0;
    int n_h = 0;

    int size() const noexcept { return n_w * n_h; }
    int col(int index) const noexcept { return index % n_w; }
    int row(int index) const noexcept { return index / n_w; }

    Point2 top_left(int index) const noexcept {
        return {static_cast<double>(col(index) * step), static_cast<double>(row(index) * step)};
    }
    /// Grid point (patch centre), using integer half patch.
    Point2 center(int index) const noexcept {
        return {static_cast<double>(col(index) * step + patch / 2),
                static_cast<double>(row(index) * step + patch / 2)};
    }

    /// Extent covered by the grid: (n - 1) * step + patch per axis.
    int covered_width() const noexcept { return (n_w - 1) * step + patch; }
    int covered_height() const noexcept { return (n_h - 1) * step + patch; }

    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Grid count per axis: floor((dim - patch) / step) + 1.
/// Throws InputError if patch > min(width, height), patch < 1 or step < 1.
GridSpec gridize(int width, int height, int patch, int step);
GridSpec gridize(const ImageBuffer& image, int patch, int step);

/// Copy of the patch at grid index `index`. Throws IndexError when out of range
/// and DimensionError when `spec` does not fit `image`.
ImageBuffer extract_patch(const ImageBuffer& image, const GridSpec& spec, int index);

}  // namespace gridreg
