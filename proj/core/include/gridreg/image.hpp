#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gridreg {

/// Single-channel raster, row-major, intensities in [0,1].
/// Pixel (x, y): x grows to the right, y grows downward.
class ImageBuffer {
public:
    ImageBuffer() = default;

    /// Zero-filled image. Throws InputError unless width, height >= 1.
    ImageBuffer(int width, int height);

    /// Takes ownership of `data`; validates size and range.
    ImageBuffer(int width, int height, std::vector<float> data);

    static ImageBuffer constant(int width, int height, float value);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    bool empty() const noexcept { return data_.empty(); }
    std::size_t size() const noexcept { return data_.size(); }

    float at(int x, int y) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }
    float& at(int x, int y) { return data_[static_cast<std::size_t>(y) * width_ + x]; }

    std::span<const float> pixels() const noexcept { return data_; }
    std::span<float> pixels() noexcept { return data_; }

    /// Bilinear sample at a continuous pixel position. Returns `fill` when
    /// (x, y) is outside [0, width-1] x [0, height-1].
    float sample_bilinear(double x, double y, float fill = 0.0f) const;

    /// Clamp every value into [0,1] after in-place arithmetic.
    void clamp_unit();

    friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<float> data_;
};

/// Interleaved RGB raster (r, g, b per pixel), channels in [0,1].
struct RgbRaster {
    int width = 0;
    int height = 0;
    std::vector<float> data;
};

/// BT.601 luma: 0.299 R + 0.587 G + 0.114 B.
ImageBuffer to_grayscale(const RgbRaster& rgb);

}  // namespace gridreg
