#include "gridreg/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gridreg/error.hpp"

namespace gridreg {

namespace {

void check_dims(int width, int height) {
    if (width < 1 || height < 1) {
        throw InputError("image dimensions must be >= 1, got " + std::to_string(width) + "x" +
                         std::to_string(height));
    }
}

}  // namespace

ImageBuffer::ImageBuffer(int width, int height)
    : width_(width), height_(height) {
    check_dims(width, height);
    data_.assign(static_cast<std::size_t>(width) * height, 0.0f);
}

ImageBuffer::ImageBuffer(int width, int height, std::vector<float> data)
    : width_(width), height_(height), data_(std::move(data)) {
    check_dims(width, height);
    if (data_.size() != static_cast<std::size_t>(width) * height) {
        throw DimensionError("image data length " + std::to_string(data_.size()) +
                             " does not match " + std::to_string(width) + "x" +
                             std::to_string(height));
    }
    for (float v : data_) {
        if (!std::isfinite(v) || v < 0.0f || v > 1.0f) {
            throw InputError("image intensity outside [0,1]: " + std::to_string(v));
        }
    }
}

ImageBuffer ImageBuffer::constant(int width, int height, float value) {
    check_dims(width, height);
    return ImageBuffer(width, height,
                       std::vector<float>(static_cast<std::size_t>(width) * height, value));
}

float ImageBuffer::sample_bilinear(double x, double y, float fill) const {
    if (!(x >= 0.0 && y >= 0.0 && x <= width_ - 1 && y <= height_ - 1)) {
        return fill;
    }
    const int x0 = std::min(static_cast<int>(x), width_ - 1);
    const int y0 = std::min(static_cast<int>(y), height_ - 1);
    const int x1 = std::min(x0 + 1, width_ - 1);
    const int y1 = std::min(y0 + 1, height_ - 1);
    const double fx = x - x0;
    const double fy = y - y0;
    const double top = at(x0, y0) * (1.0 - fx) + at(x1, y0) * fx;
    const double bottom = at(x0, y1) * (1.0 - fx) + at(x1, y1) * fx;
    return static_cast<float>(top * (1.0 - fy) + bottom * fy);
}

void ImageBuffer::clamp_unit() {
    for (float& v : data_) {
        v = std::clamp(v, 0.0f, 1.0f);
    }
}

ImageBuffer to_grayscale(const RgbRaster& rgb) {
    if (rgb.width < 1 || rgb.height < 1 ||
        rgb.data.size() != static_cast<std::size_t>(rgb.width) * rgb.height * 3) {
        throw DimensionError("RGB raster has " + std::to_string(rgb.data.size()) +
                             " channel values for " + std::to_string(rgb.width) + "x" +
                             std::to_string(rgb.height) + " pixels");
    }
    std::vector<float> gray(static_cast<std::size_t>(rgb.width) * rgb.height);
    for (std::size_t i = 0; i < gray.size(); ++i) {
        const float r = rgb.data[3 * i];
        const float g = rgb.data[3 * i + 1];
        const float b = rgb.data[3 * i + 2];
        if (r < 0.0f || r > 1.0f || g < 0.0f || g > 1.0f || b < 0.0f || b > 1.0f) {
            throw InputError("RGB channel value outside [0,1]");
        }
        const double y = 0.299 * r + 0.587 * g + 0.114 * b;
        gray[i] = std::clamp(static_cast<float>(y), 0.0f, 1.0f);
    }
    return ImageBuffer(rgb.width, rgb.height, std::move(gray));
}

}  // namespace gridreg
