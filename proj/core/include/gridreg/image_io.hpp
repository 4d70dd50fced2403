#pragma once

#include <string>

#include "gridreg/image.hpp"

namespace gridreg {

/// Reads an 8- or 16-bit grayscale or RGB(A) PNG or TIFF. Integer samples are
/// divided by the type maximum; RGB is converted with to_grayscale and alpha
/// is ignored. The format is chosen from the file signature.
/// Throws IoError (unreadable) or FormatError (unsupported layout).
ImageBuffer load_image(const std::string& path);

/// Writes a grayscale PNG with 8 or 16 bits per sample.
void save_png(const ImageBuffer& image, const std::string& path, int bit_depth = 8);

}  // namespace gridreg
