#include "gridreg/image_io.hpp"

#include <png.h>
#include <tiffio.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <vector>

#include "gridreg/error.hpp"

namespace gridreg {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const noexcept {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// Converts interleaved integer samples to a gray image.
ImageBuffer from_samples(int width, int height, int channels, const std::vector<double>& samples,
                         double max_value) {
    if (channels == 1) {
        std::vector<float> gray(samples.size());
        for (std::size_t i = 0; i < samples.size(); ++i) {
            gray[i] = static_cast<float>(samples[i] / max_value);
        }
        return ImageBuffer(width, height, std::move(gray));
    }
    RgbRaster rgb{width, height, std::vector<float>(static_cast<std::size_t>(width) * height * 3)};
    const std::size_t n = static_cast<std::size_t>(width) * height;
    for (std::size_t i = 0; i < n; ++i) {
        for (int c = 0; c < 3; ++c) {
            rgb.data[3 * i + c] = static_cast<float>(samples[i * channels + c] / max_value);
        }
    }
    return to_grayscale(rgb);
}

ImageBuffer load_png(const std::string& path) {
    FilePtr file(std::fopen(path.c_str(), "rb"));
    if (!file) {
        throw IoError("cannot open " + path);
    }
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("libpng initialisation failed");
    }
    std::vector<unsigned char> raw;
    std::vector<png_bytep> rows;
    int width = 0, height = 0, channels = 0, depth = 0;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError("corrupt PNG " + path, 0);
    }
    png_init_io(png, file.get());
    png_read_info(png, info);
    const png_byte color = png_get_color_type(png, info);
    depth = png_get_bit_depth(png, info);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    if (depth == 16) png_set_swap(png);
    png_read_update_info(png, info);

    width = static_cast<int>(png_get_image_width(png, info));
    height = static_cast<int>(png_get_image_height(png, info));
    channels = png_get_channels(png, info);
    depth = png_get_bit_depth(png, info);
    if ((channels != 1 && channels != 3) || (depth != 8 && depth != 16)) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError("unsupported PNG layout in " + path, 0);
    }
    const std::size_t row_bytes = png_get_rowbytes(png, info);
    raw.resize(row_bytes * height);
    rows.resize(height);
    for (int y = 0; y < height; ++y) rows[y] = raw.data() + row_bytes * y;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    std::vector<double> samples(static_cast<std::size_t>(width) * height * channels);
    if (depth == 8) {
        for (std::size_t i = 0; i < samples.size(); ++i) samples[i] = raw[i];
    } else {
        for (std::size_t i = 0; i < samples.size(); ++i) {
            samples[i] = static_cast<double>(raw[2 * i] | (raw[2 * i + 1] << 8));
        }
    }
    return from_samples(width, height, channels, samples, depth == 8 ? 255.0 : 65535.0);
}

ImageBuffer load_tiff(const std::string& path) {
    TIFFSetWarningHandler(nullptr);
    std::unique_ptr<TIFF, void (*)(TIFF*)> tif(TIFFOpen(path.c_str(), "r"),
                                               [](TIFF* t) { if (t) TIFFClose(t); });
    if (!tif) {
        throw IoError("cannot open TIFF " + path);
    }
    std::uint32_t width = 0, height = 0;
    std::uint16_t depth = 0, spp = 1, planar = PLANARCONFIG_CONTIG, format = SAMPLEFORMAT_UINT;
    TIFFGetField(tif.get(), TIFFTAG_IMAGEWIDTH, &width);
    TIFFGetField(tif.get(), TIFFTAG_IMAGELENGTH, &height);
    TIFFGetFieldDefaulted(tif.get(), TIFFTAG_BITSPERSAMPLE, &depth);
    TIFFGetFieldDefaulted(tif.get(), TIFFTAG_SAMPLESPERPIXEL, &spp);
    TIFFGetFieldDefaulted(tif.get(), TIFFTAG_PLANARCONFIG, &planar);
    TIFFGetFieldDefaulted(tif.get(), TIFFTAG_SAMPLEFORMAT, &format);
    if ((depth != 8 && depth != 16) || format != SAMPLEFORMAT_UINT ||
        planar != PLANARCONFIG_CONTIG || (spp != 1 && spp != 3 && spp != 4) || width == 0 ||
        height == 0) {
        throw FormatError("unsupported TIFF layout in " + path, 0);
    }
    const int channels = spp == 1 ? 1 : 3;
    std::vector<unsigned char> line(TIFFScanlineSize(tif.get()));
    std::vector<double> samples(static_cast<std::size_t>(width) * height * channels);
    for (std::uint32_t y = 0; y < height; ++y) {
        if (TIFFReadScanline(tif.get(), line.data(), y) < 0) {
            throw FormatError("truncated TIFF " + path, 0);
        }
        for (std::uint32_t x = 0; x < width; ++x) {
            for (int c = 0; c < channels; ++c) {
                const std::size_t s = static_cast<std::size_t>(x) * spp + c;
                double v;
                if (depth == 8) {
                    v = line[s];
                } else {
                    std::uint16_t u;
                    std::memcpy(&u, line.data() + 2 * s, 2);
                    v = u;
                }
                samples[(static_cast<std::size_t>(y) * width + x) * channels + c] = v;
            }
        }
    }
    return from_samples(static_cast<int>(width), static_cast<int>(height), channels, samples,
                        depth == 8 ? 255.0 : 65535.0);
}

}  // namespace

ImageBuffer load_image(const std::string& path) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) {
        throw IoError("cannot open " + path);
    }
    std::array<unsigned char, 8> magic{};
    probe.read(reinterpret_cast<char*>(magic.data()), magic.size());
    const auto got = probe.gcount();
    if (got >= 8 && png_sig_cmp(magic.data(), 0, 8) == 0) {
        return load_png(path);
    }
    if (got >= 4 && ((magic[0] == 'I' && magic[1] == 'I' && magic[2] == 42 && magic[3] == 0) ||
                     (magic[0] == 'M' && magic[1] == 'M' && magic[2] == 0 && magic[3] == 42))) {
        return load_tiff(path);
    }
    throw FormatError("not a PNG or TIFF file: " + path, 0);
}

void save_png(const ImageBuffer& image, const std::string& path, int bit_depth) {
    if (bit_depth != 8 && bit_depth != 16) {
        throw InputError("PNG bit depth must be 8 or 16");
    }
    FilePtr file(std::fopen(path.c_str(), "wb"));
    if (!file) {
        throw IoError("cannot create " + path);
    }
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw IoError("libpng initialisation failed");
    }
    const int bytes = bit_depth / 8;
    std::vector<unsigned char> raw(image.size() * bytes);
    const double max_value = bit_depth == 8 ? 255.0 : 65535.0;
    const auto px = image.pixels();
    for (std::size_t i = 0; i < px.size(); ++i) {
        const auto v = static_cast<unsigned>(std::lround(px[i] * max_value));
        if (bytes == 1) {
            raw[i] = static_cast<unsigned char>(v);
        } else {
            raw[2 * i] = static_cast<unsigned char>(v >> 8);
            raw[2 * i + 1] = static_cast<unsigned char>(v & 0xff);
        }
    }
    std::vector<png_bytep> rows(image.height());
    for (int y = 0; y < image.height(); ++y) {
        rows[y] = raw.data() + static_cast<std::size_t>(y) * image.width() * bytes;
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("failed writing " + path);
    }
    png_init_io(png, file.get());
    png_set_IHDR(png, info, image.width(), image.height(), bit_depth, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

}  // namespace gridreg
