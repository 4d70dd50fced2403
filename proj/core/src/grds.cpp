#include "gridreg/grds.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "gridreg/error.hpp"

namespace gridreg {

namespace {

constexpr unsigned char kMagic[4] = {0x47, 0x52, 0x44, 0x53};

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::vector<unsigned char>& in, std::size_t offset) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[offset + i]) << (8 * i);
    return v;
}

}  // namespace

std::vector<unsigned char> encode_grds(const DescriptorSet& set) {
    if (set.dim < 1 || set.grid.size() < 1 ||
        set.data.size() != static_cast<std::size_t>(set.grid.size()) * set.dim) {
        throw DimensionError("descriptor set payload does not match its grid and dimension");
    }
    std::vector<unsigned char> out;
    out.reserve(kGrdsHeaderBytes + set.data.size() * 4);
    out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
    put_u32(out, kGrdsVersion);
    put_u32(out, static_cast<std::uint32_t>(set.grid.n_w));
    put_u32(out, static_cast<std::uint32_t>(set.grid.n_h));
    put_u32(out, static_cast<std::uint32_t>(set.dim));
    put_u32(out, static_cast<std::uint32_t>(set.grid.patch));
    put_u32(out, static_cast<std::uint32_t>(set.grid.step));
    out.push_back(set.normalized ? 1 : 0);
    out.insert(out.end(), 3, 0);
    for (float v : set.data) put_u32(out, std::bit_cast<std::uint32_t>(v));
    return out;
}

DescriptorSet decode_grds(const std::vector<unsigned char>& bytes, std::string modality) {
    if (bytes.size() < 4) {
        throw FormatError("GRDS file too short for magic", bytes.size());
    }
    if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
        throw FormatError("bad GRDS magic", 0);
    }
    if (bytes.size() < kGrdsHeaderBytes) {
        throw FormatError("GRDS header truncated", bytes.size());
    }
    const std::uint32_t version = get_u32(bytes, 4);
    if (version != kGrdsVersion) {
        throw FormatError("unsupported GRDS version " + std::to_string(version), 4);
    }
    const std::uint32_t n_w = get_u32(bytes, 8);
    const std::uint32_t n_h = get_u32(bytes, 12);
    const std::uint32_t dim = get_u32(bytes, 16);
    const std::uint32_t patch = get_u32(bytes, 20);
    const std::uint32_t step = get_u32(bytes, 24);
    const unsigned char normalized = bytes[28];
    const auto bad_field = [](const char* name, std::size_t offset) {
        return FormatError(std::string("invalid GRDS header field ") + name, offset);
    };
    constexpr std::uint32_t kMaxField = 1u << 30;
    if (n_w == 0 || n_w > kMaxField) throw bad_field("n_w", 8);
    if (n_h == 0 || n_h > kMaxField) throw bad_field("n_h", 12);
    if (dim == 0 || dim > kMaxField) throw bad_field("dim", 16);
    if (patch == 0 || patch > kMaxField) throw bad_field("patch", 20);
    if (step == 0 || step > kMaxField) throw bad_field("step", 24);
    if (normalized > 1) throw bad_field("normalized", 28);

    const std::uint64_t count = static_cast<std::uint64_t>(n_w) * n_h * dim;
    const std::uint64_t expected = kGrdsHeaderBytes + count * 4;
    if (bytes.size() < expected) {
        throw FormatError("GRDS payload truncated: expected " + std::to_string(count * 4) +
                              " bytes, found " + std::to_string(bytes.size() - kGrdsHeaderBytes),
                          bytes.size());
    }
    if (bytes.size() > expected) {
        throw FormatError("trailing bytes after GRDS payload", expected);
    }
    DescriptorSet set;
    set.grid.n_w = static_cast<int>(n_w);
    set.grid.n_h = static_cast<int>(n_h);
    set.grid.patch = static_cast<int>(patch);
    set.grid.step = static_cast<int>(step);
    set.dim = static_cast<int>(dim);
    set.normalized = normalized == 1;
    set.modality = std::move(modality);
    set.data.resize(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        set.data[i] = std::bit_cast<float>(get_u32(bytes, kGrdsHeaderBytes + 4 * i));
    }
    return set;
}

void write_descriptor_file(const DescriptorSet& set, const std::string& path) {
    const auto bytes = encode_grds(set);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot create " + path);
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw IoError("failed writing " + path);
    }
}

DescriptorSet read_descriptor_file(const std::string& path, std::string modality) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path);
    }
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    return decode_grds(bytes, std::move(modality));
}

}  // namespace gridreg
