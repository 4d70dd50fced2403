#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gridreg/descriptors.hpp"

namespace gridreg {

/// GRDS descriptor file, little-endian:
///
///   offset  size  field
///        0     4  magic "GRDS" (0x47 0x52 0x44 0x53)
///        4     4  u32 version = 1
///        8     4  u32 n_w
///       12     4  u32 n_h
///       16     4  u32 dim
///       20     4  u32 patch
///       24     4  u32 step
///       28     1  u8 normalized (0/1)
///       29     3  padding (zero)
///       32     .  n_h * n_w * dim IEEE-754 f32, grid row-major, descriptor-contiguous
///
/// The modality tag is not stored; readers supply it.
inline constexpr std::uint32_t kGrdsVersion = 1;
inline constexpr std::size_t kGrdsHeaderBytes = 32;

std::vector<unsigned char> encode_grds(const DescriptorSet& set);

/// Throws FormatError (with byte offset) on bad magic, version mismatch,
/// invalid header fields, truncated or oversized payload.
DescriptorSet decode_grds(const std::vector<unsigned char>& bytes, std::string modality = {});

void write_descriptor_file(const DescriptorSet& set, const std::string& path);
DescriptorSet read_descriptor_file(const std::string& path, std::string modality = {});

}  // namespace gridreg
