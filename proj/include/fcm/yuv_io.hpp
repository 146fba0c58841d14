#pragma once

#include <filesystem>
#include <span>

#include "fcm/conversion.hpp"

namespace fcm {

// Raw monochrome (4:0:0) planar video, one 16-bit little-endian container
// per sample, low bits carrying the payload. This is the piping format for
// external encoders.

std::vector<uint8_t> yuv400_16le_bytes(std::span<const QuantizedFrame> frames);
void write_yuv400_16le(const std::filesystem::path& path,
                       std::span<const QuantizedFrame> frames);
std::vector<QuantizedFrame> parse_yuv400_16le(std::span<const uint8_t> bytes,
                                              const PackGeometry& geom,
                                              uint32_t frame_count);
std::vector<QuantizedFrame> read_yuv400_16le(const std::filesystem::path& path,
                                             const PackGeometry& geom,
                                             uint32_t frame_count);

}  // namespace fcm
