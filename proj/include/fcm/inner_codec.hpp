#pragma once

#include <span>
#include <string>

#include "fcm/conversion.hpp"

namespace fcm {

enum class InnerCodecId : uint8_t {
  kRaw = 0,       // 16-bit little-endian samples, stored
  kLossless = 1,  // RAW payload behind a general-purpose lossless compressor
  kExternal = 2,  // out-of-process video encoder fed raw 4:0:0 video
};

const char* to_string(InnerCodecId id);
std::optional<InnerCodecId> codec_from_string(std::string_view name);
std::optional<InnerCodecId> codec_from_id(uint8_t raw);

struct InnerConfig {
  InnerCodecId codec = InnerCodecId::kLossless;
  int32_t quality = 0;   // codec-specific: compression level, QP, ...
  uint16_t gop_hint = 8;
  bool low_delay = true;
  double fps = 30.0;  // substituted into the external command template
  // Command templates with {input} {output} {qp} {width} {height} {fps}
  // {frames} placeholders. Only used by kExternal.
  std::string external_encode_cmd;
  std::string external_decode_cmd;

  void validate() const;
};

// Compresses a sequence of equally-sized quantized frames into an opaque
// payload. RAW and LOSSLESS are bit-exact inverses of each other's decode.
std::vector<uint8_t> inner_encode(std::span<const QuantizedFrame> frames,
                                  const InnerConfig& cfg);
std::vector<QuantizedFrame> inner_decode(std::span<const uint8_t> payload,
                                         const InnerConfig& cfg,
                                         const PackGeometry& geom,
                                         uint32_t frame_count);

// Byte-level core of the LOSSLESS codec, also used for the float debug path.
// A one-byte marker selects stored vs deflated so output never grows beyond
// input + 1.
std::vector<uint8_t> lossless_compress(std::span<const uint8_t> bytes,
                                       int level);
std::vector<uint8_t> lossless_decompress(std::span<const uint8_t> payload,
                                         uint64_t expected_size);

}  // namespace fcm
