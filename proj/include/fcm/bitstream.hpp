#pragma once

#include <span>
#include <vector>

#include "fcm/conversion.hpp"
#include "fcm/inner_codec.hpp"
#include "fcm/reduction.hpp"
#include "fcm/tensor.hpp"

namespace fcm {

// Per-frame quantization range, stored in the header region so the header
// alone fully describes reconstruction.
struct FrameRange {
  float x_min = 0.f;
  float x_max = 0.f;
};

// FCMB v1 side-channel header. Exact byte layout in docs/fcmb_format.md.
// bitdepth 8..16 selects quantized payloads; 32 is the no-quantization debug
// mode where the payload carries raw 32-bit float samples.
struct FcmHeader {
  uint16_t version = 1;
  ReducerId reducer = ReducerId::kS2D;
  InnerCodecId inner_codec = InnerCodecId::kLossless;
  bool temporal_enabled = false;
  uint32_t original_frame_count = 0;
  float frame_rate = 0.f;
  uint16_t gain_index = 0;
  std::vector<LayerShape> layer_shapes;
  uint32_t fused_channels = 0;
  uint32_t fused_height = 0;
  uint32_t fused_width = 0;
  uint16_t grid_rows = 0;
  uint16_t grid_cols = 0;
  uint8_t bitdepth = 10;
  std::vector<FrameRange> frame_ranges;  // one per coded frame
  int32_t quality = 0;
  uint16_t gop_hint = 8;
  bool low_delay = true;
  uint64_t payload_length = 0;

  uint32_t coded_frame_count() const {
    return temporal_enabled ? (original_frame_count + 1) / 2
                            : original_frame_count;
  }
  bool float_mode() const { return bitdepth == 32; }
  PackGeometry pack_geometry() const;
  uint64_t serialized_size() const;

  void validate() const;  // throws ConsistencyError
};

constexpr uint64_t fcmb_header_size(uint64_t layer_count,
                                    uint64_t coded_frames) {
  return 53 + 10 * layer_count + 8 * coded_frames;
}

std::vector<uint8_t> mux(const FcmHeader& header,
                         std::span<const uint8_t> payload);

struct DemuxResult {
  FcmHeader header;
  std::vector<uint8_t> payload;
};

DemuxResult demux(std::span<const uint8_t> stream);

// Header-only parse; ignores whether the payload bytes are present. Used by
// stream inspection.
FcmHeader demux_header(std::span<const uint8_t> stream);

}  // namespace fcm
