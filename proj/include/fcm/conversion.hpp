#pragma once

#include <cstdint>
#include <vector>

#include "fcm/reduction.hpp"

namespace fcm {

// Raster-scan tiling of fused channels into one monochrome frame. The grid
// is derived from the channel count alone: cols = ceil(sqrt(C)),
// rows = ceil(C / cols), channel c at cell (c / cols, c % cols).
struct PackGeometry {
  uint32_t channels = 0;
  uint32_t chan_height = 0;
  uint32_t chan_width = 0;
  uint16_t grid_rows = 0;
  uint16_t grid_cols = 0;

  uint32_t frame_height() const { return grid_rows * chan_height; }
  uint32_t frame_width() const { return grid_cols * chan_width; }
  uint64_t sample_count() const {
    return uint64_t(frame_height()) * frame_width();
  }

  static PackGeometry for_source(uint32_t channels, uint32_t chan_height,
                                 uint32_t chan_width);
  void validate() const;
};

// Packed frame before quantization (x_p) or after dequantization.
struct PackedFrame {
  PackGeometry geom;
  std::vector<float> samples;
};

// Packed frame after quantization (x_q); samples fit the signalled bitdepth.
struct QuantizedFrame {
  PackGeometry geom;
  std::vector<uint16_t> samples;
};

struct QuantizationParams {
  uint8_t bitdepth = 10;
  float x_min = 0.f;
  float x_max = 0.f;

  uint32_t max_num_bits() const { return (1u << bitdepth) - 1; }
  void validate() const;
  static QuantizationParams from_frame(const PackedFrame& frame,
                                       uint8_t bitdepth);
};

PackedFrame pack(const FusedTensor& fused);
// Exact inverse of pack; padding cells are discarded. gain_index is carried
// through so the round trip preserves the full FusedTensor.
FusedTensor unpack(const PackedFrame& frame, uint16_t gain_index = 0);

// Linear quantization: normalize to [0,1] over [x_min,x_max], clamp, scale
// by max_num_bits, floor. A degenerate range maps every sample to 0.
QuantizedFrame quantize(const PackedFrame& frame,
                        const QuantizationParams& params);
PackedFrame dequantize(const QuantizedFrame& frame,
                       const QuantizationParams& params);

}  // namespace fcm
