#include "fcm/conversion.hpp"

#include <cmath>

namespace fcm {

PackGeometry PackGeometry::for_source(uint32_t channels, uint32_t chan_height,
                                      uint32_t chan_width) {
  if (channels == 0 || chan_height == 0 || chan_width == 0) {
    throw Error(ErrorKind::kShape, "packed source dims must be >= 1");
  }
  uint32_t cols = static_cast<uint32_t>(std::ceil(std::sqrt(double(channels))));
  while (cols > 1 && (cols - 1) * uint64_t(cols - 1) >= channels) --cols;
  while (uint64_t(cols) * cols < channels) ++cols;
  const uint32_t rows = (channels + cols - 1) / cols;
  if (rows > 0xffff || cols > 0xffff) {
    throw Error(ErrorKind::kShape, "packing grid exceeds u16 fields");
  }
  return {channels, chan_height, chan_width, static_cast<uint16_t>(rows),
          static_cast<uint16_t>(cols)};
}

void PackGeometry::validate() const {
  if (channels == 0 || chan_height == 0 || chan_width == 0 || grid_rows == 0 ||
      grid_cols == 0) {
    throw Error(ErrorKind::kShape, "pack geometry has zero field");
  }
  const uint64_t cells = uint64_t(grid_rows) * grid_cols;
  if (cells < channels || uint64_t(grid_rows - 1) * grid_cols >= channels) {
    throw Error(ErrorKind::kShape, "packing grid does not fit channel count");
  }
  const PackGeometry expected =
      for_source(channels, chan_height, chan_width);
  if (expected.grid_rows != grid_rows || expected.grid_cols != grid_cols) {
    throw Error(ErrorKind::kShape,
                "packing grid is not the ceil-sqrt layout for " +
                    std::to_string(channels) + " channels");
  }
}

PackedFrame pack(const FusedTensor& fused) {
  if (fused.data.size() != fused.element_count()) {
    throw Error(ErrorKind::kShape, "fused tensor data size mismatch");
  }
  PackedFrame out;
  out.geom = PackGeometry::for_source(fused.channels, fused.height,
                                      fused.width);
  out.samples.assign(out.geom.sample_count(), 0.f);
  const uint32_t fw = out.geom.frame_width();
  for (uint32_t c = 0; c < fused.channels; ++c) {
    const uint32_t cell_y = (c / out.geom.grid_cols) * fused.height;
    const uint32_t cell_x = (c % out.geom.grid_cols) * fused.width;
    const float* src = fused.data.data() + uint64_t(c) * fused.height * fused.width;
    for (uint32_t y = 0; y < fused.height; ++y) {
      float* dst = out.samples.data() + uint64_t(cell_y + y) * fw + cell_x;
      for (uint32_t x = 0; x < fused.width; ++x) dst[x] = src[y * fused.width + x];
    }
  }
  return out;
}

FusedTensor unpack(const PackedFrame& frame, uint16_t gain_index) {
  frame.geom.validate();
  if (frame.samples.size() != frame.geom.sample_count()) {
    throw Error(ErrorKind::kShape, "packed frame sample count mismatch");
  }
  const PackGeometry& g = frame.geom;
  FusedTensor out;
  out.channels = g.channels;
  out.height = g.chan_height;
  out.width = g.chan_width;
  out.gain_index = gain_index;
  out.data.resize(out.element_count());
  const uint32_t fw = g.frame_width();
  for (uint32_t c = 0; c < g.channels; ++c) {
    const uint32_t cell_y = (c / g.grid_cols) * g.chan_height;
    const uint32_t cell_x = (c % g.grid_cols) * g.chan_width;
    float* dst = out.data.data() + uint64_t(c) * g.chan_height * g.chan_width;
    for (uint32_t y = 0; y < g.chan_height; ++y) {
      const float* src = frame.samples.data() + uint64_t(cell_y + y) * fw + cell_x;
      for (uint32_t x = 0; x < g.chan_width; ++x) dst[y * g.chan_width + x] = src[x];
    }
  }
  return out;
}

void QuantizationParams::validate() const {
  if (bitdepth < 8 || bitdepth > 16) {
    throw Error(ErrorKind::kConfig,
                "bitdepth " + std::to_string(bitdepth) + " outside [8,16]");
  }
  if (!(x_min <= x_max) || !std::isfinite(x_min) || !std::isfinite(x_max)) {
    throw Error(ErrorKind::kShape, "quantization range invalid");
  }
}

QuantizationParams QuantizationParams::from_frame(const PackedFrame& frame,
                                                  uint8_t bitdepth) {
  if (frame.samples.empty()) {
    throw Error(ErrorKind::kShape, "cannot derive range from empty frame");
  }
  QuantizationParams params;
  params.bitdepth = bitdepth;
  params.x_min = frame.samples[0];
  params.x_max = frame.samples[0];
  for (float v : frame.samples) {
    if (v < params.x_min) params.x_min = v;
    if (v > params.x_max) params.x_max = v;
  }
  params.validate();
  return params;
}

// Intermediate math runs in double with a single rounding at the end so the
// range endpoints survive the round trip exactly at every bitdepth.
QuantizedFrame quantize(const PackedFrame& frame,
                        const QuantizationParams& params) {
  params.validate();
  QuantizedFrame out;
  out.geom = frame.geom;
  out.samples.resize(frame.samples.size());
  const double lo = params.x_min;
  const double range = double(params.x_max) - double(params.x_min);
  const double scale = params.max_num_bits();
  if (range <= 0.0) {
    std::fill(out.samples.begin(), out.samples.end(), uint16_t(0));
    return out;
  }
  for (size_t i = 0; i < frame.samples.size(); ++i) {
    double t = (double(frame.samples[i]) - lo) / range;
    t = std::min(std::max(t, 0.0), 1.0);
    out.samples[i] = static_cast<uint16_t>(std::floor(t * scale));
  }
  return out;
}

PackedFrame dequantize(const QuantizedFrame& frame,
                       const QuantizationParams& params) {
  params.validate();
  const double max_bits = params.max_num_bits();
  for (uint16_t q : frame.samples) {
    if (q > max_bits) {
      throw Error(ErrorKind::kCorruptPayload,
                  "quantized sample exceeds max_num_bits");
    }
  }
  PackedFrame out;
  out.geom = frame.geom;
  out.samples.resize(frame.samples.size());
  const double range = double(params.x_max) - double(params.x_min);
  const double lo = params.x_min;
  for (size_t i = 0; i < frame.samples.size(); ++i) {
    out.samples[i] =
        static_cast<float>(double(frame.samples[i]) / max_bits * range + lo);
  }
  return out;
}

}  // namespace fcm
