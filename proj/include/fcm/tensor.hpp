#pragma once

#include <cstdint>
#include <vector>

#include "fcm/error.hpp"

namespace fcm {

struct LayerShape {
  uint32_t channels = 0;
  uint32_t height = 0;
  uint32_t width = 0;

  uint64_t plane_size() const { return uint64_t(height) * width; }
  uint64_t element_count() const { return uint64_t(channels) * plane_size(); }
  bool operator==(const LayerShape&) const = default;
};

// One multi-channel feature map. Planes are stored row-major, channel after
// channel, 32-bit float.
struct FeatureLayer {
  uint32_t channels = 0;
  uint32_t height = 0;
  uint32_t width = 0;
  std::vector<float> data;

  LayerShape shape() const { return {channels, height, width}; }
  uint64_t element_count() const { return shape().element_count(); }

  float at(uint32_t c, uint32_t y, uint32_t x) const {
    return data[(uint64_t(c) * height + y) * width + x];
  }
  float& at(uint32_t c, uint32_t y, uint32_t x) {
    return data[(uint64_t(c) * height + y) * width + x];
  }

  static FeatureLayer zeros(uint32_t channels, uint32_t height, uint32_t width);
  static FeatureLayer constant(uint32_t channels, uint32_t height,
                               uint32_t width, float value);

  // Throws ShapeError on size mismatch, FormatError on non-finite values.
  void validate() const;
};

struct MinMax {
  float min = 0.f;
  float max = 0.f;
};

// Exact extrema over every element of the layer.
MinMax tensor_stats(const FeatureLayer& layer);

// Per-layer shapes plus frame bookkeeping, as signalled to the decoder.
struct TensorShapeDescriptor {
  std::vector<LayerShape> layers;
  uint32_t frame_count = 0;
  bool temporal_flag = false;

  void validate() const;
};

// Layers must be sorted largest-first with each level exactly half the
// previous one in both spatial axes.
void validate_layer_ordering(const std::vector<LayerShape>& shapes);

// Ordered frames of multi-scale feature layers. Immutable by convention once
// validated; safe to share across threads.
struct FeatureTensorSet {
  std::vector<std::vector<FeatureLayer>> frames;
  float frame_rate = 0.f;

  std::vector<LayerShape> layer_shapes() const;
  TensorShapeDescriptor descriptor(bool temporal_flag = false) const;
  void validate() const;
};

}  // namespace fcm
