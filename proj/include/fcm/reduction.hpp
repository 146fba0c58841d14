#pragma once

#include <optional>
#include <string_view>

#include "fcm/gain.hpp"
#include "fcm/tensor.hpp"

namespace fcm {

// Deterministic stand-ins for the learned fusion/restoration networks. The
// id is signalled in the bitstream; encoder and decoder must agree.
enum class ReducerId : uint8_t {
  kS2D = 0,      // space-to-depth cascade, exactly invertible
  kAvgPool = 1,  // 2x2 average-pool cascade, lossy
};

const char* to_string(ReducerId id);
std::optional<ReducerId> reducer_from_string(std::string_view name);
std::optional<ReducerId> reducer_from_id(uint8_t raw);

// Single reduced tensor, spatially half the smallest input layer, with the
// gain vector already applied.
struct FusedTensor {
  uint32_t channels = 0;
  uint32_t height = 0;
  uint32_t width = 0;
  std::vector<float> data;
  uint16_t gain_index = 0;

  uint64_t element_count() const {
    return uint64_t(channels) * height * width;
  }
};

// Channel count the cascade produces for the given layer shapes.
uint32_t fused_channel_count(const std::vector<LayerShape>& shapes,
                             ReducerId reducer);
LayerShape fused_shape(const std::vector<LayerShape>& shapes,
                       ReducerId reducer);

// Runs the reduction cascade over one frame: each step concatenates the
// running state with the next layer and downscales 2x spatially, then the
// gain vector scales each channel of the final state.
FusedTensor fuse(const std::vector<FeatureLayer>& frame_layers,
                 ReducerId reducer, const GainVector& gain);

// Inverse of fuse: divides out the gain, then unwinds the cascade step by
// step, splitting each upscaled state into the continuing state and the
// reconstructed layer. Exact for kS2D.
std::vector<FeatureLayer> restore(const FusedTensor& fused, ReducerId reducer,
                                  const GainVector& gain,
                                  const std::vector<LayerShape>& shapes);

}  // namespace fcm
