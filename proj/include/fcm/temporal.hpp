#pragma once

#include <utility>

#include "fcm/tensor.hpp"

namespace fcm {

// Carried in the bitstream header so the decoder can rebuild the original
// frame count and parity.
struct TemporalInfo {
  uint32_t original_frame_count = 0;
  bool enabled = false;

  uint32_t kept_frame_count() const {
    return enabled ? (original_frame_count + 1) / 2 : original_frame_count;
  }
};

// 2x temporal sampling: keeps frames at even indices. Disabled means the
// output is the input unchanged.
std::pair<FeatureTensorSet, TemporalInfo> temporal_downsample(
    const FeatureTensorSet& set, bool enabled);

// Rebuilds dropped frames from their two kept neighbors. Spatial grids align,
// so trilinear interpolation at the temporal midpoint reduces to the
// elementwise average. A missing final frame replicates its single neighbor.
FeatureTensorSet temporal_upsample(const FeatureTensorSet& set,
                                   const TemporalInfo& info);

}  // namespace fcm
