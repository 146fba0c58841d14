#include "fcm/temporal.hpp"

namespace fcm {

std::pair<FeatureTensorSet, TemporalInfo> temporal_downsample(
    const FeatureTensorSet& set, bool enabled) {
  set.validate();
  TemporalInfo info{static_cast<uint32_t>(set.frames.size()), enabled};
  if (!enabled) {
    return {set, info};
  }
  FeatureTensorSet out;
  out.frame_rate = set.frame_rate;
  out.frames.reserve(info.kept_frame_count());
  for (size_t i = 0; i < set.frames.size(); i += 2) {
    out.frames.push_back(set.frames[i]);
  }
  return {std::move(out), info};
}

namespace {

std::vector<FeatureLayer> average_frames(const std::vector<FeatureLayer>& a,
                                         const std::vector<FeatureLayer>& b) {
  std::vector<FeatureLayer> out = a;
  for (size_t k = 0; k < out.size(); ++k) {
    const std::vector<float>& bd = b[k].data;
    std::vector<float>& od = out[k].data;
    for (size_t i = 0; i < od.size(); ++i) {
      od[i] = (od[i] + bd[i]) * 0.5f;
    }
  }
  return out;
}

}  // namespace

FeatureTensorSet temporal_upsample(const FeatureTensorSet& set,
                                   const TemporalInfo& info) {
  set.validate();
  if (set.frames.size() != info.kept_frame_count()) {
    throw Error(ErrorKind::kMismatch,
                "input has " + std::to_string(set.frames.size()) +
                    " frames, temporal info expects " +
                    std::to_string(info.kept_frame_count()));
  }
  if (!info.enabled) {
    return set;
  }
  FeatureTensorSet out;
  out.frame_rate = set.frame_rate;
  out.frames.reserve(info.original_frame_count);
  for (uint32_t i = 0; i < info.original_frame_count; ++i) {
    if (i % 2 == 0) {
      out.frames.push_back(set.frames[i / 2]);
    } else if (i / 2 + 1 < set.frames.size()) {
      out.frames.push_back(
          average_frames(set.frames[i / 2], set.frames[i / 2 + 1]));
    } else {
      // Odd trailing frame: only the left neighbor exists.
      out.frames.push_back(set.frames[i / 2]);
    }
  }
  return out;
}

}  // namespace fcm
