#include "fcm/reduction.hpp"

#include <cstring>

namespace fcm {

const char* to_string(ReducerId id) {
  switch (id) {
    case ReducerId::kS2D: return "s2d";
    case ReducerId::kAvgPool: return "avgpool";
  }
  return "unknown";
}

std::optional<ReducerId> reducer_from_string(std::string_view name) {
  if (name == "s2d") return ReducerId::kS2D;
  if (name == "avgpool") return ReducerId::kAvgPool;
  return std::nullopt;
}

std::optional<ReducerId> reducer_from_id(uint8_t raw) {
  if (raw == 0) return ReducerId::kS2D;
  if (raw == 1) return ReducerId::kAvgPool;
  return std::nullopt;
}

namespace {

void check_even_dims(const std::vector<LayerShape>& shapes) {
  for (size_t k = 0; k < shapes.size(); ++k) {
    if (shapes[k].height % 2 != 0 || shapes[k].width % 2 != 0) {
      throw Error(ErrorKind::kShape,
                  "layer " + std::to_string(k) +
                      " has odd spatial dims; the reduction cascade halves "
                      "every level");
    }
  }
}

FeatureLayer concat_channels(FeatureLayer state, const FeatureLayer& layer) {
  if (state.channels == 0) {
    return layer;
  }
  if (state.height != layer.height || state.width != layer.width) {
    throw Error(ErrorKind::kShape,
                "cascade state and layer spatial dims differ");
  }
  state.data.insert(state.data.end(), layer.data.begin(), layer.data.end());
  state.channels += layer.channels;
  return state;
}

// (C,H,W) -> (4C,H/2,W/2); input channel c maps to output channels
// 4c + 2*dy + dx for the four positions of each 2x2 block.
FeatureLayer space_to_depth(const FeatureLayer& in) {
  FeatureLayer out{in.channels * 4, in.height / 2, in.width / 2, {}};
  out.data.resize(out.element_count());
  for (uint32_t c = 0; c < in.channels; ++c) {
    for (uint32_t dy = 0; dy < 2; ++dy) {
      for (uint32_t dx = 0; dx < 2; ++dx) {
        const uint32_t oc = 4 * c + 2 * dy + dx;
        for (uint32_t y = 0; y < out.height; ++y) {
          for (uint32_t x = 0; x < out.width; ++x) {
            out.at(oc, y, x) = in.at(c, 2 * y + dy, 2 * x + dx);
          }
        }
      }
    }
  }
  return out;
}

FeatureLayer depth_to_space(const FeatureLayer& in) {
  FeatureLayer out{in.channels / 4, in.height * 2, in.width * 2, {}};
  out.data.resize(out.element_count());
  for (uint32_t c = 0; c < out.channels; ++c) {
    for (uint32_t dy = 0; dy < 2; ++dy) {
      for (uint32_t dx = 0; dx < 2; ++dx) {
        const uint32_t ic = 4 * c + 2 * dy + dx;
        for (uint32_t y = 0; y < in.height; ++y) {
          for (uint32_t x = 0; x < in.width; ++x) {
            out.at(c, 2 * y + dy, 2 * x + dx) = in.at(ic, y, x);
          }
        }
      }
    }
  }
  return out;
}

FeatureLayer avgpool2(const FeatureLayer& in) {
  FeatureLayer out{in.channels, in.height / 2, in.width / 2, {}};
  out.data.resize(out.element_count());
  for (uint32_t c = 0; c < in.channels; ++c) {
    for (uint32_t y = 0; y < out.height; ++y) {
      for (uint32_t x = 0; x < out.width; ++x) {
        const float sum = in.at(c, 2 * y, 2 * x) + in.at(c, 2 * y, 2 * x + 1) +
                          in.at(c, 2 * y + 1, 2 * x) +
                          in.at(c, 2 * y + 1, 2 * x + 1);
        out.at(c, y, x) = sum * 0.25f;
      }
    }
  }
  return out;
}

FeatureLayer nn_upsample2(const FeatureLayer& in) {
  FeatureLayer out{in.channels, in.height * 2, in.width * 2, {}};
  out.data.resize(out.element_count());
  for (uint32_t c = 0; c < in.channels; ++c) {
    for (uint32_t y = 0; y < out.height; ++y) {
      for (uint32_t x = 0; x < out.width; ++x) {
        out.at(c, y, x) = in.at(c, y / 2, x / 2);
      }
    }
  }
  return out;
}

FeatureLayer encoding_block(const FeatureLayer& state, ReducerId reducer) {
  return reducer == ReducerId::kS2D ? space_to_depth(state) : avgpool2(state);
}

FeatureLayer decoding_block(const FeatureLayer& state, ReducerId reducer) {
  return reducer == ReducerId::kS2D ? depth_to_space(state)
                                    : nn_upsample2(state);
}

// Channels are stored plane-contiguous, so a channel split is two copies.
std::pair<FeatureLayer, FeatureLayer> split_channels(const FeatureLayer& in,
                                                     uint32_t first_count) {
  const uint64_t plane = in.shape().plane_size();
  FeatureLayer head{first_count, in.height, in.width, {}};
  FeatureLayer tail{in.channels - first_count, in.height, in.width, {}};
  head.data.assign(in.data.begin(), in.data.begin() + first_count * plane);
  tail.data.assign(in.data.begin() + first_count * plane, in.data.end());
  return {std::move(head), std::move(tail)};
}

// Running state channel count after each cascade step.
std::vector<uint32_t> state_channels(const std::vector<LayerShape>& shapes,
                                     ReducerId reducer) {
  std::vector<uint32_t> counts;
  counts.reserve(shapes.size());
  uint32_t c = 0;
  for (const LayerShape& s : shapes) {
    c += s.channels;
    if (reducer == ReducerId::kS2D) c *= 4;
    counts.push_back(c);
  }
  return counts;
}

}  // namespace

uint32_t fused_channel_count(const std::vector<LayerShape>& shapes,
                             ReducerId reducer) {
  validate_layer_ordering(shapes);
  return state_channels(shapes, reducer).back();
}

LayerShape fused_shape(const std::vector<LayerShape>& shapes,
                       ReducerId reducer) {
  validate_layer_ordering(shapes);
  check_even_dims(shapes);
  return {state_channels(shapes, reducer).back(), shapes.back().height / 2,
          shapes.back().width / 2};
}

FusedTensor fuse(const std::vector<FeatureLayer>& frame_layers,
                 ReducerId reducer, const GainVector& gain) {
  std::vector<LayerShape> shapes;
  shapes.reserve(frame_layers.size());
  for (const FeatureLayer& layer : frame_layers) shapes.push_back(layer.shape());
  validate_layer_ordering(shapes);
  check_even_dims(shapes);

  FeatureLayer state;
  for (const FeatureLayer& layer : frame_layers) {
    state = encoding_block(concat_channels(std::move(state), layer), reducer);
  }

  gain.validate(state.channels);
  const uint64_t plane = state.shape().plane_size();
  for (uint32_t c = 0; c < state.channels; ++c) {
    const float g = gain.multipliers[c];
    if (g == 1.f) continue;
    float* p = state.data.data() + c * plane;
    for (uint64_t i = 0; i < plane; ++i) p[i] *= g;
  }

  return {state.channels, state.height, state.width, std::move(state.data),
          gain.index};
}

std::vector<FeatureLayer> restore(const FusedTensor& fused, ReducerId reducer,
                                  const GainVector& gain,
                                  const std::vector<LayerShape>& shapes) {
  validate_layer_ordering(shapes);
  check_even_dims(shapes);
  const std::vector<uint32_t> counts = state_channels(shapes, reducer);
  if (fused.channels != counts.back()) {
    throw Error(ErrorKind::kReducerMismatch,
                "fused tensor has " + std::to_string(fused.channels) +
                    " channels but the " + to_string(reducer) +
                    " cascade over the signalled shapes yields " +
                    std::to_string(counts.back()));
  }
  if (fused.height != shapes.back().height / 2 ||
      fused.width != shapes.back().width / 2) {
    throw Error(ErrorKind::kShape,
                "fused tensor spatial dims are not half the smallest layer");
  }
  if (fused.data.size() != fused.element_count()) {
    throw Error(ErrorKind::kShape, "fused tensor data size mismatch");
  }

  gain.validate(fused.channels);
  FeatureLayer state{fused.channels, fused.height, fused.width, fused.data};
  const uint64_t plane = state.shape().plane_size();
  for (uint32_t c = 0; c < state.channels; ++c) {
    const float g = gain.multipliers[c];
    if (g == 1.f) continue;
    float* p = state.data.data() + c * plane;
    for (uint64_t i = 0; i < plane; ++i) p[i] /= g;
  }

  std::vector<FeatureLayer> layers(shapes.size());
  for (size_t k = shapes.size(); k-- > 0;) {
    FeatureLayer expanded = decoding_block(state, reducer);
    const uint32_t prev_state = k == 0 ? 0 : counts[k - 1];
    auto [head, tail] = split_channels(expanded, prev_state);
    if (tail.shape() != shapes[k]) {
      throw Error(ErrorKind::kShape,
                  "restored layer " + std::to_string(k) +
                      " does not match the signalled shape");
    }
    layers[k] = std::move(tail);
    state = std::move(head);
  }
  return layers;
}

}  // namespace fcm
