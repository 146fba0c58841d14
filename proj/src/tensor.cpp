#include "fcm/tensor.hpp"

#include <cmath>

namespace fcm {

FeatureLayer FeatureLayer::zeros(uint32_t channels, uint32_t height,
                                 uint32_t width) {
  return constant(channels, height, width, 0.f);
}

FeatureLayer FeatureLayer::constant(uint32_t channels, uint32_t height,
                                    uint32_t width, float value) {
  FeatureLayer layer{channels, height, width, {}};
  layer.data.assign(layer.element_count(), value);
  return layer;
}

void FeatureLayer::validate() const {
  if (channels == 0 || height == 0 || width == 0) {
    throw Error(ErrorKind::kShape, "layer dimensions must be >= 1");
  }
  if (data.size() != element_count()) {
    throw Error(ErrorKind::kShape,
                "layer data size " + std::to_string(data.size()) +
                    " != channels*height*width " +
                    std::to_string(element_count()));
  }
  for (float v : data) {
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::kFormat, "layer contains NaN or Inf");
    }
  }
}

MinMax tensor_stats(const FeatureLayer& layer) {
  if (layer.data.empty()) {
    throw Error(ErrorKind::kShape, "tensor_stats on empty layer");
  }
  MinMax mm{layer.data[0], layer.data[0]};
  for (float v : layer.data) {
    if (v < mm.min) mm.min = v;
    if (v > mm.max) mm.max = v;
  }
  return mm;
}

void validate_layer_ordering(const std::vector<LayerShape>& shapes) {
  if (shapes.empty()) {
    throw Error(ErrorKind::kShape, "layer list is empty");
  }
  for (const LayerShape& s : shapes) {
    if (s.channels == 0 || s.height == 0 || s.width == 0) {
      throw Error(ErrorKind::kShape, "layer dimensions must be >= 1");
    }
  }
  for (size_t k = 0; k + 1 < shapes.size(); ++k) {
    const LayerShape& a = shapes[k];
    const LayerShape& b = shapes[k + 1];
    if (b.height * 2 != a.height || b.width * 2 != a.width) {
      throw Error(ErrorKind::kShape,
                  "layer " + std::to_string(k + 1) +
                      " is not exactly half the size of layer " +
                      std::to_string(k));
    }
  }
}

void TensorShapeDescriptor::validate() const {
  validate_layer_ordering(layers);
  if (frame_count == 0) {
    throw Error(ErrorKind::kShape, "frame count must be >= 1");
  }
}

std::vector<LayerShape> FeatureTensorSet::layer_shapes() const {
  std::vector<LayerShape> shapes;
  if (frames.empty()) return shapes;
  shapes.reserve(frames[0].size());
  for (const FeatureLayer& layer : frames[0]) {
    shapes.push_back(layer.shape());
  }
  return shapes;
}

TensorShapeDescriptor FeatureTensorSet::descriptor(bool temporal_flag) const {
  return {layer_shapes(), static_cast<uint32_t>(frames.size()), temporal_flag};
}

void FeatureTensorSet::validate() const {
  if (frames.empty()) {
    throw Error(ErrorKind::kFormat, "tensor set has zero frames");
  }
  if (frames[0].empty()) {
    throw Error(ErrorKind::kFormat, "tensor set has zero layers");
  }
  if (!(frame_rate > 0.f) || !std::isfinite(frame_rate)) {
    throw Error(ErrorKind::kFormat, "frame_rate must be positive and finite");
  }
  const std::vector<LayerShape> shapes = layer_shapes();
  validate_layer_ordering(shapes);
  for (size_t f = 0; f < frames.size(); ++f) {
    if (frames[f].size() != shapes.size()) {
      throw Error(ErrorKind::kShape,
                  "frame " + std::to_string(f) + " has " +
                      std::to_string(frames[f].size()) + " layers, expected " +
                      std::to_string(shapes.size()));
    }
    for (size_t k = 0; k < shapes.size(); ++k) {
      if (frames[f][k].shape() != shapes[k]) {
        throw Error(ErrorKind::kShape,
                    "frame " + std::to_string(f) + " layer " +
                        std::to_string(k) + " shape differs from frame 0");
      }
      frames[f][k].validate();
    }
  }
}

}  // namespace fcm
