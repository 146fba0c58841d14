#include "fcm/fts_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "bytes.hpp"

namespace fcm {

namespace {

constexpr uint8_t kMagic[4] = {'F', 'T', 'S', '1'};
constexpr uint16_t kVersion = 1;

}  // namespace

std::vector<uint8_t> fts_to_bytes(const FeatureTensorSet& set) {
  set.validate();
  const std::vector<LayerShape> shapes = set.layer_shapes();
  if (shapes.size() > 0xffff) {
    throw Error(ErrorKind::kFormat, "layer count exceeds u16 field");
  }
  for (const LayerShape& s : shapes) {
    if (s.channels > 0xffff) {
      throw Error(ErrorKind::kFormat, "channel count exceeds u16 field");
    }
  }

  std::vector<uint8_t> out;
  out.insert(out.end(), kMagic, kMagic + 4);
  put_u16(out, kVersion);
  put_u32(out, static_cast<uint32_t>(set.frames.size()));
  put_u16(out, static_cast<uint16_t>(shapes.size()));
  put_f32(out, set.frame_rate);
  for (const LayerShape& s : shapes) {
    put_u16(out, static_cast<uint16_t>(s.channels));
    put_u32(out, s.height);
    put_u32(out, s.width);
  }
  for (const auto& frame : set.frames) {
    for (const FeatureLayer& layer : frame) {
      for (float v : layer.data) put_f32(out, v);
    }
  }
  return out;
}

FeatureTensorSet fts_from_bytes(std::span<const uint8_t> bytes) {
  ByteReader r(bytes);
  auto magic = r.bytes(4, "magic");
  if (!std::equal(magic.begin(), magic.end(), kMagic)) {
    throw Error(ErrorKind::kFormat, "bad magic, expected FTS1", 0);
  }
  const uint16_t version = r.u16("version");
  if (version != kVersion) {
    throw Error(ErrorKind::kFormat,
                "unsupported FTS version " + std::to_string(version), 4);
  }
  const uint32_t frame_count = r.u32("frame count");
  const uint16_t layer_count = r.u16("layer count");
  const float frame_rate = r.f32("frame rate");
  if (frame_count == 0) {
    throw Error(ErrorKind::kFormat, "zero frames disallowed");
  }
  if (layer_count == 0) {
    throw Error(ErrorKind::kFormat, "zero layers disallowed");
  }
  if (!(frame_rate > 0.f) || !std::isfinite(frame_rate)) {
    throw Error(ErrorKind::kFormat, "frame_rate must be positive and finite");
  }

  std::vector<LayerShape> shapes(layer_count);
  for (LayerShape& s : shapes) {
    s.channels = r.u16("layer channels");
    s.height = r.u32("layer height");
    s.width = r.u32("layer width");
  }
  validate_layer_ordering(shapes);

  uint64_t elems_per_frame = 0;
  for (const LayerShape& s : shapes) elems_per_frame += s.element_count();
  const uint64_t payload_bytes = 4 * elems_per_frame * frame_count;
  if (r.remaining() < payload_bytes) {
    throw Error(ErrorKind::kTruncated,
                "payload shorter than header describes", r.offset());
  }
  if (r.remaining() > payload_bytes) {
    throw Error(ErrorKind::kFormat,
                "trailing bytes after payload", r.offset() + payload_bytes);
  }

  FeatureTensorSet set;
  set.frame_rate = frame_rate;
  set.frames.resize(frame_count);
  for (auto& frame : set.frames) {
    frame.reserve(shapes.size());
    for (const LayerShape& s : shapes) {
      FeatureLayer layer{s.channels, s.height, s.width, {}};
      layer.data.resize(s.element_count());
      const uint64_t offset_here = r.offset();
      for (float& v : layer.data) v = r.f32("feature value");
      if (std::any_of(layer.data.begin(), layer.data.end(),
                      [](float v) { return !std::isfinite(v); })) {
        throw Error(ErrorKind::kFormat, "payload contains NaN or Inf",
                    offset_here);
      }
      frame.push_back(std::move(layer));
    }
  }
  return set;
}

FeatureTensorSet load_fts(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::kIo, "cannot open " + path.string());
  }
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  if (in.bad()) {
    throw Error(ErrorKind::kIo, "read failure on " + path.string());
  }
  return fts_from_bytes(bytes);
}

void save_fts(const FeatureTensorSet& set, const std::filesystem::path& path) {
  const std::vector<uint8_t> bytes = fts_to_bytes(set);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorKind::kIo, "cannot open " + path.string() + " for write");
  }
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw Error(ErrorKind::kIo, "write failure on " + path.string());
  }
}

}  // namespace fcm
