#include "fcm/bitstream.hpp"

#include <cmath>

#include "bytes.hpp"

namespace fcm {

namespace {

constexpr uint8_t kMagic[4] = {'F', 'C', 'M', 'B'};
constexpr uint16_t kVersion = 1;

bool valid_bitdepth(uint8_t bitdepth) {
  return (bitdepth >= 8 && bitdepth <= 16) || bitdepth == 32;
}

}  // namespace

PackGeometry FcmHeader::pack_geometry() const {
  return {fused_channels, fused_height, fused_width, grid_rows, grid_cols};
}

uint64_t FcmHeader::serialized_size() const {
  return fcmb_header_size(layer_shapes.size(), frame_ranges.size()) +
         payload_length;
}

void FcmHeader::validate() const {
  if (version != kVersion) {
    throw Error(ErrorKind::kUnsupportedVersion,
                "FCMB version " + std::to_string(version) + " not supported");
  }
  if (original_frame_count == 0) {
    throw Error(ErrorKind::kConsistency, "original frame count is zero");
  }
  if (!(frame_rate > 0.f) || !std::isfinite(frame_rate)) {
    throw Error(ErrorKind::kConsistency, "frame rate must be positive");
  }
  if (layer_shapes.empty() || layer_shapes.size() > 0xffff) {
    throw Error(ErrorKind::kConsistency, "layer count out of range");
  }
  for (const LayerShape& s : layer_shapes) {
    if (s.channels == 0 || s.channels > 0xffff || s.height == 0 ||
        s.width == 0) {
      throw Error(ErrorKind::kConsistency, "layer shape field out of range");
    }
  }
  try {
    validate_layer_ordering(layer_shapes);
  } catch (const Error& e) {
    throw Error(ErrorKind::kConsistency, e.message());
  }
  if (fused_channels == 0 || fused_height == 0 || fused_width == 0) {
    throw Error(ErrorKind::kConsistency, "fused shape field is zero");
  }
  try {
    const PackGeometry expected =
        PackGeometry::for_source(fused_channels, fused_height, fused_width);
    if (expected.grid_rows != grid_rows || expected.grid_cols != grid_cols) {
      throw Error(ErrorKind::kConsistency,
                  "grid does not match the ceil-sqrt rule for the fused "
                  "channel count");
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kConsistency) throw;
    throw Error(ErrorKind::kConsistency, e.message());
  }
  if (!valid_bitdepth(bitdepth)) {
    throw Error(ErrorKind::kConsistency,
                "bitdepth " + std::to_string(bitdepth) +
                    " not in [8,16] or 32");
  }
  if (float_mode() && inner_codec == InnerCodecId::kExternal) {
    throw Error(ErrorKind::kConsistency,
                "float debug payloads cannot use the external codec");
  }
  if (frame_ranges.size() != coded_frame_count()) {
    throw Error(ErrorKind::kConsistency,
                "header has " + std::to_string(frame_ranges.size()) +
                    " frame ranges, coded frame count is " +
                    std::to_string(coded_frame_count()));
  }
  for (const FrameRange& r : frame_ranges) {
    if (!std::isfinite(r.x_min) || !std::isfinite(r.x_max) ||
        !(r.x_min <= r.x_max)) {
      throw Error(ErrorKind::kConsistency, "frame range invalid");
    }
  }
}

std::vector<uint8_t> mux(const FcmHeader& header,
                         std::span<const uint8_t> payload) {
  header.validate();
  if (header.payload_length != payload.size()) {
    throw Error(ErrorKind::kConsistency,
                "header payload length " +
                    std::to_string(header.payload_length) +
                    " != payload size " + std::to_string(payload.size()));
  }

  std::vector<uint8_t> out;
  out.reserve(header.serialized_size());
  out.insert(out.end(), kMagic, kMagic + 4);
  put_u16(out, header.version);
  put_u8(out, static_cast<uint8_t>(header.reducer));
  put_u8(out, static_cast<uint8_t>(header.inner_codec));
  put_u8(out, header.temporal_enabled ? 1 : 0);
  put_u32(out, header.original_frame_count);
  put_f32(out, header.frame_rate);
  put_u16(out, header.gain_index);
  put_u16(out, static_cast<uint16_t>(header.layer_shapes.size()));
  for (const LayerShape& s : header.layer_shapes) {
    put_u16(out, static_cast<uint16_t>(s.channels));
    put_u32(out, s.height);
    put_u32(out, s.width);
  }
  put_u32(out, header.fused_channels);
  put_u32(out, header.fused_height);
  put_u32(out, header.fused_width);
  put_u16(out, header.grid_rows);
  put_u16(out, header.grid_cols);
  put_u8(out, header.bitdepth);
  for (const FrameRange& r : header.frame_ranges) {
    put_f32(out, r.x_min);
    put_f32(out, r.x_max);
  }
  put_u32(out, static_cast<uint32_t>(header.quality));
  put_u16(out, header.gop_hint);
  put_u8(out, header.low_delay ? 1 : 0);
  put_u64(out, header.payload_length);
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

namespace {

// Parses and validates the header; leaves the reader positioned at the
// payload. Every count is checked against the remaining bytes before any
// allocation sized from it.
FcmHeader parse_header(ByteReader& r) {
  auto magic = r.bytes(4, "magic");
  if (!std::equal(magic.begin(), magic.end(), kMagic)) {
    throw Error(ErrorKind::kBadMagic, "stream does not start with FCMB", 0);
  }
  FcmHeader h;
  h.version = r.u16("version");
  if (h.version != kVersion) {
    throw Error(ErrorKind::kUnsupportedVersion,
                "FCMB version " + std::to_string(h.version) + " not supported",
                4);
  }
  const uint8_t reducer_raw = r.u8("reducer id");
  const auto reducer = reducer_from_id(reducer_raw);
  if (!reducer) {
    throw Error(ErrorKind::kConsistency,
                "unknown reducer id " + std::to_string(reducer_raw),
                r.offset() - 1);
  }
  h.reducer = *reducer;
  const uint8_t codec_raw = r.u8("inner codec id");
  const auto codec = codec_from_id(codec_raw);
  if (!codec) {
    throw Error(ErrorKind::kConsistency,
                "unknown inner codec id " + std::to_string(codec_raw),
                r.offset() - 1);
  }
  h.inner_codec = *codec;
  const uint8_t temporal_raw = r.u8("temporal flag");
  if (temporal_raw > 1) {
    throw Error(ErrorKind::kConsistency, "temporal flag must be 0 or 1",
                r.offset() - 1);
  }
  h.temporal_enabled = temporal_raw == 1;
  h.original_frame_count = r.u32("original frame count");
  h.frame_rate = r.f32("frame rate");
  h.gain_index = r.u16("gain index");

  const uint16_t layer_count = r.u16("layer count");
  r.require(uint64_t(layer_count) * 10, "layer shape table");
  h.layer_shapes.resize(layer_count);
  for (LayerShape& s : h.layer_shapes) {
    s.channels = r.u16("layer channels");
    s.height = r.u32("layer height");
    s.width = r.u32("layer width");
  }

  h.fused_channels = r.u32("fused channels");
  h.fused_height = r.u32("fused height");
  h.fused_width = r.u32("fused width");
  h.grid_rows = r.u16("grid rows");
  h.grid_cols = r.u16("grid cols");
  h.bitdepth = r.u8("bitdepth");

  const uint64_t coded = h.coded_frame_count();
  r.require(coded * 8, "frame range table");
  h.frame_ranges.resize(coded);
  for (FrameRange& range : h.frame_ranges) {
    range.x_min = r.f32("frame x_min");
    range.x_max = r.f32("frame x_max");
  }

  h.quality = static_cast<int32_t>(r.u32("inner quality"));
  h.gop_hint = r.u16("gop hint");
  const uint8_t low_delay_raw = r.u8("low delay flag");
  if (low_delay_raw > 1) {
    throw Error(ErrorKind::kConsistency, "low delay flag must be 0 or 1",
                r.offset() - 1);
  }
  h.low_delay = low_delay_raw == 1;
  h.payload_length = r.u64("payload length");

  h.validate();
  return h;
}

}  // namespace

DemuxResult demux(std::span<const uint8_t> stream) {
  ByteReader r(stream);
  FcmHeader h = parse_header(r);
  if (r.remaining() < h.payload_length) {
    throw Error(ErrorKind::kTruncated,
                "payload shorter than declared length", r.offset());
  }
  if (r.remaining() > h.payload_length) {
    throw Error(ErrorKind::kConsistency, "trailing bytes after payload");
  }
  auto payload = r.bytes(h.payload_length, "payload");
  return {std::move(h), {payload.begin(), payload.end()}};
}

FcmHeader demux_header(std::span<const uint8_t> stream) {
  ByteReader r(stream);
  return parse_header(r);
}

}  // namespace fcm
