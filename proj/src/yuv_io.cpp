#include "fcm/yuv_io.hpp"

#include <fstream>

#include "bytes.hpp"

namespace fcm {

std::vector<uint8_t> yuv400_16le_bytes(std::span<const QuantizedFrame> frames) {
  std::vector<uint8_t> out;
  uint64_t total = 0;
  for (const QuantizedFrame& f : frames) total += f.samples.size();
  out.reserve(total * 2);
  for (const QuantizedFrame& f : frames) {
    if (f.samples.size() != f.geom.sample_count()) {
      throw Error(ErrorKind::kShape, "frame sample count mismatch");
    }
    for (uint16_t s : f.samples) put_u16(out, s);
  }
  return out;
}

void write_yuv400_16le(const std::filesystem::path& path,
                       std::span<const QuantizedFrame> frames) {
  const std::vector<uint8_t> bytes = yuv400_16le_bytes(frames);
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

std::vector<QuantizedFrame> parse_yuv400_16le(std::span<const uint8_t> bytes,
                                              const PackGeometry& geom,
                                              uint32_t frame_count) {
  const uint64_t per_frame = geom.sample_count() * 2;
  if (bytes.size() != per_frame * frame_count) {
    throw Error(ErrorKind::kCorruptPayload,
                "raw video size " + std::to_string(bytes.size()) +
                    " != " + std::to_string(per_frame * frame_count) +
                    " for " + std::to_string(frame_count) + " frames");
  }
  ByteReader r(bytes);
  std::vector<QuantizedFrame> frames(frame_count);
  for (QuantizedFrame& f : frames) {
    f.geom = geom;
    f.samples.resize(geom.sample_count());
    for (uint16_t& s : f.samples) s = r.u16("sample");
  }
  return frames;
}

std::vector<QuantizedFrame> read_yuv400_16le(const std::filesystem::path& path,
                                             const PackGeometry& geom,
                                             uint32_t frame_count) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::kIo, "cannot open " + path.string());
  }
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  if (in.bad()) {
    throw Error(ErrorKind::kIo, "read failure on " + path.string());
  }
  return parse_yuv400_16le(bytes, geom, frame_count);
}

}  // namespace fcm
