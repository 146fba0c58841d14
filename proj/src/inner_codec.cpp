#include "fcm/inner_codec.hpp"

#include <zlib.h>

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>

#include "fcm/yuv_io.hpp"

namespace fcm {

const char* to_string(InnerCodecId id) {
  switch (id) {
    case InnerCodecId::kRaw: return "raw";
    case InnerCodecId::kLossless: return "lossless";
    case InnerCodecId::kExternal: return "external";
  }
  return "unknown";
}

std::optional<InnerCodecId> codec_from_string(std::string_view name) {
  if (name == "raw") return InnerCodecId::kRaw;
  if (name == "lossless") return InnerCodecId::kLossless;
  if (name == "external") return InnerCodecId::kExternal;
  return std::nullopt;
}

std::optional<InnerCodecId> codec_from_id(uint8_t raw) {
  if (raw <= 2) return static_cast<InnerCodecId>(raw);
  return std::nullopt;
}

void InnerConfig::validate() const {
  switch (codec) {
    case InnerCodecId::kRaw:
      break;
    case InnerCodecId::kLossless:
      if (quality < 0 || quality > 9) {
        throw Error(ErrorKind::kConfig,
                    "lossless quality (deflate level) must be in [0,9]");
      }
      break;
    case InnerCodecId::kExternal:
      if (quality < 0 || quality > 63) {
        throw Error(ErrorKind::kConfig, "external qp must be in [0,63]");
      }
      break;
  }
}

std::vector<uint8_t> lossless_compress(std::span<const uint8_t> bytes,
                                       int level) {
  if (level <= 0 || level > 9) level = 9;
  uLongf bound = compressBound(static_cast<uLong>(bytes.size()));
  std::vector<uint8_t> deflated(bound);
  const int rc = compress2(deflated.data(), &bound, bytes.data(),
                           static_cast<uLong>(bytes.size()), level);
  std::vector<uint8_t> out;
  if (rc == Z_OK && bound < bytes.size()) {
    out.reserve(bound + 1);
    out.push_back(1);  // deflated
    out.insert(out.end(), deflated.begin(), deflated.begin() + bound);
  } else {
    out.reserve(bytes.size() + 1);
    out.push_back(0);  // stored
    out.insert(out.end(), bytes.begin(), bytes.end());
  }
  return out;
}

std::vector<uint8_t> lossless_decompress(std::span<const uint8_t> payload,
                                         uint64_t expected_size) {
  if (payload.empty()) {
    throw Error(ErrorKind::kCorruptPayload, "empty lossless payload");
  }
  const uint8_t marker = payload[0];
  const std::span<const uint8_t> body = payload.subspan(1);
  if (marker == 0) {
    if (body.size() != expected_size) {
      throw Error(ErrorKind::kCorruptPayload,
                  "stored payload size " + std::to_string(body.size()) +
                      " != expected " + std::to_string(expected_size));
    }
    return {body.begin(), body.end()};
  }
  if (marker != 1) {
    throw Error(ErrorKind::kCorruptPayload, "unknown lossless payload marker");
  }
  std::vector<uint8_t> out(expected_size);
  uLongf dest_len = static_cast<uLongf>(expected_size);
  const int rc = uncompress(out.data(), &dest_len, body.data(),
                            static_cast<uLong>(body.size()));
  if (rc != Z_OK || dest_len != expected_size) {
    throw Error(ErrorKind::kCorruptPayload,
                "inflate failed (zlib rc " + std::to_string(rc) + ")");
  }
  return out;
}

namespace {

void check_frames(std::span<const QuantizedFrame> frames) {
  if (frames.empty()) {
    throw Error(ErrorKind::kDimensionMismatch, "no frames to encode");
  }
  const PackGeometry& g = frames[0].geom;
  for (size_t i = 0; i < frames.size(); ++i) {
    const QuantizedFrame& f = frames[i];
    if (f.geom.frame_height() != g.frame_height() ||
        f.geom.frame_width() != g.frame_width()) {
      throw Error(ErrorKind::kDimensionMismatch,
                  "frame " + std::to_string(i) + " dims differ from frame 0");
    }
    if (f.samples.size() != f.geom.sample_count()) {
      throw Error(ErrorKind::kDimensionMismatch,
                  "frame " + std::to_string(i) + " sample count mismatch");
    }
  }
}

std::string replace_all(std::string text, const std::string& token,
                        const std::string& value) {
  size_t pos = 0;
  while ((pos = text.find(token, pos)) != std::string::npos) {
    text.replace(pos, token.size(), value);
    pos += value.size();
  }
  return text;
}

std::string format_fps(double fps) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", fps);
  return buf;
}

// Best-effort temp file that removes itself.
struct TempFile {
  std::filesystem::path path;
  explicit TempFile(const std::string& suffix) {
    static std::atomic<uint64_t> counter{0};
    static const uint64_t salt = std::random_device{}();
    path = std::filesystem::temp_directory_path() /
           ("fcm-" + std::to_string(salt) + "-" +
            std::to_string(counter.fetch_add(1)) + suffix);
  }
  ~TempFile() {
    std::error_code ec;
    std::filesystem::remove(path, ec);
  }
};

void run_external(const std::string& command_template,
                  const std::filesystem::path& input,
                  const std::filesystem::path& output, const InnerConfig& cfg,
                  const PackGeometry& geom, uint32_t frame_count) {
  if (command_template.empty()) {
    throw Error(ErrorKind::kExternalTool,
                "external codec selected but no command template configured");
  }
  std::string cmd = command_template;
  cmd = replace_all(cmd, "{input}", input.string());
  cmd = replace_all(cmd, "{output}", output.string());
  cmd = replace_all(cmd, "{qp}", std::to_string(cfg.quality));
  cmd = replace_all(cmd, "{width}", std::to_string(geom.frame_width()));
  cmd = replace_all(cmd, "{height}", std::to_string(geom.frame_height()));
  cmd = replace_all(cmd, "{fps}", format_fps(cfg.fps));
  cmd = replace_all(cmd, "{frames}", std::to_string(frame_count));
  cmd = replace_all(cmd, "{gop}", std::to_string(cfg.gop_hint));

  TempFile log(".log");
  const std::string wrapped = "( " + cmd + " ) > " + log.path.string() + " 2>&1";
  const int rc = std::system(wrapped.c_str());
  if (rc != 0) {
    std::string tail;
    std::ifstream in(log.path);
    std::string line;
    while (std::getline(in, line)) tail = line;
    throw Error(ErrorKind::kExternalTool,
                "command `" + cmd + "` exited with status " +
                    std::to_string(rc) +
                    (tail.empty() ? "" : " (" + tail + ")"));
  }
  if (!std::filesystem::exists(output)) {
    throw Error(ErrorKind::kExternalTool,
                "command `" + cmd + "` produced no output file");
  }
}

std::vector<uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::kIo, "cannot open " + path.string());
  }
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  if (in.bad()) {
    throw Error(ErrorKind::kIo, "read failure on " + path.string());
  }
  return bytes;
}

void write_file_bytes(const std::filesystem::path& path,
                      std::span<const uint8_t> bytes) {
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

}  // namespace

std::vector<uint8_t> inner_encode(std::span<const QuantizedFrame> frames,
                                  const InnerConfig& cfg) {
  cfg.validate();
  check_frames(frames);
  switch (cfg.codec) {
    case InnerCodecId::kRaw:
      return yuv400_16le_bytes(frames);
    case InnerCodecId::kLossless:
      return lossless_compress(yuv400_16le_bytes(frames), cfg.quality);
    case InnerCodecId::kExternal: {
      TempFile input(".yuv");
      TempFile output(".bin");
      write_yuv400_16le(input.path, frames);
      run_external(cfg.external_encode_cmd, input.path, output.path, cfg,
                   frames[0].geom, static_cast<uint32_t>(frames.size()));
      return read_file_bytes(output.path);
    }
  }
  throw Error(ErrorKind::kConfig, "unknown inner codec");
}

std::vector<QuantizedFrame> inner_decode(std::span<const uint8_t> payload,
                                         const InnerConfig& cfg,
                                         const PackGeometry& geom,
                                         uint32_t frame_count) {
  cfg.validate();
  const uint64_t raw_size = geom.sample_count() * 2 * frame_count;
  switch (cfg.codec) {
    case InnerCodecId::kRaw:
      if (payload.size() != raw_size) {
        throw Error(ErrorKind::kCorruptPayload,
                    "raw payload size " + std::to_string(payload.size()) +
                        " != expected " + std::to_string(raw_size));
      }
      return parse_yuv400_16le(payload, geom, frame_count);
    case InnerCodecId::kLossless:
      return parse_yuv400_16le(lossless_decompress(payload, raw_size), geom,
                               frame_count);
    case InnerCodecId::kExternal: {
      TempFile input(".bin");
      TempFile output(".yuv");
      write_file_bytes(input.path, payload);
      run_external(cfg.external_decode_cmd, input.path, output.path, cfg, geom,
                   frame_count);
      return read_yuv400_16le(output.path, geom, frame_count);
    }
  }
  throw Error(ErrorKind::kConfig, "unknown inner codec");
}

}  // namespace fcm
