#include <doctest.h>

#include "fcm/bitstream.hpp"
#include "test_util.hpp"

using namespace fcm;
using namespace fcm::test;

namespace {

FcmHeader minimal_header(uint64_t payload_len) {
  FcmHeader h;
  h.reducer = ReducerId::kS2D;
  h.inner_codec = InnerCodecId::kRaw;
  h.temporal_enabled = false;
  h.original_frame_count = 1;
  h.frame_rate = 30.f;
  h.gain_index = 0;
  h.layer_shapes = {{1, 4, 4}};
  h.fused_channels = 4;
  h.fused_height = 2;
  h.fused_width = 2;
  h.grid_rows = 2;
  h.grid_cols = 2;
  h.bitdepth = 10;
  h.frame_ranges = {{-1.f, 1.f}};
  h.quality = 0;
  h.gop_hint = 8;
  h.low_delay = true;
  h.payload_length = payload_len;
  return h;
}

std::vector<uint8_t> random_payload(std::mt19937& rng, size_t n) {
  std::uniform_int_distribution<int> byte(0, 255);
  std::vector<uint8_t> out(n);
  for (uint8_t& b : out) b = uint8_t(byte(rng));
  return out;
}

FcmHeader random_header(std::mt19937& rng, uint64_t payload_len) {
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_int_distribution<uint32_t> frames(1, 9), channels(1, 8),
      levels(1, 3);
  std::uniform_real_distribution<float> value(-100.f, 100.f);

  FcmHeader h;
  h.reducer = coin(rng) ? ReducerId::kAvgPool : ReducerId::kS2D;
  h.inner_codec = coin(rng) ? InnerCodecId::kLossless : InnerCodecId::kRaw;
  h.temporal_enabled = coin(rng) == 1;
  h.original_frame_count = frames(rng);
  h.frame_rate = 24.f;
  h.gain_index = uint16_t(frames(rng));

  const uint32_t n_levels = levels(rng);
  uint32_t height = 4u << n_levels, width = 8u << n_levels;
  for (uint32_t k = 0; k < n_levels; ++k) {
    h.layer_shapes.push_back({channels(rng), height, width});
    height /= 2;
    width /= 2;
  }
  const LayerShape fused = fused_shape(h.layer_shapes, h.reducer);
  h.fused_channels = fused.channels;
  h.fused_height = fused.height;
  h.fused_width = fused.width;
  const PackGeometry geom =
      PackGeometry::for_source(fused.channels, fused.height, fused.width);
  h.grid_rows = geom.grid_rows;
  h.grid_cols = geom.grid_cols;
  h.bitdepth = uint8_t(8 + 2 * levels(rng));
  for (uint32_t f = 0; f < h.coded_frame_count(); ++f) {
    const float a = value(rng), b = value(rng);
    h.frame_ranges.push_back({std::min(a, b), std::max(a, b)});
  }
  h.quality = coin(rng) ? 7 : -3;
  h.gop_hint = uint16_t(1 + frames(rng));
  h.low_delay = coin(rng) == 1;
  h.payload_length = payload_len;
  return h;
}

bool headers_equal(const FcmHeader& a, const FcmHeader& b) {
  return a.version == b.version && a.reducer == b.reducer &&
         a.inner_codec == b.inner_codec &&
         a.temporal_enabled == b.temporal_enabled &&
         a.original_frame_count == b.original_frame_count &&
         a.frame_rate == b.frame_rate && a.gain_index == b.gain_index &&
         a.layer_shapes == b.layer_shapes &&
         a.fused_channels == b.fused_channels &&
         a.fused_height == b.fused_height && a.fused_width == b.fused_width &&
         a.grid_rows == b.grid_rows && a.grid_cols == b.grid_cols &&
         a.bitdepth == b.bitdepth &&
         a.frame_ranges.size() == b.frame_ranges.size() &&
         std::equal(a.frame_ranges.begin(), a.frame_ranges.end(),
                    b.frame_ranges.begin(),
                    [](const FrameRange& x, const FrameRange& y) {
                      return x.x_min == y.x_min && x.x_max == y.x_max;
                    }) &&
         a.quality == b.quality && a.gop_hint == b.gop_hint &&
         a.low_delay == b.low_delay && a.payload_length == b.payload_length;
}

}  // namespace

TEST_CASE("serialized size matches the documented layout") {
  std::mt19937 rng(50);
  const auto payload = random_payload(rng, 32);
  const FcmHeader h = minimal_header(payload.size());
  const auto stream = mux(h, payload);
  // 53 fixed bytes + 10 per layer + 8 per coded frame, then the payload.
  CHECK(fcmb_header_size(1, 1) == 71);
  CHECK(stream.size() == 71 + payload.size());
  CHECK(stream.size() == h.serialized_size());
}

TEST_CASE("demux inverts mux exactly on random headers") {
  std::mt19937 rng(51);
  for (int iter = 0; iter < 50; ++iter) {
    std::uniform_int_distribution<size_t> size(0, 300);
    const auto payload = random_payload(rng, size(rng));
    const FcmHeader h = random_header(rng, payload.size());
    const auto stream = mux(h, payload);
    const DemuxResult d = demux(stream);
    CHECK(headers_equal(d.header, h));
    CHECK(d.payload == payload);
    CHECK(mux(d.header, d.payload) == stream);
  }
}

TEST_CASE("golden fixture stays stable") {
  const FcmHeader h = minimal_header(4);
  const std::vector<uint8_t> payload = {0xde, 0xad, 0xbe, 0xef};
  const auto stream = mux(h, payload);

  const char* expected_hex =
      "46434d420100000000010000000000f0410000010001000400000004000000"
      "040000000200000002000000020002000a000080bf0000803f000000000800"
      "010400000000000000deadbeef";
  std::string hex;
  hex.reserve(stream.size() * 2);
  for (uint8_t b : stream) {
    char buf[3];
    std::snprintf(buf, sizeof(buf), "%02x", b);
    hex += buf;
  }
  CHECK(hex == expected_hex);
  CHECK(headers_equal(demux(stream).header, h));
}

TEST_CASE("mux consistency checks") {
  std::mt19937 rng(52);
  const auto payload = random_payload(rng, 16);

  SUBCASE("payload length mismatch") {
    FcmHeader h = minimal_header(payload.size() + 1);
    CHECK(catch_kind([&] { mux(h, payload); }) == ErrorKind::kConsistency);
  }
  SUBCASE("frame range count mismatch") {
    FcmHeader h = minimal_header(payload.size());
    h.frame_ranges.push_back({0.f, 1.f});
    CHECK(catch_kind([&] { mux(h, payload); }) == ErrorKind::kConsistency);
  }
  SUBCASE("grid not matching the ceil-sqrt rule") {
    FcmHeader h = minimal_header(payload.size());
    h.grid_rows = 1;
    h.grid_cols = 4;
    CHECK(catch_kind([&] { mux(h, payload); }) == ErrorKind::kConsistency);
  }
  SUBCASE("zero frames") {
    FcmHeader h = minimal_header(payload.size());
    h.original_frame_count = 0;
    h.frame_ranges.clear();
    CHECK(catch_kind([&] { mux(h, payload); }) == ErrorKind::kConsistency);
  }
}

TEST_CASE("demux error taxonomy") {
  std::mt19937 rng(53);
  const auto payload = random_payload(rng, 8);
  const auto stream = mux(minimal_header(payload.size()), payload);

  SUBCASE("bad magic") {
    auto bad = stream;
    bad[0] = 'X';
    CHECK(catch_kind([&] { demux(bad); }) == ErrorKind::kBadMagic);
  }
  SUBCASE("unsupported version") {
    auto bad = stream;
    bad[4] = 2;
    CHECK(catch_kind([&] { demux(bad); }) == ErrorKind::kUnsupportedVersion);
  }
  SUBCASE("unknown reducer id") {
    auto bad = stream;
    bad[6] = 9;
    CHECK(catch_kind([&] { demux(bad); }) == ErrorKind::kConsistency);
  }
  SUBCASE("truncation reports an offset") {
    for (size_t cut : {3ul, 10ul, 25ul, stream.size() - 9,
                       stream.size() - 1}) {
      auto bad = stream;
      bad.resize(cut);
      try {
        demux(bad);
        FAIL("demux accepted a truncated stream of " << cut << " bytes");
      } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::kTruncated);
        CHECK(e.byte_offset().has_value());
        CHECK(*e.byte_offset() <= cut);
      }
    }
  }
  SUBCASE("trailing bytes rejected") {
    auto bad = stream;
    bad.push_back(0);
    CHECK(catch_kind([&] { demux(bad); }) == ErrorKind::kConsistency);
  }
}

TEST_CASE("mutated streams never crash and always report structured errors") {
  std::mt19937 rng(54);
  const auto payload = random_payload(rng, 64);
  const auto stream = mux(random_header(rng, payload.size()), payload);
  std::uniform_int_distribution<size_t> pos(0, stream.size() - 1);
  std::uniform_int_distribution<int> byte(0, 255);

  int structured = 0, parsed = 0;
  for (int iter = 0; iter < 500; ++iter) {
    auto mutated = stream;
    const int mutations = 1 + iter % 4;
    for (int m = 0; m < mutations; ++m) mutated[pos(rng)] = uint8_t(byte(rng));
    if (iter % 5 == 0) mutated.resize(pos(rng));
    try {
      (void)demux(mutated);
      ++parsed;
    } catch (const Error&) {
      ++structured;
    }
  }
  CHECK(structured + parsed == 500);
}
