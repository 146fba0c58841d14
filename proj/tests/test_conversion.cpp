#include <doctest.h>

#include <cstring>

#include "fcm/conversion.hpp"
#include "test_util.hpp"

using namespace fcm;
using namespace fcm::test;

namespace {

FusedTensor random_fused(std::mt19937& rng, uint32_t channels, uint32_t h,
                         uint32_t w, float lo = -4.f, float hi = 4.f) {
  const FeatureLayer layer = random_layer(rng, channels, h, w, lo, hi);
  return {channels, h, w, layer.data, 0};
}

}  // namespace

TEST_CASE("pack grid follows the ceil-sqrt rule") {
  SUBCASE("perfect square") {
    std::mt19937 rng(30);
    const FusedTensor fused = random_fused(rng, 4, 2, 2);
    const PackedFrame frame = pack(fused);
    CHECK(frame.geom.grid_rows == 2);
    CHECK(frame.geom.grid_cols == 2);
    CHECK(frame.geom.frame_height() == 4);
    CHECK(frame.geom.frame_width() == 4);
  }
  SUBCASE("8 channels pad a 3x3 grid") {
    std::mt19937 rng(31);
    const FusedTensor fused = random_fused(rng, 8, 4, 4);
    const PackedFrame frame = pack(fused);
    CHECK(frame.geom.grid_rows == 3);
    CHECK(frame.geom.grid_cols == 3);
    CHECK(frame.geom.frame_height() == 12);
    CHECK(frame.geom.frame_width() == 12);
    // Last cell is zero-filled padding.
    for (uint32_t y = 8; y < 12; ++y) {
      for (uint32_t x = 8; x < 12; ++x) {
        CHECK(frame.samples[y * 12 + x] == 0.f);
      }
    }
  }
  SUBCASE("single channel is the identity") {
    std::mt19937 rng(32);
    const FusedTensor fused = random_fused(rng, 1, 6, 5);
    const PackedFrame frame = pack(fused);
    CHECK(frame.geom.grid_rows == 1);
    CHECK(frame.geom.grid_cols == 1);
    CHECK(frame.samples == fused.data);
  }
}

TEST_CASE("raster placement puts channel c at cell (c/cols, c%cols)") {
  FusedTensor fused{5, 1, 1, {10.f, 11.f, 12.f, 13.f, 14.f}, 0};
  const PackedFrame frame = pack(fused);
  REQUIRE(frame.geom.grid_cols == 3);
  REQUIRE(frame.geom.grid_rows == 2);
  CHECK(frame.samples == std::vector<float>{10.f, 11.f, 12.f, 13.f, 14.f, 0.f});
}

TEST_CASE("unpack inverts pack bit-exactly over random shapes") {
  std::mt19937 rng(33);
  std::uniform_int_distribution<uint32_t> channels(1, 64);
  std::uniform_int_distribution<uint32_t> dim(1, 16);
  for (int iter = 0; iter < 100; ++iter) {
    const FusedTensor fused =
        random_fused(rng, channels(rng), 2 * dim(rng), 2 * dim(rng));
    const FusedTensor back = unpack(pack(fused));
    CHECK(back.channels == fused.channels);
    CHECK(back.height == fused.height);
    CHECK(back.width == fused.width);
    CHECK(std::memcmp(back.data.data(), fused.data.data(),
                      fused.data.size() * 4) == 0);
  }
}

TEST_CASE("quantize endpoints and clamping") {
  PackedFrame frame;
  frame.geom = PackGeometry::for_source(1, 1, 4);
  frame.samples = {0.f, 1.f, 2.f, -0.5f};
  QuantizationParams params{10, 0.f, 2.f};

  const QuantizedFrame q = quantize(frame, params);
  CHECK(q.samples[0] == 0);          // x_min
  CHECK(q.samples[1] == 511);        // floor(0.5 * 1023)
  CHECK(q.samples[2] == 1023);       // x_max
  CHECK(q.samples[3] == 0);          // clamped below range

  SUBCASE("degenerate range maps to zero") {
    QuantizationParams flat{10, 1.f, 1.f};
    PackedFrame c;
    c.geom = frame.geom;
    c.samples = {1.f, 1.f, 1.f, 1.f};
    const QuantizedFrame qc = quantize(c, flat);
    for (uint16_t s : qc.samples) CHECK(s == 0);
    const PackedFrame back = dequantize(qc, flat);
    for (float v : back.samples) CHECK(v == 1.f);
  }
}

TEST_CASE("dequantize endpoints") {
  QuantizedFrame q;
  q.geom = PackGeometry::for_source(1, 1, 3);
  q.samples = {0, 511, 1023};
  QuantizationParams params{10, 0.f, 2.f};
  const PackedFrame frame = dequantize(q, params);
  CHECK(frame.samples[0] == 0.f);
  CHECK(frame.samples[2] == 2.f);
  CHECK(frame.samples[1] == doctest::Approx(511.0 / 1023.0 * 2.0).epsilon(1e-6));
  CHECK(frame.samples[1] == doctest::Approx(0.99902).epsilon(1e-4));
}

TEST_CASE("round-trip error is below one quantization step") {
  std::mt19937 rng(34);
  for (uint8_t bitdepth : {uint8_t(8), uint8_t(10), uint8_t(12)}) {
    for (int iter = 0; iter < 50; ++iter) {
      std::uniform_int_distribution<uint32_t> dim(2, 12);
      FusedTensor fused = random_fused(rng, 3, dim(rng) * 2, dim(rng) * 2,
                                       -100.f, 100.f);
      const PackedFrame frame = pack(fused);
      const QuantizationParams params =
          QuantizationParams::from_frame(frame, bitdepth);
      const PackedFrame back = dequantize(quantize(frame, params), params);
      const double step = (double(params.x_max) - double(params.x_min)) /
                          double(params.max_num_bits());
      for (size_t i = 0; i < frame.samples.size(); ++i) {
        CHECK(std::fabs(double(frame.samples[i]) - double(back.samples[i])) <
              step);
      }
    }
  }
}

TEST_CASE("quantize output never exceeds max_num_bits") {
  std::mt19937 rng(35);
  const FusedTensor fused = random_fused(rng, 2, 8, 8, -1e3f, 1e3f);
  const PackedFrame frame = pack(fused);
  for (uint8_t bitdepth : {uint8_t(8), uint8_t(12), uint8_t(16)}) {
    const QuantizationParams params =
        QuantizationParams::from_frame(frame, bitdepth);
    const QuantizedFrame q = quantize(frame, params);
    for (uint16_t s : q.samples) CHECK(s <= params.max_num_bits());
  }
}

TEST_CASE("quantize then dequantize is monotone non-decreasing") {
  PackedFrame frame;
  frame.geom = PackGeometry::for_source(1, 1, 256);
  frame.samples.resize(256);
  std::mt19937 rng(36);
  std::uniform_real_distribution<float> dist(-5.f, 5.f);
  for (float& v : frame.samples) v = dist(rng);
  std::sort(frame.samples.begin(), frame.samples.end());

  const QuantizationParams params = QuantizationParams::from_frame(frame, 8);
  const PackedFrame back = dequantize(quantize(frame, params), params);
  for (size_t i = 0; i + 1 < back.samples.size(); ++i) {
    CHECK(back.samples[i] <= back.samples[i + 1]);
  }
}

TEST_CASE("bitdepth outside [8,16] is rejected") {
  QuantizationParams params{7, 0.f, 1.f};
  PackedFrame frame;
  frame.geom = PackGeometry::for_source(1, 1, 1);
  frame.samples = {0.5f};
  CHECK(catch_kind([&] { quantize(frame, params); }) == ErrorKind::kConfig);
}

TEST_CASE("packed geometry invariants hold for arbitrary channel counts") {
  for (uint32_t c : {1u, 2u, 3u, 4u, 5u, 8u, 9u, 15u, 16u, 17u, 63u, 64u,
                     65u, 100u, 1360u}) {
    const PackGeometry g = PackGeometry::for_source(c, 2, 2);
    CHECK(uint64_t(g.grid_rows) * g.grid_cols >= c);
    CHECK(uint64_t(g.grid_rows - 1) * g.grid_cols < c);
    g.validate();
  }
}
