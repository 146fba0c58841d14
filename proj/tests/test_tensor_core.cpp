#include <doctest.h>

#include <fstream>

#include "fcm/fts_io.hpp"
#include "fcm/tensor.hpp"
#include "test_util.hpp"

using namespace fcm;
using namespace fcm::test;

TEST_CASE("minimal well-formed set loads back") {
  std::mt19937 rng(1);
  FeatureTensorSet set = random_set(rng, 1, 2, 2, 8, 8);
  const auto bytes = fts_to_bytes(set);
  const FeatureTensorSet loaded = fts_from_bytes(bytes);
  CHECK(loaded.frames.size() == 1);
  CHECK(loaded.frames[0].size() == 2);
  CHECK(loaded.frames[0][0].shape() == LayerShape{2, 8, 8});
  CHECK(loaded.frames[0][1].shape() == LayerShape{2, 4, 4});
}

TEST_CASE("half-size rule violation is a ShapeError") {
  std::mt19937 rng(2);
  FeatureTensorSet set = random_set(rng, 1, 2, 2, 8, 8);
  auto bytes = fts_to_bytes(set);
  // Second layer's height field sits at offset 16 + 10 + 2.
  bytes[28] = 5;
  CHECK(catch_kind([&] { fts_from_bytes(bytes); }) == ErrorKind::kShape);

  FeatureTensorSet direct = set;
  direct.frames[0][1] = FeatureLayer::zeros(2, 5, 4);
  CHECK(catch_kind([&] { direct.validate(); }) == ErrorKind::kShape);
}

TEST_CASE("save/load round trip is bit-exact on random sets") {
  std::mt19937 rng(3);
  for (int iter = 0; iter < 25; ++iter) {
    std::uniform_int_distribution<uint32_t> frames(1, 4), layers(1, 3),
        channels(1, 5);
    const uint32_t n_layers = layers(rng);
    const uint32_t base = 4u << n_layers;
    FeatureTensorSet set =
        random_set(rng, frames(rng), n_layers, channels(rng), base, base);
    const auto bytes = fts_to_bytes(set);
    const FeatureTensorSet loaded = fts_from_bytes(bytes);
    CHECK(sets_equal(set, loaded));
    CHECK(fts_to_bytes(loaded) == bytes);
  }
}

TEST_CASE("file round trip and byte determinism") {
  std::mt19937 rng(4);
  FeatureTensorSet set = random_set(rng, 3, 2, 4, 16, 8);
  TempPath a(".fts"), b(".fts");
  save_fts(set, a.path);
  save_fts(set, b.path);
  const FeatureTensorSet loaded = load_fts(a.path);
  CHECK(sets_equal(set, loaded));

  std::ifstream fa(a.path, std::ios::binary), fb(b.path, std::ios::binary);
  const std::string ba((std::istreambuf_iterator<char>(fa)),
                       std::istreambuf_iterator<char>());
  const std::string bb((std::istreambuf_iterator<char>(fb)),
                       std::istreambuf_iterator<char>());
  CHECK(ba == bb);
}

TEST_CASE("zero frames or layers are rejected") {
  FeatureTensorSet empty;
  empty.frame_rate = 30.f;
  CHECK(catch_kind([&] { fts_to_bytes(empty); }) == ErrorKind::kFormat);

  FeatureTensorSet no_layers;
  no_layers.frame_rate = 30.f;
  no_layers.frames.resize(1);
  CHECK(catch_kind([&] { fts_to_bytes(no_layers); }) == ErrorKind::kFormat);
}

TEST_CASE("malformed FTS bytes give structured errors") {
  std::mt19937 rng(5);
  FeatureTensorSet set = random_set(rng, 1, 1, 1, 4, 4);
  auto bytes = fts_to_bytes(set);

  SUBCASE("bad magic") {
    bytes[0] = 'X';
    CHECK(catch_kind([&] { fts_from_bytes(bytes); }) == ErrorKind::kFormat);
  }
  SUBCASE("truncated header") {
    bytes.resize(10);
    CHECK(catch_kind([&] { fts_from_bytes(bytes); }) == ErrorKind::kTruncated);
  }
  SUBCASE("truncated payload") {
    bytes.resize(bytes.size() - 3);
    CHECK(catch_kind([&] { fts_from_bytes(bytes); }) == ErrorKind::kTruncated);
  }
  SUBCASE("trailing garbage") {
    bytes.push_back(0);
    CHECK(catch_kind([&] { fts_from_bytes(bytes); }) == ErrorKind::kFormat);
  }
  SUBCASE("NaN payload") {
    const uint32_t nan_bits = 0x7fc00000u;
    std::memcpy(bytes.data() + bytes.size() - 4, &nan_bits, 4);
    CHECK(catch_kind([&] { fts_from_bytes(bytes); }) == ErrorKind::kFormat);
  }
  SUBCASE("zero frame rate") {
    const uint32_t zero = 0;
    std::memcpy(bytes.data() + 12, &zero, 4);
    CHECK(catch_kind([&] { fts_from_bytes(bytes); }) == ErrorKind::kFormat);
  }
}

TEST_CASE("tensor_stats") {
  SUBCASE("constant layer") {
    const FeatureLayer layer = FeatureLayer::constant(1, 2, 2, 0.5f);
    const MinMax mm = tensor_stats(layer);
    CHECK(mm.min == 0.5f);
    CHECK(mm.max == 0.5f);
  }
  SUBCASE("mixed values") {
    FeatureLayer layer{1, 1, 3, {-1.f, 0.f, 3.f}};
    const MinMax mm = tensor_stats(layer);
    CHECK(mm.min == -1.f);
    CHECK(mm.max == 3.f);
  }
  SUBCASE("random layer matches brute-force scan and bounds all elements") {
    std::mt19937 rng(6);
    const FeatureLayer layer = random_layer(rng, 3, 8, 8);
    const MinMax mm = tensor_stats(layer);
    float lo = layer.data[0], hi = layer.data[0];
    for (float v : layer.data) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    CHECK(mm.min == lo);
    CHECK(mm.max == hi);
    for (float v : layer.data) {
      CHECK(mm.min <= v);
      CHECK(v <= mm.max);
    }
  }
}
