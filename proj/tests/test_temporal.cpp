#include <doctest.h>

#include "fcm/temporal.hpp"
#include "test_util.hpp"

using namespace fcm;
using namespace fcm::test;

namespace {

FeatureTensorSet constant_frames(const std::vector<float>& values) {
  FeatureTensorSet set;
  set.frame_rate = 30.f;
  for (float v : values) {
    set.frames.push_back({FeatureLayer::constant(2, 4, 4, v)});
  }
  return set;
}

}  // namespace

TEST_CASE("disabled sampling is the identity") {
  std::mt19937 rng(10);
  const FeatureTensorSet set = random_set(rng, 5, 2, 2, 8, 8);
  auto [sampled, info] = temporal_downsample(set, false);
  CHECK(sets_equal(sampled, set));
  CHECK(info.original_frame_count == 5);
  CHECK_FALSE(info.enabled);
  CHECK(sets_equal(temporal_upsample(sampled, info), set));
}

TEST_CASE("enabled sampling keeps even indices") {
  const FeatureTensorSet set = constant_frames({0.f, 1.f, 2.f, 3.f, 4.f});
  auto [sampled, info] = temporal_downsample(set, true);
  REQUIRE(sampled.frames.size() == 3);
  CHECK(sampled.frames[0][0].data[0] == 0.f);
  CHECK(sampled.frames[1][0].data[0] == 2.f);
  CHECK(sampled.frames[2][0].data[0] == 4.f);

  SUBCASE("single frame input") {
    auto [one, info1] = temporal_downsample(constant_frames({7.f}), true);
    CHECK(one.frames.size() == 1);
    CHECK(info1.original_frame_count == 1);
  }
}

TEST_CASE("upsample reconstructs the elementwise midpoint") {
  auto [sampled, info] = temporal_downsample(constant_frames({0.f, 9.f, 2.f}), true);
  REQUIRE(sampled.frames.size() == 2);
  const FeatureTensorSet up = temporal_upsample(sampled, info);
  REQUIRE(up.frames.size() == 3);
  for (float v : up.frames[1][0].data) CHECK(v == 1.f);
}

TEST_CASE("missing final frame replicates its neighbor") {
  auto [sampled, info] = temporal_downsample(constant_frames({5.f, 8.f}), true);
  REQUIRE(sampled.frames.size() == 1);
  const FeatureTensorSet up = temporal_upsample(sampled, info);
  REQUIRE(up.frames.size() == 2);
  for (float v : up.frames[1][0].data) CHECK(v == 5.f);
}

TEST_CASE("round trip is exact for time-constant input") {
  std::mt19937 rng(11);
  FeatureTensorSet set = random_set(rng, 1, 2, 3, 8, 8);
  for (int i = 0; i < 5; ++i) set.frames.push_back(set.frames[0]);
  auto [sampled, info] = temporal_downsample(set, true);
  CHECK(sets_equal(temporal_upsample(sampled, info), set));
}

TEST_CASE("interpolated frames stay inside the neighbor envelope") {
  std::mt19937 rng(12);
  const FeatureTensorSet set = random_set(rng, 7, 1, 2, 8, 8);
  auto [sampled, info] = temporal_downsample(set, true);
  const FeatureTensorSet up = temporal_upsample(sampled, info);
  REQUIRE(up.frames.size() == set.frames.size());
  for (size_t i = 1; i < up.frames.size(); i += 2) {
    if (i + 1 >= up.frames.size()) continue;
    const auto& prev = set.frames[i - 1][0].data;
    const auto& next = set.frames[i + 1][0].data;
    const auto& mid = up.frames[i][0].data;
    for (size_t e = 0; e < mid.size(); ++e) {
      CHECK(mid[e] >= std::min(prev[e], next[e]));
      CHECK(mid[e] <= std::max(prev[e], next[e]));
    }
  }
}

TEST_CASE("frame count mismatch is detected") {
  const FeatureTensorSet set = constant_frames({1.f, 2.f, 3.f});
  const TemporalInfo info{7, true};  // expects 4 kept frames
  CHECK(catch_kind([&] { temporal_upsample(set, info); }) ==
        ErrorKind::kMismatch);
}

TEST_CASE("upsampled count always equals the original count") {
  std::mt19937 rng(13);
  for (uint32_t n = 1; n <= 9; ++n) {
    const FeatureTensorSet set = random_set(rng, n, 1, 1, 4, 4);
    auto [sampled, info] = temporal_downsample(set, true);
    CHECK(temporal_upsample(sampled, info).frames.size() == n);
  }
}
