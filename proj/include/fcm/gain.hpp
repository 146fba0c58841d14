#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string_view>
#include <vector>

#include "fcm/error.hpp"

namespace fcm {

// Per-channel multipliers applied to the fused tensor. Index 0 is the
// implicit unit vector and may not be redefined.
struct GainVector {
  std::vector<float> multipliers;
  uint16_t index = 0;

  static GainVector unit(uint32_t channels);
  bool is_unit() const;
  void validate(uint32_t expected_channels) const;
};

// Table of gain vectors keyed by quality index, loaded from a plain-text
// config: one `index: v1,v2,...` line per vector, `#` starts a comment.
class GainTable {
 public:
  static GainTable load(const std::filesystem::path& path);
  static GainTable parse(std::string_view text);

  void set(uint16_t index, std::vector<float> multipliers);
  bool contains(uint16_t index) const { return vectors_.count(index) != 0; }
  bool empty() const { return vectors_.empty(); }

  // Index 0 resolves to the unit vector of the requested length.
  GainVector resolve(uint16_t index, uint32_t channels) const;

 private:
  std::map<uint16_t, std::vector<float>> vectors_;
};

}  // namespace fcm
