#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "fcm/pipeline.hpp"

namespace fcm {

// Plain-text key=value configuration, `#` starts a comment. Keys are listed
// in the README.
class ConfigMap {
 public:
  static ConfigMap load(const std::filesystem::path& path);
  static ConfigMap parse(std::string_view text);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;

  std::string get_string(const std::string& key,
                         const std::string& fallback) const;
  long get_int(const std::string& key, long fallback) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

// Builds pipeline configs from a ConfigMap, loading the gain table when the
// `gain_table` key names one. The FCM_EXTERNAL_CODEC and FCM_EXTERNAL_DECODER
// environment variables override the command-template keys.
EncodeConfig make_encode_config(const ConfigMap& cfg);
DecodeConfig make_decode_config(const ConfigMap& cfg);

}  // namespace fcm
