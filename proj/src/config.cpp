#include "fcm/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace fcm {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

ConfigMap ConfigMap::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::kIo, "cannot open config " + path.string());
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

ConfigMap ConfigMap::parse(std::string_view text) {
  ConfigMap cfg;
  std::istringstream lines{std::string(text)};
  std::string line;
  size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::kConfig,
                  "config line " + std::to_string(line_no) +
                      ": expected key=value");
    }
    const std::string key = trim(stripped.substr(0, eq));
    if (key.empty()) {
      throw Error(ErrorKind::kConfig,
                  "config line " + std::to_string(line_no) + ": empty key");
    }
    cfg.values_[key] = trim(stripped.substr(eq + 1));
  }
  return cfg;
}

void ConfigMap::set(const std::string& key, const std::string& value) {
  values_[key] = value;
}

bool ConfigMap::has(const std::string& key) const {
  return values_.count(key) != 0;
}

std::string ConfigMap::get_string(const std::string& key,
                                  const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

long ConfigMap::get_int(const std::string& key, long fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    size_t used = 0;
    const long v = std::stol(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument(key);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::kConfig,
                "config key " + key + ": `" + it->second + "` is not an integer");
  }
}

double ConfigMap::get_double(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    size_t used = 0;
    const double v = std::stod(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument(key);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::kConfig,
                "config key " + key + ": `" + it->second + "` is not a number");
  }
}

bool ConfigMap::get_bool(const std::string& key, bool fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const std::string& v = it->second;
  if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "off" || v == "no") return false;
  throw Error(ErrorKind::kConfig,
              "config key " + key + ": `" + v + "` is not a boolean");
}

namespace {

int checked_threads(const ConfigMap& cfg) {
  const long threads = cfg.get_int("threads", 1);
  if (threads < 1 || threads > 1024) {
    throw Error(ErrorKind::kConfig, "threads must be in [1,1024]");
  }
  return static_cast<int>(threads);
}

GainTable load_gain_table(const ConfigMap& cfg) {
  const std::string path = cfg.get_string("gain_table", "");
  return path.empty() ? GainTable{} : GainTable::load(path);
}

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v ? std::string(v) : fallback;
}

}  // namespace

EncodeConfig make_encode_config(const ConfigMap& cfg) {
  EncodeConfig out;

  const std::string reducer = cfg.get_string("reducer", "s2d");
  const auto reducer_id = reducer_from_string(reducer);
  if (!reducer_id) {
    throw Error(ErrorKind::kConfig, "unknown reducer `" + reducer + "`");
  }
  out.reducer = *reducer_id;

  const long gain_index = cfg.get_int("gain_index", 0);
  if (gain_index < 0 || gain_index > 0xffff) {
    throw Error(ErrorKind::kConfig, "gain_index must be in [0,65535]");
  }
  out.gain_index = static_cast<uint16_t>(gain_index);

  out.temporal = cfg.get_bool("temporal", false);

  const long bitdepth = cfg.get_int("bitdepth", 10);
  if (bitdepth < 8 || bitdepth > 16) {
    throw Error(ErrorKind::kConfig, "bitdepth must be in [8,16]");
  }
  out.bitdepth = static_cast<uint8_t>(bitdepth);

  out.bypass_quantization = cfg.get_bool("bypass_quantization", false);

  const std::string codec = cfg.get_string("inner_codec", "lossless");
  const auto codec_id = codec_from_string(codec);
  if (!codec_id) {
    throw Error(ErrorKind::kConfig, "unknown inner_codec `" + codec + "`");
  }
  out.inner.codec = *codec_id;
  out.inner.quality = static_cast<int32_t>(cfg.get_int("quality", 0));
  const long gop = cfg.get_int("gop_hint", 8);
  if (gop < 1 || gop > 0xffff) {
    throw Error(ErrorKind::kConfig, "gop_hint must be in [1,65535]");
  }
  out.inner.gop_hint = static_cast<uint16_t>(gop);
  out.inner.low_delay = cfg.get_bool("low_delay", true);
  out.inner.external_encode_cmd =
      env_or("FCM_EXTERNAL_CODEC",
             cfg.get_string("external_encode_cmd", ""));
  out.inner.external_decode_cmd =
      env_or("FCM_EXTERNAL_DECODER",
             cfg.get_string("external_decode_cmd", ""));
  out.inner.validate();

  out.gains = load_gain_table(cfg);
  out.threads = checked_threads(cfg);
  return out;
}

DecodeConfig make_decode_config(const ConfigMap& cfg) {
  DecodeConfig out;
  out.gains = load_gain_table(cfg);
  out.external_decode_cmd =
      env_or("FCM_EXTERNAL_DECODER",
             cfg.get_string("external_decode_cmd", ""));
  out.threads = checked_threads(cfg);
  return out;
}

}  // namespace fcm
