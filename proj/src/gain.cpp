#include "fcm/gain.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace fcm {

GainVector GainVector::unit(uint32_t channels) {
  return {std::vector<float>(channels, 1.f), 0};
}

bool GainVector::is_unit() const {
  for (float m : multipliers) {
    if (m != 1.f) return false;
  }
  return true;
}

void GainVector::validate(uint32_t expected_channels) const {
  if (multipliers.size() != expected_channels) {
    throw Error(ErrorKind::kGainLength,
                "gain vector " + std::to_string(index) + " has " +
                    std::to_string(multipliers.size()) +
                    " multipliers, fused tensor has " +
                    std::to_string(expected_channels) + " channels");
  }
  for (float m : multipliers) {
    if (!(m > 0.f) || !std::isfinite(m)) {
      throw Error(ErrorKind::kConfig,
                  "gain multipliers must be positive and finite");
    }
  }
}

GainTable GainTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::kIo, "cannot open gain table " + path.string());
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

GainTable GainTable::parse(std::string_view text) {
  GainTable table;
  std::istringstream lines{std::string(text)};
  std::string line;
  size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;

    const auto colon = line.find(':');
    if (colon == std::string::npos) {
      throw Error(ErrorKind::kConfig,
                  "gain table line " + std::to_string(line_no) +
                      ": expected `index: v1,v2,...`");
    }
    long index = -1;
    try {
      index = std::stol(line.substr(0, colon));
    } catch (const std::exception&) {
      throw Error(ErrorKind::kConfig,
                  "gain table line " + std::to_string(line_no) +
                      ": bad index");
    }
    if (index < 0 || index > 0xffff) {
      throw Error(ErrorKind::kConfig,
                  "gain table line " + std::to_string(line_no) +
                      ": index out of range");
    }
    std::vector<float> values;
    std::istringstream rest(line.substr(colon + 1));
    std::string item;
    while (std::getline(rest, item, ',')) {
      try {
        values.push_back(std::stof(item));
      } catch (const std::exception&) {
        throw Error(ErrorKind::kConfig,
                    "gain table line " + std::to_string(line_no) +
                        ": bad multiplier `" + item + "`");
      }
    }
    table.set(static_cast<uint16_t>(index), std::move(values));
  }
  return table;
}

void GainTable::set(uint16_t index, std::vector<float> multipliers) {
  if (index == 0) {
    throw Error(ErrorKind::kConfig, "gain index 0 is reserved for unit gain");
  }
  if (multipliers.empty()) {
    throw Error(ErrorKind::kConfig,
                "gain vector " + std::to_string(index) + " is empty");
  }
  for (float m : multipliers) {
    if (!(m > 0.f) || !std::isfinite(m)) {
      throw Error(ErrorKind::kConfig,
                  "gain multipliers must be positive and finite");
    }
  }
  vectors_[index] = std::move(multipliers);
}

GainVector GainTable::resolve(uint16_t index, uint32_t channels) const {
  if (index == 0) {
    return GainVector::unit(channels);
  }
  auto it = vectors_.find(index);
  if (it == vectors_.end()) {
    throw Error(ErrorKind::kConfig,
                "gain index " + std::to_string(index) + " not in table");
  }
  GainVector gain{it->second, index};
  gain.validate(channels);
  return gain;
}

}  // namespace fcm
