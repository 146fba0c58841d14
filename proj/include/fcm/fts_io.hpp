#pragma once

#include <filesystem>
#include <span>

#include "fcm/tensor.hpp"

namespace fcm {

// FTS1 feature-tensor-set file format. Byte layout in docs/fts_format.md.

FeatureTensorSet load_fts(const std::filesystem::path& path);
void save_fts(const FeatureTensorSet& set, const std::filesystem::path& path);

// In-memory codec backing the file functions; byte-deterministic.
std::vector<uint8_t> fts_to_bytes(const FeatureTensorSet& set);
FeatureTensorSet fts_from_bytes(std::span<const uint8_t> bytes);

}  // namespace fcm
