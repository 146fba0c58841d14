#pragma once

#include <cstdint>
#include <cstring>
#include <span>
#include <vector>

#include "fcm/error.hpp"

namespace fcm {

// Little-endian serialization helpers used by the FTS1 and FCMB formats.

inline void put_u8(std::vector<uint8_t>& out, uint8_t v) { out.push_back(v); }

inline void put_u16(std::vector<uint8_t>& out, uint16_t v) {
  out.push_back(uint8_t(v & 0xff));
  out.push_back(uint8_t(v >> 8));
}

inline void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(uint8_t((v >> (8 * i)) & 0xff));
}

inline void put_u64(std::vector<uint8_t>& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(uint8_t((v >> (8 * i)) & 0xff));
}

inline void put_f32(std::vector<uint8_t>& out, float v) {
  uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_u32(out, bits);
}

// Cursor over a byte buffer. Every read is bounds-checked and reports the
// offset where the data ran out.
class ByteReader {
 public:
  explicit ByteReader(std::span<const uint8_t> data) : data_(data) {}

  uint64_t offset() const { return offset_; }
  uint64_t remaining() const { return data_.size() - offset_; }

  void require(uint64_t n, const char* what) const {
    if (remaining() < n) {
      throw Error(ErrorKind::kTruncated,
                  std::string("unexpected end of data while reading ") + what,
                  offset_);
    }
  }

  uint8_t u8(const char* what) {
    require(1, what);
    return data_[offset_++];
  }

  uint16_t u16(const char* what) {
    require(2, what);
    uint16_t v = uint16_t(data_[offset_]) | uint16_t(data_[offset_ + 1]) << 8;
    offset_ += 2;
    return v;
  }

  uint32_t u32(const char* what) {
    require(4, what);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= uint32_t(data_[offset_ + i]) << (8 * i);
    offset_ += 4;
    return v;
  }

  uint64_t u64(const char* what) {
    require(8, what);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= uint64_t(data_[offset_ + i]) << (8 * i);
    offset_ += 8;
    return v;
  }

  float f32(const char* what) {
    uint32_t bits = u32(what);
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
  }

  std::span<const uint8_t> bytes(uint64_t n, const char* what) {
    require(n, what);
    auto out = data_.subspan(offset_, n);
    offset_ += n;
    return out;
  }

 private:
  std::span<const uint8_t> data_;
  uint64_t offset_ = 0;
};

}  // namespace fcm
