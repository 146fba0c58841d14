#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace fcm {

// Failure taxonomy shared across the codec. Tests and the CLI dispatch on
// the kind, never on message text.
enum class ErrorKind {
  kIo,
  kFormat,
  kShape,
  kMismatch,
  kGainLength,
  kReducerMismatch,
  kDimensionMismatch,
  kExternalTool,
  kCorruptPayload,
  kBadMagic,
  kUnsupportedVersion,
  kTruncated,
  kConsistency,
  kInsufficientOverlap,
  kDegenerateFit,
  kNonPositiveTime,
  kConfig,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message);
  Error(ErrorKind kind, std::string message, uint64_t byte_offset);

  // Copy of `cause` tagged with the pipeline stage it surfaced in.
  static Error staged(const std::string& stage, const Error& cause);

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& message() const noexcept { return message_; }
  const std::string& stage() const noexcept { return stage_; }
  std::optional<uint64_t> byte_offset() const noexcept { return byte_offset_; }

 private:
  Error(ErrorKind kind, std::string message, std::string stage,
        std::optional<uint64_t> byte_offset);

  ErrorKind kind_;
  std::string message_;
  std::string stage_;
  std::optional<uint64_t> byte_offset_;
};

}  // namespace fcm
