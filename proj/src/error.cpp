#include "fcm/error.hpp"

namespace fcm {

namespace {

std::string compose(ErrorKind kind, const std::string& message,
                    const std::string& stage,
                    const std::optional<uint64_t>& byte_offset) {
  std::string text;
  if (!stage.empty()) {
    text += "[" + stage + "] ";
  }
  text += to_string(kind);
  if (byte_offset) {
    text += " at byte " + std::to_string(*byte_offset);
  }
  text += ": " + message;
  return text;
}

}  // namespace

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kIo: return "IoError";
    case ErrorKind::kFormat: return "FormatError";
    case ErrorKind::kShape: return "ShapeError";
    case ErrorKind::kMismatch: return "MismatchError";
    case ErrorKind::kGainLength: return "GainLengthError";
    case ErrorKind::kReducerMismatch: return "ReducerMismatchError";
    case ErrorKind::kDimensionMismatch: return "DimensionMismatch";
    case ErrorKind::kExternalTool: return "ExternalToolError";
    case ErrorKind::kCorruptPayload: return "CorruptPayload";
    case ErrorKind::kBadMagic: return "BadMagic";
    case ErrorKind::kUnsupportedVersion: return "UnsupportedVersion";
    case ErrorKind::kTruncated: return "Truncated";
    case ErrorKind::kConsistency: return "ConsistencyError";
    case ErrorKind::kInsufficientOverlap: return "InsufficientOverlap";
    case ErrorKind::kDegenerateFit: return "DegenerateFit";
    case ErrorKind::kNonPositiveTime: return "NonPositiveTime";
    case ErrorKind::kConfig: return "ConfigError";
  }
  return "Error";
}

Error::Error(ErrorKind kind, std::string message)
    : Error(kind, std::move(message), {}, std::nullopt) {}

Error::Error(ErrorKind kind, std::string message, uint64_t byte_offset)
    : Error(kind, std::move(message), {}, byte_offset) {}

Error::Error(ErrorKind kind, std::string message, std::string stage,
             std::optional<uint64_t> byte_offset)
    : std::runtime_error(compose(kind, message, stage, byte_offset)),
      kind_(kind),
      message_(std::move(message)),
      stage_(std::move(stage)),
      byte_offset_(byte_offset) {}

Error Error::staged(const std::string& stage, const Error& cause) {
  return Error(cause.kind_, cause.message_, stage, cause.byte_offset_);
}

}  // namespace fcm
