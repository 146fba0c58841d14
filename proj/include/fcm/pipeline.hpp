#pragma once

#include <span>
#include <string>
#include <vector>

#include "fcm/bitstream.hpp"
#include "fcm/gain.hpp"
#include "fcm/inner_codec.hpp"
#include "fcm/reduction.hpp"
#include "fcm/tensor.hpp"
#include "fcm/temporal.hpp"

namespace fcm {

struct EncodeConfig {
  ReducerId reducer = ReducerId::kS2D;
  uint16_t gain_index = 0;
  bool temporal = false;
  uint8_t bitdepth = 10;
  // Debug mode: skip quantization and carry raw 32-bit float samples so the
  // kS2D path reconstructs bit-exactly. Signalled as bitdepth 32.
  bool bypass_quantization = false;
  InnerConfig inner;
  GainTable gains;
  int threads = 1;
};

struct DecodeConfig {
  GainTable gains;
  // Command template for the external decoder; commands are environment
  // specific and never serialized into the stream.
  std::string external_decode_cmd;
  int threads = 1;
};

// Wall-clock seconds per coding stage. Stage names follow the coding chain:
// feature_reduction, feature_conversion, feature_encoding on the encoder;
// feature_decoding, inverse_feature_conversion, feature_restoration on the
// decoder.
struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct StageReport {
  std::vector<StageTiming> encoder_stages;
  std::vector<StageTiming> decoder_stages;
  double encode_total_s = 0.0;
  double decode_total_s = 0.0;
  uint64_t stream_bytes = 0;

  double encoder_stage_sum() const;
  double decoder_stage_sum() const;
};

// Full encoder chain: temporal downsample, per-frame fuse, pack, quantize,
// inner encode, mux. Errors carry the stage they surfaced in.
std::vector<uint8_t> encode(const FeatureTensorSet& set,
                            const EncodeConfig& cfg,
                            std::vector<StageTiming>* timings = nullptr);

// Full decoder chain, mirroring encode. Output shapes always equal the
// signalled descriptor.
FeatureTensorSet decode(std::span<const uint8_t> stream,
                        const DecodeConfig& cfg,
                        std::vector<StageTiming>* timings = nullptr,
                        FcmHeader* header_out = nullptr);

// Runs encode then decode on the same input and reports per-stage times.
StageReport measure_stage_times(const FeatureTensorSet& set,
                                const EncodeConfig& enc_cfg,
                                const DecodeConfig& dec_cfg);

}  // namespace fcm
