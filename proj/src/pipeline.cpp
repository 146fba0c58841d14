#include "fcm/pipeline.hpp"

#include <chrono>
#include <cstring>

#include "fcm/conversion.hpp"
#include "parallel.hpp"

namespace fcm {

namespace {

using Clock = std::chrono::steady_clock;

class StageClock {
 public:
  explicit StageClock(std::vector<StageTiming>* out) : out_(out) {}

  template <typename Fn>
  auto run(const char* stage, Fn&& fn) -> decltype(fn()) {
    const auto start = Clock::now();
    try {
      auto result = fn();
      record(stage, start);
      return result;
    } catch (const Error& e) {
      record(stage, start);
      throw Error::staged(stage, e);
    }
  }

 private:
  void record(const char* stage, Clock::time_point start) {
    if (!out_) return;
    const double s = std::chrono::duration<double>(Clock::now() - start).count();
    out_->push_back({stage, s});
  }

  std::vector<StageTiming>* out_;
};

std::vector<uint8_t> floats_to_bytes(std::span<const float> values) {
  std::vector<uint8_t> bytes(values.size() * 4);
  std::memcpy(bytes.data(), values.data(), bytes.size());
  return bytes;
}

std::vector<float> floats_from_bytes(std::span<const uint8_t> bytes) {
  std::vector<float> values(bytes.size() / 4);
  std::memcpy(values.data(), bytes.data(), values.size() * 4);
  return values;
}

}  // namespace

double StageReport::encoder_stage_sum() const {
  double s = 0.0;
  for (const StageTiming& t : encoder_stages) s += t.seconds;
  return s;
}

double StageReport::decoder_stage_sum() const {
  double s = 0.0;
  for (const StageTiming& t : decoder_stages) s += t.seconds;
  return s;
}

std::vector<uint8_t> encode(const FeatureTensorSet& set,
                            const EncodeConfig& cfg,
                            std::vector<StageTiming>* timings) {
  StageClock clock(timings);
  set.validate();
  if (cfg.bypass_quantization && cfg.inner.codec == InnerCodecId::kExternal) {
    throw Error(ErrorKind::kConfig,
                "quantization bypass requires the raw or lossless inner codec");
  }

  // Temporal sampling and per-frame fusion.
  struct ReductionOut {
    FeatureTensorSet sampled;
    TemporalInfo info;
    std::vector<FusedTensor> fused;
    GainVector gain;
  };
  ReductionOut red = clock.run("feature_reduction", [&] {
    ReductionOut out;
    auto [sampled, info] = temporal_downsample(set, cfg.temporal);
    out.sampled = std::move(sampled);
    out.info = info;
    const uint32_t fused_ch =
        fused_channel_count(out.sampled.layer_shapes(), cfg.reducer);
    out.gain = cfg.gains.resolve(cfg.gain_index, fused_ch);
    out.fused.resize(out.sampled.frames.size());
    parallel_for(out.sampled.frames.size(), cfg.threads, [&](size_t i) {
      out.fused[i] = fuse(out.sampled.frames[i], cfg.reducer, out.gain);
    });
    return out;
  });

  // Packing and quantization.
  struct ConversionOut {
    std::vector<PackedFrame> packed;
    std::vector<QuantizedFrame> quantized;
    std::vector<FrameRange> ranges;
  };
  ConversionOut conv = clock.run("feature_conversion", [&] {
    ConversionOut out;
    const size_t n = red.fused.size();
    out.packed.resize(n);
    out.ranges.resize(n);
    if (!cfg.bypass_quantization) out.quantized.resize(n);
    parallel_for(n, cfg.threads, [&](size_t i) {
      out.packed[i] = pack(red.fused[i]);
      const QuantizationParams params = QuantizationParams::from_frame(
          out.packed[i], cfg.bypass_quantization ? uint8_t(10) : cfg.bitdepth);
      out.ranges[i] = {params.x_min, params.x_max};
      if (!cfg.bypass_quantization) {
        out.quantized[i] = quantize(out.packed[i], params);
      }
    });
    return out;
  });

  // Inner coding and container mux.
  return clock.run("feature_encoding", [&] {
    InnerConfig inner = cfg.inner;
    inner.fps = set.frame_rate;
    if (cfg.temporal) {
      // Dropping every other frame shrinks the inner GOP hint to match.
      inner.gop_hint = std::max<uint16_t>(1, inner.gop_hint / 2);
    }
    std::vector<uint8_t> payload;
    if (cfg.bypass_quantization) {
      std::vector<uint8_t> raw;
      for (const PackedFrame& f : conv.packed) {
        const std::vector<uint8_t> bytes = floats_to_bytes(f.samples);
        raw.insert(raw.end(), bytes.begin(), bytes.end());
      }
      payload = inner.codec == InnerCodecId::kLossless
                    ? lossless_compress(raw, inner.quality)
                    : std::move(raw);
    } else {
      payload = inner_encode(conv.quantized, inner);
    }

    FcmHeader header;
    header.reducer = cfg.reducer;
    header.inner_codec = inner.codec;
    header.temporal_enabled = red.info.enabled;
    header.original_frame_count = red.info.original_frame_count;
    header.frame_rate = set.frame_rate;
    header.gain_index = cfg.gain_index;
    header.layer_shapes = set.layer_shapes();
    const PackGeometry geom = conv.packed[0].geom;
    header.fused_channels = geom.channels;
    header.fused_height = geom.chan_height;
    header.fused_width = geom.chan_width;
    header.grid_rows = geom.grid_rows;
    header.grid_cols = geom.grid_cols;
    header.bitdepth = cfg.bypass_quantization ? 32 : cfg.bitdepth;
    header.frame_ranges = std::move(conv.ranges);
    header.quality = inner.quality;
    header.gop_hint = inner.gop_hint;
    header.low_delay = inner.low_delay;
    header.payload_length = payload.size();
    return mux(header, payload);
  });
}

FeatureTensorSet decode(std::span<const uint8_t> stream,
                        const DecodeConfig& cfg,
                        std::vector<StageTiming>* timings,
                        FcmHeader* header_out) {
  StageClock clock(timings);

  // Container demux and inner decoding.
  struct DecodingOut {
    FcmHeader header;
    std::vector<PackedFrame> packed;     // float mode
    std::vector<QuantizedFrame> quantized;
  };
  DecodingOut dec = clock.run("feature_decoding", [&] {
    DecodingOut out;
    DemuxResult d = demux(stream);
    out.header = std::move(d.header);
    const PackGeometry geom = out.header.pack_geometry();
    const uint32_t coded = out.header.coded_frame_count();
    if (out.header.float_mode()) {
      const uint64_t raw_size = geom.sample_count() * 4 * coded;
      std::vector<uint8_t> raw;
      if (out.header.inner_codec == InnerCodecId::kLossless) {
        raw = lossless_decompress(d.payload, raw_size);
      } else {
        raw = std::move(d.payload);
      }
      if (raw.size() != raw_size) {
        throw Error(ErrorKind::kCorruptPayload,
                    "float payload size " + std::to_string(raw.size()) +
                        " != expected " + std::to_string(raw_size));
      }
      out.packed.resize(coded);
      for (uint32_t i = 0; i < coded; ++i) {
        out.packed[i].geom = geom;
        out.packed[i].samples = floats_from_bytes(
            std::span(raw).subspan(uint64_t(i) * geom.sample_count() * 4,
                                   geom.sample_count() * 4));
      }
    } else {
      InnerConfig inner;
      inner.codec = out.header.inner_codec;
      inner.quality = out.header.quality;
      inner.gop_hint = out.header.gop_hint;
      inner.low_delay = out.header.low_delay;
      inner.fps = out.header.frame_rate;
      inner.external_decode_cmd = cfg.external_decode_cmd;
      out.quantized = inner_decode(d.payload, inner, geom, coded);
      if (out.header.inner_codec == InnerCodecId::kExternal) {
        // A lossy external codec may overshoot the code range.
        const uint16_t max_bits =
            static_cast<uint16_t>((1u << out.header.bitdepth) - 1);
        for (QuantizedFrame& f : out.quantized) {
          for (uint16_t& s : f.samples) s = std::min(s, max_bits);
        }
      }
    }
    return out;
  });

  const FcmHeader& header = dec.header;
  if (header_out) *header_out = header;

  // Dequantization and unpacking.
  std::vector<FusedTensor> fused = clock.run("inverse_feature_conversion", [&] {
    const uint32_t coded = header.coded_frame_count();
    std::vector<FusedTensor> out(coded);
    parallel_for(coded, cfg.threads, [&](size_t i) {
      if (header.float_mode()) {
        out[i] = unpack(dec.packed[i], header.gain_index);
      } else {
        const QuantizationParams params{header.bitdepth,
                                        header.frame_ranges[i].x_min,
                                        header.frame_ranges[i].x_max};
        out[i] = unpack(dequantize(dec.quantized[i], params),
                        header.gain_index);
      }
    });
    return out;
  });

  // Restoration and temporal upsampling.
  FeatureTensorSet set = clock.run("feature_restoration", [&] {
    const GainVector gain =
        cfg.gains.resolve(header.gain_index, header.fused_channels);
    FeatureTensorSet sampled;
    sampled.frame_rate = header.frame_rate;
    sampled.frames.resize(fused.size());
    parallel_for(fused.size(), cfg.threads, [&](size_t i) {
      sampled.frames[i] =
          restore(fused[i], header.reducer, gain, header.layer_shapes);
    });
    const TemporalInfo info{header.original_frame_count,
                            header.temporal_enabled};
    return temporal_upsample(sampled, info);
  });

  // Shape fidelity is part of the decode contract.
  const TensorShapeDescriptor desc = set.descriptor(header.temporal_enabled);
  if (desc.frame_count != header.original_frame_count ||
      desc.layers != header.layer_shapes) {
    throw Error(ErrorKind::kShape,
                "decoded shapes do not match the signalled descriptor");
  }
  return set;
}

StageReport measure_stage_times(const FeatureTensorSet& set,
                                const EncodeConfig& enc_cfg,
                                const DecodeConfig& dec_cfg) {
  StageReport report;

  auto enc_start = Clock::now();
  const std::vector<uint8_t> stream =
      encode(set, enc_cfg, &report.encoder_stages);
  report.encode_total_s =
      std::chrono::duration<double>(Clock::now() - enc_start).count();
  report.stream_bytes = stream.size();

  auto dec_start = Clock::now();
  decode(stream, dec_cfg, &report.decoder_stages);
  report.decode_total_s =
      std::chrono::duration<double>(Clock::now() - dec_start).count();
  return report;
}

}  // namespace fcm
