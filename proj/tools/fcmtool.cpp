// fcmtool: command-line front end for the feature-coding pipeline.
//
// Subcommands: encode, decode, inspect, sweep, bdrate, complexity.
// Exit codes: 0 success, 1 usage/config, 2 I/O or input parse, 3 processing.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "fcm/config.hpp"
#include "fcm/eval.hpp"
#include "fcm/fts_io.hpp"
#include "fcm/pipeline.hpp"

namespace {

int exit_code_for(const fcm::Error& e) {
  switch (e.kind()) {
    case fcm::ErrorKind::kConfig:
      return 1;
    case fcm::ErrorKind::kIo:
    case fcm::ErrorKind::kFormat:
    case fcm::ErrorKind::kTruncated:
      return 2;
    default:
      return 3;
  }
}

std::vector<uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw fcm::Error(fcm::ErrorKind::kIo, "cannot open " + path.string());
  }
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  if (in.bad()) {
    throw fcm::Error(fcm::ErrorKind::kIo, "read failure on " + path.string());
  }
  return bytes;
}

void write_file(const std::filesystem::path& path,
                const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw fcm::Error(fcm::ErrorKind::kIo,
                     "cannot open " + path.string() + " for write");
  }
  out << content;
  if (!out) {
    throw fcm::Error(fcm::ErrorKind::kIo, "write failure on " + path.string());
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  const std::vector<uint8_t> bytes = read_file(path);
  return {bytes.begin(), bytes.end()};
}

// Shared flag state; empty string means "not given on the command line".
struct CommonFlags {
  std::string config_path;
  std::string reducer;
  std::string inner_codec;
  std::string gain_table;
  long gain_index = -1;
  long bitdepth = -1;
  long quality = -1;
  long threads = -1;
  long gop_hint = -1;
  int temporal = -1;
  int low_delay = -1;
  bool bypass_quantization = false;
};

void add_common_flags(CLI::App* cmd, CommonFlags* flags) {
  cmd->add_option("--config", flags->config_path,
                  "key=value config file (flags override it)");
  cmd->add_option("--reducer", flags->reducer, "s2d or avgpool");
  cmd->add_option("--inner-codec", flags->inner_codec,
                  "raw, lossless or external");
  cmd->add_option("--gain-table", flags->gain_table, "gain table file");
  cmd->add_option("--gain-index", flags->gain_index, "gain vector index");
  cmd->add_option("--bitdepth", flags->bitdepth, "quantizer bitdepth [8,16]");
  cmd->add_option("--quality", flags->quality,
                  "inner codec quality (level or qp)");
  cmd->add_option("--threads", flags->threads, "worker cap for frame stages");
  cmd->add_option("--gop-hint", flags->gop_hint, "inner codec GOP hint");
  cmd->add_option("--temporal", flags->temporal, "1 = drop every other frame");
  cmd->add_option("--low-delay", flags->low_delay, "low-delay hint (0/1)");
  cmd->add_flag("--bypass-quantization", flags->bypass_quantization,
                "debug: carry raw float samples");
}

fcm::ConfigMap resolve_config(const CommonFlags& flags) {
  fcm::ConfigMap cfg;
  if (!flags.config_path.empty()) {
    cfg = fcm::ConfigMap::load(flags.config_path);
  }
  if (!flags.reducer.empty()) cfg.set("reducer", flags.reducer);
  if (!flags.inner_codec.empty()) cfg.set("inner_codec", flags.inner_codec);
  if (!flags.gain_table.empty()) cfg.set("gain_table", flags.gain_table);
  if (flags.gain_index >= 0) {
    cfg.set("gain_index", std::to_string(flags.gain_index));
  }
  if (flags.bitdepth >= 0) cfg.set("bitdepth", std::to_string(flags.bitdepth));
  if (flags.quality >= 0) cfg.set("quality", std::to_string(flags.quality));
  if (flags.threads >= 0) cfg.set("threads", std::to_string(flags.threads));
  if (flags.gop_hint >= 0) cfg.set("gop_hint", std::to_string(flags.gop_hint));
  if (flags.temporal >= 0) cfg.set("temporal", flags.temporal ? "1" : "0");
  if (flags.low_delay >= 0) {
    cfg.set("low_delay", flags.low_delay ? "1" : "0");
  }
  if (flags.bypass_quantization) cfg.set("bypass_quantization", "1");
  return cfg;
}

void print_header(const fcm::FcmHeader& h) {
  std::printf("container=FCMB v%u\n", h.version);
  std::printf("reducer=%s\n", fcm::to_string(h.reducer));
  std::printf("inner_codec=%s\n", fcm::to_string(h.inner_codec));
  std::printf("temporal=%d\n", h.temporal_enabled ? 1 : 0);
  std::printf("original_frames=%u\n", h.original_frame_count);
  std::printf("coded_frames=%u\n", h.coded_frame_count());
  std::printf("frame_rate=%g\n", h.frame_rate);
  std::printf("gain_index=%u\n", h.gain_index);
  for (size_t k = 0; k < h.layer_shapes.size(); ++k) {
    const fcm::LayerShape& s = h.layer_shapes[k];
    std::printf("layer_%zu=%ux%ux%u\n", k, s.channels, s.height, s.width);
  }
  std::printf("fused_shape=%ux%ux%u\n", h.fused_channels, h.fused_height,
              h.fused_width);
  std::printf("grid=%ux%u\n", h.grid_rows, h.grid_cols);
  std::printf("bitdepth=%u%s\n", h.bitdepth,
              h.float_mode() ? " (float debug)" : "");
  std::printf("quality=%d\n", h.quality);
  std::printf("gop_hint=%u\n", h.gop_hint);
  std::printf("low_delay=%d\n", h.low_delay ? 1 : 0);
  std::printf("payload_bytes=%llu\n",
              static_cast<unsigned long long>(h.payload_length));
}

int run_encode(const std::string& input, const std::string& output,
               const CommonFlags& flags) {
  const fcm::ConfigMap cfg_map = resolve_config(flags);
  const fcm::EncodeConfig cfg = fcm::make_encode_config(cfg_map);
  const fcm::FeatureTensorSet set = fcm::load_fts(input);

  std::vector<fcm::StageTiming> timings;
  const std::vector<uint8_t> stream = fcm::encode(set, cfg, &timings);
  std::ofstream out(output, std::ios::binary | std::ios::trunc);
  if (!out ||
      !out.write(reinterpret_cast<const char*>(stream.data()),
                 static_cast<std::streamsize>(stream.size()))) {
    throw fcm::Error(fcm::ErrorKind::kIo, "cannot write " + output);
  }

  const double kbps = double(stream.size()) * 8.0 * double(set.frame_rate) /
                      double(set.frames.size()) / 1000.0;
  std::printf("bytes_written=%zu\n", stream.size());
  std::printf("bitrate_kbps=%.3f\n", kbps);
  for (const fcm::StageTiming& t : timings) {
    std::printf("stage_%s_s=%.6f\n", t.stage.c_str(), t.seconds);
  }
  return 0;
}

int run_decode(const std::string& input, const std::string& output,
               bool inspect_only, const CommonFlags& flags) {
  const std::vector<uint8_t> stream = read_file(input);
  if (inspect_only) {
    print_header(fcm::demux_header(stream));
    return 0;
  }
  if (output.empty()) {
    throw fcm::Error(fcm::ErrorKind::kConfig,
                     "--output is required unless --inspect-only is given");
  }
  const fcm::ConfigMap cfg_map = resolve_config(flags);
  const fcm::DecodeConfig cfg = fcm::make_decode_config(cfg_map);

  fcm::FcmHeader header;
  std::vector<fcm::StageTiming> timings;
  const fcm::FeatureTensorSet set =
      fcm::decode(stream, cfg, &timings, &header);
  fcm::save_fts(set, output);

  std::printf("frames=%zu\n", set.frames.size());
  std::printf("frame_rate=%g\n", set.frame_rate);
  for (size_t k = 0; k < set.frames[0].size(); ++k) {
    const fcm::LayerShape s = set.frames[0][k].shape();
    std::printf("layer_%zu=%ux%ux%u\n", k, s.channels, s.height, s.width);
  }
  for (const fcm::StageTiming& t : timings) {
    std::printf("stage_%s_s=%.6f\n", t.stage.c_str(), t.seconds);
  }
  return 0;
}

int run_sweep(const std::string& input, const std::string& ladder_spec,
              const std::string& csv_out, const CommonFlags& flags) {
  const auto eq = ladder_spec.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw fcm::Error(fcm::ErrorKind::kConfig,
                     "--ladder expects key=v1,v2,... ");
  }
  const std::string key = ladder_spec.substr(0, eq);
  std::vector<std::string> values;
  std::istringstream vs(ladder_spec.substr(eq + 1));
  std::string item;
  while (std::getline(vs, item, ',')) values.push_back(item);

  const fcm::ConfigMap base = resolve_config(flags);
  const fcm::FeatureTensorSet set = fcm::load_fts(input);
  const fcm::SweepResult result = fcm::sweep(set, base, key, values);
  const std::string csv = fcm::sweep_csv(result);
  if (csv_out.empty()) {
    std::fputs(csv.c_str(), stdout);
  } else {
    write_file(csv_out, csv);
    std::printf("points=%zu\n", result.rows.size());
    std::printf("csv=%s\n", csv_out.c_str());
  }
  return 0;
}

int run_bdrate(const std::string& reference_csv, const std::string& test_csv) {
  const fcm::RdCurve reference =
      fcm::curve_from_csv(read_text_file(reference_csv));
  const fcm::RdCurve test = fcm::curve_from_csv(read_text_file(test_csv));
  const fcm::BdRateResult result = fcm::bd_rate(reference, test);
  if (result.used_pchip) {
    std::fprintf(stderr,
                 "note: cubic fit was ill-conditioned, used piecewise-cubic "
                 "interpolation\n");
  }
  std::printf("BD-rate: %.2f%%\n", result.percent);
  return 0;
}

int run_complexity(double enc_s, double dec_s, double nn1_s, double nn2_s,
                   const std::string& report_path, const std::string& measure,
                   const CommonFlags& flags) {
  if (!report_path.empty()) {
    const fcm::ConfigMap report = fcm::ConfigMap::load(report_path);
    if (enc_s <= 0) enc_s = report.get_double("fcm_encoder_s", 0.0);
    if (dec_s <= 0) dec_s = report.get_double("fcm_decoder_s", 0.0);
    if (nn1_s <= 0) nn1_s = report.get_double("nn_part1_s", 0.0);
    if (nn2_s <= 0) nn2_s = report.get_double("nn_part2_s", 0.0);
  }
  if (!measure.empty()) {
    const fcm::ConfigMap cfg_map = resolve_config(flags);
    const fcm::FeatureTensorSet set = fcm::load_fts(measure);
    const fcm::StageReport report = fcm::measure_stage_times(
        set, fcm::make_encode_config(cfg_map), fcm::make_decode_config(cfg_map));
    enc_s = report.encode_total_s;
    dec_s = report.decode_total_s;
    for (const fcm::StageTiming& t : report.encoder_stages) {
      std::printf("stage_%s_s=%.6f\n", t.stage.c_str(), t.seconds);
    }
    for (const fcm::StageTiming& t : report.decoder_stages) {
      std::printf("stage_%s_s=%.6f\n", t.stage.c_str(), t.seconds);
    }
  }

  const fcm::ComplexityReport report =
      fcm::complexity_ratios({enc_s, dec_s, nn1_s, nn2_s});
  std::printf("encoder_complexity_ratio=%.2f\n", report.encoder_ratio);
  std::printf("decoder_complexity_ratio=%.2f\n", report.decoder_ratio);
  std::printf("encoder_offload_inequality=%s\n",
              report.encoder_offload_ok ? "satisfied" : "NOT satisfied");
  std::printf("decoder_offload_inequality=%s\n",
              report.decoder_offload_ok ? "satisfied" : "NOT satisfied");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FCM split-inference feature codec"};
  app.require_subcommand(1);

  CommonFlags flags;

  auto* encode_cmd = app.add_subcommand("encode", "encode .fts to .fcmb");
  std::string enc_input, enc_output;
  encode_cmd->add_option("--input", enc_input, ".fts input")->required();
  encode_cmd->add_option("--output", enc_output, ".fcmb output")->required();
  add_common_flags(encode_cmd, &flags);

  auto* decode_cmd = app.add_subcommand("decode", "decode .fcmb to .fts");
  std::string dec_input, dec_output;
  bool inspect_only = false;
  decode_cmd->add_option("--input", dec_input, ".fcmb input")->required();
  decode_cmd->add_option("--output", dec_output, ".fts output");
  decode_cmd->add_flag("--inspect-only", inspect_only,
                       "print the header and exit without decoding");
  add_common_flags(decode_cmd, &flags);

  auto* inspect_cmd = app.add_subcommand("inspect", "print a stream header");
  std::string ins_input;
  inspect_cmd->add_option("--input", ins_input, ".fcmb input")->required();

  auto* sweep_cmd =
      app.add_subcommand("sweep", "rate sweep over a config-key ladder");
  std::string sweep_input, ladder, sweep_csv_path;
  sweep_cmd->add_option("--input", sweep_input, ".fts input")->required();
  sweep_cmd->add_option("--ladder", ladder, "key=v1,v2,v3,v4 (>=4 values)")
      ->required();
  sweep_cmd->add_option("--output", sweep_csv_path,
                        "CSV output path (stdout when omitted)");
  add_common_flags(sweep_cmd, &flags);

  auto* bdrate_cmd =
      app.add_subcommand("bdrate", "BD-rate between two sweep CSVs");
  std::string ref_csv, test_csv;
  bdrate_cmd->add_option("--reference", ref_csv, "reference curve CSV")
      ->required();
  bdrate_cmd->add_option("--test", test_csv, "test curve CSV")->required();

  auto* complexity_cmd =
      app.add_subcommand("complexity", "offload complexity ratios");
  double enc_s = 0, dec_s = 0, nn1_s = 0, nn2_s = 0;
  std::string report_path, measure_path;
  complexity_cmd->add_option("--enc-time", enc_s, "FCM encoder seconds");
  complexity_cmd->add_option("--dec-time", dec_s, "FCM decoder seconds");
  complexity_cmd->add_option("--nn1-time", nn1_s, "NN part 1 seconds");
  complexity_cmd->add_option("--nn2-time", nn2_s, "NN part 2 seconds");
  complexity_cmd->add_option("--report", report_path,
                             "key=value timing report file");
  complexity_cmd->add_option("--measure", measure_path,
                             "measure FCM times by coding this .fts");
  add_common_flags(complexity_cmd, &flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n" << app.help() << std::flush;
    return 1;
  }

  try {
    if (encode_cmd->parsed()) return run_encode(enc_input, enc_output, flags);
    if (decode_cmd->parsed()) {
      return run_decode(dec_input, dec_output, inspect_only, flags);
    }
    if (inspect_cmd->parsed()) {
      print_header(fcm::demux_header(read_file(ins_input)));
      return 0;
    }
    if (sweep_cmd->parsed()) {
      return run_sweep(sweep_input, ladder, sweep_csv_path, flags);
    }
    if (bdrate_cmd->parsed()) return run_bdrate(ref_csv, test_csv);
    if (complexity_cmd->parsed()) {
      return run_complexity(enc_s, dec_s, nn1_s, nn2_s, report_path,
                            measure_path, flags);
    }
  } catch (const fcm::Error& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 3;
  }
  return 1;
}
