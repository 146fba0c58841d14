#pragma once

#include <string>
#include <vector>

#include "fcm/config.hpp"
#include "fcm/tensor.hpp"

namespace fcm {

struct RdPoint {
  double bitrate_kbps = 0.0;
  double quality = 0.0;  // higher is better

  bool operator==(const RdPoint&) const = default;
};

// Rate-quality curve, sorted by bitrate. Exact duplicate points collapse;
// distinct points sharing a bitrate are rejected. A non-monotone quality
// ordering is reported through `warning`, not an error.
struct RdCurve {
  std::vector<RdPoint> points;

  static RdCurve create(std::vector<RdPoint> points,
                        std::string* warning = nullptr);
  double min_quality() const;
  double max_quality() const;
  bool operator==(const RdCurve&) const = default;
};

struct BdRateResult {
  double percent = 0.0;     // negative: the test curve saves rate
  bool used_pchip = false;  // cubic polynomial fit was ill-conditioned
};

// Bjontegaard delta rate: fits log10(bitrate) as a cubic in quality for both
// curves, integrates the difference over the common quality interval, and
// maps the average back to a percentage.
BdRateResult bd_rate(const RdCurve& reference, const RdCurve& test);

struct ComplexityInputs {
  double fcm_encoder_s = 0.0;
  double fcm_decoder_s = 0.0;
  double nn_part1_s = 0.0;
  double nn_part2_s = 0.0;
};

struct ComplexityReport {
  ComplexityInputs inputs;
  double encoder_ratio = 0.0;  // fcm encoder time / NN part 2 time
  double decoder_ratio = 0.0;  // fcm decoder time / NN part 1 time
  bool encoder_offload_ok = false;  // ratio strictly below 1
  bool decoder_offload_ok = false;
};

ComplexityReport complexity_ratios(const ComplexityInputs& inputs);

// PSNR sentinel used when reconstruction is exact (or, negated, when the
// reference is all-zero).
inline constexpr double kPsnrSentinelDb = 999.0;

struct QualityResult {
  double psnr_db = 0.0;
  double mse = 0.0;
  bool exact_match = false;
};

// Feature PSNR over every element of every layer and frame, with
// peak = max |original|. Stands in for task accuracy.
QualityResult quality_metric(const FeatureTensorSet& original,
                             const FeatureTensorSet& reconstructed);

struct SweepRow {
  std::string config_id;
  double ladder_value = 0.0;
  double bitrate_kbps = 0.0;
  double quality_db = 0.0;
  uint64_t bytes = 0;
  double enc_time_s = 0.0;
  double dec_time_s = 0.0;
};

struct SweepResult {
  RdCurve curve;  // empty when the points do not form a usable curve
  std::vector<SweepRow> rows;
  std::string curve_warning;
};

// Encodes and decodes the set once per ladder value (the ladder mutates one
// config key), measuring bitrate and feature PSNR at each point.
SweepResult sweep(const FeatureTensorSet& set, const ConfigMap& base_config,
                  const std::string& ladder_key,
                  const std::vector<std::string>& ladder_values);

inline constexpr const char* kSweepCsvHeader =
    "config_id,qp,bitrate_kbps,quality_db,bytes,enc_time_s,dec_time_s";

std::string sweep_csv(const SweepResult& result);
RdCurve curve_from_csv(const std::string& csv_text);

}  // namespace fcm
