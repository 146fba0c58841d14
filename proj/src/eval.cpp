#include "fcm/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace fcm {

RdCurve RdCurve::create(std::vector<RdPoint> points, std::string* warning) {
  if (points.empty()) {
    throw Error(ErrorKind::kDegenerateFit, "curve has no points");
  }
  for (const RdPoint& p : points) {
    if (!(p.bitrate_kbps > 0.0) || !std::isfinite(p.bitrate_kbps)) {
      throw Error(ErrorKind::kDegenerateFit, "bitrate must be positive");
    }
    if (!std::isfinite(p.quality)) {
      throw Error(ErrorKind::kDegenerateFit, "quality must be finite");
    }
  }
  std::sort(points.begin(), points.end(), [](const RdPoint& a, const RdPoint& b) {
    return a.bitrate_kbps < b.bitrate_kbps ||
           (a.bitrate_kbps == b.bitrate_kbps && a.quality < b.quality);
  });
  std::vector<RdPoint> unique;
  for (const RdPoint& p : points) {
    if (!unique.empty() && unique.back().bitrate_kbps == p.bitrate_kbps) {
      if (unique.back().quality == p.quality) continue;  // exact duplicate
      throw Error(ErrorKind::kDegenerateFit,
                  "two distinct points share one bitrate");
    }
    unique.push_back(p);
  }
  if (warning) {
    for (size_t i = 0; i + 1 < unique.size(); ++i) {
      if (unique[i + 1].quality < unique[i].quality) {
        *warning = "quality is not non-decreasing with bitrate";
        break;
      }
    }
  }
  RdCurve curve;
  curve.points = std::move(unique);
  return curve;
}

double RdCurve::min_quality() const {
  double q = points[0].quality;
  for (const RdPoint& p : points) q = std::min(q, p.quality);
  return q;
}

double RdCurve::max_quality() const {
  double q = points[0].quality;
  for (const RdPoint& p : points) q = std::max(q, p.quality);
  return q;
}

namespace {

// Quality samples must be strictly increasing so log-rate is a function of
// quality.
void check_fit_domain(const RdCurve& curve) {
  if (curve.points.size() < 4) {
    throw Error(ErrorKind::kDegenerateFit,
                "BD-rate needs at least 4 rate points per curve");
  }
  for (size_t i = 0; i + 1 < curve.points.size(); ++i) {
    if (!(curve.points[i + 1].quality > curve.points[i].quality)) {
      throw Error(ErrorKind::kDegenerateFit,
                  "quality must be strictly monotone in bitrate for the fit");
    }
  }
}

// Cubic least squares on normalized quality; false when the normal
// equations are too ill-conditioned to trust.
bool integrate_poly3(const std::vector<RdPoint>& pts, double lo, double hi,
                     double* integral) {
  const size_t n = pts.size();
  const double c = (pts.front().quality + pts.back().quality) / 2.0;
  const double s = (pts.back().quality - pts.front().quality) / 2.0;
  if (!(s > 0.0)) return false;

  double a[4][4] = {};
  double b[4] = {};
  for (const RdPoint& p : pts) {
    const double u = (p.quality - c) / s;
    const double r = std::log10(p.bitrate_kbps);
    double pow_u[7] = {1, 0, 0, 0, 0, 0, 0};
    for (int k = 1; k < 7; ++k) pow_u[k] = pow_u[k - 1] * u;
    for (int j = 0; j < 4; ++j) {
      for (int k = 0; k < 4; ++k) a[j][k] += pow_u[j + k];
      b[j] += r * pow_u[j];
    }
  }

  // Gaussian elimination with partial pivoting.
  int index[4] = {0, 1, 2, 3};
  for (int col = 0; col < 4; ++col) {
    int pivot = col;
    for (int row = col + 1; row < 4; ++row) {
      if (std::fabs(a[index[row]][col]) > std::fabs(a[index[pivot]][col])) {
        pivot = row;
      }
    }
    std::swap(index[col], index[pivot]);
    const double diag = a[index[col]][col];
    if (std::fabs(diag) < 1e-10 * n) return false;
    for (int row = col + 1; row < 4; ++row) {
      const double f = a[index[row]][col] / diag;
      for (int k = col; k < 4; ++k) a[index[row]][k] -= f * a[index[col]][k];
      b[index[row]] -= f * b[index[col]];
    }
  }
  double coeff[4];
  for (int col = 3; col >= 0; --col) {
    double v = b[index[col]];
    for (int k = col + 1; k < 4; ++k) v -= a[index[col]][k] * coeff[k];
    coeff[col] = v / a[index[col]][col];
  }

  const double ulo = (lo - c) / s;
  const double uhi = (hi - c) / s;
  double sum = 0.0;
  double plo = ulo, phi = uhi;
  for (int j = 0; j < 4; ++j) {
    sum += coeff[j] * (phi - plo) / (j + 1);
    plo *= ulo;
    phi *= uhi;
  }
  *integral = s * sum;
  return std::isfinite(*integral);
}

// Monotone piecewise-cubic Hermite (Fritsch-Carlson slopes), integrated
// analytically on each segment clipped to [lo, hi].
double integrate_pchip(const std::vector<RdPoint>& pts, double lo, double hi) {
  const size_t n = pts.size();
  std::vector<double> x(n), y(n);
  for (size_t i = 0; i < n; ++i) {
    x[i] = pts[i].quality;
    y[i] = std::log10(pts[i].bitrate_kbps);
  }
  std::vector<double> h(n - 1), delta(n - 1), d(n);
  for (size_t i = 0; i + 1 < n; ++i) {
    h[i] = x[i + 1] - x[i];
    delta[i] = (y[i + 1] - y[i]) / h[i];
  }
  for (size_t i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0) {
      d[i] = 0.0;
    } else {
      const double w1 = 2.0 * h[i] + h[i - 1];
      const double w2 = h[i] + 2.0 * h[i - 1];
      d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
  }
  auto end_slope = [](double h0, double h1, double d0, double d1) {
    double slope = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (slope * d0 <= 0.0) return 0.0;
    if (d0 * d1 <= 0.0 && std::fabs(slope) > 3.0 * std::fabs(d0)) {
      return 3.0 * d0;
    }
    return slope;
  };
  d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
  d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);

  double integral = 0.0;
  for (size_t i = 0; i + 1 < n; ++i) {
    const double a = std::max(lo, x[i]);
    const double b = std::min(hi, x[i + 1]);
    if (!(b > a)) continue;
    const double dy = y[i + 1] - y[i];
    const double c0 = y[i];
    const double c1 = h[i] * d[i];
    const double c2 = 3.0 * dy - h[i] * (2.0 * d[i] + d[i + 1]);
    const double c3 = -2.0 * dy + h[i] * (d[i] + d[i + 1]);
    const double ta = (a - x[i]) / h[i];
    const double tb = (b - x[i]) / h[i];
    auto antiderivative = [&](double t) {
      return c0 * t + c1 * t * t / 2.0 + c2 * t * t * t / 3.0 +
             c3 * t * t * t * t / 4.0;
    };
    integral += h[i] * (antiderivative(tb) - antiderivative(ta));
  }
  return integral;
}

}  // namespace

BdRateResult bd_rate(const RdCurve& reference, const RdCurve& test) {
  if (reference == test) {
    return {0.0, false};  // identical curves differ by exactly nothing
  }
  check_fit_domain(reference);
  check_fit_domain(test);

  const double lo = std::max(reference.min_quality(), test.min_quality());
  const double hi = std::min(reference.max_quality(), test.max_quality());
  if (!(hi > lo)) {
    throw Error(ErrorKind::kInsufficientOverlap,
                "curves share no quality interval");
  }

  BdRateResult result;
  double ref_integral = 0.0, test_integral = 0.0;
  if (!integrate_poly3(reference.points, lo, hi, &ref_integral)) {
    ref_integral = integrate_pchip(reference.points, lo, hi);
    result.used_pchip = true;
  }
  if (!integrate_poly3(test.points, lo, hi, &test_integral)) {
    test_integral = integrate_pchip(test.points, lo, hi);
    result.used_pchip = true;
  }
  const double avg_diff = (test_integral - ref_integral) / (hi - lo);
  result.percent = 100.0 * (std::pow(10.0, avg_diff) - 1.0);
  return result;
}

ComplexityReport complexity_ratios(const ComplexityInputs& inputs) {
  const double times[4] = {inputs.fcm_encoder_s, inputs.fcm_decoder_s,
                           inputs.nn_part1_s, inputs.nn_part2_s};
  for (double t : times) {
    if (!(t > 0.0) || !std::isfinite(t)) {
      throw Error(ErrorKind::kNonPositiveTime,
                  "all four times must be positive");
    }
  }
  ComplexityReport report;
  report.inputs = inputs;
  report.encoder_ratio = inputs.fcm_encoder_s / inputs.nn_part2_s;
  report.decoder_ratio = inputs.fcm_decoder_s / inputs.nn_part1_s;
  report.encoder_offload_ok = report.encoder_ratio < 1.0;
  report.decoder_offload_ok = report.decoder_ratio < 1.0;
  return report;
}

QualityResult quality_metric(const FeatureTensorSet& original,
                             const FeatureTensorSet& reconstructed) {
  if (original.frames.size() != reconstructed.frames.size()) {
    throw Error(ErrorKind::kShape, "frame counts differ");
  }
  double sum_sq = 0.0;
  double peak = 0.0;
  uint64_t count = 0;
  for (size_t f = 0; f < original.frames.size(); ++f) {
    if (original.frames[f].size() != reconstructed.frames[f].size()) {
      throw Error(ErrorKind::kShape, "layer counts differ");
    }
    for (size_t k = 0; k < original.frames[f].size(); ++k) {
      const FeatureLayer& a = original.frames[f][k];
      const FeatureLayer& b = reconstructed.frames[f][k];
      if (a.shape() != b.shape()) {
        throw Error(ErrorKind::kShape, "layer shapes differ");
      }
      for (size_t i = 0; i < a.data.size(); ++i) {
        const double diff = double(a.data[i]) - double(b.data[i]);
        sum_sq += diff * diff;
        peak = std::max(peak, std::fabs(double(a.data[i])));
        ++count;
      }
    }
  }
  if (count == 0) {
    throw Error(ErrorKind::kShape, "empty tensor sets");
  }
  QualityResult result;
  result.mse = sum_sq / double(count);
  if (result.mse == 0.0) {
    result.exact_match = true;
    result.psnr_db = kPsnrSentinelDb;
  } else if (peak == 0.0) {
    result.psnr_db = -kPsnrSentinelDb;
  } else {
    result.psnr_db = 10.0 * std::log10(peak * peak / result.mse);
  }
  return result;
}

SweepResult sweep(const FeatureTensorSet& set, const ConfigMap& base_config,
                  const std::string& ladder_key,
                  const std::vector<std::string>& ladder_values) {
  set.validate();
  if (ladder_values.size() < 4) {
    throw Error(ErrorKind::kConfig,
                "sweep ladder needs at least 4 settings, got " +
                    std::to_string(ladder_values.size()));
  }

  using Clock = std::chrono::steady_clock;
  SweepResult result;
  std::vector<RdPoint> points;
  for (size_t i = 0; i < ladder_values.size(); ++i) {
    ConfigMap point_cfg = base_config;
    point_cfg.set(ladder_key, ladder_values[i]);
    const EncodeConfig ec = make_encode_config(point_cfg);
    const DecodeConfig dc = make_decode_config(point_cfg);

    const auto enc_start = Clock::now();
    const std::vector<uint8_t> stream = encode(set, ec);
    const double enc_s =
        std::chrono::duration<double>(Clock::now() - enc_start).count();

    const auto dec_start = Clock::now();
    const FeatureTensorSet decoded = decode(stream, dc);
    const double dec_s =
        std::chrono::duration<double>(Clock::now() - dec_start).count();

    SweepRow row;
    row.config_id = ladder_key + "=" + ladder_values[i];
    try {
      row.ladder_value = std::stod(ladder_values[i]);
    } catch (const std::exception&) {
      row.ladder_value = double(i);
    }
    row.bytes = stream.size();
    row.bitrate_kbps = double(stream.size()) * 8.0 * double(set.frame_rate) /
                       double(set.frames.size()) / 1000.0;
    row.quality_db = quality_metric(set, decoded).psnr_db;
    row.enc_time_s = enc_s;
    row.dec_time_s = dec_s;
    result.rows.push_back(row);
    points.push_back({row.bitrate_kbps, row.quality_db});
  }
  try {
    result.curve = RdCurve::create(std::move(points), &result.curve_warning);
  } catch (const Error& e) {
    // Rows and CSV still stand; a flat-rate ladder has no usable curve.
    result.curve_warning = e.message();
  }
  return result;
}

std::string sweep_csv(const SweepResult& result) {
  std::ostringstream out;
  out << kSweepCsvHeader << "\n";
  char buf[256];
  for (const SweepRow& row : result.rows) {
    std::snprintf(buf, sizeof(buf), "%s,%.9g,%.9g,%.9g,%llu,%.6f,%.6f",
                  row.config_id.c_str(), row.ladder_value, row.bitrate_kbps,
                  row.quality_db,
                  static_cast<unsigned long long>(row.bytes), row.enc_time_s,
                  row.dec_time_s);
    out << buf << "\n";
  }
  return out.str();
}

RdCurve curve_from_csv(const std::string& csv_text) {
  std::istringstream lines(csv_text);
  std::string header;
  if (!std::getline(lines, header)) {
    throw Error(ErrorKind::kFormat, "empty CSV");
  }
  std::vector<std::string> columns;
  {
    std::istringstream hs(header);
    std::string col;
    while (std::getline(hs, col, ',')) columns.push_back(col);
  }
  int bitrate_col = -1, quality_col = -1;
  for (size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == "bitrate_kbps") bitrate_col = int(i);
    if (columns[i] == "quality_db") quality_col = int(i);
  }
  if (bitrate_col < 0 || quality_col < 0) {
    throw Error(ErrorKind::kFormat,
                "CSV must carry bitrate_kbps and quality_db columns");
  }
  std::vector<RdPoint> points;
  std::string line;
  size_t line_no = 1;
  while (std::getline(lines, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<std::string> fields;
    std::istringstream ls(line);
    std::string field;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (fields.size() <= size_t(std::max(bitrate_col, quality_col))) {
      throw Error(ErrorKind::kFormat,
                  "CSV line " + std::to_string(line_no) + " is short");
    }
    try {
      points.push_back({std::stod(fields[bitrate_col]),
                        std::stod(fields[quality_col])});
    } catch (const std::exception&) {
      throw Error(ErrorKind::kFormat,
                  "CSV line " + std::to_string(line_no) + ": bad number");
    }
  }
  return RdCurve::create(std::move(points));
}

}  // namespace fcm
