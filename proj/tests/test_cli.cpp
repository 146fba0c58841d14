#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>

#include "fcm/bitstream.hpp"
#include "fcm/fts_io.hpp"
#include "test_util.hpp"

using namespace fcm;
using namespace fcm::test;

namespace {

struct ToolResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

ToolResult run_tool(const std::string& args) {
  TempPath out(".out"), err(".err");
  const std::string cmd = std::string(FCMTOOL_PATH) + " " + args + " > " +
                          out.str() + " 2> " + err.str();
  const int status = std::system(cmd.c_str());
  ToolResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = slurp(out.path);
  result.err = slurp(err.path);
  return result;
}

FeatureTensorSet fixture_set() {
  std::mt19937 rng(90);
  return random_set(rng, 3, 2, 4, 16, 16);
}

const char* kCurveCsv =
    "config_id,qp,bitrate_kbps,quality_db,bytes,enc_time_s,dec_time_s\n"
    "bitdepth=8,8,100,30,1000,0.1,0.1\n"
    "bitdepth=10,10,200,32,2000,0.1,0.1\n"
    "bitdepth=12,12,400,34,4000,0.1,0.1\n"
    "bitdepth=14,14,800,36,8000,0.1,0.1\n";

}  // namespace

TEST_CASE("encode then decode round trips through the CLI") {
  TempPath fts(".fts"), fcmb(".fcmb"), decoded(".fts");
  save_fts(fixture_set(), fts.path);

  const ToolResult enc = run_tool("encode --input " + fts.str() +
                                  " --output " + fcmb.str());
  CHECK(enc.exit_code == 0);
  CHECK(enc.out.find("bytes_written=") != std::string::npos);
  CHECK(enc.out.find("bitrate_kbps=") != std::string::npos);
  CHECK(enc.out.find("stage_feature_reduction_s=") != std::string::npos);
  CHECK(enc.out.find("stage_feature_conversion_s=") != std::string::npos);
  CHECK(enc.out.find("stage_feature_encoding_s=") != std::string::npos);
  CHECK(std::filesystem::exists(fcmb.path));

  const ToolResult dec = run_tool("decode --input " + fcmb.str() +
                                  " --output " + decoded.str());
  CHECK(dec.exit_code == 0);
  CHECK(dec.out.find("frames=3") != std::string::npos);
  CHECK(dec.out.find("layer_0=4x16x16") != std::string::npos);
  CHECK(dec.out.find("layer_1=4x8x8") != std::string::npos);
  CHECK(load_fts(decoded.path).frames.size() == 3);
}

TEST_CASE("missing required option is a usage error on stderr") {
  const ToolResult r = run_tool("encode --output /tmp/x.fcmb");
  CHECK(r.exit_code == 1);
  CHECK(r.out.empty());
  CHECK(!r.err.empty());
}

TEST_CASE("corrupt fts input exits 2 and names the parse offset") {
  TempPath fts(".fts"), fcmb(".fcmb");
  save_fts(fixture_set(), fts.path);
  // Truncate the payload.
  const std::string bytes = slurp(fts.path);
  std::ofstream out(fts.path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), std::streamsize(bytes.size() / 2));
  out.close();

  const ToolResult r = run_tool("encode --input " + fts.str() + " --output " +
                                fcmb.str());
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("at byte") != std::string::npos);
  CHECK(r.out.empty());
}

TEST_CASE("unknown reducer id in a stream exits 3 with a clear message") {
  TempPath fts(".fts"), fcmb(".fcmb"), decoded(".fts");
  save_fts(fixture_set(), fts.path);
  REQUIRE(run_tool("encode --input " + fts.str() + " --output " + fcmb.str())
              .exit_code == 0);

  std::string stream = slurp(fcmb.path);
  stream[6] = char(0x7f);  // reducer id field
  std::ofstream out(fcmb.path, std::ios::binary | std::ios::trunc);
  out << stream;
  out.close();

  const ToolResult r = run_tool("decode --input " + fcmb.str() +
                                " --output " + decoded.str());
  CHECK(r.exit_code == 3);
  CHECK(r.err.find("reducer") != std::string::npos);
}

TEST_CASE("inspect-only prints the header without writing output") {
  TempPath fts(".fts"), fcmb(".fcmb");
  save_fts(fixture_set(), fts.path);
  REQUIRE(run_tool("encode --input " + fts.str() + " --output " + fcmb.str() +
                   " --temporal 1 --bitdepth 12")
              .exit_code == 0);

  const ToolResult r =
      run_tool("decode --input " + fcmb.str() + " --inspect-only");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("container=FCMB v1") != std::string::npos);
  CHECK(r.out.find("reducer=s2d") != std::string::npos);
  CHECK(r.out.find("temporal=1") != std::string::npos);
  CHECK(r.out.find("coded_frames=2") != std::string::npos);
  CHECK(r.out.find("bitdepth=12") != std::string::npos);

  const ToolResult standalone = run_tool("inspect --input " + fcmb.str());
  CHECK(standalone.exit_code == 0);
  CHECK(standalone.out == r.out);
}

TEST_CASE("bdrate on identical CSVs prints 0.00%") {
  TempPath a(".csv"), b(".csv");
  std::ofstream(a.path) << kCurveCsv;
  std::ofstream(b.path) << kCurveCsv;
  const ToolResult r =
      run_tool("bdrate --reference " + a.str() + " --test " + b.str());
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("BD-rate: 0.00%") != std::string::npos);
}

TEST_CASE("complexity prints two-decimal ratios and verdicts") {
  const ToolResult r = run_tool(
      "complexity --enc-time 11.86 --dec-time 0.31 --nn1-time 1.0 "
      "--nn2-time 1.0");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("encoder_complexity_ratio=11.86") != std::string::npos);
  CHECK(r.out.find("decoder_complexity_ratio=0.31") != std::string::npos);
  CHECK(r.out.find("encoder_offload_inequality=NOT satisfied") !=
        std::string::npos);
  CHECK(r.out.find("decoder_offload_inequality=satisfied") !=
        std::string::npos);

  SUBCASE("report file input") {
    TempPath report(".txt");
    std::ofstream(report.path) << "fcm_encoder_s=2.0\nfcm_decoder_s=0.5\n"
                               << "nn_part1_s=1.0\nnn_part2_s=4.0\n";
    const ToolResult file_r = run_tool("complexity --report " + report.str());
    CHECK(file_r.exit_code == 0);
    CHECK(file_r.out.find("encoder_complexity_ratio=0.50") !=
          std::string::npos);
    CHECK(file_r.out.find("encoder_offload_inequality=satisfied") !=
          std::string::npos);
  }
  SUBCASE("non-positive time is an error") {
    const ToolResult bad = run_tool("complexity --enc-time 1 --dec-time 1 "
                                    "--nn1-time 0 --nn2-time 1");
    CHECK(bad.exit_code == 3);
  }
}

TEST_CASE("sweep needs at least four ladder points") {
  TempPath fts(".fts"), csv(".csv");
  save_fts(fixture_set(), fts.path);
  const ToolResult bad = run_tool("sweep --input " + fts.str() +
                                  " --ladder bitdepth=8,10,12 --output " +
                                  csv.str());
  CHECK(bad.exit_code == 1);

  const ToolResult good = run_tool("sweep --input " + fts.str() +
                                   " --ladder bitdepth=8,10,12,14 --output " +
                                   csv.str());
  CHECK(good.exit_code == 0);
  const std::string text = slurp(csv.path);
  CHECK(text.rfind("config_id,qp,bitrate_kbps,quality_db,bytes,enc_time_s,"
                   "dec_time_s",
                   0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 5);
}

TEST_CASE("complexity --measure runs the pipeline end to end") {
  TempPath fts(".fts");
  save_fts(fixture_set(), fts.path);
  const ToolResult r = run_tool("complexity --measure " + fts.str() +
                                " --nn1-time 100 --nn2-time 100");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("stage_feature_reduction_s=") != std::string::npos);
  CHECK(r.out.find("stage_feature_restoration_s=") != std::string::npos);
  CHECK(r.out.find("encoder_offload_inequality=satisfied") !=
        std::string::npos);
}
