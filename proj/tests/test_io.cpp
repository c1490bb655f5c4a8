#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bolasim/io.hpp"

using namespace bolasim;

namespace {

std::vector<ChunkLadder> sample_corpus() {
  LadderGenConfig cfg;
  cfg.formats = 5;
  cfg.chunks = 7;
  cfg.volatility_db = 1.8;
  cfg.seed = 21;
  return gen_ladders(cfg);
}

template <typename T, typename WriteFn, typename ReadFn>
T round_trip(const T& value, WriteFn&& write, ReadFn&& read) {
  std::ostringstream os;
  write(os, value);
  std::istringstream is(os.str());
  const T back = read(is);

  // Byte-stable emission: writing the parsed value reproduces the file.
  std::ostringstream os2;
  write(os2, back);
  CHECK(os.str() == os2.str());
  return back;
}

}  // namespace

TEST_CASE("format_double round-trips arbitrary doubles") {
  CHECK(format_double(0.0) == "0");
  CHECK(format_double(2.002) == "2.002");
  CHECK(parse_double(format_double(1.0 / 3.0), "x") == 1.0 / 3.0);

  std::mt19937_64 g(3);
  for (int i = 0; i < 5000; ++i) {
    const std::uint64_t bits = g();
    double v;
    std::memcpy(&v, &bits, sizeof v);
    if (!std::isfinite(v)) continue;
    CHECK(parse_double(format_double(v), "x") == v);
  }
}

TEST_CASE("parse helpers reject junk and trailing garbage") {
  CHECK_THROWS_WITH_AS(parse_double("abc", "line 4 size_bytes"),
                       doctest::Contains("line 4"), ValidationError);
  CHECK_THROWS_AS(parse_double("1.5x", "f"), ValidationError);
  CHECK_THROWS_AS(parse_double("", "f"), ValidationError);
  CHECK_THROWS_AS(parse_int("1.5", "f"), ValidationError);
  CHECK(parse_int("-3", "f") == -3);
}

TEST_CASE("ladder csv has the documented layout") {
  ChunkLadder lad;
  lad.chunk_index = 2;
  lad.duration_s = 2.002;
  lad.encodings = {Encoding{0, 1e6, Ssim(0.9)}, Encoding{1, 4e6, Ssim(0.98)}};

  std::ostringstream os;
  write_ladders_csv(os, std::span(&lad, 1));
  CHECK(os.str() ==
        "chunk_index,format_id,size_bytes,ssim\n"
        "2,0,1e+06,0.9\n"
        "2,1,4e+06,0.98\n");

  std::istringstream is(os.str());
  const auto back = read_ladders_csv(is, 2.002);
  REQUIRE(back.size() == 1);
  CHECK(back[0].chunk_index == 2);
  CHECK(back[0].duration_s == 2.002);
  CHECK(back[0].encodings[1].ssim.value() == 0.98);
}

TEST_CASE("ladder csv round-trips a generated corpus losslessly") {
  const auto corpus = sample_corpus();
  const auto back = round_trip(
      corpus,
      [](std::ostream& os, const std::vector<ChunkLadder>& v) {
        write_ladders_csv(os, v);
      },
      [](std::istream& is) { return read_ladders_csv(is, 2.002); });

  REQUIRE(back.size() == corpus.size());
  for (std::size_t c = 0; c < corpus.size(); ++c) {
    REQUIRE(back[c].encodings.size() == corpus[c].encodings.size());
    for (std::size_t k = 0; k < corpus[c].encodings.size(); ++k) {
      CHECK(back[c].encodings[k].format_id == corpus[c].encodings[k].format_id);
      CHECK(back[c].encodings[k].size_bytes == corpus[c].encodings[k].size_bytes);
      CHECK(back[c].encodings[k].ssim.value() ==
            corpus[c].encodings[k].ssim.value());
    }
  }
}

TEST_CASE("ladder csv errors name the offending row") {
  const auto parse = [](const std::string& text) {
    std::istringstream is(text);
    return read_ladders_csv(is, 2.002);
  };
  const std::string header = "chunk_index,format_id,size_bytes,ssim\n";

  CHECK_THROWS_WITH_AS(parse("bad,header\n"), doctest::Contains("header"),
                       ValidationError);
  CHECK_THROWS_WITH_AS(parse(header), doctest::Contains("no data rows"),
                       ValidationError);
  CHECK_THROWS_WITH_AS(parse(header + "0,0,1e6\n"),
                       doctest::Contains("line 2"), ValidationError);
  CHECK_THROWS_WITH_AS(parse(header + "0,0,1e6,0.9\n0,1,oops,0.95\n"),
                       doctest::Contains("line 3"), ValidationError);
  CHECK_THROWS_WITH_AS(parse(header + "0,0,1e6,1.7\n"),
                       doctest::Contains("line 2"), ValidationError);
  CHECK_THROWS_WITH_AS(parse(header + "0,0,1e6,0.9\n0,0,2e6,0.95\n"),
                       doctest::Contains("duplicate format_id"), ValidationError);
  // Rows of one chunk must stay together.
  CHECK_THROWS_WITH_AS(
      parse(header + "0,0,1e6,0.9\n1,0,1e6,0.9\n0,1,2e6,0.95\n"),
      doctest::Contains("line 4"), ValidationError);
  // Sizes must ascend within a chunk.
  CHECK_THROWS_WITH_AS(parse(header + "0,0,2e6,0.9\n0,1,1e6,0.95\n"),
                       doctest::Contains("chunk 0"), ValidationError);
}

TEST_CASE("csv readers tolerate CRLF line endings") {
  std::istringstream is(
      "chunk_index,format_id,size_bytes,ssim\r\n"
      "0,0,1e+06,0.9\r\n"
      "0,1,4e+06,0.98\r\n");
  const auto ladders = read_ladders_csv(is, 2.002);
  REQUIRE(ladders.size() == 1);
  CHECK(ladders[0].encodings.size() == 2);
  CHECK(ladders[0].encodings[1].ssim.value() == 0.98);
}

TEST_CASE("trace csv round-trips and validates") {
  TraceGenConfig cfg;
  cfg.pattern = TracePattern::random_walk;
  cfg.segments = 25;
  cfg.seed = 9;
  const auto trace = gen_trace(cfg);

  const auto back = round_trip(
      trace,
      [](std::ostream& os, const ThroughputTrace& t) { write_trace_csv(os, t); },
      [](std::istream& is) { return read_trace_csv(is); });
  REQUIRE(back.segments.size() == trace.segments.size());
  for (std::size_t i = 0; i < trace.segments.size(); ++i) {
    CHECK(back.segments[i].start_s == trace.segments[i].start_s);
    CHECK(back.segments[i].bytes_per_sec == trace.segments[i].bytes_per_sec);
  }

  std::istringstream bad("time_s,bytes_per_sec\n1,1e6\n");
  CHECK_THROWS_WITH_AS(read_trace_csv(bad), doctest::Contains("start at 0"),
                       ValidationError);
}

TEST_CASE("params json round-trips both top-utility variants") {
  AverageLadder avg;
  avg.kind = UtilityKind::ssim_raw;
  avg.mean_size_bytes = {1e6, 4e6};
  avg.mean_utility = {0.90, 0.98};

  CalibrationConfig cfg;
  cfg.utility_kind = UtilityKind::ssim_raw;
  cfg.top_utility = TopUtility::max_possible(1.0);
  const BolaParams v2 = calibrate(avg, cfg);

  const auto check_round_trip = [](const BolaParams& params, NegativePolicy policy) {
    std::ostringstream os;
    write_params_json(os, params, policy);
    std::istringstream is(os.str());
    const LoadedParams back = read_params_json(is);
    CHECK(back.params.v_coef == params.v_coef);
    CHECK(back.params.gamma_p == params.gamma_p);
    CHECK(back.params.utility_kind == params.utility_kind);
    CHECK(back.negative_policy == policy);
    CHECK(back.params.calibration.min_buffer_s == params.calibration.min_buffer_s);
    CHECK(back.params.calibration.max_buffer_s == params.calibration.max_buffer_s);
    CHECK(back.params.calibration.chunk_duration_s ==
          params.calibration.chunk_duration_s);
    CHECK(back.params.calibration.top_utility.is_max_possible() ==
          params.calibration.top_utility.is_max_possible());
    if (params.calibration.top_utility.is_max_possible()) {
      CHECK(back.params.calibration.top_utility.value() ==
            params.calibration.top_utility.value());
    }

    std::ostringstream os2;
    write_params_json(os2, back.params, back.negative_policy);
    CHECK(os.str() == os2.str());
  };

  check_round_trip(v2, NegativePolicy::argmax_utility);

  AverageLadder avg_db;
  avg_db.kind = UtilityKind::ssim_db;
  avg_db.mean_size_bytes = {1e6, 4e6};
  avg_db.mean_utility = {10.0, 16.989700043360184};
  CalibrationConfig cfg_db;
  cfg_db.utility_kind = UtilityKind::ssim_db;
  cfg_db.top_utility = TopUtility::max_average();
  check_round_trip(calibrate(avg_db, cfg_db), NegativePolicy::argmax_objective);
}

TEST_CASE("params json rejects malformed documents") {
  const auto parse = [](const std::string& text) {
    std::istringstream is(text);
    return read_params_json(is);
  };
  CHECK_THROWS_AS(parse("not json"), ValidationError);
  CHECK_THROWS_WITH_AS(parse("{}"), doctest::Contains("params JSON"),
                       ValidationError);
  CHECK_THROWS_AS(parse(R"({"v_coef_s_per_utility": -1, "gamma_p_utility": 0,
      "utility_kind": "ssim_raw", "min_buffer_s": 3, "max_buffer_s": 15,
      "chunk_duration_s": 2.002, "top_utility": {"max_average": null},
      "negative_policy": "argmax_objective"})"),
                  ValidationError);
  CHECK_THROWS_AS(parse(R"({"v_coef_s_per_utility": 1, "gamma_p_utility": 0,
      "utility_kind": "nope", "min_buffer_s": 3, "max_buffer_s": 15,
      "chunk_duration_s": 2.002, "top_utility": {"max_average": null},
      "negative_policy": "argmax_objective"})"),
                  ValidationError);
}

TEST_CASE("threshold rows mark the hypothetical region and round-trip") {
  AverageLadder avg;
  avg.kind = UtilityKind::ssim_raw;
  avg.mean_size_bytes = {1e6, 4e6};
  avg.mean_utility = {0.90, 0.98};
  CalibrationConfig cfg;
  cfg.utility_kind = UtilityKind::ssim_raw;
  cfg.top_utility = TopUtility::max_possible(1.0);
  const BolaParams params = calibrate(avg, cfg);

  const auto profile = threshold_profile(params, avg);
  const auto rows = threshold_rows(4, profile, 10.0);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].chunk_index == 4);
  CHECK(rows[0].boundary_index == 0);
  CHECK(!rows[0].hypothetical);  // 3.0 <= 10
  CHECK(rows[1].hypothetical);   // ~13.1 > 10
  CHECK(!rows[1].to_format.has_value());

  const auto back = round_trip(
      rows,
      [](std::ostream& os, const std::vector<ThresholdRow>& r) {
        write_thresholds_csv(os, r);
      },
      [](std::istream& is) { return read_thresholds_csv(is); });
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].buffer_s == rows[i].buffer_s);
    CHECK(back[i].from_format == rows[i].from_format);
    CHECK(back[i].to_format == rows[i].to_format);
    CHECK(back[i].hypothetical == rows[i].hypothetical);
  }
}

TEST_CASE("summary json and comparison csv round-trip") {
  SimSummary s;
  s.algo = "bola-v2";
  s.chunks = 120;
  s.mean_ssim_db = 14.25091;
  s.stall_ratio = 0.03125;
  s.mean_abs_ssim_db_delta = 1.0 / 3.0;
  s.startup_delay_s = 0.875;
  s.play_time_s = 240.24;
  s.stall_time_s = 7.75;

  std::ostringstream os;
  write_summary_json(os, s);
  std::istringstream is(os.str());
  const SimSummary back = read_summary_json(is);
  CHECK(back.algo == s.algo);
  CHECK(back.chunks == s.chunks);
  CHECK(back.mean_ssim_db == s.mean_ssim_db);
  CHECK(back.mean_abs_ssim_db_delta == s.mean_abs_ssim_db_delta);
  CHECK(back.stall_ratio == s.stall_ratio);

  SimSummary other = s;
  other.algo = "bba";
  other.stall_ratio = 0.5;
  const std::vector<SimSummary> table = {s, other};
  const auto table_back = round_trip(
      table,
      [](std::ostream& o, const std::vector<SimSummary>& t) {
        write_compare_csv(o, t);
      },
      [](std::istream& i) { return read_compare_csv(i); });
  REQUIRE(table_back.size() == 2);
  CHECK(table_back[0].algo == "bola-v2");
  CHECK(table_back[1].stall_ratio == 0.5);
  CHECK(table_back[0].mean_ssim_db == s.mean_ssim_db);
}

TEST_CASE("decision rows project a report and round-trip") {
  SimReport report;
  report.label = "x";
  report.chunks = {
      ChunkRecord{0, Decision::send(3), 0.0, 1.25, 0.0, 0.0, 0.97},
      ChunkRecord{1, Decision::send(1), 1.25, 4.5, 2.0, 1.25, 0.91},
  };
  const auto rows = decision_rows(report);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].format_id == 3);
  CHECK(rows[1].download_s == 3.25);
  CHECK(rows[1].stall_s == 1.25);

  const auto back = round_trip(
      rows,
      [](std::ostream& os, const std::vector<DecisionRow>& r) {
        write_decisions_csv(os, r);
      },
      [](std::istream& is) { return read_decisions_csv(is); });
  REQUIRE(back.size() == 2);
  CHECK(back[0].chunk_index == 0);
  CHECK(back[0].buffer_before_s == 0.0);
  CHECK(back[1].download_s == rows[1].download_s);
}
