#include "bolasim/io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace bolasim {

namespace {

using nlohmann::json;

void check(bool ok, const std::string& msg) {
  if (!ok) throw ValidationError(msg);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  for (;;) {
    const std::size_t comma = line.find(',', pos);
    if (comma == std::string::npos) {
      out.push_back(line.substr(pos));
      return out;
    }
    out.push_back(line.substr(pos, comma - pos));
    pos = comma + 1;
  }
}

// Reads lines regardless of trailing CR; skips nothing else.
bool next_line(std::istream& is, std::string& line) {
  if (!std::getline(is, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

struct CsvReader {
  std::istream& is;
  std::string expected_header;
  int line_no = 0;

  void read_header() {
    std::string line;
    check(next_line(is, line), "missing header row");
    ++line_no;
    check(line == expected_header,
          "line 1: expected header '" + expected_header + "', got '" + line + "'");
  }

  bool next_row(std::vector<std::string>& fields, std::size_t expected_count) {
    std::string line;
    if (!next_line(is, line)) return false;
    ++line_no;
    if (line.empty()) {
      check(is.peek() == std::char_traits<char>::eof(),
            "line " + std::to_string(line_no) + ": blank row");
      return false;  // tolerate one trailing newline
    }
    fields = split_fields(line);
    check(fields.size() == expected_count,
          "line " + std::to_string(line_no) + ": expected " +
              std::to_string(expected_count) + " fields, got " +
              std::to_string(fields.size()));
    return true;
  }

  std::string where() const { return "line " + std::to_string(line_no); }
};

UtilityKind utility_kind_from(const std::string& s) {
  if (s == "ssim_raw") return UtilityKind::ssim_raw;
  if (s == "ssim_db") return UtilityKind::ssim_db;
  throw ValidationError("unknown utility_kind '" + s + "'");
}

NegativePolicy negative_policy_from(const std::string& s) {
  if (s == "argmax_objective") return NegativePolicy::argmax_objective;
  if (s == "argmax_utility") return NegativePolicy::argmax_utility;
  throw ValidationError("unknown negative_policy '" + s + "'");
}

}  // namespace

std::string format_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& field, const std::string& what) {
  double value = 0.0;
  const char* end = field.data() + field.size();
  const auto res = std::from_chars(field.data(), end, value);
  check(res.ec == std::errc() && res.ptr == end && !field.empty(),
        what + ": bad number '" + field + "'");
  return value;
}

int parse_int(const std::string& field, const std::string& what) {
  int value = 0;
  const char* end = field.data() + field.size();
  const auto res = std::from_chars(field.data(), end, value);
  check(res.ec == std::errc() && res.ptr == end && !field.empty(),
        what + ": bad integer '" + field + "'");
  return value;
}

void write_ladders_csv(std::ostream& os, std::span<const ChunkLadder> ladders) {
  os << "chunk_index,format_id,size_bytes,ssim\n";
  for (const ChunkLadder& lad : ladders) {
    for (const Encoding& e : lad.encodings) {
      os << lad.chunk_index << ',' << e.format_id << ','
         << format_double(e.size_bytes) << ',' << format_double(e.ssim.value())
         << '\n';
    }
  }
}

std::vector<ChunkLadder> read_ladders_csv(std::istream& is,
                                          double chunk_duration_s) {
  check(chunk_duration_s > 0.0, "chunk duration must be positive");
  CsvReader reader{is, "chunk_index,format_id,size_bytes,ssim"};
  reader.read_header();

  std::vector<ChunkLadder> out;
  std::vector<int> seen_chunks;
  std::vector<std::string> f;
  while (reader.next_row(f, 4)) {
    const std::string at = reader.where();
    const int chunk = parse_int(f[0], at + " chunk_index");
    const int format = parse_int(f[1], at + " format_id");
    const double size = parse_double(f[2], at + " size_bytes");
    const double ssim = parse_double(f[3], at + " ssim");

    if (out.empty() || out.back().chunk_index != chunk) {
      for (int prior : seen_chunks) {
        check(prior != chunk, at + ": chunk " + std::to_string(chunk) +
                                  " rows are not grouped together");
      }
      seen_chunks.push_back(chunk);
      out.push_back(ChunkLadder{chunk, chunk_duration_s, {}});
    }
    for (const Encoding& e : out.back().encodings) {
      check(e.format_id != format, at + ": duplicate format_id " +
                                       std::to_string(format) + " in chunk " +
                                       std::to_string(chunk));
    }
    try {
      out.back().encodings.push_back(Encoding{format, size, Ssim(ssim)});
    } catch (const ValidationError& e) {
      throw ValidationError(at + ": " + e.what());
    }
  }
  check(!out.empty(), "no data rows");

  for (ChunkLadder& lad : out) {
    lad = validate_ladder(lad, LadderPolicy::reject);
  }
  return out;
}

void write_trace_csv(std::ostream& os, const ThroughputTrace& trace) {
  os << "time_s,bytes_per_sec\n";
  for (const auto& seg : trace.segments) {
    os << format_double(seg.start_s) << ',' << format_double(seg.bytes_per_sec)
       << '\n';
  }
}

ThroughputTrace read_trace_csv(std::istream& is) {
  CsvReader reader{is, "time_s,bytes_per_sec"};
  reader.read_header();

  ThroughputTrace trace;
  std::vector<std::string> f;
  while (reader.next_row(f, 2)) {
    const std::string at = reader.where();
    trace.segments.push_back({parse_double(f[0], at + " time_s"),
                              parse_double(f[1], at + " bytes_per_sec")});
  }
  validate_trace(trace);
  return trace;
}

void write_params_json(std::ostream& os, const BolaParams& params,
                       NegativePolicy policy) {
  json top;
  if (params.calibration.top_utility.is_max_possible()) {
    top = json{{"max_possible", params.calibration.top_utility.value()}};
  } else {
    top = json{{"max_average", nullptr}};
  }
  const json doc{
      {"v_coef_s_per_utility", params.v_coef},
      {"gamma_p_utility", params.gamma_p},
      {"utility_kind", to_string(params.utility_kind)},
      {"min_buffer_s", params.calibration.min_buffer_s},
      {"max_buffer_s", params.calibration.max_buffer_s},
      {"chunk_duration_s", params.calibration.chunk_duration_s},
      {"top_utility", top},
      {"negative_policy", to_string(policy)},
  };
  os << doc.dump(2) << '\n';
}

LoadedParams read_params_json(std::istream& is) {
  json doc;
  try {
    doc = json::parse(is);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("params JSON: ") + e.what());
  }

  try {
    LoadedParams loaded;
    loaded.params.v_coef = doc.at("v_coef_s_per_utility").get<double>();
    loaded.params.gamma_p = doc.at("gamma_p_utility").get<double>();
    loaded.params.utility_kind =
        utility_kind_from(doc.at("utility_kind").get<std::string>());
    loaded.negative_policy =
        negative_policy_from(doc.at("negative_policy").get<std::string>());

    CalibrationConfig cfg;
    cfg.min_buffer_s = doc.at("min_buffer_s").get<double>();
    cfg.max_buffer_s = doc.at("max_buffer_s").get<double>();
    cfg.chunk_duration_s = doc.at("chunk_duration_s").get<double>();
    cfg.utility_kind = loaded.params.utility_kind;
    const json& top = doc.at("top_utility");
    if (top.contains("max_possible")) {
      cfg.top_utility = TopUtility::max_possible(top.at("max_possible").get<double>());
    } else if (top.contains("max_average")) {
      cfg.top_utility = TopUtility::max_average();
    } else {
      throw ValidationError("params JSON: unknown top_utility variant");
    }
    loaded.params.calibration = cfg;

    check(std::isfinite(loaded.params.v_coef) && loaded.params.v_coef > 0.0,
          "params JSON: v_coef_s_per_utility must be positive");
    check(std::isfinite(loaded.params.gamma_p),
          "params JSON: gamma_p_utility must be finite");
    check(cfg.min_buffer_s > 0.0 && cfg.min_buffer_s < cfg.max_buffer_s,
          "params JSON: need 0 < min_buffer_s < max_buffer_s");
    check(cfg.chunk_duration_s > 0.0,
          "params JSON: chunk_duration_s must be positive");
    return loaded;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("params JSON: ") + e.what());
  }
}

std::vector<ThresholdRow> threshold_rows(int chunk_index,
                                         const ThresholdProfile& profile,
                                         double max_buffer_s) {
  std::vector<ThresholdRow> rows;
  rows.reserve(profile.boundaries().size());
  int index = 0;
  for (const auto& b : profile.boundaries()) {
    rows.push_back(ThresholdRow{chunk_index, index++, b.buffer_s, b.from_format,
                                b.to_format, b.buffer_s > max_buffer_s});
  }
  return rows;
}

void write_thresholds_csv(std::ostream& os, std::span<const ThresholdRow> rows) {
  os << "chunk_index,boundary_index,buffer_s,from_format,to_format,hypothetical\n";
  for (const ThresholdRow& r : rows) {
    os << r.chunk_index << ',' << r.boundary_index << ','
       << format_double(r.buffer_s) << ',' << r.from_format << ',';
    if (r.to_format.has_value()) os << *r.to_format;
    os << ',' << (r.hypothetical ? "true" : "false") << '\n';
  }
}

std::vector<ThresholdRow> read_thresholds_csv(std::istream& is) {
  CsvReader reader{
      is, "chunk_index,boundary_index,buffer_s,from_format,to_format,hypothetical"};
  reader.read_header();

  std::vector<ThresholdRow> rows;
  std::vector<std::string> f;
  while (reader.next_row(f, 6)) {
    const std::string at = reader.where();
    ThresholdRow r;
    r.chunk_index = parse_int(f[0], at + " chunk_index");
    r.boundary_index = parse_int(f[1], at + " boundary_index");
    r.buffer_s = parse_double(f[2], at + " buffer_s");
    r.from_format = parse_int(f[3], at + " from_format");
    r.to_format = f[4].empty()
                      ? std::nullopt
                      : std::optional<int>(parse_int(f[4], at + " to_format"));
    if (f[5] == "true") {
      r.hypothetical = true;
    } else if (f[5] == "false") {
      r.hypothetical = false;
    } else {
      throw ValidationError(at + " hypothetical: expected true/false, got '" +
                            f[5] + "'");
    }
    rows.push_back(r);
  }
  return rows;
}

void write_summary_json(std::ostream& os, const SimSummary& summary) {
  const json doc{
      {"algo", summary.algo},
      {"chunks", summary.chunks},
      {"mean_ssim_db", summary.mean_ssim_db},
      {"stall_ratio", summary.stall_ratio},
      {"mean_abs_ssim_db_delta", summary.mean_abs_ssim_db_delta},
      {"startup_delay_s", summary.startup_delay_s},
      {"play_time_s", summary.play_time_s},
      {"stall_time_s", summary.stall_time_s},
  };
  os << doc.dump(2) << '\n';
}

SimSummary read_summary_json(std::istream& is) {
  try {
    const json doc = json::parse(is);
    SimSummary s;
    s.algo = doc.at("algo").get<std::string>();
    s.chunks = doc.at("chunks").get<int>();
    s.mean_ssim_db = doc.at("mean_ssim_db").get<double>();
    s.stall_ratio = doc.at("stall_ratio").get<double>();
    s.mean_abs_ssim_db_delta = doc.at("mean_abs_ssim_db_delta").get<double>();
    s.startup_delay_s = doc.at("startup_delay_s").get<double>();
    s.play_time_s = doc.at("play_time_s").get<double>();
    s.stall_time_s = doc.at("stall_time_s").get<double>();
    return s;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("summary JSON: ") + e.what());
  }
}

namespace {
constexpr const char* kSummaryHeader =
    "algo,chunks,mean_ssim_db,stall_ratio,mean_abs_ssim_db_delta,"
    "startup_delay_s,play_time_s,stall_time_s";
}

void write_compare_csv(std::ostream& os, std::span<const SimSummary> rows) {
  os << kSummaryHeader << '\n';
  for (const SimSummary& s : rows) {
    check(s.algo.find(',') == std::string::npos,
          "compare: algo label may not contain a comma");
    os << s.algo << ',' << s.chunks << ',' << format_double(s.mean_ssim_db) << ','
       << format_double(s.stall_ratio) << ','
       << format_double(s.mean_abs_ssim_db_delta) << ','
       << format_double(s.startup_delay_s) << ',' << format_double(s.play_time_s)
       << ',' << format_double(s.stall_time_s) << '\n';
  }
}

std::vector<SimSummary> read_compare_csv(std::istream& is) {
  CsvReader reader{is, kSummaryHeader};
  reader.read_header();

  std::vector<SimSummary> rows;
  std::vector<std::string> f;
  while (reader.next_row(f, 8)) {
    const std::string at = reader.where();
    SimSummary s;
    s.algo = f[0];
    s.chunks = parse_int(f[1], at + " chunks");
    s.mean_ssim_db = parse_double(f[2], at + " mean_ssim_db");
    s.stall_ratio = parse_double(f[3], at + " stall_ratio");
    s.mean_abs_ssim_db_delta = parse_double(f[4], at + " mean_abs_ssim_db_delta");
    s.startup_delay_s = parse_double(f[5], at + " startup_delay_s");
    s.play_time_s = parse_double(f[6], at + " play_time_s");
    s.stall_time_s = parse_double(f[7], at + " stall_time_s");
    rows.push_back(s);
  }
  return rows;
}

std::vector<DecisionRow> decision_rows(const SimReport& report) {
  std::vector<DecisionRow> rows;
  rows.reserve(report.chunks.size());
  for (const ChunkRecord& r : report.chunks) {
    rows.push_back(DecisionRow{r.chunk_index, r.decision.format_id(),
                               r.buffer_before_s,
                               r.download_end_s - r.download_start_s, r.stall_s});
  }
  return rows;
}

void write_decisions_csv(std::ostream& os, std::span<const DecisionRow> rows) {
  os << "chunk_index,format_id,buffer_before_s,download_s,stall_s\n";
  for (const DecisionRow& r : rows) {
    os << r.chunk_index << ',' << r.format_id << ','
       << format_double(r.buffer_before_s) << ',' << format_double(r.download_s)
       << ',' << format_double(r.stall_s) << '\n';
  }
}

std::vector<DecisionRow> read_decisions_csv(std::istream& is) {
  CsvReader reader{is, "chunk_index,format_id,buffer_before_s,download_s,stall_s"};
  reader.read_header();

  std::vector<DecisionRow> rows;
  std::vector<std::string> f;
  while (reader.next_row(f, 5)) {
    const std::string at = reader.where();
    rows.push_back(DecisionRow{parse_int(f[0], at + " chunk_index"),
                               parse_int(f[1], at + " format_id"),
                               parse_double(f[2], at + " buffer_before_s"),
                               parse_double(f[3], at + " download_s"),
                               parse_double(f[4], at + " stall_s")});
  }
  return rows;
}

}  // namespace bolasim
