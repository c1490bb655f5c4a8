#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bolasim/bola.hpp"
#include "bolasim/media.hpp"
#include "bolasim/sim.hpp"

namespace bolasim {

/// Shortest decimal form that parses back to the identical double.
std::string format_double(double value);

/// Strict full-field parse; throws ValidationError naming `what` on failure.
double parse_double(const std::string& field, const std::string& what);
int parse_int(const std::string& field, const std::string& what);

// Ladder corpus CSV: header chunk_index,format_id,size_bytes,ssim with rows
// grouped by chunk and sorted by size. Chunk duration is not part of the
// file; the reader stamps every chunk with `chunk_duration_s`.
void write_ladders_csv(std::ostream& os, std::span<const ChunkLadder> ladders);
std::vector<ChunkLadder> read_ladders_csv(std::istream& is, double chunk_duration_s);

// Trace CSV: header time_s,bytes_per_sec; first row at time 0.
void write_trace_csv(std::ostream& os, const ThroughputTrace& trace);
ThroughputTrace read_trace_csv(std::istream& is);

// Calibrated parameter file (JSON).
void write_params_json(std::ostream& os, const BolaParams& params,
                       NegativePolicy policy);
struct LoadedParams {
  BolaParams params;
  NegativePolicy negative_policy;
};
LoadedParams read_params_json(std::istream& is);

// Threshold boundaries, one row per decision change. An empty to_format
// means the decision becomes NoSend; hypothetical marks boundaries past the
// maximum buffer level.
struct ThresholdRow {
  int chunk_index;
  int boundary_index;
  double buffer_s;
  int from_format;
  std::optional<int> to_format;
  bool hypothetical;
};
std::vector<ThresholdRow> threshold_rows(int chunk_index,
                                         const ThresholdProfile& profile,
                                         double max_buffer_s);
void write_thresholds_csv(std::ostream& os, std::span<const ThresholdRow> rows);
std::vector<ThresholdRow> read_thresholds_csv(std::istream& is);

// Session summary (JSON) and summary table (CSV, one row per algorithm).
void write_summary_json(std::ostream& os, const SimSummary& summary);
SimSummary read_summary_json(std::istream& is);
void write_compare_csv(std::ostream& os, std::span<const SimSummary> rows);
std::vector<SimSummary> read_compare_csv(std::istream& is);

// Per-chunk decision log.
struct DecisionRow {
  int chunk_index;
  int format_id;
  double buffer_before_s;
  double download_s;
  double stall_s;
};
std::vector<DecisionRow> decision_rows(const SimReport& report);
void write_decisions_csv(std::ostream& os, std::span<const DecisionRow> rows);
std::vector<DecisionRow> read_decisions_csv(std::istream& is);

}  // namespace bolasim
