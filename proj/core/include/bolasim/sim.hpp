#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "bolasim/baseline.hpp"
#include "bolasim/bola.hpp"
#include "bolasim/media.hpp"

namespace bolasim {

struct BolaAlgo {
  BolaParams params;
  NegativePolicy negative_policy = NegativePolicy::argmax_objective;
};

using SessionAlgorithm = std::variant<BolaAlgo, BbaConfig>;

/// One simulated streaming session. Playback starts when the first chunk
/// completes; the buffer is gated so a chunk is only requested when it fits.
struct SessionConfig {
  std::string label;  // carried into the summary's algo column
  DecisionMode mode = DecisionMode::client;
  double buffer_capacity_s = 15.0;
  SessionAlgorithm algorithm = BbaConfig{};
};

/// Wall-clock timeline of one downloaded chunk.
struct ChunkRecord {
  int chunk_index;
  Decision decision;
  double download_start_s;
  double download_end_s;
  double buffer_before_s;  // buffer at the decision that sent this chunk
  double stall_s;          // stalled time accrued during this download
  double ssim;             // chosen encoding's ssim, for quality summaries
};

struct SimReport {
  std::string label;
  std::vector<ChunkRecord> chunks;
  double startup_delay_s = 0.0;
  double play_time_s = 0.0;
  double stall_time_s = 0.0;

  /// Session clock at the end of the run. Every elapsed interval lands in
  /// exactly one of the three accumulators, so this is their sum.
  double final_clock_s() const noexcept {
    return startup_delay_s + play_time_s + stall_time_s;
  }
};

struct SimSummary {
  std::string algo;
  int chunks = 0;
  double mean_ssim_db = 0.0;
  double stall_ratio = 0.0;
  double mean_abs_ssim_db_delta = 0.0;
  double startup_delay_s = 0.0;
  double play_time_s = 0.0;
  double stall_time_s = 0.0;
};

/// Runs the session event loop over the corpus and trace: decide, download
/// over the piecewise-constant trace, drain the buffer while playing, stall
/// at empty, and append one chunk duration per completed download. After a
/// client-mode NoSend the buffer drains to the pending ladder's pause
/// threshold before the next decision. The remaining buffer plays out after
/// the last download.
SimReport simulate(const SessionConfig& cfg, std::span<const ChunkLadder> ladders,
                   const ThroughputTrace& trace);

/// Aggregate quality/stall metrics over the played chunks.
SimSummary summarize(const SimReport& report);

/// One summary per config, each simulated over the identical inputs.
std::vector<SimSummary> compare(std::span<const SessionConfig> cfgs,
                                std::span<const ChunkLadder> ladders,
                                const ThroughputTrace& trace);

/// Time to fetch `size_bytes` starting at `start_s`, integrating the trace.
double download_time(const ThroughputTrace& trace, double start_s, double size_bytes);

}  // namespace bolasim
