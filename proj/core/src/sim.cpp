#include "bolasim/sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace bolasim {

namespace {

void check(bool ok, const std::string& msg) {
  if (!ok) throw ValidationError(msg);
}

std::size_t position_of(const ChunkLadder& ladder, int format_id) {
  for (std::size_t i = 0; i < ladder.encodings.size(); ++i) {
    if (ladder.encodings[i].format_id == format_id) return i;
  }
  throw std::logic_error("decision references a format absent from the ladder");
}

}  // namespace

double download_time(const ThroughputTrace& trace, double start_s,
                     double size_bytes) {
  check(start_s >= 0.0, "download_time: start must be >= 0");
  check(size_bytes > 0.0, "download_time: size must be positive");

  std::size_t idx = 0;
  while (idx + 1 < trace.segments.size() &&
         trace.segments[idx + 1].start_s <= start_s) {
    ++idx;
  }

  double t = start_s;
  double remaining = size_bytes;
  double duration = 0.0;
  for (;;) {
    const double bw = trace.segments[idx].bytes_per_sec;
    if (idx + 1 == trace.segments.size()) return duration + remaining / bw;
    const double seg_end = trace.segments[idx + 1].start_s;
    const double available = bw * (seg_end - t);
    if (remaining <= available) return duration + remaining / bw;
    remaining -= available;
    duration += seg_end - t;
    t = seg_end;
    ++idx;
  }
}

SimReport simulate(const SessionConfig& cfg, std::span<const ChunkLadder> ladders,
                   const ThroughputTrace& trace) {
  check(!ladders.empty(), "simulate: empty ladder list");
  check(cfg.buffer_capacity_s > 0.0, "simulate: buffer capacity must be positive");
  validate_trace(trace);
  for (const ChunkLadder& lad : ladders) {
    check(lad.duration_s > 0.0 && lad.duration_s <= cfg.buffer_capacity_s,
          "simulate: chunk " + std::to_string(lad.chunk_index) +
              " duration does not fit the buffer capacity");
    check(!lad.encodings.empty(),
          "simulate: chunk " + std::to_string(lad.chunk_index) + " has no encodings");
  }

  const BolaAlgo* bola = std::get_if<BolaAlgo>(&cfg.algorithm);
  const BbaConfig* bba = std::get_if<BbaConfig>(&cfg.algorithm);

  SimReport report;
  report.label = cfg.label;
  report.chunks.reserve(ladders.size());

  double startup = 0.0;
  double play = 0.0;
  double stall = 0.0;
  double buffer = 0.0;
  bool playing = false;

  const auto now = [&] { return startup + play + stall; };
  const auto assert_buffer_bounds = [&] {
    if (buffer < 0.0 || buffer > cfg.buffer_capacity_s) {
      throw std::logic_error("simulate: buffer out of bounds");
    }
  };

  for (const ChunkLadder& lad : ladders) {
    Decision decision = Decision::no_send();
    double buffer_before = 0.0;

    for (;;) {
      if (buffer + lad.duration_s > cfg.buffer_capacity_s) {
        // Room gate: idle (playing) until one chunk fits again.
        if (!playing) throw std::logic_error("simulate: gated while not playing");
        const double target = cfg.buffer_capacity_s - lad.duration_s;
        play += buffer - target;
        buffer = target;
      }
      buffer_before = buffer;
      decision = bola ? choose(bola->params, lad, buffer, cfg.mode,
                               bola->negative_policy)
                      : bba_choose(*bba, lad, buffer);
      if (decision.is_send()) break;
      if (!bola) throw std::logic_error("simulate: non-bola algorithm declined to send");

      // Client-mode pause: drain exactly to the pending ladder's threshold.
      const double target = pause_threshold(bola->params, lad);
      if (target < 0.0) {
        throw ValidationError(
            "simulate: chunk " + std::to_string(lad.chunk_index) +
            " has every objective negative even at an empty buffer");
      }
      if (!playing || buffer <= target) {
        throw std::logic_error("simulate: pause drain cannot progress");
      }
      play += buffer - target;
      buffer = target;
    }

    const Encoding& enc =
        lad.encodings[position_of(lad, decision.format_id())];
    const double start = now();
    const double dl = download_time(trace, start, enc.size_bytes);

    double stalled = 0.0;
    if (playing) {
      const double drained = std::min(buffer, dl);
      stalled = dl - drained;
      play += drained;
      stall += stalled;
      buffer = dl >= buffer ? 0.0 : buffer - dl;
    } else {
      startup += dl;  // pre-playback wall time is startup delay, not stall
    }

    buffer += lad.duration_s;
    if (buffer > cfg.buffer_capacity_s) {
      // The gate guarantees room in exact arithmetic; absorb rounding only.
      if (buffer > cfg.buffer_capacity_s + 1e-9) {
        throw std::logic_error("simulate: buffer overflow past capacity");
      }
      buffer = cfg.buffer_capacity_s;
    }
    playing = true;
    assert_buffer_bounds();

    report.chunks.push_back(ChunkRecord{lad.chunk_index, decision, start,
                                        start + dl, buffer_before, stalled,
                                        enc.ssim.value()});
  }

  // Play out whatever the last download left in the buffer.
  play += buffer;
  buffer = 0.0;

  report.startup_delay_s = startup;
  report.play_time_s = play;
  report.stall_time_s = stall;
  return report;
}

SimSummary summarize(const SimReport& report) {
  check(!report.chunks.empty(), "summarize: no played chunks");

  double db_sum = 0.0;
  double delta_sum = 0.0;
  double prev_db = 0.0;
  for (std::size_t i = 0; i < report.chunks.size(); ++i) {
    const double db = ssim_to_db(Ssim(report.chunks[i].ssim)).value();
    db_sum += db;
    if (i > 0) delta_sum += std::abs(db - prev_db);
    prev_db = db;
  }
  const auto n = static_cast<double>(report.chunks.size());

  SimSummary s;
  s.algo = report.label;
  s.chunks = static_cast<int>(report.chunks.size());
  s.mean_ssim_db = db_sum / n;
  s.mean_abs_ssim_db_delta = report.chunks.size() > 1 ? delta_sum / (n - 1.0) : 0.0;
  s.stall_ratio = report.stall_time_s / (report.stall_time_s + report.play_time_s);
  s.startup_delay_s = report.startup_delay_s;
  s.play_time_s = report.play_time_s;
  s.stall_time_s = report.stall_time_s;
  return s;
}

std::vector<SimSummary> compare(std::span<const SessionConfig> cfgs,
                                std::span<const ChunkLadder> ladders,
                                const ThroughputTrace& trace) {
  check(!cfgs.empty(), "compare: no session configs");
  std::vector<SimSummary> out;
  out.reserve(cfgs.size());
  for (const SessionConfig& cfg : cfgs) {
    out.push_back(summarize(simulate(cfg, ladders, trace)));
  }
  return out;
}

}  // namespace bolasim
