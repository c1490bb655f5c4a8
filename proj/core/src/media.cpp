#include "bolasim/media.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace bolasim {

namespace {

// Bit-exact uniform in [0, 1): top 53 bits of the engine output. Keeps
// generated corpora byte-identical across standard library versions.
double u01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void check(bool ok, const std::string& msg) {
  if (!ok) throw ValidationError(msg);
}

}  // namespace

Ssim::Ssim(double value) : value_(value) {
  if (!(std::isfinite(value) && value > 0.0 && value <= 1.0)) {
    throw ValidationError("ssim must be in (0, 1], got " + std::to_string(value));
  }
}

SsimDb::SsimDb(double value, double db_cap) : value_(value) {
  if (!(std::isfinite(value) && value > 0.0 && value <= db_cap)) {
    throw ValidationError("ssim dB must be in (0, " + std::to_string(db_cap) +
                          "], got " + std::to_string(value));
  }
}

SsimDb ssim_to_db(Ssim s, double db_cap) {
  if (!(std::isfinite(db_cap) && db_cap > 0.0)) {
    throw ValidationError("db_cap must be positive");
  }
  if (s.value() == 1.0) return SsimDb(db_cap, db_cap);
  const double db = -10.0 * std::log10(1.0 - s.value());
  return SsimDb(std::min(db, db_cap), db_cap);
}

Ssim db_to_ssim(SsimDb d) {
  return Ssim(1.0 - std::pow(10.0, -d.value() / 10.0));
}

const char* to_string(UtilityKind kind) noexcept {
  return kind == UtilityKind::ssim_raw ? "ssim_raw" : "ssim_db";
}

ChunkLadder validate_ladder(const ChunkLadder& raw, LadderPolicy policy) {
  check(!raw.encodings.empty(),
        "chunk " + std::to_string(raw.chunk_index) + ": empty encoding list");
  check(std::isfinite(raw.duration_s) && raw.duration_s > 0.0,
        "chunk " + std::to_string(raw.chunk_index) + ": duration must be positive");

  ChunkLadder out;
  out.chunk_index = raw.chunk_index;
  out.duration_s = raw.duration_s;

  if (policy == LadderPolicy::drop_dominated) {
    std::vector<Encoding> sorted = raw.encodings;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const Encoding& a, const Encoding& b) {
                       return a.size_bytes < b.size_bytes;
                     });
    for (const Encoding& e : sorted) {
      check(std::isfinite(e.size_bytes) && e.size_bytes > 0.0,
            "chunk " + std::to_string(raw.chunk_index) + " format " +
                std::to_string(e.format_id) + ": size must be positive");
      if (!out.encodings.empty()) {
        const Encoding& prev = out.encodings.back();
        check(e.size_bytes != prev.size_bytes,
              "chunk " + std::to_string(raw.chunk_index) + ": duplicate size " +
                  std::to_string(e.size_bytes));
        // Dominated: some strictly smaller retained encoding looks at least as good.
        if (prev.ssim.value() >= e.ssim.value()) continue;
      }
      out.encodings.push_back(e);
    }
    return out;
  }

  for (std::size_t i = 0; i < raw.encodings.size(); ++i) {
    const Encoding& e = raw.encodings[i];
    check(std::isfinite(e.size_bytes) && e.size_bytes > 0.0,
          "chunk " + std::to_string(raw.chunk_index) + " format " +
              std::to_string(e.format_id) + ": size must be positive");
    if (i > 0) {
      const Encoding& prev = raw.encodings[i - 1];
      check(e.size_bytes != prev.size_bytes,
            "chunk " + std::to_string(raw.chunk_index) + ": duplicate size " +
                std::to_string(e.size_bytes));
      check(e.size_bytes > prev.size_bytes,
            "chunk " + std::to_string(raw.chunk_index) +
                ": sizes not strictly increasing at format " +
                std::to_string(e.format_id));
      check(e.ssim.value() >= prev.ssim.value(),
            "chunk " + std::to_string(raw.chunk_index) +
                ": ssim decreases with size at format " + std::to_string(e.format_id));
    }
  }
  out.encodings = raw.encodings;
  return out;
}

AverageLadder average_ladder(std::span<const ChunkLadder> chunks, UtilityKind kind,
                             double db_cap) {
  check(!chunks.empty(), "average_ladder: no chunks");
  const std::size_t formats = chunks.front().encodings.size();
  for (const ChunkLadder& c : chunks) {
    check(c.encodings.size() == formats,
          "average_ladder: chunk " + std::to_string(c.chunk_index) + " has " +
              std::to_string(c.encodings.size()) + " formats, expected " +
              std::to_string(formats));
  }

  const auto utility = [&](const Encoding& e) {
    return kind == UtilityKind::ssim_raw ? e.ssim.value()
                                         : ssim_to_db(e.ssim, db_cap).value();
  };

  // Shifted mean: exact when all inputs are identical, stable otherwise.
  const auto mean_at = [&](std::size_t pos, auto&& get) {
    const double first = get(chunks.front().encodings[pos]);
    double acc = 0.0;
    for (const ChunkLadder& c : chunks) acc += get(c.encodings[pos]) - first;
    return first + acc / static_cast<double>(chunks.size());
  };

  AverageLadder avg;
  avg.kind = kind;
  avg.mean_size_bytes.reserve(formats);
  avg.mean_utility.reserve(formats);
  for (std::size_t pos = 0; pos < formats; ++pos) {
    avg.mean_size_bytes.push_back(
        mean_at(pos, [](const Encoding& e) { return e.size_bytes; }));
    avg.mean_utility.push_back(mean_at(pos, utility));
  }

  for (std::size_t pos = 1; pos < formats; ++pos) {
    check(avg.mean_size_bytes[pos] > avg.mean_size_bytes[pos - 1],
          "average_ladder: mean sizes not strictly increasing at format " +
              std::to_string(pos));
    check(avg.mean_utility[pos] >= avg.mean_utility[pos - 1],
          "average_ladder: mean utilities decrease at format " + std::to_string(pos));
  }
  return avg;
}

void validate_trace(const ThroughputTrace& trace) {
  check(!trace.segments.empty(), "trace: no segments");
  check(trace.segments.front().start_s == 0.0, "trace: first segment must start at 0");
  for (std::size_t i = 0; i < trace.segments.size(); ++i) {
    const auto& seg = trace.segments[i];
    check(std::isfinite(seg.bytes_per_sec) && seg.bytes_per_sec > 0.0,
          "trace segment " + std::to_string(i) + ": bandwidth must be positive");
    if (i > 0) {
      check(seg.start_s > trace.segments[i - 1].start_s,
            "trace segment " + std::to_string(i) +
                ": start times not strictly increasing");
    }
  }
}

std::vector<ChunkLadder> gen_ladders(const LadderGenConfig& config) {
  check(config.formats >= 1, "gen_ladders: formats must be >= 1");
  check(config.chunks >= 1, "gen_ladders: chunks must be >= 1");
  check(config.chunk_duration_s > 0.0, "gen_ladders: chunk duration must be positive");
  check(config.volatility_db >= 0.0, "gen_ladders: volatility must be >= 0");
  check(config.min_ssim_db > 0.0 && config.max_ssim_db >= config.min_ssim_db,
        "gen_ladders: need 0 < min_ssim_db <= max_ssim_db");
  check(config.min_ssim_db - config.volatility_db > 0.0,
        "gen_ladders: volatility would push quality to or below 0 dB");
  check(config.max_ssim_db + config.volatility_db <= kDefaultDbCap,
        "gen_ladders: volatility would push quality above the dB cap");

  const int m = config.formats;
  std::vector<double> sizes = config.base_sizes;
  if (sizes.empty()) {
    sizes.reserve(m);
    double s = 5e4;  // ~200 kbit/s at 2 s chunks
    for (int k = 0; k < m; ++k) {
      sizes.push_back(std::round(s));
      s *= 1.5;
    }
  }
  check(static_cast<int>(sizes.size()) == m,
        "gen_ladders: base_sizes count does not match formats");
  for (int k = 0; k < m; ++k) {
    check(std::isfinite(sizes[k]) && sizes[k] > 0.0,
          "gen_ladders: base size " + std::to_string(k) + " must be positive");
    check(k == 0 || sizes[k] > sizes[k - 1],
          "gen_ladders: base sizes not strictly increasing at " + std::to_string(k));
  }

  std::vector<double> base_db(m);
  for (int k = 0; k < m; ++k) {
    const double t = m == 1 ? 1.0 : static_cast<double>(k) / (m - 1);
    base_db[k] = config.min_ssim_db + t * (config.max_ssim_db - config.min_ssim_db);
  }

  std::mt19937_64 rng(config.seed);
  std::vector<ChunkLadder> out;
  out.reserve(config.chunks);
  for (int c = 0; c < config.chunks; ++c) {
    ChunkLadder lad;
    lad.chunk_index = c;
    lad.duration_s = config.chunk_duration_s;
    lad.encodings.reserve(m);
    double floor_db = 0.0;  // running max keeps quality nondecreasing with size
    for (int k = 0; k < m; ++k) {
      const double jitter = config.volatility_db * (2.0 * u01(rng) - 1.0);
      floor_db = std::max(floor_db, base_db[k] + jitter);
      lad.encodings.push_back(
          Encoding{k, sizes[k], db_to_ssim(SsimDb(floor_db))});
    }
    out.push_back(validate_ladder(lad, LadderPolicy::reject));
  }
  return out;
}

ThroughputTrace gen_trace(const TraceGenConfig& config) {
  check(config.segments >= 1, "gen_trace: segments must be >= 1");
  ThroughputTrace trace;

  switch (config.pattern) {
    case TracePattern::constant:
      check(config.bytes_per_sec > 0.0, "gen_trace: bandwidth must be positive");
      trace.segments.push_back({0.0, config.bytes_per_sec});
      break;
    case TracePattern::square: {
      check(config.low_bytes_per_sec > 0.0 && config.high_bytes_per_sec > 0.0,
            "gen_trace: bandwidth must be positive");
      check(config.period_s > 0.0, "gen_trace: period must be positive");
      for (int k = 0; k < config.segments; ++k) {
        const double bw =
            k % 2 == 0 ? config.high_bytes_per_sec : config.low_bytes_per_sec;
        trace.segments.push_back({k * config.period_s, bw});
      }
      break;
    }
    case TracePattern::random_walk: {
      check(config.bytes_per_sec > 0.0, "gen_trace: bandwidth must be positive");
      check(config.period_s > 0.0, "gen_trace: period must be positive");
      check(config.walk_step_db >= 0.0, "gen_trace: walk step must be >= 0");
      std::mt19937_64 rng(config.seed);
      double level = config.bytes_per_sec;
      for (int k = 0; k < config.segments; ++k) {
        trace.segments.push_back({k * config.period_s, level});
        const double step_db = config.walk_step_db * (2.0 * u01(rng) - 1.0);
        level *= std::pow(10.0, step_db / 10.0);
      }
      break;
    }
  }

  validate_trace(trace);
  return trace;
}

}  // namespace bolasim
