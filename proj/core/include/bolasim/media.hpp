#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bolasim/errors.hpp"

namespace bolasim {

/// Default decibel value assigned to a perfect similarity score. Equals the
/// dB of s = 1 - 1e-6, so the capped map stays monotone up to the cap.
inline constexpr double kDefaultDbCap = 60.0;

/// Structural similarity score. Valid range is (0, 1]; anything else is
/// rejected at construction.
class Ssim {
 public:
  explicit Ssim(double value);
  double value() const noexcept { return value_; }

  friend bool operator==(Ssim a, Ssim b) noexcept { return a.value_ == b.value_; }

 private:
  double value_;
};

/// SSIM expressed in decibels, in (0, db_cap].
class SsimDb {
 public:
  explicit SsimDb(double value, double db_cap = kDefaultDbCap);
  double value() const noexcept { return value_; }

 private:
  double value_;
};

/// dB(s) = min(-10 log10(1 - s), db_cap). Maps s = 1 to exactly db_cap.
SsimDb ssim_to_db(Ssim s, double db_cap = kDefaultDbCap);

/// Inverse of ssim_to_db below the cap region: s = 1 - 10^(-d/10).
Ssim db_to_ssim(SsimDb d);

/// How encoded quality is scored when BOLA consumes it.
enum class UtilityKind { ssim_raw, ssim_db };

const char* to_string(UtilityKind kind) noexcept;

/// One encoded version of a chunk.
struct Encoding {
  int format_id;
  double size_bytes;  // > 0; stored as double so size rescaling stays exact math
  Ssim ssim;
};

/// The ordered set of encodings available for one chunk. Sizes are strictly
/// increasing and ssim is nondecreasing with size.
struct ChunkLadder {
  int chunk_index = 0;
  double duration_s = 0.0;
  std::vector<Encoding> encodings;
};

enum class LadderPolicy { reject, drop_dominated };

/// Checks ladder invariants. Under reject, any violation throws; under
/// drop_dominated, every encoding dominated by a strictly smaller one with
/// >= ssim is removed before the remaining list is validated.
ChunkLadder validate_ladder(const ChunkLadder& raw, LadderPolicy policy);

/// Per-format long-term means, in the utility convention named by `kind`.
struct AverageLadder {
  UtilityKind kind = UtilityKind::ssim_db;
  std::vector<double> mean_size_bytes;  // strictly increasing
  std::vector<double> mean_utility;     // nondecreasing
};

/// Position-wise arithmetic means over a chunk corpus. Utilities are taken
/// per `kind` before averaging. All chunks must share one format count.
AverageLadder average_ladder(std::span<const ChunkLadder> chunks, UtilityKind kind,
                             double db_cap = kDefaultDbCap);

/// Piecewise-constant bandwidth over time; the last segment extends forever.
struct ThroughputTrace {
  struct Segment {
    double start_s;
    double bytes_per_sec;
  };
  std::vector<Segment> segments;
};

/// Throws unless start times strictly increase from 0 and bandwidths are positive.
void validate_trace(const ThroughputTrace& trace);

/// Synthetic ladder corpus. Per-chunk quality moves around a fixed base curve
/// while sizes stay pinned to the base, so quality and size decouple across
/// chunks the way varying content decouples them.
struct LadderGenConfig {
  int formats = 10;
  int chunks = 1;
  std::vector<double> base_sizes;     // strictly increasing; empty -> geometric default
  double min_ssim_db = 8.0;           // base quality at the smallest format
  double max_ssim_db = 17.7;          // base quality at the largest format
  double volatility_db = 0.0;         // half-width of the per-chunk quality jitter
  double chunk_duration_s = 2.002;    // 120 frames at 59.94 fps
  std::uint64_t seed = 0;
};

std::vector<ChunkLadder> gen_ladders(const LadderGenConfig& config);

enum class TracePattern { constant, square, random_walk };

struct TraceGenConfig {
  TracePattern pattern = TracePattern::constant;
  double bytes_per_sec = 1e6;   // constant level / walk start
  double low_bytes_per_sec = 5e5;
  double high_bytes_per_sec = 2e6;  // square wave alternates high, low, high, ...
  double period_s = 10.0;           // segment length for square and random_walk
  int segments = 1;
  double walk_step_db = 1.0;  // random_walk: per-segment bandwidth step, in dB
  std::uint64_t seed = 0;
};

ThroughputTrace gen_trace(const TraceGenConfig& config);

}  // namespace bolasim
