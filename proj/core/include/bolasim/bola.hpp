#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "bolasim/media.hpp"

namespace bolasim {

/// Anchor used for the max-buffer calibration condition: either the largest
/// mean utility observed in the average ladder, or a fixed ceiling such as
/// 1.0 for raw SSIM.
class TopUtility {
 public:
  static TopUtility max_average() { return TopUtility(false, 0.0); }
  static TopUtility max_possible(double value) { return TopUtility(true, value); }

  bool is_max_possible() const noexcept { return is_max_possible_; }
  double value() const noexcept { return value_; }  // meaningful for max_possible

 private:
  TopUtility(bool is_max_possible, double value)
      : is_max_possible_(is_max_possible), value_(value) {}
  bool is_max_possible_;
  double value_;
};

struct CalibrationConfig {
  double min_buffer_s = 3.0;
  double max_buffer_s = 15.0;
  double chunk_duration_s = 2.002;
  UtilityKind utility_kind = UtilityKind::ssim_db;
  TopUtility top_utility = TopUtility::max_average();
};

/// Calibrated control parameters. Only the product gamma*p is ever needed,
/// so it is stored as one value; the duration it was derived with lives in
/// `calibration`.
struct BolaParams {
  double v_coef = 0.0;   // seconds per utility unit, > 0
  double gamma_p = 0.0;  // utility units, sign unconstrained
  UtilityKind utility_kind = UtilityKind::ssim_db;
  CalibrationConfig calibration;
};

/// What to send when every objective is negative and the sender cannot pause.
enum class NegativePolicy { argmax_objective, argmax_utility };

const char* to_string(NegativePolicy policy) noexcept;

enum class DecisionMode { client, server };

const char* to_string(DecisionMode mode) noexcept;

/// Outcome of one decision: download a specific format, or nothing.
class Decision {
 public:
  static Decision send(int format_id) { return Decision(format_id); }
  static Decision no_send() { return Decision(std::nullopt); }

  bool is_send() const noexcept { return format_.has_value(); }
  int format_id() const { return format_.value(); }

  friend bool operator==(const Decision& a, const Decision& b) noexcept {
    return a.format_ == b.format_;
  }

 private:
  explicit Decision(std::optional<int> format) : format_(format) {}
  std::optional<int> format_;
};

/// The two deployed toggle bundles. Individual toggles can be overridden for
/// ablation; the presets expand to:
///   v1 = (ssim_db,  max_average,       argmax_objective)
///   v2 = (ssim_raw, max_possible(1.0), argmax_utility)
struct VersionPreset {
  UtilityKind utility_kind;
  TopUtility top_utility;
  NegativePolicy negative_policy;

  static VersionPreset v1();
  static VersionPreset v2();
};

/// One scored candidate: the (size, utility) pair the objective ranks.
struct Candidate {
  double size_bytes;
  double utility;
};

/// Quality score of an encoding under the chosen convention.
double utility_of(const Encoding& e, UtilityKind kind, double db_cap = kDefaultDbCap);

/// Ladder reduced to the points the decision functions consume, in ladder order.
std::vector<Candidate> candidates_of(const ChunkLadder& ladder, UtilityKind kind,
                                     double db_cap = kDefaultDbCap);
std::vector<Candidate> candidates_of(const AverageLadder& avg);

/// Solves the 2x2 system placing the smallest-to-second-smallest switch at
/// min_buffer and the top-utility zero crossing at max_buffer:
///   V * (gamma_p + a)     = min_buffer
///   V * (gamma_p + v_top) = max_buffer
/// where a is the utility intercept of the first crossover. Errors if the
/// average ladder has fewer than two formats, if any format never reaches
/// the objective upper envelope, or if no positive V exists.
BolaParams calibrate(const AverageLadder& avg, const CalibrationConfig& cfg);

/// (V*(v + gamma_p) - q) / size.
double objective(const BolaParams& p, double utility, double size_bytes, double q);

/// Buffer level above which every candidate's objective is negative.
double pause_threshold(const BolaParams& p, std::span<const Candidate> options);
double pause_threshold(const BolaParams& p, const ChunkLadder& ladder);

/// Picks by highest objective when some objective is nonnegative (ties go to
/// the larger size, then the lower format id). Otherwise: client mode sends
/// nothing; server mode falls back per `policy` — argmax objective, or argmax
/// utility with ties to the smaller size.
Decision choose(const BolaParams& p, const ChunkLadder& ladder, double q,
                DecisionMode mode, NegativePolicy policy);

/// Same selection over bare candidates; Decision carries the candidate index.
Decision choose_among(const BolaParams& p, std::span<const Candidate> options,
                      double q, DecisionMode mode, NegativePolicy policy);

/// Piecewise-constant map from buffer level to decision for one ladder.
/// Crossover boundaries belong to the segment on their right (the tie at the
/// crossover goes to the larger size); the pause boundary itself still sends.
class ThresholdProfile {
 public:
  struct Boundary {
    double buffer_s;
    int from_format;
    std::optional<int> to_format;  // empty: the decision becomes NoSend
  };
  struct Segment {
    double lo_s;
    double hi_s;  // +inf on the final segment
    Decision decision;
  };

  /// All decision changes over q in [0, inf), in buffer order, ending with
  /// the switch to NoSend when the pause threshold is nonnegative.
  const std::vector<Boundary>& boundaries() const noexcept { return boundaries_; }

  /// Contiguous cover of [0, inf) implied by the boundaries.
  const std::vector<Segment>& segments() const noexcept { return segments_; }

  /// Pause threshold (max over formats of V*(v_m + gamma_p)); may be negative,
  /// in which case every buffer level maps to NoSend.
  double pause_s() const noexcept { return pause_s_; }

  /// Decision at buffer level q, evaluated from the stored envelope only.
  Decision decision_at(double q) const;

  friend ThresholdProfile threshold_profile(const BolaParams&,
                                            std::span<const Candidate>,
                                            std::span<const int>);

 private:
  ThresholdProfile() = default;
  std::vector<Boundary> boundaries_;
  std::vector<Segment> segments_;
  double pause_s_ = 0.0;
  int first_format_ = -1;  // decision on [0, first boundary); -1 when all NoSend
};

ThresholdProfile threshold_profile(const BolaParams& p, const ChunkLadder& ladder);
ThresholdProfile threshold_profile(const BolaParams& p, const AverageLadder& avg);

/// Brute-force reference: choose(client mode) at every grid point
/// q = 0, step, 2*step, ... <= q_max. Shares no code with the envelope path.
std::vector<std::pair<double, Decision>> decision_sweep_oracle(
    const BolaParams& p, const ChunkLadder& ladder, double q_max, double step);

/// Two candidates sized S and 2S whose utilities sit at -gamma_p + offset and
/// -gamma_p + offset + gap. With offset < gap the larger format wins at q = 0
/// despite doubling the size; with offset > gap it loses.
std::vector<Candidate> near_pause_pair(const BolaParams& p, double offset,
                                       double gap, double base_size_bytes);

}  // namespace bolasim
