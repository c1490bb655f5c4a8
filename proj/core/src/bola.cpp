#include "bolasim/bola.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace bolasim {

namespace {

void check(bool ok, const char* msg) {
  if (!ok) throw ValidationError(msg);
}

void check(bool ok, const std::string& msg) {
  if (!ok) throw ValidationError(msg);
}

// Buffer level where the objective lines of two candidates intersect.
// Homogeneous of degree 0 in a uniform size rescale.
double crossover_q(const Candidate& a, double line_a, const Candidate& b,
                   double line_b) {
  return (b.size_bytes * line_a - a.size_bytes * line_b) /
         (b.size_bytes - a.size_bytes);
}

}  // namespace

const char* to_string(NegativePolicy policy) noexcept {
  return policy == NegativePolicy::argmax_objective ? "argmax_objective"
                                                    : "argmax_utility";
}

const char* to_string(DecisionMode mode) noexcept {
  return mode == DecisionMode::client ? "client" : "server";
}

VersionPreset VersionPreset::v1() {
  return VersionPreset{UtilityKind::ssim_db, TopUtility::max_average(),
                       NegativePolicy::argmax_objective};
}

VersionPreset VersionPreset::v2() {
  return VersionPreset{UtilityKind::ssim_raw, TopUtility::max_possible(1.0),
                       NegativePolicy::argmax_utility};
}

double utility_of(const Encoding& e, UtilityKind kind, double db_cap) {
  return kind == UtilityKind::ssim_raw ? e.ssim.value()
                                       : ssim_to_db(e.ssim, db_cap).value();
}

std::vector<Candidate> candidates_of(const ChunkLadder& ladder, UtilityKind kind,
                                     double db_cap) {
  std::vector<Candidate> out;
  out.reserve(ladder.encodings.size());
  for (const Encoding& e : ladder.encodings) {
    out.push_back(Candidate{e.size_bytes, utility_of(e, kind, db_cap)});
  }
  return out;
}

std::vector<Candidate> candidates_of(const AverageLadder& avg) {
  std::vector<Candidate> out;
  out.reserve(avg.mean_size_bytes.size());
  for (std::size_t i = 0; i < avg.mean_size_bytes.size(); ++i) {
    out.push_back(Candidate{avg.mean_size_bytes[i], avg.mean_utility[i]});
  }
  return out;
}

BolaParams calibrate(const AverageLadder& avg, const CalibrationConfig& cfg) {
  check(cfg.min_buffer_s > 0.0 && cfg.min_buffer_s < cfg.max_buffer_s,
        "calibrate: need 0 < min_buffer < max_buffer");
  check(cfg.chunk_duration_s > 0.0, "calibrate: chunk duration must be positive");
  check(avg.kind == cfg.utility_kind,
        std::string("calibrate: average ladder is in ") + to_string(avg.kind) +
            " but the config asks for " + to_string(cfg.utility_kind));

  const std::size_t m = avg.mean_size_bytes.size();
  check(m == avg.mean_utility.size(), "calibrate: size/utility count mismatch");
  check(m >= 2, "calibrate: need at least 2 formats");
  for (std::size_t i = 1; i < m; ++i) {
    check(avg.mean_size_bytes[i] > avg.mean_size_bytes[i - 1],
          "calibrate: mean sizes not strictly increasing at format " +
              std::to_string(i));
    check(avg.mean_utility[i] >= avg.mean_utility[i - 1],
          "calibrate: mean utilities decrease at format " + std::to_string(i));
  }

  // Utility intercepts of consecutive crossovers. The crossover of formats
  // i and i+1 sits at V*(gamma_p + a[i]), so envelope membership is decided
  // by the a ordering alone, before V and gamma_p exist.
  std::vector<double> a(m - 1);
  for (std::size_t i = 0; i + 1 < m; ++i) {
    const double s0 = avg.mean_size_bytes[i];
    const double s1 = avg.mean_size_bytes[i + 1];
    const double v0 = avg.mean_utility[i];
    const double v1 = avg.mean_utility[i + 1];
    a[i] = (s1 * v0 - s0 * v1) / (s1 - s0);
  }
  for (std::size_t i = 1; i + 1 < m; ++i) {
    check(a[i] > a[i - 1],
          "calibrate: average format " + std::to_string(i) +
              " never reaches the objective upper envelope");
  }
  check(a[m - 2] < avg.mean_utility[m - 1],
        "calibrate: average format " + std::to_string(m - 1) +
            " never reaches the objective upper envelope");

  const double v_top = cfg.top_utility.is_max_possible()
                           ? cfg.top_utility.value()
                           : *std::max_element(avg.mean_utility.begin(),
                                               avg.mean_utility.end());
  check(v_top > a[0],
        "calibrate: top utility " + std::to_string(v_top) +
            " does not exceed the first crossover intercept " +
            std::to_string(a[0]) + "; no positive V exists");

  BolaParams params;
  params.v_coef = (cfg.max_buffer_s - cfg.min_buffer_s) / (v_top - a[0]);
  params.gamma_p = cfg.min_buffer_s / params.v_coef - a[0];
  params.utility_kind = cfg.utility_kind;
  params.calibration = cfg;
  return params;
}

double objective(const BolaParams& p, double utility, double size_bytes, double q) {
  return (p.v_coef * (utility + p.gamma_p) - q) / size_bytes;
}

double pause_threshold(const BolaParams& p, std::span<const Candidate> options) {
  check(!options.empty(), "pause_threshold: no candidates");
  double best = -std::numeric_limits<double>::infinity();
  for (const Candidate& c : options) {
    best = std::max(best, p.v_coef * (c.utility + p.gamma_p));
  }
  return best;
}

double pause_threshold(const BolaParams& p, const ChunkLadder& ladder) {
  const auto options = candidates_of(ladder, p.utility_kind);
  return pause_threshold(p, options);
}

namespace {

// Allocation-free selection shared by the ladder and candidate entry points;
// the sweep oracle calls this once per grid point.
template <typename SizeAt, typename UtilityAt>
std::size_t choose_index(const BolaParams& p, std::size_t count, double q,
                         DecisionMode mode, NegativePolicy policy, bool& is_send,
                         SizeAt&& size_at, UtilityAt&& utility_at) {
  std::size_t best = 0;
  std::size_t best_u = 0;
  double best_obj = -std::numeric_limits<double>::infinity();
  double best_utility = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < count; ++i) {
    const double utility = utility_at(i);
    const double obj = objective(p, utility, size_at(i), q);
    if (obj >= best_obj) {  // tie goes to the larger size
      best = i;
      best_obj = obj;
    }
    if (utility > best_utility) {  // tie goes to the smaller size
      best_u = i;
      best_utility = utility;
    }
  }
  is_send = true;
  if (best_obj >= 0.0) return best;
  if (mode == DecisionMode::client) {
    is_send = false;
    return 0;
  }
  return policy == NegativePolicy::argmax_objective ? best : best_u;
}

}  // namespace

Decision choose_among(const BolaParams& p, std::span<const Candidate> options,
                      double q, DecisionMode mode, NegativePolicy policy) {
  check(!options.empty(), "choose: no candidates");
  check(q >= 0.0, "choose: buffer level must be >= 0");
  bool is_send = false;
  const std::size_t idx = choose_index(
      p, options.size(), q, mode, policy, is_send,
      [&](std::size_t i) { return options[i].size_bytes; },
      [&](std::size_t i) { return options[i].utility; });
  return is_send ? Decision::send(static_cast<int>(idx)) : Decision::no_send();
}

Decision choose(const BolaParams& p, const ChunkLadder& ladder, double q,
                DecisionMode mode, NegativePolicy policy) {
  check(!ladder.encodings.empty(), "choose: no candidates");
  check(q >= 0.0, "choose: buffer level must be >= 0");
  bool is_send = false;
  const std::size_t idx = choose_index(
      p, ladder.encodings.size(), q, mode, policy, is_send,
      [&](std::size_t i) { return ladder.encodings[i].size_bytes; },
      [&](std::size_t i) { return utility_of(ladder.encodings[i], p.utility_kind); });
  return is_send ? Decision::send(ladder.encodings[idx].format_id)
                 : Decision::no_send();
}

Decision ThresholdProfile::decision_at(double q) const {
  if (q > pause_s_) return Decision::no_send();
  if (first_format_ < 0) return Decision::no_send();
  int format = first_format_;
  for (const Boundary& b : boundaries_) {
    if (!b.to_format.has_value()) continue;  // the pause boundary changes nothing here
    if (b.buffer_s <= q) {
      format = *b.to_format;
    } else {
      break;
    }
  }
  return Decision::send(format);
}

ThresholdProfile threshold_profile(const BolaParams& p,
                                   std::span<const Candidate> options,
                                   std::span<const int> format_ids) {
  check(!options.empty(), "threshold_profile: no candidates");
  check(options.size() == format_ids.size(),
        "threshold_profile: candidate/id count mismatch");

  const std::size_t m = options.size();
  std::vector<double> line(m);  // V*(v_i + gamma_p): the objective's zero crossing
  for (std::size_t i = 0; i < m; ++i) {
    line[i] = p.v_coef * (options[i].utility + p.gamma_p);
  }

  // Within a group of exactly equal utilities only the smallest size can win
  // a buffer interval, so the envelope is built over group representatives.
  std::vector<std::size_t> reps;
  for (std::size_t i = 0; i < m; ++i) {
    if (i == 0 || options[i].utility != options[reps.back()].utility) {
      reps.push_back(i);
    }
  }

  // Upper envelope of (line[i] - q)/size_i over increasing sizes: the classic
  // monotone hull over lines sorted by slope.
  std::vector<std::size_t> hull;
  std::vector<double> takeover;  // takeover[k]: q where hull[k] overtakes hull[k-1]
  for (const std::size_t i : reps) {
    double x = -std::numeric_limits<double>::infinity();
    while (!hull.empty()) {
      x = crossover_q(options[hull.back()], line[hull.back()], options[i], line[i]);
      if (hull.size() >= 2 && x <= takeover.back()) {
        hull.pop_back();
        takeover.pop_back();
        continue;
      }
      break;
    }
    hull.push_back(i);
    takeover.push_back(x);
  }

  ThresholdProfile profile;
  profile.pause_s_ = line[reps.back()];  // utilities nondecreasing: top group

  if (profile.pause_s_ < 0.0) {
    // Every objective is negative at every reachable buffer level.
    profile.segments_.push_back(
        {0.0, std::numeric_limits<double>::infinity(), Decision::no_send()});
    return profile;
  }

  // Drop takeovers at q <= 0; the winner at q = 0 is whatever remains first.
  std::size_t start = 0;
  while (start + 1 < hull.size() && takeover[start + 1] <= 0.0) ++start;
  profile.first_format_ = format_ids[hull[start]];

  for (std::size_t k = start + 1; k < hull.size(); ++k) {
    profile.boundaries_.push_back(ThresholdProfile::Boundary{
        takeover[k], format_ids[hull[k - 1]], format_ids[hull[k]]});
  }
  // At exactly the pause level every top-group objective is zero and the tie
  // goes to the largest size, which owns just that single point.
  if (reps.back() != m - 1) {
    profile.boundaries_.push_back(ThresholdProfile::Boundary{
        profile.pause_s_, format_ids[hull.back()], format_ids[m - 1]});
  }
  profile.boundaries_.push_back(ThresholdProfile::Boundary{
      profile.pause_s_, format_ids[m - 1], std::nullopt});

  double lo = 0.0;
  int current = profile.first_format_;
  for (const auto& b : profile.boundaries_) {
    if (!b.to_format.has_value()) break;
    profile.segments_.push_back({lo, b.buffer_s, Decision::send(current)});
    lo = b.buffer_s;
    current = *b.to_format;
  }
  profile.segments_.push_back({lo, profile.pause_s_, Decision::send(current)});
  profile.segments_.push_back({profile.pause_s_,
                               std::numeric_limits<double>::infinity(),
                               Decision::no_send()});
  return profile;
}

ThresholdProfile threshold_profile(const BolaParams& p, const ChunkLadder& ladder) {
  const auto options = candidates_of(ladder, p.utility_kind);
  std::vector<int> ids;
  ids.reserve(ladder.encodings.size());
  for (const Encoding& e : ladder.encodings) ids.push_back(e.format_id);
  return threshold_profile(p, options, ids);
}

ThresholdProfile threshold_profile(const BolaParams& p, const AverageLadder& avg) {
  const auto options = candidates_of(avg);
  std::vector<int> ids(options.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int>(i);
  return threshold_profile(p, options, ids);
}

std::vector<std::pair<double, Decision>> decision_sweep_oracle(
    const BolaParams& p, const ChunkLadder& ladder, double q_max, double step) {
  check(step > 0.0, "decision_sweep_oracle: step must be positive");
  check(q_max >= 0.0, "decision_sweep_oracle: q_max must be >= 0");

  std::vector<std::pair<double, Decision>> out;
  out.reserve(static_cast<std::size_t>(q_max / step) + 1);
  for (std::size_t i = 0;; ++i) {
    const double q = static_cast<double>(i) * step;
    if (q > q_max) break;
    out.emplace_back(
        q, choose(p, ladder, q, DecisionMode::client, NegativePolicy::argmax_objective));
  }
  return out;
}

std::vector<Candidate> near_pause_pair(const BolaParams& p, double offset,
                                       double gap, double base_size_bytes) {
  check(base_size_bytes > 0.0, "near_pause_pair: base size must be positive");
  check(gap >= 0.0, "near_pause_pair: utility gap must be >= 0");
  const double low = -p.gamma_p + offset;
  return {Candidate{base_size_bytes, low},
          Candidate{2.0 * base_size_bytes, low + gap}};
}

}  // namespace bolasim
