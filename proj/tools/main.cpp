// bolasim: BOLA-BASIC calibration, threshold analysis, and session simulation.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bolasim/baseline.hpp"
#include "bolasim/bola.hpp"
#include "bolasim/io.hpp"
#include "bolasim/media.hpp"
#include "bolasim/sim.hpp"

namespace {

using namespace bolasim;

std::ifstream open_input(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError(path + ": cannot open for reading");
  return is;
}

template <typename WriteFn>
void emit(const std::string& out_path, WriteFn&& write) {
  if (out_path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream os(out_path);
  if (!os) throw ValidationError(out_path + ": cannot open for writing");
  write(os);
  if (!os.flush()) throw ValidationError(out_path + ": write failed");
}

template <typename ReadFn>
auto read_file(const std::string& path, ReadFn&& read) {
  auto is = open_input(path);
  try {
    return read(is);
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

UtilityKind parse_utility_kind(const std::string& s) {
  if (s == "ssim_raw") return UtilityKind::ssim_raw;
  if (s == "ssim_db") return UtilityKind::ssim_db;
  throw ValidationError("unknown utility kind '" + s + "'");
}

NegativePolicy parse_negative_policy(const std::string& s) {
  if (s == "argmax_objective") return NegativePolicy::argmax_objective;
  if (s == "argmax_utility") return NegativePolicy::argmax_utility;
  throw ValidationError("unknown negative policy '" + s + "'");
}

// "max_average", "max_possible" (kind-dependent ceiling), or "max_possible=X".
TopUtility parse_top_utility(const std::string& s, UtilityKind kind) {
  if (s == "max_average") return TopUtility::max_average();
  if (s == "max_possible") {
    return TopUtility::max_possible(kind == UtilityKind::ssim_raw ? 1.0
                                                                  : kDefaultDbCap);
  }
  const std::string prefix = "max_possible=";
  if (s.rfind(prefix, 0) == 0) {
    return TopUtility::max_possible(
        parse_double(s.substr(prefix.size()), "top utility value"));
  }
  throw ValidationError("unknown top utility '" + s + "'");
}

struct PresetFlags {
  std::string version = "v2";
  std::string utility;          // override, optional
  std::string top_utility;      // override, optional
  std::string negative_policy;  // override, optional

  void attach(CLI::App& cmd) {
    cmd.add_option("--version", version, "Toggle preset: v1 or v2")
        ->check(CLI::IsMember({"v1", "v2"}));
    cmd.add_option("--utility", utility, "Override utility kind: ssim_raw|ssim_db");
    cmd.add_option("--top-utility", top_utility,
                   "Override calibration ceiling: max_average|max_possible[=X]");
    cmd.add_option("--negative-policy", negative_policy,
                   "Override all-negative fallback: argmax_objective|argmax_utility");
  }

  VersionPreset resolve() const {
    VersionPreset preset =
        version == "v1" ? VersionPreset::v1() : VersionPreset::v2();
    if (!utility.empty()) preset.utility_kind = parse_utility_kind(utility);
    if (!top_utility.empty()) {
      preset.top_utility = parse_top_utility(top_utility, preset.utility_kind);
    }
    if (!negative_policy.empty()) {
      preset.negative_policy = parse_negative_policy(negative_policy);
    }
    return preset;
  }
};

struct CalibFlags {
  double min_buffer_s = 3.0;
  double max_buffer_s = 15.0;
  double chunk_duration_s = 2.002;

  void attach(CLI::App& cmd) {
    cmd.add_option("--min-buf", min_buffer_s, "Minimum buffer level, seconds");
    cmd.add_option("--max-buf", max_buffer_s, "Maximum buffer level, seconds");
    cmd.add_option("--chunk-duration", chunk_duration_s, "Chunk duration, seconds");
  }

  CalibrationConfig config(const VersionPreset& preset) const {
    CalibrationConfig cfg;
    cfg.min_buffer_s = min_buffer_s;
    cfg.max_buffer_s = max_buffer_s;
    cfg.chunk_duration_s = chunk_duration_s;
    cfg.utility_kind = preset.utility_kind;
    cfg.top_utility = preset.top_utility;
    return cfg;
  }
};

BolaParams calibrate_on_corpus(std::span<const ChunkLadder> ladders,
                               const VersionPreset& preset,
                               const CalibFlags& calib) {
  const AverageLadder avg = average_ladder(ladders, preset.utility_kind);
  const BolaParams params = calibrate(avg, calib.config(preset));
  if (params.gamma_p < 0.0) {
    std::cerr << "note: calibrated gamma_p is negative ("
              << format_double(params.gamma_p) << ")\n";
  }
  return params;
}

DecisionMode parse_mode(const std::string& s) {
  if (s == "client") return DecisionMode::client;
  if (s == "server") return DecisionMode::server;
  throw ValidationError("unknown mode '" + s + "'");
}

SessionConfig session_for_algo(const std::string& algo, DecisionMode mode,
                               double capacity, const CalibFlags& calib,
                               const BbaConfig& bba,
                               std::span<const ChunkLadder> ladders) {
  SessionConfig cfg;
  cfg.label = algo;
  cfg.mode = mode;
  cfg.buffer_capacity_s = capacity;
  if (algo == "bba") {
    cfg.algorithm = bba;
  } else if (algo == "bola-v1" || algo == "bola-v2") {
    const VersionPreset preset =
        algo == "bola-v1" ? VersionPreset::v1() : VersionPreset::v2();
    cfg.algorithm =
        BolaAlgo{calibrate_on_corpus(ladders, preset, calib), preset.negative_policy};
  } else {
    throw ValidationError("unknown algorithm '" + algo +
                          "' (expected bola-v1, bola-v2, or bba)");
  }
  return cfg;
}

int run(int argc, char** argv) {
  CLI::App app{"BOLA-BASIC with SSIM utility: calibration, thresholds, simulation"};
  app.require_subcommand(1);

  // calibrate
  auto* cal = app.add_subcommand("calibrate",
                                 "Fit V and gamma_p from a ladder corpus");
  std::string cal_ladders, cal_out;
  PresetFlags cal_preset;
  CalibFlags cal_calib;
  cal->add_option("--ladders", cal_ladders, "Ladder CSV")->required();
  cal_preset.attach(*cal);
  cal_calib.attach(*cal);
  cal->add_option("-o,--output", cal_out, "Params JSON path (default stdout)");
  cal->callback([&] {
    const VersionPreset preset = cal_preset.resolve();
    const auto ladders = read_file(cal_ladders, [&](std::istream& is) {
      return read_ladders_csv(is, cal_calib.chunk_duration_s);
    });
    const BolaParams params = calibrate_on_corpus(ladders, preset, cal_calib);
    emit(cal_out, [&](std::ostream& os) {
      write_params_json(os, params, preset.negative_policy);
    });
  });

  // thresholds
  auto* th = app.add_subcommand("thresholds",
                                "Per-chunk decision boundaries for a corpus");
  std::string th_ladders, th_params, th_out;
  th->add_option("--ladders", th_ladders, "Ladder CSV")->required();
  th->add_option("--params", th_params, "Params JSON")->required();
  th->add_option("-o,--output", th_out, "Thresholds CSV path (default stdout)");
  th->callback([&] {
    const LoadedParams loaded =
        read_file(th_params, [](std::istream& is) { return read_params_json(is); });
    const auto ladders = read_file(th_ladders, [&](std::istream& is) {
      return read_ladders_csv(is, loaded.params.calibration.chunk_duration_s);
    });
    std::vector<ThresholdRow> rows;
    for (const ChunkLadder& lad : ladders) {
      const auto profile = threshold_profile(loaded.params, lad);
      const auto chunk_rows = threshold_rows(
          lad.chunk_index, profile, loaded.params.calibration.max_buffer_s);
      rows.insert(rows.end(), chunk_rows.begin(), chunk_rows.end());
    }
    emit(th_out, [&](std::ostream& os) { write_thresholds_csv(os, rows); });
  });

  // decide
  auto* de = app.add_subcommand("decide", "One decision at a given buffer level");
  std::string de_ladders, de_params, de_mode = "client";
  std::string de_policy;
  int de_chunk = 0;
  double de_buffer = 0.0;
  de->add_option("--ladders", de_ladders, "Ladder CSV")->required();
  de->add_option("--params", de_params, "Params JSON")->required();
  de->add_option("--chunk", de_chunk, "Chunk index within the corpus");
  de->add_option("--buffer", de_buffer, "Buffer level, seconds")->required();
  de->add_option("--mode", de_mode, "client or server")
      ->check(CLI::IsMember({"client", "server"}));
  de->add_option("--negative-policy", de_policy,
                 "Override the stored all-negative fallback");
  de->callback([&] {
    const LoadedParams loaded =
        read_file(de_params, [](std::istream& is) { return read_params_json(is); });
    const auto ladders = read_file(de_ladders, [&](std::istream& is) {
      return read_ladders_csv(is, loaded.params.calibration.chunk_duration_s);
    });
    const ChunkLadder* target = nullptr;
    for (const ChunkLadder& lad : ladders) {
      if (lad.chunk_index == de_chunk) target = &lad;
    }
    if (target == nullptr) {
      throw ValidationError("chunk " + std::to_string(de_chunk) +
                            " not present in " + de_ladders);
    }
    const NegativePolicy policy = de_policy.empty()
                                      ? loaded.negative_policy
                                      : parse_negative_policy(de_policy);
    const Decision d =
        choose(loaded.params, *target, de_buffer, parse_mode(de_mode), policy);
    if (d.is_send()) {
      std::cout << "Send " << d.format_id() << "\n";
    } else {
      std::cout << "NoSend\n";
    }
  });

  // simulate
  auto* si = app.add_subcommand("simulate", "Run one session over a trace");
  std::string si_ladders, si_trace, si_algo, si_mode = "client";
  std::string si_out, si_decisions;
  double si_capacity = 15.0;
  CalibFlags si_calib;
  BbaConfig si_bba;
  si->add_option("--ladders", si_ladders, "Ladder CSV")->required();
  si->add_option("--trace", si_trace, "Trace CSV")->required();
  si->add_option("--algo", si_algo, "bola-v1, bola-v2, or bba")->required();
  si->add_option("--mode", si_mode, "client or server")
      ->check(CLI::IsMember({"client", "server"}));
  si->add_option("--buffer-capacity", si_capacity, "Client buffer capacity, seconds");
  si_calib.attach(*si);
  si->add_option("--reservoir", si_bba.reservoir_s, "bba reservoir, seconds");
  si->add_option("--cushion", si_bba.cushion_s, "bba cushion, seconds");
  si->add_option("-o,--output", si_out, "Summary JSON path (default stdout)");
  si->add_option("--decisions", si_decisions, "Optional per-chunk decision CSV");
  si->callback([&] {
    const auto ladders = read_file(si_ladders, [&](std::istream& is) {
      return read_ladders_csv(is, si_calib.chunk_duration_s);
    });
    const auto trace = read_file(
        si_trace, [](std::istream& is) { return read_trace_csv(is); });
    const SessionConfig cfg = session_for_algo(
        si_algo, parse_mode(si_mode), si_capacity, si_calib, si_bba, ladders);
    const SimReport report = simulate(cfg, ladders, trace);
    const SimSummary summary = summarize(report);
    emit(si_out, [&](std::ostream& os) { write_summary_json(os, summary); });
    if (!si_decisions.empty()) {
      const auto rows = decision_rows(report);
      emit(si_decisions, [&](std::ostream& os) { write_decisions_csv(os, rows); });
    }
  });

  // compare
  auto* co = app.add_subcommand("compare",
                                "Summaries of several algorithms on one input");
  std::string co_ladders, co_trace, co_mode = "client", co_out;
  std::vector<std::string> co_algos;
  double co_capacity = 15.0;
  CalibFlags co_calib;
  BbaConfig co_bba;
  co->add_option("--ladders", co_ladders, "Ladder CSV")->required();
  co->add_option("--trace", co_trace, "Trace CSV")->required();
  co->add_option("--algos", co_algos, "Comma-separated algorithms")
      ->required()
      ->delimiter(',');
  co->add_option("--mode", co_mode, "client or server")
      ->check(CLI::IsMember({"client", "server"}));
  co->add_option("--buffer-capacity", co_capacity, "Client buffer capacity, seconds");
  co_calib.attach(*co);
  co->add_option("--reservoir", co_bba.reservoir_s, "bba reservoir, seconds");
  co->add_option("--cushion", co_bba.cushion_s, "bba cushion, seconds");
  co->add_option("-o,--output", co_out, "Comparison CSV path (default stdout)");
  co->callback([&] {
    const auto ladders = read_file(co_ladders, [&](std::istream& is) {
      return read_ladders_csv(is, co_calib.chunk_duration_s);
    });
    const auto trace = read_file(
        co_trace, [](std::istream& is) { return read_trace_csv(is); });
    std::vector<SessionConfig> cfgs;
    cfgs.reserve(co_algos.size());
    for (const std::string& algo : co_algos) {
      cfgs.push_back(session_for_algo(algo, parse_mode(co_mode), co_capacity,
                                      co_calib, co_bba, ladders));
    }
    const auto rows = compare(cfgs, ladders, trace);
    emit(co_out, [&](std::ostream& os) { write_compare_csv(os, rows); });
  });

  // gen-ladders
  auto* gl = app.add_subcommand("gen-ladders", "Seeded synthetic ladder corpus");
  LadderGenConfig gl_cfg;
  std::string gl_out;
  std::vector<double> gl_sizes;
  gl->add_option("--chunks", gl_cfg.chunks, "Number of chunks")->required();
  gl->add_option("--formats", gl_cfg.formats, "Formats per chunk");
  gl->add_option("--seed", gl_cfg.seed, "RNG seed");
  gl->add_option("--volatility", gl_cfg.volatility_db,
                 "Per-chunk quality jitter half-width, dB");
  gl->add_option("--min-db", gl_cfg.min_ssim_db, "Base quality at the smallest format");
  gl->add_option("--max-db", gl_cfg.max_ssim_db, "Base quality at the largest format");
  gl->add_option("--base-sizes", gl_sizes, "Comma-separated sizes, bytes")
      ->delimiter(',');
  gl->add_option("-o,--output", gl_out, "Ladder CSV path (default stdout)");
  gl->callback([&] {
    gl_cfg.base_sizes = gl_sizes;
    const auto ladders = gen_ladders(gl_cfg);
    emit(gl_out, [&](std::ostream& os) { write_ladders_csv(os, ladders); });
  });

  // gen-trace
  auto* gt = app.add_subcommand("gen-trace", "Seeded synthetic throughput trace");
  TraceGenConfig gt_cfg;
  std::string gt_pattern = "constant", gt_out;
  gt->add_option("--pattern", gt_pattern, "constant, square, or walk")
      ->check(CLI::IsMember({"constant", "square", "walk"}));
  gt->add_option("--bw", gt_cfg.bytes_per_sec, "Bandwidth, bytes/s");
  gt->add_option("--low", gt_cfg.low_bytes_per_sec, "Square-wave low, bytes/s");
  gt->add_option("--high", gt_cfg.high_bytes_per_sec, "Square-wave high, bytes/s");
  gt->add_option("--period", gt_cfg.period_s, "Segment length, seconds");
  gt->add_option("--segments", gt_cfg.segments, "Segment count");
  gt->add_option("--walk-step-db", gt_cfg.walk_step_db,
                 "Random-walk step half-width, dB");
  gt->add_option("--seed", gt_cfg.seed, "RNG seed");
  gt->add_option("-o,--output", gt_out, "Trace CSV path (default stdout)");
  gt->callback([&] {
    if (gt_pattern == "constant") {
      gt_cfg.pattern = TracePattern::constant;
      gt_cfg.segments = 1;
    } else if (gt_pattern == "square") {
      gt_cfg.pattern = TracePattern::square;
    } else {
      gt_cfg.pattern = TracePattern::random_walk;
    }
    const auto trace = gen_trace(gt_cfg);
    emit(gt_out, [&](std::ostream& os) { write_trace_csv(os, trace); });
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // help exits 0, any usage problem exits 2
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const bolasim::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}
