#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "bolasim/io.hpp"

using namespace bolasim;

namespace {

struct CliResult {
  int exit_code;
  std::string out;
  std::string err;
};

std::string work_dir() {
  static std::string dir = [] {
    char tmpl[] = "/tmp/bolasim_cli_XXXXXX";
    const char* made = mkdtemp(tmpl);
    REQUIRE(made != nullptr);
    return std::string(made);
  }();
  return dir;
}

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  REQUIRE(is.good());
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  REQUIRE(os.good());
  os << text;
}

CliResult run_cli(const std::string& args) {
  const char* bin = std::getenv("BOLASIM_CLI");
  REQUIRE_MESSAGE(bin != nullptr, "BOLASIM_CLI must point at the binary");
  const std::string out_path = work_dir() + "/stdout.txt";
  const std::string err_path = work_dir() + "/stderr.txt";
  const std::string cmd = std::string("\"") + bin + "\" " + args + " > " +
                          out_path + " 2> " + err_path;
  const int status = std::system(cmd.c_str());
  CliResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out_path);
  r.err = slurp(err_path);
  return r;
}

// The 2-format fixture: calibrating it under v2 gives V ~ 94.737 and
// gamma_p ~ -0.84167.
std::string fixture_csv() {
  return "chunk_index,format_id,size_bytes,ssim\n"
         "0,0,1e+06,0.9\n"
         "0,1,4e+06,0.98\n";
}

bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({std::abs(a), std::abs(b), 1.0});
}

}  // namespace

TEST_CASE("calibrate writes params that match the fixture solution") {
  const std::string lad = work_dir() + "/fixture.csv";
  spit(lad, fixture_csv());
  const std::string params = work_dir() + "/params.json";

  const auto r =
      run_cli("calibrate --ladders " + lad + " --version v2 -o " + params);
  CHECK(r.exit_code == 0);
  CHECK(r.err.find("gamma_p is negative") != std::string::npos);

  std::ifstream is(params);
  const LoadedParams loaded = read_params_json(is);
  CHECK(close_rel(loaded.params.v_coef, 94.73684210526316, 1e-9));
  CHECK(close_rel(loaded.params.gamma_p, -0.8416666666666667, 1e-9));
  CHECK(loaded.params.utility_kind == UtilityKind::ssim_raw);
  CHECK(loaded.negative_policy == NegativePolicy::argmax_utility);

  // Same invocation again: byte-identical output.
  const std::string params2 = work_dir() + "/params2.json";
  run_cli("calibrate --ladders " + lad + " --version v2 -o " + params2);
  CHECK(slurp(params) == slurp(params2));
}

TEST_CASE("ablation overrides recreate the other preset's numbers") {
  const std::string lad = work_dir() + "/fixture_ab.csv";
  spit(lad, fixture_csv());
  const std::string params = work_dir() + "/params_ab.json";

  const auto r = run_cli("calibrate --ladders " + lad +
                         " --version v1 --utility ssim_raw"
                         " --top-utility max_possible=1.0 -o " +
                         params);
  CHECK(r.exit_code == 0);

  std::ifstream is(params);
  const LoadedParams loaded = read_params_json(is);
  CHECK(close_rel(loaded.params.v_coef, 94.73684210526316, 1e-9));
  // The un-overridden toggle keeps the v1 policy.
  CHECK(loaded.negative_policy == NegativePolicy::argmax_objective);
}

TEST_CASE("decide prints the decision for a buffer level") {
  const std::string lad = work_dir() + "/fixture_decide.csv";
  spit(lad, fixture_csv());
  const std::string params = work_dir() + "/params_decide.json";
  REQUIRE(run_cli("calibrate --ladders " + lad + " --version v2 -o " + params)
              .exit_code == 0);

  const std::string base =
      "decide --params " + params + " --ladders " + lad + " ";
  CHECK(run_cli(base + "--chunk 0 --buffer 14 --mode client").out == "NoSend\n");
  CHECK(run_cli(base + "--chunk 0 --buffer 14 --mode server").out == "Send 1\n");
  CHECK(run_cli(base + "--chunk 0 --buffer 0 --mode client").out == "Send 0\n");
  CHECK(run_cli(base + "--chunk 0 --buffer 10 --mode client").out == "Send 1\n");

  const auto missing = run_cli(base + "--buffer 1 --chunk 9 --mode client");
  CHECK(missing.exit_code == 1);
  CHECK(missing.err.find("chunk 9") != std::string::npos);
}

TEST_CASE("thresholds emits the per-chunk boundary table") {
  const std::string lad = work_dir() + "/fixture_th.csv";
  spit(lad, fixture_csv());
  const std::string params = work_dir() + "/params_th.json";
  REQUIRE(run_cli("calibrate --ladders " + lad + " --version v2 -o " + params)
              .exit_code == 0);

  const std::string th = work_dir() + "/thresholds.csv";
  const auto r = run_cli("thresholds --ladders " + lad + " --params " + params +
                         " -o " + th);
  CHECK(r.exit_code == 0);

  std::ifstream is(th);
  const auto rows = read_thresholds_csv(is);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].chunk_index == 0);
  CHECK(rows[0].boundary_index == 0);
  CHECK(close_rel(rows[0].buffer_s, 3.0, 1e-9));
  CHECK(rows[0].from_format == 0);
  CHECK(rows[0].to_format == 1);
  CHECK(!rows[0].hypothetical);
  CHECK(close_rel(rows[1].buffer_s, 13.105263157894736, 1e-9));
  CHECK(!rows[1].to_format.has_value());
  CHECK(!rows[1].hypothetical);
}

TEST_CASE("generators are byte-identical for a fixed seed") {
  const std::string a = work_dir() + "/gen_a.csv";
  const std::string b = work_dir() + "/gen_b.csv";
  const std::string gen =
      "gen-ladders --chunks 12 --formats 6 --volatility 2 --seed 7 -o ";
  REQUIRE(run_cli(gen + a).exit_code == 0);
  REQUIRE(run_cli(gen + b).exit_code == 0);
  CHECK(slurp(a) == slurp(b));

  const std::string ta = work_dir() + "/trace_a.csv";
  const std::string tb = work_dir() + "/trace_b.csv";
  const std::string gent =
      "gen-trace --pattern walk --segments 30 --period 5 --seed 3 -o ";
  REQUIRE(run_cli(gent + ta).exit_code == 0);
  REQUIRE(run_cli(gent + tb).exit_code == 0);
  CHECK(slurp(ta) == slurp(tb));

  // Emitted corpus parses back through the library readers.
  std::ifstream lis(a);
  CHECK(read_ladders_csv(lis, 2.002).size() == 12);
  std::ifstream tis(ta);
  CHECK(read_trace_csv(tis).segments.size() == 30);
}

TEST_CASE("simulate and compare produce parseable, stable artifacts") {
  const std::string lad = work_dir() + "/sim_ladders.csv";
  const std::string tr = work_dir() + "/sim_trace.csv";
  REQUIRE(run_cli("gen-ladders --chunks 40 --formats 8 --volatility 2 --seed 5 -o " +
                  lad)
              .exit_code == 0);
  REQUIRE(run_cli("gen-trace --pattern square --high 1.2e6 --low 2.5e5 "
                  "--period 15 --segments 40 -o " +
                  tr)
              .exit_code == 0);

  const std::string sum = work_dir() + "/summary.json";
  const std::string dec = work_dir() + "/decisions.csv";
  const auto r = run_cli("simulate --ladders " + lad + " --trace " + tr +
                         " --algo bola-v2 -o " + sum + " --decisions " + dec);
  CHECK(r.exit_code == 0);

  std::ifstream sis(sum);
  const SimSummary s = read_summary_json(sis);
  CHECK(s.algo == "bola-v2");
  CHECK(s.chunks == 40);
  CHECK(s.stall_ratio >= 0.0);
  CHECK(s.stall_ratio < 1.0);

  std::ifstream dis(dec);
  CHECK(read_decisions_csv(dis).size() == 40);

  const std::string sum2 = work_dir() + "/summary2.json";
  REQUIRE(run_cli("simulate --ladders " + lad + " --trace " + tr +
                  " --algo bola-v2 -o " + sum2)
              .exit_code == 0);
  CHECK(slurp(sum) == slurp(sum2));

  const std::string cmp = work_dir() + "/table.csv";
  const auto rc = run_cli("compare --ladders " + lad + " --trace " + tr +
                          " --algos bola-v1,bola-v2,bba --mode server -o " + cmp);
  CHECK(rc.exit_code == 0);
  std::ifstream cis(cmp);
  const auto rows = read_compare_csv(cis);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].algo == "bola-v1");
  CHECK(rows[1].algo == "bola-v2");
  CHECK(rows[2].algo == "bba");
  CHECK(rows[0].chunks == rows[1].chunks);
  CHECK(rows[1].chunks == rows[2].chunks);
}

TEST_CASE("exit codes distinguish validation from usage errors") {
  CHECK(run_cli("").exit_code == 2);
  CHECK(run_cli("frobnicate").exit_code == 2);
  CHECK(run_cli("calibrate --no-such-flag x").exit_code == 2);
  CHECK(run_cli("--help").exit_code == 0);
  CHECK(run_cli("simulate --ladders a --trace b").exit_code == 2);  // missing --algo

  const auto missing =
      run_cli("calibrate --ladders /nonexistent.csv --version v2");
  CHECK(missing.exit_code == 1);
  CHECK(missing.err.find("/nonexistent.csv") != std::string::npos);

  const std::string bad = work_dir() + "/bad.csv";
  spit(bad, "chunk_index,format_id,size_bytes,ssim\n0,0,1e6,0.9\n0,1,oops,0.95\n");
  const auto parse_err = run_cli("calibrate --ladders " + bad + " --version v2");
  CHECK(parse_err.exit_code == 1);
  CHECK(parse_err.err.find("line 3") != std::string::npos);
  CHECK(parse_err.err.find(bad) != std::string::npos);

  const auto bad_algo = run_cli("gen-trace --pattern nonsense");
  CHECK(bad_algo.exit_code == 2);
}
