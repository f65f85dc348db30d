// End-to-end process tests for the command-line front end. The binary path
// arrives in the WATE_CLI environment variable; every invocation runs in a
// fresh scratch directory and asserts on exit codes, streams, and files.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "wate/crossfit.hpp"
#include "wate/model.hpp"
#include "wate/simlab.hpp"
#include "wate/splines.hpp"
#include "wate/weights.hpp"

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(static_cast<bool>(in), "missing file: " << path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool file_exists(const std::string& path) {
  return static_cast<bool>(std::ifstream(path));
}

const std::string& cli_path() {
  static const std::string path = [] {
    const char* env = std::getenv("WATE_CLI");
    REQUIRE_MESSAGE(env != nullptr,
                    "WATE_CLI must point at the command-line binary");
    return std::string(env);
  }();
  return path;
}

const std::string& scratch_dir() {
  static const std::string dir = [] {
    char tmpl[] = "/tmp/wate-cli-XXXXXX";
    const char* made = mkdtemp(tmpl);
    REQUIRE_MESSAGE(made != nullptr, "mkdtemp failed");
    return std::string(made);
  }();
  return dir;
}

int run_counter = 0;

RunResult run(const std::string& args) {
  RunResult r;
  const std::string stem = scratch_dir() + "/run" + std::to_string(run_counter++);
  const std::string cmd =
      cli_path() + " " + args + " > " + stem + ".out 2> " + stem + ".err";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_file(stem + ".out");
  r.err = read_file(stem + ".err");
  return r;
}

std::string write_dataset_csv(const wate::Dataset& data,
                              const std::string& name) {
  const std::string path = scratch_dir() + "/" + name;
  std::ofstream out(path);
  out << "x1,a,y\n";
  char buf[64];
  for (const wate::Sample& s : data.samples) {
    std::snprintf(buf, sizeof buf, "%.17g", s.x[0]);
    out << buf << "," << s.a << "," << s.y << "\n";
  }
  REQUIRE(static_cast<bool>(out));
  return path;
}

const std::string& sample_csv() {
  static const std::string path = write_dataset_csv(
      wate::generate(wate::dgp_null_effect(), 60, 2), "sample.csv");
  return path;
}

bool hex16(const std::string& s) {
  if (s.size() != 16) return false;
  for (char ch : s)
    if (!std::isxdigit(static_cast<unsigned char>(ch)) ||
        std::isupper(static_cast<unsigned char>(ch)))
      return false;
  return true;
}

std::size_t count_lines(const std::string& text) {
  std::size_t n = 0;
  for (char ch : text)
    if (ch == '\n') ++n;
  return n;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("fit: schema, provenance, and in-process agreement") {
  const std::string est_path = scratch_dir() + "/est.json";
  const std::string eif_path = scratch_dir() + "/eif.csv";
  const RunResult r =
      run("fit " + sample_csv() + " --weight ato --seed 4 --out " + est_path +
          " --eif-csv " + eif_path);
  REQUIRE(r.exit_code == 0);
  CHECK(r.err.empty());

  const nlohmann::json j = nlohmann::json::parse(read_file(est_path));
  for (const char* key :
       {"version", "psi", "sigma2", "ci", "alpha", "n", "folds", "flags",
        "weight", "config_digest", "seed"})
    REQUIRE_MESSAGE(j.contains(key), "missing key " << key);
  CHECK(j["version"] == "0.1.0");
  CHECK(j["weight"] == "ato");
  CHECK(j["n"] == 60);
  CHECK(j["seed"] == 4);
  CHECK(j["alpha"] == 0.05);
  CHECK(hex16(j["config_digest"].get<std::string>()));
  REQUIRE(j["ci"].is_array());
  REQUIRE(j["ci"].size() == 2);
  REQUIRE(j["folds"].is_array());
  REQUIRE(j["folds"].size() == 2);
  for (const auto& jf : j["folds"]) {
    for (const char* key : {"t_hat", "residual", "mode", "converged",
                            "iterations", "psi_k", "m", "c_init_hat", "flags"})
      REQUIRE_MESSAGE(jf.contains(key), "missing fold key " << key);
    CHECK(jf["mode"] == "practical");
    CHECK(jf["converged"] == true);
  }

  // 17-digit serialization round-trips exactly: the parsed numbers equal the
  // in-process pipeline bit for bit.
  const wate::Dataset data = wate::generate(wate::dgp_null_effect(), 60, 2);
  wate::CrossfitConfig cfg;
  cfg.seed = 4;
  cfg.eta = 0.01;  // trunc/4 at the default trunc
  const wate::NuisanceFitter fitter = [](const wate::Dataset& train) {
    return std::unique_ptr<wate::NuisanceModel>(
        wate::fit_nuisances(train, 3, 0.04, 2.0));
  };
  const wate::Estimate est =
      wate::cross_fit_estimate(data, wate::WeightSpec::ato(), fitter, cfg);
  CHECK(j["psi"].get<double>() == est.psi_cf);
  CHECK(j["sigma2"].get<double>() == est.sigma2_cf);
  CHECK(j["ci"][0].get<double>() == est.ci_lo);
  CHECK(j["ci"][1].get<double>() == est.ci_hi);

  // The influence CSV carries provenance plus one row per observation.
  const std::string eif = read_file(eif_path);
  CHECK(count_lines(eif) == 62);  // banner + header + 60 rows
  CHECK(eif.rfind("# wate 0.1.0 digest=", 0) == 0);
  CHECK(eif.find("seed=4") != std::string::npos);
  CHECK(eif.find("index,d_full") != std::string::npos);
}

TEST_CASE("fit: identical invocations produce identical bytes") {
  const std::string a = scratch_dir() + "/rerun_a.json";
  const std::string b = scratch_dir() + "/rerun_b.json";
  const std::string args = "fit " + sample_csv() + " --weight aten --seed 11";
  REQUIRE(run(args + " --out " + a).exit_code == 0);
  REQUIRE(run(args + " --out " + b).exit_code == 0);
  CHECK(read_file(a) == read_file(b));
}

TEST_CASE("fit: malformed input is a user error with a line number") {
  const std::string path = scratch_dir() + "/bad.csv";
  {
    std::ofstream out(path);
    out << "x1,a,y\n0.5,1,1\n0.25,2,0\n";
  }
  const RunResult r = run("fit " + path);
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("input error:") != std::string::npos);
  CHECK(r.err.find("line 3") != std::string::npos);
  CHECK(r.err.find("must be 0 or 1") != std::string::npos);

  const RunResult missing = run("fit " + scratch_dir() + "/no-such.csv");
  CHECK(missing.exit_code == 1);
  CHECK(missing.err.find("cannot open") != std::string::npos);
}

TEST_CASE("fit: non-smooth weight requests name the smooth requirement") {
  const RunResult r = run("fit " + sample_csv() + " --weight atm");
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("smooth") != std::string::npos);
}

TEST_CASE("fit: worst-case mode on generic data is an estimation failure") {
  const RunResult r = run("fit " + sample_csv() + " --mode theoretical");
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("estimation error:") != std::string::npos);
  CHECK(r.err.find("both folds") != std::string::npos);
}

TEST_CASE("diagnose: truth-only fields appear exactly when simulating") {
  const std::string sim_path = scratch_dir() + "/diag_sim.json";
  const RunResult sim = run("diagnose --dgp smooth-heterogeneous --n 200 --out " +
                            sim_path);
  REQUIRE(sim.exit_code == 0);
  CHECK(sim.out.find("positivity_ok") != std::string::npos);
  const nlohmann::json js = nlohmann::json::parse(read_file(sim_path));
  CHECK_FALSE(js["mu0"].is_null());
  CHECK_FALSE(js["tv_gap"].is_null());
  CHECK_FALSE(js["mu0_ok"].is_null());
  CHECK_FALSE(js["tv_ok"].is_null());
  CHECK(js["t2"] == js["delta_init"]);

  const std::string data_path = scratch_dir() + "/diag_data.json";
  const RunResult obs =
      run("diagnose --data " + sample_csv() + " --out " + data_path);
  REQUIRE(obs.exit_code == 0);
  CHECK(obs.out.find("unavailable (requires simulation truth)") !=
        std::string::npos);
  const nlohmann::json jo = nlohmann::json::parse(read_file(data_path));
  CHECK(jo["mu0"].is_null());
  CHECK(jo["tv_gap"].is_null());
  CHECK(jo["mu0_ok"].is_null());
  CHECK(jo["tv_ok"].is_null());

  const RunResult both =
      run("diagnose --data " + sample_csv() + " --dgp null-effect");
  CHECK(both.exit_code == 1);
  CHECK(both.err.find("exactly one") != std::string::npos);
}

TEST_CASE("simulate: row files, summary schema, and thread invariance") {
  const std::string pa = scratch_dir() + "/sim_a";
  const RunResult a = run("simulate --dgp null-effect --n 40 --reps 2 --seed 3 "
                          "--threads 1 --out " + pa);
  REQUIRE(a.exit_code == 0);
  CHECK(a.out.find("coverage=") != std::string::npos);

  const std::string rows = read_file(pa + "_rows.csv");
  CHECK(count_lines(rows) == 4);  // banner + header + 2 rows
  CHECK(rows.rfind("# wate 0.1.0 digest=", 0) == 0);
  CHECK(rows.find("rep,failed,psi_hat") != std::string::npos);

  const nlohmann::json js = nlohmann::json::parse(read_file(pa + "_summary.json"));
  for (const char* key :
       {"version", "dgp", "weight", "n", "reps", "psi_star", "bias", "sd",
        "rmse", "coverage", "mean_ci_length", "failures", "config_digest",
        "seed"})
    REQUIRE_MESSAGE(js.contains(key), "missing key " << key);
  CHECK(js["dgp"] == "null-effect");
  CHECK(js["psi_star"] == 0.0);
  CHECK(js["reps"] == 2);
  CHECK(js["failures"] == 0);

  // Worker count changes scheduling only, never bytes.
  const std::string pb = scratch_dir() + "/sim_b";
  const RunResult b = run("simulate --dgp null-effect --n 40 --reps 2 --seed 3 "
                          "--threads 2 --out " + pb);
  REQUIRE(b.exit_code == 0);
  CHECK(read_file(pb + "_rows.csv") == rows);

  const RunResult no_out = run("simulate --dgp null-effect --reps 1");
  CHECK(no_out.exit_code == 1);
  CHECK(no_out.err.find("--out") != std::string::npos);
}

TEST_CASE("coverage: one output pair per sample size") {
  const std::string prefix = scratch_dir() + "/cov";
  const RunResult r = run("coverage --dgp null-effect --n 40 --n 60 --reps 1 "
                          "--seed 5 --threads 1 --out " + prefix);
  REQUIRE(r.exit_code == 0);
  CHECK(file_exists(prefix + "_n40_rows.csv"));
  CHECK(file_exists(prefix + "_n40_summary.json"));
  CHECK(file_exists(prefix + "_n60_rows.csv"));
  CHECK(file_exists(prefix + "_n60_summary.json"));
}

TEST_CASE("weights: catalog listing and band bounds") {
  const RunResult list = run("weights");
  REQUIRE(list.exit_code == 0);
  for (const char* name : {"ate", "att", "atc", "ato", "aten", "atb",
                           "smoothtrim"})
    CHECK_MESSAGE(list.out.find(name) != std::string::npos, name);

  const RunResult ato = run("weights --weight ato --eta 0.1");
  REQUIRE(ato.exit_code == 0);
  CHECK(ato.out.find("lambda_min") != std::string::npos);
  // frak c = 0.1 * (1 - 0.1) evaluated in doubles, printed round-trip exact.
  CHECK(ato.out.find("c            0.090000000000000011") != std::string::npos);

  CHECK(run("weights --weight atm").exit_code == 1);
}

TEST_CASE("version flag and missing subcommand") {
  const RunResult v = run("--version");
  CHECK(v.exit_code == 0);
  CHECK(v.out.find("0.1.0") != std::string::npos);

  CHECK(run("").exit_code == 1);
}

}  // TEST_SUITE
