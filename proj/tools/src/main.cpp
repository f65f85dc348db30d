#include <cstdint>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "csv.hpp"
#include "digest.hpp"
#include "json17.hpp"
#include "wate/crossfit.hpp"
#include "wate/diagnostics.hpp"
#include "wate/errors.hpp"
#include "wate/rng.hpp"
#include "wate/simlab.hpp"
#include "wate/splines.hpp"
#include "wate/version.hpp"

namespace {

using nlohmann::ordered_json;
using watecli::config_digest;
using watecli::dump_json17;
using watecli::format17;

struct CommonOpts {
  std::string weight = "ate";
  double alpha = 0.05;
  int degree = 3;
  double trunc = 0.04;
  double beta = 2.0;
  std::string mode = "practical";
  std::uint64_t seed = 1;
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--weight", o.weight,
                  "weight spec: ate, att, atc, ato, aten, atb:nu1,nu2, "
                  "smoothtrim:alpha,eps")
      ->capture_default_str();
  cmd->add_option("--alpha", o.alpha, "CI miscoverage level")
      ->capture_default_str();
  cmd->add_option("--degree", o.degree, "spline degree r")
      ->capture_default_str();
  cmd->add_option("--trunc", o.trunc, "spline truncation level eta0")
      ->capture_default_str();
  cmd->add_option("--beta", o.beta,
                  "smoothness lower bound for the basis-size rule")
      ->capture_default_str();
  cmd->add_option("--mode", o.mode, "targeting mode")
      ->check(CLI::IsMember({"practical", "theoretical"}))
      ->capture_default_str();
  cmd->add_option("--seed", o.seed, "master seed")->capture_default_str();
  cmd->add_option("--threads", o.threads, "worker threads (0 = all cores)")
      ->capture_default_str();
}

wate::TargetMode parse_mode(const std::string& mode) {
  return mode == "theoretical" ? wate::TargetMode::theoretical
                               : wate::TargetMode::practical;
}

std::string canonical_config(const std::string& cmd, const CommonOpts& o,
                             const std::string& weight_name,
                             const std::string& extra) {
  std::string s = cmd + ";weight=" + weight_name +
                  ";alpha=" + format17(o.alpha) +
                  ";degree=" + std::to_string(o.degree) +
                  ";trunc=" + format17(o.trunc) + ";beta=" + format17(o.beta) +
                  ";mode=" + o.mode + ";seed=" + std::to_string(o.seed);
  if (!extra.empty()) s += ";" + extra;
  return s;
}

wate::NuisanceFitter make_fitter(const CommonOpts& o) {
  return [o](const wate::Dataset& train) {
    return std::unique_ptr<wate::NuisanceModel>(
        wate::fit_nuisances(train, o.degree, o.trunc, o.beta));
  };
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty())
    std::cout << text;
  else
    watecli::write_file(out_path, text);
}

// ---------------------------------------------------------------- fit ----

struct FitOpts {
  std::string data_path;
  std::string out_path;
  std::string eif_path;
};

int cmd_fit(const FitOpts& f, const CommonOpts& o) {
  const wate::WeightSpec w = wate::WeightSpec::parse(o.weight);
  const wate::Dataset data = watecli::read_dataset_csv(f.data_path);

  wate::CrossfitConfig cfg;
  cfg.seed = o.seed;
  cfg.alpha = o.alpha;
  cfg.eta = o.trunc / 4.0;
  cfg.mode = parse_mode(o.mode);
  const wate::Estimate est =
      wate::cross_fit_estimate(data, w, make_fitter(o), cfg);

  const std::string digest =
      config_digest(canonical_config("fit", o, w.name(), ""));
  ordered_json j;
  j["version"] = std::string(wate::version);
  j["psi"] = est.psi_cf;
  j["sigma2"] = est.sigma2_cf;
  j["ci"] = ordered_json::array({est.ci_lo, est.ci_hi});
  j["alpha"] = est.alpha;
  j["n"] = est.n;
  ordered_json folds = ordered_json::array();
  for (const wate::FoldSummary& fs : est.folds) {
    ordered_json jf;
    jf["t_hat"] = fs.root.t_hat;
    jf["residual"] = fs.root.residual;
    jf["mode"] = fs.root.mode == wate::TargetMode::theoretical ? "theoretical"
                                                               : "practical";
    jf["converged"] = fs.root.converged;
    jf["iterations"] = fs.root.iterations;
    jf["psi_k"] = fs.psi_k;
    jf["m"] = fs.m;
    jf["c_init_hat"] = fs.c_init_hat;
    ordered_json flags = ordered_json::array();
    if (fs.fallback)
      flags.push_back("fallback: " +
                      (fs.flag.empty() ? "targeting failed" : fs.flag));
    if (!fs.positivity_ok) flags.push_back("initial-fit-outside-positivity-band");
    if (!fs.root.monotone_ok) flags.push_back("score-not-monotone");
    jf["flags"] = flags;
    folds.push_back(jf);
  }
  j["folds"] = folds;
  ordered_json top_flags = ordered_json::array();
  if (est.odd_n_weighting) top_flags.push_back("odd-n-fold-weighting");
  j["flags"] = top_flags;
  j["weight"] = w.name();
  j["config_digest"] = digest;
  j["seed"] = est.seed;

  emit(dump_json17(j), f.out_path);
  if (!f.eif_path.empty())
    watecli::write_file(f.eif_path,
                        watecli::eif_csv(est.d_values, digest, est.seed));
  return 0;
}

// ---------------------------------------------------- simulate/coverage ----

struct SimOpts {
  std::string dgp = "smooth-heterogeneous";
  std::vector<std::size_t> sizes{1000};
  std::size_t reps = 100;
  std::string out_prefix;
};

ordered_json summary_json(const std::string& dgp_name,
                          const std::string& weight_name, std::size_t n,
                          const wate::McResult& res, const std::string& digest,
                          std::uint64_t seed) {
  ordered_json j;
  j["version"] = std::string(wate::version);
  j["dgp"] = dgp_name;
  j["weight"] = weight_name;
  j["n"] = n;
  j["reps"] = res.summary.reps;
  j["psi_star"] = res.summary.psi_star;
  j["bias"] = res.summary.bias;
  j["sd"] = res.summary.sd;
  j["rmse"] = res.summary.rmse;
  j["coverage"] = res.summary.coverage;
  j["mean_ci_length"] = res.summary.mean_ci_length;
  j["failures"] = res.summary.failures;
  j["config_digest"] = digest;
  j["seed"] = seed;
  return j;
}

int cmd_monte_carlo(const char* verb, const SimOpts& s, const CommonOpts& o) {
  const wate::DgpSpec dgp = wate::dgp_by_name(s.dgp);
  const wate::WeightSpec w = wate::WeightSpec::parse(o.weight);
  if (s.out_prefix.empty())
    throw wate::InputError(std::string(verb) + ": --out prefix is required");
  const bool sweep = s.sizes.size() > 1;
  for (std::size_t n : s.sizes) {
    wate::McConfig mc;
    mc.n = n;
    mc.reps = s.reps;
    mc.seed = o.seed;
    mc.threads = o.threads;
    mc.alpha = o.alpha;
    mc.degree = o.degree;
    mc.trunc = o.trunc;
    mc.beta_guess = o.beta;
    mc.mode = parse_mode(o.mode);
    const wate::McResult res = wate::run_replications(dgp, w, mc);
    const std::string digest = config_digest(canonical_config(
        verb, o, w.name(),
        "dgp=" + s.dgp + ";n=" + std::to_string(n) +
            ";reps=" + std::to_string(s.reps)));
    const std::string stem =
        sweep ? s.out_prefix + "_n" + std::to_string(n) : s.out_prefix;
    watecli::write_file(stem + "_rows.csv",
                        watecli::mc_rows_csv(res, digest, o.seed));
    watecli::write_file(
        stem + "_summary.json",
        dump_json17(summary_json(s.dgp, w.name(), n, res, digest, o.seed)));
    std::cout << "n=" << n << " coverage=" << format17(res.summary.coverage)
              << " bias=" << format17(res.summary.bias)
              << " rmse=" << format17(res.summary.rmse)
              << " failures=" << res.summary.failures << "\n";
  }
  return 0;
}

// ----------------------------------------------------------- diagnose ----

struct DiagOpts {
  std::string data_path;
  std::string dgp;
  std::size_t n = 1000;
  std::string out_path;
};

int cmd_diagnose(const DiagOpts& dg, const CommonOpts& o) {
  const wate::WeightSpec w = wate::WeightSpec::parse(o.weight);
  const bool simulated = !dg.dgp.empty();
  if (simulated == !dg.data_path.empty())
    throw wate::InputError("diagnose: pass exactly one of --data or --dgp");

  wate::Dataset data;
  std::unique_ptr<wate::DgpNuisanceModel> truth_model;
  if (simulated) {
    const wate::DgpSpec dgp = wate::dgp_by_name(dg.dgp);
    data = wate::generate(dgp, dg.n, wate::mix_seed(o.seed, 1));
    truth_model = std::make_unique<wate::DgpNuisanceModel>(dgp);
  } else {
    data = watecli::read_dataset_csv(dg.data_path);
  }

  const std::unique_ptr<wate::SplineNuisanceModel> fit =
      wate::fit_nuisances(data, o.degree, o.trunc, o.beta);
  const wate::NuisanceValues u0 = wate::evaluate(*fit, data);
  const double eta = o.trunc / 4.0;

  wate::ConditionalLawOracle oracle;
  wate::NuisanceValues truth_values;
  if (simulated) {
    truth_values = wate::evaluate(*truth_model, data);
    oracle = [&truth_values](std::size_t i) {
      return std::array<double, 4>{
          wate::conditional_pmf(truth_values, i, 0, 0),
          wate::conditional_pmf(truth_values, i, 0, 1),
          wate::conditional_pmf(truth_values, i, 1, 0),
          wate::conditional_pmf(truth_values, i, 1, 1)};
    };
  }
  const wate::BracketReport rep =
      wate::bracket_report(u0, w, eta, simulated ? &oracle : nullptr);

  const std::string digest = config_digest(canonical_config(
      "diagnose", o, w.name(),
      simulated ? "dgp=" + dg.dgp + ";n=" + std::to_string(dg.n) : ""));

  auto yesno = [](bool b) { return b ? "yes" : "no"; };
  std::string table;
  table += "eta              " + format17(rep.eta_used) + "\n";
  table += "c                " + format17(rep.c) + "\n";
  table += "c_init_hat       " + format17(rep.c_init_hat) + "\n";
  table += "t1               " + format17(rep.t1) + "\n";
  table += "t2               " + format17(rep.t2) + "\n";
  table += "delta_init       " + format17(rep.delta_init) + "\n";
  table += "positivity_ok    " + std::string(yesno(rep.positivity_ok)) + "\n";
  table +=
      "square_bound_ok  " + std::string(yesno(rep.square_bound_ok)) + "\n";
  const std::string unavailable = "unavailable (requires simulation truth)";
  table += "mu0              " +
           (rep.mu0 ? format17(*rep.mu0) : unavailable) + "\n";
  table += "tv_gap           " +
           (rep.tv_gap ? format17(*rep.tv_gap) : unavailable) + "\n";
  table += "mu0_ok           " +
           (rep.mu0_ok ? std::string(yesno(*rep.mu0_ok)) : unavailable) + "\n";
  table += "tv_ok            " +
           (rep.tv_ok ? std::string(yesno(*rep.tv_ok)) : unavailable) + "\n";
  std::cout << table;

  if (!dg.out_path.empty()) {
    ordered_json j;
    j["version"] = std::string(wate::version);
    j["weight"] = w.name();
    j["n"] = data.size();
    j["eta"] = rep.eta_used;
    j["c"] = rep.c;
    j["c_init_hat"] = rep.c_init_hat;
    j["t1"] = rep.t1;
    j["t2"] = rep.t2;
    j["delta_init"] = rep.delta_init;
    j["positivity_ok"] = rep.positivity_ok;
    j["square_bound_ok"] = rep.square_bound_ok;
    j["mu0"] = rep.mu0 ? ordered_json(*rep.mu0) : ordered_json(nullptr);
    j["tv_gap"] = rep.tv_gap ? ordered_json(*rep.tv_gap) : ordered_json(nullptr);
    j["mu0_ok"] = rep.mu0_ok ? ordered_json(*rep.mu0_ok) : ordered_json(nullptr);
    j["tv_ok"] = rep.tv_ok ? ordered_json(*rep.tv_ok) : ordered_json(nullptr);
    j["config_digest"] = digest;
    j["seed"] = o.seed;
    watecli::write_file(dg.out_path, dump_json17(j));
  }
  return 0;
}

// ------------------------------------------------------------ weights ----

int cmd_weights(const std::string& weight_text, double eta) {
  if (weight_text.empty()) {
    std::cout << "ate          lambda(t) = 1\n"
              << "att          lambda(t) = t\n"
              << "atc          lambda(t) = 1 - t\n"
              << "ato          lambda(t) = t (1 - t)\n"
              << "aten         lambda(t) = -t log t - (1-t) log(1-t)\n"
              << "atb:n1,n2    lambda(t) = t^(n1-1) (1-t)^(n2-1), n1, n2 >= 1\n"
              << "smoothtrim:a,e  lambda(t) = Phi_e(1-a-t) Phi_e(t-a)\n";
    return 0;
  }
  const wate::WeightSpec w = wate::WeightSpec::parse(weight_text);
  const wate::LambdaBounds b = wate::lambda_bounds(w, eta);
  const double c = wate::frak_c(b);
  std::cout << "weight       " << w.name() << "\n";
  for (double t : {0.1, 0.25, 0.5, 0.75, 0.9})
    std::cout << "lambda(" << format17(t) << ")  " << format17(wate::lambda_eval(w, t))
              << "\n";
  std::cout << "eta          " << format17(eta) << "\n";
  std::cout << "lambda_min   " << format17(b.lambda_min) << "\n";
  std::cout << "lambda_max   " << format17(b.lambda_max) << "\n";
  std::cout << "d1_max       " << format17(b.d1_max) << "\n";
  std::cout << "d2_max       " << format17(b.d2_max) << "\n";
  std::cout << "d3_max       " << format17(b.d3_max) << "\n";
  std::cout << "c            " << format17(c) << "\n";
  const wate::Constants k = wate::constants(c, std::pow(c, 5));
  std::cout << "t1           " << format17(k.t1) << "\n";
  std::cout << "t2(c^5)      " << format17(k.t2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Cross-fitted one-step targeted estimation of weighted average "
      "treatment effects with spline nuisances"};
  app.set_version_flag("--version", std::string(wate::version));
  app.require_subcommand(1);

  FitOpts fit_opts;
  CommonOpts fit_common;
  CLI::App* fit = app.add_subcommand(
      "fit", "Estimate a weighted effect from a CSV file (header x1..xd,a,y)");
  fit->add_option("data", fit_opts.data_path, "input CSV path")->required();
  add_common(fit, fit_common);
  fit->add_option("--out", fit_opts.out_path,
                  "estimate JSON path (default: stdout)");
  fit->add_option("--eif-csv", fit_opts.eif_path,
                  "also write per-sample influence values to this CSV");

  SimOpts sim_opts;
  CommonOpts sim_common;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Monte Carlo replications of the full pipeline on a DGP");
  simulate->add_option("--dgp", sim_opts.dgp, "DGP name")
      ->capture_default_str();
  simulate
      ->add_option("--n", sim_opts.sizes,
                   "sample size (repeat the flag to sweep)")
      ->capture_default_str();
  simulate->add_option("--reps", sim_opts.reps, "replications")
      ->capture_default_str();
  add_common(simulate, sim_common);
  simulate->add_option("--out", sim_opts.out_prefix,
                       "output prefix for <prefix>_rows.csv and "
                       "<prefix>_summary.json");

  SimOpts cov_opts;
  cov_opts.sizes = {250, 1000};
  CommonOpts cov_common;
  CLI::App* coverage = app.add_subcommand(
      "coverage", "Coverage sweep over sample sizes (same outputs as "
                  "simulate, one pair per n)");
  coverage->add_option("--dgp", cov_opts.dgp, "DGP name")
      ->capture_default_str();
  coverage->add_option("--n", cov_opts.sizes, "sample sizes")
      ->capture_default_str();
  coverage->add_option("--reps", cov_opts.reps, "replications per size")
      ->capture_default_str();
  add_common(coverage, cov_common);
  coverage->add_option("--out", cov_opts.out_prefix, "output prefix");

  DiagOpts diag_opts;
  CommonOpts diag_common;
  CLI::App* diagnose = app.add_subcommand(
      "diagnose",
      "Bracketing-condition diagnostics for a dataset or a catalog DGP");
  diagnose->add_option("--data", diag_opts.data_path, "input CSV path");
  diagnose->add_option("--dgp", diag_opts.dgp,
                       "catalog DGP (enables the truth-only fields)");
  diagnose->add_option("--n", diag_opts.n, "sample size when drawing from a DGP")
      ->capture_default_str();
  add_common(diagnose, diag_common);
  diagnose->add_option("--out", diag_opts.out_path, "report JSON path");

  std::string weights_text;
  double weights_eta = 0.05;
  CLI::App* weights =
      app.add_subcommand("weights", "Inspect the weight-function catalog");
  weights->add_option("--weight", weights_text,
                      "weight spec to describe (default: list the catalog)");
  weights->add_option("--eta", weights_eta, "band margin for the bounds")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*fit) return cmd_fit(fit_opts, fit_common);
    if (*simulate) return cmd_monte_carlo("simulate", sim_opts, sim_common);
    if (*coverage) return cmd_monte_carlo("coverage", cov_opts, cov_common);
    if (*diagnose) return cmd_diagnose(diag_opts, diag_common);
    if (*weights) return cmd_weights(weights_text, weights_eta);
  } catch (const wate::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 1;
  } catch (const wate::Error& e) {
    std::cerr << "estimation error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
