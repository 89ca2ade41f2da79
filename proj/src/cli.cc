// src/cli.cc

// Copyright 2026  The wcfa Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "wcfa/cli.h"

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include "json.hpp"

#include "wcfa/errors.h"
#include "wcfa/estimator.h"
#include "wcfa/fa_curve.h"
#include "wcfa/loc_scale.h"
#include "wcfa/model_artifact.h"
#include "wcfa/synthetic.h"
#include "wcfa/training.h"

namespace wcfa {

namespace {

struct Common {
  int threads = 0;
  std::uint64_t seed = 0;
};

void add_common(CLI::App *cmd, Common &c) {
  cmd->add_option("--threads", c.threads, "Worker threads (0: all cores)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--seed", c.seed, "Master random seed")->capture_default_str();
}

struct CurveOpts {
  std::vector<std::int64_t> n_grid;
  std::vector<double> taus;
  std::int64_t trials = 1000;
  double ci_level = 0.99;
  int resamples = 1000;
  std::string out;
  std::string plot;
};

void add_curve_options(CLI::App *cmd, CurveOpts &o, bool out_required) {
  cmd->add_option("--n-grid", o.n_grid, "Impostor counts, comma separated")
      ->delimiter(',')->required();
  cmd->add_option("--tau", o.taus, "Thresholds, comma separated")->delimiter(',')->required();
  cmd->add_option("--trials", o.trials, "Monte-Carlo trials")->capture_default_str();
  cmd->add_option("--ci-level", o.ci_level, "Confidence level")->capture_default_str();
  cmd->add_option("--resamples", o.resamples, "Bootstrap resamples")->capture_default_str();
  auto *out = cmd->add_option("--out", o.out, "Curve output (.csv, .json or .svg)");
  if (out_required) out->required();
  cmd->add_option("--plot", o.plot, "Optional SVG plot");
}

void emit_curve(const FaCurve &curve, const CurveOpts &o) {
  if (!o.out.empty()) write_curve(curve, o.out);
  if (!o.plot.empty()) write_curve(curve, o.plot, CurveFormat::kSvg);
}

CiOptions ci_of(const CurveOpts &o) { return {o.ci_level, o.resamples}; }

Family parse_family(const std::string &s) { return family_from_string(s); }

std::string format_tolerance(double tol) {
  // Shortest of "%g" and a one-digit mantissa, so 1e-4 prints as "1e-4".
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.0e", tol);
  if (std::strtod(buf, nullptr) != tol) std::snprintf(buf, sizeof buf, "%g", tol);
  std::string s = buf;
  for (auto pos = s.find("e-0"); pos != std::string::npos; pos = s.find("e-0"))
    s.erase(pos + 2, 1);
  for (auto pos = s.find("e+0"); pos != std::string::npos; pos = s.find("e+0"))
    s.erase(pos + 2, 1);
  return s;
}

}  // namespace

int run_cli(int argc, const char *const *argv) {
  CLI::App app{"Worst-case false alarm estimation and extrapolation", "wcfa"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "wcfa 0.1.0");

  // estimate
  Common est_c;
  CurveOpts est_o;
  std::string est_scores, est_partition;
  bool est_replace = false;
  auto *est = app.add_subcommand("estimate", "Empirical worst-case FA curve from a score file");
  est->add_option("--scores", est_scores, "Score file (.csv or .jsonl)")->required();
  est->add_option("--partition", est_partition, "Use only records of this partition");
  est->add_flag("--with-replacement", est_replace, "Draw impostors with replacement");
  add_curve_options(est, est_o, true);
  add_common(est, est_c);

  // fit
  Common fit_c;
  TrainConfig tc;
  FamilyOptions fo;
  std::string fit_scores, fit_partition, fit_out, fit_log, fit_family = "plda";
  bool generative = false;
  double tau_min = NAN, tau_max = NAN;
  int fit_l = 0;
  auto *fit = app.add_subcommand("fit", "Fit a score model to a score file");
  fit->add_option("--scores", fit_scores, "Score file")->required();
  fit->add_option("--partition", fit_partition, "Use only records of this partition");
  fit->add_option("--family", fit_family, "gaussian-ls, pwl-ls or plda")
      ->check(CLI::IsMember({"gaussian-ls", "pwl-ls", "plda"}))->capture_default_str();
  fit->add_option("--dim", fo.dim, "PLDA dimension")->capture_default_str();
  fit->add_flag("--warp", fo.warp, "Learn a monotone score warp");
  fit->add_option("--knots", fo.knots, "Segments per piecewise-linear map")->capture_default_str();
  fit->add_flag("--generative", generative, "Moment-matching Gaussian baseline instead of training");
  fit->add_option("--trials", tc.trials, "Trials per estimate")->capture_default_str();
  fit->add_option("--batch-size", tc.batch_size)->capture_default_str();
  fit->add_option("--lr", tc.lr)->capture_default_str();
  fit->add_option("--steps", tc.steps)->capture_default_str();
  fit->add_option("--alpha", tc.alpha, "Sigmoid slope on standardized scores")->capture_default_str();
  fit->add_option("--beta", tc.beta, "Soft-argmax scale")->capture_default_str();
  fit->add_option("--n-train-max", tc.n_train_max, "N is drawn from [1, n-train-max)")
      ->capture_default_str();
  fit->add_option("--tau-min", tau_min);
  fit->add_option("--tau-max", tau_max);
  fit->add_option("--scores-per-pair", fit_l, "Scores per sampled pair (default: median)");
  fit->add_option("--out", fit_out, "Model JSON")->required();
  fit->add_option("--log", fit_log, "Training log (JSON lines)");
  add_common(fit, fit_c);

  // extrapolate
  Common ext_c;
  CurveOpts ext_o;
  std::string ext_model;
  auto *ext = app.add_subcommand("extrapolate", "Model-based worst-case FA curve for any N");
  ext->add_option("--model", ext_model, "Model JSON")->required();
  add_curve_options(ext, ext_o, true);
  add_common(ext, ext_c);

  // simulate
  Common sim_c;
  CurveOpts sim_o;
  std::string sim_truth, sim_out, sim_oracle;
  auto *sim = app.add_subcommand("simulate", "Synthetic score table from a ground-truth model");
  sim->add_option("--truth", sim_truth, "Ground-truth JSON")->required();
  sim->add_option("--out", sim_out, "Score CSV")->required();
  sim->add_option("--oracle-out", sim_oracle, "Optional oracle curve output");
  sim->add_option("--n-grid", sim_o.n_grid, "Oracle impostor counts")->delimiter(',');
  sim->add_option("--tau", sim_o.taus, "Oracle thresholds")->delimiter(',');
  sim->add_option("--trials", sim_o.trials, "Oracle trials")->capture_default_str();
  add_common(sim, sim_c);

  // validate
  Common val_c;
  ValidationConfig vc;
  std::string val_model, val_scores, val_partition, val_out;
  double v_tau_min = NAN, v_tau_max = NAN;
  auto *val = app.add_subcommand("validate", "Held-out MAE of a model against a score file");
  val->add_option("--model", val_model, "Model JSON")->required();
  val->add_option("--scores", val_scores, "Score file")->required();
  val->add_option("--partition", val_partition, "Use only records of this partition");
  val->add_option("--n-min", vc.n_lo, "Smallest held-out N")->required();
  val->add_option("--n-max", vc.n_hi, "Largest held-out N (inclusive)")->required();
  val->add_option("--tau-min", v_tau_min);
  val->add_option("--tau-max", v_tau_max);
  val->add_option("--queries", vc.queries)->capture_default_str();
  val->add_option("--trials", vc.trials)->capture_default_str();
  val->add_option("--out", val_out, "Optional JSON report");
  add_common(val, val_c);

  // gradcheck
  Common gc_c;
  GradCheckConfig gc;
  FamilyOptions gfo;
  std::string gc_family = "plda";
  auto *gck = app.add_subcommand("gradcheck", "Finite-difference check of the training objective");
  gck->add_option("--family", gc_family)->check(CLI::IsMember({"gaussian-ls", "pwl-ls", "plda"}))
      ->capture_default_str();
  gck->add_option("--dim", gfo.dim)->capture_default_str();
  gck->add_flag("--warp", gfo.warp);
  gck->add_option("--knots", gfo.knots)->capture_default_str();
  gck->add_option("--trials", gc.trials)->capture_default_str();
  gck->add_option("--n-max", gc.n_max)->capture_default_str();
  gck->add_option("--scores-per-pair", gc.scores_per_pair)->capture_default_str();
  gck->add_option("--batch-size", gc.batch_size)->capture_default_str();
  gck->add_option("--alpha", gc.alpha)->capture_default_str();
  gck->add_option("--beta", gc.beta)->capture_default_str();
  gck->add_option("--epsilon", gc.epsilon)->capture_default_str();
  gck->add_option("--tolerance", gc.tolerance)->capture_default_str();
  add_common(gck, gc_c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "wcfa: error: " << e.what() << "\n";
    return e.get_exit_code() != 0 ? e.get_exit_code() : 2;
  }

  auto opt_partition = [](const std::string &p) {
    return p.empty() ? std::nullopt : std::optional<std::string>(p);
  };

  try {
    if (*est) {
      auto table = load_score_table(est_scores, score_format_from_path(est_scores),
                                    opt_partition(est_partition));
      SimConfig cfg{est_o.trials, est_c.seed, est_replace, est_c.threads};
      cfg.validate();
      auto curve = empirical_curve(table, est_o.n_grid, est_o.taus, cfg, ci_of(est_o));
      emit_curve(curve, est_o);
      std::cout << "wrote " << curve.rows.size() << " rows to " << est_o.out << "\n";
    } else if (*fit) {
      auto table = load_score_table(fit_scores, score_format_from_path(fit_scores),
                                    opt_partition(fit_partition));
      fo.family = parse_family(fit_family);
      if (generative) {
        if (fo.family != Family::kGaussianLs)
          throw Error("--generative fits the gaussian-ls family only");
        int l = fit_l > 0 ? fit_l : static_cast<int>(table.median_pair_size());
        LocScaleModel m(fit_generative_gaussian_baseline(table), l);
        save_model(m.to_artifact({"moment-matching", fnv1a_hex(fit_scores), fit_c.seed}), fit_out);
        std::cout << "wrote moment-matching model to " << fit_out << "\n";
        return 0;
      }
      tc.seed = fit_c.seed;
      tc.threads = fit_c.threads;
      if (!std::isnan(tau_min)) tc.tau_min = tau_min;
      if (!std::isnan(tau_max)) tc.tau_max = tau_max;
      if (fit_l > 0) tc.scores_per_pair = fit_l;
      auto result = train_discriminative(fo, table, tc);
      save_model(result.artifact, fit_out);
      if (!fit_log.empty()) write_train_log(result.log, fit_log);
      double last = result.log.empty() ? NAN : result.log.back().loss;
      std::cout << "wrote " << to_string(fo.family) << " model to " << fit_out
                << " (best step " << result.best_step << ", last loss " << last << ")\n";
    } else if (*ext) {
      auto model = load_model(ext_model);
      auto curve = extrapolate(model, ext_o.n_grid, ext_o.taus, ext_o.trials, ext_c.seed,
                               ci_of(ext_o), ext_c.threads);
      emit_curve(curve, ext_o);
      std::cout << "wrote " << curve.rows.size() << " rows to " << ext_o.out << "\n";
    } else if (*sim) {
      auto gt = load_ground_truth(sim_truth);
      auto table = generate_synthetic_table(gt, sim_c.threads);
      write_score_table(table, sim_out);
      std::cout << "wrote " << table.score_count() << " scores to " << sim_out << "\n";
      if (!sim_oracle.empty()) {
        if (sim_o.n_grid.empty() || sim_o.taus.empty())
          throw Error("--oracle-out needs --n-grid and --tau");
        auto curve = oracle_curve(gt, sim_o.n_grid, sim_o.taus, sim_o.trials, sim_c.seed, {},
                                  sim_c.threads);
        write_curve(curve, sim_oracle);
      }
    } else if (*val) {
      auto table = load_score_table(val_scores, score_format_from_path(val_scores),
                                    opt_partition(val_partition));
      auto pooled = table.pooled_scores();
      vc.tau_min = std::isnan(v_tau_min) ? quantile(pooled, 0.001) : v_tau_min;
      vc.tau_max = std::isnan(v_tau_max) ? quantile(pooled, 0.999) : v_tau_max;
      vc.seed = val_c.seed;
      vc.threads = val_c.threads;
      auto report = validate_mae(load_model(val_model), table, vc);
      std::printf("MAE=%.4f%% over %d queries\n", report.mae_percent, vc.queries);
      if (!val_out.empty()) {
        nlohmann::ordered_json j;
        j["mae_percent"] = report.mae_percent;
        auto &qs = j["queries"] = nlohmann::json::array();
        for (const auto &q : report.queries)
          qs.push_back({{"n", q.query.n}, {"tau", q.query.tau}, {"model", q.model_p_fa},
                        {"empirical", q.empirical_p_fa}});
        std::ofstream out(val_out);
        if (!out) throw Error("cannot open " + val_out + " for writing");
        out << j.dump(2) << "\n";
      }
    } else if (*gck) {
      gfo.family = parse_family(gc_family);
      gc.seed = gc_c.seed;
      auto report = gradcheck_training_objective(gfo, gc);
      std::printf("%s max_rel_err<%s (max_rel_err=%.3e, worst index %zu)\n",
                  report.passed ? "PASS" : "FAIL", format_tolerance(gc.tolerance).c_str(),
                  report.max_rel_error, report.worst_index);
      return report.passed ? 0 : 1;
    }
  } catch (const std::exception &e) {
    std::cerr << "wcfa: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

int run_cli(const std::vector<std::string> &args) {
  std::vector<const char *> argv;
  for (const auto &a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace wcfa
