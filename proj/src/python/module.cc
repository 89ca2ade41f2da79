// src/python/module.cc

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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wcfa/estimator.h"
#include "wcfa/model_artifact.h"
#include "wcfa/plda.h"
#include "wcfa/score_table.h"
#include "wcfa/synthetic.h"
#include "wcfa/training.h"

namespace py = pybind11;
using namespace wcfa;

namespace {

py::list curve_rows(const FaCurve &curve) {
  py::list rows;
  for (const auto &r : curve.rows) {
    py::dict d;
    d["n"] = r.n;
    d["tau"] = r.tau;
    d["p_fa"] = r.p_fa;
    d["ci_lo"] = r.ci_lo;
    d["ci_hi"] = r.ci_hi;
    rows.append(d);
  }
  return rows;
}

PairScoreTable table_from_tuples(
    const std::vector<std::tuple<std::string, std::string, double>> &rows) {
  std::vector<ScoreRecord> records;
  records.reserve(rows.size());
  for (const auto &[e, t, s] : rows) records.push_back({e, t, s, std::nullopt});
  return PairScoreTable::from_records(records);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Worst-case false alarm estimation for speaker verification scores";
  py::register_exception<Error>(m, "WcfaError", PyExc_ValueError);

  py::class_<PairScoreTable>(m, "PairScoreTable")
      .def_static("from_rows", &table_from_tuples, py::arg("rows"),
                  "Build from (enroll, test, score) tuples.")
      .def_static(
          "load",
          [](const std::string &path, std::optional<std::string> partition) {
            return load_score_table(path, score_format_from_path(path), partition);
          },
          py::arg("path"), py::arg("partition") = std::nullopt)
      .def("save", [](const PairScoreTable &t, const std::string &path) {
        write_score_table(t, path);
      })
      .def_property_readonly("speakers",
                             [](const PairScoreTable &t) {
                               std::vector<std::string> out;
                               for (const auto &s : t.speakers()) out.push_back(s.str());
                               return out;
                             })
      .def_property_readonly("pair_count", [](const PairScoreTable &t) { return t.pairs().size(); })
      .def_property_readonly("score_count", &PairScoreTable::score_count)
      .def_property_readonly("max_impostors", &PairScoreTable::max_impostors)
      .def("pooled_scores", &PairScoreTable::pooled_scores);

  m.def("zero_effort_fa", &zero_effort_fa, py::arg("table"), py::arg("tau"));
  m.def(
      "worst_case_fa",
      [](const PairScoreTable &t, std::int64_t n, double tau, std::int64_t trials,
         std::uint64_t seed, bool with_replacement) {
        SimConfig cfg{trials, seed, with_replacement, 0};
        return worst_case_fa_empirical(t, {n, tau}, cfg).p_fa;
      },
      py::arg("table"), py::arg("n"), py::arg("tau"), py::arg("trials") = 1000,
      py::arg("seed") = 0, py::arg("with_replacement") = false);
  m.def(
      "empirical_curve",
      [](const PairScoreTable &t, std::vector<std::int64_t> n_grid, std::vector<double> taus,
         std::int64_t trials, std::uint64_t seed) {
        SimConfig cfg{trials, seed, false, 0};
        return curve_rows(empirical_curve(t, n_grid, taus, cfg));
      },
      py::arg("table"), py::arg("n_grid"), py::arg("taus"), py::arg("trials") = 1000,
      py::arg("seed") = 0);
  m.def(
      "min_dcf_threshold",
      [](std::vector<double> tar, std::vector<double> non, double c_miss, double c_fa,
         double p_target) { return min_dcf_threshold(tar, non, c_miss, c_fa, p_target); },
      py::arg("target_scores"), py::arg("nontarget_scores"), py::arg("c_miss") = 1.0,
      py::arg("c_fa") = 1.0, py::arg("p_target") = 0.01);

  m.def(
      "plda_llr",
      [](std::vector<double> d, std::vector<double> e, std::vector<double> t) {
        return plda_llr(PldaScoreParams{std::move(d), {}}, e, t);
      },
      py::arg("d"), py::arg("phi_e"), py::arg("phi_t"));
  m.def(
      "simultaneous_diagonalize",
      [](const std::vector<std::vector<double>> &b, const std::vector<std::vector<double>> &w) {
        auto to_matrix = [](const std::vector<std::vector<double>> &v) {
          Eigen::MatrixXd out(static_cast<Eigen::Index>(v.size()),
                              static_cast<Eigen::Index>(v.size()));
          for (std::size_t i = 0; i < v.size(); ++i) {
            if (v[i].size() != v.size()) throw Error("matrix must be square");
            for (std::size_t j = 0; j < v.size(); ++j)
              out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v[i][j];
          }
          return out;
        };
        auto r = simultaneous_diagonalize(to_matrix(b), to_matrix(w));
        std::vector<std::vector<double>> t(static_cast<std::size_t>(r.transform.rows()));
        for (Eigen::Index i = 0; i < r.transform.rows(); ++i)
          for (Eigen::Index j = 0; j < r.transform.cols(); ++j)
            t[static_cast<std::size_t>(i)].push_back(r.transform(i, j));
        return py::make_tuple(t, std::vector<double>(r.d.data(), r.d.data() + r.d.size()));
      },
      py::arg("between"), py::arg("within"));

  m.def(
      "generate_synthetic_table",
      [](const std::string &truth_json) {
        return generate_synthetic_table(ground_truth_from_json(truth_json));
      },
      py::arg("truth_json"));
  m.def(
      "oracle_curve",
      [](const std::string &truth_json, std::vector<std::int64_t> n_grid,
         std::vector<double> taus, std::int64_t trials, std::uint64_t seed) {
        return curve_rows(
            oracle_curve(ground_truth_from_json(truth_json), n_grid, taus, trials, seed));
      },
      py::arg("truth_json"), py::arg("n_grid"), py::arg("taus"), py::arg("trials") = 1000,
      py::arg("seed") = 0);

  m.def(
      "fit",
      [](const PairScoreTable &t, const std::string &family, int dim, bool warp, int steps,
         std::int64_t trials, std::int64_t n_train_max, double lr, std::uint64_t seed) {
        FamilyOptions fo;
        fo.family = family_from_string(family);
        fo.dim = dim;
        fo.warp = warp;
        TrainConfig cfg;
        cfg.steps = steps;
        cfg.trials = trials;
        cfg.n_train_max = n_train_max;
        cfg.lr = lr;
        cfg.seed = seed;
        auto result = train_discriminative(fo, t, cfg);
        std::vector<double> losses;
        for (const auto &e : result.log) losses.push_back(e.loss);
        return py::make_tuple(model_to_json(result.artifact), losses);
      },
      py::arg("table"), py::arg("family"), py::arg("dim") = kDefaultPldaDim,
      py::arg("warp") = false, py::arg("steps") = 2000, py::arg("trials") = 300,
      py::arg("n_train_max") = 660, py::arg("lr") = 1e-3, py::arg("seed") = 0,
      "Returns (model_json, per-step losses).");
  m.def(
      "fit_generative_baseline",
      [](const PairScoreTable &t) {
        LocScaleModel model(fit_generative_gaussian_baseline(t),
                            static_cast<int>(t.median_pair_size()));
        return model_to_json(model.to_artifact({"moment-matching", "", 0}));
      },
      py::arg("table"));
  m.def(
      "extrapolate",
      [](const std::string &model_json, std::vector<std::int64_t> n_grid,
         std::vector<double> taus, std::int64_t trials, std::uint64_t seed) {
        return curve_rows(extrapolate(model_from_json(model_json), n_grid, taus, trials, seed));
      },
      py::arg("model_json"), py::arg("n_grid"), py::arg("taus"), py::arg("trials") = 1000,
      py::arg("seed") = 0);
  m.def(
      "validate_mae",
      [](const std::string &model_json, const PairScoreTable &t, std::int64_t n_lo,
         std::int64_t n_hi, double tau_min, double tau_max, int queries, std::int64_t trials,
         std::uint64_t seed) {
        ValidationConfig vc{n_lo, n_hi, tau_min, tau_max, queries, trials, seed, 0};
        return validate_mae(model_from_json(model_json), t, vc).mae_percent;
      },
      py::arg("model_json"), py::arg("table"), py::arg("n_lo"), py::arg("n_hi"),
      py::arg("tau_min"), py::arg("tau_max"), py::arg("queries") = 100,
      py::arg("trials") = 1000, py::arg("seed") = 0);
  m.def(
      "gradcheck",
      [](const std::string &family, bool warp, std::uint64_t seed) {
        FamilyOptions fo;
        fo.family = family_from_string(family);
        fo.warp = warp;
        GradCheckConfig gc;
        gc.seed = seed;
        auto r = gradcheck_training_objective(fo, gc);
        return py::make_tuple(r.passed, r.max_rel_error);
      },
      py::arg("family"), py::arg("warp") = false, py::arg("seed") = 0);

#ifdef VERSION_INFO
#define WCFA_STR(x) #x
#define WCFA_XSTR(x) WCFA_STR(x)
  m.attr("__version__") = WCFA_XSTR(VERSION_INFO);
#else
  m.attr("__version__") = "dev";
#endif
}
