// Command-line surface: training, prediction and the analysis toolkit as
// subcommands that emit plot-ready CSV/JSON.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "bart/dataset.hpp"
#include "bart/diagnostics.hpp"
#include "bart/errors.hpp"
#include "bart/inference.hpp"
#include "bart/parallel.hpp"
#include "bart/persistence.hpp"
#include "bart/sampler.hpp"

namespace {

using bart::DataError;
using bart::ModelError;
using json = nlohmann::json;

constexpr int kExitUsage = 64;
constexpr int kExitData = 65;
constexpr int kExitModel = 66;
constexpr int kExitInternal = 70;

struct DataCli {
  std::string path;
  std::string response;
  std::string positive_level;
  bool force_classification = false;
  bool drop_missing = false;
};

struct RunCli {
  std::uint64_t seed = 1;
  int threads = bart::default_thread_count();
  bool quiet = false;
};

void add_data_options(CLI::App* cmd, DataCli& data) {
  cmd->add_option("--data", data.path, "training data CSV")->required();
  cmd->add_option("--response", data.response, "response column name")->required();
  cmd->add_option("--positive-level", data.positive_level,
                  "level treated as 1 for classification");
  cmd->add_flag("--classification", data.force_classification,
                "force classification for a two-valued response");
  cmd->add_flag("--drop-missing", data.drop_missing,
                "drop rows with missing predictors instead of failing");
}

void add_run_options(CLI::App* cmd, RunCli& run) {
  cmd->add_option("--seed", run.seed, "master seed; all randomness derives from it");
  cmd->add_option("--threads", run.threads, "worker thread cap");
  cmd->add_flag("--quiet", run.quiet, "suppress progress output");
}

void add_hyper_options(CLI::App* cmd, bart::Hyperparameters& hyper,
                       std::vector<double>& cov_prior) {
  cmd->add_option("--trees", hyper.num_trees, "number of trees (m)");
  cmd->add_option("--alpha", hyper.alpha, "depth prior base");
  cmd->add_option("--beta", hyper.beta, "depth prior power");
  cmd->add_option("--k", hyper.k, "leaf prior coverage multiplier");
  cmd->add_option("--nu", hyper.nu, "noise prior degrees of freedom");
  cmd->add_option("--q", hyper.q, "noise prior quantile");
  cmd->add_option("--prob-grow", hyper.proposals.grow, "grow proposal probability");
  cmd->add_option("--prob-prune", hyper.proposals.prune, "prune proposal probability");
  cmd->add_option("--prob-change", hyper.proposals.change, "change proposal probability");
  cmd->add_option("--burn-in", hyper.burn_in, "burn-in iterations");
  cmd->add_option("--post-burn-in", hyper.post_burn_in, "kept iterations");
  cmd->add_option("--chains", hyper.chains, "independent chains");
  cmd->add_option("--prob-rule-class", hyper.prob_rule_class,
                  "classification threshold");
  cmd->add_flag("!--no-memcache", hyper.memcache, "disable split candidate caching");
  cmd->add_flag("--use-missing-data", hyper.use_missing_data,
                "route missing values through splitting rules");
  cmd->add_flag("--missing-dummies", hyper.use_missing_dummies,
                "add is-missing indicator columns");
  cmd->add_option("--cov-prior", cov_prior,
                  "per-column covariate prior weights (comma separated)")
      ->delimiter(',');
}

bart::ModelFrame load_frame(const DataCli& data, const bart::Hyperparameters& hyper) {
  bart::LoadOptions options;
  if (!data.positive_level.empty()) options.positive_level = data.positive_level;
  options.force_classification = data.force_classification;
  bart::RawTable raw = bart::load_csv(data.path, data.response, options);
  if (data.drop_missing) raw = bart::drop_missing_rows(raw);
  return bart::build_model_frame(raw, hyper.use_missing_data,
                                 hyper.use_missing_dummies);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw DataError("failed writing '" + path + "'");
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

// predict/pdp/diagnostics accept new data; the response column is optional.
bart::ModelFrame conform_csv(const bart::PosteriorEnsemble& model,
                             const std::string& path) {
  const bart::RawTable raw =
      bart::load_csv_features(path, model.meta.response_name, {});
  return bart::conform_to(model.meta, raw);
}

// ---- subcommand bodies -------------------------------------------------------

int cmd_train(const DataCli& data, const RunCli& run, bart::Hyperparameters hyper,
              const std::string& out_path, const std::string& summary_path,
              const std::string& proposal_log_path) {
  hyper.validate();
  const bart::ModelFrame frame = load_frame(data, hyper);
  bart::SamplerOptions options;
  options.threads = run.threads;
  options.progress = !run.quiet;
  options.record_proposals = !proposal_log_path.empty();
  const bart::PosteriorEnsemble model = bart::train(frame, hyper, run.seed, options);
  bart::save_model(model, out_path);
  const std::string summary = bart::diag::model_summary(model, frame, run.threads);
  if (!summary_path.empty()) write_file(summary_path, summary);
  std::cout << summary;
  if (!proposal_log_path.empty()) {
    std::ostringstream os;
    os << "chain,kind,log_transition_ratio,log_likelihood_ratio,"
          "log_tree_structure_ratio,log_r,feasible,accepted\n";
    os.precision(17);
    for (std::size_t c = 0; c < model.proposal_log.size(); ++c) {
      for (const auto& p : model.proposal_log[c]) {
        os << (c + 1) << "," << bart::proposal_kind_name(p.kind) << ","
           << p.log_transition_ratio << "," << p.log_likelihood_ratio << ","
           << p.log_tree_structure_ratio << "," << p.log_r << "," << p.feasible
           << "," << p.accepted << "\n";
      }
    }
    write_file(proposal_log_path, os.str());
  }
  return 0;
}

int cmd_predict(const RunCli& run, const std::string& model_path,
                const std::string& data_path, const std::string& out_path,
                const std::string& intervals, double conf, std::size_t draws) {
  const bart::PosteriorEnsemble model = bart::load_model(model_path);
  const bart::ModelFrame frame = conform_csv(model, data_path);
  const bart::PredictionResult pred = bart::predict(model, frame, run.threads);

  std::ostringstream os;
  os.precision(17);
  const bool classification = model.meta.classification;
  os << "prediction";
  if (classification) os << ",probability,label";
  std::vector<bart::IntervalEstimate> bounds;
  if (intervals == "credible") {
    bounds = bart::credible_intervals(model, frame, conf, run.threads);
  } else if (intervals == "predictive") {
    bounds = bart::prediction_intervals(model, frame, conf, draws, run.seed,
                                        run.threads);
  } else if (intervals != "none") {
    throw DataError("unknown interval kind '" + intervals + "'");
  }
  if (!bounds.empty()) os << ",lower,upper";
  os << "\n";
  for (std::size_t i = 0; i < frame.n_rows(); ++i) {
    os << pred.point[i];
    if (classification) {
      os << "," << pred.probability[i] << ","
         << csv_quote(pred.label[i] ? model.meta.positive_level
                                    : model.meta.negative_level);
    }
    if (!bounds.empty()) os << "," << bounds[i].lower << "," << bounds[i].upper;
    os << "\n";
  }
  if (out_path.empty()) {
    std::cout << os.str();
  } else {
    write_file(out_path, os.str());
  }
  return 0;
}

int cmd_cv(const DataCli& data, const RunCli& run, bart::Hyperparameters hyper,
           int folds, const std::string& out_path, const std::string& pred_path) {
  hyper.validate();
  const bart::ModelFrame frame = load_frame(data, hyper);
  const bart::CrossValidationResult cv =
      bart::k_fold_cv(frame, hyper, folds, run.seed, run.threads);
  json out{{"folds", folds}, {"n", frame.n_rows()}};
  if (frame.classification()) {
    out["misclassification_error"] = cv.misclassification;
    out["confusion"] = {
        {"actual_negative", {cv.confusion.counts[0][0], cv.confusion.counts[0][1]}},
        {"actual_positive", {cv.confusion.counts[1][0], cv.confusion.counts[1][1]}}};
  } else {
    out["L1_err"] = cv.fit.l1;
    out["L2_err"] = cv.fit.l2;
    out["rmse"] = cv.fit.rmse;
    out["PseudoRsq"] = cv.fit.pseudo_r_sq;
  }
  const std::string text = out.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_file(out_path, text);
  }
  if (!pred_path.empty()) {
    std::ostringstream os;
    os.precision(17);
    os << "row,fold,prediction\n";
    for (std::size_t i = 0; i < cv.predictions.size(); ++i) {
      os << i << "," << cv.fold_of_row[i] << "," << cv.predictions[i] << "\n";
    }
    write_file(pred_path, os.str());
  }
  return 0;
}

int cmd_cvgrid(const DataCli& data, const RunCli& run, bart::Hyperparameters hyper,
               int folds, const std::string& out_path) {
  hyper.validate();
  const bart::ModelFrame frame = load_frame(data, hyper);
  const auto grid = bart::default_cv_grid(hyper, frame.classification());
  const bart::GridSearchResult result =
      bart::cv_grid_search(frame, hyper, grid, folds, run.seed, run.threads);

  std::ostringstream os;
  os.precision(10);
  os << "k,nu,q,trees,score,winner\n";
  for (std::size_t c = 0; c < result.cells.size(); ++c) {
    const auto& h = result.cells[c].hyper;
    os << h.k << "," << h.nu << "," << h.q << "," << h.num_trees << ","
       << result.cells[c].score << "," << (c == result.winner ? 1 : 0) << "\n";
  }
  if (out_path.empty()) {
    std::cout << os.str();
  } else {
    write_file(out_path, os.str());
  }
  const auto& win = result.cells[result.winner].hyper;
  std::cerr << "cv win: k: " << win.k;
  if (!frame.classification()) std::cerr << " nu, q: " << win.nu << ", " << win.q;
  std::cerr << " m: " << win.num_trees << "\n";
  return 0;
}

int cmd_varsel(const DataCli& data, const RunCli& run, bart::Hyperparameters hyper,
               const bart::VarSelectionConfig& config, int cv_folds,
               const std::string& out_path) {
  hyper.validate();
  const bart::ModelFrame frame = load_frame(data, hyper);
  const bart::VarSelectionResult r =
      bart::var_selection(frame, hyper, config, run.seed, run.threads);
  const auto names = [&](const std::vector<std::size_t>& idx) {
    json arr = json::array();
    for (auto j : idx) arr.push_back(frame.column_name(j));
    return arr;
  };
  json out{{"alpha", config.alpha},
           {"permutations", config.permutations},
           {"replicates", config.replicates},
           {"columns", json::array()},
           {"observed_proportions", r.observed},
           {"null_proportions", r.nulls},
           {"local_thresholds", r.local_thresholds},
           {"global_max_threshold", r.global_max_threshold},
           {"se_multiplier", r.se_multiplier},
           {"important_vars_local_names", names(r.local)},
           {"important_vars_global_max_names", names(r.global_max)},
           {"important_vars_global_se_names", names(r.global_se)}};
  for (std::size_t j = 0; j < frame.n_cols(); ++j) {
    out["columns"].push_back(frame.column_name(j));
  }
  if (cv_folds > 0) {
    const bart::VarSelectionCvResult cv = bart::var_selection_cv(
        frame, hyper, config, cv_folds, run.seed, run.threads);
    out["best_method"] = bart::selection_method_name(cv.best);
    out["important_vars_cv"] = names(cv.selected);
    out["method_scores"] = {{"local", cv.score[0]},
                            {"global_max", cv.score[1]},
                            {"global_se", cv.score[2]}};
  }
  const std::string text = out.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_file(out_path, text);
  }
  return 0;
}

int cmd_covtest(const DataCli& data, const RunCli& run, bart::Hyperparameters hyper,
                const std::vector<std::string>& covariates, int permutations,
                const std::string& out_path) {
  hyper.validate();
  const bart::ModelFrame frame = load_frame(data, hyper);
  const bart::CovImportanceResult r = bart::cov_importance_test(
      frame, hyper, covariates, permutations, run.seed, run.threads);
  json out{{"covariates", r.covariates},
           {"statistic", r.classification ? "misclassification_error" : "pseudo_r_sq"},
           {"observed", r.observed},
           {"null_statistics", r.null_stats},
           {"p_value", r.p_value}};
  const std::string text = out.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_file(out_path, text);
  }
  return 0;
}

int cmd_pdp(const RunCli& run, const std::string& model_path,
            const std::string& data_path, const std::string& feature,
            const std::string& out_path) {
  const bart::PosteriorEnsemble model = bart::load_model(model_path);
  const bart::ModelFrame frame = conform_csv(model, data_path);
  const auto idx = frame.column_index(feature);
  if (!idx) throw DataError("unknown feature '" + feature + "'");
  const bart::PartialDependenceResult pdp =
      bart::partial_dependence(model, frame, *idx, run.threads);
  std::ostringstream os;
  os.precision(17);
  os << "value,estimate,lower,upper\n";
  for (std::size_t g = 0; g < pdp.grid.size(); ++g) {
    os << pdp.grid[g] << "," << pdp.estimate[g] << "," << pdp.lower[g] << ","
       << pdp.upper[g] << "\n";
  }
  if (out_path.empty()) {
    std::cout << os.str();
  } else {
    write_file(out_path, os.str());
  }
  return 0;
}

int cmd_importance(const DataCli& data, const RunCli& run,
                   bart::Hyperparameters hyper, int replicates,
                   const std::string& out_path) {
  hyper.validate();
  const bart::ModelFrame frame = load_frame(data, hyper);
  const bart::ProportionReport rep = bart::inclusion_proportions_avg(
      frame, hyper, replicates, run.seed, run.threads);
  std::ostringstream os;
  os.precision(17);
  os << "column,proportion,lower,upper\n";
  for (std::size_t j = 0; j < frame.n_cols(); ++j) {
    os << csv_quote(frame.column_name(j)) << "," << rep.mean[j] << ","
       << rep.lower[j] << "," << rep.upper[j] << "\n";
  }
  if (out_path.empty()) {
    std::cout << os.str();
  } else {
    write_file(out_path, os.str());
  }
  return 0;
}

int cmd_interactions(const DataCli& data, const RunCli& run,
                     bart::Hyperparameters hyper, int replicates,
                     const std::string& out_path) {
  hyper.validate();
  const bart::ModelFrame frame = load_frame(data, hyper);
  const bart::InteractionReport rep = bart::interaction_counts_avg(
      frame, hyper, replicates, run.seed, run.threads);
  std::ostringstream os;
  os.precision(17);
  os << "feature_a,feature_b,count,se\n";
  for (std::size_t j = 0; j < frame.n_cols(); ++j) {
    for (std::size_t k = j; k < frame.n_cols(); ++k) {
      os << csv_quote(frame.column_name(j)) << "," << csv_quote(frame.column_name(k))
         << "," << rep.mean[j][k] << "," << rep.se[j][k] << "\n";
    }
  }
  if (out_path.empty()) {
    std::cout << os.str();
  } else {
    write_file(out_path, os.str());
  }
  return 0;
}

int cmd_diagnostics(const RunCli& run, const std::string& model_path,
                    const std::string& data_path, const std::string& out_dir) {
  const bart::PosteriorEnsemble model = bart::load_model(model_path);
  const bart::ModelFrame frame = conform_csv(model, data_path);
  std::filesystem::create_directories(out_dir);
  const auto path = [&](const std::string& name) { return out_dir + "/" + name; };

  const bart::diag::ConvergenceTrace trace = bart::diag::convergence_trace(model);
  write_file(path("sigma_sq_trace.csv"), trace.sigma_sq.to_csv("sigma_sq"));
  write_file(path("acceptance_trace.csv"), trace.acceptance.to_csv("acceptance"));
  write_file(path("tree_leaves_trace.csv"), trace.mean_leaves.to_csv("mean_leaves"));
  write_file(path("tree_depth_trace.csv"), trace.mean_depth.to_csv("mean_depth"));

  // residual panel needs observed responses
  if (frame.response().empty()) {
    throw DataError("diagnostics needs the response column in --data");
  }
  const bart::diag::ResidualDiagnostics rd =
      bart::diag::residuals_vs_fitted(model, frame, run.threads);
  write_file(path("residuals_vs_fitted.csv"), rd.to_csv());
  write_file(path("summary.txt"),
             bart::diag::model_summary(model, frame, run.threads));
  std::cerr << "diagnostics written to " << out_dir << "\n";
  return 0;
}

int cmd_rmse_by_trees(const DataCli& data, const RunCli& run,
                      bart::Hyperparameters hyper, std::vector<int> tree_counts,
                      int replicates, const std::string& out_path) {
  hyper.validate();
  const bart::ModelFrame frame = load_frame(data, hyper);
  if (tree_counts.empty()) tree_counts = {10, 25, 50, 100, 150, 200};
  const bart::RmseByTrees r = bart::rmse_by_num_trees(
      frame, hyper, tree_counts, replicates, run.seed, run.threads);
  std::ostringstream os;
  os.precision(17);
  os << "trees,rmse\n";
  for (std::size_t t = 0; t < r.tree_counts.size(); ++t) {
    os << r.tree_counts[t] << "," << r.rmse[t] << "\n";
  }
  if (out_path.empty()) {
    std::cout << os.str();
  } else {
    write_file(out_path, os.str());
  }
  return 0;
}

int cmd_simulate_friedman(std::size_t n, std::size_t p, double sigma,
                          std::uint64_t seed, const std::string& out_path) {
  const bart::ModelFrame frame = bart::generate_friedman(n, p, sigma, seed);
  write_file(out_path, frame.to_csv());
  return 0;
}

int cmd_export(const std::string& model_path, const std::string& out_path) {
  const bart::PosteriorEnsemble model = bart::load_model(model_path);
  const std::string text = bart::export_model_json(model) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_file(out_path, text);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian additive regression trees: training, prediction and "
               "posterior analysis"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value configuration file");

  DataCli data;
  RunCli run;
  bart::Hyperparameters hyper;
  std::vector<double> cov_prior;

  // train
  std::string out_model, summary_path, proposal_log_path;
  CLI::App* train = app.add_subcommand("train", "fit a model and save the archive");
  add_data_options(train, data);
  add_run_options(train, run);
  add_hyper_options(train, hyper, cov_prior);
  train->add_option("--out", out_model, "archive output path")->required();
  train->add_option("--summary-out", summary_path, "write the text summary here");
  train->add_option("--proposal-log", proposal_log_path,
                    "write per-proposal acceptance records here");

  // predict
  std::string model_path, data_path, out_path, intervals = "none";
  double conf = 0.95;
  std::size_t pi_draws = 1000;
  CLI::App* predict = app.add_subcommand("predict", "predict rows with a saved model");
  add_run_options(predict, run);
  predict->add_option("--model", model_path, "model archive")->required();
  predict->add_option("--data", data_path, "rows to predict (CSV)")->required();
  predict->add_option("--out", out_path, "output CSV (stdout if omitted)");
  predict->add_option("--intervals", intervals, "none | credible | predictive");
  predict->add_option("--conf", conf, "interval confidence level");
  predict->add_option("--draws", pi_draws, "posterior predictive draw budget");

  // cv
  int folds = 10;
  std::string pred_path;
  CLI::App* cv = app.add_subcommand("cv", "k-fold out-of-sample error");
  add_data_options(cv, data);
  add_run_options(cv, run);
  add_hyper_options(cv, hyper, cov_prior);
  cv->add_option("--folds", folds, "fold count");
  cv->add_option("--out", out_path, "output JSON (stdout if omitted)");
  cv->add_option("--pred-out", pred_path, "write out-of-fold predictions CSV");

  // cvgrid
  int grid_folds = 5;
  CLI::App* cvgrid = app.add_subcommand("cvgrid", "grid search by cross-validation");
  add_data_options(cvgrid, data);
  add_run_options(cvgrid, run);
  add_hyper_options(cvgrid, hyper, cov_prior);
  cvgrid->add_option("--folds", grid_folds, "fold count");
  cvgrid->add_option("--out", out_path, "per-cell scores CSV (stdout if omitted)");

  // varsel
  bart::VarSelectionConfig vs_config;
  int vs_cv_folds = 0;
  CLI::App* varsel = app.add_subcommand("varsel", "permutation variable selection");
  add_data_options(varsel, data);
  add_run_options(varsel, run);
  add_hyper_options(varsel, hyper, cov_prior);
  varsel->add_option("--permutations", vs_config.permutations, "null rebuilds");
  varsel->add_option("--sel-alpha", vs_config.alpha, "selection level");
  varsel->add_option("--replicates", vs_config.replicates,
                     "real-data builds averaged for the observed proportions");
  varsel->add_option("--cv-folds", vs_cv_folds,
                     "choose the best threshold by cross-validation (0 = off)");
  varsel->add_option("--out", out_path, "output JSON (stdout if omitted)");

  // covtest
  std::vector<std::string> covariates;
  int permutations = 100;
  CLI::App* covtest = app.add_subcommand(
      "covtest", "permutation test of covariate importance");
  add_data_options(covtest, data);
  add_run_options(covtest, run);
  add_hyper_options(covtest, hyper, cov_prior);
  covtest->add_option("--covariates", covariates,
                      "covariates permuted as one unit (omit for the omnibus test)")
      ->delimiter(',');
  covtest->add_option("--permutations", permutations, "null rebuilds");
  covtest->add_option("--out", out_path, "output JSON (stdout if omitted)");

  // pdp
  std::string feature;
  CLI::App* pdp = app.add_subcommand("pdp", "partial dependence of one feature");
  add_run_options(pdp, run);
  pdp->add_option("--model", model_path, "model archive")->required();
  pdp->add_option("--data", data_path, "training data CSV")->required();
  pdp->add_option("--feature", feature, "feature (matrix column) name")->required();
  pdp->add_option("--out", out_path, "output CSV (stdout if omitted)");

  // importance
  int replicates = 20;
  CLI::App* importance =
      app.add_subcommand("importance", "averaged variable inclusion proportions");
  add_data_options(importance, data);
  add_run_options(importance, run);
  add_hyper_options(importance, hyper, cov_prior);
  importance->add_option("--replicates", replicates, "model rebuilds averaged");
  importance->add_option("--out", out_path, "output CSV (stdout if omitted)");

  // interactions
  int inter_replicates = 5;
  CLI::App* interactions =
      app.add_subcommand("interactions", "pairwise interaction counts");
  add_data_options(interactions, data);
  add_run_options(interactions, run);
  add_hyper_options(interactions, hyper, cov_prior);
  interactions->add_option("--replicates", inter_replicates, "model rebuilds averaged");
  interactions->add_option("--out", out_path, "output CSV (stdout if omitted)");

  // diagnostics
  std::string out_dir = "diagnostics";
  CLI::App* diagnostics =
      app.add_subcommand("diagnostics", "convergence traces and residual checks");
  add_run_options(diagnostics, run);
  diagnostics->add_option("--model", model_path, "model archive")->required();
  diagnostics->add_option("--data", data_path, "training data CSV")->required();
  diagnostics->add_option("--out-dir", out_dir, "output directory");

  // rmse-by-trees
  std::vector<int> tree_counts;
  int rbt_replicates = 5;
  CLI::App* rmse_by_trees = app.add_subcommand(
      "rmse-by-trees", "holdout error as a function of ensemble size");
  add_data_options(rmse_by_trees, data);
  add_run_options(rmse_by_trees, run);
  add_hyper_options(rmse_by_trees, hyper, cov_prior);
  rmse_by_trees->add_option("--tree-counts", tree_counts, "tree counts to sweep")
      ->delimiter(',');
  rmse_by_trees->add_option("--replicates", rbt_replicates, "holdout replicates");
  rmse_by_trees->add_option("--out", out_path, "output CSV (stdout if omitted)");

  // simulate-friedman
  std::size_t sim_n = 500, sim_p = 10;
  double sim_sigma = 1.0;
  CLI::App* simulate =
      app.add_subcommand("simulate-friedman", "write a benchmark dataset CSV");
  add_run_options(simulate, run);
  simulate->add_option("--n", sim_n, "rows");
  simulate->add_option("--p", sim_p, "predictors (>= 5)");
  simulate->add_option("--sigma", sim_sigma, "noise standard deviation");
  simulate->add_option("--out", out_path, "output CSV")->required();

  // export
  CLI::App* export_cmd = app.add_subcommand("export", "dump an archive as JSON");
  export_cmd->add_option("--model", model_path, "model archive")->required();
  export_cmd->add_option("--out", out_path, "output JSON (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    hyper.cov_prior_vec = cov_prior;
    if (*train) {
      return cmd_train(data, run, hyper, out_model, summary_path, proposal_log_path);
    }
    if (*predict) {
      return cmd_predict(run, model_path, data_path, out_path, intervals, conf,
                         pi_draws);
    }
    if (*cv) return cmd_cv(data, run, hyper, folds, out_path, pred_path);
    if (*cvgrid) return cmd_cvgrid(data, run, hyper, grid_folds, out_path);
    if (*varsel) {
      return cmd_varsel(data, run, hyper, vs_config, vs_cv_folds, out_path);
    }
    if (*covtest) {
      return cmd_covtest(data, run, hyper, covariates, permutations, out_path);
    }
    if (*pdp) return cmd_pdp(run, model_path, data_path, feature, out_path);
    if (*importance) {
      return cmd_importance(data, run, hyper, replicates, out_path);
    }
    if (*interactions) {
      return cmd_interactions(data, run, hyper, inter_replicates, out_path);
    }
    if (*diagnostics) return cmd_diagnostics(run, model_path, data_path, out_dir);
    if (*rmse_by_trees) {
      return cmd_rmse_by_trees(data, run, hyper, tree_counts, rbt_replicates,
                               out_path);
    }
    if (*simulate) return cmd_simulate_friedman(sim_n, sim_p, sim_sigma, run.seed,
                                                out_path);
    if (*export_cmd) return cmd_export(model_path, out_path);
    std::cerr << "error: no subcommand\n";
    return kExitUsage;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const ModelError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitModel;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
