#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bart/dataset.hpp"
#include "bart/sampler.hpp"
#include "bart/stats.hpp"

namespace bart {

// Rows offered to a model must carry the training columns; missing values
// are allowed only for models trained with missing-data support.
void check_frame_schema(const PosteriorEnsemble& ensemble, const ModelFrame& frame);

// Posterior sum-of-trees value for one row and one kept sample.
double sample_value(const PosteriorEnsemble& ensemble, const ModelFrame& frame,
                    std::size_t row, std::size_t sample);

// All kept-sample values for one row.
std::vector<double> row_draws(const PosteriorEnsemble& ensemble,
                              const ModelFrame& frame, std::size_t row);

struct PredictionResult {
  std::vector<double> point;          // posterior mean of the sum of trees
  std::vector<double> probability;    // classification: mean Phi(g_s)
  std::vector<int> label;             // classification: probability >= threshold
};

// Point predictions; for classification `point` holds the latent mean and
// probability/label carry the class outputs.
PredictionResult predict(const PosteriorEnsemble& ensemble, const ModelFrame& frame,
                         int threads = 1);
std::vector<double> predict_point(const PosteriorEnsemble& ensemble,
                                  const ModelFrame& frame, int threads = 1);

struct IntervalEstimate {
  double lower = 0.0;
  double upper = 0.0;
};

// Quantiles of the posterior of f(x); probability scale for classification.
std::vector<IntervalEstimate> credible_intervals(const PosteriorEnsemble& ensemble,
                                                 const ModelFrame& frame,
                                                 double confidence,
                                                 int threads = 1);

// Quantiles of the posterior predictive f(x) + noise; regression only.
// Kept samples are cycled until `draws` noise draws have been added.
std::vector<IntervalEstimate> prediction_intervals(const PosteriorEnsemble& ensemble,
                                                   const ModelFrame& frame,
                                                   double confidence,
                                                   std::size_t draws,
                                                   std::uint64_t seed,
                                                   int threads = 1);

// ---- variable importance -----------------------------------------------------

// Fraction of all splitting rules (across kept samples and trees) using each
// column; all zeros when no splits exist.
std::vector<double> inclusion_proportions(const PosteriorEnsemble& ensemble);

struct ProportionReport {
  std::vector<double> mean;
  std::vector<double> lower;  // mean -/+ 1.96 se over replicate builds
  std::vector<double> upper;
  int replicates = 1;
};

// Averages inclusion proportions over independently re-trained models.
ProportionReport inclusion_proportions_avg(const ModelFrame& frame,
                                           const Hyperparameters& hyper,
                                           int replicates, std::uint64_t seed,
                                           int threads = 1);

// Parent-child split pairs along root-to-leaf paths, folded so that the
// (j, k) and (k, j) counts are added together; diagonal = self-interactions.
std::vector<std::vector<double>> interaction_counts(const PosteriorEnsemble& ensemble);

struct InteractionReport {
  std::vector<std::vector<double>> mean;
  std::vector<std::vector<double>> se;
  int replicates = 1;
};
InteractionReport interaction_counts_avg(const ModelFrame& frame,
                                         const Hyperparameters& hyper,
                                         int replicates, std::uint64_t seed,
                                         int threads = 1);

// ---- permutation test of covariate importance --------------------------------

struct CovImportanceResult {
  double observed = 0.0;             // pseudo-R^2, or misclassification error
  std::vector<double> null_stats;    // one per permutation rebuild
  double p_value = 0.0;
  bool classification = false;
  std::vector<std::string> covariates;  // empty = response permuted (omnibus)
};

// Permutes the named covariates jointly (or the response when none are
// named), retrains per permutation, and reports the one-sided p-value.
CovImportanceResult cov_importance_test(const ModelFrame& frame,
                                        const Hyperparameters& hyper,
                                        std::span<const std::string> covariates,
                                        int permutations, std::uint64_t seed,
                                        int threads = 1);

// ---- partial dependence --------------------------------------------------------

struct PartialDependenceResult {
  std::size_t feature = 0;
  std::vector<double> grid;       // 5/10/20/.../90/95th percentiles of the column
  std::vector<double> estimate;   // averaged prediction at each grid value
  std::vector<double> lower;      // 2.5% of the per-sample averages
  std::vector<double> upper;      // 97.5%
};

// Classification output stays on the latent (probit) scale.
PartialDependenceResult partial_dependence(const PosteriorEnsemble& ensemble,
                                           const ModelFrame& frame,
                                           std::size_t feature, int threads = 1);

// ---- variable selection --------------------------------------------------------

struct VarSelectionResult {
  std::vector<double> observed;              // averaged inclusion proportions
  std::vector<std::vector<double>> nulls;    // permutations x columns
  double alpha = 0.05;
  std::vector<std::size_t> local;            // selected column indices
  std::vector<std::size_t> global_max;
  std::vector<std::size_t> global_se;
  std::vector<double> local_thresholds;
  double global_max_threshold = 0.0;
  std::vector<double> null_mean;
  std::vector<double> null_sd;
  double se_multiplier = 0.0;
};

struct VarSelectionConfig {
  int permutations = 20;
  double alpha = 0.05;
  int replicates = 5;  // real-data builds averaged for the observed proportions
};

// Response-permutation null distribution with Local / Global Max / Global SE
// thresholds.
VarSelectionResult var_selection(const ModelFrame& frame, const Hyperparameters& hyper,
                                 const VarSelectionConfig& config, std::uint64_t seed,
                                 int threads = 1);

enum class SelectionMethod { Local, GlobalMax, GlobalSE };
const char* selection_method_name(SelectionMethod method);

struct VarSelectionCvResult {
  SelectionMethod best = SelectionMethod::Local;
  std::vector<std::size_t> selected;      // best method applied to the full data
  double score[3] = {0.0, 0.0, 0.0};      // mean held-out error per method
};

// Chooses among the three thresholds by k-fold out-of-sample error; a method
// that selects nothing is scored with the training-mean predictor.
VarSelectionCvResult var_selection_cv(const ModelFrame& frame,
                                      const Hyperparameters& hyper,
                                      const VarSelectionConfig& config, int folds,
                                      std::uint64_t seed, int threads = 1);

// ---- cross-validation -----------------------------------------------------------

struct CrossValidationResult {
  stats::FitStats fit;                  // regression, out-of-fold
  std::vector<double> predictions;      // out-of-fold (probabilities for classification)
  std::vector<int> fold_of_row;
  stats::ConfusionMatrix confusion;     // classification
  double misclassification = 0.0;       // classification
};

CrossValidationResult k_fold_cv(const ModelFrame& frame, const Hyperparameters& hyper,
                                int k, std::uint64_t seed, int threads = 1);

struct GridCell {
  Hyperparameters hyper;
  double score = 0.0;  // out-of-fold rmse, or total misclassification error
};

struct GridSearchResult {
  std::vector<GridCell> cells;
  std::size_t winner = 0;
};

// Factorial grid over (k; nu,q; num_trees); classification drops (nu, q).
std::vector<Hyperparameters> default_cv_grid(const Hyperparameters& base,
                                             bool classification);

GridSearchResult cv_grid_search(const ModelFrame& frame, const Hyperparameters& base,
                                std::span<const Hyperparameters> grid, int folds,
                                std::uint64_t seed, int threads = 1);

// ---- out-of-sample error by ensemble size ----------------------------------------

struct RmseByTrees {
  std::vector<int> tree_counts;
  std::vector<double> rmse;  // mean over replicate holdout fits
};

// Repeated 80/20 holdout fits for each candidate number of trees.
RmseByTrees rmse_by_num_trees(const ModelFrame& frame, const Hyperparameters& hyper,
                              std::span<const int> tree_counts, int replicates,
                              std::uint64_t seed, int threads = 1);

// In-sample statistic used by the permutation test: pseudo-R^2 for
// regression, misclassification error for classification.
double in_sample_statistic(const PosteriorEnsemble& ensemble, const ModelFrame& frame,
                           int threads = 1);

}  // namespace bart
