#include "bart/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bart/errors.hpp"
#include "bart/parallel.hpp"

namespace bart {

void check_frame_schema(const PosteriorEnsemble& ensemble, const ModelFrame& frame) {
  const auto& expected = ensemble.meta.columns;
  if (frame.n_cols() != expected.size()) {
    throw ModelError("frame has " + std::to_string(frame.n_cols()) +
                     " columns, model expects " + std::to_string(expected.size()));
  }
  for (std::size_t j = 0; j < expected.size(); ++j) {
    if (frame.column_meta()[j].name != expected[j].name) {
      throw ModelError("column " + std::to_string(j) + " is '" +
                       frame.column_meta()[j].name + "', model expects '" +
                       expected[j].name + "'");
    }
  }
  if (!ensemble.meta.use_missing_data && frame.any_missing()) {
    throw ModelError("data has missing values but the model was trained without "
                     "missing-data support");
  }
}

double sample_value(const PosteriorEnsemble& ensemble, const ModelFrame& frame,
                    std::size_t row, std::size_t sample) {
  double g = ensemble.mu_offset;
  for (const TreeSnapshot& tree : ensemble.samples[sample].trees) {
    g += tree.predict_row(frame, row);
  }
  return g;
}

std::vector<double> row_draws(const PosteriorEnsemble& ensemble,
                              const ModelFrame& frame, std::size_t row) {
  std::vector<double> draws(ensemble.samples.size());
  for (std::size_t s = 0; s < ensemble.samples.size(); ++s) {
    draws[s] = sample_value(ensemble, frame, row, s);
  }
  return draws;
}

std::vector<double> predict_point(const PosteriorEnsemble& ensemble,
                                  const ModelFrame& frame, int threads) {
  check_frame_schema(ensemble, frame);
  const std::size_t n = frame.n_rows();
  const double s_count = static_cast<double>(ensemble.samples.size());
  std::vector<double> out(n, 0.0);
  parallel_for(n, threads, [&](std::size_t i) {
    double acc = 0.0;
    for (std::size_t s = 0; s < ensemble.samples.size(); ++s) {
      acc += sample_value(ensemble, frame, i, s);
    }
    out[i] = acc / s_count;
  });
  return out;
}

PredictionResult predict(const PosteriorEnsemble& ensemble, const ModelFrame& frame,
                         int threads) {
  check_frame_schema(ensemble, frame);
  const std::size_t n = frame.n_rows();
  PredictionResult out;
  out.point.assign(n, 0.0);
  if (ensemble.meta.classification) {
    out.probability.assign(n, 0.0);
    out.label.assign(n, 0);
  }
  const double s_count = static_cast<double>(ensemble.samples.size());
  parallel_for(n, threads, [&](std::size_t i) {
    double acc = 0.0;
    double prob = 0.0;
    for (std::size_t s = 0; s < ensemble.samples.size(); ++s) {
      const double g = sample_value(ensemble, frame, i, s);
      acc += g;
      if (ensemble.meta.classification) prob += stats::normal_cdf(g);
    }
    out.point[i] = acc / s_count;
    if (ensemble.meta.classification) {
      out.probability[i] = prob / s_count;
      out.label[i] = out.probability[i] >= ensemble.hyper.prob_rule_class ? 1 : 0;
    }
  });
  return out;
}

std::vector<IntervalEstimate> credible_intervals(const PosteriorEnsemble& ensemble,
                                                 const ModelFrame& frame,
                                                 double confidence, int threads) {
  check_frame_schema(ensemble, frame);
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw DataError("credible_intervals: confidence must be in (0,1)");
  }
  const double tail = 0.5 * (1.0 - confidence);
  std::vector<IntervalEstimate> out(frame.n_rows());
  parallel_for(frame.n_rows(), threads, [&](std::size_t i) {
    std::vector<double> draws = row_draws(ensemble, frame, i);
    std::sort(draws.begin(), draws.end());
    double lo = stats::quantile_sorted(draws, tail);
    double hi = stats::quantile_sorted(draws, 1.0 - tail);
    if (ensemble.meta.classification) {
      lo = stats::normal_cdf(lo);
      hi = stats::normal_cdf(hi);
    }
    out[i] = {lo, hi};
  });
  return out;
}

std::vector<IntervalEstimate> prediction_intervals(const PosteriorEnsemble& ensemble,
                                                   const ModelFrame& frame,
                                                   double confidence,
                                                   std::size_t draws,
                                                   std::uint64_t seed, int threads) {
  check_frame_schema(ensemble, frame);
  if (ensemble.meta.classification) {
    throw DataError("prediction intervals are not defined for classification");
  }
  if (!(confidence > 0.0 && confidence < 1.0) || draws == 0) {
    throw DataError("prediction_intervals: bad confidence or draw budget");
  }
  const double tail = 0.5 * (1.0 - confidence);
  const std::size_t s_count = ensemble.samples.size();
  std::vector<IntervalEstimate> out(frame.n_rows());
  parallel_for(frame.n_rows(), threads, [&](std::size_t i) {
    Rng rng(derive_seed(seed, SeedStream::Noise, i));
    std::vector<double> sim(draws);
    for (std::size_t d = 0; d < draws; ++d) {
      const std::size_t s = d % s_count;
      const double g = sample_value(ensemble, frame, i, s);
      sim[d] = g + rng.normal(0.0, std::sqrt(ensemble.samples[s].sigma_sq));
    }
    std::sort(sim.begin(), sim.end());
    out[i] = {stats::quantile_sorted(sim, tail), stats::quantile_sorted(sim, 1.0 - tail)};
  });
  return out;
}

std::vector<double> inclusion_proportions(const PosteriorEnsemble& ensemble) {
  const std::size_t p = ensemble.meta.columns.size();
  std::vector<double> counts(p, 0.0);
  double total = 0.0;
  for (const PosteriorSample& sample : ensemble.samples) {
    for (const TreeSnapshot& tree : sample.trees) {
      for (const SnapshotNode& node : tree.nodes) {
        if (!node.is_leaf()) {
          counts[node.feature] += 1.0;
          total += 1.0;
        }
      }
    }
  }
  if (total > 0.0) {
    for (double& c : counts) c /= total;
  }
  return counts;
}

ProportionReport inclusion_proportions_avg(const ModelFrame& frame,
                                           const Hyperparameters& hyper,
                                           int replicates, std::uint64_t seed,
                                           int threads) {
  if (replicates < 1) throw DataError("inclusion_proportions_avg: replicates >= 1");
  const std::size_t p = frame.n_cols();
  std::vector<std::vector<double>> reps(replicates);
  parallel_for(replicates, threads, [&](std::size_t r) {
    const PosteriorEnsemble e =
        train(frame, hyper, derive_seed(seed, SeedStream::Replicate, r));
    reps[r] = inclusion_proportions(e);
  });
  ProportionReport report;
  report.replicates = replicates;
  report.mean.assign(p, 0.0);
  report.lower.assign(p, 0.0);
  report.upper.assign(p, 0.0);
  for (const auto& rep : reps) {
    for (std::size_t j = 0; j < p; ++j) report.mean[j] += rep[j];
  }
  for (std::size_t j = 0; j < p; ++j) report.mean[j] /= replicates;
  for (std::size_t j = 0; j < p; ++j) {
    double var = 0.0;
    for (const auto& rep : reps) {
      var += (rep[j] - report.mean[j]) * (rep[j] - report.mean[j]);
    }
    const double se = replicates > 1
                          ? std::sqrt(var / (replicates - 1) / replicates)
                          : 0.0;
    report.lower[j] = report.mean[j] - 1.96 * se;
    report.upper[j] = report.mean[j] + 1.96 * se;
  }
  return report;
}

std::vector<std::vector<double>> interaction_counts(const PosteriorEnsemble& ensemble) {
  const std::size_t p = ensemble.meta.columns.size();
  std::vector<std::vector<double>> raw(p, std::vector<double>(p, 0.0));
  for (const PosteriorSample& sample : ensemble.samples) {
    for (const TreeSnapshot& tree : sample.trees) {
      for (const SnapshotNode& node : tree.nodes) {
        if (node.is_leaf()) continue;
        for (std::int32_t child : {node.left, node.right}) {
          const SnapshotNode& ch = tree.nodes[child];
          if (!ch.is_leaf()) raw[node.feature][ch.feature] += 1.0;
        }
      }
    }
  }
  std::vector<std::vector<double>> folded(p, std::vector<double>(p, 0.0));
  for (std::size_t j = 0; j < p; ++j) {
    folded[j][j] = raw[j][j];
    for (std::size_t k = j + 1; k < p; ++k) {
      const double total = raw[j][k] + raw[k][j];
      folded[j][k] = total;
      folded[k][j] = total;
    }
  }
  return folded;
}

InteractionReport interaction_counts_avg(const ModelFrame& frame,
                                         const Hyperparameters& hyper,
                                         int replicates, std::uint64_t seed,
                                         int threads) {
  if (replicates < 1) throw DataError("interaction_counts_avg: replicates >= 1");
  const std::size_t p = frame.n_cols();
  std::vector<std::vector<std::vector<double>>> reps(replicates);
  parallel_for(replicates, threads, [&](std::size_t r) {
    const PosteriorEnsemble e =
        train(frame, hyper, derive_seed(seed, SeedStream::Replicate, r));
    reps[r] = interaction_counts(e);
  });
  InteractionReport report;
  report.replicates = replicates;
  report.mean.assign(p, std::vector<double>(p, 0.0));
  report.se.assign(p, std::vector<double>(p, 0.0));
  for (const auto& rep : reps) {
    for (std::size_t j = 0; j < p; ++j) {
      for (std::size_t k = 0; k < p; ++k) report.mean[j][k] += rep[j][k];
    }
  }
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t k = 0; k < p; ++k) report.mean[j][k] /= replicates;
  }
  if (replicates > 1) {
    for (std::size_t j = 0; j < p; ++j) {
      for (std::size_t k = 0; k < p; ++k) {
        double var = 0.0;
        for (const auto& rep : reps) {
          var += (rep[j][k] - report.mean[j][k]) * (rep[j][k] - report.mean[j][k]);
        }
        report.se[j][k] = std::sqrt(var / (replicates - 1) / replicates);
      }
    }
  }
  return report;
}

double in_sample_statistic(const PosteriorEnsemble& ensemble, const ModelFrame& frame,
                           int threads) {
  if (ensemble.meta.classification) {
    const PredictionResult pred = predict(ensemble, frame, threads);
    long wrong = 0;
    for (std::size_t i = 0; i < frame.n_rows(); ++i) {
      const int actual = frame.response()[i] > 0.5 ? 1 : 0;
      if (actual != pred.label[i]) ++wrong;
    }
    return static_cast<double>(wrong) / static_cast<double>(frame.n_rows());
  }
  const std::vector<double> point = predict_point(ensemble, frame, threads);
  return stats::fit_stats(frame.response(), point).pseudo_r_sq;
}

CovImportanceResult cov_importance_test(const ModelFrame& frame,
                                        const Hyperparameters& hyper,
                                        std::span<const std::string> covariates,
                                        int permutations, std::uint64_t seed,
                                        int threads) {
  if (permutations < 1) throw DataError("cov_importance_test: permutations >= 1");
  CovImportanceResult result;
  result.classification = frame.classification();
  result.covariates.assign(covariates.begin(), covariates.end());

  std::vector<std::size_t> unit;
  for (const std::string& name : covariates) {
    for (std::size_t c : frame.columns_for(name)) unit.push_back(c);
  }
  std::sort(unit.begin(), unit.end());
  unit.erase(std::unique(unit.begin(), unit.end()), unit.end());

  {
    const PosteriorEnsemble observed =
        train(frame, hyper, derive_seed(seed, SeedStream::Replicate, 0));
    result.observed = in_sample_statistic(observed, frame);
  }

  result.null_stats.assign(permutations, 0.0);
  parallel_for(permutations, threads, [&](std::size_t perm) {
    const std::uint64_t perm_seed = derive_seed(seed, SeedStream::Permutation, perm);
    const ModelFrame null_frame = covariates.empty()
                                      ? frame.permute_response(perm_seed)
                                      : permute_columns(frame, unit, perm_seed);
    const PosteriorEnsemble null_model = train(
        null_frame, hyper, derive_seed(seed, SeedStream::Replicate, 1 + perm));
    result.null_stats[perm] = in_sample_statistic(null_model, null_frame);
  });

  long count = 0;
  for (double s : result.null_stats) {
    if (result.classification ? (s < result.observed) : (s > result.observed)) {
      ++count;
    }
  }
  result.p_value = static_cast<double>(count) / static_cast<double>(permutations);
  return result;
}

PartialDependenceResult partial_dependence(const PosteriorEnsemble& ensemble,
                                           const ModelFrame& frame,
                                           std::size_t feature, int threads) {
  check_frame_schema(ensemble, frame);
  if (feature >= frame.n_cols()) throw DataError("partial_dependence: bad feature");
  std::vector<double> observed;
  for (std::size_t i = 0; i < frame.n_rows(); ++i) {
    if (!frame.missing(i, feature)) observed.push_back(frame.value(i, feature));
  }
  std::sort(observed.begin(), observed.end());
  if (observed.empty() || observed.front() == observed.back()) {
    throw DataError("partial_dependence: feature '" +
                    frame.column_name(feature) + "' has a degenerate value range");
  }

  static constexpr double kPercentiles[] = {0.05, 0.10, 0.20, 0.30, 0.40, 0.50,
                                            0.60, 0.70, 0.80, 0.90, 0.95};
  PartialDependenceResult result;
  result.feature = feature;
  for (double q : kPercentiles) {
    result.grid.push_back(stats::quantile_sorted(observed, q));
  }
  result.estimate.assign(result.grid.size(), 0.0);
  result.lower.assign(result.grid.size(), 0.0);
  result.upper.assign(result.grid.size(), 0.0);

  const std::size_t s_count = ensemble.samples.size();
  parallel_for(result.grid.size(), threads, [&](std::size_t g) {
    const ModelFrame pinned = frame.with_column_fixed(feature, result.grid[g]);
    std::vector<double> per_sample(s_count, 0.0);
    for (std::size_t i = 0; i < pinned.n_rows(); ++i) {
      for (std::size_t s = 0; s < s_count; ++s) {
        per_sample[s] += sample_value(ensemble, pinned, i, s);
      }
    }
    for (double& v : per_sample) v /= static_cast<double>(pinned.n_rows());
    std::sort(per_sample.begin(), per_sample.end());
    result.estimate[g] = stats::mean(per_sample);
    result.lower[g] = stats::quantile_sorted(per_sample, 0.025);
    result.upper[g] = stats::quantile_sorted(per_sample, 0.975);
  });
  return result;
}

const char* selection_method_name(SelectionMethod method) {
  switch (method) {
    case SelectionMethod::Local:
      return "local";
    case SelectionMethod::GlobalMax:
      return "global_max";
    case SelectionMethod::GlobalSE:
      return "global_se";
  }
  return "?";
}

VarSelectionResult var_selection(const ModelFrame& frame, const Hyperparameters& hyper,
                                 const VarSelectionConfig& config, std::uint64_t seed,
                                 int threads) {
  if (config.permutations < 1 || config.replicates < 1) {
    throw DataError("var_selection: permutations and replicates must be >= 1");
  }
  const std::size_t p = frame.n_cols();
  VarSelectionResult result;
  result.alpha = config.alpha;

  {
    const ProportionReport obs =
        inclusion_proportions_avg(frame, hyper, config.replicates, seed, threads);
    result.observed = obs.mean;
  }

  result.nulls.assign(config.permutations, std::vector<double>(p, 0.0));
  parallel_for(config.permutations, threads, [&](std::size_t perm) {
    const ModelFrame null_frame =
        frame.permute_response(derive_seed(seed, SeedStream::Permutation, perm));
    const PosteriorEnsemble model = train(
        null_frame, hyper,
        derive_seed(seed, SeedStream::Replicate,
                    static_cast<std::uint64_t>(config.replicates) + perm));
    result.nulls[perm] = inclusion_proportions(model);
  });

  // Local: each column against its own null quantile.
  result.local_thresholds.assign(p, 0.0);
  for (std::size_t j = 0; j < p; ++j) {
    std::vector<double> column(config.permutations);
    for (int perm = 0; perm < config.permutations; ++perm) {
      column[perm] = result.nulls[perm][j];
    }
    result.local_thresholds[j] = stats::permutation_threshold(column, config.alpha);
    if (result.observed[j] > result.local_thresholds[j]) result.local.push_back(j);
  }

  // Global max: every column against the permutation maxima.
  std::vector<double> maxima(config.permutations, 0.0);
  for (int perm = 0; perm < config.permutations; ++perm) {
    maxima[perm] = *std::max_element(result.nulls[perm].begin(), result.nulls[perm].end());
  }
  result.global_max_threshold = stats::permutation_threshold(maxima, config.alpha);
  for (std::size_t j = 0; j < p; ++j) {
    if (result.observed[j] > result.global_max_threshold) result.global_max.push_back(j);
  }

  // Global SE: shared multiplier C so that a (1 - alpha) share of the
  // permutations sit fully below mean_j + C * sd_j, then per-column cutoffs.
  result.null_mean.assign(p, 0.0);
  result.null_sd.assign(p, 0.0);
  for (std::size_t j = 0; j < p; ++j) {
    std::vector<double> column(config.permutations);
    for (int perm = 0; perm < config.permutations; ++perm) {
      column[perm] = result.nulls[perm][j];
    }
    result.null_mean[j] = stats::mean(column);
    result.null_sd[j] =
        config.permutations > 1 ? std::sqrt(stats::variance(column)) : 0.0;
  }
  std::vector<double> needed(config.permutations, 0.0);
  for (int perm = 0; perm < config.permutations; ++perm) {
    double c = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < p; ++j) {
      const double dev = result.nulls[perm][j] - result.null_mean[j];
      if (result.null_sd[j] > 0.0) {
        c = std::max(c, dev / result.null_sd[j]);
      } else if (dev > 0.0) {
        c = std::numeric_limits<double>::infinity();
      }
    }
    needed[perm] = c;
  }
  result.se_multiplier = stats::permutation_threshold(needed, config.alpha);
  for (std::size_t j = 0; j < p; ++j) {
    const double cutoff =
        result.null_mean[j] + result.se_multiplier * result.null_sd[j];
    if (result.observed[j] > cutoff) result.global_se.push_back(j);
  }
  return result;
}

namespace {

// Held-out error when refitting on a column subset; empty selections fall
// back to the constant (training mean / majority) predictor.
double score_selection(const ModelFrame& train_frame, const ModelFrame& test_frame,
                       const std::vector<std::size_t>& selected,
                       const Hyperparameters& hyper, std::uint64_t seed) {
  const bool classification = train_frame.classification();
  const std::size_t n_test = test_frame.n_rows();
  std::vector<double> predictions(n_test, 0.0);
  if (selected.empty()) {
    const double mean_y = stats::mean(train_frame.response());
    std::fill(predictions.begin(), predictions.end(),
              classification ? (mean_y >= 0.5 ? 1.0 : 0.0) : mean_y);
  } else {
    const ModelFrame train_sel = train_frame.select_columns(selected);
    const ModelFrame test_sel = test_frame.select_columns(selected);
    const PosteriorEnsemble model = train(train_sel, hyper, seed);
    if (classification) {
      const PredictionResult pred = predict(model, test_sel);
      for (std::size_t i = 0; i < n_test; ++i) {
        predictions[i] = pred.label[i];
      }
    } else {
      predictions = predict_point(model, test_sel);
    }
  }
  if (classification) {
    long wrong = 0;
    for (std::size_t i = 0; i < n_test; ++i) {
      const int actual = test_frame.response()[i] > 0.5 ? 1 : 0;
      if (actual != (predictions[i] > 0.5 ? 1 : 0)) ++wrong;
    }
    return static_cast<double>(wrong) / static_cast<double>(n_test);
  }
  double sse = 0.0;
  for (std::size_t i = 0; i < n_test; ++i) {
    const double e = test_frame.response()[i] - predictions[i];
    sse += e * e;
  }
  return std::sqrt(sse / static_cast<double>(n_test));
}

}  // namespace

VarSelectionCvResult var_selection_cv(const ModelFrame& frame,
                                      const Hyperparameters& hyper,
                                      const VarSelectionConfig& config, int folds,
                                      std::uint64_t seed, int threads) {
  if (folds < 2) throw DataError("var_selection_cv: need folds >= 2");
  const FoldAssignment assignment =
      kfold_split(frame.n_rows(), folds, derive_seed(seed, SeedStream::Fold, 0));
  double totals[3] = {0.0, 0.0, 0.0};
  for (int f = 1; f <= folds; ++f) {
    const ModelFrame train_frame = frame.subset_rows(assignment.rows_not_in_fold(f));
    const ModelFrame test_frame = frame.subset_rows(assignment.rows_in_fold(f));
    const std::uint64_t fold_seed = derive_seed(seed, SeedStream::Fold, 100 + f);
    const VarSelectionResult vs =
        var_selection(train_frame, hyper, config, fold_seed, threads);
    const std::vector<std::size_t>* sets[3] = {&vs.local, &vs.global_max,
                                               &vs.global_se};
    for (int m = 0; m < 3; ++m) {
      totals[m] += score_selection(train_frame, test_frame, *sets[m], hyper,
                                   derive_seed(fold_seed, SeedStream::Replicate,
                                               900 + m));
    }
  }
  VarSelectionCvResult result;
  for (int m = 0; m < 3; ++m) result.score[m] = totals[m] / folds;
  int best = 0;
  for (int m = 1; m < 3; ++m) {
    if (result.score[m] < result.score[best]) best = m;
  }
  result.best = static_cast<SelectionMethod>(best);
  const VarSelectionResult full = var_selection(
      frame, hyper, config, derive_seed(seed, SeedStream::Replicate, 777), threads);
  switch (result.best) {
    case SelectionMethod::Local:
      result.selected = full.local;
      break;
    case SelectionMethod::GlobalMax:
      result.selected = full.global_max;
      break;
    case SelectionMethod::GlobalSE:
      result.selected = full.global_se;
      break;
  }
  return result;
}

CrossValidationResult k_fold_cv(const ModelFrame& frame, const Hyperparameters& hyper,
                                int k, std::uint64_t seed, int threads) {
  const FoldAssignment assignment =
      kfold_split(frame.n_rows(), k, derive_seed(seed, SeedStream::Fold, 0));
  CrossValidationResult result;
  result.fold_of_row = assignment.fold_of_row;
  result.predictions.assign(frame.n_rows(), 0.0);
  parallel_for(k, threads, [&](std::size_t fold_index) {
    const int f = static_cast<int>(fold_index) + 1;
    const auto train_rows = assignment.rows_not_in_fold(f);
    const auto test_rows = assignment.rows_in_fold(f);
    const ModelFrame train_frame = frame.subset_rows(train_rows);
    const ModelFrame test_frame = frame.subset_rows(test_rows);
    const PosteriorEnsemble model =
        train(train_frame, hyper, derive_seed(seed, SeedStream::Fold, 500 + f));
    if (frame.classification()) {
      const PredictionResult pred = predict(model, test_frame);
      for (std::size_t i = 0; i < test_rows.size(); ++i) {
        result.predictions[test_rows[i]] = pred.probability[i];
      }
    } else {
      const std::vector<double> point = predict_point(model, test_frame);
      for (std::size_t i = 0; i < test_rows.size(); ++i) {
        result.predictions[test_rows[i]] = point[i];
      }
    }
  });
  if (frame.classification()) {
    std::vector<int> actual(frame.n_rows());
    std::vector<int> predicted(frame.n_rows());
    for (std::size_t i = 0; i < frame.n_rows(); ++i) {
      actual[i] = frame.response()[i] > 0.5 ? 1 : 0;
      predicted[i] = result.predictions[i] >= hyper.prob_rule_class ? 1 : 0;
    }
    result.confusion = stats::confusion_matrix(actual, predicted);
    result.misclassification = result.confusion.error_rate();
  } else {
    result.fit = stats::fit_stats(frame.response(), result.predictions);
  }
  return result;
}

std::vector<Hyperparameters> default_cv_grid(const Hyperparameters& base,
                                             bool classification) {
  const double ks[] = {2.0, 3.0, 5.0};
  const std::pair<double, double> nuqs[] = {{3.0, 0.9}, {3.0, 0.99}, {10.0, 0.75}};
  const int ms[] = {50, 200};
  std::vector<Hyperparameters> grid;
  for (double k : ks) {
    if (classification) {
      for (int m : ms) {
        Hyperparameters h = base;
        h.k = k;
        h.num_trees = m;
        grid.push_back(h);
      }
    } else {
      for (const auto& [nu, q] : nuqs) {
        for (int m : ms) {
          Hyperparameters h = base;
          h.k = k;
          h.nu = nu;
          h.q = q;
          h.num_trees = m;
          grid.push_back(h);
        }
      }
    }
  }
  return grid;
}

GridSearchResult cv_grid_search(const ModelFrame& frame, const Hyperparameters& base,
                                std::span<const Hyperparameters> grid, int folds,
                                std::uint64_t seed, int threads) {
  (void)base;
  if (grid.empty()) throw DataError("cv_grid_search: empty grid");
  GridSearchResult result;
  result.cells.resize(grid.size());
  // The same seed (hence the same folds) is used for every cell.
  for (std::size_t c = 0; c < grid.size(); ++c) {
    const CrossValidationResult cv = k_fold_cv(frame, grid[c], folds, seed, threads);
    result.cells[c].hyper = grid[c];
    result.cells[c].score =
        frame.classification() ? cv.misclassification : cv.fit.rmse;
  }
  result.winner = 0;
  for (std::size_t c = 1; c < grid.size(); ++c) {
    if (result.cells[c].score < result.cells[result.winner].score) result.winner = c;
  }
  return result;
}

RmseByTrees rmse_by_num_trees(const ModelFrame& frame, const Hyperparameters& hyper,
                              std::span<const int> tree_counts, int replicates,
                              std::uint64_t seed, int threads) {
  if (replicates < 1) throw DataError("rmse_by_num_trees: replicates >= 1");
  if (tree_counts.empty()) throw DataError("rmse_by_num_trees: no tree counts");
  const std::size_t n = frame.n_rows();
  RmseByTrees result;
  result.tree_counts.assign(tree_counts.begin(), tree_counts.end());
  result.rmse.assign(tree_counts.size(), 0.0);

  // One 80/20 split per replicate, shared across all tree counts.
  std::vector<std::vector<std::size_t>> train_rows(replicates), test_rows(replicates);
  for (int r = 0; r < replicates; ++r) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(seed, SeedStream::Holdout, r));
    rng.shuffle(order);
    const std::size_t cut = std::max<std::size_t>(1, (n * 4) / 5);
    train_rows[r].assign(order.begin(), order.begin() + cut);
    test_rows[r].assign(order.begin() + cut, order.end());
  }

  std::vector<double> scores(tree_counts.size() * replicates, 0.0);
  parallel_for(scores.size(), threads, [&](std::size_t task) {
    const std::size_t t = task / replicates;
    const std::size_t r = task % replicates;
    Hyperparameters h = hyper;
    h.num_trees = tree_counts[t];
    const ModelFrame train_frame = frame.subset_rows(train_rows[r]);
    const ModelFrame test_frame = frame.subset_rows(test_rows[r]);
    const PosteriorEnsemble model =
        train(train_frame, h, derive_seed(seed, SeedStream::Replicate, task));
    const std::vector<double> point = predict_point(model, test_frame);
    double sse = 0.0;
    for (std::size_t i = 0; i < test_frame.n_rows(); ++i) {
      const double e = test_frame.response()[i] - point[i];
      sse += e * e;
    }
    scores[task] = std::sqrt(sse / static_cast<double>(test_frame.n_rows()));
  });
  for (std::size_t t = 0; t < tree_counts.size(); ++t) {
    double acc = 0.0;
    for (int r = 0; r < replicates; ++r) {
      acc += scores[t * static_cast<std::size_t>(replicates) + r];
    }
    result.rmse[t] = acc / replicates;
  }
  return result;
}

}  // namespace bart
