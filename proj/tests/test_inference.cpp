#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "bart/dataset.hpp"
#include "bart/errors.hpp"
#include "bart/inference.hpp"

using namespace bart;

namespace {

// Hand-built ensemble whose every tree is a single leaf with a fixed value.
PosteriorEnsemble constant_ensemble(const ModelFrame& frame, int num_trees,
                                    double leaf_value, std::size_t samples,
                                    double sigma_sq = 0.0) {
  PosteriorEnsemble e;
  e.hyper.num_trees = num_trees;
  e.meta = frame.preprocess();
  e.mu_offset = 0.0;
  e.chains = 1;
  e.burn_in = 0;
  e.kept_per_chain = static_cast<long>(samples);
  TreeSnapshot leaf;
  leaf.nodes.push_back(SnapshotNode{});
  leaf.nodes[0].leaf_value = leaf_value;
  for (std::size_t s = 0; s < samples; ++s) {
    PosteriorSample sample;
    sample.sigma_sq = sigma_sq;
    sample.trees.assign(num_trees, leaf);
    e.samples.push_back(sample);
  }
  ChainTrace trace;
  trace.burn_in = 0;
  trace.kept = static_cast<long>(samples);
  trace.sigma_sq.assign(samples, sigma_sq);
  trace.acceptance.assign(samples, 0.0);
  trace.mean_leaves.assign(samples, 1.0);
  trace.mean_depth.assign(samples, 0.0);
  e.traces.push_back(trace);
  return e;
}

Hyperparameters small_hyper(int trees = 10, long burn = 50, long post = 150) {
  Hyperparameters h;
  h.num_trees = trees;
  h.burn_in = burn;
  h.post_burn_in = post;
  return h;
}

}  // namespace

TEST_CASE("constant ensembles predict m times the leaf value") {
  const ModelFrame f = generate_friedman(12, 5, 1.0, 3);
  const PosteriorEnsemble e = constant_ensemble(f, 7, 0.5, 20);
  const std::vector<double> point = predict_point(e, f);
  for (double v : point) CHECK(v == doctest::Approx(3.5));
}

TEST_CASE("classification probabilities and labels at zero latent") {
  std::vector<std::vector<double>> cols{{0.2, 0.4, 0.6, 0.8}};
  const ModelFrame f = frame_from_matrix(cols, {0, 1, 0, 1}, true);
  PosteriorEnsemble e = constant_ensemble(f, 3, 0.0, 10, 1.0);
  e.hyper.prob_rule_class = 0.5;
  const PredictionResult pred = predict(e, f);
  for (std::size_t i = 0; i < f.n_rows(); ++i) {
    CHECK(pred.probability[i] == doctest::Approx(0.5));
    CHECK(pred.label[i] == 1);  // prob >= threshold
  }
  e.hyper.prob_rule_class = 0.6;
  const PredictionResult pred2 = predict(e, f);
  for (std::size_t i = 0; i < f.n_rows(); ++i) CHECK(pred2.label[i] == 0);
}

TEST_CASE("prediction schema checks") {
  const ModelFrame f = generate_friedman(12, 5, 1.0, 3);
  const PosteriorEnsemble e = constant_ensemble(f, 2, 0.0, 5);
  const ModelFrame wrong = generate_friedman(12, 6, 1.0, 3);
  CHECK_THROWS_AS(predict_point(e, wrong), ModelError);

  // missing values are rejected when the model was trained without them
  const RawTable t = parse_csv("x1,x2,x3,x4,x5,y\n1,2,3,4,5,1\nNA,2,3,4,5,2\n", "y");
  const ModelFrame with_na = build_model_frame(t, true, false);
  PosteriorEnsemble e2 = constant_ensemble(with_na, 2, 0.0, 5);
  e2.meta.use_missing_data = false;
  CHECK_THROWS_AS(predict_point(e2, with_na), ModelError);
  e2.meta.use_missing_data = true;
  CHECK_NOTHROW(predict_point(e2, with_na));
}

TEST_CASE("degenerate posterior collapses both intervals") {
  const ModelFrame f = generate_friedman(6, 5, 1.0, 3);
  const PosteriorEnsemble e = constant_ensemble(f, 4, 0.25, 30, 0.0);
  const auto ci = credible_intervals(e, f, 0.95);
  const auto pi = prediction_intervals(e, f, 0.95, 500, 1);
  for (std::size_t i = 0; i < f.n_rows(); ++i) {
    CHECK(ci[i].lower == doctest::Approx(1.0));
    CHECK(ci[i].upper == doctest::Approx(1.0));
    CHECK(pi[i].lower == doctest::Approx(1.0));
    CHECK(pi[i].upper == doctest::Approx(1.0));
  }
}

TEST_CASE("credible bounds sit inside prediction bounds") {
  const ModelFrame f = generate_friedman(60, 5, 1.0, 5);
  const PosteriorEnsemble model = train(f, small_hyper(15, 80, 200), 4);
  const auto ci = credible_intervals(model, f, 0.9);
  const auto pi = prediction_intervals(model, f, 0.9, 1000, 9);
  for (std::size_t i = 0; i < f.n_rows(); ++i) {
    CHECK(ci[i].lower <= ci[i].upper);
    // noise only widens; allow a small monte-carlo slack
    const double slack = 0.05 * (ci[i].upper - ci[i].lower) + 1e-9;
    CHECK(pi[i].lower <= ci[i].lower + slack);
    CHECK(pi[i].upper >= ci[i].upper - slack);
  }
}

TEST_CASE("prediction intervals refuse classification") {
  std::vector<std::vector<double>> cols{{0.2, 0.4, 0.6, 0.8}};
  const ModelFrame f = frame_from_matrix(cols, {0, 1, 0, 1}, true);
  const PosteriorEnsemble e = constant_ensemble(f, 1, 0.0, 5, 1.0);
  CHECK_THROWS_AS(prediction_intervals(e, f, 0.95, 100, 1), DataError);
  // credible intervals come back on the probability scale
  const auto ci = credible_intervals(e, f, 0.95);
  CHECK(ci[0].lower == doctest::Approx(0.5));
  CHECK(ci[0].upper == doctest::Approx(0.5));
}

TEST_CASE("inclusion proportions") {
  const ModelFrame f = generate_friedman(10, 5, 1.0, 3);
  SUBCASE("no splits anywhere reports zeros") {
    const PosteriorEnsemble e = constant_ensemble(f, 3, 0.1, 4);
    const auto props = inclusion_proportions(e);
    for (double p : props) CHECK(p == 0.0);
  }
  SUBCASE("a single split is a unit proportion") {
    PosteriorEnsemble e = constant_ensemble(f, 1, 0.0, 1);
    TreeSnapshot split;
    split.nodes.resize(3);
    split.nodes[0] = {1, 0.5, 1, 1, 2, 0.0};
    split.nodes[1] = {-1, 0, 0, -1, -1, 0.3};
    split.nodes[2] = {-1, 0, 0, -1, -1, -0.3};
    e.samples[0].trees[0] = split;
    const auto props = inclusion_proportions(e);
    CHECK(props == std::vector<double>{0, 1, 0, 0, 0});
  }
}

TEST_CASE("interaction counts fold parent-child pairs") {
  const ModelFrame f = generate_friedman(10, 5, 1.0, 3);
  SUBCASE("stump ensembles have an empty matrix") {
    const PosteriorEnsemble e = constant_ensemble(f, 2, 0.1, 3);
    const auto m = interaction_counts(e);
    for (const auto& row : m) {
      for (double v : row) CHECK(v == 0.0);
    }
  }
  SUBCASE("one parent-child pair counts once after folding") {
    PosteriorEnsemble e = constant_ensemble(f, 1, 0.0, 1);
    TreeSnapshot tree;
    tree.nodes.resize(5);
    tree.nodes[0] = {0, 0.5, 1, 1, 2, 0.0};   // root on feature 0
    tree.nodes[1] = {1, 0.5, 1, 3, 4, 0.0};   // left child on feature 1
    tree.nodes[2] = {-1, 0, 0, -1, -1, 0.1};
    tree.nodes[3] = {-1, 0, 0, -1, -1, 0.2};
    tree.nodes[4] = {-1, 0, 0, -1, -1, 0.3};
    e.samples[0].trees[0] = tree;
    const auto m = interaction_counts(e);
    CHECK(m[0][1] == 1.0);
    CHECK(m[1][0] == 1.0);  // symmetric after folding
    CHECK(m[0][0] == 0.0);
    CHECK(m[1][1] == 0.0);
  }
  SUBCASE("self-interaction lands on the diagonal") {
    PosteriorEnsemble e = constant_ensemble(f, 1, 0.0, 1);
    TreeSnapshot tree;
    tree.nodes.resize(5);
    tree.nodes[0] = {2, 0.5, 1, 1, 2, 0.0};
    tree.nodes[1] = {2, 0.25, 1, 3, 4, 0.0};
    tree.nodes[2] = {-1, 0, 0, -1, -1, 0.1};
    tree.nodes[3] = {-1, 0, 0, -1, -1, 0.2};
    tree.nodes[4] = {-1, 0, 0, -1, -1, 0.3};
    e.samples[0].trees[0] = tree;
    const auto m = interaction_counts(e);
    CHECK(m[2][2] == 1.0);
  }
}

TEST_CASE("averaged importance comes with bands") {
  const ModelFrame f = generate_friedman(60, 5, 1.0, 12);
  const ProportionReport rep =
      inclusion_proportions_avg(f, small_hyper(5, 30, 60), 3, 4, 2);
  CHECK(rep.mean.size() == 5);
  for (std::size_t j = 0; j < 5; ++j) {
    CHECK(rep.lower[j] <= rep.mean[j]);
    CHECK(rep.mean[j] <= rep.upper[j]);
  }
  double total = 0;
  for (double v : rep.mean) total += v;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("covariate importance p-value is the exceedance fraction") {
  const ModelFrame f = generate_friedman(50, 5, 1.0, 21);
  const Hyperparameters hyper = small_hyper(5, 30, 60);
  std::vector<std::string> cov{"x1"};
  const CovImportanceResult r = cov_importance_test(f, hyper, cov, 6, 3, 2);
  CHECK(r.null_stats.size() == 6);
  long count = 0;
  for (double s : r.null_stats) {
    if (s > r.observed) ++count;
  }
  CHECK(r.p_value == doctest::Approx(static_cast<double>(count) / 6.0));
  CHECK(r.p_value >= 0.0);
  CHECK(r.p_value <= 1.0);

  // omnibus mode permutes the response instead
  const CovImportanceResult omni = cov_importance_test(f, hyper, {}, 4, 3, 2);
  CHECK(omni.covariates.empty());
  CHECK(omni.null_stats.size() == 4);

  std::vector<std::string> unknown{"nope"};
  CHECK_THROWS_AS(cov_importance_test(f, hyper, unknown, 2, 3, 2), DataError);
}

TEST_CASE("partial dependence grid and flat response") {
  const ModelFrame f = generate_friedman(40, 5, 1.0, 8);
  const PosteriorEnsemble e = constant_ensemble(f, 3, 0.2, 10);
  const PartialDependenceResult pdp = partial_dependence(e, f, 2);
  CHECK(pdp.grid.size() == 11);
  CHECK(std::is_sorted(pdp.grid.begin(), pdp.grid.end()));
  for (std::size_t g = 0; g < pdp.grid.size(); ++g) {
    CHECK(pdp.estimate[g] == doctest::Approx(0.6));
    CHECK(pdp.lower[g] == doctest::Approx(0.6));
    CHECK(pdp.upper[g] == doctest::Approx(0.6));
  }
  // degenerate feature refuses
  std::vector<std::vector<double>> cols{{1, 1, 1}, {1, 2, 3}};
  const ModelFrame fc = frame_from_matrix(cols, {0, 0, 0});
  const PosteriorEnsemble ec = constant_ensemble(fc, 1, 0.0, 3);
  CHECK_THROWS_AS(partial_dependence(ec, fc, 0), DataError);
}

TEST_CASE("partial dependence recovers a linear effect") {
  // y = 10 x1, noiseless; the partial dependence of x1 has slope near 10
  Rng rng(40);
  const std::size_t n = 150;
  std::vector<std::vector<double>> cols(3, std::vector<double>(n));
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& c : cols) c[i] = rng.uniform();
    y[i] = 10.0 * cols[0][i];
  }
  const ModelFrame f = frame_from_matrix(cols, y);
  const PosteriorEnsemble model = train(f, small_hyper(30, 150, 400), 17);
  const PartialDependenceResult pdp = partial_dependence(model, f, 0, 2);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(pdp.grid.size());
  for (std::size_t g = 0; g < pdp.grid.size(); ++g) {
    sx += pdp.grid[g];
    sy += pdp.estimate[g];
    sxx += pdp.grid[g] * pdp.grid[g];
    sxy += pdp.grid[g] * pdp.estimate[g];
  }
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  CHECK(slope == doctest::Approx(10.0).epsilon(0.1));
}

TEST_CASE("k-fold cross-validation covers every row exactly once") {
  const ModelFrame f = generate_friedman(60, 5, 1.0, 10);
  const CrossValidationResult cv = k_fold_cv(f, small_hyper(8, 40, 80), 4, 5, 2);
  CHECK(cv.predictions.size() == 60);
  CHECK(cv.fold_of_row.size() == 60);
  std::set<int> folds(cv.fold_of_row.begin(), cv.fold_of_row.end());
  CHECK(folds == std::set<int>{1, 2, 3, 4});
  CHECK(std::isfinite(cv.fit.pseudo_r_sq));
  CHECK(cv.fit.rmse > 0.0);
  // same seed, same folds and predictions regardless of threading
  const CrossValidationResult cv2 = k_fold_cv(f, small_hyper(8, 40, 80), 4, 5, 1);
  CHECK(cv2.predictions == cv.predictions);
}

TEST_CASE("classification cross-validation reports a confusion matrix") {
  const RawTable raw = load_csv(std::string(BART_DATA_DIR) + "/diabetes.csv",
                                "diabetes");
  CHECK(raw.classification);
  const ModelFrame f = build_model_frame(raw, false, false);
  const CrossValidationResult cv = k_fold_cv(f, small_hyper(10, 40, 80), 3, 5, 2);
  CHECK(cv.confusion.total() == static_cast<long>(f.n_rows()));
  CHECK(cv.misclassification >= 0.0);
  CHECK(cv.misclassification < 0.5);  // better than coin flipping
}

TEST_CASE("grid search contracts") {
  const ModelFrame f = generate_friedman(50, 5, 1.0, 14);
  const Hyperparameters base = small_hyper(4, 20, 40);

  SUBCASE("default grid shape and contents") {
    const auto reg_grid = default_cv_grid(base, false);
    CHECK(reg_grid.size() == 18);  // 3 k x 3 (nu,q) x 2 m
    bool has_reference_cell = false;
    for (const auto& h : reg_grid) {
      if (h.k == 2.0 && h.nu == 3.0 && h.q == 0.9 && h.num_trees == 200) {
        has_reference_cell = true;
      }
    }
    CHECK(has_reference_cell);
    const auto cls_grid = default_cv_grid(base, true);
    CHECK(cls_grid.size() == 6);  // nu,q dropped
  }

  SUBCASE("single-cell grid wins trivially") {
    std::vector<Hyperparameters> grid{base};
    const GridSearchResult r = cv_grid_search(f, base, grid, 2, 3, 2);
    CHECK(r.winner == 0);
    CHECK(r.cells.size() == 1);
  }

  SUBCASE("winner has the lowest stored score") {
    std::vector<Hyperparameters> grid;
    for (int m : {2, 6, 12}) {
      Hyperparameters h = base;
      h.num_trees = m;
      grid.push_back(h);
    }
    const GridSearchResult r = cv_grid_search(f, base, grid, 2, 3, 2);
    for (const auto& cell : r.cells) {
      CHECK(r.cells[r.winner].score <= cell.score);
    }
  }
}

TEST_CASE("rmse by tree count") {
  const ModelFrame f = generate_friedman(60, 5, 1.0, 15);
  const std::vector<int> counts{5};
  const RmseByTrees one = rmse_by_num_trees(f, small_hyper(5, 20, 40), counts, 1, 3, 2);
  CHECK(one.rmse.size() == 1);
  CHECK(one.rmse[0] > 0.0);

  const std::vector<int> sweep{2, 8, 16};
  const RmseByTrees r = rmse_by_num_trees(f, small_hyper(5, 20, 40), sweep, 2, 3, 2);
  CHECK(r.rmse.size() == 3);
  CHECK(r.tree_counts == std::vector<int>{2, 8, 16});
}

TEST_CASE("variable selection structure") {
  const ModelFrame f = generate_friedman(80, 6, 1.0, 16);
  VarSelectionConfig config;
  config.permutations = 6;
  config.replicates = 2;
  config.alpha = 0.1;
  const VarSelectionResult r = var_selection(f, small_hyper(5, 30, 60), config, 3, 2);
  CHECK(r.observed.size() == 6);
  CHECK(r.nulls.size() == 6);
  CHECK(r.local_thresholds.size() == 6);
  CHECK(r.null_mean.size() == 6);
  // selections are consistent with their stated thresholds
  for (std::size_t j = 0; j < 6; ++j) {
    const bool in_local =
        std::find(r.local.begin(), r.local.end(), j) != r.local.end();
    CHECK(in_local == (r.observed[j] > r.local_thresholds[j]));
    const bool in_gmax =
        std::find(r.global_max.begin(), r.global_max.end(), j) != r.global_max.end();
    CHECK(in_gmax == (r.observed[j] > r.global_max_threshold));
    const bool in_gse =
        std::find(r.global_se.begin(), r.global_se.end(), j) != r.global_se.end();
    CHECK(in_gse ==
          (r.observed[j] > r.null_mean[j] + r.se_multiplier * r.null_sd[j]));
  }
}

TEST_CASE("variable selection cross-validation picks a method") {
  const ModelFrame f = generate_friedman(60, 5, 1.0, 18);
  VarSelectionConfig config;
  config.permutations = 4;
  config.replicates = 1;
  const VarSelectionCvResult r =
      var_selection_cv(f, small_hyper(5, 20, 40), config, 2, 6, 2);
  CHECK((r.best == SelectionMethod::Local || r.best == SelectionMethod::GlobalMax ||
         r.best == SelectionMethod::GlobalSE));
  for (auto idx : r.selected) CHECK(idx < 5);
  for (int m = 0; m < 3; ++m) CHECK(r.score[m] >= 0.0);
}

TEST_CASE("in-sample statistic switches by task") {
  const ModelFrame f = generate_friedman(30, 5, 1.0, 19);
  const PosteriorEnsemble e = constant_ensemble(f, 1, 0.0, 4);
  // constant predictor at 0: pseudo-R^2 <= 0
  CHECK(in_sample_statistic(e, f) <= 0.0);
}
