#include "bart/priors.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "bart/errors.hpp"
#include "bart/stats.hpp"

namespace bart {

void Hyperparameters::validate() const {
  if (num_trees < 1) throw DataError("hyperparameters: num_trees must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DataError("hyperparameters: alpha must be in (0,1)");
  if (beta < 0.0) throw DataError("hyperparameters: beta must be >= 0");
  if (k <= 0.0) throw DataError("hyperparameters: k must be > 0");
  if (nu <= 0.0) throw DataError("hyperparameters: nu must be > 0");
  if (!(q > 0.0 && q < 1.0)) throw DataError("hyperparameters: q must be in (0,1)");
  const double psum = proposals.grow + proposals.prune + proposals.change;
  if (proposals.grow <= 0.0 || proposals.prune <= 0.0 || proposals.change < 0.0 ||
      std::abs(psum - 1.0) > 1e-9) {
    throw DataError("hyperparameters: proposal probabilities must be positive and sum to 1");
  }
  for (double w : cov_prior_vec) {
    if (!(w > 0.0)) throw DataError("hyperparameters: covariate prior weights must be > 0");
  }
  if (burn_in < 0) throw DataError("hyperparameters: burn_in must be >= 0");
  if (post_burn_in < 1) throw DataError("hyperparameters: post_burn_in must be >= 1");
  if (chains < 1) throw DataError("hyperparameters: chains must be >= 1");
  if (!(prob_rule_class > 0.0 && prob_rule_class < 1.0)) {
    throw DataError("hyperparameters: prob_rule_class must be in (0,1)");
  }
  if (use_missing_dummies && !use_missing_data) {
    throw DataError("hyperparameters: missing dummies require the missing-data feature");
  }
}

double prob_split(int depth, double alpha, double beta) {
  if (depth < 0) throw InternalError("prob_split: negative depth");
  return alpha * std::pow(1.0 + static_cast<double>(depth), -beta);
}

LeafPrior calibrate_leaf_prior(double y_min, double y_max, int num_trees, double k) {
  if (!(y_max > y_min)) {
    throw DataError("leaf prior calibration: response range is empty (constant response?)");
  }
  LeafPrior out;
  out.mu_mu = 0.5 * (y_min + y_max);
  out.sigma_mu = (y_max - out.mu_mu) / (k * std::sqrt(static_cast<double>(num_trees)));
  return out;
}

NoisePrior calibrate_lambda(const ModelFrame& frame, double nu, double q) {
  const std::vector<double>& y = frame.response();
  const std::size_t n = y.size();
  if (n < 2) throw DataError("noise prior calibration: need n >= 2");

  // Columns with missing entries stay out of the least-squares design.
  std::vector<std::size_t> usable;
  for (std::size_t j = 0; j < frame.n_cols(); ++j) {
    if (!frame.column_has_missing(j)) usable.push_back(j);
  }

  double sigsq = stats::variance(y);
  if (!usable.empty() && n > usable.size() + 1) {
    Eigen::MatrixXd design(n, usable.size() + 1);
    Eigen::VectorXd resp(n);
    for (std::size_t i = 0; i < n; ++i) {
      design(i, 0) = 1.0;
      for (std::size_t c = 0; c < usable.size(); ++c) {
        design(i, c + 1) = frame.value(i, usable[c]);
      }
      resp(i) = y[i];
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    const auto rank = qr.rank();
    if (static_cast<std::size_t>(rank) < n) {
      const Eigen::VectorXd coef = qr.solve(resp);
      const double sse = (resp - design * coef).squaredNorm();
      const double dof = static_cast<double>(n) - static_cast<double>(rank);
      if (dof >= 1.0) {
        const double ols = sse / dof;
        if (std::isfinite(ols) && ols > 0.0) sigsq = ols;
      }
    }
  }
  if (!(sigsq > 0.0)) {
    throw DataError("noise prior calibration: response variance is zero");
  }

  NoisePrior out;
  out.sigsq_hat = sigsq;
  out.lambda = sigsq * stats::chi_squared_quantile(1.0 - q, nu) / nu;
  return out;
}

CalibratedPriors calibrate_priors(const ModelFrame& frame, const Hyperparameters& hyper) {
  hyper.validate();
  CalibratedPriors cal;
  const double root_m = std::sqrt(static_cast<double>(hyper.num_trees));
  if (frame.classification()) {
    // Latent probit scale: center at zero, span (-3, 3).
    cal.mu_mu = 0.0;
    cal.sigma_mu = 3.0 / (hyper.k * root_m);
    cal.lambda = 0.0;
    cal.sigsq_hat = 1.0;
    return cal;
  }
  const auto [y_min, y_max] =
      std::minmax_element(frame.response().begin(), frame.response().end());
  const LeafPrior leaf = calibrate_leaf_prior(*y_min, *y_max, hyper.num_trees, hyper.k);
  cal.mu_mu = leaf.mu_mu;
  cal.sigma_mu = leaf.sigma_mu;
  const NoisePrior noise = calibrate_lambda(frame, hyper.nu, hyper.q);
  cal.lambda = noise.lambda;
  cal.sigsq_hat = noise.sigsq_hat;
  return cal;
}

std::vector<double> default_cov_prior(const ModelFrame& frame,
                                      std::span<const double> base_weights) {
  const auto& meta = frame.column_meta();
  if (!base_weights.empty() && base_weights.size() != frame.preprocess().sources.size()) {
    throw DataError("covariate prior: need one weight per source column");
  }
  std::vector<double> source_weight;
  for (std::size_t s = 0; s < frame.preprocess().sources.size(); ++s) {
    source_weight.push_back(base_weights.empty() ? 1.0 : base_weights[s]);
  }
  std::vector<double> weights(frame.n_cols(), 1.0);
  for (std::size_t j = 0; j < frame.n_cols(); ++j) {
    double w = 1.0;
    for (std::size_t s = 0; s < frame.preprocess().sources.size(); ++s) {
      if (frame.preprocess().sources[s].name == meta[j].source) {
        w = source_weight[s];
        break;
      }
    }
    if (!meta[j].level.empty() && !meta[j].is_missing_dummy) {
      const auto group = frame.dummy_groups().find(meta[j].source);
      if (group != frame.dummy_groups().end() && !group->second.empty()) {
        w /= static_cast<double>(group->second.size());
      }
    }
    weights[j] = w;
  }
  return weights;
}

std::vector<double> effective_cov_prior(const ModelFrame& frame,
                                        const Hyperparameters& hyper) {
  if (hyper.cov_prior_vec.empty()) return default_cov_prior(frame);
  if (hyper.cov_prior_vec.size() != frame.n_cols()) {
    throw DataError("covariate prior vector has " +
                    std::to_string(hyper.cov_prior_vec.size()) + " entries, frame has " +
                    std::to_string(frame.n_cols()) + " columns");
  }
  return hyper.cov_prior_vec;
}

namespace {

double node_log_prior(Node& node, const ModelFrame& frame,
                      const Hyperparameters& hyper,
                      std::span<const double> cov_weights,
                      std::vector<FeatureSummary>& scratch) {
  const double p_split = prob_split(node.depth, hyper.alpha, hyper.beta);
  if (node.is_leaf()) return std::log1p(-p_split);
  const bool mia = frame.preprocess().use_missing_data;
  const auto& summaries = node_summaries(node, frame, hyper.memcache, scratch);
  const AvailablePredictors avail = available_predictors(summaries, cov_weights, mia);
  const double w = avail.weight_of(node.rule.feature);
  const int count = avail.count_of(node.rule.feature);
  if (w <= 0.0 || count <= 0) {
    throw InternalError("tree_structure_log_prior: rule not available at its node");
  }
  double value = std::log(p_split) + std::log(w) - std::log(static_cast<double>(count));
  value += node_log_prior(*node.left, frame, hyper, cov_weights, scratch);
  value += node_log_prior(*node.right, frame, hyper, cov_weights, scratch);
  return value;
}

}  // namespace

double tree_structure_log_prior(Tree& tree, const ModelFrame& frame,
                                const Hyperparameters& hyper,
                                std::span<const double> cov_weights) {
  std::vector<FeatureSummary> scratch;
  return node_log_prior(tree.root(), frame, hyper, cov_weights, scratch);
}

}  // namespace bart
