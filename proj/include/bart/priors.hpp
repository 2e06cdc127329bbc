#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bart/dataset.hpp"
#include "bart/tree.hpp"

namespace bart {

struct ProposalProbs {
  double grow = 0.28;
  double prune = 0.28;
  double change = 0.44;
};

struct Hyperparameters {
  int num_trees = 50;
  double alpha = 0.95;   // depth prior base
  double beta = 2.0;     // depth prior power
  double k = 2.0;        // leaf prior coverage multiplier
  double nu = 3.0;       // noise prior dof
  double q = 0.9;        // noise prior quantile
  ProposalProbs proposals;
  // Per-matrix-column selection weights; empty means the default weighting
  // (each one-hot column gets its factor's weight split across levels).
  std::vector<double> cov_prior_vec;
  long burn_in = 250;
  long post_burn_in = 1000;
  int chains = 1;
  double prob_rule_class = 0.5;
  bool memcache = true;
  bool use_missing_data = false;
  bool use_missing_dummies = false;

  void validate() const;
};

struct CalibratedPriors {
  double mu_mu = 0.0;     // leaf prior center aggregate; each leaf centers at mu_mu / m
  double sigma_mu = 0.0;  // leaf prior standard deviation
  double lambda = 0.0;    // noise prior scale (regression only)
  double sigsq_hat = 1.0; // pre-model noise estimate (fixed 1 for classification)

  double sigma_mu_sq() const { return sigma_mu * sigma_mu; }
};

// P(node at depth d is internal) = alpha * (1 + d)^(-beta).
double prob_split(int depth, double alpha, double beta);

// Solves m*(mu_mu/m) - k sqrt(m) sigma_mu = y_min and the mirrored equation
// for y_max: the leaf prior is centered so the m-tree sum spans the response
// range at +/- k standard deviations.
struct LeafPrior {
  double mu_mu;
  double sigma_mu;
};
LeafPrior calibrate_leaf_prior(double y_min, double y_max, int num_trees, double k);

// Least-squares residual variance of y on X (sample variance fallback when
// the solve is degenerate), and the scale lambda making
// P(sigma^2 <= sigsq_hat) = q under sigma^2 ~ InvGamma(nu/2, nu*lambda/2).
struct NoisePrior {
  double lambda;
  double sigsq_hat;
};
NoisePrior calibrate_lambda(const ModelFrame& frame, double nu, double q);

// Full calibration for a frame; classification pins sigma^2 = 1, centers the
// leaf prior at zero and spans (-3, 3) on the latent scale.
CalibratedPriors calibrate_priors(const ModelFrame& frame, const Hyperparameters& hyper);

// Column weights with each factor's weight spread across its one-hot block.
// base_weights are per source column (empty = all ones).
std::vector<double> default_cov_prior(const ModelFrame& frame,
                                      std::span<const double> base_weights = {});

// Resolved per-column weights for a frame: the hyperparameter vector when
// set (must match the column count), the default weighting otherwise.
std::vector<double> effective_cov_prior(const ModelFrame& frame,
                                        const Hyperparameters& hyper);

// Log prior mass of a tree: terminal nodes contribute log(1 - p_split),
// internal nodes log(p_split) plus the log probability of their rule
// (weighted feature choice times the uniform cut choice).
double tree_structure_log_prior(Tree& tree, const ModelFrame& frame,
                                const Hyperparameters& hyper,
                                std::span<const double> cov_weights);

}  // namespace bart
