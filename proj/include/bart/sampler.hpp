#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bart/dataset.hpp"
#include "bart/priors.hpp"
#include "bart/rng.hpp"
#include "bart/tree.hpp"

namespace bart {

enum class ProposalKind : std::uint8_t { Grow = 0, Prune = 1, Change = 2 };

const char* proposal_kind_name(ProposalKind kind);

// One Metropolis-Hastings evaluation, split into its three log ratios.
// Infeasible proposals (nothing to prune/change, no usable split) carry
// feasible = false and count as automatic rejections.
struct ProposalEvaluation {
  ProposalKind kind = ProposalKind::Grow;
  double log_transition_ratio = 0.0;
  double log_likelihood_ratio = 0.0;
  double log_tree_structure_ratio = 0.0;
  double log_r = 0.0;
  bool feasible = false;
  bool accepted = false;
};

// Log marginal likelihood of the responses in one node with the leaf mean
// integrated out under its Normal(0, sigma_mu_sq) prior; a function of
// (n, sum, sum of squares) only. Empty nodes contribute zero.
double log_node_marginal_likelihood(const NodeSufficientStats& stats,
                                    double sigma_sq, double sigma_mu_sq);

// Likelihood log ratio of splitting `parent` into `left` + `right`
// (the squared-sums shortcut; sum_r_sq never enters).
double log_grow_likelihood_ratio(const NodeSufficientStats& parent,
                                 const NodeSufficientStats& left,
                                 const NodeSufficientStats& right,
                                 double sigma_sq, double sigma_mu_sq);

// Ratio evaluators, exposed for tests and oracles. They read the live tree
// (leaf/singly-internal counts, candidate sets) but leave it unmodified.
ProposalEvaluation evaluate_grow(Tree& tree, Node& leaf, const SplitRule& rule,
                                 const ModelFrame& frame,
                                 std::span<const double> resid, double sigma_sq,
                                 const Hyperparameters& hyper,
                                 const CalibratedPriors& calibrated,
                                 std::span<const double> cov_weights);
ProposalEvaluation evaluate_prune(Tree& tree, Node& singly_internal,
                                  const ModelFrame& frame,
                                  std::span<const double> resid, double sigma_sq,
                                  const Hyperparameters& hyper,
                                  const CalibratedPriors& calibrated,
                                  std::span<const double> cov_weights);
ProposalEvaluation evaluate_change(Tree& tree, Node& singly_internal,
                                   const SplitRule& rule, const ModelFrame& frame,
                                   std::span<const double> resid, double sigma_sq,
                                   const Hyperparameters& hyper,
                                   const CalibratedPriors& calibrated,
                                   std::span<const double> cov_weights);

// Conjugate draws.
double draw_leaf_value(const NodeSufficientStats& stats, double sigma_sq,
                       double sigma_mu_sq, double prior_mean, Rng& rng);
void draw_leaf_parameters(Tree& tree, double sigma_sq, double sigma_mu_sq,
                          double prior_mean, Rng& rng);
double draw_sigma_sq(std::span<const double> residuals, double nu, double lambda,
                     bool classification, Rng& rng);
void draw_latent_z(std::span<const double> y, std::span<const double> fits,
                   std::span<double> z, Rng& rng);

// ---- chain state and posterior storage --------------------------------------

struct ChainState {
  std::vector<Tree> trees;
  double sigma_sq = 1.0;
  std::vector<double> full_resid;  // centered response minus all tree fits
  std::vector<double> latent_z;    // classification only
  Rng rng;
  long iteration = 0;

  ChainState(std::size_t n_rows, int num_trees, std::uint64_t seed);
};

struct PosteriorSample {
  std::vector<TreeSnapshot> trees;
  double sigma_sq = 1.0;
};

struct ChainTrace {
  std::vector<double> sigma_sq;       // every iteration, burn-in first
  std::vector<double> acceptance;     // fraction of the m proposals accepted
  std::vector<double> mean_leaves;    // kept iterations only
  std::vector<double> mean_depth;     // kept iterations only
  long burn_in = 0;
  long kept = 0;
};

struct ProposalLogEntry {
  ProposalKind kind;
  double log_transition_ratio;
  double log_likelihood_ratio;
  double log_tree_structure_ratio;
  double log_r;
  bool feasible;
  bool accepted;
};

struct PosteriorEnsemble {
  std::vector<PosteriorSample> samples;  // chain-major, truncated to post_burn_in
  Hyperparameters hyper;
  CalibratedPriors calibrated;
  PreprocessMeta meta;
  // Added back onto the sum of trees when predicting (response centering).
  double mu_offset = 0.0;
  int chains = 1;
  long burn_in = 0;
  long kept_per_chain = 0;
  std::vector<ChainTrace> traces;
  std::vector<std::vector<ProposalLogEntry>> proposal_log;  // when recorded
  double build_seconds = 0.0;

  std::size_t sample_count() const { return samples.size(); }
  std::vector<std::string> column_names() const;
};

// Audit hook: called for every feasible proposal before it is applied, with
// the tree still in its pre-move state.
struct ProposalContext {
  const Tree& tree;
  Node& target;
  SplitRule rule;  // grow/change proposals
  const ModelFrame& frame;
  std::span<const double> resid;
  double sigma_sq;
  ProposalEvaluation eval;
};

struct SamplerOptions {
  int threads = 1;
  bool progress = false;
  bool record_proposals = false;
  // Diagnostic switches (used by verification suites).
  std::optional<double> fix_sigma_sq;
  bool disable_likelihood = false;
  bool check_residuals = false;
  std::function<void(const ProposalContext&)> audit;
};

// Runs `hyper.chains` independent chains (burn_in + ceil(post/chains)
// iterations each) and concatenates the kept draws chain-major. Results for
// a fixed seed list do not depend on the thread count.
PosteriorEnsemble run_gibbs(const ModelFrame& frame, const Hyperparameters& hyper,
                            const CalibratedPriors& calibrated,
                            std::span<const std::uint64_t> chain_seeds,
                            const SamplerOptions& options = {});

// Convenience: expands one master seed into per-chain seeds.
PosteriorEnsemble run_gibbs(const ModelFrame& frame, const Hyperparameters& hyper,
                            const CalibratedPriors& calibrated, std::uint64_t seed,
                            const SamplerOptions& options = {});

// Calibrates and samples in one call.
PosteriorEnsemble train(const ModelFrame& frame, const Hyperparameters& hyper,
                        std::uint64_t seed, const SamplerOptions& options = {});

}  // namespace bart
