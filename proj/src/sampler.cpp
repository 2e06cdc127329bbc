#include "bart/sampler.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

#include "bart/errors.hpp"
#include "bart/parallel.hpp"

namespace bart {

namespace {
constexpr double kLog2Pi = 1.8378770664093454835606594728112353;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}  // namespace

const char* proposal_kind_name(ProposalKind kind) {
  switch (kind) {
    case ProposalKind::Grow:
      return "GROW";
    case ProposalKind::Prune:
      return "PRUNE";
    case ProposalKind::Change:
      return "CHANGE";
  }
  return "?";
}

double log_node_marginal_likelihood(const NodeSufficientStats& stats,
                                    double sigma_sq, double sigma_mu_sq) {
  if (stats.n == 0) return 0.0;
  const double n = static_cast<double>(stats.n);
  const double shrink = stats.sum_r * stats.sum_r / (n + sigma_sq / sigma_mu_sq);
  return -0.5 * n * (kLog2Pi + std::log(sigma_sq)) +
         0.5 * (std::log(sigma_sq) - std::log(sigma_sq + n * sigma_mu_sq)) -
         0.5 / sigma_sq * (stats.sum_r_sq - shrink);
}

double log_grow_likelihood_ratio(const NodeSufficientStats& parent,
                                 const NodeSufficientStats& left,
                                 const NodeSufficientStats& right,
                                 double sigma_sq, double sigma_mu_sq) {
  const double np = static_cast<double>(parent.n);
  const double nl = static_cast<double>(left.n);
  const double nr = static_cast<double>(right.n);
  const double vp = sigma_sq + np * sigma_mu_sq;
  const double vl = sigma_sq + nl * sigma_mu_sq;
  const double vr = sigma_sq + nr * sigma_mu_sq;
  return 0.5 * (std::log(sigma_sq) + std::log(vp) - std::log(vl) - std::log(vr)) +
         sigma_mu_sq / (2.0 * sigma_sq) *
             (left.sum_r * left.sum_r / vl + right.sum_r * right.sum_r / vr -
              parent.sum_r * parent.sum_r / vp);
}

namespace {

ProposalEvaluation auto_reject(ProposalKind kind) {
  ProposalEvaluation eval;
  eval.kind = kind;
  eval.feasible = false;
  eval.accepted = false;
  eval.log_transition_ratio = kNegInf;
  eval.log_likelihood_ratio = kNegInf;
  eval.log_tree_structure_ratio = kNegInf;
  eval.log_r = kNegInf;
  return eval;
}

// Structure-ratio pieces for growing a node at depth d with normalized
// feature weight w and candidate count c:
//   alpha (1 - alpha/(2+d)^beta)^2 w / (((1+d)^beta - alpha) c)
double log_grow_structure_ratio(int depth, double alpha, double beta, double w,
                                int count) {
  const double d = static_cast<double>(depth);
  return std::log(alpha) + 2.0 * std::log1p(-alpha * std::pow(2.0 + d, -beta)) -
         std::log(std::pow(1.0 + d, beta) - alpha) + std::log(w) -
         std::log(static_cast<double>(count));
}

}  // namespace

namespace {

ProposalEvaluation grow_eval_core(Tree& tree, Node& leaf, const SplitRule& rule,
                                  const ModelFrame& frame,
                                  std::span<const double> resid, double sigma_sq,
                                  const Hyperparameters& hyper,
                                  const CalibratedPriors& calibrated, double w,
                                  int count) {
  ProposalEvaluation eval;
  eval.kind = ProposalKind::Grow;
  if (w <= 0.0 || count <= 0) return auto_reject(ProposalKind::Grow);

  const TreeStats ts = tree.structure_stats();
  const int b = ts.num_leaves;
  const bool parent_singly = leaf.parent != nullptr && leaf.parent->is_singly_internal();
  const int w2_new = ts.num_singly_internal + 1 - (parent_singly ? 1 : 0);

  const SplitStats split = partition_stats(frame, leaf.rows, rule, resid);
  if (split.left.n == 0 || split.right.n == 0) {
    throw InternalError("evaluate_grow: candidate rule produced an empty child");
  }
  NodeSufficientStats parent;
  parent.n = split.left.n + split.right.n;
  parent.sum_r = split.left.sum_r + split.right.sum_r;
  parent.sum_r_sq = split.left.sum_r_sq + split.right.sum_r_sq;

  eval.log_transition_ratio = std::log(hyper.proposals.prune) -
                              std::log(hyper.proposals.grow) +
                              std::log(static_cast<double>(b)) +
                              std::log(static_cast<double>(count)) - std::log(w) -
                              std::log(static_cast<double>(w2_new));
  eval.log_likelihood_ratio = log_grow_likelihood_ratio(
      parent, split.left, split.right, sigma_sq, calibrated.sigma_mu_sq());
  eval.log_tree_structure_ratio =
      log_grow_structure_ratio(leaf.depth, hyper.alpha, hyper.beta, w, count);
  eval.log_r = eval.log_transition_ratio + eval.log_likelihood_ratio +
               eval.log_tree_structure_ratio;
  eval.feasible = true;
  return eval;
}

}  // namespace

ProposalEvaluation evaluate_grow(Tree& tree, Node& leaf, const SplitRule& rule,
                                 const ModelFrame& frame,
                                 std::span<const double> resid, double sigma_sq,
                                 const Hyperparameters& hyper,
                                 const CalibratedPriors& calibrated,
                                 std::span<const double> cov_weights) {
  const bool mia = frame.preprocess().use_missing_data;
  const FeatureChoice avail =
      node_feature_choice(leaf, frame, cov_weights, mia, hyper.memcache);
  const double w = avail.weight_of(rule.feature);
  const int count =
      node_candidate_count(leaf, frame, rule.feature, mia, hyper.memcache);
  return grow_eval_core(tree, leaf, rule, frame, resid, sigma_sq, hyper,
                        calibrated, w, count);
}

ProposalEvaluation evaluate_prune(Tree& tree, Node& node, const ModelFrame& frame,
                                  std::span<const double> resid, double sigma_sq,
                                  const Hyperparameters& hyper,
                                  const CalibratedPriors& calibrated,
                                  std::span<const double> cov_weights) {
  (void)resid;
  ProposalEvaluation eval;
  eval.kind = ProposalKind::Prune;
  if (!node.is_singly_internal()) {
    throw InternalError("evaluate_prune: target is not singly internal");
  }
  const bool mia = frame.preprocess().use_missing_data;
  const FeatureChoice avail =
      node_feature_choice(node, frame, cov_weights, mia, hyper.memcache);
  const double w = avail.weight_of(node.rule.feature);
  const int count =
      node_candidate_count(node, frame, node.rule.feature, mia, hyper.memcache);
  if (w <= 0.0 || count <= 0) {
    throw InternalError("evaluate_prune: current rule not available at its node");
  }

  const TreeStats ts = tree.structure_stats();
  const int b = ts.num_leaves;
  const int w2 = ts.num_singly_internal;

  const NodeSufficientStats& left = node.left->stats;
  const NodeSufficientStats& right = node.right->stats;
  NodeSufficientStats parent;
  parent.n = left.n + right.n;
  parent.sum_r = left.sum_r + right.sum_r;
  parent.sum_r_sq = left.sum_r_sq + right.sum_r_sq;

  eval.log_transition_ratio =
      std::log(hyper.proposals.grow) - std::log(hyper.proposals.prune) +
      std::log(w) + std::log(static_cast<double>(w2)) -
      std::log(static_cast<double>(b - 1)) - std::log(static_cast<double>(count));
  eval.log_likelihood_ratio = -log_grow_likelihood_ratio(
      parent, left, right, sigma_sq, calibrated.sigma_mu_sq());
  eval.log_tree_structure_ratio =
      -log_grow_structure_ratio(node.depth, hyper.alpha, hyper.beta, w, count);
  eval.log_r = eval.log_transition_ratio + eval.log_likelihood_ratio +
               eval.log_tree_structure_ratio;
  eval.feasible = true;
  return eval;
}

namespace {

ProposalEvaluation change_eval_core(Node& node, const SplitRule& rule,
                                    const ModelFrame& frame,
                                    std::span<const double> resid, double sigma_sq,
                                    const CalibratedPriors& calibrated,
                                    double w_old, int count_old, double w_new,
                                    int count_new) {
  ProposalEvaluation eval;
  eval.kind = ProposalKind::Change;
  if (!node.is_singly_internal()) {
    throw InternalError("evaluate_change: target is not singly internal");
  }
  if (w_old <= 0.0 || count_old <= 0) {
    throw InternalError("evaluate_change: current rule not available at its node");
  }
  if (w_new <= 0.0 || count_new <= 0) return auto_reject(ProposalKind::Change);

  const std::vector<int> merged = node_rows(node);
  const SplitStats proposed = partition_stats(frame, merged, rule, resid);
  if (proposed.left.n == 0 || proposed.right.n == 0) {
    throw InternalError("evaluate_change: candidate rule produced an empty child");
  }
  const NodeSufficientStats& cur_left = node.left->stats;
  const NodeSufficientStats& cur_right = node.right->stats;

  const double chi = sigma_sq / calibrated.sigma_mu_sq();
  const double n1 = static_cast<double>(cur_left.n);
  const double n2 = static_cast<double>(cur_right.n);
  const double n1s = static_cast<double>(proposed.left.n);
  const double n2s = static_cast<double>(proposed.right.n);
  const double s1 = cur_left.sum_r;
  const double s2 = cur_right.sum_r;
  const double s1s = proposed.left.sum_r;
  const double s2s = proposed.right.sum_r;
  if (cur_left.n == proposed.left.n && cur_right.n == proposed.right.n) {
    eval.log_likelihood_ratio = 0.5 / sigma_sq *
                                ((s1s * s1s - s1 * s1) / (n1 + chi) +
                                 (s2s * s2s - s2 * s2) / (n2 + chi));
  } else {
    eval.log_likelihood_ratio =
        0.5 * (std::log(chi + n1) + std::log(chi + n2) - std::log(chi + n1s) -
               std::log(chi + n2s)) +
        0.5 / sigma_sq *
            (s1s * s1s / (n1s + chi) + s2s * s2s / (n2s + chi) -
             s1 * s1 / (n1 + chi) - s2 * s2 / (n2 + chi));
  }
  eval.log_transition_ratio = std::log(w_old) +
                              std::log(static_cast<double>(count_new)) -
                              std::log(w_new) -
                              std::log(static_cast<double>(count_old));
  eval.log_tree_structure_ratio = -eval.log_transition_ratio;
  eval.log_r = eval.log_transition_ratio + eval.log_likelihood_ratio +
               eval.log_tree_structure_ratio;
  eval.feasible = true;
  return eval;
}

}  // namespace

ProposalEvaluation evaluate_change(Tree& tree, Node& node, const SplitRule& rule,
                                   const ModelFrame& frame,
                                   std::span<const double> resid, double sigma_sq,
                                   const Hyperparameters& hyper,
                                   const CalibratedPriors& calibrated,
                                   std::span<const double> cov_weights) {
  (void)tree;
  const bool mia = frame.preprocess().use_missing_data;
  const FeatureChoice avail =
      node_feature_choice(node, frame, cov_weights, mia, hyper.memcache);
  const double w_old = avail.weight_of(node.rule.feature);
  const int count_old =
      node_candidate_count(node, frame, node.rule.feature, mia, hyper.memcache);
  const double w_new = avail.weight_of(rule.feature);
  const int count_new =
      node_candidate_count(node, frame, rule.feature, mia, hyper.memcache);
  return change_eval_core(node, rule, frame, resid, sigma_sq, calibrated, w_old,
                          count_old, w_new, count_new);
}

double draw_leaf_value(const NodeSufficientStats& stats, double sigma_sq,
                       double sigma_mu_sq, double prior_mean, Rng& rng) {
  const double n = static_cast<double>(stats.n);
  const double denom = n * sigma_mu_sq + sigma_sq;
  const double mean = (sigma_mu_sq * stats.sum_r + sigma_sq * prior_mean) / denom;
  const double var = sigma_sq * sigma_mu_sq / denom;
  return rng.normal(mean, std::sqrt(var));
}

void draw_leaf_parameters(Tree& tree, double sigma_sq, double sigma_mu_sq,
                          double prior_mean, Rng& rng) {
  for (Node* leaf : tree.leaves()) {
    leaf->leaf_value = draw_leaf_value(leaf->stats, sigma_sq, sigma_mu_sq,
                                       prior_mean, rng);
  }
}

double draw_sigma_sq(std::span<const double> residuals, double nu, double lambda,
                     bool classification, Rng& rng) {
  if (classification) {
    throw DataError("draw_sigma_sq: sigma^2 is fixed at 1 for classification");
  }
  double sse = 0.0;
  for (double e : residuals) sse += e * e;
  const double shape = 0.5 * (nu + static_cast<double>(residuals.size()));
  const double scale = 0.5 * (nu * lambda + sse);
  return scale / rng.gamma(shape);
}

void draw_latent_z(std::span<const double> y, std::span<const double> fits,
                   std::span<double> z, Rng& rng) {
  for (std::size_t i = 0; i < y.size(); ++i) {
    z[i] = y[i] > 0.5 ? rng.normal_right_of_zero(fits[i])
                      : rng.normal_left_of_zero(fits[i]);
  }
}

ChainState::ChainState(std::size_t n_rows, int num_trees, std::uint64_t seed)
    : rng(seed) {
  trees.reserve(num_trees);
  for (int t = 0; t < num_trees; ++t) trees.emplace_back(n_rows);
  full_resid.assign(n_rows, 0.0);
}

std::vector<std::string> PosteriorEnsemble::column_names() const {
  std::vector<std::string> names;
  names.reserve(meta.columns.size());
  for (const auto& c : meta.columns) names.push_back(c.name);
  return names;
}

namespace {

struct ChainOutput {
  std::vector<PosteriorSample> samples;
  ChainTrace trace;
  std::vector<ProposalLogEntry> proposals;
};

struct ChainRunner {
  const ModelFrame& frame;
  const Hyperparameters& hyper;
  const CalibratedPriors& calibrated;
  const SamplerOptions& options;
  std::span<const double> cov_weights;
  long kept_target;
  int chain_index;

  ProposalEvaluation step_tree(ChainState& state, Tree& tree,
                               std::span<const double> resid) const {
    const bool mia = frame.preprocess().use_missing_data;
    const double u = state.rng.uniform();
    ProposalKind kind;
    if (u < hyper.proposals.grow) {
      kind = ProposalKind::Grow;
    } else if (u < hyper.proposals.grow + hyper.proposals.prune) {
      kind = ProposalKind::Prune;
    } else {
      kind = ProposalKind::Change;
    }

    ProposalEvaluation eval;
    Node* target = nullptr;
    SplitRule rule;
    switch (kind) {
      case ProposalKind::Grow: {
        auto leaves = tree.leaves();
        target = leaves[state.rng.uniform_below(leaves.size())];
        const FeatureChoice avail =
            node_feature_choice(*target, frame, cov_weights, mia, hyper.memcache);
        if (avail.empty()) return auto_reject(kind);
        const std::size_t fi = state.rng.weighted_index(avail.weights);
        const int feature = avail.features[fi];
        const CandidateSet candidates =
            gather_candidates(frame, target->rows, feature);
        const int count = candidates.count(mia);
        const int ci = static_cast<int>(
            state.rng.uniform_below(static_cast<std::size_t>(count)));
        rule = candidates.rule_at(ci, mia);
        eval = grow_eval_core(tree, *target, rule, frame, resid, state.sigma_sq,
                              hyper, calibrated, avail.weights[fi], count);
        break;
      }
      case ProposalKind::Prune: {
        auto nodes = tree.singly_internal_nodes();
        if (nodes.empty()) return auto_reject(kind);
        target = nodes[state.rng.uniform_below(nodes.size())];
        rule = target->rule;  // the rule the prune would destroy
        eval = evaluate_prune(tree, *target, frame, resid, state.sigma_sq, hyper,
                              calibrated, cov_weights);
        break;
      }
      case ProposalKind::Change: {
        auto nodes = tree.singly_internal_nodes();
        if (nodes.empty()) return auto_reject(kind);
        target = nodes[state.rng.uniform_below(nodes.size())];
        const FeatureChoice avail =
            node_feature_choice(*target, frame, cov_weights, mia, hyper.memcache);
        const std::size_t fi = state.rng.weighted_index(avail.weights);
        const int feature = avail.features[fi];
        const std::vector<int> merged = node_rows(*target);
        const CandidateSet candidates = gather_candidates(frame, merged, feature);
        const int count = candidates.count(mia);
        const int ci = static_cast<int>(
            state.rng.uniform_below(static_cast<std::size_t>(count)));
        rule = candidates.rule_at(ci, mia);
        const double w_old = avail.weight_of(target->rule.feature);
        const int count_old = node_candidate_count(*target, frame,
                                                   target->rule.feature, mia,
                                                   hyper.memcache);
        eval = change_eval_core(*target, rule, frame, resid, state.sigma_sq,
                                calibrated, w_old, count_old, avail.weights[fi],
                                count);
        break;
      }
    }
    if (!eval.feasible) return eval;
    if (options.disable_likelihood) {
      eval.log_likelihood_ratio = 0.0;
      eval.log_r = eval.log_transition_ratio + eval.log_tree_structure_ratio;
    }
    eval.accepted = std::log(state.rng.uniform()) < eval.log_r;
    if (options.audit) {
      options.audit(ProposalContext{tree, *target, rule, frame, resid,
                                    state.sigma_sq, eval});
    }
    if (eval.accepted) {
      switch (kind) {
        case ProposalKind::Grow:
          tree.grow_at(*target, rule, frame, resid, hyper.memcache);
          break;
        case ProposalKind::Prune:
          tree.prune_at(*target);
          break;
        case ProposalKind::Change:
          tree.change_at(*target, rule, frame, resid, hyper.memcache);
          break;
      }
    }
    return eval;
  }

  ChainOutput run(std::uint64_t seed) const {
    const std::size_t n = frame.n_rows();
    const int m = hyper.num_trees;
    const bool classification = frame.classification();
    ChainState state(n, m, seed);
    state.sigma_sq = classification
                         ? 1.0
                         : options.fix_sigma_sq.value_or(calibrated.sigsq_hat);

    // Internal response: centered at the leaf-prior aggregate for
    // regression, the probit latents for classification.
    std::vector<double> y_work(n);
    if (classification) {
      state.latent_z.assign(n, 0.0);
      std::vector<double> zero(n, 0.0);
      draw_latent_z(frame.response(), zero, state.latent_z, state.rng);
      y_work = state.latent_z;
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        y_work[i] = frame.response()[i] - calibrated.mu_mu;
      }
    }
    state.full_resid = y_work;  // all trees start at zero

    const long total_iters = hyper.burn_in + kept_target;
    ChainOutput out;
    out.trace.burn_in = hyper.burn_in;
    out.trace.kept = kept_target;
    out.samples.reserve(kept_target);

    std::vector<double> resid_buffer(n, 0.0);

    for (long iter = 0; iter < total_iters; ++iter) {
      state.iteration = iter;
      int accepted = 0;
      for (int t = 0; t < m; ++t) {
        Tree& tree = state.trees[t];
        // Expose the residual with this tree's current fit added back.
        for (Node* leaf : tree.leaves()) {
          NodeSufficientStats stats;
          for (int row : leaf->rows) {
            const double r = state.full_resid[row] + leaf->leaf_value;
            resid_buffer[row] = r;
            stats.n++;
            stats.sum_r += r;
            stats.sum_r_sq += r * r;
          }
          leaf->stats = stats;
        }
        const ProposalEvaluation eval =
            step_tree(state, tree, resid_buffer);
        accepted += eval.accepted ? 1 : 0;
        if (options.record_proposals) {
          out.proposals.push_back({eval.kind, eval.log_transition_ratio,
                                   eval.log_likelihood_ratio,
                                   eval.log_tree_structure_ratio, eval.log_r,
                                   eval.feasible, eval.accepted});
        }
        for (Node* leaf : tree.leaves()) {
          leaf->leaf_value = draw_leaf_value(
              leaf->stats, state.sigma_sq, calibrated.sigma_mu_sq(), 0.0, state.rng);
          for (int row : leaf->rows) {
            state.full_resid[row] = resid_buffer[row] - leaf->leaf_value;
          }
        }
      }

      if (classification) {
        // fits = z - resid; refresh the latents, then shift the residuals.
        for (std::size_t i = 0; i < n; ++i) {
          resid_buffer[i] = state.latent_z[i] - state.full_resid[i];
        }
        std::vector<double> z_new(n);
        draw_latent_z(frame.response(), resid_buffer, z_new, state.rng);
        for (std::size_t i = 0; i < n; ++i) {
          state.full_resid[i] += z_new[i] - state.latent_z[i];
        }
        state.latent_z = z_new;
      } else if (!options.fix_sigma_sq.has_value()) {
        state.sigma_sq = draw_sigma_sq(state.full_resid, hyper.nu,
                                       calibrated.lambda, false, state.rng);
      }

      if (options.check_residuals) {
        const std::vector<double>& reference =
            classification ? state.latent_z : y_work;
        for (std::size_t i = 0; i < n; ++i) {
          double fit = 0.0;
          for (const Tree& tree : state.trees) {
            fit += tree.route(frame, i)->leaf_value;
          }
          const double expect = reference[i] - fit;
          if (std::abs(expect - state.full_resid[i]) >
              1e-10 * (1.0 + std::abs(expect))) {
            throw InternalError("running residuals diverged from recomputation");
          }
        }
      }

      out.trace.sigma_sq.push_back(state.sigma_sq);
      out.trace.acceptance.push_back(static_cast<double>(accepted) /
                                     static_cast<double>(m));
      if (iter >= hyper.burn_in) {
        double leaves_sum = 0.0;
        double depth_sum = 0.0;
        PosteriorSample sample;
        sample.trees.reserve(m);
        for (const Tree& tree : state.trees) {
          const TreeStats ts = tree.structure_stats();
          leaves_sum += ts.num_leaves;
          depth_sum += ts.max_depth;
          sample.trees.push_back(TreeSnapshot::capture(tree));
        }
        sample.sigma_sq = state.sigma_sq;
        out.samples.push_back(std::move(sample));
        out.trace.mean_leaves.push_back(leaves_sum / m);
        out.trace.mean_depth.push_back(depth_sum / m);
      }
      if (options.progress) {
        const long step = std::max(1L, total_iters / 10);
        if ((iter + 1) % step == 0 || iter + 1 == total_iters) {
          std::fprintf(stderr, "chain %d: iteration %ld/%ld\n", chain_index + 1,
                       iter + 1, total_iters);
        }
      }
    }
    return out;
  }
};

}  // namespace

PosteriorEnsemble run_gibbs(const ModelFrame& frame, const Hyperparameters& hyper,
                            const CalibratedPriors& calibrated,
                            std::span<const std::uint64_t> chain_seeds,
                            const SamplerOptions& options) {
  hyper.validate();
  if (frame.n_rows() == 0) throw DataError("run_gibbs: empty frame");
  if (chain_seeds.size() != static_cast<std::size_t>(hyper.chains)) {
    throw DataError("run_gibbs: need one seed per chain");
  }
  if (frame.any_missing() && !frame.preprocess().use_missing_data) {
    throw DataError("run_gibbs: frame has missing cells but missing-data support is off");
  }
  const auto t0 = std::chrono::steady_clock::now();

  const std::vector<double> cov_weights = effective_cov_prior(frame, hyper);
  const long kept_per_chain =
      (hyper.post_burn_in + hyper.chains - 1) / hyper.chains;

  std::vector<ChainOutput> outputs(hyper.chains);
  parallel_for(hyper.chains, options.threads, [&](std::size_t c) {
    ChainRunner runner{frame,       hyper,          calibrated,
                       options,     cov_weights,    kept_per_chain,
                       static_cast<int>(c)};
    outputs[c] = runner.run(chain_seeds[c]);
  });

  PosteriorEnsemble ensemble;
  ensemble.hyper = hyper;
  ensemble.calibrated = calibrated;
  ensemble.meta = frame.preprocess();
  ensemble.mu_offset = frame.classification() ? 0.0 : calibrated.mu_mu;
  ensemble.chains = hyper.chains;
  ensemble.burn_in = hyper.burn_in;
  ensemble.kept_per_chain = kept_per_chain;
  for (auto& out : outputs) {
    for (auto& sample : out.samples) {
      if (ensemble.samples.size() <
          static_cast<std::size_t>(hyper.post_burn_in)) {
        ensemble.samples.push_back(std::move(sample));
      }
    }
    ensemble.traces.push_back(std::move(out.trace));
    if (options.record_proposals) {
      ensemble.proposal_log.push_back(std::move(out.proposals));
    }
  }
  const auto t1 = std::chrono::steady_clock::now();
  ensemble.build_seconds = std::chrono::duration<double>(t1 - t0).count();
  return ensemble;
}

PosteriorEnsemble run_gibbs(const ModelFrame& frame, const Hyperparameters& hyper,
                            const CalibratedPriors& calibrated, std::uint64_t seed,
                            const SamplerOptions& options) {
  std::vector<std::uint64_t> seeds(hyper.chains);
  for (int c = 0; c < hyper.chains; ++c) {
    seeds[c] = derive_seed(seed, SeedStream::Chain, static_cast<std::uint64_t>(c));
  }
  return run_gibbs(frame, hyper, calibrated, seeds, options);
}

PosteriorEnsemble train(const ModelFrame& frame, const Hyperparameters& hyper,
                        std::uint64_t seed, const SamplerOptions& options) {
  const CalibratedPriors calibrated = calibrate_priors(frame, hyper);
  return run_gibbs(frame, hyper, calibrated, seed, options);
}

}  // namespace bart
