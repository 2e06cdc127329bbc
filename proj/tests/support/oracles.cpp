#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <stdexcept>

namespace oracle {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

double log_normal_pdf(double x, double mean, double var) {
  const double d = x - mean;
  return -0.5 * std::log(2.0 * kPi * var) - 0.5 * d * d / var;
}

bool test_sends_left(const bart::SplitRule& rule, double x, bool missing) {
  if (rule.mia == bart::MiaType::MissingOnly) return missing;
  if (missing) return rule.mia == bart::MiaType::MissingLeft;
  return x <= rule.value;
}

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

double quadrature_log_marginal(std::span<const double> values, double sigma_sq,
                               double sigma_mu_sq) {
  const std::size_t n = values.size();
  if (n == 0) return 0.0;
  double sum = 0.0;
  for (double v : values) sum += v;
  const double precision = 1.0 / sigma_mu_sq + static_cast<double>(n) / sigma_sq;
  const double mode = (sum / sigma_sq) / precision;
  const double sd = 1.0 / std::sqrt(precision);

  auto log_f = [&](double mu) {
    double lf = log_normal_pdf(mu, 0.0, sigma_mu_sq);
    for (double v : values) lf += log_normal_pdf(v, mu, sigma_sq);
    return lf;
  };
  const double log_f0 = log_f(mode);

  const double lo = mode - 12.0 * sd;
  const double hi = mode + 12.0 * sd;
  const int intervals = 4000;  // even
  const double h = (hi - lo) / intervals;
  double acc = std::exp(log_f(lo) - log_f0) + std::exp(log_f(hi) - log_f0);
  for (int i = 1; i < intervals; ++i) {
    const double w = (i % 2 == 1) ? 4.0 : 2.0;
    acc += w * std::exp(log_f(lo + i * h) - log_f0);
  }
  return log_f0 + std::log(acc * h / 3.0);
}

double closed_form_log_marginal(std::span<const double> values, double sigma_sq,
                                double sigma_mu_sq) {
  const std::size_t n = values.size();
  if (n == 0) return 0.0;
  double sum = 0.0, sum_sq = 0.0;
  for (double v : values) {
    sum += v;
    sum_sq += v * v;
  }
  const double nd = static_cast<double>(n);
  return -0.5 * nd * std::log(2.0 * kPi * sigma_sq) +
         0.5 * std::log(sigma_sq / (sigma_sq + nd * sigma_mu_sq)) -
         (sum_sq - sum * sum / (nd + sigma_sq / sigma_mu_sq)) / (2.0 * sigma_sq);
}

std::vector<bart::SplitRule> test_candidate_rules(const bart::ModelFrame& frame,
                                                  std::span<const int> rows,
                                                  std::size_t feature, bool mia) {
  std::set<double> observed;
  bool missing = false;
  for (int row : rows) {
    if (frame.missing(row, feature)) {
      missing = true;
    } else {
      observed.insert(frame.value(row, feature));
    }
  }
  std::vector<double> cuts(observed.begin(), observed.end());
  if (!cuts.empty()) cuts.pop_back();
  std::vector<bart::SplitRule> rules;
  for (double c : cuts) {
    rules.push_back({static_cast<int>(feature), c, bart::MiaType::MissingLeft});
  }
  if (mia) {
    for (double c : cuts) {
      rules.push_back({static_cast<int>(feature), c, bart::MiaType::MissingRight});
    }
    if (missing && !observed.empty()) {
      rules.push_back({static_cast<int>(feature), 0.0, bart::MiaType::MissingOnly});
    }
  }
  return rules;
}

int test_candidate_count(const bart::ModelFrame& frame, std::span<const int> rows,
                         std::size_t feature, bool mia) {
  return static_cast<int>(test_candidate_rules(frame, rows, feature, mia).size());
}

double test_feature_weight(const bart::ModelFrame& frame, std::span<const int> rows,
                           std::size_t feature, std::span<const double> cov_weights,
                           bool mia) {
  double total = 0.0;
  double mine = 0.0;
  for (std::size_t j = 0; j < frame.n_cols(); ++j) {
    if (test_candidate_count(frame, rows, j, mia) > 0) {
      const double w = cov_weights.empty() ? 1.0 : cov_weights[j];
      total += w;
      if (j == feature) mine = w;
    }
  }
  return total > 0.0 ? mine / total : 0.0;
}

namespace {

double walk_log_prior(const bart::Node& node, std::vector<int> rows,
                      const bart::ModelFrame& frame,
                      const bart::Hyperparameters& hyper,
                      std::span<const double> cov_weights, bool mia) {
  const double p_split =
      hyper.alpha * std::pow(1.0 + static_cast<double>(node.depth), -hyper.beta);
  if (node.is_leaf()) return std::log(1.0 - p_split);
  const double w = test_feature_weight(frame, rows, node.rule.feature, cov_weights, mia);
  const int count = test_candidate_count(frame, rows, node.rule.feature, mia);
  if (w <= 0.0 || count <= 0) {
    throw std::logic_error("oracle: rule not available at its node");
  }
  std::vector<int> left, right;
  for (int row : rows) {
    const bool l = test_sends_left(node.rule, frame.value(row, node.rule.feature),
                                   frame.missing(row, node.rule.feature));
    (l ? left : right).push_back(row);
  }
  return std::log(p_split) + std::log(w) - std::log(static_cast<double>(count)) +
         walk_log_prior(*node.left, std::move(left), frame, hyper, cov_weights, mia) +
         walk_log_prior(*node.right, std::move(right), frame, hyper, cov_weights, mia);
}

void walk_leaf_values(const bart::Node& node, const std::vector<int>& rows,
                      const bart::ModelFrame& frame, std::span<const double> resid,
                      double sigma_sq, double sigma_mu_sq, double& total) {
  if (node.is_leaf()) {
    std::vector<double> values;
    values.reserve(rows.size());
    for (int row : rows) values.push_back(resid[row]);
    total += closed_form_log_marginal(values, sigma_sq, sigma_mu_sq);
    return;
  }
  std::vector<int> left, right;
  for (int row : rows) {
    const bool l = test_sends_left(node.rule, frame.value(row, node.rule.feature),
                                   frame.missing(row, node.rule.feature));
    (l ? left : right).push_back(row);
  }
  walk_leaf_values(*node.left, left, frame, resid, sigma_sq, sigma_mu_sq, total);
  walk_leaf_values(*node.right, right, frame, resid, sigma_sq, sigma_mu_sq, total);
}

std::vector<int> all_rows(const bart::ModelFrame& frame) {
  std::vector<int> rows(frame.n_rows());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<int>(i);
  return rows;
}

// Rows that reach `target` when routed from the root.
std::vector<int> test_rows_at(const bart::Tree& tree, const bart::Node& target,
                              const bart::ModelFrame& frame) {
  std::vector<int> result;
  for (std::size_t i = 0; i < frame.n_rows(); ++i) {
    const bart::Node* node = &tree.root();
    bool reached = (node == &target);
    while (!node->is_leaf() && !reached) {
      const bool l = test_sends_left(node->rule, frame.value(i, node->rule.feature),
                                     frame.missing(i, node->rule.feature));
      node = l ? node->left.get() : node->right.get();
      reached = (node == &target);
    }
    if (reached) result.push_back(static_cast<int>(i));
  }
  return result;
}

struct Counts {
  int leaves = 0;
  int singly = 0;
};

Counts count_nodes(const bart::Node& node) {
  if (node.is_leaf()) return {1, 0};
  const Counts l = count_nodes(*node.left);
  const Counts r = count_nodes(*node.right);
  Counts c;
  c.leaves = l.leaves + r.leaves;
  c.singly = l.singly + r.singly + (node.left->is_leaf() && node.right->is_leaf());
  return c;
}

// Path from root to node as left/right steps.
std::vector<bool> path_to(const bart::Node& node) {
  std::vector<bool> path;
  const bart::Node* cur = &node;
  while (cur->parent != nullptr) {
    path.push_back(cur->parent->left.get() == cur);
    cur = cur->parent;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

bart::Node& follow_path(bart::Tree& tree, const std::vector<bool>& path) {
  bart::Node* cur = &tree.root();
  for (bool go_left : path) cur = go_left ? cur->left.get() : cur->right.get();
  return *cur;
}

}  // namespace

double tree_log_prior(const bart::Tree& tree, const bart::ModelFrame& frame,
                      const bart::Hyperparameters& hyper,
                      std::span<const double> cov_weights) {
  return walk_log_prior(tree.root(), all_rows(frame), frame, hyper, cov_weights,
                        frame.preprocess().use_missing_data);
}

double tree_log_likelihood(const bart::Tree& tree, const bart::ModelFrame& frame,
                           std::span<const double> resid, double sigma_sq,
                           double sigma_mu_sq) {
  double total = 0.0;
  walk_leaf_values(tree.root(), all_rows(frame), frame, resid, sigma_sq,
                   sigma_mu_sq, total);
  return total;
}

double full_log_ratio(const bart::Tree& tree, const bart::ProposalContext& ctx,
                      const bart::Hyperparameters& hyper,
                      const bart::CalibratedPriors& calibrated,
                      std::span<const double> cov_weights) {
  const bart::ModelFrame& frame = ctx.frame;
  const bool mia = frame.preprocess().use_missing_data;
  const double sigma_sq = ctx.sigma_sq;
  const double sigma_mu_sq = calibrated.sigma_mu_sq();

  auto log_pi = [&](const bart::Tree& t) {
    double ll = 0.0;
    walk_leaf_values(t.root(), all_rows(frame), frame, ctx.resid, sigma_sq,
                     sigma_mu_sq, ll);
    return tree_log_prior(t, frame, hyper, cov_weights) + ll;
  };

  const std::vector<bool> path = path_to(ctx.target);
  bart::Tree proposed = tree.clone();
  bart::Node& clone_target = follow_path(proposed, path);
  const std::vector<int> target_rows = test_rows_at(tree, ctx.target, frame);

  const Counts before = count_nodes(tree.root());
  double log_q_fwd, log_q_rev;
  switch (ctx.eval.kind) {
    case bart::ProposalKind::Grow: {
      proposed.grow_at(clone_target, ctx.rule, frame, ctx.resid, false);
      const Counts after = count_nodes(proposed.root());
      const double w = test_feature_weight(frame, target_rows, ctx.rule.feature,
                                           cov_weights, mia);
      const int count = test_candidate_count(frame, target_rows, ctx.rule.feature, mia);
      log_q_fwd = std::log(hyper.proposals.grow) - std::log(double(before.leaves)) +
                  std::log(w) - std::log(double(count));
      log_q_rev = std::log(hyper.proposals.prune) - std::log(double(after.singly));
      break;
    }
    case bart::ProposalKind::Prune: {
      const bart::SplitRule destroyed = ctx.target.rule;
      proposed.prune_at(clone_target);
      const Counts after = count_nodes(proposed.root());
      const double w = test_feature_weight(frame, target_rows, destroyed.feature,
                                           cov_weights, mia);
      const int count = test_candidate_count(frame, target_rows, destroyed.feature, mia);
      log_q_fwd = std::log(hyper.proposals.prune) - std::log(double(before.singly));
      log_q_rev = std::log(hyper.proposals.grow) - std::log(double(after.leaves)) +
                  std::log(w) - std::log(double(count));
      break;
    }
    case bart::ProposalKind::Change: {
      const bart::SplitRule old_rule = ctx.target.rule;
      proposed.change_at(clone_target, ctx.rule, frame, ctx.resid, false);
      const double w_new = test_feature_weight(frame, target_rows, ctx.rule.feature,
                                               cov_weights, mia);
      const int count_new =
          test_candidate_count(frame, target_rows, ctx.rule.feature, mia);
      const double w_old = test_feature_weight(frame, target_rows, old_rule.feature,
                                               cov_weights, mia);
      const int count_old =
          test_candidate_count(frame, target_rows, old_rule.feature, mia);
      log_q_fwd = std::log(hyper.proposals.change) - std::log(double(before.singly)) +
                  std::log(w_new) - std::log(double(count_new));
      log_q_rev = std::log(hyper.proposals.change) - std::log(double(before.singly)) +
                  std::log(w_old) - std::log(double(count_old));
      break;
    }
    default:
      throw std::logic_error("full_log_ratio: unknown proposal kind");
  }
  return (log_q_rev + log_pi(proposed)) - (log_q_fwd + log_pi(tree));
}

namespace {

struct Part {
  std::string signature;
  double log_prior;
  double log_likelihood;
  int leaves;
};

std::vector<Part> expand(const bart::ModelFrame& frame, const std::vector<int>& rows,
                         int depth, const bart::Hyperparameters& hyper,
                         std::span<const double> cov_weights,
                         std::span<const double> resid, double sigma_sq,
                         double sigma_mu_sq, bool mia) {
  const double p_split =
      hyper.alpha * std::pow(1.0 + static_cast<double>(depth), -hyper.beta);
  std::vector<Part> out;
  {
    std::vector<double> values;
    for (int row : rows) values.push_back(resid[row]);
    out.push_back({"L", std::log(1.0 - p_split),
                   closed_form_log_marginal(values, sigma_sq, sigma_mu_sq), 1});
  }
  for (std::size_t j = 0; j < frame.n_cols(); ++j) {
    const auto rules = test_candidate_rules(frame, rows, j, mia);
    if (rules.empty()) continue;
    const double w = test_feature_weight(frame, rows, j, cov_weights, mia);
    for (const bart::SplitRule& rule : rules) {
      std::vector<int> left, right;
      for (int row : rows) {
        const bool l = test_sends_left(rule, frame.value(row, j), frame.missing(row, j));
        (l ? left : right).push_back(row);
      }
      const auto lefts = expand(frame, left, depth + 1, hyper, cov_weights, resid,
                                sigma_sq, sigma_mu_sq, mia);
      const auto rights = expand(frame, right, depth + 1, hyper, cov_weights, resid,
                                 sigma_sq, sigma_mu_sq, mia);
      const double rule_lp = std::log(p_split) + std::log(w) -
                             std::log(static_cast<double>(rules.size()));
      for (const Part& lp : lefts) {
        for (const Part& rp : rights) {
          Part part;
          part.signature = "(" + std::to_string(j) + "|" + format_value(rule.value) +
                           "|" + std::to_string(static_cast<int>(rule.mia)) + " " +
                           lp.signature + " " + rp.signature + ")";
          part.log_prior = rule_lp + lp.log_prior + rp.log_prior;
          part.log_likelihood = lp.log_likelihood + rp.log_likelihood;
          part.leaves = lp.leaves + rp.leaves;
          out.push_back(std::move(part));
        }
      }
    }
  }
  return out;
}

std::string signature_of(const bart::TreeSnapshot& snap, std::int32_t idx) {
  const bart::SnapshotNode& node = snap.nodes[idx];
  if (node.is_leaf()) return "L";
  return "(" + std::to_string(node.feature) + "|" + format_value(node.value) + "|" +
         std::to_string(static_cast<int>(node.mia)) + " " +
         signature_of(snap, node.left) + " " + signature_of(snap, node.right) + ")";
}

}  // namespace

std::vector<EnumeratedTree> enumerate_trees(const bart::ModelFrame& frame,
                                            const bart::Hyperparameters& hyper,
                                            std::span<const double> cov_weights,
                                            std::span<const double> resid,
                                            double sigma_sq, double sigma_mu_sq) {
  const auto parts = expand(frame, all_rows(frame), 0, hyper, cov_weights, resid,
                            sigma_sq, sigma_mu_sq,
                            frame.preprocess().use_missing_data);
  std::vector<EnumeratedTree> out;
  for (const Part& p : parts) {
    out.push_back({p.signature, p.log_prior, p.log_likelihood, p.leaves});
  }
  return out;
}

std::string snapshot_signature(const bart::TreeSnapshot& snap) {
  return signature_of(snap, 0);
}

double total_variation(const std::map<std::string, double>& a,
                       const std::map<std::string, double>& b) {
  std::set<std::string> keys;
  for (const auto& [k, v] : a) keys.insert(k);
  for (const auto& [k, v] : b) keys.insert(k);
  double tv = 0.0;
  for (const auto& k : keys) {
    const double pa = a.count(k) ? a.at(k) : 0.0;
    const double pb = b.count(k) ? b.at(k) : 0.0;
    tv += std::abs(pa - pb);
  }
  return 0.5 * tv;
}

}  // namespace oracle
