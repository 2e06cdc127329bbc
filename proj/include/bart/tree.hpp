#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "bart/dataset.hpp"

namespace bart {

// Splitting rules route missing values deterministically:
//   MissingLeft  - missing goes left;  present goes left iff x <= value
//   MissingRight - missing goes right; present goes left iff x <= value
//   MissingOnly  - missing goes left;  present goes right (no value)
// Without missing-data support only MissingLeft rules are produced.
enum class MiaType : std::uint8_t {
  MissingLeft = 1,
  MissingRight = 2,
  MissingOnly = 3,
};

struct SplitRule {
  int feature = -1;
  double value = 0.0;
  MiaType mia = MiaType::MissingLeft;
};

inline bool rule_sends_left(const SplitRule& rule, double x, bool missing) {
  switch (rule.mia) {
    case MiaType::MissingLeft:
      return missing || x <= rule.value;
    case MiaType::MissingRight:
      return !missing && x <= rule.value;
    case MiaType::MissingOnly:
      return missing;
  }
  return false;
}

struct NodeSufficientStats {
  long n = 0;
  double sum_r = 0.0;
  double sum_r_sq = 0.0;  // carried along; the acceptance ratios only use sum_r
};

// Per-feature distinct-value bookkeeping at a node.
struct FeatureSummary {
  int unique_count = 0;   // distinct observed (non-missing) values
  bool has_missing = false;
};

// Number of candidate split rules for a feature at a node. The node maximum
// is never a cut so both children stay nonempty; with missing-data support a
// (feature, cut) pair appears once per missing direction and a missing-only
// rule is added when the node actually has missing entries in the feature.
inline int candidate_count(const FeatureSummary& s, bool mia) {
  const int base = s.unique_count > 1 ? s.unique_count - 1 : 0;
  if (!mia) return base;
  return 2 * base + ((s.has_missing && s.unique_count >= 1) ? 1 : 0);
}

struct Node {
  Node* parent = nullptr;
  std::unique_ptr<Node> left;
  std::unique_ptr<Node> right;
  int depth = 0;
  SplitRule rule;           // internal nodes only
  double leaf_value = 0.0;  // terminal nodes only
  std::vector<int> rows;    // terminal nodes only; rows reaching this node
  NodeSufficientStats stats;
  // Lazily built per-feature summaries (the "memcache"); valid for the
  // node's lifetime because a node's data never changes while it exists.
  std::unique_ptr<std::vector<FeatureSummary>> cache;

  bool is_leaf() const { return left == nullptr; }
  bool is_singly_internal() const {
    return !is_leaf() && left->is_leaf() && right->is_leaf();
  }
};

struct TreeStats {
  int num_leaves = 0;          // b
  int num_singly_internal = 0; // w2
  int num_nodes = 0;
  int max_depth = 0;
};

class Tree {
 public:
  // Single-leaf tree holding rows [0, n).
  explicit Tree(std::size_t n_rows);
  Tree clone() const;

  Node& root() { return *root_; }
  const Node& root() const { return *root_; }

  std::vector<Node*> leaves();
  std::vector<const Node*> leaves() const;
  std::vector<Node*> singly_internal_nodes();
  TreeStats structure_stats() const;

  const Node* route(const ModelFrame& frame, std::size_t row) const;

  // Structure edits. Row sets, sufficient statistics and caches of affected
  // nodes are maintained; resid supplies the values behind the statistics.
  Node* grow_at(Node& leaf, const SplitRule& rule, const ModelFrame& frame,
                std::span<const double> resid, bool memcache);
  void prune_at(Node& singly_internal);
  void change_at(Node& singly_internal, const SplitRule& rule,
                 const ModelFrame& frame, std::span<const double> resid,
                 bool memcache);

  // Recomputes leaf sufficient statistics against the current residuals.
  void refresh_leaf_stats(std::span<const double> resid);

  double sum_of_leaf_values(const ModelFrame& frame, std::size_t row) const;

  // Indented structural dump for debugging and golden tests.
  std::string dump(const std::vector<std::string>& column_names) const;

 private:
  std::unique_ptr<Node> root_;
};

// ---- candidate enumeration ---------------------------------------------------

FeatureSummary feature_summary(const ModelFrame& frame, std::span<const int> rows,
                               std::size_t feature);

// Summaries for every feature; cached on the node when memcache is on,
// recomputed into `scratch` otherwise. Both paths produce identical content.
const std::vector<FeatureSummary>& node_summaries(
    Node& node, const ModelFrame& frame, bool memcache,
    std::vector<FeatureSummary>& scratch);

// True iff the feature still admits at least one candidate rule at the node.
// Early-exit scan; equivalent to candidate_count(feature_summary(...)) > 0.
bool feature_available(const ModelFrame& frame, std::span<const int> rows,
                       std::size_t feature, bool mia);

// Candidate count for one feature at a node: O(1) from the cache when
// memcache is on, one exact recomputation otherwise.
int node_candidate_count(Node& node, const ModelFrame& frame, std::size_t feature,
                         bool mia, bool memcache);

// Distinct observed values at the node minus the maximum, ascending. These
// are the usable cut values for the feature.
std::vector<double> candidate_values(const ModelFrame& frame,
                                     std::span<const int> rows,
                                     std::size_t feature);

// Maps a flat candidate index (in [0, candidate_count)) to a concrete rule.
SplitRule candidate_rule(const ModelFrame& frame, std::span<const int> rows,
                         std::size_t feature, int index, bool mia);

// One gathered candidate set: count and index-to-rule mapping without
// rescanning the rows.
struct CandidateSet {
  int feature = -1;
  std::vector<double> cuts;  // sorted unique observed values minus the max
  bool has_missing = false;
  bool any_observed = false;

  int count(bool mia) const {
    const int base = static_cast<int>(cuts.size());
    if (!mia) return base;
    return 2 * base + ((has_missing && any_observed) ? 1 : 0);
  }
  SplitRule rule_at(int index, bool mia) const;
};
CandidateSet gather_candidates(const ModelFrame& frame, std::span<const int> rows,
                               std::size_t feature);

struct AvailablePredictors {
  std::vector<int> features;      // features with at least one candidate rule
  std::vector<double> weights;    // renormalized selection probabilities
  std::vector<int> counts;        // candidate rule count per feature
  double weight_of(int feature) const;
  int count_of(int feature) const;
};

// Features that still admit a split at the node, weighted by the covariate
// prior restricted to that set.
AvailablePredictors available_predictors(const std::vector<FeatureSummary>& summaries,
                                         std::span<const double> cov_weights,
                                         bool mia);

// Availability and weights only (counts queried separately through
// node_candidate_count); the cheap path the sampler uses per proposal.
struct FeatureChoice {
  std::vector<int> features;
  std::vector<double> weights;
  double weight_of(int feature) const;
  bool empty() const { return features.empty(); }
};
FeatureChoice node_feature_choice(Node& node, const ModelFrame& frame,
                                  std::span<const double> cov_weights, bool mia,
                                  bool memcache);

// Rows reaching a node (leaves own theirs; internal nodes gather from leaves).
std::vector<int> node_rows(const Node& node);

struct SplitStats {
  NodeSufficientStats left;
  NodeSufficientStats right;
};

// Statistics of the two children a rule would induce on the given rows.
SplitStats partition_stats(const ModelFrame& frame, std::span<const int> rows,
                           const SplitRule& rule, std::span<const double> resid);

// ---- immutable snapshots -----------------------------------------------------

struct SnapshotNode {
  std::int32_t feature = -1;
  double value = 0.0;
  std::uint8_t mia = 0;
  std::int32_t left = -1;   // -1 for leaves
  std::int32_t right = -1;
  double leaf_value = 0.0;

  bool is_leaf() const { return left < 0; }
};

// Compact read-only copy of a tree, preorder, root first. This is what kept
// posterior samples store; prediction never touches live trees.
struct TreeSnapshot {
  std::vector<SnapshotNode> nodes;

  static TreeSnapshot capture(const Tree& tree);

  template <typename ValueAt, typename MissingAt>
  double predict(ValueAt value_at, MissingAt missing_at) const {
    std::int32_t idx = 0;
    while (!nodes[idx].is_leaf()) {
      const SnapshotNode& nd = nodes[idx];
      SplitRule rule{nd.feature, nd.value, static_cast<MiaType>(nd.mia)};
      const bool left = rule_sends_left(rule, value_at(nd.feature), missing_at(nd.feature));
      idx = left ? nd.left : nd.right;
    }
    return nodes[idx].leaf_value;
  }

  double predict_row(const ModelFrame& frame, std::size_t row) const {
    return predict([&](int j) { return frame.value(row, j); },
                   [&](int j) { return frame.missing(row, j); });
  }
};

}  // namespace bart
