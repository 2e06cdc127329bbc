#include "bart/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "bart/errors.hpp"

namespace bart {

Tree::Tree(std::size_t n_rows) : root_(std::make_unique<Node>()) {
  root_->rows.resize(n_rows);
  std::iota(root_->rows.begin(), root_->rows.end(), 0);
}

namespace {

std::unique_ptr<Node> clone_node(const Node& node, Node* parent) {
  auto copy = std::make_unique<Node>();
  copy->parent = parent;
  copy->depth = node.depth;
  copy->rule = node.rule;
  copy->leaf_value = node.leaf_value;
  copy->rows = node.rows;
  copy->stats = node.stats;
  if (node.cache) copy->cache = std::make_unique<std::vector<FeatureSummary>>(*node.cache);
  if (node.left) {
    copy->left = clone_node(*node.left, copy.get());
    copy->right = clone_node(*node.right, copy.get());
  }
  return copy;
}

template <typename NodeT, typename Fn>
void walk_preorder(NodeT& node, Fn&& fn) {
  fn(node);
  if (!node.is_leaf()) {
    walk_preorder(*node.left, fn);
    walk_preorder(*node.right, fn);
  }
}

}  // namespace

Tree Tree::clone() const {
  Tree copy(0);
  copy.root_ = clone_node(*root_, nullptr);
  return copy;
}

std::vector<Node*> Tree::leaves() {
  std::vector<Node*> out;
  walk_preorder(*root_, [&](Node& n) {
    if (n.is_leaf()) out.push_back(&n);
  });
  return out;
}

std::vector<const Node*> Tree::leaves() const {
  std::vector<const Node*> out;
  walk_preorder(*root_, [&](const Node& n) {
    if (n.is_leaf()) out.push_back(&n);
  });
  return out;
}

std::vector<Node*> Tree::singly_internal_nodes() {
  std::vector<Node*> out;
  walk_preorder(*root_, [&](Node& n) {
    if (n.is_singly_internal()) out.push_back(&n);
  });
  return out;
}

TreeStats Tree::structure_stats() const {
  TreeStats s;
  walk_preorder(*root_, [&](const Node& n) {
    ++s.num_nodes;
    s.max_depth = std::max(s.max_depth, n.depth);
    if (n.is_leaf()) {
      ++s.num_leaves;
    } else if (n.is_singly_internal()) {
      ++s.num_singly_internal;
    }
  });
  return s;
}

const Node* Tree::route(const ModelFrame& frame, std::size_t row) const {
  const Node* node = root_.get();
  while (!node->is_leaf()) {
    const SplitRule& rule = node->rule;
    const bool left = rule_sends_left(rule, frame.value(row, rule.feature),
                                      frame.missing(row, rule.feature));
    node = left ? node->left.get() : node->right.get();
  }
  return node;
}

double Tree::sum_of_leaf_values(const ModelFrame& frame, std::size_t row) const {
  return route(frame, row)->leaf_value;
}

namespace {

// Cache slots start unset (unique_count = -1) and fill on first use; a
// node's data never changes while it exists, so entries stay valid.
constexpr int kUnsetSummary = -1;

const FeatureSummary& cached_summary(Node& node, const ModelFrame& frame,
                                     std::size_t feature) {
  if (!node.cache) {
    node.cache = std::make_unique<std::vector<FeatureSummary>>(
        frame.n_cols(), FeatureSummary{kUnsetSummary, false});
  }
  FeatureSummary& slot = (*node.cache)[feature];
  if (slot.unique_count == kUnsetSummary) {
    if (node.is_leaf()) {
      slot = feature_summary(frame, node.rows, feature);
    } else {
      const std::vector<int> rows = node_rows(node);
      slot = feature_summary(frame, rows, feature);
    }
  }
  return slot;
}

}  // namespace

Node* Tree::grow_at(Node& leaf, const SplitRule& rule, const ModelFrame& frame,
                    std::span<const double> resid, bool memcache) {
  if (!leaf.is_leaf()) throw InternalError("grow_at: target is not a leaf");
  leaf.left = std::make_unique<Node>();
  leaf.right = std::make_unique<Node>();
  leaf.left->parent = &leaf;
  leaf.right->parent = &leaf;
  leaf.left->depth = leaf.depth + 1;
  leaf.right->depth = leaf.depth + 1;
  for (int row : leaf.rows) {
    const bool go_left = rule_sends_left(rule, frame.value(row, rule.feature),
                                         frame.missing(row, rule.feature));
    (go_left ? leaf.left : leaf.right)->rows.push_back(row);
  }
  if (leaf.left->rows.empty() || leaf.right->rows.empty()) {
    throw InternalError("grow_at: rule produced an empty child");
  }
  leaf.rule = rule;
  leaf.left->leaf_value = leaf.leaf_value;
  leaf.right->leaf_value = leaf.leaf_value;
  (void)memcache;  // summaries fill lazily on first query
  for (Node* child : {leaf.left.get(), leaf.right.get()}) {
    child->stats = NodeSufficientStats{};
    for (int row : child->rows) {
      child->stats.n++;
      child->stats.sum_r += resid[row];
      child->stats.sum_r_sq += resid[row] * resid[row];
    }
  }
  leaf.rows.clear();
  leaf.rows.shrink_to_fit();
  return &leaf;
}

void Tree::prune_at(Node& node) {
  if (!node.is_singly_internal()) {
    throw InternalError("prune_at: target is not singly internal");
  }
  node.rows.reserve(node.left->rows.size() + node.right->rows.size());
  node.rows.insert(node.rows.end(), node.left->rows.begin(), node.left->rows.end());
  node.rows.insert(node.rows.end(), node.right->rows.begin(), node.right->rows.end());
  node.stats.n = node.left->stats.n + node.right->stats.n;
  node.stats.sum_r = node.left->stats.sum_r + node.right->stats.sum_r;
  node.stats.sum_r_sq = node.left->stats.sum_r_sq + node.right->stats.sum_r_sq;
  node.leaf_value = node.left->leaf_value;
  node.left.reset();
  node.right.reset();
  node.rule = SplitRule{};
}

void Tree::change_at(Node& node, const SplitRule& rule, const ModelFrame& frame,
                     std::span<const double> resid, bool memcache) {
  if (!node.is_singly_internal()) {
    throw InternalError("change_at: target is not singly internal");
  }
  std::vector<int> merged = node_rows(node);
  node.left->rows.clear();
  node.right->rows.clear();
  for (int row : merged) {
    const bool go_left = rule_sends_left(rule, frame.value(row, rule.feature),
                                         frame.missing(row, rule.feature));
    (go_left ? node.left : node.right)->rows.push_back(row);
  }
  if (node.left->rows.empty() || node.right->rows.empty()) {
    throw InternalError("change_at: rule produced an empty child");
  }
  node.rule = rule;
  (void)memcache;
  for (Node* child : {node.left.get(), node.right.get()}) {
    child->stats = NodeSufficientStats{};
    for (int row : child->rows) {
      child->stats.n++;
      child->stats.sum_r += resid[row];
      child->stats.sum_r_sq += resid[row] * resid[row];
    }
    child->cache.reset();  // the rule change reassigned the child rows
  }
}

void Tree::refresh_leaf_stats(std::span<const double> resid) {
  walk_preorder(*root_, [&](Node& n) {
    if (!n.is_leaf()) return;
    n.stats = NodeSufficientStats{};
    for (int row : n.rows) {
      n.stats.n++;
      n.stats.sum_r += resid[row];
      n.stats.sum_r_sq += resid[row] * resid[row];
    }
  });
}

std::string Tree::dump(const std::vector<std::string>& column_names) const {
  std::ostringstream os;
  os.precision(10);
  walk_preorder(*root_, [&](const Node& n) {
    for (int d = 0; d < n.depth; ++d) os << "  ";
    if (n.is_leaf()) {
      os << "leaf n=" << n.stats.n << " mu=" << n.leaf_value << "\n";
    } else {
      const auto& name = column_names.at(n.rule.feature);
      os << "split " << name;
      switch (n.rule.mia) {
        case MiaType::MissingLeft:
          os << " <= " << n.rule.value << " (missing left)";
          break;
        case MiaType::MissingRight:
          os << " <= " << n.rule.value << " (missing right)";
          break;
        case MiaType::MissingOnly:
          os << " missing-only";
          break;
      }
      os << "\n";
    }
  });
  return os.str();
}

FeatureSummary feature_summary(const ModelFrame& frame, std::span<const int> rows,
                               std::size_t feature) {
  thread_local std::vector<double> observed;
  observed.clear();
  observed.reserve(rows.size());
  FeatureSummary out;
  for (int row : rows) {
    if (frame.missing(row, feature)) {
      out.has_missing = true;
    } else {
      observed.push_back(frame.value(row, feature));
    }
  }
  std::sort(observed.begin(), observed.end());
  const auto last = std::unique(observed.begin(), observed.end());
  out.unique_count = static_cast<int>(last - observed.begin());
  return out;
}

const std::vector<FeatureSummary>& node_summaries(
    Node& node, const ModelFrame& frame, bool memcache,
    std::vector<FeatureSummary>& scratch) {
  if (memcache) {
    for (std::size_t j = 0; j < frame.n_cols(); ++j) cached_summary(node, frame, j);
    return *node.cache;
  }
  scratch.resize(frame.n_cols());
  if (node.is_leaf()) {
    for (std::size_t j = 0; j < frame.n_cols(); ++j) {
      scratch[j] = feature_summary(frame, node.rows, j);
    }
  } else {
    const std::vector<int> rows = node_rows(node);
    for (std::size_t j = 0; j < frame.n_cols(); ++j) {
      scratch[j] = feature_summary(frame, rows, j);
    }
  }
  return scratch;
}

bool feature_available(const ModelFrame& frame, std::span<const int> rows,
                       std::size_t feature, bool mia) {
  bool has_first = false;
  bool has_missing = false;
  double first = 0.0;
  for (int row : rows) {
    if (frame.missing(row, feature)) {
      has_missing = true;
      if (mia && has_first) return true;
      continue;
    }
    const double v = frame.value(row, feature);
    if (!has_first) {
      has_first = true;
      first = v;
      if (mia && has_missing) return true;
    } else if (v != first) {
      return true;  // two distinct observed values
    }
  }
  return false;
}

int node_candidate_count(Node& node, const ModelFrame& frame, std::size_t feature,
                         bool mia, bool memcache) {
  if (memcache) {
    return candidate_count(cached_summary(node, frame, feature), mia);
  }
  if (node.is_leaf()) {
    return candidate_count(feature_summary(frame, node.rows, feature), mia);
  }
  const std::vector<int> rows = node_rows(node);
  return candidate_count(feature_summary(frame, rows, feature), mia);
}

FeatureChoice node_feature_choice(Node& node, const ModelFrame& frame,
                                  std::span<const double> cov_weights, bool mia,
                                  bool memcache) {
  // Availability is an early-exit scan in both modes; memcache only affects
  // whether exact candidate counts are memoized on the node.
  (void)memcache;
  FeatureChoice out;
  double total = 0.0;
  const std::vector<int> gathered = node.is_leaf() ? std::vector<int>() : node_rows(node);
  const std::span<const int> rows = node.is_leaf() ? std::span<const int>(node.rows)
                                                   : std::span<const int>(gathered);
  for (std::size_t j = 0; j < frame.n_cols(); ++j) {
    if (!feature_available(frame, rows, j, mia)) continue;
    const double w = cov_weights.empty() ? 1.0 : cov_weights[j];
    out.features.push_back(static_cast<int>(j));
    out.weights.push_back(w);
    total += w;
  }
  for (double& w : out.weights) w /= total;
  return out;
}

double FeatureChoice::weight_of(int feature) const {
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i] == feature) return weights[i];
  }
  return 0.0;
}

std::vector<double> candidate_values(const ModelFrame& frame,
                                     std::span<const int> rows,
                                     std::size_t feature) {
  std::vector<double> observed;
  observed.reserve(rows.size());
  for (int row : rows) {
    if (!frame.missing(row, feature)) observed.push_back(frame.value(row, feature));
  }
  std::sort(observed.begin(), observed.end());
  observed.erase(std::unique(observed.begin(), observed.end()), observed.end());
  if (!observed.empty()) observed.pop_back();  // the maximum is never a cut
  return observed;
}

SplitRule candidate_rule(const ModelFrame& frame, std::span<const int> rows,
                         std::size_t feature, int index, bool mia) {
  const std::vector<double> cuts = candidate_values(frame, rows, feature);
  const int base = static_cast<int>(cuts.size());
  SplitRule rule;
  rule.feature = static_cast<int>(feature);
  if (index < base) {
    rule.value = cuts[index];
    rule.mia = MiaType::MissingLeft;
    return rule;
  }
  if (!mia) throw InternalError("candidate_rule: index out of range");
  if (index < 2 * base) {
    rule.value = cuts[index - base];
    rule.mia = MiaType::MissingRight;
    return rule;
  }
  if (index == 2 * base) {
    rule.mia = MiaType::MissingOnly;
    return rule;
  }
  throw InternalError("candidate_rule: index out of range");
}

CandidateSet gather_candidates(const ModelFrame& frame, std::span<const int> rows,
                               std::size_t feature) {
  CandidateSet out;
  out.feature = static_cast<int>(feature);
  out.cuts.reserve(rows.size());
  for (int row : rows) {
    if (frame.missing(row, feature)) {
      out.has_missing = true;
    } else {
      out.cuts.push_back(frame.value(row, feature));
    }
  }
  out.any_observed = !out.cuts.empty();
  std::sort(out.cuts.begin(), out.cuts.end());
  out.cuts.erase(std::unique(out.cuts.begin(), out.cuts.end()), out.cuts.end());
  if (!out.cuts.empty()) out.cuts.pop_back();
  return out;
}

SplitRule CandidateSet::rule_at(int index, bool mia) const {
  const int base = static_cast<int>(cuts.size());
  SplitRule rule;
  rule.feature = feature;
  if (index < base) {
    rule.value = cuts[index];
    rule.mia = MiaType::MissingLeft;
    return rule;
  }
  if (!mia) throw InternalError("CandidateSet: index out of range");
  if (index < 2 * base) {
    rule.value = cuts[index - base];
    rule.mia = MiaType::MissingRight;
    return rule;
  }
  if (index == 2 * base && has_missing && any_observed) {
    rule.mia = MiaType::MissingOnly;
    return rule;
  }
  throw InternalError("CandidateSet: index out of range");
}

double AvailablePredictors::weight_of(int feature) const {
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i] == feature) return weights[i];
  }
  return 0.0;
}

int AvailablePredictors::count_of(int feature) const {
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i] == feature) return counts[i];
  }
  return 0;
}

AvailablePredictors available_predictors(const std::vector<FeatureSummary>& summaries,
                                         std::span<const double> cov_weights,
                                         bool mia) {
  AvailablePredictors out;
  double total = 0.0;
  for (std::size_t j = 0; j < summaries.size(); ++j) {
    const int count = candidate_count(summaries[j], mia);
    if (count <= 0) continue;
    const double w = cov_weights.empty() ? 1.0 : cov_weights[j];
    out.features.push_back(static_cast<int>(j));
    out.weights.push_back(w);
    out.counts.push_back(count);
    total += w;
  }
  for (double& w : out.weights) w /= total;
  return out;
}

std::vector<int> node_rows(const Node& node) {
  if (node.is_leaf()) return node.rows;
  std::vector<int> rows;
  walk_preorder(node, [&](const Node& n) {
    if (n.is_leaf()) rows.insert(rows.end(), n.rows.begin(), n.rows.end());
  });
  return rows;
}

SplitStats partition_stats(const ModelFrame& frame, std::span<const int> rows,
                           const SplitRule& rule, std::span<const double> resid) {
  SplitStats out;
  for (int row : rows) {
    const bool go_left = rule_sends_left(rule, frame.value(row, rule.feature),
                                         frame.missing(row, rule.feature));
    NodeSufficientStats& side = go_left ? out.left : out.right;
    side.n++;
    side.sum_r += resid[row];
    side.sum_r_sq += resid[row] * resid[row];
  }
  return out;
}

namespace {

std::int32_t capture_node(const Node& node, std::vector<SnapshotNode>& out) {
  const auto idx = static_cast<std::int32_t>(out.size());
  out.emplace_back();
  if (node.is_leaf()) {
    out[idx].leaf_value = node.leaf_value;
  } else {
    out[idx].feature = node.rule.feature;
    out[idx].value = node.rule.value;
    out[idx].mia = static_cast<std::uint8_t>(node.rule.mia);
  }
  if (!node.is_leaf()) {
    const std::int32_t l = capture_node(*node.left, out);
    const std::int32_t r = capture_node(*node.right, out);
    out[idx].left = l;
    out[idx].right = r;
  }
  return idx;
}

}  // namespace

TreeSnapshot TreeSnapshot::capture(const Tree& tree) {
  TreeSnapshot snap;
  capture_node(tree.root(), snap.nodes);
  return snap;
}

}  // namespace bart
