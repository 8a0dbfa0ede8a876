#include "thts/tree.hpp"

#include <cmath>

#include "thts/error.hpp"

namespace thts {

namespace {

bandit::ArmStats leaf_stats(double h) {
  bandit::ArmStats s;
  s.add(h);
  return s;
}

}  // namespace

NodeId SearchTree::add_root(HValue h, std::uint32_t state) {
  nodes_.clear();
  SearchNode root;
  root.h = h;
  root.state = state;
  if (h.is_infinite()) {
    root.status = NodeStatus::kDead;
  } else {
    root.stats = leaf_stats(h.value());
    root.clark = {h.value(), 0.0};
    root.min_leaf = 0;
  }
  nodes_.push_back(std::move(root));
  root_ = 0;
  return root_;
}

void SearchTree::attach_children(NodeId leaf, std::span<const ChildSpec> children) {
  if (nodes_[leaf].status != NodeStatus::kLeaf) {
    throw ContractViolation("attach_children on a node that is not a live leaf");
  }
  for (const ChildSpec& spec : children) {
    SearchNode child;
    child.parent = leaf;
    child.h = spec.h;
    child.state = spec.state;
    child.action = spec.action;
    child.preferred = spec.preferred;
    child.depth = nodes_[leaf].depth + 1;
    const auto id = static_cast<NodeId>(nodes_.size());
    if (spec.h.is_finite()) {
      child.stats = leaf_stats(spec.h.value());
      child.clark = {spec.h.value(), 0.0};
      child.min_leaf = id;
    }
    nodes_.push_back(std::move(child));
    nodes_[leaf].children.push_back(id);
  }
  if (!children.empty()) nodes_[leaf].status = NodeStatus::kInterior;
}

void SearchTree::refresh(NodeId id) {
  SearchNode& n = nodes_[id];
  if (n.status != NodeStatus::kInterior) return;
  bandit::ArmStats pooled;
  bool first = true;
  bandit::GaussianEstimate clark{0.0, 0.0};
  NodeId min_leaf = kNoNode;
  for (NodeId c : n.children) {
    const SearchNode& child = nodes_[c];
    if (child.status == NodeStatus::kLeaf && child.h.is_infinite()) {
      throw ContractViolation("infinite heuristic value reached backup; remove dead-ends first");
    }
    if (min_leaf == kNoNode || child.stats.lo < pooled.lo ||
        (child.stats.lo == pooled.lo && child.min_leaf < min_leaf)) {
      min_leaf = child.min_leaf;
    }
    pooled.merge(child.stats);
    // Each child enters as the Gaussian fit of its leaf rewards.
    const double mu = child.stats.mean();
    const double sigma = child.stats.std_dev();
    if (first) {
      clark = {mu, sigma};
      first = false;
    } else {
      clark = bandit::clark_extreme_moments(clark.mean, clark.std_dev, mu, sigma,
                                            bandit::Direction::kMinimize);
    }
  }
  n.stats = pooled;
  n.clark = clark;
  n.min_leaf = min_leaf;
}

void SearchTree::backup(NodeId from) {
  for (NodeId id = from; id != kNoNode; id = nodes_[id].parent) refresh(id);
}

void SearchTree::remove_dead_end(NodeId node) {
  NodeId id = node;
  while (true) {
    SearchNode& n = nodes_[id];
    n.status = NodeStatus::kDead;
    n.stats = {};
    const NodeId parent = n.parent;
    if (parent == kNoNode) return;  // root died: search space exhausted
    auto& siblings = nodes_[parent].children;
    std::erase(siblings, id);
    if (!siblings.empty()) {
      backup(parent);
      return;
    }
    id = parent;
  }
}

std::size_t SearchTree::expand(NodeId leaf, std::span<const ChildSpec> children) {
  const std::size_t first = nodes_.size();
  attach_children(leaf, children);
  std::size_t live = 0;
  for (std::size_t i = first; i < nodes_.size(); ++i) {
    if (nodes_[i].h.is_infinite()) {
      // Detach without cascading: the leaf's fate is decided below.
      nodes_[i].status = NodeStatus::kDead;
      std::erase(nodes_[leaf].children, static_cast<NodeId>(i));
    } else {
      ++live;
    }
  }
  if (live == 0) {
    nodes_[leaf].status = NodeStatus::kInterior;
    remove_dead_end(leaf);
    return 0;
  }
  backup(leaf);
  return live;
}

std::vector<NodeId> SearchTree::live_leaves(NodeId id) const {
  std::vector<NodeId> out;
  if (nodes_[id].status == NodeStatus::kDead) return out;
  std::vector<NodeId> stack{id};
  while (!stack.empty()) {
    const NodeId n = stack.back();
    stack.pop_back();
    const SearchNode& node = nodes_[n];
    if (node.status == NodeStatus::kLeaf) {
      out.push_back(n);
    } else if (node.status == NodeStatus::kInterior) {
      for (NodeId c : node.children) stack.push_back(c);
    }
  }
  return out;
}

NecInputs nec_inputs(const SearchNode& child, Backup backup, const bandit::PolicyConfig& cfg) {
  const auto& s = child.stats;
  const double pulls = static_cast<double>(s.t);
  const double spread = cfg.kind == bandit::PolicyKind::kUcb1 ? cfg.c : s.std_dev();
  const bool minimize = cfg.direction == bandit::Direction::kMinimize;
  switch (backup) {
    case Backup::kMonteCarlo: return {s.mean(), spread, pulls};
    case Backup::kFullBellman: return {minimize ? s.lo : s.hi, spread, pulls};
    case Backup::kUniformBounds: return {(s.hi + s.lo) / 2.0, s.hi - s.lo, pulls};
    case Backup::kClark: {
      const double sigma = cfg.kind == bandit::PolicyKind::kUcb1 ? cfg.c : child.clark.std_dev;
      return {child.clark.mean, sigma, pulls};
    }
  }
  return {0.0, 0.0, pulls};
}

NodeId select_child(const SearchTree& tree, NodeId node, const SelectionRule& rule) {
  const SearchNode& parent = tree.node(node);
  const auto& children = parent.children;
  if (children.empty()) throw ContractViolation("select_child on a node without children");

  if (rule.preferred_first) {
    for (NodeId c : children) {
      const SearchNode& child = tree.node(c);
      if (child.preferred && child.status == NodeStatus::kLeaf) return c;
    }
  }
  const double total = static_cast<double>(parent.stats.t);
  if (rule.policy.kind == bandit::PolicyKind::kUcb1Normal && rule.policy.auer_side_condition) {
    const double threshold = std::ceil(8.0 * std::log(total));
    for (NodeId c : children) {
      if (static_cast<double>(tree.node(c).stats.t) < threshold) return c;
    }
  }

  const std::size_t n = children.size();
  std::vector<double> center(n), spread(n), pulls(n), out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const NecInputs in = nec_inputs(tree.node(children[i]), rule.backup, rule.policy);
    center[i] = in.center;
    spread[i] = in.spread;
    pulls[i] = in.pulls;
  }
  if (rule.policy.kind == bandit::PolicyKind::kUcb1 && rule.policy.c == 0.0) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i) {
      const bool better = rule.policy.direction == bandit::Direction::kMinimize
                              ? center[i] < center[best]
                              : center[i] > center[best];
      if (better || (center[i] == center[best] &&
                     tree.node(children[i]).min_leaf < tree.node(children[best]).min_leaf)) {
        best = i;
      }
    }
    return children[best];
  }
  simd::kernels().bandit_indices(center.data(), spread.data(), pulls.data(), n,
                                 bandit::index_params(rule.policy, total), out.data());
  return children[bandit::best_index(out, rule.policy.direction)];
}

std::vector<NodeId> select_path(const SearchTree& tree, const SelectionRule& rule) {
  std::vector<NodeId> path;
  if (tree.root_dead()) return path;
  NodeId id = tree.root();
  path.push_back(id);
  while (tree.node(id).status == NodeStatus::kInterior) {
    id = select_child(tree, id, rule);
    path.push_back(id);
  }
  return path;
}

}  // namespace thts
