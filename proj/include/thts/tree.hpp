#pragma once

// Search tree for trial-based heuristic tree search.
//
// Every node caches statistics over the heuristic values of the live leaves
// in its subtree (count, sum, sum of squares, min, max), plus a Clark
// min-of-Gaussians estimate folded over the children's (mean, std dev).
// Interior nodes are recomputed from their children during
// backup, so after any sequence of expansions and dead-end removals:
//   stats(n) = pool of stats(c) over live children c
//   stats(leaf) = {1, h, h^2, h, h}

#include <cstdint>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "thts/bandit.hpp"
#include "thts/heuristics.hpp"
#include "thts/task.hpp"

namespace thts {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();
inline constexpr ActionId kNoAction = std::numeric_limits<ActionId>::max();

enum class NodeStatus : std::uint8_t { kLeaf, kInterior, kDead };

/// How a node's value is derived from its subtree leaves.
enum class Backup : std::uint8_t {
  kMonteCarlo,     // mean over leaves
  kFullBellman,    // minimum over leaves
  kUniformBounds,  // (min, max) over leaves; midrange center
  kClark,          // left fold of Clark's min-of-Gaussians over children
};

struct SearchNode {
  NodeId parent = kNoNode;
  /// Live children in insertion order.
  std::vector<NodeId> children;
  bandit::ArmStats stats;
  bandit::GaussianEstimate clark{0.0, 0.0};
  /// Earliest-generated live leaf attaining stats.lo.
  NodeId min_leaf = kNoNode;
  HValue h;
  NodeStatus status = NodeStatus::kLeaf;
  bool preferred = false;
  std::uint32_t depth = 0;
  /// Caller payload: state index and generating action.
  std::uint32_t state = 0;
  ActionId action = kNoAction;
};

struct ChildSpec {
  HValue h;
  std::uint32_t state = 0;
  ActionId action = kNoAction;
  bool preferred = false;
};

class SearchTree {
 public:
  /// Creates the root leaf. An infinite h makes the root dead immediately.
  NodeId add_root(HValue h, std::uint32_t state = 0);

  /// Attaches children to a leaf without touching ancestors. Infinite
  /// children are attached as-is; they must go through remove_dead_end
  /// before backup().
  void attach_children(NodeId leaf, std::span<const ChildSpec> children);

  /// Recomputes statistics from `from` up to the root. Throws
  /// ContractViolation if an infinite leaf value is still attached below
  /// a node on the path.
  void backup(NodeId from);

  /// Detaches a dead node and recomputes its ancestors; a parent left with
  /// no live children is removed as well, recursively up to the root.
  void remove_dead_end(NodeId node);

  /// attach_children + removal of infinite children + backup. A leaf that
  /// ends up with no live children is removed as a dead-end. Returns the
  /// number of live children attached.
  std::size_t expand(NodeId leaf, std::span<const ChildSpec> children);

  NodeId root() const { return root_; }
  bool root_dead() const { return nodes_.empty() || nodes_[root_].status == NodeStatus::kDead; }
  const SearchNode& node(NodeId id) const { return nodes_[id]; }
  std::size_t size() const { return nodes_.size(); }

  /// Brute-force enumeration of live leaves below `id` (inclusive).
  std::vector<NodeId> live_leaves(NodeId id) const;

 private:
  void refresh(NodeId id);

  std::vector<SearchNode> nodes_;
  NodeId root_ = kNoNode;
};

/// Node-evaluation criterion inputs for one child under a backup rule and
/// policy: the center the index is built around and the spread that scales
/// the exploration term.
struct NecInputs {
  double center;
  double spread;
  double pulls;
};

NecInputs nec_inputs(const SearchNode& child, Backup backup, const bandit::PolicyConfig& cfg);

struct SelectionRule {
  bandit::PolicyConfig policy;
  Backup backup = Backup::kUniformBounds;
  /// Preferred children still unexpanded are taken before the bandit.
  bool preferred_first = false;
};

/// Picks the child of an interior node: preferred-first (if enabled), then
/// the UCB1-Normal side condition, then the best index with T = |L(node)|,
/// ties to the earliest child. With UCB1 and c = 0 the choice is greedy and
/// ties go to the child holding the earliest-generated minimal leaf, so a
/// Full Bellman tree expands in the same order as FIFO-tie-broken GBFS.
NodeId select_child(const SearchTree& tree, NodeId node, const SelectionRule& rule);

/// Descends from the root to a leaf. Returns the path (root first).
std::vector<NodeId> select_path(const SearchTree& tree, const SelectionRule& rule);

}  // namespace thts
