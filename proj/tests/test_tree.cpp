#include <doctest.h>

#include <numbers>

#include "thts/error.hpp"
#include "thts/tree.hpp"
#include "tree_oracle.hpp"

using namespace thts;
using namespace thts::testing;
using bandit::Direction;
using bandit::PolicyKind;

namespace {

std::vector<ChildSpec> leaves(std::initializer_list<double> hs) {
  std::vector<ChildSpec> out;
  for (double h : hs) {
    ChildSpec c;
    c.h = std::isinf(h) ? HValue::infinity() : HValue(h);
    out.push_back(c);
  }
  return out;
}

bandit::PolicyConfig minimize(PolicyKind kind) {
  bandit::PolicyConfig cfg;
  cfg.kind = kind;
  cfg.direction = Direction::kMinimize;
  return cfg;
}

}  // namespace

TEST_CASE("Monte Carlo mean over leaves") {
  SearchTree tree;
  const NodeId root = tree.add_root(HValue(9.0));
  CHECK(tree.node(root).stats.mean() == 9.0);
  tree.expand(root, leaves({3, 5, 4}));
  CHECK(tree.node(root).stats.mean() == 4.0);
  CHECK(tree.node(root).stats.t == 3);

  SearchTree single;
  single.add_root(HValue(1.0));
  single.expand(0, leaves({7}));
  CHECK(single.node(0).stats.mean() == 7.0);
  CHECK(single.node(0).stats.lo == 7.0);
  CHECK(single.node(0).stats.hi == 7.0);
}

TEST_CASE("dead-end removal: 3, 5, 4 and infinity") {
  // Without removal the naive mean is infinite.
  const double raw[] = {3.0, 5.0, 4.0, std::numeric_limits<double>::infinity()};
  CHECK(std::isinf(bandit::ArmStats::of(raw).mean()));

  SearchTree unfiltered;
  unfiltered.add_root(HValue(9.0));
  unfiltered.attach_children(0, leaves({3, 5, 4, INFINITY}));
  CHECK_THROWS_AS(unfiltered.backup(0), ContractViolation);
  unfiltered.remove_dead_end(4);
  unfiltered.backup(0);
  CHECK(unfiltered.node(0).stats.mean() == 4.0);

  SearchTree tree;
  tree.add_root(HValue(9.0));
  CHECK(tree.expand(0, leaves({3, 5, 4, INFINITY})) == 3);
  CHECK(tree.node(0).stats.mean() == 4.0);
  CHECK(tree.node(0).children.size() == 3);
}

TEST_CASE("removal cascades through childless parents") {
  SearchTree tree;
  tree.add_root(HValue(5.0));
  tree.expand(0, leaves({2, 6}));           // nodes 1, 2
  tree.expand(1, leaves({1}));              // node 3
  CHECK(tree.node(0).stats.lo == 1.0);
  tree.remove_dead_end(3);
  CHECK(tree.node(1).status == NodeStatus::kDead);
  CHECK(tree.node(0).children == std::vector<NodeId>{2});
  CHECK(tree.node(0).stats.t == 1);
  CHECK(tree.node(0).stats.lo == 6.0);
  tree.remove_dead_end(2);
  CHECK(tree.root_dead());
}

TEST_CASE("expanding into only dead children kills the leaf") {
  SearchTree tree;
  tree.add_root(HValue(5.0));
  tree.expand(0, leaves({2, 6}));
  CHECK(tree.expand(1, leaves({INFINITY, INFINITY})) == 0);
  CHECK(tree.node(1).status == NodeStatus::kDead);
  CHECK(tree.node(0).stats.mean() == 6.0);
  CHECK(tree.expand(2, {}) == 0);
  CHECK(tree.root_dead());
}

TEST_CASE("infinite root is dead") {
  SearchTree tree;
  tree.add_root(HValue::infinity());
  CHECK(tree.root_dead());
  CHECK(select_path(tree, {}).empty());
}

TEST_CASE("Full Bellman value is the minimum over leaves") {
  const auto cfg = minimize(PolicyKind::kUcb1);
  SearchTree tree;
  tree.add_root(HValue(9.0));
  tree.expand(0, leaves({3, 5, 4}));
  CHECK(nec_inputs(tree.node(0), Backup::kFullBellman, cfg).center == 3.0);

  SearchTree flat;
  flat.add_root(HValue(9.0));
  flat.expand(0, leaves({6, 6, 6}));
  CHECK(nec_inputs(flat.node(0), Backup::kFullBellman, cfg).center == 6.0);
}

TEST_CASE("Full Bellman on random 200-leaf trees") {
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> hval(0.0, 50.0);
  const auto cfg = minimize(PolicyKind::kUcb1);
  for (int rep = 0; rep < 20; ++rep) {
    SearchTree tree;
    tree.add_root(HValue(hval(rng)));
    while (tree.live_leaves(tree.root()).size() < 200) {
      auto live = tree.live_leaves(tree.root());
      const NodeId leaf = live[std::uniform_int_distribution<std::size_t>(0, live.size() - 1)(rng)];
      std::vector<ChildSpec> kids(3);
      for (auto& k : kids) k.h = HValue(hval(rng));
      tree.expand(leaf, kids);
    }
    for (NodeId id = 0; id < tree.size(); ++id) {
      double best = std::numeric_limits<double>::infinity();
      for (NodeId l : tree.live_leaves(id)) best = std::min(best, tree.node(l).h.value());
      CHECK(nec_inputs(tree.node(id), Backup::kFullBellman, cfg).center == best);
    }
  }
}

TEST_CASE("stat coherence with 30% dead leaves") {
  std::mt19937_64 rng(73);
  for (int rep = 0; rep < 60; ++rep) {
    CoherenceReport report;
    random_interleaving(rng, 600, 0.3, 6, report);
    CHECK_MESSAGE(report.ok(), report.first_mismatch);
  }
}

TEST_CASE("Clark backup") {
  SUBCASE("one child passes through") {
    SearchTree tree;
    tree.add_root(HValue(9.0));
    tree.expand(0, leaves({7}));
    tree.expand(1, leaves({4, 5, 6}));
    CHECK(tree.node(0).clark.mean == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(tree.node(0).clark.std_dev == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("deterministic children give the minimum") {
    SearchTree tree;
    tree.add_root(HValue(9.0));
    tree.expand(0, leaves({3, 5}));
    CHECK(tree.node(0).clark.mean == 3.0);
    CHECK(tree.node(0).clark.std_dev == 0.0);
  }
  SUBCASE("two unit Gaussians") {
    SearchTree tree;
    tree.add_root(HValue(9.0));
    tree.expand(0, leaves({7, 7}));
    tree.expand(1, leaves({4, 5, 6}));
    tree.expand(2, leaves({4, 5, 6}));
    CHECK(tree.node(0).clark.mean == doctest::Approx(5.0 - std::numbers::inv_sqrtpi).epsilon(1e-12));
    CHECK(tree.node(0).clark.std_dev ==
          doctest::Approx(std::sqrt(1.0 - std::numbers::inv_pi)).epsilon(1e-12));
  }
}

TEST_CASE("select_child") {
  SUBCASE("plateau commitment under UCB1-Uniform") {
    SearchTree tree;
    tree.add_root(HValue(9.0));
    tree.expand(0, leaves({5, 5}));  // nodes 1, 2
    tree.expand(1, leaves({4, 6, 4, 6, 4, 6, 4, 6, 4, 6}));
    tree.expand(2, leaves({4, 6, 4, 6, 6}));
    SelectionRule rule;
    rule.policy = minimize(PolicyKind::kUcb1Uniform);
    rule.backup = Backup::kUniformBounds;
    CHECK(select_child(tree, 0, rule) == 1);
  }
  SUBCASE("preferred unexpanded children first") {
    SearchTree tree;
    tree.add_root(HValue(9.0));
    auto kids = leaves({1, 8});
    kids[1].preferred = true;
    tree.expand(0, kids);
    SelectionRule rule;
    rule.policy = minimize(PolicyKind::kUcb1Uniform);
    CHECK(select_child(tree, 0, rule) == 1);
    rule.preferred_first = true;
    CHECK(select_child(tree, 0, rule) == 2);
  }
  SUBCASE("zero exploration picks the best center, ties to the first child") {
    SearchTree tree;
    tree.add_root(HValue(9.0));
    tree.expand(0, leaves({4, 2, 2}));
    SelectionRule rule;
    rule.policy = minimize(PolicyKind::kUcb1);
    rule.policy.c = 0.0;
    rule.backup = Backup::kFullBellman;
    CHECK(select_child(tree, 0, rule) == 2);
  }
}

TEST_CASE("two-plateau trials stay in the first subtree") {
  SearchTree tree;
  tree.add_root(HValue(9.0));
  tree.expand(0, leaves({5, 5}));  // subtrees 1 and 2
  tree.expand(1, leaves({4, 6, 4, 6}));
  tree.expand(2, leaves({4, 6}));
  SelectionRule rule;
  rule.policy = minimize(PolicyKind::kUcb1Uniform);
  rule.backup = Backup::kUniformBounds;
  for (int trial = 0; trial < 10; ++trial) {
    const auto path = select_path(tree, rule);
    REQUIRE(path.size() >= 2);
    CHECK(path[1] == 1);
    tree.expand(path.back(), leaves({4, 6}));
  }
}
