#include "mpl/equilibrium.hpp"

#include <algorithm>
#include <cassert>

namespace mpl {

const Value& StrategyProfile::move(int agent, int node) const {
  auto a = moves.find(agent);
  if (a != moves.end()) {
    auto n = a->second.find(node);
    if (n != a->second.end()) return n->second;
  }
  throw EvalError("strategy profile has no move for agent " +
                  std::to_string(agent) + " at node " + std::to_string(node));
}

const Value& OutcomeFunction::at(int leaf) const {
  static const Value kBottom = Value::bottom();
  auto it = at_leaf.find(leaf);
  return it == at_leaf.end() ? kBottom : it->second;
}

namespace {

int child_by_action(const TreeNode& n, const JointAction& a) {
  for (const auto& [act, child] : n.action_children) {
    if (act == a) return child;
  }
  throw EvalError("no child for the requested joint action");
}

JointAction profile_action(const TreeNode& n, const StrategyProfile& sigma,
                           int node) {
  JointAction a;
  for (int agent : n.agents) a.emplace(agent, sigma.move(agent, node));
  return a;
}

void collect_subtree_agents(const GameTree& tree, int node, std::set<int>& out) {
  const TreeNode& n = tree.nodes[node];
  out.insert(n.agents.begin(), n.agents.end());
  if (n.silent_child >= 0) collect_subtree_agents(tree, n.silent_child, out);
  for (const auto& [a, c] : n.action_children) collect_subtree_agents(tree, c, out);
}

}  // namespace

int play_from(const GameTree& tree, const StrategyProfile& sigma, int node) {
  for (;;) {
    const TreeNode& n = tree.nodes[node];
    if (n.leaf != TreeNode::Leaf::No) return node;
    if (n.silent_child >= 0) {
      node = n.silent_child;
      continue;
    }
    node = child_by_action(n, profile_action(n, sigma, node));
  }
}

std::set<Value> deviation_outcomes(const GameTree& tree,
                                   const OutcomeFunction& outcomes,
                                   const StrategyProfile& sigma, int agent,
                                   const Interpretation& interp, int node) {
  const TreeNode& n = tree.nodes[node];
  if (n.leaf != TreeNode::Leaf::No) return {outcomes.at(node)};
  if (n.silent_child >= 0) {
    return deviation_outcomes(tree, outcomes, sigma, agent, interp, n.silent_child);
  }
  auto pos = std::find(n.agents.begin(), n.agents.end(), agent);
  if (pos == n.agents.end()) {
    int child = child_by_action(n, profile_action(n, sigma, node));
    return deviation_outcomes(tree, outcomes, sigma, agent, interp, child);
  }
  std::set<Value> out;
  JointAction base = profile_action(n, sigma, node);
  const auto& menu =
      interp.sort_of(n.choice_vars[pos - n.agents.begin()])->values();
  for (const auto& b : menu) {
    JointAction a = base;
    a[agent] = b;
    int child = child_by_action(n, a);
    auto sub = deviation_outcomes(tree, outcomes, sigma, agent, interp, child);
    out.insert(sub.begin(), sub.end());
  }
  return out;
}

bool is_nash(const GameTree& tree, const OutcomeFunction& outcomes,
             const StrategyProfile& sigma, const Interpretation& interp,
             int node) {
  std::set<int> agents;
  collect_subtree_agents(tree, node, agents);
  if (agents.empty()) return true;
  const Value on_path = outcomes.at(play_from(tree, sigma, node));
  for (int agent : agents) {
    for (const auto& alt :
         deviation_outcomes(tree, outcomes, sigma, agent, interp, node)) {
      if (!interp.prefers(agent, on_path, alt)) return false;
    }
  }
  return true;
}

bool is_spe(const GameTree& tree, const OutcomeFunction& outcomes,
            const StrategyProfile& sigma, const Interpretation& interp) {
  for (int node = 0; node < static_cast<int>(tree.nodes.size()); ++node) {
    if (!is_nash(tree, outcomes, sigma, interp, node)) return false;
  }
  return true;
}

SupportTable supportable_outcomes(const GameTree& tree, const EPredicate& goal,
                                  const Interpretation& interp) {
  SupportTable table;
  table.capped = tree.any_capped;
  table.supp.resize(tree.nodes.size());
  // Children always carry larger indices, so one reverse sweep suffices.
  for (int id = static_cast<int>(tree.nodes.size()) - 1; id >= 0; --id) {
    const TreeNode& n = tree.nodes[id];
    std::set<Value>& out = table.supp[id];
    switch (n.leaf) {
      case TreeNode::Leaf::Terminal:
        out = goal.fiber(n.cfg.state, interp);
        continue;
      case TreeNode::Leaf::InfiniteProven:
      case TreeNode::Leaf::InfiniteCapped:
        out.insert(Value::bottom());
        for (const auto& o : interp.outcome_values()) out.insert(o);
        continue;
      case TreeNode::Leaf::No:
        break;
    }
    if (n.silent_child >= 0) {
      out = table.supp[n.silent_child];
      continue;
    }
    for (const auto& [designated, child] : n.action_children) {
      for (const auto& o : table.supp[child]) {
        if (out.count(o)) continue;
        bool deterred = true;
        for (std::size_t i = 0; i < n.agents.size() && deterred; ++i) {
          int agent = n.agents[i];
          const auto& menu = interp.sort_of(n.choice_vars[i])->values();
          for (const auto& b : menu) {
            if (b == designated.at(agent)) continue;
            JointAction dev = designated;
            dev[agent] = b;
            const auto& dev_supp = table.supp[child_by_action(n, dev)];
            bool punished = std::any_of(
                dev_supp.begin(), dev_supp.end(),
                [&](const Value& alt) { return interp.prefers(agent, o, alt); });
            if (!punished) {
              deterred = false;
              break;
            }
          }
        }
        if (deterred) out.insert(o);
      }
    }
  }
  return table;
}

namespace {

struct WitnessBuilder {
  const GameTree& tree;
  const SupportTable& table;
  const Interpretation& interp;
  SpeWitness witness;

  // Arbitrary play for subtrees no unilateral deviation can reach and no
  // supportable outcome exists for.
  void fill_arbitrary(int node) {
    const TreeNode& n = tree.nodes[node];
    if (n.leaf == TreeNode::Leaf::Terminal) {
      const auto& fib = table.supp[node];
      witness.outcomes.at_leaf[node] =
          fib.empty() ? Value::bottom() : *fib.begin();
      return;
    }
    if (n.leaf != TreeNode::Leaf::No) {
      witness.outcomes.at_leaf[node] = Value::bottom();
      return;
    }
    if (n.silent_child >= 0) {
      fill_arbitrary(n.silent_child);
      return;
    }
    witness.fully_subgame_perfect = false;
    for (std::size_t i = 0; i < n.agents.size(); ++i) {
      witness.sigma.moves[n.agents[i]][node] =
          n.action_children.front().first.at(n.agents[i]);
    }
    for (const auto& [a, child] : n.action_children) fill_arbitrary(child);
  }

  void descend(int node, const Value& target) {
    const TreeNode& n = tree.nodes[node];
    if (n.leaf != TreeNode::Leaf::No) {
      witness.outcomes.at_leaf[node] = target;
      return;
    }
    if (n.silent_child >= 0) {
      descend(n.silent_child, target);
      return;
    }
    // The least designated action that supports the target and deters every
    // unilateral deviation, mirroring the membership recurrence.
    for (const auto& [designated, child] : n.action_children) {
      if (!table.supp[child].count(target)) continue;
      // punishments[i] = per deviating action, the least acceptable threat.
      std::vector<std::pair<int, Value>> punished_children;
      bool deterred = true;
      for (std::size_t i = 0; i < n.agents.size() && deterred; ++i) {
        int agent = n.agents[i];
        const auto& menu = interp.sort_of(n.choice_vars[i])->values();
        for (const auto& b : menu) {
          if (b == designated.at(agent)) continue;
          JointAction dev = designated;
          dev[agent] = b;
          int dev_child = child_by_action(n, dev);
          const Value* threat = nullptr;
          for (const auto& alt : table.supp[dev_child]) {
            if (interp.prefers(agent, target, alt)) {
              threat = &alt;
              break;
            }
          }
          if (!threat) {
            deterred = false;
            break;
          }
          punished_children.emplace_back(dev_child, *threat);
        }
      }
      if (!deterred) continue;

      for (std::size_t i = 0; i < n.agents.size(); ++i) {
        witness.sigma.moves[n.agents[i]][node] = designated.at(n.agents[i]);
      }
      descend(child, target);
      std::set<int> handled{child};
      for (const auto& [dev_child, threat] : punished_children) {
        if (handled.insert(dev_child).second) descend(dev_child, threat);
      }
      for (const auto& [a, other] : n.action_children) {
        if (handled.count(other)) continue;
        if (!table.supp[other].empty()) {
          descend(other, *table.supp[other].begin());
        } else {
          fill_arbitrary(other);
        }
      }
      return;
    }
    throw EvalError("internal: target not supportable at node " +
                    std::to_string(node));
  }
};

}  // namespace

std::optional<SpeWitness> find_spe_with_outcome(const GameTree& tree,
                                                const EPredicate& goal,
                                                const Value& target,
                                                const Interpretation& interp) {
  SupportTable table = supportable_outcomes(tree, goal, interp);
  if (!table.supp[0].count(target)) return std::nullopt;
  WitnessBuilder b{tree, table, interp, {}};
  b.descend(0, target);
  return std::move(b.witness);
}

std::pair<std::set<Value>, bool> state_support(const MechPtr& m, const State& s,
                                               const EPredicate& goal,
                                               const Interpretation& interp,
                                               int depth_cap) {
  GameTree tree = build_game_tree(m, initial_state(m, s, interp), interp, depth_cap);
  SupportTable table = supportable_outcomes(tree, goal, interp);
  return {std::move(table.supp[0]), table.capped};
}

WpreResult wpre(const MechPtr& m, const EPredicate& goal, int depth_cap) {
  std::set<std::string> vars = goal.variables();
  collect_vars(m, vars);
  auto capped = std::make_shared<std::atomic<bool>>(false);
  EPredicate pred = EPredicate::lazy(
      vars, [m, goal, depth_cap, capped](const State& s,
                                         const Interpretation& interp) {
        auto [supp, was_capped] = state_support(m, s, goal, interp, depth_cap);
        if (was_capped) capped->store(true);
        return supp;
      });
  return {std::move(pred), std::move(capped)};
}

}  // namespace mpl
