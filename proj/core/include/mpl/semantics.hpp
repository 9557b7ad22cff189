#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "mpl/ast.hpp"
#include "mpl/interpretation.hpp"
#include "mpl/value.hpp"

namespace mpl {

// A configuration of the transition system: residual mechanism (null when
// terminated) and current state.
struct Configuration {
  MechPtr residual;
  State state;
};

// A joint action: chosen value per participating agent.
using JointAction = std::map<int, Value>;

// One small step from a non-terminated configuration. Silent steps carry the
// unique successor. Choice steps expose the menu (agents, their variables,
// per-variable action sorts) and build successors on demand.
struct StepResult {
  enum class Kind { Silent, Choice };
  Kind kind = Kind::Silent;
  Configuration next;  // Silent

  std::vector<int> agents;  // Choice, ascending
  std::vector<std::string> vars;
  std::function<Configuration(const JointAction&)> successor;
};

StepResult step(const Configuration& cfg, const Interpretation& interp);

// Default bound on configurations along any play; the MPL_DEPTH_CAP
// environment variable and per-call arguments override it.
inline constexpr int kDefaultDepthCap = 256;
int default_depth_cap();

// The (bounded) game tree of a mechanism from an initial state. Nodes are in
// BFS order with the root at index 0; children of a choice node are sorted
// by joint action.
struct TreeNode {
  enum class Leaf { No, Terminal, InfiniteProven, InfiniteCapped };

  Configuration cfg;
  int parent = -1;
  int depth = 1;  // configurations along the path, root included
  JointAction via;  // edge label from parent; empty on silent edges
  Leaf leaf = Leaf::No;

  std::vector<int> agents;  // choice nodes
  std::vector<std::string> choice_vars;
  std::vector<std::pair<JointAction, int>> action_children;
  int silent_child = -1;
};

struct GameTree {
  std::vector<TreeNode> nodes;
  std::vector<int> leaves;
  bool any_capped = false;    // some branch was cut at the depth cap
  bool any_infinite = false;  // some branch provably diverges
};

// Uncovered variables in `init` default to the least element of their sort.
// Branches whose silent chain revisits a (residual, state) configuration are
// closed as proven-infinite leaves; branches reaching `depth_cap`
// configurations without terminating are closed as capped leaves.
GameTree build_game_tree(const MechPtr& m, const State& init,
                         const Interpretation& interp,
                         int depth_cap = default_depth_cap());

// Completes a partial state over the mechanism's variables (least element of
// each sort for anything unbound), validating bound values against sorts.
State initial_state(const MechPtr& m, const State& partial,
                    const Interpretation& interp);

// Runs the single play picked out by a script: one ';'-separated binding
// group ("x = 1, y = (1, 2)") per choice point, binding every variable
// chosen there. Returns the terminal state; errors when the script and the
// play disagree in length or the play exceeds the step budget.
State run_scripted_play(const MechPtr& m, const State& init,
                        const std::string& script, const Interpretation& interp);

}  // namespace mpl
