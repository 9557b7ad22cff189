#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <vector>

#include "mpl/epredicate.hpp"
#include "mpl/semantics.hpp"

namespace mpl {

// A pure strategy profile: for every agent, a move at every choice node
// where it participates (keyed by node index).
struct StrategyProfile {
  std::map<int, std::map<int, Value>> moves;  // agent -> node -> action

  const Value& move(int agent, int node) const;
};

// An outcome assignment for every leaf of a tree. Infinite leaves default to
// bottom unless assigned otherwise.
struct OutcomeFunction {
  std::map<int, Value> at_leaf;  // leaf node index -> outcome

  const Value& at(int leaf) const;
};

// The leaf reached from `node` when everyone follows the profile.
int play_from(const GameTree& tree, const StrategyProfile& sigma, int node);

// Outcomes of every play where `agent` plays an arbitrary strategy in the
// subtree rooted at `node` while the others follow the profile. Includes the
// on-path outcome (the deviation may coincide with the profile).
std::set<Value> deviation_outcomes(const GameTree& tree,
                                   const OutcomeFunction& outcomes,
                                   const StrategyProfile& sigma, int agent,
                                   const Interpretation& interp, int node = 0);

// No agent can reach an outcome it strictly prefers — equivalently, the
// on-path outcome is weakly preferred to every deviation outcome
// (incomparable counts as a violation).
bool is_nash(const GameTree& tree, const OutcomeFunction& outcomes,
             const StrategyProfile& sigma, const Interpretation& interp,
             int node = 0);

// Nash at every node of the tree.
bool is_spe(const GameTree& tree, const OutcomeFunction& outcomes,
            const StrategyProfile& sigma, const Interpretation& interp);

// Per-node supportable outcome sets with respect to a goal predicate:
//  - terminal leaf: the predicate's fiber at the leaf state;
//  - infinite leaf (proven or capped): every outcome plus bottom;
//  - silent node: the child's set;
//  - choice node: o is supportable iff some joint action supports o in its
//    child and every unilateral single-agent deviation leads to a child
//    supporting some outcome the deviator does not strictly prefer to o.
// Sets at capped trees over-approximate, so membership failures stay
// definitive while successes become inexact.
struct SupportTable {
  std::vector<std::set<Value>> supp;  // indexed by node
  bool capped = false;
};

SupportTable supportable_outcomes(const GameTree& tree, const EPredicate& goal,
                                  const Interpretation& interp);

// A strategy profile and outcome function witnessing that `target` is
// supportable at the root. `fully_subgame_perfect` is false when some
// unreachable branch (multi-agent deviation into an empty-support subtree)
// had to be filled with arbitrary play.
struct SpeWitness {
  StrategyProfile sigma;
  OutcomeFunction outcomes;
  bool fully_subgame_perfect = true;
};

std::optional<SpeWitness> find_spe_with_outcome(const GameTree& tree,
                                                const EPredicate& goal,
                                                const Value& target,
                                                const Interpretation& interp);

// Root supportable set of the tree grown from (m, s), plus a capped flag.
std::pair<std::set<Value>, bool> state_support(const MechPtr& m, const State& s,
                                               const EPredicate& goal,
                                               const Interpretation& interp,
                                               int depth_cap = default_depth_cap());

// Weakest precondition as an e-predicate: the fiber at s is the root
// supportable set of the game from s, within the predicate universe.
// `capped` flips if any consulted state hit the depth cap.
struct WpreResult {
  EPredicate pred;
  std::shared_ptr<std::atomic<bool>> capped;
};

WpreResult wpre(const MechPtr& m, const EPredicate& goal,
                int depth_cap = default_depth_cap());

}  // namespace mpl
