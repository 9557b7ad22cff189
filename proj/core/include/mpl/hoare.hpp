#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mpl/equilibrium.hpp"

namespace mpl {

enum class Verdict { Valid, Invalid, Inexact };

std::string to_string(Verdict v);

struct ValidityOptions {
  int depth_cap = default_depth_cap();
  // Refuse inexact answers: throw InexactError instead of returning Inexact.
  bool strict = false;
  // On a valid triple, also construct an equilibrium witness for the least
  // (state, outcome) instance of the precondition.
  bool want_witness = false;
};

struct ValidityReport {
  Verdict verdict = Verdict::Valid;
  // First (state, outcome) of the precondition not supportable, in canonical
  // order. Under a capped computation it is still a genuine counterexample,
  // though possibly not the least one.
  std::optional<std::pair<State, Value>> counterexample;
  bool capped = false;
  std::size_t states_checked = 0;
  std::optional<std::pair<State, Value>> witness_instance;
  std::optional<SpeWitness> witness;
};

// Decides {pre} mech {post}: every outcome the precondition admits at a
// state must be supportable by the game from that state.
ValidityReport check_validity(const EPredicate& pre, const MechPtr& mech,
                              const EPredicate& post,
                              const Interpretation& interp,
                              const ValidityOptions& opts = {});

// ---------------------------------------------------------------------------
// Derivations

struct Derivation {
  enum class Rule { Assign, Choice, Comp, If, While, Consequence };

  Rule rule = Rule::Assign;
  MechPtr mech;
  EPredicate pre, post;
  // Axiom nodes may leave the precondition to the checker; nothing else may.
  bool pre_auto = false;
  std::optional<std::string> pre_text, post_text;

  EPredicate midpoint;  // Comp
  std::optional<std::string> midpoint_text;
  EPredicate invariant;  // While
  std::optional<std::string> invariant_text;

  std::vector<Derivation> children;
};

std::string to_string(Derivation::Rule r);

struct NodeReport {
  std::string path;  // root, root.0, root.1.0, ...
  Derivation::Rule rule = Derivation::Rule::Assign;
  bool ok = true;
  std::string message;
  // Offending (state, outcome) for set-level failures.
  std::optional<std::pair<State, Value>> witness;
};

struct DerivationCheck {
  bool ok = true;
  std::vector<NodeReport> reports;  // one per node, preorder
};

// Re-derives every rule's side conditions extensionally: axiom preconditions
// match the computed substitution/one-step image, frame predicates agree
// across rule boundaries, and consequences are genuine inclusions.
DerivationCheck check_derivation(const Derivation& d,
                                 const Interpretation& interp,
                                 int depth_cap = default_depth_cap());

// Builds a checkable derivation for a valid triple; throws Error with the
// violating instance if the triple is invalid, InexactError if the decision
// hit the depth cap.
Derivation derive(const EPredicate& pre, const MechPtr& mech,
                  const EPredicate& post, const Interpretation& interp,
                  int depth_cap = default_depth_cap());

// ---------------------------------------------------------------------------
// Implementation and embedding checks

struct SocialChoiceProfile {
  std::string name;
  std::map<int, PreferenceSpec> preferences;
  std::set<Value> outcomes;  // goal outcomes for this profile
};

struct SocialChoiceSpec {
  std::vector<SocialChoiceProfile> profiles;
};

struct ProfileReport {
  std::string name;
  Verdict verdict = Verdict::Valid;
  std::optional<std::pair<State, Value>> counterexample;
};

struct ImplementationReport {
  bool implements = true;  // every profile decided Valid (vacuously on none)
  bool exact = true;
  bool functional_warning = false;  // the payoff postcondition is not functional
  std::vector<ProfileReport> profiles;
};

// For each preference profile, decides the triple whose precondition demands
// the profile's goal outcomes at every state and whose postcondition is the
// mechanism's payoff predicate. An empty spec implements vacuously.
ImplementationReport check_spe_implementation(const MechPtr& mech,
                                              const EPredicate& post,
                                              const Interpretation& base,
                                              const SocialChoiceSpec& spec,
                                              int depth_cap = default_depth_cap());

struct EmbeddingResult {
  bool holds = false;
  bool exact = true;  // false = undetermined (depth cap)
};

// Classical partial correctness of a choice-free mechanism, embedded via
// outcome-indifferent predicate lifts. Throws ConfigError when the
// mechanism contains choice statements.
EmbeddingResult check_partial_correctness_embedding(const FormulaPtr& pre,
                                                    const MechPtr& mech,
                                                    const FormulaPtr& post,
                                                    const Interpretation& interp,
                                                    int depth_cap = default_depth_cap());

}  // namespace mpl
