#pragma once

#include <string>

#include "mpl/hoare.hpp"

namespace mpl {

// Serializes a derivation tree. Formula-backed predicates keep their source
// text; computed ones materialize into explicit state/outcome listings
// (which needs the interpretation); axiom preconditions left to the checker
// serialize as "auto".
std::string derivation_to_json(const Derivation& d, const Interpretation& interp);

Derivation derivation_from_json(const std::string& json_text);

// {"profiles": [{"name": ..., "preferences": {...}, "outcomes": [...]}, ...]}
SocialChoiceSpec social_choice_from_json(const std::string& json_text);

}  // namespace mpl
