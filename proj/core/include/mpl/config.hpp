#pragma once

#include <string>

#include "mpl/interpretation.hpp"

namespace mpl {

// Builds an interpretation from its JSON description. The accepted document
// shape is documented in the README; errors surface as ConfigError (or
// ParseError for embedded formula/term strings).
Interpretation interpretation_from_json(const std::string& json_text);
InterpretationSpec interpretation_spec_from_json(const std::string& json_text);

// Parses just a preference table ({"1": {...}, ...}), for social-choice
// profiles that override a base interpretation's preferences.
std::map<int, PreferenceSpec> preferences_from_json(const std::string& json_text);

}  // namespace mpl
