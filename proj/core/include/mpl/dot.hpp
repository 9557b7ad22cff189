#pragma once

#include <string>

#include "mpl/semantics.hpp"

namespace mpl {

// Graphviz rendering of a game tree. Node ids are the BFS indices, so the
// output lines up with the CLI tree listing and is stable across runs.
std::string to_dot(const GameTree& tree);

}  // namespace mpl
