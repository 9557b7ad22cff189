#include "mpl/dot.hpp"

#include <sstream>

namespace mpl {
namespace {

std::string escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      default: out += c;
    }
  }
  return out;
}

std::string joint_str(const JointAction& a) {
  std::string out;
  for (const auto& [agent, v] : a) {
    if (!out.empty()) out += ", ";
    out += std::to_string(agent) + ":" + v.str();
  }
  return out;
}

}  // namespace

std::string to_dot(const GameTree& tree) {
  std::ostringstream os;
  os << "digraph game_tree {\n";
  os << "  node [shape=box, fontname=\"monospace\"];\n";
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    const TreeNode& n = tree.nodes[i];
    std::string label = "#" + std::to_string(i) + "\\n";
    label += n.cfg.residual ? escape(pretty(n.cfg.residual)) : "-";
    label += "\\n" + escape(state_str(n.cfg.state));
    os << "  n" << i << " [label=\"" << label << "\"";
    switch (n.leaf) {
      case TreeNode::Leaf::No:
        break;
      case TreeNode::Leaf::Terminal:
        os << ", penwidth=2";
        break;
      case TreeNode::Leaf::InfiniteProven:
        os << ", peripheries=2";
        break;
      case TreeNode::Leaf::InfiniteCapped:
        os << ", peripheries=2, style=dashed";
        break;
    }
    os << "];\n";
  }
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    const TreeNode& n = tree.nodes[i];
    if (n.silent_child >= 0) {
      os << "  n" << i << " -> n" << n.silent_child << ";\n";
    }
    for (const auto& [action, child] : n.action_children) {
      os << "  n" << i << " -> n" << child << " [label=\""
         << escape(joint_str(action)) << "\"];\n";
    }
  }
  os << "}\n";
  return os.str();
}

}  // namespace mpl
