#include "mpl/semantics.hpp"

#include <algorithm>
#include <cassert>
#include <cstdlib>
#include <deque>
#include <set>

#include "mpl/parser.hpp"

namespace mpl {

int default_depth_cap() {
  if (const char* env = std::getenv("MPL_DEPTH_CAP")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end && *end == '\0' && v > 1) return static_cast<int>(v);
  }
  return kDefaultDepthCap;
}

StepResult step(const Configuration& cfg, const Interpretation& interp) {
  const MechPtr& m = cfg.residual;
  if (!m) throw EvalError("step from a terminated configuration");
  StepResult r;
  switch (m->kind) {
    case Mechanism::Kind::Assign: {
      Value v = eval_term(m->term, cfg.state, nullptr, interp);
      State next = cfg.state;
      next[m->var] = clamp_assign(interp, m->var, v);
      r.next = {nullptr, std::move(next)};
      return r;
    }
    case Mechanism::Kind::Ite: {
      bool b = eval_formula(m->cond, cfg.state, nullptr, interp);
      r.next = {b ? m->first : m->second, cfg.state};
      return r;
    }
    case Mechanism::Kind::Loop: {
      if (eval_formula(m->cond, cfg.state, nullptr, interp)) {
        r.next = {Mechanism::seq(m->first, m), cfg.state};
      } else {
        r.next = {nullptr, cfg.state};
      }
      return r;
    }
    case Mechanism::Kind::Seq: {
      StepResult inner = step({m->first, cfg.state}, interp);
      if (inner.kind == StepResult::Kind::Silent) {
        MechPtr rest = inner.next.residual
                           ? Mechanism::seq(inner.next.residual, m->second)
                           : m->second;
        r.next = {std::move(rest), std::move(inner.next.state)};
        return r;
      }
      r.kind = StepResult::Kind::Choice;
      r.agents = std::move(inner.agents);
      r.vars = std::move(inner.vars);
      MechPtr rest = m->second;
      r.successor = [inner_succ = std::move(inner.successor),
                     rest](const JointAction& a) {
        Configuration c = inner_succ(a);
        c.residual = c.residual ? Mechanism::seq(c.residual, rest) : rest;
        return c;
      };
      return r;
    }
    case Mechanism::Kind::Choice: {
      r.kind = StepResult::Kind::Choice;
      r.agents = m->agents;
      r.vars = m->choice_vars;
      State base = cfg.state;
      Mechanism const* mech = m.get();
      auto interp_ptr = &interp;
      r.successor = [mech, base, interp_ptr](const JointAction& a) {
        State next = base;
        for (std::size_t i = 0; i < mech->agents.size(); ++i) {
          auto it = a.find(mech->agents[i]);
          if (it == a.end()) {
            throw EvalError("joint action misses agent " +
                            std::to_string(mech->agents[i]));
          }
          next[mech->choice_vars[i]] =
              clamp_assign(*interp_ptr, mech->choice_vars[i], it->second);
        }
        return Configuration{nullptr, std::move(next)};
      };
      return r;
    }
  }
  throw EvalError("malformed mechanism");
}

State initial_state(const MechPtr& m, const State& partial,
                    const Interpretation& interp) {
  std::set<std::string> vars;
  collect_vars(m, vars);
  State s;
  for (const auto& v : vars) {
    if (interp.is_constant(v)) continue;  // read-only, never part of the state
    SortPtr sort = interp.sort_of(v);
    auto it = partial.find(v);
    if (it != partial.end()) {
      if (!sort->contains(it->second)) {
        throw EvalError("initial value " + it->second.str() + " for '" + v +
                        "' outside its sort " + sort->str());
      }
      s.emplace(v, it->second);
    } else {
      s.emplace(v, sort->values().front());
    }
  }
  for (const auto& [name, v] : partial) {
    if (!vars.count(name)) {
      SortPtr sort = interp.sort_of(name);  // still validate the binding
      if (!sort->contains(v)) {
        throw EvalError("initial value " + v.str() + " for '" + name +
                        "' outside its sort " + sort->str());
      }
      s.emplace(name, v);
    }
  }
  return s;
}

namespace {

// Enumerates joint actions in canonical order (agents ascending, each action
// list ascending, last agent varies fastest).
std::vector<JointAction> joint_actions(const std::vector<int>& agents,
                                       const std::vector<std::string>& vars,
                                       const Interpretation& interp) {
  std::vector<const std::vector<Value>*> menus;
  for (const auto& v : vars) menus.push_back(&interp.sort_of(v)->values());
  std::vector<std::size_t> idx(agents.size(), 0);
  std::vector<JointAction> out;
  for (;;) {
    JointAction a;
    for (std::size_t i = 0; i < agents.size(); ++i) {
      a.emplace(agents[i], (*menus[i])[idx[i]]);
    }
    out.push_back(std::move(a));
    std::size_t i = agents.size();
    for (;;) {
      if (i == 0) return out;
      --i;
      if (++idx[i] < menus[i]->size()) break;
      idx[i] = 0;
    }
  }
}

// Configurations seen along the current silent chain. Residuals are compared
// structurally: every silent step is deterministic, so revisiting a
// configuration proves divergence. The reachable residual set of a program
// is finite, so any infinite silent run revisits one.
using SilentSeen = std::vector<Configuration>;

bool seen_before(const SilentSeen& seen, const Configuration& cfg) {
  for (const auto& c : seen) {
    if (c.state == cfg.state && equal(c.residual, cfg.residual)) return true;
  }
  return false;
}

}  // namespace

GameTree build_game_tree(const MechPtr& m, const State& init,
                         const Interpretation& interp, int depth_cap) {
  if (depth_cap < 2) throw EvalError("depth cap must be at least 2");
  GameTree tree;
  struct Pending {
    int node;
    SilentSeen seen;  // silent chain up to and including this node
  };
  std::deque<Pending> queue;

  TreeNode root;
  root.cfg = {m, init};
  tree.nodes.push_back(std::move(root));
  queue.push_back({0, {Configuration{m, init}}});

  while (!queue.empty()) {
    Pending cur = std::move(queue.front());
    queue.pop_front();
    int id = cur.node;

    if (!tree.nodes[id].cfg.residual) {
      tree.nodes[id].leaf = TreeNode::Leaf::Terminal;
      tree.leaves.push_back(id);
      continue;
    }
    if (tree.nodes[id].depth >= depth_cap) {
      tree.nodes[id].leaf = TreeNode::Leaf::InfiniteCapped;
      tree.leaves.push_back(id);
      tree.any_capped = true;
      continue;
    }

    StepResult r = step(tree.nodes[id].cfg, interp);
    if (r.kind == StepResult::Kind::Silent) {
      if (r.next.residual && seen_before(cur.seen, r.next)) {
        tree.nodes[id].leaf = TreeNode::Leaf::InfiniteProven;
        tree.leaves.push_back(id);
        tree.any_infinite = true;
        continue;
      }
      TreeNode child;
      child.cfg = r.next;
      child.parent = id;
      child.depth = tree.nodes[id].depth + 1;
      int cid = static_cast<int>(tree.nodes.size());
      tree.nodes.push_back(std::move(child));
      tree.nodes[id].silent_child = cid;
      SilentSeen seen = std::move(cur.seen);
      if (r.next.residual) seen.push_back(r.next);
      queue.push_back({cid, std::move(seen)});
      continue;
    }

    tree.nodes[id].agents = r.agents;
    tree.nodes[id].choice_vars = r.vars;
    for (const auto& a : joint_actions(r.agents, r.vars, interp)) {
      Configuration c = r.successor(a);
      TreeNode child;
      child.cfg = std::move(c);
      child.parent = id;
      child.depth = tree.nodes[id].depth + 1;
      child.via = a;
      int cid = static_cast<int>(tree.nodes.size());
      tree.nodes.push_back(std::move(child));
      tree.nodes[id].action_children.emplace_back(a, cid);
      // The silent chain restarts after a choice edge.
      SilentSeen seen;
      const TreeNode& cn = tree.nodes[cid];
      if (cn.cfg.residual) seen.push_back(cn.cfg);
      queue.push_back({cid, std::move(seen)});
    }
  }
  return tree;
}

State run_scripted_play(const MechPtr& m, const State& init,
                        const std::string& script, const Interpretation& interp) {
  Configuration cfg{m, initial_state(m, init, interp)};
  std::vector<std::string> groups;
  for (std::size_t from = 0; from <= script.size();) {
    std::size_t semi = script.find(';', from);
    if (semi == std::string::npos) semi = script.size();
    groups.push_back(script.substr(from, semi - from));
    from = semi + 1;
  }
  if (groups.size() == 1 && groups[0].find_first_not_of(" \t\n") == std::string::npos) {
    groups.clear();  // an empty script has no choice steps
  }

  std::size_t consumed = 0;
  for (int budget = 100000; cfg.residual; --budget) {
    if (budget <= 0) throw EvalError("the play exceeded the step budget");
    StepResult sr = step(cfg, interp);
    if (sr.kind == StepResult::Kind::Silent) {
      cfg = std::move(sr.next);
      continue;
    }
    if (consumed >= groups.size()) {
      throw EvalError("the script ended before the play did");
    }
    State binds = parse_bindings(groups[consumed++], interp);
    JointAction action;
    for (const auto& [var, val] : binds) {
      auto it = std::find(sr.vars.begin(), sr.vars.end(), var);
      if (it == sr.vars.end()) {
        throw EvalError("the script binds '" + var +
                        "', which is not chosen at this point");
      }
      action[sr.agents[static_cast<std::size_t>(it - sr.vars.begin())]] = val;
    }
    cfg = sr.successor(action);
  }
  if (consumed != groups.size()) {
    throw EvalError("the script has unused choice steps");
  }
  return cfg.state;
}

}  // namespace mpl
