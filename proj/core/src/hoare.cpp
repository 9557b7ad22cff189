#include "mpl/hoare.hpp"

#include <algorithm>
#include <future>
#include <thread>

namespace mpl {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Valid: return "valid";
    case Verdict::Invalid: return "invalid";
    case Verdict::Inexact: return "inexact";
  }
  return "?";
}

std::string to_string(Derivation::Rule r) {
  switch (r) {
    case Derivation::Rule::Assign: return "assign";
    case Derivation::Rule::Choice: return "choice";
    case Derivation::Rule::Comp: return "comp";
    case Derivation::Rule::If: return "if";
    case Derivation::Rule::While: return "while";
    case Derivation::Rule::Consequence: return "consequence";
  }
  return "?";
}

namespace {

std::set<std::string> triple_vars(const EPredicate& pre, const MechPtr& mech,
                                  const EPredicate& post) {
  std::set<std::string> vars = pre.variables();
  vars.insert(post.variables().begin(), post.variables().end());
  collect_vars(mech, vars);
  return vars;
}

}  // namespace

ValidityReport check_validity(const EPredicate& pre, const MechPtr& mech,
                              const EPredicate& post,
                              const Interpretation& interp,
                              const ValidityOptions& opts) {
  if (!mech) throw ConfigError("cannot check a triple of the empty mechanism");
  Footprint fp(interp, triple_vars(pre, mech, post));
  const std::size_t n = fp.state_count();

  // Every e-state is independent, so the scan is striped across threads and
  // the results reduced afterwards in canonical order (which keeps the
  // reported counterexample the least one).
  struct Cell {
    std::uint8_t status = 0;  // 0 = empty pre fiber, 1 = supported, 2 = violation
    std::optional<std::pair<State, Value>> bad;
    bool capped = false;
  };
  std::vector<Cell> cells(n);

  std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  auto scan = [&](std::size_t start) {
    for (std::size_t i = start; i < n; i += workers) {
      State s = fp.state_at(i);
      const auto& pf = pre.fiber(s, interp);
      if (pf.empty()) continue;
      Cell& c = cells[i];
      auto [supp, capped] =
          state_support(mech, s, post, interp, opts.depth_cap);
      c.capped = capped;
      c.status = 1;
      for (const auto& o : pf) {
        if (!supp.count(o)) {
          c.status = 2;
          c.bad = {std::move(s), o};
          break;
        }
      }
    }
  };
  if (workers <= 1) {
    scan(0);
  } else {
    std::vector<std::future<void>> parts;
    for (std::size_t w = 1; w < workers; ++w) {
      parts.push_back(std::async(std::launch::async, scan, w));
    }
    scan(0);
    for (auto& part : parts) part.get();
  }

  ValidityReport report;
  std::optional<std::pair<State, Value>> least_instance;
  for (std::size_t i = 0; i < n; ++i) {
    Cell& c = cells[i];
    if (c.status == 0) continue;
    ++report.states_checked;
    report.capped = report.capped || c.capped;
    if (!least_instance) {
      State s = fp.state_at(i);
      least_instance = {s, *pre.fiber(s, interp).begin()};
    }
    if (c.status == 2) {
      // Sound even when capped: capping only ever enlarges support sets.
      report.verdict = Verdict::Invalid;
      report.counterexample = std::move(c.bad);
      return report;
    }
  }

  if (report.capped) {
    if (opts.strict) {
      throw InexactError(
          "validity undetermined: the depth cap cut at least one branch");
    }
    report.verdict = Verdict::Inexact;
    return report;
  }
  report.verdict = Verdict::Valid;
  if (opts.want_witness && least_instance) {
    const auto& [s, o] = *least_instance;
    GameTree tree = build_game_tree(mech, initial_state(mech, s, interp),
                                    interp, opts.depth_cap);
    report.witness = find_spe_with_outcome(tree, post, o, interp);
    report.witness_instance = least_instance;
  }
  return report;
}

// ---------------------------------------------------------------------------
// derive

namespace {

struct DeriveCtx {
  const Interpretation& interp;
  const Footprint& fp;
  int depth_cap;
  std::vector<std::shared_ptr<std::atomic<bool>>> cap_flags;

  void ensure_subset(const EPredicate& p, const EPredicate& q,
                     const char* what) {
    if (auto v = subset_violation(p, q, interp, fp)) {
      throw Error(std::string("cannot derive: ") + what + " fails at state " +
                  state_str(v->first) + " with outcome " + v->second.str());
    }
  }
};

Derivation make_axiom(Derivation::Rule rule, const MechPtr& mech,
                      EPredicate pre, EPredicate post,
                      std::optional<std::string> post_text) {
  Derivation ax;
  ax.rule = rule;
  ax.mech = mech;
  ax.pre = std::move(pre);
  ax.post = std::move(post);
  ax.post_text = std::move(post_text);
  return ax;
}

Derivation wrap_consequence(EPredicate pre, EPredicate post,
                            std::optional<std::string> pre_text,
                            std::optional<std::string> post_text,
                            Derivation child) {
  Derivation node;
  node.rule = Derivation::Rule::Consequence;
  node.mech = child.mech;
  node.pre = std::move(pre);
  node.post = std::move(post);
  node.pre_text = std::move(pre_text);
  node.post_text = std::move(post_text);
  node.children.push_back(std::move(child));
  return node;
}

struct Annotated {
  EPredicate pred;
  std::optional<std::string> text;
};

Derivation derive_impl(DeriveCtx& ctx, const Annotated& pre, const MechPtr& mech,
                       const Annotated& post) {
  switch (mech->kind) {
    case Mechanism::Kind::Assign: {
      EPredicate axiom_pre = substitute(post.pred, mech->var, mech->term);
      ctx.ensure_subset(pre.pred, axiom_pre,
                        "the precondition is not contained in the assignment image");
      Derivation ax = make_axiom(Derivation::Rule::Assign, mech, axiom_pre,
                                 post.pred, post.text);
      return wrap_consequence(pre.pred, post.pred, pre.text, post.text,
                              std::move(ax));
    }
    case Mechanism::Kind::Choice: {
      WpreResult w = wpre(mech, post.pred, ctx.depth_cap);
      ctx.cap_flags.push_back(w.capped);
      ctx.ensure_subset(pre.pred, w.pred,
                        "the precondition is not supportable across the choice");
      Derivation ax = make_axiom(Derivation::Rule::Choice, mech, w.pred,
                                 post.pred, post.text);
      return wrap_consequence(pre.pred, post.pred, pre.text, post.text,
                              std::move(ax));
    }
    case Mechanism::Kind::Seq: {
      WpreResult mid = wpre(mech->second, post.pred, ctx.depth_cap);
      ctx.cap_flags.push_back(mid.capped);
      Annotated middle{mid.pred, std::nullopt};
      Derivation node;
      node.rule = Derivation::Rule::Comp;
      node.mech = mech;
      node.pre = pre.pred;
      node.post = post.pred;
      node.pre_text = pre.text;
      node.post_text = post.text;
      node.midpoint = mid.pred;
      node.children.push_back(derive_impl(ctx, pre, mech->first, middle));
      node.children.push_back(derive_impl(ctx, middle, mech->second, post));
      return node;
    }
    case Mechanism::Kind::Ite: {
      Annotated then_pre{mix_intersect(mech->cond, pre.pred), std::nullopt};
      Annotated else_pre{
          mix_intersect(Formula::negate(mech->cond), pre.pred), std::nullopt};
      Derivation node;
      node.rule = Derivation::Rule::If;
      node.mech = mech;
      node.pre = pre.pred;
      node.post = post.pred;
      node.pre_text = pre.text;
      node.post_text = post.text;
      node.children.push_back(derive_impl(ctx, then_pre, mech->first, post));
      node.children.push_back(derive_impl(ctx, else_pre, mech->second, post));
      return node;
    }
    case Mechanism::Kind::Loop: {
      WpreResult inv = wpre(mech, post.pred, ctx.depth_cap);
      ctx.cap_flags.push_back(inv.capped);
      ctx.ensure_subset(pre.pred, inv.pred,
                        "the precondition is not contained in the loop invariant");
      Annotated invariant{inv.pred, std::nullopt};
      Annotated body_pre{mix_intersect(mech->cond, inv.pred), std::nullopt};
      EPredicate loop_exit =
          mix_intersect(Formula::negate(mech->cond), inv.pred);
      ctx.ensure_subset(loop_exit, post.pred,
                        "the loop exit does not establish the postcondition");
      Derivation wnode;
      wnode.rule = Derivation::Rule::While;
      wnode.mech = mech;
      wnode.pre = inv.pred;
      wnode.post = loop_exit;
      wnode.invariant = inv.pred;
      wnode.children.push_back(derive_impl(ctx, body_pre, mech->first, invariant));
      return wrap_consequence(pre.pred, post.pred, pre.text, post.text,
                              std::move(wnode));
    }
  }
  throw Error("cannot derive: malformed mechanism");
}

}  // namespace

Derivation derive(const EPredicate& pre, const MechPtr& mech,
                  const EPredicate& post, const Interpretation& interp,
                  int depth_cap) {
  if (!mech) throw ConfigError("cannot derive for the empty mechanism");
  Footprint fp(interp, triple_vars(pre, mech, post));
  DeriveCtx ctx{interp, fp, depth_cap, {}};
  Derivation d = derive_impl(ctx, {pre, std::nullopt}, mech, {post, std::nullopt});
  for (const auto& flag : ctx.cap_flags) {
    if (flag->load()) {
      throw InexactError(
          "derivation undetermined: the depth cap cut at least one branch");
    }
  }
  return d;
}

// ---------------------------------------------------------------------------
// check_derivation

namespace {

void gather_footprint_vars(const Derivation& d, std::set<std::string>& vars) {
  collect_vars(d.mech, vars);
  auto add = [&](const EPredicate& p) {
    vars.insert(p.variables().begin(), p.variables().end());
  };
  add(d.pre);
  add(d.post);
  add(d.midpoint);
  add(d.invariant);
  for (const auto& c : d.children) gather_footprint_vars(c, vars);
}

struct CheckCtx {
  const Interpretation& interp;
  const Footprint& fp;
  int depth_cap;
  std::vector<NodeReport>* reports;
  bool ok = true;

  // Reports are addressed by index: recursion grows the vector, so
  // references into it would dangle.
  std::size_t report_for(const std::string& path, const Derivation& d) {
    reports->push_back({path, d.rule, true, "", std::nullopt});
    return reports->size() - 1;
  }

  void fail(std::size_t ri, const std::string& msg,
            std::optional<std::pair<State, Value>> witness = std::nullopt) {
    ok = false;
    NodeReport& r = (*reports)[ri];
    r.ok = false;
    if (!r.message.empty()) r.message += "; ";
    r.message += msg;
    if (witness && !r.witness) r.witness = std::move(witness);
  }

  void check_equal(std::size_t ri, const EPredicate& got,
                   const EPredicate& want, const std::string& what) {
    if (auto w = set_difference_witness(got, want, interp, fp)) {
      fail(ri, what + " differs at state " + state_str(w->first) +
               " on outcome " + w->second.str(),
           std::move(w));
    }
  }

  void check_subset(std::size_t ri, const EPredicate& p, const EPredicate& q,
                    const std::string& what) {
    if (auto w = subset_violation(p, q, interp, fp)) {
      fail(ri, what + " fails at state " + state_str(w->first) + " on outcome " +
               w->second.str(),
           std::move(w));
    }
  }
};

struct Effective {
  EPredicate pre, post;
};

Effective check_node(CheckCtx& ctx, const Derivation& d, const std::string& path) {
  std::size_t r = ctx.report_for(path, d);
  Effective eff{d.pre, d.post};
  if (!d.mech) {
    ctx.fail(r, "node has no mechanism");
    return eff;
  }
  if (d.pre_auto && d.rule != Derivation::Rule::Assign &&
      d.rule != Derivation::Rule::Choice) {
    ctx.fail(r, "only axiom preconditions may be left to the checker");
  }

  auto expect_children = [&](std::size_t n) {
    if (d.children.size() != n) {
      ctx.fail(r, "expected " + std::to_string(n) + " premises, found " +
                   std::to_string(d.children.size()));
      return false;
    }
    return true;
  };

  switch (d.rule) {
    case Derivation::Rule::Assign: {
      if (d.mech->kind != Mechanism::Kind::Assign) {
        ctx.fail(r, "rule requires an assignment mechanism");
        break;
      }
      expect_children(0);
      EPredicate expected = substitute(d.post, d.mech->var, d.mech->term);
      if (d.pre_auto) {
        eff.pre = expected;
      } else {
        ctx.check_equal(r, d.pre, expected, "axiom precondition");
      }
      break;
    }
    case Derivation::Rule::Choice: {
      if (d.mech->kind != Mechanism::Kind::Choice) {
        ctx.fail(r, "rule requires a choice mechanism");
        break;
      }
      expect_children(0);
      EPredicate expected = wpre(d.mech, d.post, ctx.depth_cap).pred;
      if (d.pre_auto) {
        eff.pre = expected;
      } else {
        ctx.check_equal(r, d.pre, expected, "axiom precondition");
      }
      break;
    }
    case Derivation::Rule::Comp: {
      if (d.mech->kind != Mechanism::Kind::Seq) {
        ctx.fail(r, "rule requires a sequential composition");
        break;
      }
      if (!expect_children(2)) break;
      if (!equal(d.children[0].mech, d.mech->first) ||
          !equal(d.children[1].mech, d.mech->second)) {
        ctx.fail(r, "premise mechanisms do not match the composition");
        break;
      }
      Effective left = check_node(ctx, d.children[0], path + ".0");
      Effective right = check_node(ctx, d.children[1], path + ".1");
      ctx.check_equal(r, left.pre, d.pre, "first premise precondition");
      ctx.check_equal(r, left.post, d.midpoint, "first premise postcondition");
      ctx.check_equal(r, right.pre, d.midpoint, "second premise precondition");
      ctx.check_equal(r, right.post, d.post, "second premise postcondition");
      break;
    }
    case Derivation::Rule::If: {
      if (d.mech->kind != Mechanism::Kind::Ite) {
        ctx.fail(r, "rule requires a branch mechanism");
        break;
      }
      if (!expect_children(2)) break;
      if (!equal(d.children[0].mech, d.mech->first) ||
          !equal(d.children[1].mech, d.mech->second)) {
        ctx.fail(r, "premise mechanisms do not match the branches");
        break;
      }
      Effective then_eff = check_node(ctx, d.children[0], path + ".0");
      Effective else_eff = check_node(ctx, d.children[1], path + ".1");
      ctx.check_equal(r, then_eff.pre, mix_intersect(d.mech->cond, d.pre),
                      "then-premise precondition");
      ctx.check_equal(r, else_eff.pre,
                      mix_intersect(Formula::negate(d.mech->cond), d.pre),
                      "else-premise precondition");
      ctx.check_equal(r, then_eff.post, d.post, "then-premise postcondition");
      ctx.check_equal(r, else_eff.post, d.post, "else-premise postcondition");
      break;
    }
    case Derivation::Rule::While: {
      if (d.mech->kind != Mechanism::Kind::Loop) {
        ctx.fail(r, "rule requires a loop mechanism");
        break;
      }
      if (!expect_children(1)) break;
      if (!equal(d.children[0].mech, d.mech->first)) {
        ctx.fail(r, "premise mechanism does not match the loop body");
        break;
      }
      Effective body = check_node(ctx, d.children[0], path + ".0");
      ctx.check_equal(r, d.pre, d.invariant, "loop precondition vs invariant");
      ctx.check_equal(r, d.post,
                      mix_intersect(Formula::negate(d.mech->cond), d.invariant),
                      "loop postcondition");
      ctx.check_equal(r, body.pre, mix_intersect(d.mech->cond, d.invariant),
                      "body precondition");
      ctx.check_equal(r, body.post, d.invariant, "body postcondition");
      break;
    }
    case Derivation::Rule::Consequence: {
      if (!expect_children(1)) break;
      if (!equal(d.children[0].mech, d.mech)) {
        ctx.fail(r, "premise mechanism does not match");
        break;
      }
      Effective inner = check_node(ctx, d.children[0], path + ".0");
      ctx.check_subset(r, d.pre, inner.pre, "precondition weakening");
      ctx.check_subset(r, inner.post, d.post, "postcondition strengthening");
      break;
    }
  }
  return eff;
}

}  // namespace

DerivationCheck check_derivation(const Derivation& d,
                                 const Interpretation& interp, int depth_cap) {
  std::set<std::string> vars;
  gather_footprint_vars(d, vars);
  Footprint fp(interp, vars);
  DerivationCheck out;
  CheckCtx ctx{interp, fp, depth_cap, &out.reports};
  check_node(ctx, d, "root");
  out.ok = ctx.ok;
  return out;
}

// ---------------------------------------------------------------------------
// implementation / embedding

ImplementationReport check_spe_implementation(const MechPtr& mech,
                                              const EPredicate& post,
                                              const Interpretation& base,
                                              const SocialChoiceSpec& spec,
                                              int depth_cap) {
  ImplementationReport out;
  out.functional_warning =
      !is_functional(post, base, Footprint(base, post.variables()));
  for (const auto& profile : spec.profiles) {
    Interpretation interp = base.with_preferences(profile.preferences);
    for (const auto& o : profile.outcomes) {
      if (!interp.outcome_sort()->contains(o)) {
        throw ConfigError("profile '" + profile.name + "' goal outcome " +
                          o.str() + " outside the outcome sort");
      }
    }
    std::set<Value> goal_set = profile.outcomes;
    EPredicate goal = EPredicate::lazy(
        {}, [goal_set](const State&, const Interpretation&) { return goal_set; });

    ValidityOptions opts;
    opts.depth_cap = depth_cap;
    ValidityReport report = check_validity(goal, mech, post, interp, opts);

    ProfileReport pr;
    pr.name = profile.name;
    pr.verdict = report.verdict;
    pr.counterexample = report.counterexample;
    if (report.verdict != Verdict::Valid) out.implements = false;
    if (report.verdict == Verdict::Inexact) out.exact = false;
    out.profiles.push_back(std::move(pr));
  }
  return out;
}

EmbeddingResult check_partial_correctness_embedding(const FormulaPtr& pre,
                                                    const MechPtr& mech,
                                                    const FormulaPtr& post,
                                                    const Interpretation& interp,
                                                    int depth_cap) {
  if (classify(mech) != MechClass::PRG) {
    throw ConfigError(
        "the partial-correctness embedding applies to choice-free mechanisms only");
  }
  ValidityOptions opts;
  opts.depth_cap = depth_cap;
  ValidityReport report = check_validity(lift_predicate(pre), mech,
                                         lift_predicate(post), interp, opts);
  switch (report.verdict) {
    case Verdict::Valid:
      return {true, true};
    case Verdict::Invalid:
      return {false, true};
    case Verdict::Inexact:
      return {false, false};
  }
  return {false, false};
}

}  // namespace mpl
