#include <cstring>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "mpl/ast.hpp"
#include "mpl/config.hpp"
#include "mpl/corpus.hpp"
#include "mpl/derivation_io.hpp"
#include "mpl/dot.hpp"
#include "mpl/epredicate.hpp"
#include "mpl/equilibrium.hpp"
#include "mpl/errors.hpp"
#include "mpl/hoare.hpp"
#include "mpl/parser.hpp"
#include "mpl/semantics.hpp"

namespace {

using nlohmann::ordered_json;

constexpr int kExitValid = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitInexact = 2;
constexpr int kExitInputError = 3;

bool looks_like_path(const std::string& arg) {
  if (arg.find('/') != std::string::npos) return true;
  for (const char* ext : {".mpl", ".pred", ".json", ".dot"}) {
    std::size_t n = std::strlen(ext);
    if (arg.size() > n && arg.compare(arg.size() - n, n, ext) == 0) return true;
  }
  return false;
}

// Option values name a file when one exists; anything that merely looks
// like a path is reported as unreadable instead of being parsed as source.
std::string load_source(const std::string& arg) {
  std::ifstream in(arg, std::ios::binary);
  if (in) {
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  }
  if (looks_like_path(arg)) throw mpl::ConfigError("cannot read file: " + arg);
  return arg;
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    if (text.empty() || text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw mpl::ConfigError("cannot write file: " + path);
  out << text;
}

ordered_json value_json(const mpl::Value& v) {
  switch (v.kind()) {
    case mpl::Value::Kind::Bottom: return "bottom";
    case mpl::Value::Kind::Bool: return v.as_bool();
    case mpl::Value::Kind::Int: return v.as_int();
    case mpl::Value::Kind::Tuple: {
      ordered_json arr = ordered_json::array();
      for (const auto& part : v.parts()) arr.push_back(value_json(part));
      return arr;
    }
  }
  return nullptr;
}

ordered_json state_json(const mpl::State& s) {
  ordered_json obj = ordered_json::object();
  for (const auto& [name, v] : s) obj[name] = value_json(v);
  return obj;
}

ordered_json instance_json(const std::pair<mpl::State, mpl::Value>& inst) {
  return ordered_json{{"state", state_json(inst.first)},
                      {"outcome", value_json(inst.second)}};
}

std::string instance_str(const std::pair<mpl::State, mpl::Value>& inst) {
  return mpl::state_str(inst.first) + " with outcome " + inst.second.str();
}

struct CommonInputs {
  std::string mech, pre, post, interp;
  int cap = mpl::default_depth_cap();
  bool strict = false;
  std::string format = "text";
};

void add_cap(CLI::App* cmd, CommonInputs& in) {
  cmd->add_option("--cap", in.cap, "Depth cap on plays (configurations per branch)")
      ->check(CLI::Range(2, 1 << 30));
}

void add_format(CLI::App* cmd, CommonInputs& in) {
  cmd->add_option("--format", in.format, "Report format")
      ->check(CLI::IsMember({"text", "json"}));
}

// ---------------------------------------------------------------------------

int cmd_verify(const CommonInputs& in) {
  auto interp = mpl::interpretation_from_json(load_source(in.interp));
  auto mech = mpl::parse_mechanism(load_source(in.mech));
  auto pre = mpl::EPredicate::from_formula_text(load_source(in.pre));
  auto post = mpl::EPredicate::from_formula_text(load_source(in.post));

  mpl::ValidityOptions opts;
  opts.depth_cap = in.cap;
  opts.strict = in.strict;
  opts.want_witness = true;
  auto report = mpl::check_validity(pre, mech, post, interp, opts);

  if (in.format == "json") {
    ordered_json doc;
    doc["verdict"] = mpl::to_string(report.verdict);
    doc["capped"] = report.capped;
    doc["states_checked"] = report.states_checked;
    doc["counterexample"] = report.counterexample
                                ? instance_json(*report.counterexample)
                                : ordered_json(nullptr);
    if (report.witness_instance && report.witness) {
      ordered_json w;
      w["instance"] = instance_json(*report.witness_instance);
      ordered_json moves = ordered_json::array();
      for (const auto& [agent, per_node] : report.witness->sigma.moves)
        for (const auto& [node, action] : per_node)
          moves.push_back({{"agent", agent},
                           {"node", node},
                           {"action", value_json(action)}});
      w["strategy"] = std::move(moves);
      ordered_json leaves = ordered_json::array();
      for (const auto& [leaf, o] : report.witness->outcomes.at_leaf)
        leaves.push_back({{"leaf", leaf}, {"outcome", value_json(o)}});
      w["outcome_function"] = std::move(leaves);
      w["fully_subgame_perfect"] = report.witness->fully_subgame_perfect;
      doc["witness"] = std::move(w);
    } else {
      doc["witness"] = nullptr;
    }
    std::cout << doc.dump(2) << "\n";
  } else {
    std::cout << "verdict: " << mpl::to_string(report.verdict) << "\n";
    std::cout << "states checked: " << report.states_checked << "\n";
    std::cout << "capped: " << (report.capped ? "yes" : "no") << "\n";
    if (report.counterexample)
      std::cout << "counterexample: " << instance_str(*report.counterexample)
                << "\n";
    if (report.witness_instance && report.witness) {
      std::cout << "witness instance: " << instance_str(*report.witness_instance)
                << "\n";
      for (const auto& [agent, per_node] : report.witness->sigma.moves)
        for (const auto& [node, action] : per_node)
          std::cout << "  agent " << agent << " at node " << node << ": "
                    << action.str() << "\n";
      for (const auto& [leaf, o] : report.witness->outcomes.at_leaf)
        std::cout << "  leaf " << leaf << " -> " << o.str() << "\n";
      std::cout << "  fully subgame perfect: "
                << (report.witness->fully_subgame_perfect ? "yes" : "no") << "\n";
    }
  }

  switch (report.verdict) {
    case mpl::Verdict::Valid: return kExitValid;
    case mpl::Verdict::Invalid: return kExitInvalid;
    case mpl::Verdict::Inexact: return kExitInexact;
  }
  return kExitInputError;
}

int cmd_tree(const CommonInputs& in, const std::string& init,
             const std::string& out_path) {
  auto interp = mpl::interpretation_from_json(load_source(in.interp));
  auto mech = mpl::parse_mechanism(load_source(in.mech));
  auto partial = mpl::parse_bindings(init, interp);
  auto s0 = mpl::initial_state(mech, partial, interp);
  auto tree = mpl::build_game_tree(mech, s0, interp, in.cap);
  write_output(out_path, mpl::to_dot(tree));
  return kExitValid;
}

int cmd_wpre(const CommonInputs& in) {
  auto interp = mpl::interpretation_from_json(load_source(in.interp));
  auto mech = mpl::parse_mechanism(load_source(in.mech));
  auto post = mpl::EPredicate::from_formula_text(load_source(in.post));

  auto result = mpl::wpre(mech, post, in.cap);
  mpl::Footprint fp(interp, result.pred.variables());
  auto fibers = mpl::extension(result.pred, interp, fp);
  bool capped = result.capped->load();
  if (in.strict && capped)
    throw mpl::InexactError("weakest precondition hit the depth cap");

  if (in.format == "json") {
    ordered_json doc;
    ordered_json vars = ordered_json::array();
    for (const auto& [name, sort] : fp.vars()) vars.push_back(name);
    doc["variables"] = std::move(vars);
    doc["capped"] = capped;
    ordered_json rows = ordered_json::array();
    for (const auto& [s, outs] : fibers) {
      ordered_json outcomes = ordered_json::array();
      for (const auto& o : outs) outcomes.push_back(value_json(o));
      rows.push_back({{"state", state_json(s)}, {"outcomes", std::move(outcomes)}});
    }
    doc["fibers"] = std::move(rows);
    std::cout << doc.dump(2) << "\n";
  } else {
    for (const auto& [s, outs] : fibers) {
      std::cout << mpl::state_str(s) << ":";
      for (const auto& o : outs) std::cout << " " << o.str();
      std::cout << "\n";
    }
    std::cout << "capped: " << (capped ? "yes" : "no") << "\n";
  }
  return kExitValid;
}

int cmd_derive(const CommonInputs& in, const std::string& out_path) {
  auto interp = mpl::interpretation_from_json(load_source(in.interp));
  auto mech = mpl::parse_mechanism(load_source(in.mech));
  auto pre = mpl::EPredicate::from_formula_text(load_source(in.pre));
  auto post = mpl::EPredicate::from_formula_text(load_source(in.post));

  mpl::Derivation d;
  try {
    d = mpl::derive(pre, mech, post, interp, in.cap);
  } catch (const mpl::InexactError&) {
    throw;
  } catch (const mpl::ParseError&) {
    throw;
  } catch (const mpl::ConfigError&) {
    throw;
  } catch (const mpl::EvalError&) {
    throw;
  } catch (const mpl::Error& e) {
    std::cerr << "mpl derive: " << e.what() << "\n";
    return kExitInvalid;
  }
  write_output(out_path, mpl::derivation_to_json(d, interp));
  return kExitValid;
}

int cmd_check_derivation(const CommonInputs& in, const std::string& deriv_arg) {
  auto interp = mpl::interpretation_from_json(load_source(in.interp));
  auto d = mpl::derivation_from_json(load_source(deriv_arg));
  auto result = mpl::check_derivation(d, interp, in.cap);

  if (in.format == "json") {
    ordered_json doc;
    doc["ok"] = result.ok;
    ordered_json nodes = ordered_json::array();
    for (const auto& r : result.reports) {
      ordered_json n;
      n["path"] = r.path;
      n["rule"] = mpl::to_string(r.rule);
      n["ok"] = r.ok;
      n["message"] = r.message;
      n["witness"] = r.witness ? instance_json(*r.witness) : ordered_json(nullptr);
      nodes.push_back(std::move(n));
    }
    doc["nodes"] = std::move(nodes);
    std::cout << doc.dump(2) << "\n";
  } else {
    for (const auto& r : result.reports) {
      std::cout << (r.ok ? "ok   " : "FAIL ") << r.path << " ["
                << mpl::to_string(r.rule) << "]";
      if (!r.message.empty()) std::cout << ": " << r.message;
      if (r.witness) std::cout << " (" << instance_str(*r.witness) << ")";
      std::cout << "\n";
    }
    std::cout << (result.ok ? "derivation accepted" : "derivation rejected")
              << "\n";
  }
  return result.ok ? kExitValid : kExitInvalid;
}

int cmd_simulate(const CommonInputs& in, const std::string& init,
                 const std::string& script) {
  auto interp = mpl::interpretation_from_json(load_source(in.interp));
  auto mech = mpl::parse_mechanism(load_source(in.mech));
  auto partial = mpl::parse_bindings(init, interp);
  auto s0 = mpl::initial_state(mech, partial, interp);
  auto final_state = mpl::run_scripted_play(mech, s0, script, interp);
  if (in.format == "json")
    std::cout << ordered_json{{"final", state_json(final_state)}}.dump(2) << "\n";
  else
    std::cout << mpl::state_str(final_state) << "\n";
  return kExitValid;
}

int cmd_classify(const CommonInputs& in) {
  auto mech = mpl::parse_mechanism(load_source(in.mech));
  std::cout << mpl::to_string(mpl::classify(mech)) << "\n";
  return kExitValid;
}

int cmd_corpus(bool serial, const std::string& format) {
  auto reports = mpl::run_corpus(!serial);
  bool all_pass = true;
  std::size_t passed = 0;
  for (const auto& r : reports) {
    all_pass = all_pass && r.pass;
    passed += r.pass ? 1 : 0;
  }

  if (format == "json") {
    ordered_json doc;
    ordered_json rows = ordered_json::array();
    for (const auto& r : reports)
      rows.push_back({{"name", r.name},
                      {"pass", r.pass},
                      {"detail", r.detail},
                      {"seconds", r.seconds}});
    doc["entries"] = std::move(rows);
    doc["passed"] = passed;
    doc["total"] = reports.size();
    std::cout << doc.dump(2) << "\n";
  } else {
    std::size_t width = 4;
    for (const auto& r : reports) width = std::max(width, r.name.size());
    for (const auto& r : reports) {
      std::cout << std::left << std::setw(static_cast<int>(width) + 2) << r.name
                << (r.pass ? "PASS" : "FAIL") << std::right << std::fixed
                << std::setprecision(2) << std::setw(8) << r.seconds << "s  "
                << r.detail << "\n";
    }
    std::cout << passed << "/" << reports.size() << " passed\n";
  }
  return all_pass ? kExitValid : kExitInvalid;
}

int cmd_implement(const CommonInputs& in, const std::string& spec_arg) {
  auto interp = mpl::interpretation_from_json(load_source(in.interp));
  auto mech = mpl::parse_mechanism(load_source(in.mech));
  auto post = mpl::EPredicate::from_formula_text(load_source(in.post));
  auto spec = mpl::social_choice_from_json(load_source(spec_arg));

  auto report = mpl::check_spe_implementation(mech, post, interp, spec, in.cap);

  if (in.format == "json") {
    ordered_json doc;
    doc["implements"] = report.implements;
    doc["exact"] = report.exact;
    doc["functional_warning"] = report.functional_warning;
    ordered_json rows = ordered_json::array();
    for (const auto& p : report.profiles)
      rows.push_back({{"name", p.name},
                      {"verdict", mpl::to_string(p.verdict)},
                      {"counterexample", p.counterexample
                                             ? instance_json(*p.counterexample)
                                             : ordered_json(nullptr)}});
    doc["profiles"] = std::move(rows);
    std::cout << doc.dump(2) << "\n";
  } else {
    for (const auto& p : report.profiles) {
      std::cout << "profile " << p.name << ": " << mpl::to_string(p.verdict);
      if (p.counterexample)
        std::cout << " (counterexample: " << instance_str(*p.counterexample)
                  << ")";
      std::cout << "\n";
    }
    std::cout << "implements: " << (report.implements ? "yes" : "no") << "\n";
    if (!report.exact) std::cout << "note: some profile hit the depth cap\n";
    if (report.functional_warning)
      std::cout << "note: the payoff postcondition is not functional\n";
  }

  bool any_invalid = false, any_inexact = false;
  for (const auto& p : report.profiles) {
    any_invalid = any_invalid || p.verdict == mpl::Verdict::Invalid;
    any_inexact = any_inexact || p.verdict == mpl::Verdict::Inexact;
  }
  if (any_invalid) return kExitInvalid;
  if (any_inexact) return kExitInexact;
  return kExitValid;
}

int cmd_embed(const CommonInputs& in) {
  auto interp = mpl::interpretation_from_json(load_source(in.interp));
  auto mech = mpl::parse_mechanism(load_source(in.mech));
  auto pre = mpl::parse_formula(load_source(in.pre));
  auto post = mpl::parse_formula(load_source(in.post));
  auto result = mpl::check_partial_correctness_embedding(pre, mech, post,
                                                         interp, in.cap);
  std::cout << "holds: " << (result.holds ? "yes" : "no") << "\n";
  std::cout << "exact: " << (result.exact ? "yes" : "no") << "\n";
  if (!result.exact) return kExitInexact;
  return result.holds ? kExitValid : kExitInvalid;
}

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const mpl::InexactError& e) {
    std::cerr << "mpl: inexact: " << e.what() << "\n";
    return kExitInexact;
  } catch (const std::exception& e) {
    std::cerr << "mpl: " << e.what() << "\n";
    return kExitInputError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mechanism verifier: equilibrium semantics for choice programs"};
  app.require_subcommand(1);

  CommonInputs in;
  std::string init_arg, script_arg, out_arg, deriv_arg, spec_arg;
  bool serial = false;

  auto* verify = app.add_subcommand(
      "verify", "Decide a triple {pre} mechanism {post} and report a witness");
  verify->add_option("--mech", in.mech, "Mechanism file or source")->required();
  verify->add_option("--pre", in.pre, "Precondition file or source")->required();
  verify->add_option("--post", in.post, "Postcondition file or source")->required();
  verify->add_option("--interp", in.interp, "Interpretation JSON file or source")
      ->required();
  verify->add_flag("--strict", in.strict, "Refuse capped (inexact) answers");
  add_cap(verify, in);
  add_format(verify, in);

  auto* tree = app.add_subcommand("tree", "Render the game tree as DOT");
  tree->add_option("--mech", in.mech, "Mechanism file or source")->required();
  tree->add_option("--interp", in.interp, "Interpretation JSON file or source")
      ->required();
  tree->add_option("--init", init_arg, "Initial bindings, e.g. \"x = 1, y = 2\"");
  tree->add_option("--out", out_arg, "Output file (default stdout)");
  add_cap(tree, in);

  auto* wpre = app.add_subcommand(
      "wpre", "Weakest precondition of a postcondition, as explicit fibers");
  wpre->add_option("--mech", in.mech, "Mechanism file or source")->required();
  wpre->add_option("--post", in.post, "Postcondition file or source")->required();
  wpre->add_option("--interp", in.interp, "Interpretation JSON file or source")
      ->required();
  wpre->add_flag("--strict", in.strict, "Refuse capped (inexact) answers");
  add_cap(wpre, in);
  add_format(wpre, in);

  auto* derive = app.add_subcommand(
      "derive", "Build a derivation for a valid triple and emit it as JSON");
  derive->add_option("--mech", in.mech, "Mechanism file or source")->required();
  derive->add_option("--pre", in.pre, "Precondition file or source")->required();
  derive->add_option("--post", in.post, "Postcondition file or source")->required();
  derive->add_option("--interp", in.interp, "Interpretation JSON file or source")
      ->required();
  derive->add_option("--out", out_arg, "Output file (default stdout)");
  add_cap(derive, in);

  auto* checkd = app.add_subcommand("check-derivation",
                                    "Re-check a serialized derivation");
  checkd->add_option("--derivation", deriv_arg, "Derivation JSON file or source")
      ->required();
  checkd->add_option("--interp", in.interp, "Interpretation JSON file or source")
      ->required();
  add_cap(checkd, in);
  add_format(checkd, in);

  auto* simulate = app.add_subcommand(
      "simulate", "Run one scripted play and print the final state");
  simulate->add_option("--mech", in.mech, "Mechanism file or source")->required();
  simulate->add_option("--interp", in.interp, "Interpretation JSON file or source")
      ->required();
  simulate->add_option("--init", init_arg,
                       "Initial bindings, e.g. \"x = 1, y = 2\"");
  simulate->add_option("--script", script_arg,
                       "One ';'-separated binding group per choice point");
  add_format(simulate, in);

  auto* classify = app.add_subcommand(
      "classify", "Print the mechanism class (PRG, PI or GENERAL)");
  classify->add_option("--mech", in.mech, "Mechanism file or source")->required();

  auto* corpus = app.add_subcommand("corpus", "Run the built-in example corpus");
  corpus->add_flag("--serial", serial, "Run entries one at a time");
  add_format(corpus, in);

  auto* implement = app.add_subcommand(
      "implement",
      "Check SPE implementation of a social choice rule, profile by profile");
  implement->add_option("--mech", in.mech, "Mechanism file or source")->required();
  implement->add_option("--post", in.post, "Payoff postcondition file or source")
      ->required();
  implement->add_option("--interp", in.interp,
                        "Base interpretation JSON file or source")
      ->required();
  implement->add_option("--spec", spec_arg,
                        "Social choice spec JSON file or source")
      ->required();
  add_cap(implement, in);
  add_format(implement, in);

  auto* embed = app.add_subcommand(
      "embed", "Classical partial correctness of a choice-free mechanism");
  embed->add_option("--mech", in.mech, "Mechanism file or source")->required();
  embed->add_option("--pre", in.pre, "Precondition formula file or source")
      ->required();
  embed->add_option("--post", in.post, "Postcondition formula file or source")
      ->required();
  embed->add_option("--interp", in.interp, "Interpretation JSON file or source")
      ->required();
  add_cap(embed, in);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInputError;
  }

  if (verify->parsed()) return guarded([&] { return cmd_verify(in); });
  if (tree->parsed())
    return guarded([&] { return cmd_tree(in, init_arg, out_arg); });
  if (wpre->parsed()) return guarded([&] { return cmd_wpre(in); });
  if (derive->parsed()) return guarded([&] { return cmd_derive(in, out_arg); });
  if (checkd->parsed())
    return guarded([&] { return cmd_check_derivation(in, deriv_arg); });
  if (simulate->parsed())
    return guarded([&] { return cmd_simulate(in, init_arg, script_arg); });
  if (classify->parsed()) return guarded([&] { return cmd_classify(in); });
  if (corpus->parsed()) return guarded([&] { return cmd_corpus(serial, in.format); });
  if (implement->parsed())
    return guarded([&] { return cmd_implement(in, spec_arg); });
  if (embed->parsed()) return guarded([&] { return cmd_embed(in); });
  return kExitInputError;
}
