#include "mpl/corpus.hpp"

#include <chrono>
#include <future>
#include <sstream>

#include "mpl/config.hpp"
#include "mpl/hoare.hpp"
#include "mpl/parser.hpp"
#include "mpl/semantics.hpp"

namespace mpl {
namespace {

// --- second-price sealed-bid auction ---------------------------------------

const char* kSecondPriceMech = "ch {1, 2} (x1, x2)";

const char* kSecondPriceInterp = R"({
  "agents": 2,
  "sorts": {
    "x1": {"int": [0, 4]}, "x2": {"int": [0, 4]},
    "v1": {"int": [0, 4]}, "v2": {"int": [0, 4]}
  },
  "outcome": {"tuple": [{"int": [-4, 4]}, {"int": [-4, 4]}]},
  "preferences": {
    "1": {"utility": "outcome[1]"},
    "2": {"utility": "outcome[2]"}
  }
})";

const char* kSecondPricePre =
    "(v1 >= v2 -> outcome = (v1 - v2, 0)) and "
    "(v1 < v2 -> outcome = (0, v2 - v1))";

const char* kSecondPricePost =
    "(x1 >= x2 -> outcome = (v1 - x2, 0)) and "
    "(x1 < x2 -> outcome = (0, v2 - x1))";

// --- divided-claim allocation (two claimants, fines deter false claims) ----

const char* kClaimMech = R"(
ch {1} (x1);
if x1 > 0 then
  w := 2
else
  ch {2} (x2);
  if x2 > 0 then w := 1 else w := 0 fi
fi
)";

const char* kClaimPost =
    "(w = 1 -> outcome = (1, 0, 0)) and "
    "(w = 2 -> outcome = (2, 0, 0)) and "
    "(w = 0 -> outcome = (2, eps, M))";

std::string claim_interp(int fine, bool first_owns) {
  std::ostringstream os;
  os << R"({
  "agents": 2,
  "sorts": {"x1": {"int": [0, 1]}, "x2": {"int": [0, 1]}, "w": {"int": [0, 2]}},
  "outcome": {"tuple": [{"int": [0, 2]}, {"int": [0, 1]}, {"int": [0, 2]}]},
  "constants": {"eps": 1, "M": )"
     << fine << R"(, "vH": 3, "vL": 1},
  "preferences": {
    "1": {"utility": [{"if": "outcome[1] = 1", "then": ")"
     << (first_owns ? "vH" : "vL") << R"( - outcome[2]"}, {"then": "0 - outcome[2]"}]},
    "2": {"utility": [{"if": "outcome[1] = 2", "then": ")"
     << (first_owns ? "vL" : "vH") << R"( - outcome[3]"}, {"then": "0 - outcome[3]"}]}
  }
})";
  return os.str();
}

const std::string kClaimOwner1 = claim_interp(2, true);
const std::string kClaimOwner2 = claim_interp(2, false);
const std::string kClaimNoFine = claim_interp(0, true);

// --- descending-price (clock) auction ---------------------------------------

const char* kClockMech = R"(
p := init;
w := 0;
while p > 0 and w = 0 do
  ch {1, 2} (x1, x2);
  if x1 > 0 then
    w := 1
  else
    if x2 > 0 then w := 2 else p := p - 1 fi
  fi
od
)";

const char* kClockBody = R"(
ch {1, 2} (x1, x2);
if x1 > 0 then
  w := 1
else
  if x2 > 0 then w := 2 else p := p - 1 fi
fi
)";

const char* kClockInterp = R"({
  "agents": 2,
  "sorts": {
    "p": {"int": [0, 4]}, "init": {"int": [0, 4]},
    "v1": {"int": [0, 4]}, "v2": {"int": [0, 4]},
    "x1": {"int": [0, 1]}, "x2": {"int": [0, 1]},
    "w": {"int": [0, 2]}
  },
  "outcome": {"tuple": [{"int": [-4, 4]}, {"int": [-4, 4]}]},
  "preferences": {
    "1": {"utility": "outcome[1]"},
    "2": {"utility": "outcome[2]"}
  }
})";

const char* kClockPost =
    "(w = 1 -> outcome = (v1 - p, 0)) and "
    "(w = 2 -> outcome = (0, v2 - p)) and "
    "(w = 0 -> outcome = (0, 0))";

const char* kClockInv =
    "v1 >= v2 and v2 > 0 and p >= v2 and "
    "(w = 1 -> outcome = (v1 - p, 0)) and "
    "(w = 2 -> outcome = (0, v2 - p)) and "
    "(w = 0 -> outcome = (v1 - v2, 0))";

const std::string kClockBodyPre = std::string(kClockInv) + " and p > 0 and w = 0";

// --- positional-ballot tally -------------------------------------------------

const char* kTallyMech = R"(
ch {1, 2} (x1, x2);
c1 := 0;
c2 := 0;
c1 := c1 + proj(x1, 1);
c2 := c2 + proj(x1, 2);
c1 := c1 + proj(x2, 1);
c2 := c2 + proj(x2, 2)
)";

const char* kTallyInterp = R"({
  "agents": 2,
  "sorts": {
    "x1": {"values": [[1, 2], [2, 1]]},
    "x2": {"values": [[1, 2], [2, 1]]},
    "c1": {"int": [0, 4]},
    "c2": {"int": [0, 4]}
  },
  "outcome": {"int": [0, 0]}
})";

// --- alternating-offers bargaining (unbounded; depth cap bites) -------------

const char* kBargainMech = R"(
agree := 0;
optout := 0;
i := 1;
while not (optout = 1) and not (agree = 1) do
  if i = 1 then ch {1} (x) else ch {2} (x) fi;
  if i = 1 then ch {2} (y) else ch {1} (y) fi;
  if y = 0 then
    agree := 1
  else
    if y = 1 then optout := 1 else i := 3 - i fi
  fi
od
)";

const char* kBargainInterp = R"({
  "agents": 2,
  "sorts": {
    "agree": {"int": [0, 1]}, "optout": {"int": [0, 1]},
    "i": {"int": [1, 2]}, "x": {"int": [0, 2]}, "y": {"int": [0, 2]}
  },
  "outcome": {"int": [0, 1]},
  "int_universe": [0, 3],
  "preferences": {
    "1": {"utility": "outcome"},
    "2": {"utility": "outcome"}
  }
})";

std::vector<CorpusEntry> make_entries() {
  std::vector<CorpusEntry> out;

  {
    CorpusEntry e;
    e.name = "second-price";
    e.note = "truthful bidding is an equilibrium of the sealed-bid auction";
    e.mechanism = kSecondPriceMech;
    e.interpretation = kSecondPriceInterp;
    e.pre = kSecondPricePre;
    e.post = kSecondPricePost;
    e.expected = "valid";
    out.push_back(e);
  }
  {
    CorpusEntry e;
    e.name = "claim-owner-1";
    e.note = "with the fine above the low value, the true owner keeps the good";
    e.mechanism = kClaimMech;
    e.interpretation = kClaimOwner1.c_str();
    e.pre = "outcome = (1, 0, 0)";
    e.post = kClaimPost;
    e.expected = "valid";
    out.push_back(e);
  }
  {
    CorpusEntry e;
    e.name = "claim-owner-2";
    e.note = "the mirrored ownership profile awards the good to the second agent";
    e.mechanism = kClaimMech;
    e.interpretation = kClaimOwner2.c_str();
    e.pre = "outcome = (2, 0, 0)";
    e.post = kClaimPost;
    e.expected = "valid";
    out.push_back(e);
  }
  {
    CorpusEntry e;
    e.name = "claim-no-fine";
    e.note = "with the fine removed the pretender claims too, so the goal fails";
    e.mechanism = kClaimMech;
    e.interpretation = kClaimNoFine.c_str();
    e.pre = "outcome = (1, 0, 0)";
    e.post = kClaimPost;
    e.expected = "invalid";
    out.push_back(e);
  }
  {
    CorpusEntry e;
    e.name = "clock-auction-body";
    e.note = "the loop body preserves the pricing invariant";
    e.mechanism = kClockBody;
    e.interpretation = kClockInterp;
    e.pre = kClockBodyPre.c_str();
    e.post = kClockInv;
    e.expected = "valid";
    out.push_back(e);
  }
  {
    CorpusEntry e;
    e.name = "clock-auction";
    e.note = "the higher-value bidder buys at the lower value";
    e.mechanism = kClockMech;
    e.interpretation = kClockInterp;
    e.pre = "v1 >= v2 and v2 > 0 and init >= v2 and outcome = (v1 - v2, 0)";
    e.post = kClockPost;
    e.expected = "valid";
    out.push_back(e);
  }
  {
    CorpusEntry e;
    e.name = "clock-auction-no-demand";
    e.note = "a sale price above both values cannot be an equilibrium outcome";
    e.mechanism = kClockMech;
    e.interpretation = kClockInterp;
    e.pre = "v1 = 2 and v2 = 0 and init = 2 and outcome = (2, 0)";
    e.post = kClockPost;
    e.expected = "invalid";
    out.push_back(e);
  }
  {
    CorpusEntry e;
    e.name = "clock-auction-no-sale";
    e.note = "letting the clock run out is not credible when both values are high";
    e.mechanism = kClockMech;
    e.interpretation = kClockInterp;
    e.pre = "v1 = 3 and v2 = 3 and init = 2 and outcome = (0, 0)";
    e.post = kClockPost;
    e.expected = "invalid";
    out.push_back(e);
  }
  {
    CorpusEntry e;
    e.name = "ballot-tally";
    e.kind = CorpusEntry::Kind::Simulate;
    e.note = "positional scores accumulate across both ballots";
    e.mechanism = kTallyMech;
    e.interpretation = kTallyInterp;
    e.script = "x1 = (2, 1), x2 = (1, 2)";
    e.expect_final = "c1 = 3, c2 = 3";
    out.push_back(e);
  }
  {
    CorpusEntry e;
    e.name = "bargaining-capped";
    e.note = "alternating offers can stall forever, so a shallow cap refuses a verdict";
    e.mechanism = kBargainMech;
    e.interpretation = kBargainInterp;
    e.pre = "i = 1 and agree = 0 and optout = 0";
    e.post = "true";
    e.expected = "inexact";
    e.depth_cap = 26;
    out.push_back(e);
  }
  return out;
}

std::pair<bool, std::string> run_verify(const CorpusEntry& e) {
  Interpretation interp = interpretation_from_json(e.interpretation);
  MechPtr mech = parse_mechanism(e.mechanism);
  EPredicate pre = EPredicate::from_formula_text(e.pre);
  EPredicate post = EPredicate::from_formula_text(e.post);
  ValidityOptions opts;
  if (e.depth_cap > 0) opts.depth_cap = e.depth_cap;
  ValidityReport vr = check_validity(pre, mech, post, interp, opts);
  std::string got = to_string(vr.verdict);
  std::string detail = got;
  if (vr.counterexample) {
    detail += " at " + state_str(vr.counterexample->first) + " / " +
              vr.counterexample->second.str();
  }
  if (got != e.expected) {
    return {false, "expected " + std::string(e.expected) + ", got " + detail};
  }
  return {true, detail};
}

std::pair<bool, std::string> run_simulate(const CorpusEntry& e) {
  Interpretation interp = interpretation_from_json(e.interpretation);
  MechPtr mech = parse_mechanism(e.mechanism);
  State final_state = run_scripted_play(mech, State{}, e.script, interp);

  for (const auto& [var, want] : parse_bindings(e.expect_final, interp)) {
    auto it = final_state.find(var);
    if (it == final_state.end()) {
      return {false, "final state does not bind '" + var + "'"};
    }
    if (!(it->second == want)) {
      return {false, "final " + var + " = " + it->second.str() + ", wanted " +
                         want.str()};
    }
  }
  return {true, "final state " + state_str(final_state)};
}

CorpusReport run_entry(const CorpusEntry& e) {
  CorpusReport r;
  r.name = e.name;
  auto t0 = std::chrono::steady_clock::now();
  try {
    auto [pass, detail] = e.kind == CorpusEntry::Kind::Verify
                              ? run_verify(e)
                              : run_simulate(e);
    r.pass = pass;
    r.detail = std::move(detail);
  } catch (const std::exception& ex) {
    r.pass = false;
    r.detail = ex.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                  .count();
  return r;
}

}  // namespace

const std::vector<CorpusEntry>& corpus_entries() {
  static const std::vector<CorpusEntry> entries = make_entries();
  return entries;
}

std::vector<CorpusReport> run_corpus(bool parallel) {
  const auto& entries = corpus_entries();
  std::vector<CorpusReport> reports;
  reports.reserve(entries.size());
  if (!parallel) {
    for (const auto& e : entries) reports.push_back(run_entry(e));
    return reports;
  }
  std::vector<std::future<CorpusReport>> futures;
  futures.reserve(entries.size());
  for (const auto& e : entries) {
    futures.push_back(std::async(std::launch::async, run_entry, std::cref(e)));
  }
  for (auto& f : futures) reports.push_back(f.get());
  return reports;
}

}  // namespace mpl
