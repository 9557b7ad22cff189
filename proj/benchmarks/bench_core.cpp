#include <benchmark/benchmark.h>

#include "mpl/config.hpp"
#include "mpl/corpus.hpp"
#include "mpl/equilibrium.hpp"
#include "mpl/hoare.hpp"
#include "mpl/parser.hpp"
#include "mpl/semantics.hpp"

namespace {

const mpl::CorpusEntry& entry(const std::string& name) {
  for (const auto& e : mpl::corpus_entries())
    if (e.name == name) return e;
  throw std::runtime_error("missing corpus entry " + name);
}

void BM_parse_clock_auction(benchmark::State& state) {
  const auto& e = entry("clock-auction");
  for (auto _ : state) {
    benchmark::DoNotOptimize(mpl::parse_mechanism(e.mechanism));
  }
}
BENCHMARK(BM_parse_clock_auction);

void BM_build_tree_clock_auction(benchmark::State& state) {
  const auto& e = entry("clock-auction");
  auto interp = mpl::interpretation_from_json(e.interpretation);
  auto mech = mpl::parse_mechanism(e.mechanism);
  auto s0 = mpl::initial_state(
      mech,
      {{"v1", mpl::Value::integer(3)},
       {"v2", mpl::Value::integer(2)},
       {"init", mpl::Value::integer(4)}},
      interp);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mpl::build_game_tree(mech, s0, interp));
  }
}
BENCHMARK(BM_build_tree_clock_auction);

void BM_state_support_clock_auction(benchmark::State& state) {
  const auto& e = entry("clock-auction");
  auto interp = mpl::interpretation_from_json(e.interpretation);
  auto mech = mpl::parse_mechanism(e.mechanism);
  auto post = mpl::EPredicate::from_formula_text(e.post);
  mpl::State s0 = mpl::initial_state(
      mech,
      {{"v1", mpl::Value::integer(3)},
       {"v2", mpl::Value::integer(2)},
       {"init", mpl::Value::integer(4)}},
      interp);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mpl::state_support(mech, s0, post, interp,
                                                mpl::default_depth_cap()));
  }
}
BENCHMARK(BM_state_support_clock_auction);

void BM_check_validity_second_price(benchmark::State& state) {
  const auto& e = entry("second-price");
  auto interp = mpl::interpretation_from_json(e.interpretation);
  auto mech = mpl::parse_mechanism(e.mechanism);
  auto pre = mpl::EPredicate::from_formula_text(e.pre);
  auto post = mpl::EPredicate::from_formula_text(e.post);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mpl::check_validity(pre, mech, post, interp));
  }
}
BENCHMARK(BM_check_validity_second_price);

}  // namespace

BENCHMARK_MAIN();
