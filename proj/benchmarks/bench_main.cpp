#include <benchmark/benchmark.h>

#include "lpsem/atom_tree.hpp"
#include "lpsem/checks.hpp"
#include "lpsem/goal_tree.hpp"
#include "lpsem/render.hpp"
#include "lpsem/sld.hpp"

using namespace lpsem;

namespace {

const Program& natlist() {
  static const Program p = parse_program(natlist_source());
  return p;
}

const Program& ground() {
  static const Program p = parse_program(ground_source());
  return p;
}

Atom atom(const char* text) { return parse_goal(text).atoms()[0]; }

// Visits the whole truncation so lazy nodes are expanded.
std::size_t touch(const AndNode* n, int depth, const AtomTree& t) {
  std::size_t count = 1;
  if (!t.expanded(depth)) return count;
  for (const auto& o : n->children())
    for (const AndNode* c : o.children) count += touch(c, depth + 2, t);
  return count;
}

void BM_Mgu(benchmark::State& state) {
  Atom a = atom("List(cons(x1,cons(x1,x2)))");
  const Atom& h = natlist().clauses[0].head;
  for (auto _ : state) benchmark::DoNotOptimize(mgu(a, h));
}
BENCHMARK(BM_Mgu);

void BM_SaturatedStep(benchmark::State& state) {
  Atom a = atom("List(cons(x1,x2))");
  Bounds b{1, static_cast<int>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(saturated_step(natlist(), a, b));
}
BENCHMARK(BM_SaturatedStep)->Arg(1)->Arg(2)->Arg(3);

void BM_SaturatedTree(benchmark::State& state) {
  Atom a = atom("List(cons(x1,cons(x1,x2)))");
  int d = static_cast<int>(state.range(0));
  for (auto _ : state) {
    AtomTree t = build_saturated_avtree(natlist(), a, d, Bounds{1, 2});
    benchmark::DoNotOptimize(touch(t.root(), 0, t));
  }
}
BENCHMARK(BM_SaturatedTree)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_SynchedSearch(benchmark::State& state) {
  Atom a = atom("List(cons(x1,cons(x1,x2)))");
  for (auto _ : state) {
    auto engine = std::make_shared<StepEngine>(natlist(), Bounds{1, 2});
    AtomTree t = build_saturated_avtree(engine, a, 8);
    benchmark::DoNotOptimize(find_synched_refutations(t, SynchedSearchOptions{8, 1}));
  }
}
BENCHMARK(BM_SynchedSearch)->Unit(benchmark::kMillisecond);

void BM_SldAnswers(benchmark::State& state) {
  Goal g = parse_goal("[Nat(x1), List(cons(x1,x2))]");
  int steps = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(computed_answers(natlist(), g, steps));
}
BENCHMARK(BM_SldAnswers)->Arg(4)->Arg(8);

void BM_GroundVtreeConcat(benchmark::State& state) {
  Goal whole = parse_goal("[p(b,b), p(b,c)]");
  Goal left = parse_goal("[p(b,b)]");
  Goal right = parse_goal("[p(b,c)]");
  for (auto _ : state) {
    auto engine = std::make_shared<StepEngine>(ground(), Bounds{0, 0});
    auto c = concat_ground(build_vtree_ground(engine, left, 5), build_vtree_ground(engine, right, 5));
    benchmark::DoNotOptimize(goal_trees_equal(c, build_vtree_ground(engine, whole, 5)));
  }
}
BENCHMARK(BM_GroundVtreeConcat);

void BM_GoalRefutations(benchmark::State& state) {
  Goal g = parse_goal("[Nat(x1), List(cons(x1,x2))]");
  for (auto _ : state) {
    GoalTree t = build_saturated_vtree(natlist(), g, 4, Bounds{1, 2});
    benchmark::DoNotOptimize(find_goal_refutations(t, RefutationSearchOptions{4, 1}));
  }
}
BENCHMARK(BM_GoalRefutations)->Unit(benchmark::kMillisecond);

void BM_RenderJson(benchmark::State& state) {
  AtomTree t = build_andor_tree(ground(), atom("p(b,b)"), 6);
  PlainNode p = to_plain(t);
  for (auto _ : state) benchmark::DoNotOptimize(import_json(render_json(p)));
}
BENCHMARK(BM_RenderJson);

}  // namespace

BENCHMARK_MAIN();
