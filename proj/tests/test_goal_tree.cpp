#include <gtest/gtest.h>

#include "lpsem/checks.hpp"
#include "lpsem/goal_tree.hpp"
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

Goal goal(const char* text, std::optional<int> context = std::nullopt) { return parse_goal(text, context); }

TEST(Distribute, CartesianConcatenation) {
  auto out = distribute({{goal("q(a)", 0), goal("q(b)", 0)}, {goal("q(c)", 0)}});
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(to_string(out[0]), "[q(a),q(c)]");
  EXPECT_EQ(distribute({}, 2), std::vector<Goal>{Goal({}, 2)});
  EXPECT_TRUE(distribute({{goal("q(a)", 0)}, {}}).empty());
  EXPECT_THROW(distribute({{goal("Nat(x1)", 1)}, {goal("Nat(x1)", 2)}}), ContextError);
}

TEST(ParallelStep, GroundFailsWithAnyAtom) {
  EXPECT_TRUE(parallel_step_ground(ground(), goal("[p(b,a), q(c)]", 0)).empty());
  EXPECT_EQ(parallel_step_ground(ground(), goal("[q(c), q(c)]", 0)), std::vector<Goal>{Goal({}, 0)});
}

TEST(ParallelStep, SaturatedAtOneSubstitution) {
  Goal g = goal("[Nat(x1), List(cons(x1,x2))]");
  auto out = parallel_step_sat(natlist(), g, Bounds{1, 2}, parse_substitution("<succ(succ(zero)),nil>:2->0"));
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(to_string(out[0]), "[Nat(succ(zero)),Nat(succ(succ(zero))),List(nil)]");
  EXPECT_TRUE(parallel_step_sat(natlist(), g, Bounds{1, 2}, parse_substitution("<nil,nil>:2->0")).empty());
  EXPECT_THROW(parallel_step_sat(natlist(), g, Bounds{1, 2}, parse_substitution("<nil>:1->0")), ContextError);
}

TEST(ParallelStep, EmptyGoalMapsEverySubstitution) {
  auto entries = parallel_step_sat(natlist(), Goal({}, 1), Bounds{0, 1});
  EXPECT_EQ(entries.size(), count_substitutions(1, natlist().signature, 0, 1));
  for (const auto& e : entries) EXPECT_EQ(e.goals, std::vector<Goal>{Goal({}, e.theta.target())});
}

TEST(VTree, GroundOnly) {
  EXPECT_THROW(build_vtree_ground(natlist(), goal("[List(nil)]"), 3), GroundnessError);
  EXPECT_THROW(build_vtree_ground(ground(), goal("[p(x1,b)]"), 3), GroundnessError);
  GoalTree t = build_vtree_ground(ground(), goal("[p(b,b)]", 0), 3);
  EXPECT_TRUE(audit(t).empty());
  EXPECT_EQ(t.root()->children().size(), 2u);
}

TEST(VTree, ConcatenationMatchesDirectBuild) {
  auto engine = std::make_shared<StepEngine>(ground(), Bounds{0, 0});
  GoalTree l = build_vtree_ground(engine, goal("[p(b,b)]", 0), 4);
  GoalTree r = build_vtree_ground(engine, goal("[p(b,c)]", 0), 4);
  GoalTree whole = build_vtree_ground(engine, goal("[p(b,b),p(b,c)]", 0), 4);
  auto diff = goal_tree_difference(concat_ground(l, r), whole);
  EXPECT_FALSE(diff) << diff.value_or("");
  EXPECT_THROW(concat_ground(l, build_vtree_ground(engine, goal("[q(c)]", 0), 3)), std::invalid_argument);
  EXPECT_THROW(concat_all({}), std::invalid_argument);
}

TEST(VTree, SaturatedConcatenationMatchesDirectBuild) {
  const Bounds b{1, 2};
  auto engine = std::make_shared<StepEngine>(natlist(), b);
  GoalTree l = build_saturated_vtree(engine, goal("[Nat(x1)]", 2), 2);
  GoalTree r = build_saturated_vtree(engine, goal("[List(cons(x1,x2))]", 2), 2);
  GoalTree whole = build_saturated_vtree(engine, goal("[Nat(x1), List(cons(x1,x2))]"), 2);
  auto diff = goal_tree_difference(concat_sat(l, r), whole);
  EXPECT_FALSE(diff) << diff.value_or("");
  EXPECT_TRUE(audit(whole).empty());
}

TEST(Repr, GroundPruning) {
  auto engine = std::make_shared<StepEngine>(ground(), Bounds{0, 0});
  Atom a = goal("p(b,b)", 0).atoms()[0];
  GoalTree r = repr_ground(build_andor_tree(engine, a, 6));
  EXPECT_EQ(r.depth_bound(), 3);
  bool saw_pruned = false;
  for (const auto& e : r.root()->children())
    if (to_string(e.node->label()) == "[p(b,a),p(b,c)]") {
      saw_pruned = true;
      EXPECT_TRUE(e.node->children().empty());
    }
  EXPECT_TRUE(saw_pruned);
}

TEST(Refutations, AgreeWithSld) {
  const Bounds b{1, 2};
  Goal g = goal("[Nat(x1), List(cons(x1,x2))]");
  GoalTree t = build_saturated_vtree(natlist(), g, 4, b);
  std::vector<Substitution> answers;
  for (const auto& r : find_goal_refutations(t, RefutationSearchOptions{4, 1})) {
    EXPECT_NO_THROW(validate_path(t, r));
    answers.push_back(r.answer);
  }
  EXPECT_EQ(answers, bounded_correct_answers(natlist(), g, b, 8));
}

TEST(Refutations, NormalizeStartsWithAnswer) {
  const Bounds b{1, 2};
  GoalTree t = build_saturated_vtree(natlist(), goal("[List(cons(x1,x2))]"), 4, b);
  for (const auto& r : find_goal_refutations(t, RefutationSearchOptions{4, 1})) {
    try {
      RefutationPath n = normalize_goal_refutation(t, r);
      EXPECT_NO_THROW(validate_path(t, n));
      ASSERT_FALSE(n.edges.empty());
      EXPECT_EQ(n.edges.front(), r.answer);
      for (std::size_t i = 1; i < n.edges.size(); ++i) EXPECT_TRUE(n.edges[i].is_identity());
    } catch (const ClosureError&) {
      // the window can lack an instantiated step; the error names it
    }
  }
}

TEST(Refutations, ValidateRejectsForeignPaths) {
  GoalTree t = build_vtree_ground(ground(), goal("[q(c)]", 0), 3);
  auto paths = find_goal_refutations(t, 3);
  ASSERT_FALSE(paths.empty());
  RefutationPath r = paths.front();
  r.edges.push_back(Substitution::identity(0));
  EXPECT_THROW(validate_path(t, r), std::invalid_argument);
  GoalTree none = build_vtree_ground(ground(), goal("[p(b,a)]", 0), 3);
  EXPECT_TRUE(find_goal_refutations(none, 3).empty());
}

}  // namespace
