#include <gtest/gtest.h>

#include "lpsem/atom_tree.hpp"
#include "lpsem/checks.hpp"

using namespace lpsem;

namespace {

Atom atom(const char* text, std::optional<int> context = std::nullopt) {
  return parse_goal(text, context).atoms()[0];
}

const Program& natlist() {
  static const Program p = parse_program(natlist_source());
  return p;
}

const Program& ground() {
  static const Program p = parse_program(ground_source());
  return p;
}

TEST(GroundStep, RejectsVariables) {
  EXPECT_THROW(ground_step(natlist(), atom("List(nil)")), GroundnessError);
  EXPECT_THROW(ground_step(ground(), atom("p(x1,b)")), GroundnessError);
  EXPECT_TRUE(ground_step(ground(), atom("q(a)")).empty());
}

TEST(TermMatchingStep, OnlyMatchesHeads) {
  auto bodies = term_matching_step(natlist(), atom("List(cons(x1,x2))"), Bounds{1, 2});
  ASSERT_EQ(bodies.size(), 1u);
  EXPECT_EQ(to_string(bodies[0]), "[Nat(x1),List(x2)]");
  EXPECT_TRUE(term_matching_step(natlist(), atom("Nat(x1)"), Bounds{1, 2}).empty());
}

// The saturated step against the definition: for every sigma in the
// window, the entry exists iff A sigma has matching bodies, and then holds
// exactly those bodies.
TEST(SaturatedStep, AgreesWithPerSubstitutionMatching) {
  const Bounds b{1, 2};
  for (const char* text : {"Nat(x1)", "List(cons(x1,x2))", "List(x1)", "List(cons(x1,cons(x2,x1)))"}) {
    Atom a = atom(text);
    auto entries = saturated_step(natlist(), a, b);
    std::size_t next = 0;
    for (const auto& sigma : enumerate_substitutions(a.context(), natlist().signature, b.depth, b.max_target)) {
      auto bodies = term_matching_step(natlist(), apply(a, sigma), b);
      if (bodies.empty()) continue;
      ASSERT_LT(next, entries.size()) << text;
      EXPECT_EQ(entries[next].sigma, sigma) << text;
      EXPECT_EQ(entries[next].bodies, bodies) << text;
      ++next;
    }
    EXPECT_EQ(next, entries.size()) << text;
  }
}

TEST(AndOrTree, GroundTreeShape) {
  AtomTree t = build_andor_tree(ground(), atom("p(b,b)"), 6);
  EXPECT_EQ(t.kind(), TreeKind::GroundMgu);
  const AndNode* root = t.root();
  ASSERT_EQ(root->children().size(), 2u);
  EXPECT_TRUE(audit(t).empty());
  EXPECT_THROW(build_andor_tree(ground(), atom("q(c)"), -1), std::invalid_argument);
}

TEST(AndOrTree, OddDepthActsAsNextEven) {
  AtomTree t3 = build_andor_tree(ground(), atom("p(b,b)"), 3);
  AtomTree t4 = build_andor_tree(ground(), atom("p(b,b)"), 4);
  EXPECT_FALSE(tree_difference(t3, t4));
  EXPECT_TRUE(t3.expanded(2));
  EXPECT_FALSE(t3.expanded(4));
}

TEST(AndOrTree, MguLabelsOnNonGroundProgram) {
  AtomTree t = build_andor_tree(natlist(), atom("Nat(x1)"), 2);
  std::vector<std::string> labels;
  for (const auto& o : t.root()->children()) labels.push_back(label_string(o.label));
  std::sort(labels.begin(), labels.end());
  EXPECT_EQ(labels, (std::vector<std::string>{"<succ(x1)>", "<zero>"}));
}

TEST(CoinductiveTree, IdentityLabelsOnly) {
  AtomTree t = build_coinductive_tree(natlist(), atom("List(cons(x1,x2))"), 4, Bounds{1, 2});
  EXPECT_TRUE(audit(t).empty());
  ASSERT_EQ(t.root()->children().size(), 1u);
  const OrNode& o = t.root()->children()[0];
  EXPECT_TRUE(o.label.is_identity());
  ASSERT_EQ(o.children.size(), 2u);
  EXPECT_EQ(to_string(o.children[0]->label()), "Nat(x1)");
  EXPECT_TRUE(o.children[0]->children().empty());
}

TEST(SaturatedTree, DesaturationGivesCoinductiveTree) {
  const Bounds b{1, 2};
  for (const char* text : {"List(cons(x1,x2))", "Nat(x1)", "List(x1)"}) {
    AtomTree s = build_saturated_avtree(natlist(), atom(text), 4, b);
    AtomTree c = build_coinductive_tree(natlist(), atom(text), 4, b);
    auto diff = tree_difference(desaturate(s), c);
    EXPECT_FALSE(diff) << text << ": " << diff.value_or("");
    EXPECT_TRUE(audit(s).empty()) << text;
  }
}

TEST(SaturatedTree, LabelRunsGroupEqualLabels) {
  AtomTree t = build_saturated_avtree(natlist(), atom("List(x1)"), 2, Bounds{1, 1});
  const AndNode* root = t.root();
  int covered = 0;
  for (auto [b, e] : root->label_runs()) {
    ASSERT_LT(b, e);
    for (int i = b; i < e; ++i) EXPECT_EQ(root->children()[i].label, root->children()[b].label);
    EXPECT_EQ(root->label_range(root->children()[b].label), std::make_pair(b, e));
    covered += e - b;
  }
  EXPECT_EQ(covered, static_cast<int>(root->children().size()));
  auto none = root->label_range(parse_substitution("<succ(zero)>:1->0"));
  EXPECT_EQ(none.first, none.second);
}

TEST(ThetaBar, MatchesDirectBuild) {
  const Bounds b{1, 2};
  Atom a = atom("List(cons(x1,x2))");
  AtomTree wide = build_saturated_avtree(natlist(), a, 4, b, 2);
  for (const char* s : {"<zero,x1>:2->1", "<succ(x1),nil>:2->1", "<x2,x1>:2->2", "<nil,nil>:2->0"}) {
    Substitution theta = parse_substitution(s);
    ThetaBarResult r = theta_bar_report(wide, theta);
    EXPECT_TRUE(r.missing.empty()) << s;
    AtomTree direct = build_saturated_avtree(natlist(), apply(a, theta), 4, b);
    auto diff = tree_difference(direct, r.tree);
    EXPECT_FALSE(diff) << s << ": " << diff.value_or("");
  }
}

TEST(ThetaBar, ReportsLabelsOutsideTheWindow) {
  Atom a = atom("Nat(x1)");
  AtomTree narrow = build_saturated_avtree(natlist(), a, 2, Bounds{1, 1});
  ThetaBarResult r = theta_bar_report(narrow, parse_substitution("<succ(x1)>:1->1"));
  // succ(succ(zero)) and similar compositions have depth 2.
  EXPECT_FALSE(r.missing.empty());
  EXPECT_THROW(theta_bar(narrow, parse_substitution("<zero,nil>:2->0")), ContextError);
  EXPECT_THROW(theta_bar(build_andor_tree(natlist(), a, 2), Substitution::identity(1)), std::invalid_argument);
}

TEST(TreeDifference, CacheGivesSameVerdicts) {
  const Bounds b{1, 2};
  auto e1 = std::make_shared<StepEngine>(natlist(), b);
  auto e2 = std::make_shared<StepEngine>(natlist(), b);
  TreeDiffCache cache;
  for (const char* text : {"List(x1)", "List(cons(x1,x2))", "Nat(x1)"}) {
    AtomTree t1 = build_saturated_avtree(e1, atom(text), 4);
    AtomTree t2 = build_saturated_avtree(e2, atom(text), 4);
    EXPECT_FALSE(tree_difference(t1, t2, cache));
    EXPECT_FALSE(tree_difference(t1, t2, cache));
  }
  AtomTree x = build_saturated_avtree(e1, atom("List(x1)"), 4);
  AtomTree y = build_saturated_avtree(e2, atom("Nat(x1)"), 4);
  EXPECT_TRUE(tree_difference(x, y, cache));
}

TEST(SynchedSearch, FindsListAnswers) {
  auto engine = std::make_shared<StepEngine>(natlist(), Bounds{1, 2});
  AtomTree t = build_saturated_avtree(engine, atom("List(x1)"), 4);
  auto found = find_synched_refutations(t, SynchedSearchOptions{4, 1});
  std::vector<std::string> answers;
  for (const auto& s : found) {
    EXPECT_NO_THROW(validate_synched(t, s));
    answers.push_back(to_string(s.answer));
  }
  EXPECT_NE(std::find(answers.begin(), answers.end(), "<nil>:1->0"), answers.end());
  EXPECT_NE(std::find(answers.begin(), answers.end(), "<cons(zero,nil)>:1->0"), answers.end());
}

TEST(SynchedSearch, FollowAndValidate) {
  auto engine = std::make_shared<StepEngine>(natlist(), Bounds{1, 2});
  AtomTree t = build_saturated_avtree(engine, atom("Nat(x1)"), 4);
  auto s = follow_synched(t, {parse_substitution("<zero>:1->0")});
  ASSERT_TRUE(s);
  EXPECT_EQ(to_string(s->answer), "<zero>:1->0");
  EXPECT_FALSE(follow_synched(t, {parse_substitution("<succ(x1)>:1->1")}));
  SynchedSubtree bad = *s;
  bad.answer = parse_substitution("<nil>:1->0");
  EXPECT_THROW(validate_synched(t, bad), std::invalid_argument);
}

TEST(SynchedSearch, NormalizationUsesIdentities) {
  auto engine = std::make_shared<StepEngine>(natlist(), Bounds{1, 2});
  Atom a = atom("List(cons(x1,x2))");
  AtomTree t = build_saturated_avtree(engine, a, 6);
  AtomTree wide = build_saturated_avtree(engine, a, 6, 2);
  for (const auto& s : find_synched_refutations(t, SynchedSearchOptions{6, 1})) {
    NormalizedRefutation n = normalize_synched_refutation(wide, s);
    EXPECT_EQ(n.answer, s.answer);
    EXPECT_EQ(n.tree.root()->label(), apply(a, s.answer));
    for (const auto& level : n.subtree.levels) EXPECT_TRUE(level.label.is_identity());
    EXPECT_NO_THROW(validate_synched(n.tree, n.subtree));
  }
}

}  // namespace
