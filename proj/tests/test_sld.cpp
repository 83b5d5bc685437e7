#include <gtest/gtest.h>

#include "lpsem/atom_tree.hpp"
#include "lpsem/checks.hpp"
#include "lpsem/sld.hpp"

using namespace lpsem;

namespace {

std::vector<std::string> strings(const std::vector<Substitution>& v) {
  std::vector<std::string> out;
  for (const auto& s : v) out.push_back(to_string(s));
  std::sort(out.begin(), out.end());
  return out;
}

TEST(Sld, NatAnswersGrowWithSteps) {
  Program p = parse_program(natlist_source());
  auto answers = computed_answers(p, parse_goal("Nat(x1)"), 3);
  EXPECT_EQ(strings(answers), (std::vector<std::string>{"<succ(succ(zero))>:1->0", "<succ(zero)>:1->0",
                                                        "<zero>:1->0"}));
}

TEST(Sld, ListAnswers) {
  Program p = parse_program(natlist_source());
  auto answers = computed_answers(p, parse_goal("List(x1)"), 4);
  EXPECT_EQ(strings(answers), (std::vector<std::string>{"<cons(succ(zero),nil)>:1->0",
                                                        "<cons(zero,nil)>:1->0", "<nil>:1->0"}));
}

TEST(Sld, DerivationsRecordStatus) {
  Program p = parse_program(natlist_source());
  auto ds = sld_derive(p, parse_goal("Nat(x1)"), 2);
  int success = 0, exhausted = 0;
  for (const auto& d : ds) {
    if (d.status == DerivationStatus::Success) {
      ++success;
      ASSERT_TRUE(d.computed_answer);
      EXPECT_TRUE(d.steps.back().goal.empty());
    }
    exhausted += d.status == DerivationStatus::DepthExhausted;
  }
  EXPECT_EQ(success, 2);
  EXPECT_EQ(exhausted, 1);
}

TEST(Sld, FailureLeaves) {
  Program p = parse_program(natlist_source());
  auto ds = sld_derive(p, parse_goal("List(cons(x1,cons(x2,x1)))"), 6);
  for (const auto& d : ds) EXPECT_NE(d.status, DerivationStatus::Success);
  EXPECT_TRUE(computed_answers(p, parse_goal("List(cons(x1,cons(x2,x1)))"), 6).empty());
}

TEST(Sld, AnswerComposesGoalSides) {
  Program p = parse_program(natlist_source());
  for (const auto& d : sld_derive(p, parse_goal("List(cons(x1,x2))"), 5)) {
    if (d.status != DerivationStatus::Success) continue;
    Substitution acc = Substitution::identity(d.start.context());
    for (const auto& s : d.steps) acc = compose(acc, s.sigma);
    EXPECT_EQ(acc, *d.computed_answer);
  }
}

TEST(FactorThrough, FindsAndRejects) {
  Signature sig = parse_program(natlist_source()).signature;
  Substitution tau = parse_substitution("<cons(x1,x2)>:1->2");
  auto rho = factor_through(tau, parse_substitution("<cons(zero,nil)>:1->0"), sig);
  ASSERT_TRUE(rho);
  EXPECT_EQ(compose(tau, *rho), parse_substitution("<cons(zero,nil)>:1->0"));
  EXPECT_FALSE(factor_through(tau, parse_substitution("<nil>:1->0"), sig));
  // x2 does not occur in the answer, so any image works.
  Substitution loose = parse_substitution("<x1>:1->2");
  auto r2 = factor_through(loose, parse_substitution("<zero>:1->0"), sig);
  ASSERT_TRUE(r2);
  EXPECT_EQ(compose(loose, *r2), parse_substitution("<zero>:1->0"));
}

TEST(CorrectAnswers, InstancesOfComputedAnswers) {
  Program p = parse_program(natlist_source());
  Goal g = parse_goal("List(cons(x1,x2))");
  EXPECT_TRUE(is_correct_answer(p, g, parse_substitution("<zero,nil>:2->0"), 8));
  EXPECT_FALSE(is_correct_answer(p, g, parse_substitution("<nil,nil>:2->0"), 8));
  EXPECT_THROW(is_correct_answer(p, g, parse_substitution("<zero>:1->0"), 8), ContextError);
  auto all = bounded_correct_answers(p, g, Bounds{1, 2}, 8);
  EXPECT_TRUE(std::is_sorted(all.begin(), all.end()));
  for (const auto& s : all) EXPECT_TRUE(is_correct_answer(p, g, s, 8));
  EXPECT_FALSE(all.empty());
}

// On a ground program, SLD success agrees with refutability of every atom
// in the and-or tree semantics.
bool refutable(const AtomTree& t, const AndNode* n, int depth) {
  if (!t.expanded(depth)) return false;
  for (const auto& o : n->children()) {
    bool all = true;
    for (const AndNode* c : o.children) all = all && refutable(t, c, depth + 2);
    if (all) return true;
  }
  return false;
}

TEST(Sld, GroundAgreesWithAndOrTrees) {
  Program p = parse_program(ground_source());
  auto atoms = fixture_atoms(p, 0, 0, false);
  for (const Atom& a : atoms)
    for (const Atom& b : atoms) {
      Goal g({a, b}, 0);
      bool sld = !computed_answers(p, g, 12).empty();
      AtomTree ta = build_andor_tree(p, a, 8), tb = build_andor_tree(p, b, 8);
      bool trees = refutable(ta, ta.root(), 0) && refutable(tb, tb.root(), 0);
      EXPECT_EQ(sld, trees) << to_string(g);
    }
}

}  // namespace
