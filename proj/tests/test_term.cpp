#include <gtest/gtest.h>

#include <set>

#include "lpsem/checks.hpp"
#include "lpsem/program.hpp"
#include "lpsem/term.hpp"

using namespace lpsem;

namespace {

Signature natlist_sig() { return parse_program(natlist_source()).signature; }

TEST(Term, DepthAndMaxVar) {
  Term x2 = make_var(2);
  Term t = make_app("cons", {make_app("succ", {make_app("zero")}), x2});
  EXPECT_EQ(t->depth(), 2);
  EXPECT_EQ(t->max_var(), 2);
  EXPECT_EQ(x2->depth(), 0);
  EXPECT_EQ(make_app("nil")->depth(), 0);
  EXPECT_EQ(make_app("nil")->max_var(), 0);
  EXPECT_EQ(to_string(t), "cons(succ(zero),x2)");
}

TEST(Term, EqualityIsStructural) {
  Term a = make_app("succ", {make_var(1)});
  Term b = make_app("succ", {make_var(1)});
  EXPECT_TRUE(equal(a, b));
  EXPECT_EQ(a->hash(), b->hash());
  EXPECT_FALSE(equal(a, make_app("succ", {make_var(2)})));
  EXPECT_EQ(compare(a, b), 0);
}

TEST(Term, SubstituteNeedsEveryImage) {
  Term t = make_app("cons", {make_var(1), make_var(2)});
  EXPECT_EQ(to_string(substitute(t, {make_app("zero"), make_app("nil")})), "cons(zero,nil)");
  EXPECT_THROW(substitute(t, {make_app("zero")}), ContextError);
  EXPECT_EQ(to_string(shift_vars(t, 3)), "cons(x4,x5)");
}

TEST(Atom, RejectsVariablesOutsideContext) {
  EXPECT_THROW(Atom("Nat", {make_var(2)}, 1), ContextError);
  Atom a("Nat", {make_var(1)}, 3);
  EXPECT_EQ(a.context(), 3);
  EXPECT_EQ(a.in_context(1).context(), 1);
  EXPECT_FALSE(a == a.in_context(1));
}

TEST(Substitution, PrintsArityAndLabel) {
  Substitution s({make_app("succ", {make_var(1)}), make_app("nil")}, 1);
  EXPECT_EQ(to_string(s), "<succ(x1),nil>:2->1");
  EXPECT_EQ(label_string(s), "<succ(x1),nil>");
  EXPECT_EQ(label_string(Substitution::identity(2)), "id_2");
  EXPECT_TRUE(Substitution::identity(0).is_identity());
  EXPECT_EQ(Substitution::canonical({make_var(3)}).target(), 3);
  EXPECT_THROW(Substitution({make_var(2)}, 1), ContextError);
}

TEST(Substitution, TargetDistinguishesEqualTuples) {
  Substitution a({make_app("nil")}, 0), b({make_app("nil")}, 1);
  EXPECT_FALSE(a == b);
  EXPECT_FALSE(a.is_identity());
}

TEST(Substitution, ComposeAppliesFirstArgumentFirst) {
  Substitution t1({make_app("cons", {make_var(1), make_var(2)})}, 2);
  Substitution t2({make_app("zero"), make_app("nil")}, 0);
  Substitution c = compose(t1, t2);
  EXPECT_EQ(to_string(c), "<cons(zero,nil)>:1->0");
  EXPECT_THROW(compose(t2, t1), ContextError);
}

TEST(Substitution, ApplyToAtom) {
  Atom a("List", {make_app("cons", {make_var(1), make_var(2)})}, 2);
  Substitution s({make_app("zero"), make_var(1)}, 1);
  Atom b = apply(a, s);
  EXPECT_EQ(to_string(b), "List(cons(zero,x1))");
  EXPECT_EQ(b.context(), 1);
}

TEST(Enumeration, TermsUpToDepth) {
  Signature sig = natlist_sig();
  // x1, zero, nil; succ of those three; cons of any two of them.
  EXPECT_EQ(terms_up_to_depth(sig, 1, 1).size(), 3u + 3u + 9u);
  EXPECT_EQ(terms_up_to_depth(sig, 0, 0).size(), 2u);
  for (const Term& t : terms_up_to_depth(sig, 2, 2)) {
    EXPECT_LE(t->depth(), 2);
    EXPECT_LE(t->max_var(), 2);
  }
}

TEST(Enumeration, CountsMatchBruteForce) {
  Signature sig = natlist_sig();
  EXPECT_EQ(count_substitutions(2, sig, 1, 2), 865u);
  EXPECT_EQ(count_substitutions(1, sig, 1, 2), 47u);
  for (int n = 0; n <= 2; ++n)
    for (int d = 0; d <= 1; ++d)
      for (int m = 0; m <= 2; ++m) {
        auto all = enumerate_substitutions(n, sig, d, m);
        EXPECT_EQ(all.size(), count_substitutions(n, sig, d, m));
        std::set<std::string> seen;
        for (const auto& s : all) {
          EXPECT_TRUE(within_bounds(s, d, m));
          EXPECT_EQ(s.source(), n);
          seen.insert(to_string(s));
        }
        EXPECT_EQ(seen.size(), all.size());
      }
}

TEST(Enumeration, IsSortedAndIncludesNonCanonicalTargets) {
  Signature sig = natlist_sig();
  auto all = enumerate_substitutions(1, sig, 0, 2);
  EXPECT_TRUE(std::is_sorted(all.begin(), all.end()));
  // <zero> appears once per target 0, 1, 2.
  int zeros = 0;
  for (const auto& s : all) zeros += label_string(s) == "<zero>";
  EXPECT_EQ(zeros, 3);
}

}  // namespace
