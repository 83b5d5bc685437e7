#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "lpsem/checks.hpp"
#include "lpsem/program.hpp"

using namespace lpsem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(Parse, NatListFixture) {
  Program p = parse_program(slurp(std::string(LPSEM_FIXTURES) + "/natlist.lp"));
  ASSERT_EQ(p.clauses.size(), 4u);
  EXPECT_EQ(to_string(p.clauses[0]), "List(cons(x1,x2)) :- Nat(x1), List(x2).");
  EXPECT_EQ(p.clauses[0].context, 2);
  EXPECT_EQ(p.clauses[1].context, 0);
  EXPECT_EQ(p.signature.functions.at("cons"), 2);
  EXPECT_EQ(p.signature.functions.at("nil"), 0);
  EXPECT_EQ(p.signature.predicates.at("Nat"), 1);
  EXPECT_FALSE(is_ground(p));
}

TEST(Parse, EmbeddedFixturesMatchFiles) {
  Program a = parse_program(natlist_source());
  Program b = parse_program(slurp(std::string(LPSEM_FIXTURES) + "/natlist.lp"));
  EXPECT_EQ(a.clauses, b.clauses);
  EXPECT_EQ(a.signature, b.signature);
  Program g = parse_program(ground_source());
  EXPECT_EQ(g.clauses, parse_program(slurp(std::string(LPSEM_FIXTURES) + "/ground.lp")).clauses);
  EXPECT_TRUE(is_ground(g));
  // Declared constants a, b, c all exist even where unused in heads.
  EXPECT_EQ(g.signature.functions.size(), 3u);
}

TEST(Parse, PrettyPrintRoundTrips) {
  for (auto src : {natlist_source(), ground_source()}) {
    Program p = parse_program(src);
    Program q = parse_program(pretty_print(p));
    EXPECT_EQ(p.clauses, q.clauses);
    EXPECT_EQ(p.signature, q.signature);
  }
}

TEST(Parse, ErrorsCarryPosition) {
  try {
    parse_program("p(a).\nq(b :- r.\n");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_GT(e.column(), 1);
  }
  EXPECT_THROW(parse_program("p(a) :- ."), ParseError);
  EXPECT_THROW(parse_program(":- bogus f/1."), ParseError);
  EXPECT_THROW(parse_program("p(a).\np(a,b)."), ParseError);
}

TEST(ParseGoal, ContextsAndNamedVariables) {
  Goal g = parse_goal("[Nat(x1), List(cons(x1,x2))]");
  EXPECT_EQ(g.context(), 2);
  EXPECT_EQ(g.size(), 2u);
  EXPECT_EQ(parse_goal("Nat(x1)", 3).context(), 3);
  Goal named = parse_goal("p(x2, Y)");
  EXPECT_EQ(to_string(named), "[p(x2,x3)]");
  EXPECT_TRUE(parse_goal("[]", 0).empty());
  EXPECT_THROW(parse_goal("Nat(x3)", 2), ParseError);
}

TEST(ParseSubstitution, AllForms) {
  EXPECT_EQ(to_string(parse_substitution("<zero,x1>:2->3")), "<zero,x1>:2->3");
  EXPECT_EQ(parse_substitution("<zero,x2>").target(), 2);
  EXPECT_TRUE(parse_substitution("id_2").is_identity());
  EXPECT_EQ(parse_substitution("id_2").source(), 2);
  EXPECT_THROW(parse_substitution("<x3>:1->2"), ParseError);
}

TEST(CheckGoal, ArityClash) {
  Program p = parse_program(natlist_source());
  EXPECT_NO_THROW(check_goal(p, parse_goal("List(x1)")));
  EXPECT_THROW(check_goal(p, parse_goal("List(x1,x2)")), ContextError);
  EXPECT_THROW(check_goal(p, parse_goal("Nat(succ(x1,x2))")), ContextError);
}

TEST(Goal, ConcatAndApply) {
  Goal a = parse_goal("Nat(x1)", 2);
  Goal b = parse_goal("List(x2)", 2);
  EXPECT_EQ(to_string(concat(a, b)), "[Nat(x1),List(x2)]");
  EXPECT_THROW(concat(a, parse_goal("List(x1)", 1)), ContextError);
  Goal c = apply(concat(a, b), parse_substitution("<zero,nil>:2->0"));
  EXPECT_EQ(to_string(c), "[Nat(zero),List(nil)]");
  EXPECT_EQ(c.context(), 0);
}

TEST(Clause, StandardizeApart) {
  Program p = parse_program("p(X) :- q(X, Y), r(Y).");
  const Clause& c = p.clauses[0];
  EXPECT_EQ(c.local_vars(), std::vector<int>{2});
  Clause s = standardize_apart(c, 3);
  EXPECT_EQ(s.context, 5);
  EXPECT_EQ(to_string(s), "p(x4) :- q(x4,x5), r(x5).");
  EXPECT_EQ(to_string(shift_atom(c.head, 2)), "p(x3)");
}

}  // namespace
