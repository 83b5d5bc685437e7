// Randomized invariants over the natlist signature, fixed seeds.

#include <gtest/gtest.h>

#include <random>

#include "lpsem/atom_tree.hpp"
#include "lpsem/checks.hpp"
#include "lpsem/render.hpp"
#include "lpsem/sld.hpp"

using namespace lpsem;

namespace {

constexpr int kCases = 300;

const Program& natlist() {
  static const Program p = parse_program(natlist_source());
  return p;
}

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  int below(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

  Term term(int vars, int depth) {
    int pick = below(vars > 0 ? 5 : 4);
    if (depth == 0 || pick >= 3) {
      if (vars > 0 && (pick == 4 || below(2) == 0)) return make_var(1 + below(vars));
      return make_app(below(2) ? "zero" : "nil");
    }
    if (pick == 0) return make_app("succ", {term(vars, depth - 1)});
    return make_app("cons", {term(vars, depth - 1), term(vars, depth - 1)});
  }

  Substitution subst(int n, int m, int depth) {
    std::vector<Term> ts;
    for (int i = 0; i < n; ++i) ts.push_back(term(m, depth));
    return Substitution(std::move(ts), m);
  }

  Atom atom(int vars, int depth) {
    int ctx = vars;
    return below(2) ? Atom("Nat", {term(vars, depth)}, ctx) : Atom("List", {term(vars, depth)}, ctx);
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

TEST(Properties, CompositionIsAssociativeWithIdentities) {
  Gen g(11);
  for (int i = 0; i < kCases; ++i) {
    int n = g.below(3), m = g.below(3), k = g.below(3), l = g.below(3);
    Substitution a = g.subst(n, m, 2), b = g.subst(m, k, 2), c = g.subst(k, l, 2);
    EXPECT_EQ(compose(compose(a, b), c), compose(a, compose(b, c)));
    EXPECT_EQ(compose(Substitution::identity(n), a), a);
    EXPECT_EQ(compose(a, Substitution::identity(m)), a);
  }
}

TEST(Properties, ApplyIsFunctorial) {
  Gen g(12);
  for (int i = 0; i < kCases; ++i) {
    int n = g.below(3), m = g.below(3), k = g.below(3);
    Atom a = g.atom(n, 2);
    Substitution s = g.subst(n, m, 2), t = g.subst(m, k, 1);
    EXPECT_EQ(apply(apply(a, s), t), apply(a, compose(s, t)));
  }
}

TEST(Properties, PrintParseRoundTrip) {
  Gen g(13);
  for (int i = 0; i < kCases; ++i) {
    Term t = g.term(3, 3);
    EXPECT_TRUE(equal(parse_term(to_string(t)), t)) << to_string(t);
    Substitution s = g.subst(g.below(3), g.below(4), 2);
    EXPECT_EQ(parse_substitution(to_string(s)), s) << to_string(s);
  }
}

// Soundness of mgu, plus generality: every unifier found by enumeration
// factors through it.
TEST(Properties, MguIsMostGeneral) {
  Gen g(14);
  const Signature& sig = natlist().signature;
  for (int i = 0; i < 30; ++i) {
    Atom a = g.atom(1 + g.below(2), 2);
    Atom b = g.below(2) ? g.atom(1, 1) : Atom(a.predicate(), {g.term(1, 1)}, 1);
    auto u = mgu(a, b);
    if (u) EXPECT_EQ(apply(a, u->sigma), apply(b, u->tau)) << to_string(a) << " ~ " << to_string(b);
    for (const auto& s : enumerate_substitutions(a.context(), sig, 1, 1)) {
      for (const auto& t : enumerate_substitutions(b.context(), sig, 2, 1)) {
        if (s.target() != t.target() || !(apply(a, s) == apply(b, t))) continue;
        ASSERT_TRUE(u) << to_string(a) << " and " << to_string(b) << " unify under " << to_string(s);
        auto rho = factor_through(u->sigma, s, sig);
        ASSERT_TRUE(rho) << to_string(s) << " does not factor through " << to_string(u->sigma);
      }
    }
  }
}

TEST(Properties, FactorThroughIsExact) {
  Gen g(15);
  const Signature& sig = natlist().signature;
  for (int i = 0; i < kCases; ++i) {
    int n = 1 + g.below(2), m = g.below(3), k = g.below(3);
    Substitution tau = g.subst(n, m, 2), rho = g.subst(m, k, 1);
    Substitution theta = compose(tau, rho);
    auto found = factor_through(tau, theta, sig);
    ASSERT_TRUE(found);
    EXPECT_EQ(compose(tau, *found), theta);
    Substitution other = g.subst(n, k, 2);
    auto f2 = factor_through(tau, other, sig);
    if (f2) EXPECT_EQ(compose(tau, *f2), other);
  }
}

// The saturated step is natural where term matching is not: the entry at
// compose(s, t) of A equals the entry at t of A s.
TEST(Properties, SaturatedStepIsNatural) {
  Gen g(16);
  const Bounds b{1, 2};
  auto engine = std::make_shared<StepEngine>(natlist(), b);
  for (int i = 0; i < 100; ++i) {
    int n = 1 + g.below(2);
    Atom a = g.atom(n, 1);
    Substitution s = g.subst(n, g.below(3), 1), t = g.subst(s.target(), g.below(3), 0);
    Substitution st = compose(s, t);
    if (!within_bounds(st, b.depth, b.max_target)) continue;
    const auto* lhs = engine->saturated_step(a, st);
    auto rhs = term_matching_step(natlist(), apply(apply(a, s), t), b);
    if (rhs.empty()) {
      EXPECT_EQ(lhs, nullptr);
    } else {
      ASSERT_NE(lhs, nullptr);
      EXPECT_EQ(*lhs, rhs);
    }
  }
}

TEST(Properties, ComputedAnswersAreCorrect) {
  Gen g(17);
  for (int i = 0; i < 30; ++i) {
    Goal goal({g.atom(2, 1)}, 2);
    for (const auto& d : sld_derive(natlist(), goal, 5)) {
      if (d.status != DerivationStatus::Success) continue;
      Goal inst = apply(goal, *d.computed_answer);
      // The instance under a computed answer refutes again.
      EXPECT_FALSE(computed_answers(natlist(), inst, 5).empty()) << to_string(inst);
    }
  }
}

TEST(Properties, JsonRoundTripOnRandomTrees) {
  Gen g(18);
  for (int i = 0; i < 20; ++i) {
    Atom a = g.atom(1 + g.below(2), 1);
    AtomTree t = build_saturated_avtree(natlist(), a, 2 * g.below(2), Bounds{1, 1});
    PlainNode p = to_plain(t);
    EXPECT_EQ(import_json(render_json(p)), p) << to_string(a);
  }
}

TEST(Properties, DesaturationOnRandomAtoms) {
  Gen g(19);
  const Bounds b{1, 2};
  auto sat = std::make_shared<StepEngine>(natlist(), b);
  auto coind = std::make_shared<StepEngine>(natlist(), b);
  for (int i = 0; i < 40; ++i) {
    Atom a = g.atom(g.below(3), 2);
    auto diff = tree_difference(desaturate(build_saturated_avtree(sat, a, 4)), build_coinductive_tree(coind, a, 4));
    EXPECT_FALSE(diff) << to_string(a) << ": " << diff.value_or("");
  }
}

}  // namespace
