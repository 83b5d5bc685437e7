#pragma once

#include <optional>
#include <vector>

#include "lpsem/program.hpp"
#include "lpsem/term.hpp"

namespace lpsem {

/// Enumeration window for substitutions: component depth <= depth,
/// target <= max_target.
struct Bounds {
  int depth = 1;
  int max_target = 2;
  bool operator==(const Bounds&) const = default;
};

/// (sigma, tau) with A1 sigma = A2 tau.
struct UnifierPair {
  Substitution sigma;
  Substitution tau;
};

/// Most general unifier of A1 in At(n1) and A2 in At(n2). The two atoms are
/// read over disjoint variable sets (A2's variables are renamed apart
/// internally). Target variables are numbered by first occurrence in
/// sigma's components, then tau's. Occurs check is on.
std::optional<UnifierPair> mgu(const Atom& a1, const Atom& a2);

/// tau : k -> n with H tau = A, where H is in At(k) and A in At(n).
/// Variables of At(k) that do not occur in H are sent to x1; if n = 0 and
/// such a variable exists, ContextError is thrown (no term to pick).
std::optional<Substitution> term_match(const Atom& a, const Atom& h);

/// Low-level matcher: extends `binding` (indexed by pattern variable - 1,
/// null = unbound) so that pattern instantiates to target.
bool match_term(const Term& pattern, const Term& target, std::vector<Term>& binding);
bool match_atom(const Atom& target, const Atom& pattern, std::vector<Term>& binding);

struct Matcher {
  Substitution tau;  // clause context -> A's context
  Goal body;         // clause body under tau, in A's context
};

/// Term-matchers of A against the head of C, with body-only variables
/// enumerated over terms of depth <= bounds.depth in A's context.
std::vector<Matcher> clause_step_matchers(const Atom& a, const Clause& c, const Signature& sig,
                                          const Bounds& bounds);

struct StepUnifier {
  Substitution sigma;  // A's context -> m
  Substitution tau;    // clause context -> m
  Goal body;           // in context m
};

/// All (sigma, tau) with sigma enumerated within bounds and tau a
/// term-matcher of A sigma against the head of C.
std::vector<StepUnifier> clause_step_unifiers(const Atom& a, const Clause& c,
                                              const Signature& sig, const Bounds& bounds);

}  // namespace lpsem
