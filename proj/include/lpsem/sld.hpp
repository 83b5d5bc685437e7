#pragma once

#include <optional>
#include <vector>

#include "lpsem/program.hpp"
#include "lpsem/term.hpp"
#include "lpsem/unify.hpp"

namespace lpsem {

enum class DerivationStatus { Success, Failure, DepthExhausted };

const char* to_string(DerivationStatus s);

struct SldStep {
  int atom_index;      // selected atom in the goal before the step
  int clause_index;    // clause of the program
  Substitution sigma;  // goal side of the mgu
  Substitution tau;    // clause side of the mgu
  Goal goal;           // resulting goal
};

struct Derivation {
  Goal start;
  std::vector<SldStep> steps;
  DerivationStatus status = DerivationStatus::Failure;
  /// Set for successes: sigma_0, then sigma_1, ... composed in order.
  std::optional<Substitution> computed_answer;
};

/// Breadth-first SLD search with leftmost selection. Every leaf of the
/// SLD-tree within `max_steps` resolution steps becomes one derivation;
/// branches cut by the bound are DepthExhausted.
std::vector<Derivation> sld_derive(const Program& p, const Goal& g, int max_steps);

/// Distinct computed answers of successful derivations, sorted.
std::vector<Substitution> computed_answers(const Program& p, const Goal& g, int max_steps);

/// rho with compose(tau, rho) == theta, if one exists. Variables of tau's
/// target that do not occur in tau are sent to x1 (or to a constant of `sig`
/// when theta's target is 0).
std::optional<Substitution> factor_through(const Substitution& tau, const Substitution& theta,
                                           const Signature& sig);

/// True iff theta factors through the computed answer of some successful
/// derivation within `max_steps`. Throws ContextError if theta's source is
/// not the goal's context.
bool is_correct_answer(const Program& p, const Goal& g, const Substitution& theta, int max_steps);

/// All theta in the enumeration window of the goal's context that are
/// correct answers within `max_steps`, sorted.
std::vector<Substitution> bounded_correct_answers(const Program& p, const Goal& g,
                                                  const Bounds& bounds, int max_steps);

}  // namespace lpsem
