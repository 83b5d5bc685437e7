#include "lpsem/sld.hpp"

#include <algorithm>
#include <memory>

namespace lpsem {

const char* to_string(DerivationStatus s) {
  switch (s) {
    case DerivationStatus::Success: return "success";
    case DerivationStatus::Failure: return "failure";
    case DerivationStatus::DepthExhausted: return "depth-exhausted";
  }
  return "?";
}

namespace {

// Search nodes share their prefix through parent links.
struct Partial {
  std::shared_ptr<const Partial> parent;
  std::optional<SldStep> step;
  Goal goal;
  Substitution answer;
  int length = 0;
};
using PartialPtr = std::shared_ptr<const Partial>;

Derivation finish(const Goal& start, const PartialPtr& leaf, DerivationStatus status) {
  Derivation d;
  d.start = start;
  d.status = status;
  for (const Partial* p = leaf.get(); p && p->step; p = p->parent.get()) d.steps.push_back(*p->step);
  std::reverse(d.steps.begin(), d.steps.end());
  if (status == DerivationStatus::Success) d.computed_answer = leaf->answer;
  return d;
}

}  // namespace

std::vector<Derivation> sld_derive(const Program& p, const Goal& g, int max_steps) {
  std::vector<Derivation> out;
  std::vector<PartialPtr> layer{std::make_shared<Partial>(
      Partial{nullptr, std::nullopt, g, Substitution::identity(g.context()), 0})};
  while (!layer.empty()) {
    std::vector<PartialPtr> next;
    for (const auto& node : layer) {
      if (node->goal.empty()) {
        out.push_back(finish(g, node, DerivationStatus::Success));
        continue;
      }
      if (node->length >= max_steps) {
        out.push_back(finish(g, node, DerivationStatus::DepthExhausted));
        continue;
      }
      const Atom& selected = node->goal.atoms().front();
      bool any = false;
      for (std::size_t ci = 0; ci < p.clauses.size(); ++ci) {
        const Clause& c = p.clauses[ci];
        auto u = mgu(selected, c.head);
        if (!u) continue;
        any = true;
        std::vector<Atom> atoms;
        for (const auto& b : c.body) atoms.push_back(apply(b, u->tau));
        for (std::size_t i = 1; i < node->goal.size(); ++i)
          atoms.push_back(apply(node->goal.atoms()[i], u->sigma));
        Goal resolvent(std::move(atoms), u->sigma.target());
        SldStep step{0, static_cast<int>(ci), u->sigma, u->tau, resolvent};
        next.push_back(std::make_shared<Partial>(Partial{node, std::move(step), resolvent,
                                                         compose(node->answer, u->sigma),
                                                         node->length + 1}));
      }
      if (!any) out.push_back(finish(g, node, DerivationStatus::Failure));
    }
    layer = std::move(next);
  }
  return out;
}

std::vector<Substitution> computed_answers(const Program& p, const Goal& g, int max_steps) {
  std::vector<Substitution> out;
  for (const auto& d : sld_derive(p, g, max_steps))
    if (d.computed_answer) out.push_back(*d.computed_answer);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::optional<Substitution> factor_through(const Substitution& tau, const Substitution& theta,
                                           const Signature& sig) {
  if (tau.source() != theta.source()) return std::nullopt;
  std::vector<Term> binding(tau.target());
  for (int i = 0; i < tau.source(); ++i)
    if (!match_term(tau[i], theta[i], binding)) return std::nullopt;
  Term filler;
  if (theta.target() > 0) {
    filler = make_var(1);
  } else {
    for (const auto& [name, arity] : sig.functions)
      if (arity == 0) {
        filler = make_app(name);
        break;
      }
  }
  for (auto& t : binding) {
    if (t) continue;
    if (!filler) return std::nullopt;
    t = filler;
  }
  return Substitution(std::move(binding), theta.target());
}

bool is_correct_answer(const Program& p, const Goal& g, const Substitution& theta, int max_steps) {
  if (theta.source() != g.context())
    throw ContextError("answer " + to_string(theta) + " does not start at the goal context " +
                       std::to_string(g.context()));
  for (const auto& tau : computed_answers(p, g, max_steps))
    if (factor_through(tau, theta, p.signature)) return true;
  return false;
}

std::vector<Substitution> bounded_correct_answers(const Program& p, const Goal& g,
                                                  const Bounds& bounds, int max_steps) {
  auto answers = computed_answers(p, g, max_steps);
  std::vector<Substitution> out;
  for_each_substitution(g.context(), p.signature, bounds.depth, bounds.max_target,
                        [&](const Substitution& theta) {
                          for (const auto& tau : answers)
                            if (factor_through(tau, theta, p.signature)) {
                              out.push_back(theta);
                              return;
                            }
                        });
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace lpsem
