#include "lpsem/unify.hpp"

#include <map>

namespace lpsem {

namespace {

// Triangular bindings over a shared variable space 1..size.
class Bindings {
 public:
  explicit Bindings(int size) : slots_(size) {}

  Term deref(Term t) const {
    while (t->is_var() && slots_[t->var() - 1]) t = slots_[t->var() - 1];
    return t;
  }

  bool occurs(int v, const Term& t) const {
    Term d = deref(t);
    if (d->is_var()) return d->var() == v;
    for (const auto& a : d->args())
      if (occurs(v, a)) return true;
    return false;
  }

  bool unify(const Term& a, const Term& b) {
    Term x = deref(a), y = deref(b);
    if (x->is_var() && y->is_var() && x->var() == y->var()) return true;
    if (x->is_var()) return bind(x->var(), y);
    if (y->is_var()) return bind(y->var(), x);
    if (!(x->symbol() == y->symbol()) || x->args().size() != y->args().size()) return false;
    for (std::size_t i = 0; i < x->args().size(); ++i)
      if (!unify(x->args()[i], y->args()[i])) return false;
    return true;
  }

  // Fully dereferenced image; free variables pass through `rename`.
  Term resolve(const Term& t, std::map<int, int>& rename) const {
    Term d = deref(t);
    if (d->is_var()) {
      auto [it, fresh] = rename.emplace(d->var(), static_cast<int>(rename.size()) + 1);
      (void)fresh;
      return make_var(it->second);
    }
    if (d->max_var() == 0) return d;
    std::vector<Term> args;
    args.reserve(d->args().size());
    for (const auto& x : d->args()) args.push_back(resolve(x, rename));
    return make_app(d->symbol(), std::move(args));
  }

 private:
  bool bind(int v, const Term& t) {
    if (occurs(v, t)) return false;
    slots_[v - 1] = t;
    return true;
  }
  std::vector<Term> slots_;
};

}  // namespace

std::optional<UnifierPair> mgu(const Atom& a1, const Atom& a2) {
  if (!(a1.predicate() == a2.predicate()) || a1.args().size() != a2.args().size())
    return std::nullopt;
  int n1 = a1.context(), n2 = a2.context();
  Bindings b(n1 + n2);
  for (std::size_t i = 0; i < a1.args().size(); ++i)
    if (!b.unify(a1.args()[i], shift_vars(a2.args()[i], n1))) return std::nullopt;
  std::map<int, int> rename;
  std::vector<Term> sigma, tau;
  sigma.reserve(n1);
  tau.reserve(n2);
  for (int i = 1; i <= n1; ++i) sigma.push_back(b.resolve(make_var(i), rename));
  for (int i = 1; i <= n2; ++i) tau.push_back(b.resolve(make_var(n1 + i), rename));
  int m = static_cast<int>(rename.size());
  return UnifierPair{Substitution(std::move(sigma), m), Substitution(std::move(tau), m)};
}

bool match_term(const Term& pattern, const Term& target, std::vector<Term>& binding) {
  if (pattern->is_var()) {
    Term& slot = binding[pattern->var() - 1];
    if (!slot) {
      slot = target;
      return true;
    }
    return equal(slot, target);
  }
  if (target->is_var() || !(pattern->symbol() == target->symbol()) ||
      pattern->args().size() != target->args().size())
    return false;
  if (pattern->max_var() == 0) return equal(pattern, target);
  for (std::size_t i = 0; i < pattern->args().size(); ++i)
    if (!match_term(pattern->args()[i], target->args()[i], binding)) return false;
  return true;
}

bool match_atom(const Atom& target, const Atom& pattern, std::vector<Term>& binding) {
  if (!(target.predicate() == pattern.predicate()) ||
      target.args().size() != pattern.args().size())
    return false;
  for (std::size_t i = 0; i < target.args().size(); ++i)
    if (!match_term(pattern.args()[i], target.args()[i], binding)) return false;
  return true;
}

std::optional<Substitution> term_match(const Atom& a, const Atom& h) {
  std::vector<Term> binding(h.context());
  if (!match_atom(a, h, binding)) return std::nullopt;
  for (auto& t : binding) {
    if (t) continue;
    if (a.context() == 0)
      throw ContextError("term_match: a variable of " + to_string(h) +
                         " does not occur and At(0) offers no default term");
    t = make_var(1);
  }
  return Substitution(std::move(binding), a.context());
}

std::vector<Matcher> clause_step_matchers(const Atom& a, const Clause& c, const Signature& sig,
                                          const Bounds& bounds) {
  std::vector<Matcher> out;
  std::vector<Term> binding(c.context);
  if (!match_atom(a, c.head, binding)) return out;
  std::vector<int> open;
  for (int i = 0; i < c.context; ++i)
    if (!binding[i]) open.push_back(i);
  auto emit = [&](const std::vector<Term>& images) {
    Substitution tau(images, a.context());
    std::vector<Atom> body;
    body.reserve(c.body.size());
    for (const auto& b : c.body) body.push_back(apply(b, tau));
    out.push_back({std::move(tau), Goal(std::move(body), a.context())});
  };
  if (open.empty()) {
    emit(binding);
    return out;
  }
  std::vector<Term> pool = terms_up_to_depth(sig, a.context(), bounds.depth);
  if (pool.empty()) return out;
  std::vector<std::size_t> idx(open.size(), 0);
  while (true) {
    for (std::size_t k = 0; k < open.size(); ++k) binding[open[k]] = pool[idx[k]];
    emit(binding);
    int k = static_cast<int>(open.size()) - 1;
    while (k >= 0 && ++idx[k] == pool.size()) idx[k--] = 0;
    if (k < 0) break;
  }
  return out;
}

std::vector<StepUnifier> clause_step_unifiers(const Atom& a, const Clause& c,
                                              const Signature& sig, const Bounds& bounds) {
  std::vector<StepUnifier> out;
  for_each_substitution(a.context(), sig, bounds.depth, bounds.max_target,
                        [&](const Substitution& sigma) {
                          for (auto& m : clause_step_matchers(apply(a, sigma), c, sig, bounds))
                            out.push_back({sigma, std::move(m.tau), std::move(m.body)});
                        });
  return out;
}

}  // namespace lpsem
