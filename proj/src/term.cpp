#include "lpsem/term.hpp"

#include <algorithm>
#include <mutex>
#include <unordered_set>

namespace lpsem {

namespace {

struct SymbolTable {
  std::mutex mu;
  std::unordered_set<std::string> names;  // node-based: element addresses are stable
};

SymbolTable& symbols() {
  static SymbolTable table;
  return table;
}

}  // namespace

Symbol::Symbol(std::string_view name) {
  if (name.empty()) return;
  auto& t = symbols();
  std::lock_guard lock(t.mu);
  name_ = &*t.names.emplace(name).first;
}

const std::string& Symbol::empty_name() {
  static const std::string empty;
  return empty;
}

int compare(Symbol a, Symbol b) {
  if (a == b) return 0;
  int c = a.name().compare(b.name());
  return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

TermNode::TermNode(int var, Symbol sym, std::vector<Term> args)
    : var_(var), sym_(sym), args_(std::move(args)) {
  if (var_ > 0) {
    max_var_ = var_;
    hash_ = hash_mix(0x51ed27, static_cast<std::size_t>(var_));
    return;
  }
  hash_ = hash_mix(0x2545f491, sym_.id());
  for (const auto& a : args_) {
    depth_ = std::max(depth_, a->depth() + 1);
    max_var_ = std::max(max_var_, a->max_var());
    hash_ = hash_mix(hash_, a->hash());
  }
}

Term make_var(int index) {
  if (index < 1) throw std::invalid_argument("variable index must be positive");
  return std::make_shared<const TermNode>(index, Symbol(), std::vector<Term>{});
}

Term make_app(Symbol sym, std::vector<Term> args) {
  return std::make_shared<const TermNode>(0, sym, std::move(args));
}

Term make_app(std::string_view sym, std::vector<Term> args) {
  return make_app(Symbol(sym), std::move(args));
}

// Applications sort before variables; applications by name, arity, then
// arguments; variables by index.
int compare(const Term& a, const Term& b) {
  if (a.get() == b.get()) return 0;
  if (a->is_var() != b->is_var()) return a->is_var() ? 1 : -1;
  if (a->is_var()) return a->var() < b->var() ? -1 : (a->var() > b->var() ? 1 : 0);
  if (int c = compare(a->symbol(), b->symbol())) return c;
  if (a->args().size() != b->args().size())
    return a->args().size() < b->args().size() ? -1 : 1;
  return compare_terms(a->args(), b->args());
}

bool equal(const Term& a, const Term& b) {
  if (a.get() == b.get()) return true;
  if (a->hash() != b->hash() || a->var() != b->var() || !(a->symbol() == b->symbol()))
    return false;
  return equal_terms(a->args(), b->args());
}

int compare_terms(const std::vector<Term>& a, const std::vector<Term>& b) {
  std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i)
    if (int c = compare(a[i], b[i])) return c;
  if (a.size() == b.size()) return 0;
  return a.size() < b.size() ? -1 : 1;
}

bool equal_terms(const std::vector<Term>& a, const std::vector<Term>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!equal(a[i], b[i])) return false;
  return true;
}

std::string to_string(const Term& t) {
  if (t->is_var()) return "x" + std::to_string(t->var());
  std::string out = t->symbol().name();
  if (t->args().empty()) return out;
  out += '(';
  for (std::size_t i = 0; i < t->args().size(); ++i) {
    if (i) out += ',';
    out += to_string(t->args()[i]);
  }
  out += ')';
  return out;
}

Term substitute(const Term& t, const std::vector<Term>& images) {
  if (t->max_var() == 0) return t;
  if (t->is_var()) {
    if (t->var() > static_cast<int>(images.size()))
      throw ContextError("variable x" + std::to_string(t->var()) + " has no image");
    return images[t->var() - 1];
  }
  std::vector<Term> args;
  args.reserve(t->args().size());
  for (const auto& a : t->args()) args.push_back(substitute(a, images));
  return make_app(t->symbol(), std::move(args));
}

Term shift_vars(const Term& t, int offset) {
  if (t->max_var() == 0 || offset == 0) return t;
  if (t->is_var()) return make_var(t->var() + offset);
  std::vector<Term> args;
  args.reserve(t->args().size());
  for (const auto& a : t->args()) args.push_back(shift_vars(a, offset));
  return make_app(t->symbol(), std::move(args));
}

int canonical_target(const std::vector<Term>& terms) {
  int m = 0;
  for (const auto& t : terms) m = std::max(m, t->max_var());
  return m;
}

Atom::Atom(Symbol predicate, std::vector<Term> args, int context)
    : pred_(predicate), args_(std::move(args)), context_(context) {
  if (context_ < 0) throw ContextError("negative context");
  if (canonical_target(args_) > context_)
    throw ContextError("atom " + to_string(*this) + " uses a variable outside At(" +
                       std::to_string(context_) + ")");
}

Atom::Atom(std::string_view predicate, std::vector<Term> args, int context)
    : Atom(Symbol(predicate), std::move(args), context) {}

int Atom::depth() const {
  int d = 0;
  for (const auto& t : args_) d = std::max(d, t->depth());
  return d;
}

int Atom::max_var() const { return canonical_target(args_); }

std::size_t Atom::hash() const {
  std::size_t h = hash_mix(pred_.id(), static_cast<std::size_t>(context_));
  for (const auto& t : args_) h = hash_mix(h, t->hash());
  return h;
}

int compare(const Atom& a, const Atom& b) {
  if (int c = compare(a.predicate(), b.predicate())) return c;
  if (int c = compare_terms(a.args(), b.args())) return c;
  return a.context() < b.context() ? -1 : (a.context() > b.context() ? 1 : 0);
}

bool operator==(const Atom& a, const Atom& b) {
  return a.predicate() == b.predicate() && a.context() == b.context() &&
         equal_terms(a.args(), b.args());
}

std::string to_string(const Atom& a) {
  std::string out = a.predicate().name();
  if (a.args().empty()) return out;
  out += '(';
  for (std::size_t i = 0; i < a.args().size(); ++i) {
    if (i) out += ',';
    out += to_string(a.args()[i]);
  }
  out += ')';
  return out;
}

Substitution::Substitution(std::vector<Term> terms, int target)
    : terms_(std::move(terms)), target_(target) {
  if (target_ < 0) throw ContextError("negative substitution target");
  if (canonical_target(terms_) > target_)
    throw ContextError("substitution term uses a variable beyond its target " +
                       std::to_string(target_));
}

Substitution Substitution::canonical(std::vector<Term> terms) {
  int m = canonical_target(terms);
  return Substitution(std::move(terms), m);
}

Substitution Substitution::identity(int n) {
  std::vector<Term> terms;
  terms.reserve(n);
  for (int i = 1; i <= n; ++i) terms.push_back(make_var(i));
  return Substitution(std::move(terms), n);
}

bool Substitution::is_identity() const {
  if (target_ != source()) return false;
  for (int i = 0; i < source(); ++i)
    if (!terms_[i]->is_var() || terms_[i]->var() != i + 1) return false;
  return true;
}

int Substitution::depth() const {
  int d = 0;
  for (const auto& t : terms_) d = std::max(d, t->depth());
  return d;
}

std::size_t Substitution::hash() const {
  std::size_t h = hash_mix(terms_.size(), static_cast<std::size_t>(target_));
  for (const auto& t : terms_) h = hash_mix(h, t->hash());
  return h;
}

int compare(const Substitution& a, const Substitution& b) {
  if (a.target() != b.target()) return a.target() < b.target() ? -1 : 1;
  if (a.source() != b.source()) return a.source() < b.source() ? -1 : 1;
  return compare_terms(a.terms(), b.terms());
}

bool operator==(const Substitution& a, const Substitution& b) {
  return a.target() == b.target() && equal_terms(a.terms(), b.terms());
}

std::string to_string(const Substitution& s) {
  std::string out = "<";
  for (int i = 0; i < s.source(); ++i) {
    if (i) out += ',';
    out += to_string(s[i]);
  }
  out += ">:" + std::to_string(s.source()) + "->" + std::to_string(s.target());
  return out;
}

std::string label_string(const Substitution& s) {
  if (s.is_identity()) return "id_" + std::to_string(s.source());
  std::string out = "<";
  for (int i = 0; i < s.source(); ++i) {
    if (i) out += ',';
    out += to_string(s[i]);
  }
  return out + ">";
}

Substitution compose(const Substitution& theta1, const Substitution& theta2) {
  if (theta1.target() != theta2.source())
    throw ContextError("cannot compose " + to_string(theta1) + " with " +
                       to_string(theta2));
  std::vector<Term> terms;
  terms.reserve(theta1.source());
  for (const auto& t : theta1.terms()) terms.push_back(substitute(t, theta2.terms()));
  return Substitution(std::move(terms), theta2.target());
}

Atom apply(const Atom& a, const Substitution& theta) {
  if (a.context() != theta.source())
    throw ContextError("cannot apply " + to_string(theta) + " to an atom of At(" +
                       std::to_string(a.context()) + ")");
  std::vector<Term> args;
  args.reserve(a.args().size());
  for (const auto& t : a.args()) args.push_back(substitute(t, theta.terms()));
  return Atom(a.predicate(), std::move(args), theta.target());
}

std::vector<Term> terms_up_to_depth(const Signature& sig, int m, int d) {
  std::vector<Term> layer;
  for (const auto& [name, arity] : sig.functions)
    if (arity == 0) layer.push_back(make_app(name));
  for (int i = 1; i <= m; ++i) layer.push_back(make_var(i));
  std::vector<Term> all = layer;
  for (int level = 1; level <= d; ++level) {
    std::vector<Term> next;
    for (const auto& [name, arity] : sig.functions) {
      if (arity == 0) continue;
      Symbol sym(name);
      // every argument tuple over `all`, at least one argument of depth level-1
      std::vector<std::size_t> idx(arity, 0);
      while (true) {
        bool fresh = false;
        std::vector<Term> args;
        args.reserve(arity);
        for (int k = 0; k < arity; ++k) {
          args.push_back(all[idx[k]]);
          if (all[idx[k]]->depth() == level - 1) fresh = true;
        }
        if (fresh) next.push_back(make_app(sym, std::move(args)));
        int k = arity - 1;
        while (k >= 0 && ++idx[k] == all.size()) idx[k--] = 0;
        if (k < 0) break;
      }
    }
    all.insert(all.end(), next.begin(), next.end());
  }
  std::sort(all.begin(), all.end(),
            [](const Term& a, const Term& b) { return compare(a, b) < 0; });
  return all;
}

void for_each_substitution(int n, const Signature& sig, int max_depth, int max_target,
                           const std::function<void(const Substitution&)>& fn) {
  if (n < 0 || max_depth < 0 || max_target < 0)
    throw std::invalid_argument("enumeration bounds must be non-negative");
  for (int m = 0; m <= max_target; ++m) {
    std::vector<Term> pool = terms_up_to_depth(sig, m, max_depth);
    if (n == 0) {
      fn(Substitution({}, m));
      continue;
    }
    if (pool.empty()) continue;
    std::vector<std::size_t> idx(n, 0);
    std::vector<Term> terms(n);
    while (true) {
      for (int k = 0; k < n; ++k) terms[k] = pool[idx[k]];
      fn(Substitution(terms, m));
      int k = n - 1;
      while (k >= 0 && ++idx[k] == pool.size()) idx[k--] = 0;
      if (k < 0) break;
    }
  }
}

std::vector<Substitution> enumerate_substitutions(int n, const Signature& sig,
                                                  int max_depth, int max_target) {
  std::vector<Substitution> out;
  for_each_substitution(n, sig, max_depth, max_target,
                        [&](const Substitution& s) { out.push_back(s); });
  return out;
}

std::uint64_t count_substitutions(int n, const Signature& sig, int max_depth,
                                  int max_target) {
  std::uint64_t total = 0;
  for (int m = 0; m <= max_target; ++m) {
    std::uint64_t k = terms_up_to_depth(sig, m, max_depth).size();
    std::uint64_t p = 1;
    for (int i = 0; i < n; ++i) p *= k;
    total += p;
  }
  return total;
}

}  // namespace lpsem
