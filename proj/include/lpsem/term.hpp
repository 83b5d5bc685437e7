#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lpsem {

/// Raised when an operation receives values living in incompatible
/// variable contexts (e.g. composing n->m with k->l, k != m).
class ContextError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Signature {
  std::map<std::string, int> functions;
  std::map<std::string, int> predicates;

  bool operator==(const Signature&) const = default;
};

/// Interned function/predicate symbol. Equality is identity of the id;
/// ordering goes through the name.
class Symbol {
 public:
  Symbol() = default;
  explicit Symbol(std::string_view name);
  const std::string& name() const { return *name_; }
  std::size_t id() const { return reinterpret_cast<std::size_t>(name_); }
  bool operator==(const Symbol& o) const { return name_ == o.name_; }

 private:
  const std::string* name_ = &empty_name();
  static const std::string& empty_name();
};

int compare(Symbol a, Symbol b);

class TermNode;
using Term = std::shared_ptr<const TermNode>;

class TermNode {
 public:
  bool is_var() const { return var_ > 0; }
  int var() const { return var_; }
  Symbol symbol() const { return sym_; }
  const std::vector<Term>& args() const { return args_; }
  /// Variables and constants have depth 0; f(t1..tk) has 1 + max depth(ti).
  int depth() const { return depth_; }
  /// Largest variable index occurring, 0 if ground.
  int max_var() const { return max_var_; }
  std::size_t hash() const { return hash_; }

  TermNode(int var, Symbol sym, std::vector<Term> args);

 private:
  int var_;
  Symbol sym_;
  std::vector<Term> args_;
  int depth_ = 0;
  int max_var_ = 0;
  std::size_t hash_ = 0;
};

Term make_var(int index);
Term make_app(Symbol sym, std::vector<Term> args = {});
Term make_app(std::string_view sym, std::vector<Term> args = {});

int compare(const Term& a, const Term& b);
bool equal(const Term& a, const Term& b);
int compare_terms(const std::vector<Term>& a, const std::vector<Term>& b);
bool equal_terms(const std::vector<Term>& a, const std::vector<Term>& b);
std::string to_string(const Term& t);

/// Replaces x_j by images[j-1]. Throws ContextError if a variable has no image.
Term substitute(const Term& t, const std::vector<Term>& images);

/// Adds `offset` to every variable index.
Term shift_vars(const Term& t, int offset);

/// Largest variable index among the terms (0 if all ground).
int canonical_target(const std::vector<Term>& terms);

class Atom {
 public:
  Atom() = default;
  /// Throws ContextError if a variable index exceeds `context`.
  Atom(Symbol predicate, std::vector<Term> args, int context);
  Atom(std::string_view predicate, std::vector<Term> args, int context);

  Symbol predicate() const { return pred_; }
  const std::vector<Term>& args() const { return args_; }
  int context() const { return context_; }
  int depth() const;
  int max_var() const;
  std::size_t hash() const;
  /// Same atom viewed in another context (must still cover its variables).
  Atom in_context(int n) const { return Atom(pred_, args_, n); }

 private:
  Symbol pred_;
  std::vector<Term> args_;
  int context_ = 0;
};

int compare(const Atom& a, const Atom& b);
bool operator==(const Atom& a, const Atom& b);
inline bool operator<(const Atom& a, const Atom& b) { return compare(a, b) < 0; }
std::string to_string(const Atom& a);

/// An arrow n -> m: an n-tuple of terms over x1..xm.
class Substitution {
 public:
  Substitution() = default;
  /// Explicit target. Throws ContextError if some term uses x_j with j > target.
  Substitution(std::vector<Term> terms, int target);
  /// Target normalized to the largest occurring index.
  static Substitution canonical(std::vector<Term> terms);
  static Substitution identity(int n);

  int source() const { return static_cast<int>(terms_.size()); }
  int target() const { return target_; }
  const std::vector<Term>& terms() const { return terms_; }
  const Term& operator[](std::size_t i) const { return terms_[i]; }
  bool is_identity() const;
  int depth() const;
  std::size_t hash() const;

 private:
  std::vector<Term> terms_;
  int target_ = 0;
};

int compare(const Substitution& a, const Substitution& b);
bool operator==(const Substitution& a, const Substitution& b);
inline bool operator<(const Substitution& a, const Substitution& b) {
  return compare(a, b) < 0;
}
/// "<t1,...,tn>:n->m"
std::string to_string(const Substitution& s);
/// Tree-label form: "id_n" for identities, "<t1,...,tn>" otherwise.
std::string label_string(const Substitution& s);

/// theta1 first, then theta2: result[i] = theta1[i] with x_j := theta2[j].
Substitution compose(const Substitution& theta1, const Substitution& theta2);
Atom apply(const Atom& a, const Substitution& theta);

/// All terms over x1..xm of depth <= d, in canonical order.
std::vector<Term> terms_up_to_depth(const Signature& sig, int m, int d);

/// Calls `fn` on every substitution n->m (m <= max_target) whose
/// components have depth <= max_depth, in canonical order.
void for_each_substitution(int n, const Signature& sig, int max_depth, int max_target,
                           const std::function<void(const Substitution&)>& fn);
std::vector<Substitution> enumerate_substitutions(int n, const Signature& sig,
                                                  int max_depth, int max_target);
/// Number of substitutions enumerate_substitutions would return.
std::uint64_t count_substitutions(int n, const Signature& sig, int max_depth, int max_target);

/// Membership in the (max_depth, max_target) enumeration window.
inline bool within_bounds(const Substitution& s, int max_depth, int max_target) {
  return s.target() <= max_target && s.depth() <= max_depth;
}

struct TermHash {
  std::size_t operator()(const Term& t) const { return t->hash(); }
};
struct TermEq {
  bool operator()(const Term& a, const Term& b) const { return equal(a, b); }
};
struct AtomHash {
  std::size_t operator()(const Atom& a) const { return a.hash(); }
};
struct SubstitutionHash {
  std::size_t operator()(const Substitution& s) const { return s.hash(); }
};

inline std::size_t hash_mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace lpsem
