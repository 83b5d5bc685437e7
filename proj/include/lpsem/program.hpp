#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lpsem/term.hpp"

namespace lpsem {

/// An ordered list of atoms sharing one context.
class Goal {
 public:
  Goal() = default;
  /// Throws ContextError if some atom lives in another context.
  Goal(std::vector<Atom> atoms, int context);

  const std::vector<Atom>& atoms() const { return atoms_; }
  int context() const { return context_; }
  bool empty() const { return atoms_.empty(); }
  std::size_t size() const { return atoms_.size(); }
  std::size_t hash() const;

 private:
  std::vector<Atom> atoms_;
  int context_ = 0;
};

int compare(const Goal& a, const Goal& b);
bool operator==(const Goal& a, const Goal& b);
inline bool operator<(const Goal& a, const Goal& b) { return compare(a, b) < 0; }
/// "[A1,...,Ak]"
std::string to_string(const Goal& g);
Goal apply(const Goal& g, const Substitution& theta);
/// l1 ++ l2; both goals must share a context.
Goal concat(const Goal& a, const Goal& b);

struct GoalHash {
  std::size_t operator()(const Goal& g) const { return g.hash(); }
};

/// H <= B1,...,Bk over variables x1..x_context.
struct Clause {
  Atom head;
  std::vector<Atom> body;
  int context = 0;

  /// Indices of variables occurring in the body but not in the head.
  std::vector<int> local_vars() const;
  bool operator==(const Clause& o) const { return head == o.head && body == o.body && context == o.context; }
};

std::string to_string(const Clause& c);

struct Program {
  Signature signature;
  std::vector<Clause> clauses;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, const std::string& msg);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// Edinburgh-style clauses `h(t) :- b1(t), b2(t).` with `%` comments.
/// Upper-case identifiers and x1, x2, ... are variables, renumbered per
/// clause by first occurrence. The signature is inferred from use; optional
/// `:- functions f/2, c/0.` and `:- predicates p/1.` directives declare
/// symbols up front.
Program parse_program(std::string_view text);

/// Comma-separated atoms, optionally wrapped in [...]. Explicit xN keep
/// their index; named variables are numbered after the largest explicit
/// one. Context is `declared_context` when given, else the largest index.
Goal parse_goal(std::string_view text, std::optional<int> declared_context = std::nullopt);

Term parse_term(std::string_view text);
/// Parses "<t1,...,tn>:n->m", "<t1,...,tn>" (canonical target) or "id_n".
Substitution parse_substitution(std::string_view text);

/// Checks the goal's symbols against the program signature (arity clashes).
void check_goal(const Program& p, const Goal& g);

/// Re-printable source text: parse_program(pretty_print(P)) reproduces P.
std::string pretty_print(const Program& p);

/// Renames the clause variables, in first-occurrence order, to
/// x_{base+1}, x_{base+2}, ...; the result lives in context base + #vars.
Clause standardize_apart(const Clause& c, int base);
/// Adds `offset` to every variable index and to the context.
Atom shift_atom(const Atom& a, int offset);

bool is_ground(const Program& p);
bool is_ground(const Atom& a);

}  // namespace lpsem
