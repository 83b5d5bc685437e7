#include "lpsem/program.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

namespace lpsem {

Goal::Goal(std::vector<Atom> atoms, int context) : atoms_(std::move(atoms)), context_(context) {
  if (context_ < 0) throw ContextError("negative goal context");
  for (const auto& a : atoms_)
    if (a.context() != context_)
      throw ContextError("goal atom " + to_string(a) + " lives in At(" +
                         std::to_string(a.context()) + "), goal context is " +
                         std::to_string(context_));
}

std::size_t Goal::hash() const {
  std::size_t h = hash_mix(0x60a1, static_cast<std::size_t>(context_));
  for (const auto& a : atoms_) h = hash_mix(h, a.hash());
  return h;
}

int compare(const Goal& a, const Goal& b) {
  if (a.context() != b.context()) return a.context() < b.context() ? -1 : 1;
  std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i)
    if (int c = compare(a.atoms()[i], b.atoms()[i])) return c;
  if (a.size() == b.size()) return 0;
  return a.size() < b.size() ? -1 : 1;
}

bool operator==(const Goal& a, const Goal& b) {
  return a.context() == b.context() && a.atoms() == b.atoms();
}

std::string to_string(const Goal& g) {
  std::string out = "[";
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (i) out += ',';
    out += to_string(g.atoms()[i]);
  }
  return out + "]";
}

Goal apply(const Goal& g, const Substitution& theta) {
  if (g.context() != theta.source())
    throw ContextError("cannot apply " + to_string(theta) + " to a goal of context " +
                       std::to_string(g.context()));
  std::vector<Atom> atoms;
  atoms.reserve(g.size());
  for (const auto& a : g.atoms()) atoms.push_back(apply(a, theta));
  return Goal(std::move(atoms), theta.target());
}

Goal concat(const Goal& a, const Goal& b) {
  if (a.context() != b.context())
    throw ContextError("cannot concatenate goals of contexts " + std::to_string(a.context()) +
                       " and " + std::to_string(b.context()));
  std::vector<Atom> atoms = a.atoms();
  atoms.insert(atoms.end(), b.atoms().begin(), b.atoms().end());
  return Goal(std::move(atoms), a.context());
}

namespace {

void collect_vars(const Term& t, std::set<int>& out) {
  if (t->is_var()) {
    out.insert(t->var());
    return;
  }
  for (const auto& a : t->args()) collect_vars(a, out);
}

void collect_vars(const Atom& a, std::set<int>& out) {
  for (const auto& t : a.args()) collect_vars(t, out);
}

void first_occurrence(const Term& t, std::vector<int>& order, std::set<int>& seen) {
  if (t->is_var()) {
    if (seen.insert(t->var()).second) order.push_back(t->var());
    return;
  }
  for (const auto& a : t->args()) first_occurrence(a, order, seen);
}

}  // namespace

std::vector<int> Clause::local_vars() const {
  std::set<int> head_vars, body_vars;
  collect_vars(head, head_vars);
  for (const auto& b : body) collect_vars(b, body_vars);
  std::vector<int> out;
  std::set_difference(body_vars.begin(), body_vars.end(), head_vars.begin(), head_vars.end(),
                      std::back_inserter(out));
  return out;
}

std::string to_string(const Clause& c) {
  std::string out = to_string(c.head);
  if (!c.body.empty()) {
    out += " :- ";
    for (std::size_t i = 0; i < c.body.size(); ++i) {
      if (i) out += ", ";
      out += to_string(c.body[i]);
    }
  }
  return out + ".";
}

ParseError::ParseError(int line, int column, const std::string& msg)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                         ": " + msg),
      line_(line),
      column_(column) {}

namespace {

enum class Tok { Ident, Number, LParen, RParen, LBracket, RBracket, Comma, Dot, Neck, Query,
                 Slash, Lt, Gt, Colon, Arrow, End };

struct Token {
  Tok kind;
  std::string text;
  int line;
  int col;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      if (pos_ >= src_.size()) {
        out.push_back({Tok::End, "", line_, col_});
        return out;
      }
      int line = line_, col = col_;
      char c = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
          advance();
        out.push_back({Tok::Ident, std::string(src_.substr(start, pos_ - start)), line, col});
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c))) {
        std::size_t start = pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
          advance();
        out.push_back({Tok::Number, std::string(src_.substr(start, pos_ - start)), line, col});
        continue;
      }
      auto two = [&](char next) { return pos_ + 1 < src_.size() && src_[pos_ + 1] == next; };
      Tok kind;
      int len = 1;
      switch (c) {
        case '(': kind = Tok::LParen; break;
        case ')': kind = Tok::RParen; break;
        case '[': kind = Tok::LBracket; break;
        case ']': kind = Tok::RBracket; break;
        case ',': kind = Tok::Comma; break;
        case '.': kind = Tok::Dot; break;
        case '/': kind = Tok::Slash; break;
        case '<': kind = Tok::Lt; break;
        case '>': kind = Tok::Gt; break;
        case ':':
          if (two('-')) {
            kind = Tok::Neck;
            len = 2;
          } else {
            kind = Tok::Colon;
          }
          break;
        case '?':
          if (!two('-')) throw ParseError(line, col, "unexpected '?'");
          kind = Tok::Query;
          len = 2;
          break;
        case '-':
          if (!two('>')) throw ParseError(line, col, "unexpected '-'");
          kind = Tok::Arrow;
          len = 2;
          break;
        default:
          throw ParseError(line, col, std::string("unexpected character '") + c + "'");
      }
      std::string text(src_.substr(pos_, len));
      for (int i = 0; i < len; ++i) advance();
      out.push_back({kind, text, line, col});
    }
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '%') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

// Syntax tree before variables are numbered.
struct RawTerm {
  bool is_var = false;
  std::string name;
  std::vector<RawTerm> args;
  int line = 0;
  int col = 0;
};

struct RawAtom {
  std::string pred;
  std::vector<RawTerm> args;
  int line = 0;
  int col = 0;
};

int explicit_index(const std::string& s) {
  if (s.size() < 2 || s[0] != 'x') return 0;
  for (std::size_t i = 1; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return 0;
  if (s[1] == '0') return 0;
  return std::stoi(s.substr(1));
}

bool is_variable_name(const std::string& s) {
  if (s.empty()) return false;
  if (std::isupper(static_cast<unsigned char>(s[0])) || s[0] == '_') return true;
  return explicit_index(s) > 0;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(Lexer(src).run()) {}

  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  bool at(Tok k) const { return peek().kind == k; }
  const Token& next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }

  const Token& expect(Tok k, const char* what) {
    if (!at(k)) fail(std::string("expected ") + what);
    return next();
  }

  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    std::string got = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw ParseError(t.line, t.col, msg + ", got " + got);
  }

  RawTerm term() {
    const Token& t = expect(Tok::Ident, "a term");
    RawTerm out;
    out.name = t.text;
    out.line = t.line;
    out.col = t.col;
    if (at(Tok::LParen)) {
      next();
      out.args.push_back(term());
      while (at(Tok::Comma)) {
        next();
        out.args.push_back(term());
      }
      expect(Tok::RParen, "')'");
      return out;
    }
    out.is_var = is_variable_name(out.name);
    return out;
  }

  RawAtom atom() {
    const Token& t = expect(Tok::Ident, "an atom");
    RawAtom out;
    out.pred = t.text;
    out.line = t.line;
    out.col = t.col;
    if (at(Tok::LParen)) {
      next();
      out.args.push_back(term());
      while (at(Tok::Comma)) {
        next();
        out.args.push_back(term());
      }
      expect(Tok::RParen, "')'");
    }
    return out;
  }

  std::vector<RawAtom> atom_list(Tok terminator) {
    std::vector<RawAtom> out;
    if (at(terminator)) return out;
    out.push_back(atom());
    while (at(Tok::Comma)) {
      next();
      out.push_back(atom());
    }
    return out;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

// Records symbol arities and reports clashes.
class SignatureBuilder {
 public:
  explicit SignatureBuilder(Signature& sig) : sig_(sig) {}

  void function(const std::string& name, int arity, int line, int col) {
    note(sig_.functions, "function symbol", name, arity, line, col);
  }
  void predicate(const std::string& name, int arity, int line, int col) {
    note(sig_.predicates, "predicate", name, arity, line, col);
  }

 private:
  static void note(std::map<std::string, int>& table, const char* what, const std::string& name,
                   int arity, int line, int col) {
    auto [it, fresh] = table.emplace(name, arity);
    if (!fresh && it->second != arity)
      throw ParseError(line, col,
                       std::string(what) + " '" + name + "' used with arity " +
                           std::to_string(arity) + " but earlier with arity " +
                           std::to_string(it->second));
  }
  Signature& sig_;
};

using VarResolver = std::function<int(const RawTerm&)>;

Term resolve(const RawTerm& t, const VarResolver& var, SignatureBuilder* sig) {
  if (t.is_var) return make_var(var(t));
  std::vector<Term> args;
  args.reserve(t.args.size());
  for (const auto& a : t.args) args.push_back(resolve(a, var, sig));
  if (sig) sig->function(t.name, static_cast<int>(t.args.size()), t.line, t.col);
  return make_app(t.name, std::move(args));
}

void walk_vars(const RawTerm& t, const std::function<void(const RawTerm&)>& fn) {
  if (t.is_var) {
    fn(t);
    return;
  }
  for (const auto& a : t.args) walk_vars(a, fn);
}

}  // namespace

Program parse_program(std::string_view text) {
  Parser ps(text);
  Program prog;
  SignatureBuilder sig(prog.signature);
  while (!ps.at(Tok::End)) {
    if (ps.at(Tok::Neck)) {
      ps.next();
      const Token& kw = ps.expect(Tok::Ident, "'functions' or 'predicates'");
      bool functions = kw.text == "functions";
      if (!functions && kw.text != "predicates")
        throw ParseError(kw.line, kw.col, "unknown directive '" + kw.text + "'");
      do {
        if (ps.at(Tok::Comma)) ps.next();
        const Token& name = ps.expect(Tok::Ident, "a symbol name");
        ps.expect(Tok::Slash, "'/'");
        const Token& ar = ps.expect(Tok::Number, "an arity");
        int arity = std::stoi(ar.text);
        if (functions)
          sig.function(name.text, arity, name.line, name.col);
        else
          sig.predicate(name.text, arity, name.line, name.col);
      } while (ps.at(Tok::Comma));
      ps.expect(Tok::Dot, "'.'");
      continue;
    }
    RawAtom head = ps.atom();
    std::vector<RawAtom> body;
    if (ps.at(Tok::Neck)) {
      ps.next();
      body = ps.atom_list(Tok::Dot);
      if (body.empty()) ps.fail("expected a clause body after ':-'");
    }
    ps.expect(Tok::Dot, "'.' at end of clause");

    // per-clause numbering by first occurrence; '_' is always fresh
    std::map<std::string, int> names;
    int counter = 0;
    VarResolver var = [&](const RawTerm& t) {
      if (t.name == "_") return ++counter;
      auto [it, fresh] = names.emplace(t.name, counter + 1);
      if (fresh) ++counter;
      return it->second;
    };
    auto build = [&](const RawAtom& a) {
      std::vector<Term> args;
      for (const auto& t : a.args) args.push_back(resolve(t, var, &sig));
      sig.predicate(a.pred, static_cast<int>(a.args.size()), a.line, a.col);
      return std::pair{Symbol(a.pred), std::move(args)};
    };
    auto h = build(head);
    std::vector<std::pair<Symbol, std::vector<Term>>> bs;
    for (const auto& b : body) bs.push_back(build(b));
    Clause c;
    c.context = counter;
    c.head = Atom(h.first, std::move(h.second), counter);
    for (auto& b : bs) c.body.emplace_back(b.first, std::move(b.second), counter);
    prog.clauses.push_back(std::move(c));
  }
  return prog;
}

Goal parse_goal(std::string_view text, std::optional<int> declared_context) {
  Parser ps(text);
  if (ps.at(Tok::Query)) ps.next();
  bool bracket = ps.at(Tok::LBracket);
  if (bracket) ps.next();
  std::vector<RawAtom> raw = ps.atom_list(bracket ? Tok::RBracket : Tok::End);
  if (bracket) ps.expect(Tok::RBracket, "']'");
  if (ps.at(Tok::Dot)) ps.next();
  if (!ps.at(Tok::End)) ps.fail("expected end of goal");

  int max_explicit = 0;
  for (const auto& a : raw)
    for (const auto& t : a.args)
      walk_vars(t, [&](const RawTerm& v) { max_explicit = std::max(max_explicit, explicit_index(v.name)); });
  std::map<std::string, int> names;
  int counter = max_explicit;
  VarResolver var = [&](const RawTerm& t) {
    if (int i = explicit_index(t.name)) return i;
    if (t.name == "_") return ++counter;
    auto [it, fresh] = names.emplace(t.name, counter + 1);
    if (fresh) ++counter;
    return it->second;
  };
  std::vector<std::pair<Symbol, std::vector<Term>>> atoms;
  int line = 1, col = 1;
  for (const auto& a : raw) {
    std::vector<Term> args;
    for (const auto& t : a.args) args.push_back(resolve(t, var, nullptr));
    atoms.emplace_back(Symbol(a.pred), std::move(args));
    line = a.line;
    col = a.col;
  }
  int ctx = counter;
  if (declared_context) {
    if (*declared_context < counter)
      throw ParseError(line, col, "goal uses x" + std::to_string(counter) +
                                      " but the declared context is " +
                                      std::to_string(*declared_context));
    ctx = *declared_context;
  }
  std::vector<Atom> out;
  for (auto& [p, args] : atoms) out.emplace_back(p, std::move(args), ctx);
  return Goal(std::move(out), ctx);
}

Term parse_term(std::string_view text) {
  Parser ps(text);
  RawTerm raw = ps.term();
  if (!ps.at(Tok::End)) ps.fail("expected end of term");
  VarResolver var = [&](const RawTerm& t) {
    int i = explicit_index(t.name);
    if (!i) throw ParseError(t.line, t.col, "only x1, x2, ... variables are allowed here");
    return i;
  };
  return resolve(raw, var, nullptr);
}

Substitution parse_substitution(std::string_view text) {
  Parser ps(text);
  if (ps.at(Tok::Ident) && ps.peek().text.rfind("id_", 0) == 0) {
    const Token& t = ps.next();
    std::string digits = t.text.substr(3);
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(), ::isdigit))
      throw ParseError(t.line, t.col, "malformed identity '" + t.text + "'");
    if (!ps.at(Tok::End)) ps.fail("expected end of substitution");
    return Substitution::identity(std::stoi(digits));
  }
  ps.expect(Tok::Lt, "'<'");
  std::vector<RawTerm> raw;
  if (!ps.at(Tok::Gt)) {
    raw.push_back(ps.term());
    while (ps.at(Tok::Comma)) {
      ps.next();
      raw.push_back(ps.term());
    }
  }
  ps.expect(Tok::Gt, "'>'");
  VarResolver var = [&](const RawTerm& t) {
    int i = explicit_index(t.name);
    if (!i) throw ParseError(t.line, t.col, "only x1, x2, ... variables are allowed here");
    return i;
  };
  std::vector<Term> terms;
  for (const auto& t : raw) terms.push_back(resolve(t, var, nullptr));
  if (ps.at(Tok::End)) return Substitution::canonical(std::move(terms));
  ps.expect(Tok::Colon, "':'");
  const Token& src = ps.expect(Tok::Number, "a source context");
  ps.expect(Tok::Arrow, "'->'");
  const Token& tgt = ps.expect(Tok::Number, "a target context");
  if (!ps.at(Tok::End)) ps.fail("expected end of substitution");
  if (std::stoi(src.text) != static_cast<int>(terms.size()))
    throw ParseError(src.line, src.col, "source " + src.text + " does not match " +
                                            std::to_string(terms.size()) + " components");
  try {
    return Substitution(std::move(terms), std::stoi(tgt.text));
  } catch (const ContextError& e) {
    throw ParseError(tgt.line, tgt.col, e.what());
  }
}

void check_goal(const Program& p, const Goal& g) {
  std::function<void(const Term&)> check_term = [&](const Term& t) {
    if (t->is_var()) return;
    auto it = p.signature.functions.find(t->symbol().name());
    if (it != p.signature.functions.end() && it->second != static_cast<int>(t->args().size()))
      throw ContextError("function symbol '" + t->symbol().name() + "' has arity " +
                         std::to_string(it->second) + " in the program");
    for (const auto& a : t->args()) check_term(a);
  };
  for (const auto& a : g.atoms()) {
    auto it = p.signature.predicates.find(a.predicate().name());
    if (it != p.signature.predicates.end() && it->second != static_cast<int>(a.args().size()))
      throw ContextError("predicate '" + a.predicate().name() + "' has arity " +
                         std::to_string(it->second) + " in the program");
    for (const auto& t : a.args()) check_term(t);
  }
}

std::string pretty_print(const Program& p) {
  std::string out;
  auto decl = [&](const char* kw, const std::map<std::string, int>& table) {
    if (table.empty()) return;
    out += ":- ";
    out += kw;
    bool first = true;
    for (const auto& [name, arity] : table) {
      out += first ? " " : ", ";
      first = false;
      out += name + "/" + std::to_string(arity);
    }
    out += ".\n";
  };
  decl("functions", p.signature.functions);
  decl("predicates", p.signature.predicates);
  for (const auto& c : p.clauses) out += to_string(c) + "\n";
  return out;
}

Atom shift_atom(const Atom& a, int offset) {
  std::vector<Term> args;
  args.reserve(a.args().size());
  for (const auto& t : a.args()) args.push_back(shift_vars(t, offset));
  return Atom(a.predicate(), std::move(args), a.context() + offset);
}

Clause standardize_apart(const Clause& c, int base) {
  std::vector<int> order;
  std::set<int> seen;
  for (const auto& t : c.head.args()) first_occurrence(t, order, seen);
  for (const auto& b : c.body)
    for (const auto& t : b.args()) first_occurrence(t, order, seen);
  int k = static_cast<int>(order.size());
  // variables that do not occur keep a null image; substitute never reads it
  std::vector<Term> images(c.context);
  for (int i = 0; i < k; ++i) images[order[i] - 1] = make_var(base + i + 1);
  Clause out;
  out.context = base + k;
  auto map_atom = [&](const Atom& a) {
    std::vector<Term> args;
    for (const auto& t : a.args()) args.push_back(substitute(t, images));
    return Atom(a.predicate(), std::move(args), out.context);
  };
  out.head = map_atom(c.head);
  for (const auto& b : c.body) out.body.push_back(map_atom(b));
  return out;
}

bool is_ground(const Atom& a) { return a.max_var() == 0; }

bool is_ground(const Program& p) {
  for (const auto& c : p.clauses) {
    if (!is_ground(c.head)) return false;
    for (const auto& b : c.body)
      if (!is_ground(b)) return false;
  }
  return true;
}

}  // namespace lpsem
