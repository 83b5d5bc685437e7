#include "lpsem/checks.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "lpsem/atom_tree.hpp"
#include "lpsem/goal_tree.hpp"
#include "lpsem/sld.hpp"

namespace lpsem {

std::string_view natlist_source() {
  return "List(cons(X, Y)) :- Nat(X), List(Y).\n"
         "List(nil).\n"
         "Nat(succ(X)) :- Nat(X).\n"
         "Nat(zero).\n";
}

std::string_view ground_source() {
  return ":- functions a/0, b/0, c/0.\n"
         "p(b,c) :- q(a), q(b), q(c).\n"
         "p(b,b) :- q(c).\n"
         "p(b,b) :- p(b,a), p(b,c).\n"
         "q(c).\n";
}

namespace {

// Variables of the tuple occur as x1..xj in order of first occurrence.
bool canonical_vars(const std::vector<Term>& args, int j) {
  int next = 1;
  std::function<bool(const Term&)> walk = [&](const Term& t) {
    if (t->is_var()) {
      if (t->var() > next) return false;
      if (t->var() == next) ++next;
      return true;
    }
    for (const auto& c : t->args())
      if (!walk(c)) return false;
    return true;
  };
  for (const auto& a : args)
    if (!walk(a)) return false;
  return next == j + 1;
}

}  // namespace

std::vector<Atom> fixture_atoms(const Program& p, int max_context, int arg_depth, bool pad_contexts) {
  std::vector<Atom> out;
  for (const auto& [name, arity] : p.signature.predicates)
    for (int j = 0; j <= max_context; ++j) {
      std::vector<Term> pool = terms_up_to_depth(p.signature, j, arg_depth);
      if (arity > 0 && pool.empty()) continue;
      std::vector<std::size_t> idx(arity, 0);
      while (true) {
        std::vector<Term> args;
        for (int i = 0; i < arity; ++i) args.push_back(pool[idx[i]]);
        if (canonical_vars(args, j))
          for (int n = j; n <= (pad_contexts ? max_context : j); ++n) out.emplace_back(name, args, n);
        int k = arity - 1;
        while (k >= 0 && ++idx[k] == pool.size()) idx[k--] = 0;
        if (k < 0) break;
      }
    }
  std::sort(out.begin(), out.end(), [](const Atom& a, const Atom& b) {
    if (a.context() != b.context()) return a.context() < b.context();
    return a < b;
  });
  return out;
}

CheckConfig default_check_config() {
  CheckConfig c;
  c.program = parse_program(natlist_source());
  c.ground_program = parse_program(ground_source());
  return c;
}

const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "PASS";
    case CheckStatus::Fail: return "FAIL";
    case CheckStatus::Skip: return "SKIP";
  }
  return "?";
}

bool SuiteReport::passed() const {
  return std::none_of(properties.begin(), properties.end(),
                      [](const PropertyResult& r) { return r.status == CheckStatus::Fail; });
}

std::string SuiteReport::to_json() const {
  nlohmann::json props = nlohmann::json::array();
  for (const auto& p : properties)
    props.push_back({{"name", p.name},
                     {"status", to_string(p.status)},
                     {"cases", p.cases},
                     {"skipped", p.skipped},
                     {"detail", p.detail}});
  nlohmann::json j{{"suite", suite}, {"passed", passed()}, {"seconds", seconds}, {"properties", props}};
  return j.dump(2) + "\n";
}

std::string SuiteReport::to_text() const {
  std::ostringstream os;
  for (const auto& p : properties) {
    os << to_string(p.status) << " " << suite << "/" << p.name << " (" << p.cases << " cases";
    if (p.skipped) os << ", " << p.skipped << " skipped";
    os << ")";
    if (!p.detail.empty()) os << ": " << p.detail;
    os << "\n";
  }
  os << (passed() ? "PASS " : "FAIL ") << suite << " in " << seconds << "s\n";
  return os.str();
}

namespace {

int pick(int value, int fallback) { return value < 0 ? fallback : value; }

// Records the first counterexample and counts cases.
struct Tally {
  PropertyResult r;
  explicit Tally(std::string name) { r.name = std::move(name); }
  void check(bool ok, const std::function<std::string()>& why) {
    ++r.cases;
    if (ok || r.status == CheckStatus::Fail) return;
    r.status = CheckStatus::Fail;
    r.detail = why();
  }
  void skip(const std::string& why) {
    ++r.skipped;
    if (r.detail.empty() && r.status != CheckStatus::Fail) r.detail = "first skip: " + why;
  }
  PropertyResult done() {
    if (r.cases == 0 && r.status != CheckStatus::Fail) r.status = CheckStatus::Skip;
    return r;
  }
};

std::string answers_string(const std::vector<Substitution>& v) {
  std::string s = "{";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + to_string(v[i]);
  return s + "}";
}

std::string set_mismatch(const std::vector<Substitution>& a, const std::vector<Substitution>& b,
                         const std::string& an, const std::string& bn) {
  std::vector<Substitution> only_a, only_b;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(only_a));
  std::set_difference(b.begin(), b.end(), a.begin(), a.end(), std::back_inserter(only_b));
  return "only in " + an + ": " + answers_string(only_a) + "; only in " + bn + ": " +
         answers_string(only_b);
}

std::vector<Substitution> sorted_unique(std::vector<Substitution> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::vector<PropertyResult> compositionality(const CheckConfig& cfg) {
  const Program& p = cfg.program;
  Bounds b{pick(cfg.subst_depth, 1), pick(cfg.max_vars, 2)};
  int d = pick(cfg.depth, 4);
  // Direct builds and the theta-bar side use separate engines, so no node
  // is shared between the two sides of the comparison.
  auto direct = std::make_shared<StepEngine>(p, b);
  auto source = std::make_shared<StepEngine>(p, b);
  Tally t("theta-bar-equals-direct");
  Tally audit_t("audit");
  TreeDiffCache cache;
  for (const Atom& a : fixture_atoms(p, 2, 1, false)) {
    std::map<int, AtomTree> wide;  // keyed by the widened root depth
    for_each_substitution(a.context(), p.signature, b.depth, b.max_target, [&](const Substitution& theta) {
      int rd = b.depth + theta.depth();
      auto it = wide.find(rd);
      if (it == wide.end()) it = wide.emplace(rd, build_saturated_avtree(source, a, d, rd)).first;
      ThetaBarResult tb = theta_bar_report(it->second, theta);
      if (!tb.missing.empty()) {
        t.skip(to_string(a) + " under " + to_string(theta) + " needs " + to_string(tb.missing.front()));
        return;
      }
      AtomTree rebuilt = build_saturated_avtree(direct, apply(a, theta), d);
      auto diff = tree_difference(rebuilt, tb.tree, cache);
      t.check(!diff, [&] { return to_string(a) + " under " + to_string(theta) + ": " + *diff; });
    });
    AtomTree plain = build_saturated_avtree(direct, a, d);
    auto issues = audit(plain);
    audit_t.check(issues.empty(), [&] { return to_string(a) + ": " + issues.front(); });
  }
  return {t.done(), audit_t.done()};
}

std::vector<PropertyResult> desaturation(const CheckConfig& cfg) {
  int d = pick(cfg.depth, 4);
  std::vector<PropertyResult> out;
  {
    const Program& p = cfg.program;
    Bounds b{pick(cfg.subst_depth, 1), pick(cfg.max_vars, 3)};
    auto sat = std::make_shared<StepEngine>(p, b);
    auto coind = std::make_shared<StepEngine>(p, b);
    Tally t("desaturate-equals-coinductive");
    Tally audit_t("audit");
    for (const Atom& a : fixture_atoms(p, std::min(b.max_target, 3), 1, true)) {
      AtomTree s = build_saturated_avtree(sat, a, d);
      AtomTree c = build_coinductive_tree(coind, a, d);
      auto diff = tree_difference(desaturate(s), c);
      t.check(!diff, [&] { return to_string(a) + ": " + *diff; });
      auto issues = audit(c);
      audit_t.check(issues.empty(), [&] { return to_string(a) + ": " + issues.front(); });
    }
    out.push_back(t.done());
    out.push_back(audit_t.done());
  }
  {
    const Program& g = cfg.ground_program;
    Tally t("ground-collapse");
    if (!is_ground(g)) {
      t.skip("the ground fixture is not ground");
    } else {
      auto engine = std::make_shared<StepEngine>(g, Bounds{0, 0});
      for (const Atom& a : fixture_atoms(g, 0, 0, false)) {
        AtomTree s = build_saturated_avtree(engine, a, d);
        AtomTree m = build_andor_tree(engine, a, d);
        AtomTree c = build_coinductive_tree(engine, a, d);
        auto d1 = tree_difference(desaturate(s), c);
        auto d2 = tree_difference(s, m);
        auto d3 = tree_difference(c, m);
        t.check(!d1 && !d2 && !d3, [&] { return to_string(a) + ": " + *(d1 ? d1 : d2 ? d2 : d3); });
      }
    }
    out.push_back(t.done());
  }
  return out;
}

struct SplitCase {
  Goal whole;
  std::vector<Goal> parts;
};

SplitCase random_split(std::mt19937_64& rng, const std::vector<Atom>& pool, int context) {
  std::uniform_int_distribution<int> len_d(2, 4);
  std::uniform_int_distribution<std::size_t> atom_d(0, pool.size() - 1);
  int len = len_d(rng);
  std::vector<Atom> atoms;
  for (int i = 0; i < len; ++i) atoms.push_back(pool[atom_d(rng)]);
  int k = std::min(len, std::uniform_int_distribution<int>(2, 3)(rng));
  std::vector<int> cuts(len - 1);
  for (int i = 0; i < len - 1; ++i) cuts[i] = i + 1;
  std::shuffle(cuts.begin(), cuts.end(), rng);
  cuts.resize(k - 1);
  std::sort(cuts.begin(), cuts.end());
  SplitCase sc{Goal(atoms, context), {}};
  int from = 0;
  cuts.push_back(len);
  for (int c : cuts) {
    sc.parts.emplace_back(std::vector<Atom>(atoms.begin() + from, atoms.begin() + c), context);
    from = c;
  }
  return sc;
}

std::string parts_string(const SplitCase& sc) {
  std::string s;
  for (std::size_t i = 0; i < sc.parts.size(); ++i) s += (i ? " ++ " : "") + to_string(sc.parts[i]);
  return s;
}

std::vector<PropertyResult> and_compositionality(const CheckConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  std::vector<PropertyResult> out;
  {
    const Program& g = cfg.ground_program;
    Tally t("ground-concat");
    int d = pick(cfg.depth, 5);
    if (!is_ground(g)) {
      t.skip("the ground fixture is not ground");
    } else {
      auto engine = std::make_shared<StepEngine>(g, Bounds{0, 0});
      auto pool = fixture_atoms(g, 0, 0, false);
      for (int i = 0; i < cfg.cases; ++i) {
        SplitCase sc = random_split(rng, pool, 0);
        std::vector<GoalTree> parts;
        for (const auto& l : sc.parts) parts.push_back(build_vtree_ground(engine, l, d));
        auto diff = goal_tree_difference(build_vtree_ground(engine, sc.whole, d), concat_all(parts));
        t.check(!diff, [&] { return parts_string(sc) + ": " + *diff; });
      }
    }
    out.push_back(t.done());
  }
  {
    const Program& p = cfg.program;
    Bounds b{pick(cfg.subst_depth, 1), pick(cfg.max_vars, 2)};
    int d = pick(cfg.depth, 3);
    auto whole_engine = std::make_shared<StepEngine>(p, b);
    auto part_engine = std::make_shared<StepEngine>(p, b);
    Tally t("saturated-concat");
    std::map<int, std::vector<Atom>> by_context;
    for (const Atom& a : fixture_atoms(p, 2, 1, true)) by_context[a.context()].push_back(a);
    std::uniform_int_distribution<int> ctx_d(0, 2);
    for (int i = 0; i < cfg.cases; ++i) {
      int n = ctx_d(rng);
      SplitCase sc = random_split(rng, by_context[n], n);
      std::vector<GoalTree> parts;
      for (const auto& l : sc.parts) parts.push_back(build_saturated_vtree(part_engine, l, d));
      auto diff =
          goal_tree_difference(build_saturated_vtree(whole_engine, sc.whole, d), concat_all(parts));
      t.check(!diff, [&] { return parts_string(sc) + ": " + *diff; });
    }
    out.push_back(t.done());
  }
  return out;
}

std::vector<PropertyResult> representation(const CheckConfig& cfg) {
  std::vector<PropertyResult> out;
  {
    const Program& g = cfg.ground_program;
    int d = pick(cfg.depth, 5);
    Tally t("repr-ground");
    Tally audit_t("audit-ground");
    if (!is_ground(g)) {
      t.skip("the ground fixture is not ground");
    } else {
      auto engine = std::make_shared<StepEngine>(g, Bounds{0, 0});
      for (const Atom& a : fixture_atoms(g, 0, 0, false)) {
        GoalTree direct = build_vtree_ground(engine, Goal({a}, 0), d);
        auto diff = goal_tree_difference(repr_ground(build_andor_tree(engine, a, 2 * d)), direct);
        t.check(!diff, [&] { return to_string(a) + ": " + *diff; });
        auto issues = audit(direct);
        audit_t.check(issues.empty(), [&] { return to_string(a) + ": " + issues.front(); });
      }
    }
    out.push_back(t.done());
    out.push_back(audit_t.done());
  }
  {
    const Program& p = cfg.program;
    Bounds b{pick(cfg.subst_depth, 1), pick(cfg.max_vars, 2)};
    int d = pick(cfg.depth, 3);
    auto tree_engine = std::make_shared<StepEngine>(p, b);
    auto goal_engine = std::make_shared<StepEngine>(p, b);
    Tally t("repr-saturated");
    Tally audit_t("audit-saturated");
    for (const Atom& a : fixture_atoms(p, 2, 1, false)) {
      GoalTree direct = build_saturated_vtree(goal_engine, Goal({a}, a.context()), d);
      auto diff =
          goal_tree_difference(repr_sat(build_saturated_avtree(tree_engine, a, 2 * d)), direct);
      t.check(!diff, [&] { return to_string(a) + ": " + *diff; });
      auto issues = audit(direct);
      audit_t.check(issues.empty(), [&] { return to_string(a) + ": " + issues.front(); });
    }
    out.push_back(t.done());
    out.push_back(audit_t.done());
  }
  return out;
}

std::vector<PropertyResult> soundness_atomic(const CheckConfig& cfg) {
  const Program& p = cfg.program;
  Bounds b{pick(cfg.subst_depth, 1), pick(cfg.max_vars, 2)};
  int d = pick(cfg.depth, 6);
  auto engine = std::make_shared<StepEngine>(p, b);
  Tally sound("sound"), complete("complete"), valid("witnesses-valid");
  std::vector<Atom> atoms;
  for (const char* text : {"List(x1)", "List(cons(x1,x2))", "List(cons(x1,cons(x2,x1)))", "Nat(x1)"}) {
    Goal g = parse_goal(text);
    if (std::all_of(g.atoms().begin(), g.atoms().end(), [&](const Atom& a) {
          return p.signature.predicates.count(a.predicate().name());
        }))
      atoms.push_back(g.atoms()[0]);
  }
  if (atoms.empty()) {
    sound.skip("the program has none of the List/Nat fixture atoms");
    return {sound.done(), complete.done(), valid.done()};
  }
  for (const Atom& a : atoms) {
    AtomTree t = build_saturated_avtree(engine, a, d);
    auto found = find_synched_refutations(t, SynchedSearchOptions{d, b.depth});
    std::vector<Substitution> tree_answers;
    for (const auto& s : found) {
      tree_answers.push_back(s.answer);
      bool ok = true;
      std::string why;
      try {
        validate_synched(t, s);
      } catch (const std::exception& e) {
        ok = false;
        why = e.what();
      }
      valid.check(ok, [&] { return to_string(a) + ": " + why; });
    }
    tree_answers = sorted_unique(tree_answers);
    auto sld = bounded_correct_answers(p, Goal({a}, a.context()), b, cfg.max_steps);
    std::vector<Substitution> extra, lost;
    std::set_difference(tree_answers.begin(), tree_answers.end(), sld.begin(), sld.end(),
                        std::back_inserter(extra));
    std::set_difference(sld.begin(), sld.end(), tree_answers.begin(), tree_answers.end(),
                        std::back_inserter(lost));
    sound.check(extra.empty(), [&] { return to_string(a) + ": not SLD-correct " + answers_string(extra); });
    complete.check(lost.empty(), [&] { return to_string(a) + ": no synched subtree for " + answers_string(lost); });
  }
  return {sound.done(), complete.done(), valid.done()};
}

std::vector<PropertyResult> soundness_goal(const CheckConfig& cfg) {
  std::vector<PropertyResult> out;
  {
    const Program& p = cfg.program;
    Bounds b{pick(cfg.subst_depth, 1), pick(cfg.max_vars, 2)};
    int d = pick(cfg.depth, 4);
    Goal g = parse_goal(cfg.goal.empty() ? "[Nat(x1), List(cons(x1,x2))]" : cfg.goal);
    Tally agree("answers-agree"), normal("normalization");
    check_goal(p, g);
    auto engine = std::make_shared<StepEngine>(p, b);
    GoalTree t = build_saturated_vtree(engine, g, d);
    auto paths = find_goal_refutations(t, RefutationSearchOptions{d, b.depth});
    std::vector<Substitution> tree_answers;
    for (const auto& r : paths) {
      tree_answers.push_back(r.answer);
      try {
        RefutationPath n = normalize_goal_refutation(t, r);
        validate_path(t, n);
        bool ok = n.answer == r.answer && !n.edges.empty() && n.edges.front() == r.answer;
        for (std::size_t i = 1; ok && i < n.edges.size(); ++i) ok = n.edges[i].is_identity();
        normal.check(ok, [&] { return "path with answer " + to_string(r.answer) + " normalized badly"; });
      } catch (const ClosureError& e) {
        normal.skip(e.what());
      } catch (const std::exception& e) {
        normal.check(false, [&] { return to_string(r.answer) + ": " + e.what(); });
      }
    }
    tree_answers = sorted_unique(tree_answers);
    auto sld = bounded_correct_answers(p, g, b, cfg.max_steps);
    agree.check(tree_answers == sld,
                [&] { return to_string(g) + ": " + set_mismatch(tree_answers, sld, "tree", "SLD"); });
    out.push_back(agree.done());
    out.push_back(normal.done());
  }
  {
    const Program& gp = cfg.ground_program;
    int d = pick(cfg.depth, 5);
    Tally t("ground-conjunction");
    if (!is_ground(gp)) {
      t.skip("the ground fixture is not ground");
    } else {
      auto engine = std::make_shared<StepEngine>(gp, Bounds{0, 0});
      auto atoms = fixture_atoms(gp, 0, 0, false);
      std::map<Atom, bool> single;
      auto refutes = [&](const Goal& l) { return !find_goal_refutations(build_vtree_ground(engine, l, d), d).empty(); };
      for (const Atom& a : atoms) single[a] = refutes(Goal({a}, 0));
      for (const Atom& a : atoms)
        for (const Atom& c : atoms) {
          Goal l({a, c}, 0);
          bool expect = single[a] && single[c];
          bool got = refutes(l);
          t.check(got == expect, [&] {
            return to_string(l) + ": conjunction " + (got ? "refutes" : "fails") + " but atoms " +
                   (expect ? "all refute" : "do not all refute");
          });
        }
    }
    out.push_back(t.done());
  }
  return out;
}

std::vector<PropertyResult> regression_nonnaturality(const CheckConfig& cfg) {
  const Program& p = cfg.program;
  Bounds b{pick(cfg.subst_depth, 1), pick(cfg.max_vars, 2)};
  Tally asym("matching-not-natural"), sat("saturation-recovers");
  if (!p.signature.predicates.count("List") || !p.signature.functions.count("nil")) {
    asym.skip("the program has no List predicate or nil constant");
    return {asym.done(), sat.done()};
  }
  Atom list_nil = parse_goal("List(nil)").atoms()[0];
  Atom list_x = parse_goal("List(x1)").atoms()[0];
  Substitution to_nil({parse_term("nil")}, 0);
  auto instance = term_matching_step(p, list_nil, b);
  std::vector<Goal> pushed;
  for (const auto& l : term_matching_step(p, list_x, b)) pushed.push_back(apply(l, to_nil));
  std::vector<Goal> empty_body{Goal({}, 0)};
  asym.check(instance == empty_body && pushed.empty() && instance != pushed, [&] {
    return "matching List(nil) gave " + std::to_string(instance.size()) +
           " bodies, the pushed-forward List(x1) step " + std::to_string(pushed.size());
  });
  auto engine = std::make_shared<StepEngine>(p, b);
  const auto* bodies = engine->saturated_step(list_x, to_nil);
  sat.check(bodies && *bodies == instance,
            [&] { return "saturated step of List(x1) at <nil> differs from matching List(nil)"; });
  return {asym.done(), sat.done()};
}

using SuiteFn = std::vector<PropertyResult> (*)(const CheckConfig&);

const std::vector<std::pair<std::string, SuiteFn>>& registry() {
  static const std::vector<std::pair<std::string, SuiteFn>> r{
      {"compositionality", compositionality},
      {"and-compositionality", and_compositionality},
      {"desaturation", desaturation},
      {"representation", representation},
      {"soundness-completeness-atomic", soundness_atomic},
      {"soundness-completeness-goal", soundness_goal},
      {"regression-nonnaturality", regression_nonnaturality},
  };
  return r;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [n, f] : registry()) v.push_back(n);
    return v;
  }();
  return names;
}

SuiteReport run_suite(std::string_view name, const CheckConfig& cfg) {
  for (const auto& [n, fn] : registry()) {
    if (n != name) continue;
    auto start = std::chrono::steady_clock::now();
    SuiteReport report{n, fn(cfg), 0};
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
  }
  throw std::invalid_argument("unknown suite '" + std::string(name) + "'");
}

}  // namespace lpsem
