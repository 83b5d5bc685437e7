#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "lpsem/atom_tree.hpp"
#include "lpsem/checks.hpp"
#include "lpsem/goal_tree.hpp"
#include "lpsem/program.hpp"
#include "lpsem/render.hpp"
#include "lpsem/sld.hpp"

using namespace lpsem;

namespace {

constexpr int kOk = 0;
constexpr int kNoRefutation = 1;
constexpr int kInputError = 2;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct QueryConfig {
  std::string program_path;
  std::string goal;
  std::string semantics = "sld";
  int depth = 4;
  int subst_depth = 1;
  int max_vars = 2;
  int max_steps = 8;
  std::string format = "text";
  bool refute = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Program load_program(const std::string& path) {
  try {
    return parse_program(read_file(path));
  } catch (const ParseError& e) {
    throw InputError(path + ": " + e.what());
  }
}

Atom single_atom(const Goal& g, const std::string& semantics) {
  if (g.size() != 1)
    throw InputError("semantics '" + semantics + "' takes a single atom, got " + to_string(g));
  return g.atoms()[0];
}

// Derivations share their prefixes; each step becomes a goal node whose
// edge is the goal side of the unifier.
PlainNode derivation_tree(const Goal& start, const std::vector<Derivation>& ds) {
  PlainNode root{PlainKind::Goal, to_string(start), start.context(), std::nullopt, false, {}};
  for (const auto& d : ds) {
    PlainNode* at = &root;
    for (const auto& s : d.steps) {
      PlainNode child{PlainKind::Goal, to_string(s.goal), s.goal.context(), s.sigma, false, {}};
      auto it = std::find_if(at->children.begin(), at->children.end(), [&](const PlainNode& c) {
        return c.label == child.label && c.subst == child.subst;
      });
      if (it == at->children.end()) {
        at->children.push_back(std::move(child));
        at = &at->children.back();
      } else {
        at = &*it;
      }
    }
    if (d.status == DerivationStatus::DepthExhausted) at->frontier = true;
  }
  return root;
}

std::string bindings(const Substitution& s) {
  std::string out;
  for (int i = 0; i < s.source(); ++i) {
    if (i) out += ", ";
    out += "x" + std::to_string(i + 1) + " = " + to_string(s[i]);
  }
  return out.empty() ? "true" : out;
}

nlohmann::json answers_json(const std::vector<Substitution>& answers) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& a : answers) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : a.terms()) terms.push_back(to_string(t));
    arr.push_back({{"source", a.source()}, {"target", a.target()}, {"terms", terms}});
  }
  return arr;
}

// Writes answers and one rendered witness per answer.
int emit_answers(const std::vector<Substitution>& answers, const std::vector<PlainNode>& witnesses,
                 Format f, bool color) {
  if (f == Format::Json) {
    nlohmann::json w = nlohmann::json::array();
    for (const auto& p : witnesses) w.push_back(nlohmann::json::parse(render_json(p)));
    std::cout << nlohmann::json{{"answers", answers_json(answers)}, {"witnesses", w}}.dump(2) << "\n";
  } else {
    for (std::size_t i = 0; i < answers.size(); ++i) {
      if (f == Format::Text) std::cout << "answer " << label_string(answers[i]) << ": " << bindings(answers[i]) << "\n";
      if (i < witnesses.size()) std::cout << render(witnesses[i], f, color);
    }
  }
  return answers.empty() ? kNoRefutation : kOk;
}

int run_query(const QueryConfig& cfg) {
  auto format = parse_format(cfg.format);
  if (!format) throw InputError("unknown format '" + cfg.format + "'");
  bool color = color_from_env();
  Program p = load_program(cfg.program_path);
  Goal g;
  try {
    g = parse_goal(cfg.goal);
    check_goal(p, g);
  } catch (const ParseError& e) {
    throw InputError(std::string("goal: ") + e.what());
  }
  Bounds b{cfg.subst_depth, cfg.max_vars};
  const std::string& s = cfg.semantics;

  if (s == "sld") {
    auto ds = sld_derive(p, g, cfg.max_steps);
    std::vector<Substitution> answers = computed_answers(p, g, cfg.max_steps);
    if (*format == Format::Text) {
      for (const auto& a : answers) std::cout << "answer " << bindings(a) << "\n";
      if (answers.empty()) std::cout << "no answers within " << cfg.max_steps << " steps\n";
    } else if (*format == Format::Json) {
      std::cout << nlohmann::json{{"answers", answers_json(answers)},
                                  {"tree", nlohmann::json::parse(render_json(derivation_tree(g, ds)))}}
                       .dump(2)
                << "\n";
    } else {
      std::cout << render_dot(derivation_tree(g, ds));
    }
    return answers.empty() ? kNoRefutation : kOk;
  }

  if (s == "andor" || s == "coinductive" || s == "saturated") {
    Atom a = single_atom(g, s);
    auto engine = std::make_shared<StepEngine>(p, b);
    AtomTree t = s == "andor"         ? build_andor_tree(engine, a, cfg.depth)
                 : s == "coinductive" ? build_coinductive_tree(engine, a, cfg.depth)
                                      : build_saturated_avtree(engine, a, cfg.depth);
    if (!cfg.refute) {
      std::cout << render(to_plain(t), *format, color);
      return kOk;
    }
    if (s != "saturated") throw InputError("--refute needs the saturated atom semantics or an or-tree");
    auto found = find_synched_refutations(t, SynchedSearchOptions{cfg.depth, cfg.subst_depth});
    std::vector<Substitution> answers;
    std::vector<PlainNode> witnesses;
    for (const auto& r : found) {
      answers.push_back(r.answer);
      witnesses.push_back(to_plain(r));
    }
    return emit_answers(answers, witnesses, *format, color);
  }

  if (s == "vtree" || s == "saturated-vtree") {
    GoalTree t = [&] {
      if (s == "saturated-vtree") return build_saturated_vtree(p, g, cfg.depth, b);
      try {
        return build_vtree_ground(p, g, cfg.depth);
      } catch (const GroundnessError& e) {
        throw InputError(std::string("vtree is a ground-only semantics: ") + e.what());
      }
    }();
    if (!cfg.refute) {
      std::cout << render(to_plain(t), *format, color);
      return kOk;
    }
    auto paths = find_goal_refutations(
        t, RefutationSearchOptions{cfg.depth, s == "vtree" ? std::nullopt : std::optional<int>(cfg.subst_depth)});
    std::vector<Substitution> answers;
    std::vector<PlainNode> witnesses;
    for (const auto& r : paths) {
      answers.push_back(r.answer);
      witnesses.push_back(to_plain(r));
    }
    return emit_answers(answers, witnesses, *format, color);
  }
  throw InputError("unknown semantics '" + s + "'");
}

struct CheckArgs {
  std::string suite;
  std::string program_path;
  std::string format = "text";
};

int run_check(const CheckArgs& args, CheckConfig cfg) {
  if (!args.program_path.empty()) {
    Program p = load_program(args.program_path);
    if (is_ground(p)) cfg.ground_program = p;
    cfg.program = std::move(p);
  }
  std::vector<std::string> names;
  if (args.suite == "all") {
    names = suite_names();
  } else if (std::find(suite_names().begin(), suite_names().end(), args.suite) != suite_names().end()) {
    names = {args.suite};
  } else {
    throw InputError("unknown suite '" + args.suite + "'");
  }
  bool ok = true;
  for (const auto& n : names) {
    SuiteReport r = run_suite(n, cfg);
    std::cout << (args.format == "json" ? r.to_json() : r.to_text());
    ok = ok && r.passed();
  }
  return ok ? kOk : kNoRefutation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Query and check tree semantics of logic programs"};
  app.require_subcommand(1);

  QueryConfig q;
  auto* query = app.add_subcommand("query", "Build a semantics for a goal and render it");
  query->add_option("--program", q.program_path, "Program file")->required();
  query->add_option("--goal", q.goal, "Goal, e.g. \"[Nat(x1), List(x2)]\"")->required();
  query->add_option("--semantics", q.semantics, "Semantics")
      ->check(CLI::IsMember({"sld", "andor", "coinductive", "saturated", "vtree", "saturated-vtree"}));
  query->add_option("--depth", q.depth, "Tree depth bound")->check(CLI::NonNegativeNumber);
  query->add_option("--subst-depth", q.subst_depth, "Term depth of enumerated substitutions")
      ->check(CLI::NonNegativeNumber);
  query->add_option("--max-vars", q.max_vars, "Largest target context of enumerated substitutions")
      ->check(CLI::NonNegativeNumber);
  query->add_option("--max-steps", q.max_steps, "SLD step bound")->check(CLI::NonNegativeNumber);
  query->add_option("--format", q.format, "Output format")->check(CLI::IsMember({"text", "dot", "json"}));
  query->add_flag("--refute", q.refute, "Search refutations instead of rendering the tree");

  CheckArgs c;
  CheckConfig cfg = default_check_config();
  auto* check = app.add_subcommand("check", "Run a property suite");
  check->add_option("--suite", c.suite, "Suite name or 'all'")->required();
  check->add_option("--program", c.program_path, "Program file replacing the built-in fixture");
  check->add_option("--depth", cfg.depth, "Depth bound")->check(CLI::NonNegativeNumber);
  check->add_option("--subst-depth", cfg.subst_depth, "Term depth of enumerated substitutions")
      ->check(CLI::NonNegativeNumber);
  check->add_option("--max-vars", cfg.max_vars, "Largest enumerated target context")
      ->check(CLI::NonNegativeNumber);
  check->add_option("--max-steps", cfg.max_steps, "SLD step bound")->check(CLI::NonNegativeNumber);
  check->add_option("--cases", cfg.cases, "Random cases")->check(CLI::NonNegativeNumber);
  check->add_option("--seed", cfg.seed, "Random seed");
  check->add_option("--goal", cfg.goal, "Goal for the goal-level suite");
  check->add_option("--format", c.format, "Report format")->check(CLI::IsMember({"text", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }
  try {
    if (*query) return run_query(q);
    return run_check(c, cfg);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const ContextError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
}
