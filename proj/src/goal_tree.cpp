#include "lpsem/goal_tree.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>
#include <unordered_set>

namespace lpsem {

namespace {

void sort_goals(std::vector<Goal>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

bool edge_less(const GEdge& a, const GEdge& b) {
  if (int c = compare(a.edge, b.edge)) return c < 0;
  return compare(a.node->label(), b.node->label()) < 0;
}

bool same_key(const GEdge& a, const GEdge& b) {
  return a.edge == b.edge && a.node->label() == b.node->label();
}

void sort_edges(std::vector<GEdge>& v) {
  std::stable_sort(v.begin(), v.end(), edge_less);
  v.erase(std::unique(v.begin(), v.end(),
                      [](const GEdge& a, const GEdge& b) { return a.edge == b.edge && a.node == b.node; }),
          v.end());
}

void require_ground(const Program& p, const Goal& l) {
  if (!is_ground(p)) throw GroundnessError("ground semantics requested for a non-ground program");
  for (const auto& a : l.atoms())
    if (!is_ground(a)) throw GroundnessError(to_string(a) + " is not ground");
}

}  // namespace

std::vector<Goal> distribute(const std::vector<std::vector<Goal>>& sets, int context) {
  if (sets.empty()) return {Goal({}, context)};
  std::vector<Goal> acc = sets.front();
  for (std::size_t i = 1; i < sets.size() && !acc.empty(); ++i) {
    std::vector<Goal> next;
    next.reserve(acc.size() * sets[i].size());
    for (const auto& a : acc)
      for (const auto& b : sets[i]) next.push_back(concat(a, b));
    acc = std::move(next);
  }
  sort_goals(acc);
  return acc;
}

std::vector<Goal> parallel_step_ground(const Program& p, const Goal& l) {
  require_ground(p, l);
  std::vector<std::vector<Goal>> sets;
  for (const auto& a : l.atoms()) sets.push_back(ground_step(p, a));
  return distribute(sets, 0);
}

std::vector<Goal> parallel_step_sat(const Program& p, const Goal& l, const Bounds& bounds,
                                    const Substitution& theta) {
  if (theta.source() != l.context())
    throw ContextError("parallel step: " + to_string(theta) + " does not start at context " +
                       std::to_string(l.context()));
  std::vector<std::vector<Goal>> sets;
  for (const auto& a : l.atoms()) sets.push_back(term_matching_step(p, apply(a, theta), bounds));
  return distribute(sets, theta.target());
}

std::vector<ParallelEntry> parallel_step_sat(const Program& p, const Goal& l, const Bounds& bounds) {
  std::vector<ParallelEntry> out;
  if (l.empty()) {
    for_each_substitution(l.context(), p.signature, bounds.depth, bounds.max_target,
                          [&](const Substitution& theta) {
                            out.push_back({theta, {Goal({}, theta.target())}});
                          });
    return out;
  }
  // Only substitutions with a step for the first atom can yield goals.
  for (auto& e : saturated_step(p, l.atoms()[0], bounds)) {
    std::vector<std::vector<Goal>> sets{std::move(e.bodies)};
    for (std::size_t i = 1; i < l.size(); ++i)
      sets.push_back(term_matching_step(p, apply(l.atoms()[i], e.sigma), bounds));
    auto goals = distribute(sets, e.sigma.target());
    if (!goals.empty()) out.push_back({e.sigma, std::move(goals)});
  }
  return out;
}

const std::vector<GEdge>& GNode::children() const {
  if (!children_) {
    children_ = expand_();
    expand_ = nullptr;
  }
  return *children_;
}

const GNode* GNodeArena::make(Goal label, GNode::Expander expand) {
  nodes_.emplace_back(std::move(label), std::move(expand));
  return &nodes_.back();
}

const char* to_string(GoalTreeKind k) {
  return k == GoalTreeKind::Ground ? "ground" : "saturated";
}

namespace {

struct GoalBuilder {
  std::shared_ptr<StepEngine> engine;
  GoalTreeKind kind;
  GNodeArena arena;
  std::unordered_map<Goal, const GNode*, GoalHash> memo;

  const GNode* get(const Goal& l) {
    auto it = memo.find(l);
    if (it != memo.end()) return it->second;
    const GNode* node = arena.make(l, [this, l] { return expand(l); });
    memo.emplace(l, node);
    return node;
  }

  std::vector<GEdge> expand(const Goal& l) {
    std::vector<GEdge> out;
    if (kind == GoalTreeKind::Ground) {
      std::vector<std::vector<Goal>> sets;
      for (const auto& a : l.atoms()) sets.push_back(engine->term_matching_step(a));
      Substitution id = Substitution::identity(0);
      for (const auto& g : distribute(sets, 0)) out.push_back({id, get(g)});
    } else if (l.empty()) {
      for_each_substitution(l.context(), engine->program().signature, engine->bounds().depth,
                            engine->bounds().max_target, [&](const Substitution& theta) {
                              out.push_back({theta, get(Goal({}, theta.target()))});
                            });
    } else {
      for (const auto& entry : engine->saturated_step(l.atoms().front())) {
        std::vector<std::vector<Goal>> sets{entry.bodies};
        bool ok = true;
        for (std::size_t i = 1; i < l.size() && ok; ++i) {
          const auto* bodies = engine->saturated_step(l.atoms()[i], entry.sigma);
          if (bodies) sets.push_back(*bodies);
          else ok = false;
        }
        if (!ok) continue;
        for (const auto& g : distribute(sets, entry.sigma.target()))
          out.push_back({entry.sigma, get(g)});
      }
    }
    sort_edges(out);
    return out;
  }
};

GoalTree build_with(const std::shared_ptr<StepEngine>& engine, GoalTreeKind kind, const Goal& l,
                    int d) {
  if (d < 0) throw std::invalid_argument("depth bound must be non-negative");
  auto b = std::make_shared<GoalBuilder>();
  b->engine = engine;
  b->kind = kind;
  const GNode* root = b->get(l);
  return GoalTree(root, kind, d, engine, b);
}

}  // namespace

GoalTree build_vtree_ground(const std::shared_ptr<StepEngine>& engine, const Goal& l, int d) {
  require_ground(engine->program(), l);
  return build_with(engine, GoalTreeKind::Ground, l, d);
}

GoalTree build_vtree_ground(const Program& p, const Goal& l, int d) {
  return build_vtree_ground(std::make_shared<StepEngine>(p, Bounds{0, 0}), l, d);
}

GoalTree build_saturated_vtree(const std::shared_ptr<StepEngine>& engine, const Goal& l, int d) {
  return build_with(engine, GoalTreeKind::Saturated, l, d);
}

GoalTree build_saturated_vtree(const Program& p, const Goal& l, int d, const Bounds& bounds) {
  return build_saturated_vtree(std::make_shared<StepEngine>(p, bounds), l, d);
}

namespace {

struct PtrPairHash {
  std::size_t operator()(const std::pair<const GNode*, const GNode*>& k) const {
    return hash_mix(std::hash<const void*>()(k.first), std::hash<const void*>()(k.second));
  }
};

struct ConcatStore {
  GoalTreeKind kind;
  GNodeArena arena;
  std::unordered_map<std::pair<const GNode*, const GNode*>, const GNode*, PtrPairHash> memo;

  const GNode* get(const GNode* a, const GNode* b) {
    auto it = memo.find({a, b});
    if (it != memo.end()) return it->second;
    const GNode* node = arena.make(concat(a->label(), b->label()), [this, a, b] {
      std::vector<GEdge> out;
      for (const auto& x : a->children())
        for (const auto& y : b->children())
          if (kind == GoalTreeKind::Ground || x.edge == y.edge) out.push_back({x.edge, get(x.node, y.node)});
      sort_edges(out);
      return out;
    });
    memo.emplace(std::make_pair(a, b), node);
    return node;
  }
};

GoalTree concat_with(const GoalTree& t1, const GoalTree& t2, GoalTreeKind kind) {
  if (t1.depth_bound() != t2.depth_bound())
    throw std::invalid_argument("concatenated trees must share a depth bound");
  if (t1.context() != t2.context())
    throw ContextError("concatenated trees must share a root context");
  if (kind == GoalTreeKind::Saturated && !(t1.bounds() == t2.bounds()))
    throw std::invalid_argument("concatenated saturated trees must share enumeration bounds");
  auto store = std::make_shared<ConcatStore>();
  store->kind = kind;
  store->arena.retain(t1.owner());
  store->arena.retain(t2.owner());
  const GNode* root = store->get(t1.root(), t2.root());
  return GoalTree(root, kind, t1.depth_bound(), t1.engine(), store);
}

}  // namespace

GoalTree concat_ground(const GoalTree& t1, const GoalTree& t2) {
  return concat_with(t1, t2, GoalTreeKind::Ground);
}

GoalTree concat_sat(const GoalTree& t1, const GoalTree& t2) {
  return concat_with(t1, t2, GoalTreeKind::Saturated);
}

GoalTree concat_all(const std::vector<GoalTree>& trees) {
  if (trees.empty()) throw std::invalid_argument("concat_all needs at least one tree");
  GoalTree acc = trees.front();
  for (std::size_t i = 1; i < trees.size(); ++i)
    acc = acc.kind() == GoalTreeKind::Ground ? concat_ground(acc, trees[i]) : concat_sat(acc, trees[i]);
  return acc;
}

namespace {

struct LabelLess {
  bool operator()(const OrNode& o, const Substitution& s) const { return o.label < s; }
  bool operator()(const Substitution& s, const OrNode& o) const { return s < o.label; }
};

struct ReprKey {
  std::vector<const AndNode*> nodes;
  int context;
  bool operator==(const ReprKey&) const = default;
};
struct ReprKeyHash {
  std::size_t operator()(const ReprKey& k) const {
    std::size_t h = static_cast<std::size_t>(k.context);
    for (const AndNode* n : k.nodes) h = hash_mix(h, std::hash<const void*>()(n));
    return h;
  }
};

struct ReprStore {
  GoalTreeKind kind;
  std::shared_ptr<StepEngine> engine;
  GNodeArena arena;
  std::unordered_map<ReprKey, const GNode*, ReprKeyHash> memo;

  const GNode* get(const std::vector<const AndNode*>& nodes, int context) {
    ReprKey key{nodes, context};
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    std::vector<Atom> atoms;
    for (const AndNode* n : nodes) atoms.push_back(n->label());
    const GNode* node =
        arena.make(Goal(std::move(atoms), context), [this, nodes, context] { return expand(nodes, context); });
    memo.emplace(std::move(key), node);
    return node;
  }

  std::vector<GEdge> expand(const std::vector<const AndNode*>& nodes, int context) {
    std::vector<GEdge> out;
    if (nodes.empty()) {
      if (kind == GoalTreeKind::Ground) {
        out.push_back({Substitution::identity(0), get({}, 0)});
      } else {
        for_each_substitution(context, engine->program().signature, engine->bounds().depth,
                              engine->bounds().max_target, [&](const Substitution& theta) {
                                out.push_back({theta, get({}, theta.target())});
                              });
      }
      sort_edges(out);
      return out;
    }
    const auto& first = nodes[0]->children();
    for (auto [b0, e0] : nodes[0]->label_runs()) {
      const Substitution& label = first[b0].label;
      std::vector<std::vector<const OrNode*>> choices(nodes.size());
      bool ok = true;
      for (std::size_t j = 0; j < nodes.size() && ok; ++j) {
        const auto& kids = nodes[j]->children();
        auto [lo, hi] = j == 0 ? std::make_pair(b0, e0) : nodes[j]->label_range(label);
        for (int i = lo; i < hi; ++i) choices[j].push_back(&kids[i]);
        ok = lo != hi;
      }
      if (!ok) continue;
      std::vector<const OrNode*> picks(nodes.size());
      std::function<void(std::size_t)> product = [&](std::size_t j) {
        if (j == nodes.size()) {
          std::vector<const AndNode*> next;
          for (const OrNode* o : picks) next.insert(next.end(), o->children.begin(), o->children.end());
          out.push_back({label, get(next, label.target())});
          return;
        }
        for (const OrNode* o : choices[j]) {
          picks[j] = o;
          product(j + 1);
        }
      };
      product(0);
    }
    sort_edges(out);
    return out;
  }
};

GoalTree repr_with(const AtomTree& t, GoalTreeKind kind) {
  auto store = std::make_shared<ReprStore>();
  store->kind = kind;
  store->engine = t.engine();
  store->arena.retain(t.owner());
  const GNode* root = store->get({t.root()}, t.context());
  return GoalTree(root, kind, t.effective_depth() / 2, t.engine(), store);
}

}  // namespace

GoalTree repr_ground(const AtomTree& t) { return repr_with(t, GoalTreeKind::Ground); }

GoalTree repr_sat(const AtomTree& t) { return repr_with(t, GoalTreeKind::Saturated); }

namespace {

struct GKey {
  const GNode* a;
  const GNode* b;
  int depth;
  bool operator==(const GKey&) const = default;
};
struct GKeyHash {
  std::size_t operator()(const GKey& k) const {
    return hash_mix(hash_mix(std::hash<const void*>()(k.a), std::hash<const void*>()(k.b)),
                    static_cast<std::size_t>(k.depth));
  }
};
using GMemo = std::unordered_map<GKey, std::optional<std::string>, GKeyHash>;

std::string describe(const GEdge& e) {
  return label_string(e.edge) + " -> " + to_string(e.node->label());
}

std::optional<std::string> diff_goal(const GNode* a, const GNode* b, int depth, int limit, GMemo& memo) {
  if (!(a->label() == b->label()))
    return "nodes at depth " + std::to_string(depth) + " differ: " + to_string(a->label()) + " vs " +
           to_string(b->label());
  if (depth >= limit || a == b) return std::nullopt;
  GKey key{a, b, depth};
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  const auto& ca = a->children();
  const auto& cb = b->children();
  std::optional<std::string> result;
  std::size_t i = 0, j = 0;
  auto where = "under " + to_string(a->label()) + " at depth " + std::to_string(depth) + ": ";
  while (!result && (i < ca.size() || j < cb.size())) {
    if (j == cb.size() || (i < ca.size() && edge_less(ca[i], cb[j]))) {
      result = where + "child " + describe(ca[i]) + " only in the first tree";
      break;
    }
    if (i == ca.size() || edge_less(cb[j], ca[i])) {
      result = where + "child " + describe(cb[j]) + " only in the second tree";
      break;
    }
    std::size_t ie = i, je = j;
    while (ie < ca.size() && same_key(ca[ie], ca[i])) ++ie;
    while (je < cb.size() && same_key(cb[je], cb[j])) ++je;
    if (ie - i == 1 && je - j == 1) {
      result = diff_goal(ca[i].node, cb[j].node, depth + 1, limit, memo);
    } else {
      // Set comparison within a run of equal (edge, label) children.
      auto covered = [&](const std::vector<GEdge>& xs, std::size_t xb, std::size_t xe,
                         const std::vector<GEdge>& ys, std::size_t yb, std::size_t ye, bool flip) {
        for (std::size_t x = xb; x < xe; ++x) {
          bool found = false;
          for (std::size_t y = yb; y < ye && !found; ++y)
            found = flip ? !diff_goal(ys[y].node, xs[x].node, depth + 1, limit, memo)
                         : !diff_goal(xs[x].node, ys[y].node, depth + 1, limit, memo);
          if (!found) return false;
        }
        return true;
      };
      if (!covered(ca, i, ie, cb, j, je, false) || !covered(cb, j, je, ca, i, ie, true))
        result = where + "subtrees under " + describe(ca[i]) + " differ";
    }
    i = ie;
    j = je;
  }
  memo[key] = result;
  return result;
}

}  // namespace

std::optional<std::string> goal_tree_difference(const GoalTree& a, const GoalTree& b) {
  if (a.depth_bound() != b.depth_bound())
    return "depth bounds differ: " + std::to_string(a.depth_bound()) + " vs " +
           std::to_string(b.depth_bound());
  GMemo memo;
  return diff_goal(a.root(), b.root(), 0, a.depth_bound(), memo);
}

bool goal_trees_equal(const GoalTree& a, const GoalTree& b) { return !goal_tree_difference(a, b); }

std::vector<std::string> audit(const GoalTree& t) {
  std::vector<std::string> issues;
  std::unordered_set<GKey, GKeyHash> seen;
  const Signature& sig = t.engine()->program().signature;
  std::function<void(const GNode*, int)> walk = [&](const GNode* node, int depth) {
    if (!t.expanded(depth) || !seen.insert({node, nullptr, depth}).second) return;
    const Goal& l = node->label();
    const auto& kids = node->children();
    std::string where = to_string(l) + " at depth " + std::to_string(depth);
    for (std::size_t i = 0; i < kids.size(); ++i) {
      const GEdge& e = kids[i];
      if (i > 0 && edge_less(e, kids[i - 1])) issues.push_back("unsorted children under " + where);
      if (t.kind() == GoalTreeKind::Ground && !e.edge.is_identity())
        issues.push_back("labelled edge " + label_string(e.edge) + " in a ground tree under " + where);
      if (e.edge.source() != l.context() || e.node->label().context() != e.edge.target())
        issues.push_back("edge " + to_string(e.edge) + " does not fit the contexts under " + where);
      walk(e.node, depth + 1);
    }
    if (l.empty()) {
      std::size_t loops = 0;
      for (const auto& e : kids) loops += e.node->label().empty() ? 1 : 0;
      std::uint64_t expected = t.kind() == GoalTreeKind::Ground
                                   ? 1
                                   : count_substitutions(l.context(), sig, t.bounds().depth,
                                                         t.bounds().max_target);
      if (loops != kids.size() || loops != expected)
        issues.push_back("[] node at depth " + std::to_string(depth) + " lacks its single [] child per edge");
    } else if (t.kind() == GoalTreeKind::Saturated) {
      // An edge theta exists iff every atom has a theta-indexed step.
      for_each_substitution(l.context(), sig, t.bounds().depth, t.bounds().max_target,
                            [&](const Substitution& theta) {
                              bool all = true;
                              for (const auto& a : l.atoms())
                                if (!t.engine()->saturated_step(a, theta)) all = false;
                              bool has = std::any_of(kids.begin(), kids.end(),
                                                     [&](const GEdge& e) { return e.edge == theta; });
                              if (all != has)
                                issues.push_back("synchronisation fails for " + label_string(theta) +
                                                 " at " + where);
                            });
    }
  };
  walk(t.root(), 0);
  return issues;
}

namespace {

struct PathKey {
  const GNode* node;
  Substitution answer;
  int depth;
  bool operator==(const PathKey& o) const {
    return node == o.node && depth == o.depth && answer == o.answer;
  }
};
struct PathKeyHash {
  std::size_t operator()(const PathKey& k) const {
    return hash_mix(hash_mix(std::hash<const void*>()(k.node), k.answer.hash()),
                    static_cast<std::size_t>(k.depth));
  }
};

}  // namespace

std::vector<RefutationPath> find_goal_refutations(const GoalTree& t,
                                                  const RefutationSearchOptions& options) {
  std::map<Substitution, RefutationPath> found;
  std::unordered_set<PathKey, PathKeyHash> visited;
  RefutationPath path;
  std::function<void(const GNode*, const Substitution&, int)> walk =
      [&](const GNode* node, const Substitution& answer, int depth) {
        if (!visited.insert({node, answer, depth}).second) return;
        path.nodes.push_back(node);
        if (node->label().empty() && !found.count(answer)) {
          RefutationPath r = path;
          r.answer = answer;
          found.emplace(answer, std::move(r));
        }
        if (depth < options.max_length && t.expanded(depth)) {
          for (const auto& e : node->children()) {
            Substitution next = compose(answer, e.edge);
            if (options.max_answer_depth && next.depth() > *options.max_answer_depth) continue;
            path.edges.push_back(e.edge);
            walk(e.node, next, depth + 1);
            path.edges.pop_back();
          }
        }
        path.nodes.pop_back();
      };
  walk(t.root(), Substitution::identity(t.context()), 0);
  std::vector<RefutationPath> out;
  for (auto& [answer, r] : found) out.push_back(std::move(r));
  return out;
}

std::vector<RefutationPath> find_goal_refutations(const GoalTree& t, int max_length) {
  return find_goal_refutations(t, RefutationSearchOptions{max_length, std::nullopt});
}

void validate_path(const GoalTree& t, const RefutationPath& r) {
  if (r.nodes.empty() || r.nodes.front() != t.root())
    throw std::invalid_argument("refutation path must start at the root");
  if (r.edges.size() + 1 != r.nodes.size())
    throw std::invalid_argument("refutation path needs one edge between consecutive nodes");
  if (!r.nodes.back()->label().empty())
    throw std::invalid_argument("refutation path must end in a node labelled []");
  Substitution answer = Substitution::identity(t.context());
  for (std::size_t i = 0; i < r.edges.size(); ++i) {
    if (!t.expanded(static_cast<int>(i))) throw std::invalid_argument("path leaves the truncation");
    const auto& kids = r.nodes[i]->children();
    bool ok = std::any_of(kids.begin(), kids.end(), [&](const GEdge& e) {
      return e.edge == r.edges[i] && e.node == r.nodes[i + 1];
    });
    if (!ok)
      throw std::invalid_argument("step " + std::to_string(i) + " (" + label_string(r.edges[i]) +
                                  ") is not an edge of the tree");
    answer = compose(answer, r.edges[i]);
  }
  if (!(answer == r.answer)) throw std::invalid_argument("recorded answer differs from the edges");
}

RefutationPath normalize_goal_refutation(const GoalTree& t, const RefutationPath& r) {
  validate_path(t, r);
  const std::size_t k = r.edges.size();
  if (k == 0) return r;
  const Substitution& theta = r.answer;
  const Substitution id = Substitution::identity(theta.target());
  // rho[i]: the edges after node i, composed.
  std::vector<Substitution> rho(k + 1);
  rho[k] = id;
  for (std::size_t i = k; i-- > 0;) rho[i] = compose(r.edges[i], rho[i + 1]);
  RefutationPath out;
  out.answer = theta;
  out.nodes.push_back(t.root());
  for (std::size_t i = 0; i < k; ++i) {
    const Substitution& edge = i == 0 ? theta : id;
    Goal expected = apply(r.nodes[i + 1]->label(), rho[i + 1]);
    const auto& kids = out.nodes.back()->children();
    auto it = std::find_if(kids.begin(), kids.end(), [&](const GEdge& e) {
      return e.edge == edge && e.node->label() == expected;
    });
    if (it == kids.end()) {
      std::string msg = "normalization: no edge " + label_string(edge) + " from " +
                        to_string(out.nodes.back()->label()) + " to " + to_string(expected);
      if (i == 0 && !within_bounds(theta, t.bounds().depth, t.bounds().max_target))
        msg += "; " + to_string(theta) + " lies outside the enumeration window";
      throw ClosureError(msg);
    }
    out.edges.push_back(edge);
    out.nodes.push_back(it->node);
  }
  return out;
}

}  // namespace lpsem
