#include "lpsem/atom_tree.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_set>

namespace lpsem {

namespace {

int compare_or(const OrNode& a, const OrNode& b) {
  if (int c = compare(a.label, b.label)) return c;
  std::size_t n = std::min(a.children.size(), b.children.size());
  for (std::size_t i = 0; i < n; ++i)
    if (int c = compare(a.children[i]->label(), b.children[i]->label())) return c;
  if (a.children.size() == b.children.size()) return 0;
  return a.children.size() < b.children.size() ? -1 : 1;
}

struct LabelLess {
  bool operator()(const OrNode& o, const Substitution& s) const { return o.label < s; }
  bool operator()(const Substitution& s, const OrNode& o) const { return s < o.label; }
};

void sort_or_nodes(std::vector<OrNode>& v) {
  std::sort(v.begin(), v.end(), [](const OrNode& a, const OrNode& b) { return compare_or(a, b) < 0; });
  v.erase(std::unique(v.begin(), v.end(),
                      [](const OrNode& a, const OrNode& b) {
                        return compare_or(a, b) == 0 && a.children == b.children;
                      }),
          v.end());
}

void sort_goals(std::vector<Goal>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

std::vector<Goal> matching_bodies(const Program& p, const Atom& a, const Bounds& bounds) {
  std::vector<Goal> out;
  for (const auto& c : p.clauses) {
    if (!(c.head.predicate() == a.predicate())) continue;
    for (auto& m : clause_step_matchers(a, c, p.signature, bounds)) out.push_back(std::move(m.body));
  }
  sort_goals(out);
  return out;
}

// Deepest position of each variable of t, offset by `at`.
void var_depths(const Term& t, int at, std::vector<int>& depth) {
  if (t->is_var()) {
    depth[t->var() - 1] = std::max(depth[t->var() - 1], at);
    return;
  }
  for (const auto& c : t->args()) var_depths(c, at + 1, depth);
}

// A sigma has bodies only if A sigma is an instance of a head H, i.e. sigma
// factors as sigma0;rho through mgu(A, H). rho is fixed by sigma on the
// variables of sigma0, and depth(sigma0;rho) <= D bounds each rho(v) by D
// minus the depth at which v occurs, so the candidates are enumerated per
// clause instead of over the whole window.
std::vector<SatEntry> saturated_entries(const Program& p, const Atom& a, const Bounds& window,
                                        const Bounds& body_bounds) {
  std::vector<Substitution> candidates;
  std::map<std::pair<int, int>, std::vector<Term>> pools;
  auto pool = [&](int m, int d) -> const std::vector<Term>& {
    auto it = pools.find({m, d});
    if (it == pools.end()) it = pools.emplace(std::make_pair(m, d), terms_up_to_depth(p.signature, m, d)).first;
    return it->second;
  };
  for (const auto& c : p.clauses) {
    if (c.head.predicate() != a.predicate()) continue;
    auto u = mgu(a, c.head);
    if (!u || u->sigma.depth() > window.depth) continue;
    const Substitution& s0 = u->sigma;
    std::vector<int> depth(s0.target(), -1);
    for (const auto& t : s0.terms()) var_depths(t, 0, depth);
    int k = 0;
    while (k < s0.target() && depth[k] >= 0) ++k;  // the variables of sigma0 are 1..k
    for (int m = 0; m <= window.max_target; ++m) {
      std::vector<const std::vector<Term>*> choices(k);
      bool empty = false;
      for (int v = 0; v < k; ++v) {
        choices[v] = &pool(m, window.depth - depth[v]);
        empty = empty || choices[v]->empty();
      }
      if (empty) continue;
      std::vector<std::size_t> idx(k, 0);
      std::vector<Term> rho(k);
      while (true) {
        for (int v = 0; v < k; ++v) rho[v] = (*choices[v])[idx[v]];
        std::vector<Term> terms;
        terms.reserve(s0.source());
        for (const auto& t : s0.terms()) terms.push_back(substitute(t, rho));
        candidates.emplace_back(std::move(terms), m);
        int v = k - 1;
        while (v >= 0 && ++idx[v] == choices[v]->size()) idx[v--] = 0;
        if (v < 0) break;
      }
    }
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  std::vector<SatEntry> out;
  for (auto& sigma : candidates) {
    auto bodies = matching_bodies(p, apply(a, sigma), body_bounds);
    if (!bodies.empty()) out.push_back({std::move(sigma), std::move(bodies)});
  }
  return out;
}

}  // namespace

std::vector<Goal> ground_step(const Program& p, const Atom& a) {
  if (!is_ground(p)) throw GroundnessError("ground_step: the program is not ground");
  if (!is_ground(a)) throw GroundnessError("ground_step: " + to_string(a) + " is not ground");
  std::vector<Goal> out;
  for (const auto& c : p.clauses)
    if (c.head.predicate() == a.predicate() && equal_terms(c.head.args(), a.args()))
      out.emplace_back(c.body, 0);
  sort_goals(out);
  return out;
}

std::vector<Goal> term_matching_step(const Program& p, const Atom& a, const Bounds& bounds) {
  return matching_bodies(p, a, bounds);
}

std::vector<SatEntry> saturated_step(const Program& p, const Atom& a, const Bounds& bounds) {
  return saturated_entries(p, a, bounds, bounds);
}

const std::vector<OrNode>& AndNode::children() const {
  if (!children_) {
    children_ = expand_();
    expand_ = nullptr;
  }
  return *children_;
}

struct AndNode::RunIndex {
  struct PtrHash {
    std::size_t operator()(const Substitution* s) const { return s->hash(); }
  };
  struct PtrEq {
    bool operator()(const Substitution* a, const Substitution* b) const { return *a == *b; }
  };
  std::vector<std::pair<int, int>> runs;
  std::unordered_map<const Substitution*, std::pair<int, int>, PtrHash, PtrEq> index;
};

const std::vector<std::pair<int, int>>& AndNode::label_runs() const {
  if (!runs_) {
    const auto& kids = children();
    auto idx = std::make_shared<RunIndex>();
    for (int i = 0, k = static_cast<int>(kids.size()); i < k;) {
      int j = i + 1;
      while (j < k && kids[j].label == kids[i].label) ++j;
      idx->runs.push_back({i, j});
      idx->index.emplace(&kids[i].label, std::make_pair(i, j));
      i = j;
    }
    runs_ = std::move(idx);
  }
  return runs_->runs;
}

std::pair<int, int> AndNode::label_range(const Substitution& label) const {
  label_runs();
  auto it = runs_->index.find(&label);
  return it == runs_->index.end() ? std::make_pair(0, 0) : it->second;
}

const AndNode* NodeArena::make(Atom label, AndNode::Expander expand) {
  nodes_.emplace_back(std::move(label), std::move(expand));
  return &nodes_.back();
}

StepEngine::StepEngine(Program p, Bounds b) : program_(std::move(p)), bounds_(b) {}

const std::vector<StepEngine::MguEntry>& StepEngine::mgu_step(const Atom& a) {
  auto it = mgu_.find(a);
  if (it != mgu_.end()) return it->second;
  std::vector<MguEntry> out;
  for (const auto& c : program_.clauses) {
    auto u = mgu(a, c.head);
    if (!u) continue;
    std::vector<Atom> body;
    for (const auto& b : c.body) body.push_back(apply(b, u->tau));
    out.push_back({u->sigma, Goal(std::move(body), u->sigma.target())});
  }
  return mgu_.emplace(a, std::move(out)).first->second;
}

const std::vector<Goal>& StepEngine::term_matching_step(const Atom& a) {
  auto it = matching_.find(a);
  if (it != matching_.end()) return it->second;
  return matching_.emplace(a, matching_bodies(program_, a, bounds_)).first->second;
}

const std::vector<SatEntry>& StepEngine::saturated_step(const Atom& a) {
  auto it = saturated_.find(a);
  if (it == saturated_.end()) {
    SatCache cache;
    cache.entries = saturated_entries(program_, a, bounds_, bounds_);
    for (std::size_t i = 0; i < cache.entries.size(); ++i)
      cache.index.emplace(cache.entries[i].sigma, i);
    it = saturated_.emplace(a, std::move(cache)).first;
  }
  return it->second.entries;
}

const std::vector<Goal>* StepEngine::saturated_step(const Atom& a, const Substitution& sigma) {
  saturated_step(a);
  const SatCache& cache = saturated_.at(a);
  auto it = cache.index.find(sigma);
  return it == cache.index.end() ? nullptr : &cache.entries[it->second].bodies;
}

std::vector<SatEntry> StepEngine::saturated_step_with(const Atom& a, const Bounds& b) {
  return saturated_entries(program_, a, b, bounds_);
}

const AndNode* StepEngine::mgu_node(const Atom& a) {
  auto it = mgu_nodes_.find(a);
  if (it != mgu_nodes_.end()) return it->second;
  const AndNode* node = arena_.make(a, [this, a] {
    std::vector<OrNode> out;
    for (const auto& e : mgu_step(a)) {
      OrNode o{e.sigma, {}};
      for (const auto& b : e.body.atoms()) o.children.push_back(mgu_node(b));
      out.push_back(std::move(o));
    }
    sort_or_nodes(out);
    return out;
  });
  mgu_nodes_.emplace(a, node);
  return node;
}

const AndNode* StepEngine::coinductive_node(const Atom& a) {
  auto it = coinductive_nodes_.find(a);
  if (it != coinductive_nodes_.end()) return it->second;
  const AndNode* node = arena_.make(a, [this, a] {
    std::vector<OrNode> out;
    Substitution id = Substitution::identity(a.context());
    for (const auto& body : term_matching_step(a)) {
      OrNode o{id, {}};
      for (const auto& b : body.atoms()) o.children.push_back(coinductive_node(b));
      out.push_back(std::move(o));
    }
    sort_or_nodes(out);
    return out;
  });
  coinductive_nodes_.emplace(a, node);
  return node;
}

std::vector<OrNode> StepEngine::saturated_children(const std::vector<SatEntry>& entries) {
  std::vector<OrNode> out;
  for (const auto& e : entries)
    for (const auto& body : e.bodies) {
      OrNode o{e.sigma, {}};
      for (const auto& b : body.atoms()) o.children.push_back(saturated_node(b));
      out.push_back(std::move(o));
    }
  sort_or_nodes(out);
  return out;
}

const AndNode* StepEngine::saturated_node(const Atom& a) {
  auto it = saturated_nodes_.find(a);
  if (it != saturated_nodes_.end()) return it->second;
  const AndNode* node =
      arena_.make(a, [this, a] { return saturated_children(saturated_step(a)); });
  saturated_nodes_.emplace(a, node);
  return node;
}

const char* to_string(TreeKind k) {
  switch (k) {
    case TreeKind::GroundMgu: return "ground-mgu";
    case TreeKind::Coinductive: return "coinductive";
    case TreeKind::Saturated: return "saturated";
  }
  return "?";
}

AtomTree build_andor_tree(const std::shared_ptr<StepEngine>& engine, const Atom& a, int d) {
  if (d < 0) throw std::invalid_argument("depth bound must be non-negative");
  return AtomTree(engine->mgu_node(a), TreeKind::GroundMgu, d, engine, engine);
}

AtomTree build_coinductive_tree(const std::shared_ptr<StepEngine>& engine, const Atom& a, int d) {
  if (d < 0) throw std::invalid_argument("depth bound must be non-negative");
  return AtomTree(engine->coinductive_node(a), TreeKind::Coinductive, d, engine, engine);
}

AtomTree build_saturated_avtree(const std::shared_ptr<StepEngine>& engine, const Atom& a, int d,
                                std::optional<int> root_depth) {
  if (d < 0) throw std::invalid_argument("depth bound must be non-negative");
  if (!root_depth || *root_depth == engine->bounds().depth)
    return AtomTree(engine->saturated_node(a), TreeKind::Saturated, d, engine, engine,
                    std::nullopt, true);
  Bounds window{*root_depth, engine->bounds().max_target};
  auto arena = std::make_shared<NodeArena>();
  arena->retain(engine);
  StepEngine* e = engine.get();
  const AndNode* root =
      arena->make(a, [e, a, window] { return e->saturated_children(e->saturated_step_with(a, window)); });
  return AtomTree(root, TreeKind::Saturated, d, engine, arena, window, true);
}

std::vector<OrNode> AtomTree::root_children_labelled(const Substitution& label) const {
  if (generated_root_) {
    Bounds w = root_window();
    if (label.source() != context() || !within_bounds(label, w.depth, w.max_target)) return {};
    Atom instance = apply(root_->label(), label);
    const auto& bodies = engine_->term_matching_step(instance);
    if (bodies.empty()) return {};
    return engine_->saturated_children({SatEntry{label, bodies}});
  }
  std::vector<OrNode> out;
  for (const auto& o : root_->children())
    if (o.label == label) out.push_back(o);
  return out;
}

AtomTree build_andor_tree(const Program& p, const Atom& a, int d) {
  return build_andor_tree(std::make_shared<StepEngine>(p, Bounds{}), a, d);
}

AtomTree build_coinductive_tree(const Program& p, const Atom& a, int d, const Bounds& bounds) {
  return build_coinductive_tree(std::make_shared<StepEngine>(p, bounds), a, d);
}

AtomTree build_saturated_avtree(const Program& p, const Atom& a, int d, const Bounds& bounds,
                                std::optional<int> root_depth) {
  return build_saturated_avtree(std::make_shared<StepEngine>(p, bounds), a, d, root_depth);
}

ThetaBarResult theta_bar_report(const AtomTree& t, const Substitution& theta) {
  if (t.kind() != TreeKind::Saturated)
    throw std::invalid_argument("theta_bar expects a saturated tree");
  if (theta.source() != t.context())
    throw ContextError("theta_bar: " + to_string(theta) + " does not start at the root context " +
                       std::to_string(t.context()));
  Bounds window = t.root_window();
  std::vector<OrNode> children;
  std::vector<Substitution> missing;
  const Bounds& inner = t.bounds();
  bool covered = window.depth >= inner.depth + theta.depth() && window.max_target >= inner.max_target;
  bool materialized = t.root()->expanded() || !t.generated_root();
  if (t.expanded(0) && covered && materialized) {
    // Every theta;sigma lies in the root window, so the relabelled children
    // are the root children whose label factors through theta.
    for (const auto& o : t.root()->children()) {
      if (o.label.target() > inner.max_target) continue;
      std::vector<Term> binding(theta.target());
      bool ok = true;
      for (int i = 0; ok && i < theta.source(); ++i) ok = match_term(theta[i], o.label[i], binding);
      if (!ok) continue;
      std::vector<int> free;
      for (int v = 0; v < theta.target(); ++v) {
        if (!binding[v]) free.push_back(v);
        else ok = ok && binding[v]->depth() <= inner.depth;
      }
      if (!ok) continue;
      std::vector<Term> pool =
          free.empty() ? std::vector<Term>{}
                       : terms_up_to_depth(t.engine()->program().signature, o.label.target(), inner.depth);
      if (!free.empty() && pool.empty()) continue;
      std::vector<std::size_t> idx(free.size(), 0);
      while (true) {
        for (std::size_t k = 0; k < free.size(); ++k) binding[free[k]] = pool[idx[k]];
        children.push_back({Substitution(binding, o.label.target()), o.children});
        std::size_t k = free.size();
        while (k > 0 && ++idx[k - 1] == pool.size()) idx[--k] = 0;
        if (k == 0) break;
      }
    }
    sort_or_nodes(children);
  } else if (t.expanded(0)) {
    // Only sigmas for which A theta sigma has bodies can select or-nodes;
    // each theta;sigma is looked up without expanding the whole root.
    Atom instance = apply(t.root()->label(), theta);
    for (const auto& e : t.engine()->saturated_step_with(instance, inner)) {
      Substitution label = compose(theta, e.sigma);
      if (!within_bounds(label, window.depth, window.max_target)) {
        missing.push_back(label);
        continue;
      }
      for (auto& o : t.root_children_labelled(label)) children.push_back({e.sigma, std::move(o.children)});
    }
    sort_or_nodes(children);
  }
  auto arena = std::make_shared<NodeArena>();
  arena->retain(t.owner());
  const AndNode* root = arena->make(apply(t.root()->label(), theta),
                                    [children = std::move(children)] { return children; });
  return {AtomTree(root, TreeKind::Saturated, t.depth_bound(), t.engine(), arena), std::move(missing)};
}

AtomTree theta_bar(const AtomTree& t, const Substitution& theta) {
  return theta_bar_report(t, theta).tree;
}

namespace {

struct Desaturated {
  NodeArena arena;
  std::unordered_map<const AndNode*, const AndNode*> map;

  const AndNode* get(const AndNode* src) {
    auto it = map.find(src);
    if (it != map.end()) return it->second;
    const AndNode* node = arena.make(src->label(), [this, src] {
      std::vector<OrNode> out;
      for (const auto& o : src->children()) {
        if (!o.label.is_identity()) continue;
        OrNode copy{o.label, {}};
        for (const AndNode* c : o.children) copy.children.push_back(get(c));
        out.push_back(std::move(copy));
      }
      return out;
    });
    map.emplace(src, node);
    return node;
  }
};

}  // namespace

AtomTree desaturate(const AtomTree& t) {
  auto state = std::make_shared<Desaturated>();
  state->arena.retain(t.owner());
  const AndNode* root = state->get(t.root());
  return AtomTree(root, TreeKind::Coinductive, t.depth_bound(), t.engine(), state);
}

namespace {

struct PairKey {
  const AndNode* a;
  const AndNode* b;
  int depth;
  bool operator==(const PairKey&) const = default;
};
struct PairKeyHash {
  std::size_t operator()(const PairKey& k) const {
    return hash_mix(hash_mix(std::hash<const void*>()(k.a), std::hash<const void*>()(k.b)),
                    static_cast<std::size_t>(k.depth));
  }
};

std::string labels_of(const OrNode& o) {
  std::string s = label_string(o.label) + " -> [";
  for (std::size_t i = 0; i < o.children.size(); ++i) {
    if (i) s += ",";
    s += to_string(o.children[i]->label());
  }
  return s + "]";
}

std::optional<std::string> diff_and(const AndNode* a, const AndNode* b, int depth, int limit,
                                    std::unordered_set<PairKey, PairKeyHash>& same) {
  // Keyed by the remaining depth, so entries carry over between trees.
  if (!(a->label() == b->label()))
    return "and-nodes at depth " + std::to_string(depth) + " differ: " + to_string(a->label()) +
           " vs " + to_string(b->label());
  if (depth >= limit || a == b) return std::nullopt;
  if (depth > 0 && same.count({a, b, limit - depth})) return std::nullopt;
  const auto& ca = a->children();
  const auto& cb = b->children();
  std::size_t n = std::min(ca.size(), cb.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (!(ca[i].label == cb[i].label) || ca[i].children.size() != cb[i].children.size())
      return "under " + to_string(a->label()) + " at depth " + std::to_string(depth) +
             ": or-child " + labels_of(ca[i]) + " vs " + labels_of(cb[i]);
    for (std::size_t j = 0; j < ca[i].children.size(); ++j)
      if (auto d = diff_and(ca[i].children[j], cb[i].children[j], depth + 2, limit, same))
        return d;
  }
  if (ca.size() != cb.size()) {
    const OrNode& extra = ca.size() > cb.size() ? ca[n] : cb[n];
    return "under " + to_string(a->label()) + " at depth " + std::to_string(depth) + ": " +
           std::to_string(ca.size()) + " vs " + std::to_string(cb.size()) +
           " or-children, first unmatched " + labels_of(extra);
  }
  if (depth > 0) same.insert({a, b, limit - depth});
  return std::nullopt;
}

}  // namespace

struct TreeDiffCache::Impl {
  std::unordered_set<PairKey, PairKeyHash> same;
};
TreeDiffCache::TreeDiffCache() : impl(std::make_unique<Impl>()) {}
TreeDiffCache::~TreeDiffCache() = default;

std::optional<std::string> tree_difference(const AtomTree& a, const AtomTree& b, TreeDiffCache& cache) {
  if (a.effective_depth() != b.effective_depth())
    return "depth bounds differ: " + std::to_string(a.depth_bound()) + " vs " +
           std::to_string(b.depth_bound());
  return diff_and(a.root(), b.root(), 0, a.effective_depth(), cache.impl->same);
}

std::optional<std::string> tree_difference(const AtomTree& a, const AtomTree& b) {
  TreeDiffCache cache;
  return tree_difference(a, b, cache);
}

bool trees_equal(const AtomTree& a, const AtomTree& b) { return !tree_difference(a, b); }

std::vector<std::string> audit(const AtomTree& t) {
  std::vector<std::string> issues;
  std::set<std::pair<const AndNode*, int>> seen;
  int n = t.context();
  std::function<void(const AndNode*, int)> walk = [&](const AndNode* node, int depth) {
    if (!t.expanded(depth) || !seen.insert({node, depth}).second) return;
    const Atom& a = node->label();
    const auto& kids = node->children();
    for (std::size_t i = 0; i < kids.size(); ++i) {
      const OrNode& o = kids[i];
      std::string where = to_string(a) + " at depth " + std::to_string(depth);
      if (i > 0 && compare_or(kids[i - 1], o) > 0) issues.push_back("unsorted or-children under " + where);
      if (o.label.source() != a.context())
        issues.push_back("or-label " + to_string(o.label) + " does not start at the context of " + where);
      if (t.kind() == TreeKind::Coinductive) {
        if (!o.label.is_identity() || a.context() != n)
          issues.push_back("non-identity label or foreign context under " + where);
      }
      for (const AndNode* c : o.children) {
        if (c->label().context() != o.label.target())
          issues.push_back("child " + to_string(c->label()) + " not in the target context of " +
                           to_string(o.label));
        walk(c, depth + 2);
      }
    }
  };
  walk(t.root(), 0);
  return issues;
}

namespace {

struct SearchKey {
  std::vector<const AndNode*> nodes;
  Substitution answer;
  int level;
  bool operator==(const SearchKey& o) const {
    return level == o.level && nodes == o.nodes && answer == o.answer;
  }
};
struct SearchKeyHash {
  std::size_t operator()(const SearchKey& k) const {
    std::size_t h = hash_mix(k.answer.hash(), static_cast<std::size_t>(k.level));
    for (const AndNode* n : k.nodes) h = hash_mix(h, std::hash<const void*>()(n));
    return h;
  }
};


class SynchedSearch {
 public:
  SynchedSearch(const AtomTree& t, const SynchedSearchOptions& o) : tree_(t), options_(o) {}

  void run() {
    std::vector<SynchedLevel> path;
    explore({tree_.root()}, Substitution::identity(tree_.context()), 0, path);
  }
  std::map<Substitution, SynchedSubtree> results;

 private:
  void explore(const std::vector<const AndNode*>& nodes, const Substitution& answer, int level,
               std::vector<SynchedLevel>& path) {
    if (nodes.empty()) {
      results.try_emplace(answer, SynchedSubtree{path, answer});
      return;
    }
    if (!tree_.expanded(2 * level) || 2 * level + 1 > options_.max_depth) return;
    SearchKey key{nodes, answer, level};
    std::sort(key.nodes.begin(), key.nodes.end());
    if (!visited_.insert(std::move(key)).second) return;

    // Labels offered by every node; children are sorted by label.
    const auto& first = nodes[0]->children();
    for (auto [b0, e0] : nodes[0]->label_runs()) {
      const Substitution* label = &first[b0].label;
      std::vector<std::pair<int, int>> choices(nodes.size());
      choices[0] = {b0, e0};
      bool common = true;
      for (std::size_t j = 1; j < nodes.size() && common; ++j) {
        choices[j] = nodes[j]->label_range(*label);
        common = choices[j].first != choices[j].second;
      }
      if (!common) continue;
      Substitution next_answer = compose(answer, *label);
      if (options_.max_answer_depth && next_answer.depth() > *options_.max_answer_depth) continue;
      std::vector<int> picks(nodes.size());
      std::vector<std::vector<const AndNode*>> chosen(nodes.size());
      std::function<void(std::size_t)> product = [&](std::size_t j) {
        if (j == nodes.size()) {
          std::vector<const AndNode*> next;
          for (std::size_t k = 0; k < nodes.size(); ++k) {
            const auto& o = nodes[k]->children()[picks[k]];
            chosen[k] = o.children;
            next.insert(next.end(), o.children.begin(), o.children.end());
          }
          path.push_back({*label, nodes, chosen});
          explore(next, next_answer, level + 1, path);
          path.pop_back();
          return;
        }
        for (int c = choices[j].first; c < choices[j].second; ++c) {
          picks[j] = c;
          product(j + 1);
        }
      };
      product(0);
    }
  }

  const AtomTree& tree_;
  SynchedSearchOptions options_;
  std::unordered_set<SearchKey, SearchKeyHash> visited_;
};

}  // namespace

std::vector<SynchedSubtree> find_synched_refutations(const AtomTree& t,
                                                     const SynchedSearchOptions& options) {
  SynchedSearch search(t, options);
  search.run();
  std::vector<SynchedSubtree> out;
  for (auto& [answer, s] : search.results) out.push_back(std::move(s));
  return out;
}

std::vector<SynchedSubtree> find_synched_refutations(const AtomTree& t, int max_depth) {
  return find_synched_refutations(t, SynchedSearchOptions{max_depth, std::nullopt});
}

std::optional<SynchedSubtree> follow_synched(const AtomTree& t,
                                             const std::vector<Substitution>& labels) {
  SynchedSubtree s;
  s.answer = Substitution::identity(t.context());
  std::vector<const AndNode*> nodes{t.root()};
  for (std::size_t level = 0; level < labels.size(); ++level) {
    if (nodes.empty() || !t.expanded(2 * static_cast<int>(level))) return std::nullopt;
    SynchedLevel l{labels[level], nodes, {}};
    std::vector<const AndNode*> next;
    for (const AndNode* n : nodes) {
      const auto& kids = n->children();
      auto it = std::find_if(kids.begin(), kids.end(),
                             [&](const OrNode& o) { return o.label == labels[level]; });
      if (it == kids.end()) return std::nullopt;
      l.chosen.push_back(it->children);
      next.insert(next.end(), it->children.begin(), it->children.end());
    }
    s.answer = compose(s.answer, labels[level]);
    s.levels.push_back(std::move(l));
    nodes = std::move(next);
  }
  if (!nodes.empty()) return std::nullopt;
  return s;
}

namespace {

std::vector<OrNode> children_labelled(const AtomTree& t, const AndNode* node, const Substitution& label) {
  if (node == t.root()) return t.root_children_labelled(label);
  std::vector<OrNode> out;
  for (const auto& o : node->children())
    if (o.label == label) out.push_back(o);
  return out;
}

}  // namespace

void validate_synched(const AtomTree& t, const SynchedSubtree& s) {
  std::vector<const AndNode*> nodes{t.root()};
  Substitution answer = Substitution::identity(t.context());
  for (std::size_t i = 0; i < s.levels.size(); ++i) {
    const SynchedLevel& l = s.levels[i];
    std::string where = "level " + std::to_string(i);
    bool same_nodes = i == 0 ? l.nodes.size() == 1 && l.nodes[0]->label() == t.root()->label()
                             : l.nodes == nodes;
    if (!same_nodes) throw std::invalid_argument(where + ": and-nodes do not follow the tree");
    if (l.chosen.size() != nodes.size())
      throw std::invalid_argument(where + ": one or-child per and-node is required");
    if (!t.expanded(2 * static_cast<int>(i))) throw std::invalid_argument(where + ": beyond the truncation");
    std::vector<const AndNode*> next;
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      auto candidates = children_labelled(t, nodes[j], l.label);
      bool ok = std::any_of(candidates.begin(), candidates.end(),
                            [&](const OrNode& o) { return o.children == l.chosen[j]; });
      if (!ok)
        throw std::invalid_argument(where + ": " + to_string(nodes[j]->label()) + " has no or-child " +
                                    label_string(l.label) + " with the recorded children");
      next.insert(next.end(), l.chosen[j].begin(), l.chosen[j].end());
    }
    answer = compose(answer, l.label);
    nodes = std::move(next);
  }
  if (!nodes.empty()) throw std::invalid_argument("subtree has unrefuted and-nodes");
  if (!(answer == s.answer)) throw std::invalid_argument("recorded answer differs from the labels");
}

NormalizedRefutation normalize_synched_refutation(const AtomTree& t, const SynchedSubtree& s) {
  validate_synched(t, s);
  const Substitution& theta = s.answer;
  const int m = theta.target();
  const std::size_t levels = s.levels.size();
  // rho[i]: composition of the labels of levels i, i+1, ...
  std::vector<Substitution> rho(levels + 1);
  rho[levels] = Substitution::identity(m);
  for (std::size_t i = levels; i-- > 0;) rho[i] = compose(s.levels[i].label, rho[i + 1]);

  ThetaBarResult tb = theta_bar_report(t, theta);
  const Substitution id = Substitution::identity(m);
  NormalizedRefutation out{tb.tree, SynchedSubtree{{}, id}, theta};
  std::vector<const AndNode*> nodes{tb.tree.root()};
  for (std::size_t i = 0; i < levels; ++i) {
    const SynchedLevel& src = s.levels[i];
    SynchedLevel level{id, nodes, {}};
    std::vector<const AndNode*> next;
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      std::vector<Atom> expected;
      for (const AndNode* c : src.chosen[j]) expected.push_back(apply(c->label(), rho[i + 1]));
      const auto& kids = nodes[j]->children();
      auto it = std::find_if(kids.begin(), kids.end(), [&](const OrNode& o) {
        if (!(o.label == id) || o.children.size() != expected.size()) return false;
        for (std::size_t k = 0; k < expected.size(); ++k)
          if (!(o.children[k]->label() == expected[k])) return false;
        return true;
      });
      if (it == kids.end()) {
        std::string msg = "normalization: " + to_string(nodes[j]->label()) + " has no or-child " +
                          label_string(id) + " with the expected children";
        Bounds w = t.root_window();
        if (i == 0 && !within_bounds(theta, w.depth, w.max_target))
          msg += "; the answer " + label_string(theta) + " lies outside the root window";
        throw ClosureError(msg);
      }
      level.chosen.push_back(it->children);
      next.insert(next.end(), it->children.begin(), it->children.end());
    }
    out.subtree.levels.push_back(std::move(level));
    nodes = std::move(next);
  }
  return out;
}

}  // namespace lpsem
