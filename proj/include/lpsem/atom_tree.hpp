#pragma once

#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "lpsem/program.hpp"
#include "lpsem/term.hpp"
#include "lpsem/unify.hpp"

namespace lpsem {

/// Raised when a program or atom is not ground where a ground-only
/// semantics is requested.
class GroundnessError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a construction needs a substitution outside the enumeration
/// window it was given.
class ClosureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// p(A): bodies of the clauses whose head equals A. Ground only.
std::vector<Goal> ground_step(const Program& p, const Atom& a);

/// Bodies reachable from A by term-matching, body-only variables enumerated
/// within `bounds`; sorted, duplicate-free.
std::vector<Goal> term_matching_step(const Program& p, const Atom& a, const Bounds& bounds);

/// One entry of the saturated step: sigma and the term-matching bodies of
/// A sigma. Substitutions with no body are omitted.
struct SatEntry {
  Substitution sigma;
  std::vector<Goal> bodies;
};

/// sigma -> term_matching_step(A sigma) over the enumeration window, sorted
/// by sigma; sigmas mapped to the empty set are left out.
std::vector<SatEntry> saturated_step(const Program& p, const Atom& a, const Bounds& bounds);

class AndNode;

struct OrNode {
  Substitution label;
  std::vector<const AndNode*> children;
};

/// Atom-labelled node. Children are expanded on first access; nodes with
/// the same label inside one builder are shared.
class AndNode {
 public:
  using Expander = std::function<std::vector<OrNode>()>;
  AndNode(Atom label, Expander expand) : label_(std::move(label)), expand_(std::move(expand)) {}

  const Atom& label() const { return label_; }
  const std::vector<OrNode>& children() const;
  bool expanded() const { return children_.has_value(); }
  /// Maximal ranges [begin, end) of equally labelled or-children, in order.
  const std::vector<std::pair<int, int>>& label_runs() const;
  /// The range of or-children labelled `label`; empty when there is none.
  std::pair<int, int> label_range(const Substitution& label) const;

 private:
  struct RunIndex;
  Atom label_;
  mutable std::optional<std::vector<OrNode>> children_;
  mutable Expander expand_;
  mutable std::shared_ptr<const RunIndex> runs_;
};

/// Owns nodes and keeps the structures they point into alive.
class NodeArena {
 public:
  const AndNode* make(Atom label, AndNode::Expander expand);
  void retain(std::shared_ptr<const void> p) { retained_.push_back(std::move(p)); }

 private:
  std::deque<AndNode> nodes_;
  std::vector<std::shared_ptr<const void>> retained_;
};

/// Shared per-(program, bounds) caches for all step functions, plus the
/// memoized nodes of the three tree kinds.
class StepEngine {
 public:
  StepEngine(Program p, Bounds b);

  const Program& program() const { return program_; }
  const Bounds& bounds() const { return bounds_; }

  struct MguEntry {
    Substitution sigma;
    Goal body;
  };
  const std::vector<MguEntry>& mgu_step(const Atom& a);
  const std::vector<Goal>& term_matching_step(const Atom& a);
  const std::vector<SatEntry>& saturated_step(const Atom& a);
  /// Bodies of A sigma, or nullptr when sigma has none (or is outside the window).
  const std::vector<Goal>* saturated_step(const Atom& a, const Substitution& sigma);
  /// Uncached saturated step over another window.
  std::vector<SatEntry> saturated_step_with(const Atom& a, const Bounds& b);

  const AndNode* mgu_node(const Atom& a);
  const AndNode* coinductive_node(const Atom& a);
  const AndNode* saturated_node(const Atom& a);
  /// OrNodes of the saturated kind for the given entries.
  std::vector<OrNode> saturated_children(const std::vector<SatEntry>& entries);

 private:
  struct SatCache {
    std::vector<SatEntry> entries;
    std::unordered_map<Substitution, std::size_t, SubstitutionHash> index;
  };
  Program program_;
  Bounds bounds_;
  std::unordered_map<Atom, std::vector<MguEntry>, AtomHash> mgu_;
  std::unordered_map<Atom, std::vector<Goal>, AtomHash> matching_;
  std::unordered_map<Atom, SatCache, AtomHash> saturated_;
  std::unordered_map<Atom, const AndNode*, AtomHash> mgu_nodes_, coinductive_nodes_,
      saturated_nodes_;
  NodeArena arena_;
};

enum class TreeKind { GroundMgu, Coinductive, Saturated };
const char* to_string(TreeKind k);

/// A lazily expanded tree truncated at depth d: the and-node at depth k is
/// expanded iff k < d (and-nodes sit at even depths, so an odd d acts as
/// d + 1). Unexpanded and-nodes are the frontier.
class AtomTree {
 public:
  AtomTree(const AndNode* root, TreeKind kind, int depth_bound,
           std::shared_ptr<StepEngine> engine, std::shared_ptr<const void> owner,
           std::optional<Bounds> root_bounds = std::nullopt, bool generated_root = false)
      : root_(root), kind_(kind), depth_bound_(depth_bound), engine_(std::move(engine)),
        root_bounds_(root_bounds), owner_(std::move(owner)), generated_root_(generated_root) {}

  const AndNode* root() const { return root_; }
  TreeKind kind() const { return kind_; }
  int context() const { return root_->label().context(); }
  int depth_bound() const { return depth_bound_; }
  int effective_depth() const { return depth_bound_ + (depth_bound_ % 2); }
  bool expanded(int and_depth) const { return and_depth < effective_depth(); }
  const Bounds& bounds() const { return engine_->bounds(); }
  const std::shared_ptr<StepEngine>& engine() const { return engine_; }
  /// Window of the depth-1 or-nodes (differs from bounds() when overridden).
  Bounds root_window() const { return root_bounds_.value_or(bounds()); }
  const std::shared_ptr<const void>& owner() const { return owner_; }
  /// True for roots made by the saturated builder, whose children follow
  /// from the root label and window alone.
  bool generated_root() const { return generated_root_; }
  /// The depth-1 or-nodes carrying `label`. For roots produced by the
  /// saturated builder this is computed directly from the label, without
  /// expanding the whole root window.
  std::vector<OrNode> root_children_labelled(const Substitution& label) const;

 private:
  const AndNode* root_;
  TreeKind kind_;
  int depth_bound_;
  std::shared_ptr<StepEngine> engine_;
  std::optional<Bounds> root_bounds_;
  std::shared_ptr<const void> owner_;
  bool generated_root_;
};

/// Most-general-unifier and-or tree.
AtomTree build_andor_tree(const Program& p, const Atom& a, int d);
/// n-coinductive tree: term-matching only, every or-label is id_n.
AtomTree build_coinductive_tree(const Program& p, const Atom& a, int d, const Bounds& bounds);
/// Saturated and-or tree. `root_depth` widens the depth bound of the
/// substitutions labelling the depth-1 or-nodes only.
AtomTree build_saturated_avtree(const Program& p, const Atom& a, int d, const Bounds& bounds,
                                std::optional<int> root_depth = std::nullopt);
AtomTree build_saturated_avtree(const std::shared_ptr<StepEngine>& engine, const Atom& a, int d,
                                std::optional<int> root_depth = std::nullopt);
AtomTree build_andor_tree(const std::shared_ptr<StepEngine>& engine, const Atom& a, int d);
AtomTree build_coinductive_tree(const std::shared_ptr<StepEngine>& engine, const Atom& a, int d);

struct ThetaBarResult {
  AtomTree tree;
  /// Labels theta;sigma that would carry or-nodes but fall outside the
  /// input's root window, so they could not be looked up.
  std::vector<Substitution> missing;
};

/// Root relabelled A theta; for every sigma in the window of theta's
/// target, the depth-1 or-nodes labelled compose(theta, sigma) are
/// relabelled sigma. Deeper structure is shared with T.
ThetaBarResult theta_bar_report(const AtomTree& t, const Substitution& theta);
AtomTree theta_bar(const AtomTree& t, const Substitution& theta);

/// Keeps only identity-labelled or-nodes, recursively.
AtomTree desaturate(const AtomTree& t);

/// Node pairs already found equal, reusable across comparisons. Roots are
/// never recorded; every deeper node must outlive the cache.
class TreeDiffCache {
 public:
  TreeDiffCache();
  ~TreeDiffCache();
  struct Impl;
  std::unique_ptr<Impl> impl;
};

/// First structural difference between two truncated trees, if any.
std::optional<std::string> tree_difference(const AtomTree& a, const AtomTree& b);
std::optional<std::string> tree_difference(const AtomTree& a, const AtomTree& b, TreeDiffCache& cache);
bool trees_equal(const AtomTree& a, const AtomTree& b);

/// Audits alternation, sorting, kind-specific label and context invariants
/// over the truncation; returns the violations found.
std::vector<std::string> audit(const AtomTree& t);

struct SynchedLevel {
  Substitution label;
  std::vector<const AndNode*> nodes;                // and-nodes at depth 2i, in order
  std::vector<std::vector<const AndNode*>> chosen;  // children of each chosen or-node
};

/// A synched refutation subtree: level i records, for every and-node at
/// depth 2i, the and-children of its chosen or-child; all chosen or-nodes of
/// a level share one label. The and-nodes of level i+1 are the chosen
/// children of level i, concatenated; the level after the last is empty.
struct SynchedSubtree {
  std::vector<SynchedLevel> levels;
  Substitution answer;
};

struct SynchedSearchOptions {
  /// Deepest tree depth an or-leaf of the subtree may sit at.
  int max_depth = 0;
  /// Partial answers deeper than this are abandoned (answer depth never
  /// decreases under composition).
  std::optional<int> max_answer_depth;
};

/// All answers of synched refutation subtrees within the options, one
/// witness per answer, sorted by answer.
std::vector<SynchedSubtree> find_synched_refutations(const AtomTree& t,
                                                     const SynchedSearchOptions& options);
std::vector<SynchedSubtree> find_synched_refutations(const AtomTree& t, int max_depth);

/// Follows the given level labels, taking the first or-child with that
/// label at every node. Returns a refutation only if the levels run out
/// exactly when the and-nodes do.
std::optional<SynchedSubtree> follow_synched(const AtomTree& t,
                                             const std::vector<Substitution>& labels);

/// Throws std::invalid_argument unless S is a synched refutation subtree of
/// T. The root is matched by label, so a subtree found in one truncation is
/// accepted by another truncation of the same tree.
void validate_synched(const AtomTree& t, const SynchedSubtree& s);

struct NormalizedRefutation {
  AtomTree tree;            // theta_bar(T, answer)
  SynchedSubtree subtree;   // every label id_m, answer id_m
  Substitution answer;      // the answer of the input, read against T
};

/// Rebuilds S inside theta_bar(T, theta) with identity labels throughout:
/// the level-i and-nodes become their S labels instantiated by the later
/// labels of S. Every step is looked up in T; a missing node raises
/// ClosureError naming it.
NormalizedRefutation normalize_synched_refutation(const AtomTree& t, const SynchedSubtree& s);

}  // namespace lpsem
