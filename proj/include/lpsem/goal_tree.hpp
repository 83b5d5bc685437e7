#pragma once

#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lpsem/atom_tree.hpp"
#include "lpsem/program.hpp"
#include "lpsem/term.hpp"
#include "lpsem/unify.hpp"

namespace lpsem {

/// { l1 ++ ... ++ lk | li in sets[i] }, sorted and duplicate-free. The empty
/// list of sets yields { [] } in `context`. Throws ContextError when goals
/// of different contexts would be concatenated.
std::vector<Goal> distribute(const std::vector<std::vector<Goal>>& sets, int context = 0);

/// Parallel ground step: every atom of the goal resolved at once.
std::vector<Goal> parallel_step_ground(const Program& p, const Goal& l);

struct ParallelEntry {
  Substitution theta;
  std::vector<Goal> goals;
};

/// theta -> distribute over the saturated steps of the atoms at theta, for
/// theta in the window of the goal's context; thetas with no result are
/// left out. The empty goal maps every theta to { [] }.
std::vector<ParallelEntry> parallel_step_sat(const Program& p, const Goal& l, const Bounds& bounds);
/// The same step at one substitution, which need not lie in any window.
std::vector<Goal> parallel_step_sat(const Program& p, const Goal& l, const Bounds& bounds,
                                    const Substitution& theta);

class GNode;

struct GEdge {
  Substitution edge;
  const GNode* node;
};

/// Goal-labelled node of an or-tree; children are expanded on first access.
class GNode {
 public:
  using Expander = std::function<std::vector<GEdge>()>;
  GNode(Goal label, Expander expand) : label_(std::move(label)), expand_(std::move(expand)) {}

  const Goal& label() const { return label_; }
  const std::vector<GEdge>& children() const;

 private:
  Goal label_;
  mutable std::optional<std::vector<GEdge>> children_;
  mutable Expander expand_;
};

class GNodeArena {
 public:
  const GNode* make(Goal label, GNode::Expander expand);
  void retain(std::shared_ptr<const void> p) { retained_.push_back(std::move(p)); }

 private:
  std::deque<GNode> nodes_;
  std::vector<std::shared_ptr<const void>> retained_;
};

enum class GoalTreeKind { Ground, Saturated };
const char* to_string(GoalTreeKind k);

/// Lazily expanded or-tree truncated at depth d: a node at depth k is
/// expanded iff k < d; the others are the frontier.
class GoalTree {
 public:
  GoalTree(const GNode* root, GoalTreeKind kind, int depth_bound,
           std::shared_ptr<StepEngine> engine, std::shared_ptr<const void> owner)
      : root_(root), kind_(kind), depth_bound_(depth_bound), engine_(std::move(engine)),
        owner_(std::move(owner)) {}

  const GNode* root() const { return root_; }
  GoalTreeKind kind() const { return kind_; }
  int context() const { return root_->label().context(); }
  int depth_bound() const { return depth_bound_; }
  bool expanded(int depth) const { return depth < depth_bound_; }
  const Bounds& bounds() const { return engine_->bounds(); }
  const std::shared_ptr<StepEngine>& engine() const { return engine_; }
  const std::shared_ptr<const void>& owner() const { return owner_; }

 private:
  const GNode* root_;
  GoalTreeKind kind_;
  int depth_bound_;
  std::shared_ptr<StepEngine> engine_;
  std::shared_ptr<const void> owner_;
};

/// Ground or-tree; every edge is id_0. Throws GroundnessError on
/// non-ground input.
GoalTree build_vtree_ground(const Program& p, const Goal& l, int d);
GoalTree build_vtree_ground(const std::shared_ptr<StepEngine>& engine, const Goal& l, int d);
/// Saturated or-tree with edges from the enumeration window.
GoalTree build_saturated_vtree(const Program& p, const Goal& l, int d, const Bounds& bounds);
GoalTree build_saturated_vtree(const std::shared_ptr<StepEngine>& engine, const Goal& l, int d);

/// Root labels concatenated; every pair of children becomes a child.
GoalTree concat_ground(const GoalTree& t1, const GoalTree& t2);
/// Root labels concatenated; children are paired only on equal edges.
GoalTree concat_sat(const GoalTree& t1, const GoalTree& t2);
/// Left fold of concat_ground / concat_sat over a non-empty list.
GoalTree concat_all(const std::vector<GoalTree>& trees);

/// Or-tree read off an and-or tree: a node lists and-nodes of one depth;
/// its children come from choosing one or-child per and-node, all with the
/// same label, and concatenating their and-children. The result is
/// truncated at half the and-or depth.
GoalTree repr_ground(const AtomTree& t);
GoalTree repr_sat(const AtomTree& t);

/// First structural difference between two truncated or-trees. Children
/// are compared as sets: equal (edge, label, subtree) entries count once.
std::optional<std::string> goal_tree_difference(const GoalTree& a, const GoalTree& b);
bool goal_trees_equal(const GoalTree& a, const GoalTree& b);

/// Sorting, label/context and, for built trees, synchronisation audits.
std::vector<std::string> audit(const GoalTree& t);

struct RefutationPath {
  std::vector<const GNode*> nodes;  // s1 .. sk, s1 the root, sk labelled []
  std::vector<Substitution> edges;  // theta_1 .. theta_{k-1}
  Substitution answer;
};

struct RefutationSearchOptions {
  int max_length = 0;
  /// Partial answers deeper than this are abandoned.
  std::optional<int> max_answer_depth;
};

/// Root-to-[] paths within the options, one witness per answer, sorted by
/// answer. Paths continue through the []-loops, so every edge out of a []
/// node yields a further answer.
std::vector<RefutationPath> find_goal_refutations(const GoalTree& t,
                                                  const RefutationSearchOptions& options);
std::vector<RefutationPath> find_goal_refutations(const GoalTree& t, int max_length);

/// Throws std::invalid_argument unless R is a refutation path of T.
void validate_path(const GoalTree& t, const RefutationPath& r);

/// A path of T with the same answer theta: first edge theta, then id_m
/// edges, node i labelled l_i instantiated by the later edges of R. Throws
/// ClosureError naming the missing substitution when T lacks a step.
RefutationPath normalize_goal_refutation(const GoalTree& t, const RefutationPath& r);

}  // namespace lpsem
