#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lpsem/atom_tree.hpp"
#include "lpsem/goal_tree.hpp"
#include "lpsem/term.hpp"

namespace lpsem {

enum class PlainKind { And, Or, Goal };
const char* to_string(PlainKind k);

/// Renderer-neutral tree. Or-nodes carry their label in `subst`; goal nodes
/// carry the edge leading to them (none at the root).
struct PlainNode {
  PlainKind kind = PlainKind::And;
  std::string label;
  int context = 0;
  std::optional<Substitution> subst;
  bool frontier = false;
  std::vector<PlainNode> children;

  bool operator==(const PlainNode& o) const;
};

/// Unfolds the truncation; shared nodes are copied.
PlainNode to_plain(const AtomTree& t);
PlainNode to_plain(const GoalTree& t);
/// The selected and/or structure of a synched subtree.
PlainNode to_plain(const SynchedSubtree& s);
/// A refutation path as a chain of goal nodes.
PlainNode to_plain(const RefutationPath& r);

enum class Format { Text, Dot, Json };
std::optional<Format> parse_format(std::string_view name);

/// Indented outline; ANSI colours when `color` is set.
std::string render_text(const PlainNode& root, bool color = false);
/// One digraph: and-nodes boxes, or-nodes ellipses, frontier dashed,
/// contexts as tooltips.
std::string render_dot(const PlainNode& root);
/// {kind, label, context, subst?, children[], frontier}; substitutions as
/// {source, target, terms[]} with terms in prefix notation.
std::string render_json(const PlainNode& root);
std::string render(const PlainNode& root, Format f, bool color = false);

class ImportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
/// Inverse of render_json.
PlainNode import_json(std::string_view text);

/// True when LP_COLOR is set to anything but "", "0", "false" or "never".
bool color_from_env();

}  // namespace lpsem
