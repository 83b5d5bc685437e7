#include "lpsem/render.hpp"

#include <cstdlib>
#include <sstream>

#include "json.hpp"
#include "lpsem/program.hpp"

namespace lpsem {

using nlohmann::json;

const char* to_string(PlainKind k) {
  switch (k) {
    case PlainKind::And: return "and";
    case PlainKind::Or: return "or";
    case PlainKind::Goal: return "goal";
  }
  return "?";
}

bool PlainNode::operator==(const PlainNode& o) const {
  return kind == o.kind && label == o.label && context == o.context && subst == o.subst &&
         frontier == o.frontier && children == o.children;
}

namespace {

PlainNode and_plain(const AtomTree& t, const AndNode* n, int depth) {
  PlainNode p{PlainKind::And, to_string(n->label()), n->label().context(), std::nullopt,
              !t.expanded(depth), {}};
  if (p.frontier) return p;
  for (const auto& o : n->children()) {
    PlainNode q{PlainKind::Or, label_string(o.label), o.label.target(), o.label, false, {}};
    for (const AndNode* c : o.children) q.children.push_back(and_plain(t, c, depth + 2));
    p.children.push_back(std::move(q));
  }
  return p;
}

PlainNode goal_plain(const GoalTree& t, const GNode* n, std::optional<Substitution> edge,
                     int depth) {
  PlainNode p{PlainKind::Goal, to_string(n->label()), n->label().context(), std::move(edge),
              !t.expanded(depth), {}};
  if (p.frontier) return p;
  for (const auto& e : n->children()) p.children.push_back(goal_plain(t, e.node, e.edge, depth + 1));
  return p;
}

// Level i lists its and-nodes in order; node k of level i owns the slice
// of level i+1 starting at the sum of the earlier chosen sizes.
PlainNode synched_plain(const SynchedSubtree& s, std::size_t level, std::size_t k) {
  const SynchedLevel& l = s.levels[level];
  const AndNode* n = l.nodes[k];
  PlainNode p{PlainKind::And, to_string(n->label()), n->label().context(), std::nullopt, false, {}};
  PlainNode q{PlainKind::Or, label_string(l.label), l.label.target(), l.label, false, {}};
  std::size_t offset = 0;
  for (std::size_t j = 0; j < k; ++j) offset += l.chosen[j].size();
  for (std::size_t j = 0; j < l.chosen[k].size(); ++j)
    q.children.push_back(synched_plain(s, level + 1, offset + j));
  p.children.push_back(std::move(q));
  return p;
}

// Identities print as id_n; other substitutions carry their arity, since
// equal tuples may differ in target.
std::string shown(const Substitution& s) { return s.is_identity() ? label_string(s) : to_string(s); }

std::string escape_dot(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

void text_lines(const PlainNode& n, int indent, bool color, std::string& out) {
  const char* on = "";
  const char* off = color ? "\x1b[0m" : "";
  std::string head;
  switch (n.kind) {
    case PlainKind::And:
      on = color ? "\x1b[36m" : "";
      head = "and " + n.label;
      break;
    case PlainKind::Or:
      on = color ? "\x1b[33m" : "";
      head = "or  " + (n.subst ? shown(*n.subst) : n.label);
      break;
    case PlainKind::Goal:
      on = color ? "\x1b[32m" : "";
      head = n.subst ? shown(*n.subst) + " => " + n.label : n.label;
      break;
  }
  out.append(2 * indent, ' ');
  out += on + head + off;
  if (n.frontier) out += color ? " \x1b[2m...\x1b[0m" : " ...";
  out += '\n';
  for (const auto& c : n.children) text_lines(c, indent + 1, color, out);
}

int dot_nodes(const PlainNode& n, int& next, std::ostringstream& os) {
  int id = next++;
  std::string label = n.kind == PlainKind::Or && n.subst ? shown(*n.subst) : n.label;
  os << "  n" << id << " [label=\"" << escape_dot(label)
     << "\", tooltip=\"context " << n.context << "\"";
  if (n.kind == PlainKind::And) os << ", shape=box";
  if (n.kind == PlainKind::Or) os << ", shape=ellipse";
  if (n.kind == PlainKind::Goal) os << ", shape=box";
  if (n.kind == PlainKind::Goal)
    os << (n.frontier ? ", style=\"rounded,dashed\"" : ", style=rounded");
  else if (n.frontier)
    os << ", style=dashed";
  os << "];\n";
  for (const auto& c : n.children) {
    int cid = dot_nodes(c, next, os);
    os << "  n" << id << " -> n" << cid;
    if (c.kind == PlainKind::Goal && c.subst)
      os << " [label=\"" << escape_dot(shown(*c.subst)) << "\"]";
    os << ";\n";
  }
  return id;
}

json subst_json(const Substitution& s) {
  json terms = json::array();
  for (const auto& t : s.terms()) terms.push_back(to_string(t));
  return json{{"source", s.source()}, {"target", s.target()}, {"terms", terms}};
}

json node_json(const PlainNode& n) {
  json j{{"kind", to_string(n.kind)},
         {"label", n.label},
         {"context", n.context},
         {"frontier", n.frontier},
         {"children", json::array()}};
  if (n.subst) j["subst"] = subst_json(*n.subst);
  for (const auto& c : n.children) j["children"].push_back(node_json(c));
  return j;
}

PlainNode node_from_json(const json& j) {
  PlainNode n;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "and") n.kind = PlainKind::And;
  else if (kind == "or") n.kind = PlainKind::Or;
  else if (kind == "goal") n.kind = PlainKind::Goal;
  else throw ImportError("unknown node kind '" + kind + "'");
  n.label = j.at("label").get<std::string>();
  n.context = j.at("context").get<int>();
  n.frontier = j.at("frontier").get<bool>();
  if (j.contains("subst")) {
    const json& s = j.at("subst");
    std::vector<Term> terms;
    for (const auto& t : s.at("terms")) terms.push_back(parse_term(t.get<std::string>()));
    if (static_cast<int>(terms.size()) != s.at("source").get<int>())
      throw ImportError("substitution source does not match its term count");
    n.subst = Substitution(std::move(terms), s.at("target").get<int>());
  }
  for (const auto& c : j.at("children")) n.children.push_back(node_from_json(c));
  return n;
}

}  // namespace

PlainNode to_plain(const AtomTree& t) { return and_plain(t, t.root(), 0); }

PlainNode to_plain(const GoalTree& t) { return goal_plain(t, t.root(), std::nullopt, 0); }

PlainNode to_plain(const SynchedSubtree& s) {
  if (s.levels.empty()) return PlainNode{};
  return synched_plain(s, 0, 0);
}

PlainNode to_plain(const RefutationPath& r) {
  std::optional<PlainNode> chain;
  for (std::size_t i = r.nodes.size(); i-- > 0;) {
    const Goal& g = r.nodes[i]->label();
    PlainNode p{PlainKind::Goal, to_string(g), g.context(),
                i ? std::optional<Substitution>(r.edges[i - 1]) : std::nullopt, false, {}};
    if (chain) p.children.push_back(std::move(*chain));
    chain = std::move(p);
  }
  return chain ? *chain : PlainNode{PlainKind::Goal, "", 0, std::nullopt, false, {}};
}

std::optional<Format> parse_format(std::string_view name) {
  if (name == "text") return Format::Text;
  if (name == "dot") return Format::Dot;
  if (name == "json") return Format::Json;
  return std::nullopt;
}

std::string render_text(const PlainNode& root, bool color) {
  std::string out;
  text_lines(root, 0, color, out);
  return out;
}

std::string render_dot(const PlainNode& root) {
  std::ostringstream os;
  os << "digraph tree {\n  node [fontname=\"monospace\"];\n";
  int next = 0;
  dot_nodes(root, next, os);
  os << "}\n";
  return os.str();
}

std::string render_json(const PlainNode& root) { return node_json(root).dump(2) + "\n"; }

std::string render(const PlainNode& root, Format f, bool color) {
  switch (f) {
    case Format::Text: return render_text(root, color);
    case Format::Dot: return render_dot(root);
    case Format::Json: return render_json(root);
  }
  return {};
}

PlainNode import_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ImportError(std::string("malformed json: ") + e.what());
  }
  try {
    return node_from_json(j);
  } catch (const json::exception& e) {
    throw ImportError(std::string("bad tree json: ") + e.what());
  }
}

bool color_from_env() {
  const char* v = std::getenv("LP_COLOR");
  if (!v) return false;
  std::string s(v);
  return !(s.empty() || s == "0" || s == "false" || s == "never");
}

}  // namespace lpsem
