#include "actdiag/diagram.hpp"

#include <algorithm>
#include <deque>
#include <map>

#include "actdiag/errors.hpp"

namespace actdiag {

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::Action: return "action";
    case NodeKind::Decision: return "decision";
    case NodeKind::Initial: return "initial";
    case NodeKind::End: return "end";
  }
  return "action";
}

std::optional<NodeKind> parse_node_kind(std::string_view token) {
  if (token == "action") return NodeKind::Action;
  if (token == "decision") return NodeKind::Decision;
  if (token == "initial") return NodeKind::Initial;
  if (token == "end") return NodeKind::End;
  return std::nullopt;
}

std::strong_ordering operator<=>(const Transition& a, const Transition& b) {
  if (auto c = a.source <=> b.source; c != 0) return c;
  if (auto c = a.target <=> b.target; c != 0) return c;
  // Absent (epsilon) labels order before any present label.
  if (a.label.has_value() != b.label.has_value()) {
    return a.label.has_value() ? std::strong_ordering::greater : std::strong_ordering::less;
  }
  if (!a.label) return std::strong_ordering::equal;
  return *a.label <=> *b.label;
}

ActivityDiagram::ActivityDiagram(std::vector<Node> nodes, std::vector<Transition> transitions)
    : nodes_(std::move(nodes)), transitions_(std::move(transitions)) {
  for (auto& n : nodes_) {
    if (n.id.empty()) throw DiagramError("node with empty id");
    if (n.label.empty()) {
      switch (n.kind) {
        case NodeKind::Initial: n.label = kDefaultInitialLabel; break;
        case NodeKind::End: n.label = kDefaultEndLabel; break;
        default: throw DiagramError("node '" + n.id + "' has an empty label");
      }
    }
  }
  std::sort(nodes_.begin(), nodes_.end(),
            [](const Node& a, const Node& b) { return a.id < b.id; });
  auto dup = std::adjacent_find(nodes_.begin(), nodes_.end(),
                                [](const Node& a, const Node& b) { return a.id == b.id; });
  if (dup != nodes_.end()) throw DiagramError("duplicate node id '" + dup->id + "'");

  for (auto& t : transitions_) {
    if (t.label && t.label->empty()) t.label.reset();
    if (!contains(t.source)) {
      throw DiagramError("transition " + t.source + " -> " + t.target +
                         " has a dangling source");
    }
    if (!contains(t.target)) {
      throw DiagramError("transition " + t.source + " -> " + t.target +
                         " has a dangling target");
    }
  }
  std::sort(transitions_.begin(), transitions_.end());
  auto dup_t = std::adjacent_find(transitions_.begin(), transitions_.end());
  if (dup_t != transitions_.end()) {
    throw DiagramError("duplicate transition " + dup_t->source + " -> " + dup_t->target);
  }
}

bool ActivityDiagram::contains(std::string_view id) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id,
                             [](const Node& n, std::string_view key) { return n.id < key; });
  return it != nodes_.end() && it->id == id;
}

std::size_t ActivityDiagram::index_of(std::string_view id) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id,
                             [](const Node& n, std::string_view key) { return n.id < key; });
  if (it == nodes_.end() || it->id != id) throw NodeNotFound(std::string(id));
  return static_cast<std::size_t>(it - nodes_.begin());
}

const Node& ActivityDiagram::node(std::string_view id) const { return nodes_[index_of(id)]; }

std::size_t ActivityDiagram::in_degree(std::string_view id) const {
  index_of(id);
  return static_cast<std::size_t>(std::count_if(
      transitions_.begin(), transitions_.end(), [&](const Transition& t) { return t.target == id; }));
}

std::size_t ActivityDiagram::out_degree(std::string_view id) const {
  index_of(id);
  return static_cast<std::size_t>(std::count_if(
      transitions_.begin(), transitions_.end(), [&](const Transition& t) { return t.source == id; }));
}

std::vector<const Node*> ActivityDiagram::nodes_of_kind(NodeKind kind) const {
  std::vector<const Node*> out;
  for (const auto& n : nodes_) {
    if (n.kind == kind) out.push_back(&n);
  }
  return out;
}

std::vector<Successor> successors(const ActivityDiagram& ad, std::string_view id) {
  ad.index_of(id);
  const auto& ts = ad.transitions();
  auto first = std::lower_bound(ts.begin(), ts.end(), id,
                                [](const Transition& t, std::string_view key) { return t.source < key; });
  std::vector<Successor> out;
  for (auto it = first; it != ts.end() && it->source == id; ++it) {
    out.push_back({&*it, &ad.node(it->target)});
  }
  return out;
}

std::set<std::string> reachable_from(const ActivityDiagram& ad, std::string_view start) {
  std::set<std::string> seen{std::string(ad.node(start).id)};
  std::deque<std::string> frontier{std::string(start)};
  while (!frontier.empty()) {
    std::string cur = std::move(frontier.front());
    frontier.pop_front();
    for (const auto& s : successors(ad, cur)) {
      if (seen.insert(s.node->id).second) frontier.push_back(s.node->id);
    }
  }
  return seen;
}

ActivityDiagram normalize(const ActivityDiagram& ad) {
  const auto& nodes = ad.nodes();
  const auto& ts = ad.transitions();
  const std::size_t n = nodes.size();

  std::vector<std::size_t> in(n, 0), out(n, 0);
  for (const auto& t : ts) {
    ++out[ad.index_of(t.source)];
    ++in[ad.index_of(t.target)];
  }

  // next[u] = v when u -> v is a chain link; each node has at most one link in each direction.
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> next(n, kNone), prev(n, kNone);
  for (const auto& t : ts) {
    std::size_t u = ad.index_of(t.source);
    std::size_t v = ad.index_of(t.target);
    if (u == v || t.label) continue;
    if (nodes[u].kind != NodeKind::Action || nodes[v].kind != NodeKind::Action) continue;
    if (out[u] != 1 || in[v] != 1 || out[v] > 1) continue;
    next[u] = v;
    prev[v] = u;
  }

  // Map each absorbed node to its chain head; heads take the joined label.
  std::vector<std::size_t> head(n);
  std::vector<std::string> label(n);
  std::vector<bool> absorbed(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    head[i] = i;
    label[i] = nodes[i].label;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (prev[i] != kNone || next[i] == kNone) continue;
    for (std::size_t v = next[i]; v != kNone; v = next[v]) {
      head[v] = i;
      absorbed[v] = true;
      label[i] += kChainSeparator;
      label[i] += nodes[v].label;
    }
  }

  std::vector<Node> out_nodes;
  for (std::size_t i = 0; i < n; ++i) {
    if (!absorbed[i]) out_nodes.push_back({nodes[i].id, nodes[i].kind, label[i]});
  }
  std::vector<Transition> out_ts;
  for (const auto& t : ts) {
    std::size_t u = ad.index_of(t.source);
    std::size_t v = ad.index_of(t.target);
    // Internal chain links disappear.
    if (next[u] == v && head[v] == head[u] && absorbed[v]) continue;
    out_ts.push_back({nodes[head[u]].id, nodes[head[v]].id, t.label});
  }
  return ActivityDiagram(std::move(out_nodes), std::move(out_ts));
}

}  // namespace actdiag
