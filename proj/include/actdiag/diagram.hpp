#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace actdiag {

enum class NodeKind { Action, Decision, Initial, End };

std::string_view to_string(NodeKind kind);
/// Parses "action" | "decision" | "initial" | "end".
std::optional<NodeKind> parse_node_kind(std::string_view token);

struct Node {
  std::string id;
  NodeKind kind = NodeKind::Action;
  std::string label;

  friend bool operator==(const Node&, const Node&) = default;
};

/// A control-flow edge. An absent label is the unlabelled (epsilon) case.
struct Transition {
  std::string source;
  std::string target;
  std::optional<std::string> label;

  friend bool operator==(const Transition&, const Transition&) = default;
  friend std::strong_ordering operator<=>(const Transition& a, const Transition& b);
};

/// Immutable activity diagram: nodes of four kinds plus labelled/unlabelled transitions.
///
/// Construction normalizes storage order (nodes by id, transitions by
/// (source, target, label)) so equal diagrams compare equal regardless of the
/// order their parts were supplied in. Empty labels on Initial/End nodes
/// default to "start"/"end"; an empty transition label is stored as absent.
///
/// Throws DiagramError on duplicate node ids, empty ids, empty labels on
/// Action/Decision nodes, dangling transition endpoints, or duplicate
/// (source, target, label) triples.
class ActivityDiagram {
 public:
  ActivityDiagram() = default;
  ActivityDiagram(std::vector<Node> nodes, std::vector<Transition> transitions);

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const std::vector<Transition>& transitions() const noexcept { return transitions_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  bool empty() const noexcept { return nodes_.empty(); }

  bool contains(std::string_view id) const;
  /// Throws NodeNotFound.
  const Node& node(std::string_view id) const;
  /// Index of the node in nodes(); throws NodeNotFound.
  std::size_t index_of(std::string_view id) const;

  std::size_t in_degree(std::string_view id) const;
  std::size_t out_degree(std::string_view id) const;

  std::vector<const Node*> nodes_of_kind(NodeKind kind) const;

  friend bool operator==(const ActivityDiagram&, const ActivityDiagram&) = default;

 private:
  std::vector<Node> nodes_;
  std::vector<Transition> transitions_;
};

inline constexpr std::string_view kDefaultInitialLabel = "start";
inline constexpr std::string_view kDefaultEndLabel = "end";
inline constexpr std::string_view kChainSeparator = ". ";

struct Successor {
  const Transition* transition;
  const Node* node;
};

/// Outgoing transitions of `id` paired with their targets, ordered by target id then label.
std::vector<Successor> successors(const ActivityDiagram& ad, std::string_view id);

std::set<std::string> reachable_from(const ActivityDiagram& ad, std::string_view start);

/// Collapses maximal chains of sequential, unlabelled action nodes into one node.
///
/// A link u -> v joins a chain when both are Action nodes, the transition is
/// unlabelled, u != v, out_degree(u) == 1, in_degree(v) == 1 and
/// out_degree(v) <= 1. Each maximal chain n1 -> ... -> nk (k >= 2) becomes a
/// single Action node that keeps n1's id, takes the labels joined by ". ",
/// inherits n1's incoming and nk's outgoing transitions. Idempotent.
ActivityDiagram normalize(const ActivityDiagram& ad);

}  // namespace actdiag
