#include "actdiag/validator.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace actdiag {

std::vector<ConstraintId> ValidationReport::constraints() const {
  std::set<ConstraintId> ids;
  for (const auto& v : violations) ids.insert(v.constraint);
  return {ids.begin(), ids.end()};
}

bool ValidationReport::violates(ConstraintId id) const {
  return std::any_of(violations.begin(), violations.end(),
                     [&](const Violation& v) { return v.constraint == id; });
}

namespace {

std::string quote(const Node& n) { return "'" + n.id + "' (\"" + n.label + "\")"; }

}  // namespace

ValidationReport validate(const ActivityDiagram& ad) {
  ValidationReport report;
  auto& out = report.violations;

  const auto initials = ad.nodes_of_kind(NodeKind::Initial);
  const auto ends = ad.nodes_of_kind(NodeKind::End);

  if (initials.size() != 1) {
    out.push_back({ConstraintId::SC1, std::nullopt,
                   "the diagram has " + std::to_string(initials.size()) +
                       " initial nodes; exactly one is required"});
  }
  if (ends.empty()) {
    out.push_back({ConstraintId::SC2, std::nullopt, "the diagram has no end node"});
  }
  // nodes() is sorted by id, so per-node checks come out in id order.
  for (const Node* n : initials) {
    if (auto in = ad.in_degree(n->id); in > 0) {
      out.push_back({ConstraintId::SC3, n->id,
                     "initial node " + quote(*n) + " has " + std::to_string(in) +
                         " incoming transition(s)"});
    }
  }
  for (const Node* n : ends) {
    if (auto o = ad.out_degree(n->id); o > 0) {
      out.push_back({ConstraintId::SC4, n->id,
                     "end node " + quote(*n) + " has " + std::to_string(o) +
                         " outgoing transition(s)"});
    }
  }
  for (const Node* n : ad.nodes_of_kind(NodeKind::Decision)) {
    auto succ = successors(ad, n->id);
    auto unlabeled = std::count_if(succ.begin(), succ.end(),
                                   [](const Successor& s) { return !s.transition->label; });
    if (succ.size() < 2 || unlabeled > 0) {
      std::string msg = "decision node " + quote(*n) + " has " + std::to_string(succ.size()) +
                        " outgoing transition(s)";
      if (unlabeled > 0) msg += ", " + std::to_string(unlabeled) + " without a guard condition";
      out.push_back({ConstraintId::SC5, n->id, std::move(msg)});
    }
  }
  if (!initials.empty()) {
    std::set<std::string> reached;
    for (const Node* i : initials) reached.merge(reachable_from(ad, i->id));
    for (const auto& n : ad.nodes()) {
      if (!reached.contains(n.id)) {
        out.push_back({ConstraintId::SC6, n.id,
                       "node " + quote(n) + " is not reachable from the initial node"});
      }
    }
  }
  return report;
}

Critique render_critique(const ValidationReport& report) {
  Critique critique;
  for (const auto& v : report.violations) {
    std::string msg = std::string(to_string(v.constraint)) + " violated: ";
    msg += constraint_text(v.constraint);
    msg += " Found: " + v.message + ".";
    critique.items.push_back(
        {CritiqueTag::of(v.constraint), CritiqueSource::Algorithmic, std::move(msg)});
  }
  return critique;
}

std::string format_report(const ValidationReport& report) {
  std::ostringstream out;
  for (const auto& v : report.violations) {
    out << to_string(v.constraint) << '\t' << v.subject.value_or("") << '\t' << v.message << '\n';
  }
  return out.str();
}

}  // namespace actdiag
