#include "actdiag/critique.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace actdiag {

std::string_view to_string(ConstraintId id) {
  switch (id) {
    case ConstraintId::SC1: return "SC1";
    case ConstraintId::SC2: return "SC2";
    case ConstraintId::SC3: return "SC3";
    case ConstraintId::SC4: return "SC4";
    case ConstraintId::SC5: return "SC5";
    case ConstraintId::SC6: return "SC6";
    case ConstraintId::AC1: return "AC1";
    case ConstraintId::AC2: return "AC2";
    case ConstraintId::AC3: return "AC3";
    case ConstraintId::AC4: return "AC4";
    case ConstraintId::AC5: return "AC5";
  }
  return "SC1";
}

std::optional<ConstraintId> parse_constraint_id(std::string_view token) {
  static constexpr ConstraintId kAll[] = {
      ConstraintId::SC1, ConstraintId::SC2, ConstraintId::SC3, ConstraintId::SC4,
      ConstraintId::SC5, ConstraintId::SC6, ConstraintId::AC1, ConstraintId::AC2,
      ConstraintId::AC3, ConstraintId::AC4, ConstraintId::AC5};
  for (auto id : kAll) {
    if (token == to_string(id)) return id;
  }
  return std::nullopt;
}

bool is_structural(ConstraintId id) {
  return id <= ConstraintId::SC6;
}

std::string_view constraint_text(ConstraintId id) {
  switch (id) {
    case ConstraintId::SC1:
      return "An activity diagram must have exactly one initial node, i.e., |N^i| = 1.";
    case ConstraintId::SC2:
      return "An activity diagram must have at least one end node, i.e., |N^e| >= 1.";
    case ConstraintId::SC3:
      return "The initial node must have no incoming transitions.";
    case ConstraintId::SC4:
      return "End nodes must have no outgoing transitions.";
    case ConstraintId::SC5:
      return "Each decision node must have at least two outgoing transitions, each labelled by "
             "a guard condition.";
    case ConstraintId::SC6:
      return "An activity diagram must be fully connected so that every node is reachable from "
             "the initial node.";
    case ConstraintId::AC1:
      return "Action and transition labels in the activity diagram must be consistent with and "
             "accurately reflect the process description.";
    case ConstraintId::AC2:
      return "The sequence of actions and transitions must accurately represent the order of "
             "actions and their triggers described in the process description.";
    case ConstraintId::AC3:
      return "All possible action flows described in the process description must be "
             "represented in the activity diagram. The diagram must not introduce any actions "
             "or transitions that are not present in the process description.";
    case ConstraintId::AC4:
      return "Concurrency occurs when actions happen simultaneously and is modelled using "
             "multiple parallel flows originating from a single action node. The parallel "
             "flows may synchronize into a single flow after some steps.";
    case ConstraintId::AC5:
      return "Only procedural steps from the process description should be incorporated into "
             "the activity diagram. Examples, explanatory text, and commentary should be "
             "excluded.";
  }
  return {};
}

std::string_view to_string(CritiqueSource source) {
  return source == CritiqueSource::Algorithmic ? "algorithmic" : "llm";
}

std::string to_string(const CritiqueTag& tag) {
  switch (tag.kind) {
    case CritiqueTag::Kind::Constraint: return std::string(to_string(tag.constraint));
    case CritiqueTag::Kind::Parse: return "parse";
    case CritiqueTag::Kind::Untagged: return "-";
  }
  return "-";
}

std::string format_critique(const Critique& critique) {
  std::ostringstream out;
  int i = 1;
  for (const auto& item : critique.items) {
    out << i++ << ". ";
    if (item.tag.kind != CritiqueTag::Kind::Untagged) out << '[' << to_string(item.tag) << "] ";
    out << item.message << '\n';
  }
  return out.str();
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool says_no_issues(std::string_view text) {
  std::string t = lower(trim(text));
  while (!t.empty() && (t.back() == '.' || t.back() == '!')) t.pop_back();
  return t.empty() || t == "no issues" || t == "no issues found" || t == "none" ||
         t == "no violations" || t == "no violations found";
}

// Returns the item body if `line` starts a numbered item ("1." / "2)").
std::optional<std::string_view> numbered_item(std::string_view line) {
  line = trim(line);
  std::size_t i = 0;
  while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
  if (i == 0 || i >= line.size() || (line[i] != '.' && line[i] != ')')) return std::nullopt;
  return trim(line.substr(i + 1));
}

CritiqueItem make_item(std::string_view body) {
  CritiqueItem item{CritiqueTag::untagged(), CritiqueSource::Llm, std::string(body)};
  std::string_view rest = body;
  bool bracket = !rest.empty() && rest.front() == '[';
  if (bracket) rest.remove_prefix(1);
  if (rest.size() >= 3) {
    if (auto id = parse_constraint_id(rest.substr(0, 3))) {
      std::string_view after = rest.substr(3);
      bool ok = bracket ? (!after.empty() && after.front() == ']')
                        : (after.empty() || after.front() == ':' || after.front() == ' ' ||
                           after.front() == '-' || after.front() == ',');
      if (ok) {
        if (bracket) after.remove_prefix(1);
        after = trim(after);
        while (!after.empty() && (after.front() == ':' || after.front() == '-')) {
          after.remove_prefix(1);
          after = trim(after);
        }
        item.tag = CritiqueTag::of(*id);
        item.message = after.empty() ? std::string(body) : std::string(after);
      }
    }
  }
  return item;
}

}  // namespace

Critique parse_llm_critique(std::string_view reply) {
  Critique critique;
  if (says_no_issues(reply)) return critique;

  std::istringstream lines{std::string(reply)};
  std::string line;
  std::string current;
  bool any_numbered = false;
  auto flush = [&] {
    if (!current.empty()) critique.items.push_back(make_item(trim(current)));
    current.clear();
  };
  while (std::getline(lines, line)) {
    if (auto body = numbered_item(line)) {
      flush();
      any_numbered = true;
      current = std::string(*body);
    } else if (any_numbered && !trim(line).empty()) {
      current += ' ';
      current += trim(line);
    }
  }
  flush();
  if (!any_numbered) {
    critique.items.push_back(
        {CritiqueTag::untagged(), CritiqueSource::Llm, std::string(trim(reply))});
  }
  return critique;
}

}  // namespace actdiag
