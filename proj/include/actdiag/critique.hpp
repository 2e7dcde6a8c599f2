#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace actdiag {

/// Structural (SC1-SC6) and alignment (AC1-AC5) constraint identifiers.
enum class ConstraintId { SC1, SC2, SC3, SC4, SC5, SC6, AC1, AC2, AC3, AC4, AC5 };

std::string_view to_string(ConstraintId id);
std::optional<ConstraintId> parse_constraint_id(std::string_view token);
bool is_structural(ConstraintId id);

/// The constraint sentence used verbatim in prompts and critique text.
std::string_view constraint_text(ConstraintId id);

inline constexpr ConstraintId kStructuralConstraints[] = {
    ConstraintId::SC1, ConstraintId::SC2, ConstraintId::SC3,
    ConstraintId::SC4, ConstraintId::SC5, ConstraintId::SC6};
inline constexpr ConstraintId kAlignmentConstraints[] = {
    ConstraintId::AC1, ConstraintId::AC2, ConstraintId::AC3, ConstraintId::AC4, ConstraintId::AC5};

enum class CritiqueSource { Algorithmic, Llm };
std::string_view to_string(CritiqueSource source);

/// What a critique item is about: a constraint, an unparseable candidate, or
/// nothing recognisable (an untagged LLM remark).
struct CritiqueTag {
  enum class Kind { Constraint, Parse, Untagged };
  Kind kind = Kind::Untagged;
  ConstraintId constraint = ConstraintId::SC1;

  static CritiqueTag of(ConstraintId id) { return {Kind::Constraint, id}; }
  static CritiqueTag parse() { return {Kind::Parse, ConstraintId::SC1}; }
  static CritiqueTag untagged() { return {}; }

  friend bool operator==(const CritiqueTag& a, const CritiqueTag& b) {
    return a.kind == b.kind && (a.kind != Kind::Constraint || a.constraint == b.constraint);
  }
};
std::string to_string(const CritiqueTag& tag);

struct CritiqueItem {
  CritiqueTag tag;
  CritiqueSource source = CritiqueSource::Algorithmic;
  std::string message;

  friend bool operator==(const CritiqueItem&, const CritiqueItem&) = default;
};

/// Ordered critique of one candidate. Empty means the candidate is accepted.
struct Critique {
  std::vector<CritiqueItem> items;

  bool empty() const noexcept { return items.empty(); }
  void append(const Critique& other) {
    items.insert(items.end(), other.items.begin(), other.items.end());
  }
  friend bool operator==(const Critique&, const Critique&) = default;
};

/// Numbered rendering used inside refine prompts and critique files.
std::string format_critique(const Critique& critique);

/// Parses an LLM critique reply. "No issues" style replies give an empty
/// critique; numbered items become one item each, tagged when the item text
/// starts with a constraint id ("[SC5] ...", "SC5: ...", "AC3 - ...").
/// Text without any numbered item becomes a single untagged item.
Critique parse_llm_critique(std::string_view reply);

}  // namespace actdiag
