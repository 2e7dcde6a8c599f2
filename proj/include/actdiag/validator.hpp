#pragma once

#include <optional>
#include <string>
#include <vector>

#include "actdiag/critique.hpp"
#include "actdiag/diagram.hpp"

namespace actdiag {

/// One broken structural rule. `subject` names the offending node for the
/// node-local rules (SC3-SC6) and is empty for the cardinality rules (SC1, SC2).
struct Violation {
  ConstraintId constraint;
  std::optional<std::string> subject;
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool sound() const noexcept { return violations.empty(); }
  /// Distinct constraint ids, in ascending order.
  std::vector<ConstraintId> constraints() const;
  bool violates(ConstraintId id) const;
};

/// Checks SC1-SC6 independently; violations are ordered by constraint then node id.
///
/// SC6 reachability is taken from every initial node. With no initial node at
/// all SC6 is not evaluated, SC1 already reports the missing start.
ValidationReport validate(const ActivityDiagram& ad);

/// One algorithmic critique item per violation, with fixed wording.
Critique render_critique(const ValidationReport& report);

/// Line format "SCk<TAB>node_id<TAB>message", one line per violation.
std::string format_report(const ValidationReport& report);

}  // namespace actdiag
