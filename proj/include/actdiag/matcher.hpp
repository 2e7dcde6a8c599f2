#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "actdiag/diagram.hpp"
#include "actdiag/similarity.hpp"

namespace actdiag {

/// Source node `source` of the first diagram paired with `target` of the second.
struct MatchTriple {
  std::string source;
  std::string target;
  double score = 0.0;

  friend bool operator==(const MatchTriple&, const MatchTriple&) = default;
};

/// Retained triples, sorted by (source, target), at most one per pair.
struct Matching {
  std::vector<MatchTriple> triples;
  std::optional<double> threshold;
};

/// One step n -a-> s as seen by the step similarity: the transition label
/// (absent for epsilon) and the successor's label.
struct StepView {
  std::optional<std::string_view> guard;
  std::string_view successor_label;
};

/// simStep: successor-label similarity alone when both guards are absent,
/// otherwise the mean of successor-label and guard similarity (an absent
/// guard compares as the empty string).
double sim_step(const StepView& step, const StepView& other, const SimilarityProvider& provider);

/// Greedy BFS node matching from `source` onto `target`.
///
/// Seeds the queue with the two initial nodes scored by label similarity.
/// Each dequeued pair not yet matched is recorded; then every successor of
/// the source node is paired with the target-side successor of highest
/// sim_step (scanned in ascending target id, later candidates win ties) and
/// enqueued. Finally triples scoring below `threshold` are dropped.
///
/// Both diagrams must have exactly one initial node; otherwise throws
/// PreconditionError. Callers normally pass normalized, sound diagrams.
Matching match(const ActivityDiagram& source, const ActivityDiagram& target,
               const SimilarityProvider& provider, std::optional<double> threshold = std::nullopt);

/// Keeps the triples scoring at least `threshold`.
Matching apply_threshold(const Matching& m, std::optional<double> threshold);

std::set<std::string> matched_source_nodes(const Matching& m);

/// Lines "source<TAB>target<TAB>score" (score with 6 decimals).
std::string format_matching(const Matching& m);

}  // namespace actdiag
