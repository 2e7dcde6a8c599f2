#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "actdiag/diagram.hpp"
#include "actdiag/matcher.hpp"
#include "actdiag/similarity.hpp"

namespace actdiag {

/// Correctness and completeness of a generated diagram against its ground
/// truth at one threshold. Node counts are taken after normalization.
struct MetricReport {
  double correctness = 0.0;
  double completeness = 0.0;
  std::optional<double> threshold;
  std::size_t source_node_count = 0;
  std::size_t ground_node_count = 0;

  friend bool operator==(const MetricReport&, const MetricReport&) = default;
};

/// 0.5, 0.6, 0.7, 0.8, 0.9, then no threshold.
inline const std::array<std::optional<double>, 6> kSweepThresholds = {
    0.5, 0.6, 0.7, 0.8, 0.9, std::nullopt};

/// Fraction of (normalized) generated nodes matched into the ground truth;
/// the generated diagram is the BFS source.
double correctness(const ActivityDiagram& generated, const ActivityDiagram& truth,
                   const SimilarityProvider& provider, std::optional<double> threshold);

/// Fraction of (normalized) ground-truth nodes matched into the generated
/// diagram; the ground truth is the BFS source.
double completeness(const ActivityDiagram& generated, const ActivityDiagram& truth,
                    const SimilarityProvider& provider, std::optional<double> threshold);

MetricReport evaluate(const ActivityDiagram& generated, const ActivityDiagram& truth,
                      const SimilarityProvider& provider, std::optional<double> threshold);

/// One report per entry of kSweepThresholds, running both match directions
/// afresh for every threshold.
std::vector<MetricReport> threshold_sweep(const ActivityDiagram& generated,
                                          const ActivityDiagram& truth,
                                          const SimilarityProvider& provider);

/// Same result as threshold_sweep, but matches once per direction and applies
/// each threshold to the unthresholded matching.
std::vector<MetricReport> threshold_sweep_filtered(const ActivityDiagram& generated,
                                                   const ActivityDiagram& truth,
                                                   const SimilarityProvider& provider);

std::string format_threshold(std::optional<double> threshold);

/// CSV with header "threshold,correctness,completeness".
std::string format_sweep_csv(const std::vector<MetricReport>& sweep);

}  // namespace actdiag
