#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "actdiag/diagram.hpp"
#include "actdiag/evaluator.hpp"
#include "actdiag/llm_backend.hpp"
#include "actdiag/pipeline.hpp"
#include "actdiag/similarity.hpp"

namespace actdiag {

struct GradingPair {
  const ActivityDiagram* generated = nullptr;
  const ActivityDiagram* truth = nullptr;
};

/// Reference: a full threshold_sweep per pair, one pair after another.
std::vector<std::vector<MetricReport>> grade_batch_serial(std::span<const GradingPair> pairs,
                                                          const SimilarityProvider& provider);

/// Pairs graded concurrently; each pair matches once per direction and filters
/// per threshold. Same output as the serial reference. `workers` <= 0 uses the
/// OpenMP default. The first failing pair (by index) is rethrown.
std::vector<std::vector<MetricReport>> grade_batch_parallel(std::span<const GradingPair> pairs,
                                                            const SimilarityProvider& provider,
                                                            int workers = 0);

/// One pipeline run to execute. Backends may be shared between jobs only if
/// they are safe to call concurrently.
struct RunJob {
  std::string description;
  ChatBackend* backend = nullptr;
};

struct RunOutcome {
  std::optional<RunRecord> record;  ///< complete, or partial when the run aborted
  std::string error;                ///< empty on success
  bool ok() const { return error.empty(); }
};

/// Reference: jobs in order on the calling thread.
std::vector<RunOutcome> run_batch_serial(std::span<const RunJob> jobs, const RunConfig& config);

/// Jobs spread over a bounded pool of `workers` threads. Failures are recorded
/// per job and the batch continues.
std::vector<RunOutcome> run_batch_parallel(std::span<const RunJob> jobs, const RunConfig& config,
                                           int workers);

}  // namespace actdiag
