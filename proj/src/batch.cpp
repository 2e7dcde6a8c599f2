#include "actdiag/batch.hpp"

#include <exception>

#include <omp.h>

namespace actdiag {

namespace {

void check(const GradingPair& p) {
  if (p.generated == nullptr || p.truth == nullptr) throw PreconditionError("grading pair has a null diagram");
}

RunOutcome run_one(const RunJob& job, const RunConfig& config) {
  RunOutcome out;
  try {
    if (job.backend == nullptr) throw PreconditionError("run job has no backend");
    out.record = run(job.description, *job.backend, config);
  } catch (const RunAborted& e) {
    out.record = e.record();
    out.error = e.what();
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

}  // namespace

std::vector<std::vector<MetricReport>> grade_batch_serial(std::span<const GradingPair> pairs,
                                                          const SimilarityProvider& provider) {
  std::vector<std::vector<MetricReport>> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    check(p);
    out.push_back(threshold_sweep(*p.generated, *p.truth, provider));
  }
  return out;
}

std::vector<std::vector<MetricReport>> grade_batch_parallel(std::span<const GradingPair> pairs,
                                                            const SimilarityProvider& provider,
                                                            int workers) {
  const auto n = static_cast<std::ptrdiff_t>(pairs.size());
  std::vector<std::vector<MetricReport>> out(pairs.size());
  std::vector<std::exception_ptr> errors(pairs.size());
  const int threads = workers > 0 ? workers : omp_get_max_threads();

  #pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      check(pairs[i]);
      out[i] = threshold_sweep_filtered(*pairs[i].generated, *pairs[i].truth, provider);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }

  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::vector<RunOutcome> run_batch_serial(std::span<const RunJob> jobs, const RunConfig& config) {
  std::vector<RunOutcome> out;
  out.reserve(jobs.size());
  for (const auto& job : jobs) out.push_back(run_one(job, config));
  return out;
}

std::vector<RunOutcome> run_batch_parallel(std::span<const RunJob> jobs, const RunConfig& config,
                                           int workers) {
  if (workers < 1) throw PreconditionError("worker count must be at least 1");
  const auto n = static_cast<std::ptrdiff_t>(jobs.size());
  std::vector<RunOutcome> out(jobs.size());

  // Runs spend their time waiting on the backend, so the pool is sized by the
  // caller rather than by core count.
  #pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[i] = run_one(jobs[i], config);
  }
  return out;
}

}  // namespace actdiag
