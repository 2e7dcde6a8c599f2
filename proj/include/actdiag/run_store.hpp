#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "actdiag/batch.hpp"
#include "actdiag/evaluator.hpp"
#include "actdiag/prompts.hpp"
#include "actdiag/similarity.hpp"

namespace actdiag {

/// One (entry, repetition) of a batch, with its grading.
struct StoredRun {
  std::string entry;
  int repetition = 1;
  RunOutcome outcome;
  std::vector<MetricReport> metrics;  ///< one per sweep threshold; zeros when ungradable
  std::string grading_note;           ///< why the run could not be graded, if so
};

/// Sweep of the run's final diagram against `truth`. A run without a parsed
/// final diagram, or whose final diagram has no unique initial node, scores
/// zero everywhere and gets a note.
void grade_run(StoredRun& run, const ActivityDiagram& truth, const SimilarityProvider& provider);

std::filesystem::path run_directory(const std::filesystem::path& out, const std::string& entry, int repetition);

/// Writes `<out>/<entry>/rep<k>/`: candidate CSVs, final.csv, critiques.txt,
/// record.json and metrics.csv.
void write_run(const std::filesystem::path& out, const StoredRun& run);

/// Writes run.json and the aggregate files violations.csv, metrics.csv and
/// cost.csv. Runs are written in (entry, repetition) order.
void write_aggregates(const std::filesystem::path& out, Variant variant, std::span<const StoredRun> runs);

/// A per-run row of an aggregate metrics.csv.
struct MetricRow {
  std::string entry;
  int repetition = 1;
  std::optional<double> threshold;
  double correctness = 0.0;
  double completeness = 0.0;
};

/// Reads the per-run rows (mean rows are skipped) of `<out>/metrics.csv`.
std::vector<MetricRow> read_metric_rows(const std::filesystem::path& out);

}  // namespace actdiag
