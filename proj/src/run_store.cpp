#include "actdiag/run_store.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "actdiag/critique.hpp"
#include "actdiag/csv_codec.hpp"
#include "actdiag/dataset.hpp"
#include "actdiag/validator.hpp"

namespace actdiag {

namespace {

using json = nlohmann::json;

constexpr std::string_view kMeanEntry = "ALL";
constexpr std::string_view kMeanRepetition = "mean";

std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

json cost_json(const CostLedger& c) {
  json by_kind = json::object();
  for (const auto& [k, v] : c.calls_by_kind) by_kind[std::string(to_string(k))] = v;
  return {{"calls", c.calls},
          {"input_tokens", c.input_tokens},
          {"output_tokens", c.output_tokens},
          {"reasoning_tokens", c.reasoning_tokens},
          {"usage_gaps", c.usage_gaps},
          {"calls_by_kind", by_kind}};
}

std::vector<const StoredRun*> ordered(std::span<const StoredRun> runs) {
  std::vector<const StoredRun*> out;
  for (const auto& r : runs) out.push_back(&r);
  std::sort(out.begin(), out.end(), [](const StoredRun* a, const StoredRun* b) {
    return std::tie(a->entry, a->repetition) < std::tie(b->entry, b->repetition);
  });
  return out;
}

}  // namespace

void grade_run(StoredRun& run, const ActivityDiagram& truth, const SimilarityProvider& provider) {
  run.metrics.clear();
  run.grading_note.clear();
  const auto& rec = run.outcome.record;
  if (!rec || !rec->final) {
    run.grading_note = "no parsed final diagram";
  } else if (rec->final->nodes_of_kind(NodeKind::Initial).size() != 1) {
    run.grading_note = "final diagram has no unique initial node";
  } else {
    run.metrics = threshold_sweep_filtered(*rec->final, truth, provider);
    return;
  }
  for (auto t : kSweepThresholds) {
    MetricReport r;
    r.threshold = t;
    r.ground_node_count = normalize(truth).size();
    run.metrics.push_back(r);
  }
}

std::filesystem::path run_directory(const std::filesystem::path& out, const std::string& entry, int repetition) {
  return out / entry / ("rep" + std::to_string(repetition));
}

void write_run(const std::filesystem::path& out, const StoredRun& run) {
  const auto dir = run_directory(out, run.entry, run.repetition);
  std::filesystem::create_directories(dir);

  json doc;
  doc["entry"] = run.entry;
  doc["repetition"] = run.repetition;
  doc["error"] = run.outcome.error;
  doc["grading_note"] = run.grading_note;

  const auto& rec = run.outcome.record;
  if (rec) {
    doc["variant"] = std::string(to_string(rec->variant));
    doc["accepted"] = rec->accepted;
    doc["restarted"] = rec->restarted;
    doc["warnings"] = rec->warnings;
    doc["cost"] = cost_json(rec->cost);

    std::ostringstream critiques;
    json attempts = json::array();
    for (std::size_t a = 0; a < rec->attempts.size(); ++a) {
      const auto& att = rec->attempts[a];
      json items = json::array();
      for (std::size_t i = 0; i < att.candidates.size(); ++i) {
        const auto name = "candidate_" + std::to_string(a + 1) + "_" + std::to_string(i + 1) + ".csv";
        write_file(dir / name, att.candidates[i]);
        json c = {{"file", name}};
        if (i < att.critiques.size()) {
          std::vector<std::string> tags;
          for (const auto& item : att.critiques[i].items) tags.push_back(to_string(item.tag));
          c["critique"] = tags;
          critiques << "## attempt " << a + 1 << ", candidate " << i + 1 << "\n";
          critiques << (att.critiques[i].empty() ? std::string("(no issues)\n") : format_critique(att.critiques[i]));
          critiques << "\n";
        }
        items.push_back(c);
      }
      attempts.push_back(items);
    }
    doc["attempts"] = attempts;
    write_file(dir / "critiques.txt", critiques.str());
    if (!rec->final_csv.empty()) write_file(dir / "final.csv", rec->final_csv);

    json violations = json::array();
    if (rec->final) {
      for (auto id : validate(*rec->final).constraints()) violations.push_back(std::string(to_string(id)));
      doc["final_violations"] = violations;
    } else {
      doc["final_violations"] = nullptr;
    }
  }
  write_file(dir / "record.json", doc.dump(2) + "\n");
  if (!run.metrics.empty()) write_file(dir / "metrics.csv", format_sweep_csv(run.metrics));
}

void write_aggregates(const std::filesystem::path& out, Variant variant, std::span<const StoredRun> runs) {
  const auto runs_sorted = ordered(runs);
  std::filesystem::create_directories(out);

  {
    json doc;
    doc["variant"] = std::string(to_string(variant));
    doc["runs"] = runs_sorted.size();
    json entries = json::array();
    for (const auto* r : runs_sorted) {
      if (entries.empty() || entries.back() != r->entry) entries.push_back(r->entry);
    }
    doc["entries"] = entries;
    write_file(out / "run.json", doc.dump(2) + "\n");
  }

  const double total = static_cast<double>(runs_sorted.size());
  auto percent = [&](std::size_t n) { return fixed(total == 0 ? 0.0 : 100.0 * static_cast<double>(n) / total, 2); };

  {
    std::map<ConstraintId, std::size_t> counts;
    std::size_t unparseable = 0, failed = 0, any = 0;
    for (const auto* r : runs_sorted) {
      if (!r->outcome.ok()) ++failed;
      const auto& rec = r->outcome.record;
      if (!rec || !rec->final) {
        ++unparseable;
        continue;
      }
      auto ids = validate(*rec->final).constraints();
      if (!ids.empty()) ++any;
      for (auto id : ids) ++counts[id];
    }
    std::ostringstream csv;
    csv << "constraint,diagrams,percent\n";
    for (auto id : kStructuralConstraints) {
      csv << to_string(id) << "," << counts[id] << "," << percent(counts[id]) << "\n";
    }
    csv << "any," << any << "," << percent(any) << "\n";
    csv << "unparseable," << unparseable << "," << percent(unparseable) << "\n";
    csv << "failed," << failed << "," << percent(failed) << "\n";
    csv << "runs," << runs_sorted.size() << "," << percent(runs_sorted.size()) << "\n";
    write_file(out / "violations.csv", csv.str());
  }

  {
    std::ostringstream csv;
    csv << "entry,repetition,threshold,correctness,completeness\n";
    std::vector<double> cor_sum(kSweepThresholds.size(), 0.0), com_sum(kSweepThresholds.size(), 0.0);
    for (const auto* r : runs_sorted) {
      for (std::size_t i = 0; i < r->metrics.size() && i < kSweepThresholds.size(); ++i) {
        const auto& m = r->metrics[i];
        csv << r->entry << "," << r->repetition << "," << format_threshold(m.threshold) << ","
            << fixed(m.correctness) << "," << fixed(m.completeness) << "\n";
        cor_sum[i] += m.correctness;
        com_sum[i] += m.completeness;
      }
    }
    // Per-entry means over repetitions, then the mean over all runs.
    for (std::size_t b = 0; b < runs_sorted.size();) {
      std::size_t e = b;
      std::vector<double> cor(kSweepThresholds.size(), 0.0), com(kSweepThresholds.size(), 0.0);
      for (; e < runs_sorted.size() && runs_sorted[e]->entry == runs_sorted[b]->entry; ++e) {
        for (std::size_t i = 0; i < runs_sorted[e]->metrics.size() && i < kSweepThresholds.size(); ++i) {
          cor[i] += runs_sorted[e]->metrics[i].correctness;
          com[i] += runs_sorted[e]->metrics[i].completeness;
        }
      }
      const double n = static_cast<double>(e - b);
      for (std::size_t i = 0; i < kSweepThresholds.size(); ++i) {
        csv << runs_sorted[b]->entry << "," << kMeanRepetition << "," << format_threshold(kSweepThresholds[i])
            << "," << fixed(cor[i] / n) << "," << fixed(com[i] / n) << "\n";
      }
      b = e;
    }
    for (std::size_t i = 0; i < kSweepThresholds.size(); ++i) {
      csv << kMeanEntry << "," << kMeanRepetition << "," << format_threshold(kSweepThresholds[i]) << ","
          << fixed(total == 0 ? 0.0 : cor_sum[i] / total) << "," << fixed(total == 0 ? 0.0 : com_sum[i] / total)
          << "\n";
    }
    write_file(out / "metrics.csv", csv.str());
  }

  {
    CostLedger sum;
    for (const auto* r : runs_sorted) {
      if (r->outcome.record) sum += r->outcome.record->cost;
    }
    auto mean = [&](std::uint64_t v) { return fixed(total == 0 ? 0.0 : static_cast<double>(v) / total, 2); };
    std::ostringstream csv;
    csv << "measure,mean_per_run,total\n";
    csv << "calls," << mean(sum.calls) << "," << sum.calls << "\n";
    csv << "input_tokens," << mean(sum.input_tokens) << "," << sum.input_tokens << "\n";
    csv << "output_tokens," << mean(sum.output_tokens) << "," << sum.output_tokens << "\n";
    csv << "reasoning_tokens," << mean(sum.reasoning_tokens) << "," << sum.reasoning_tokens << "\n";
    for (auto kind : {CallKind::Generate, CallKind::StructuralCritique, CallKind::AlignmentCritique,
                      CallKind::CombinedCritique, CallKind::Refine}) {
      csv << "calls_" << to_string(kind) << "," << mean(sum.calls_of(kind)) << "," << sum.calls_of(kind) << "\n";
    }
    write_file(out / "cost.csv", csv.str());
  }
}

std::vector<MetricRow> read_metric_rows(const std::filesystem::path& out) {
  const auto path = out / "metrics.csv";
  std::istringstream in(read_file(path));
  std::string line;
  std::vector<MetricRow> rows;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 || line.empty()) continue;
    std::vector<std::string> f;
    std::istringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) f.push_back(cell);
    if (f.size() != 5) throw Error(path.string() + ":" + std::to_string(line_no) + ": expected 5 columns");
    if (f[1] == kMeanRepetition) continue;
    try {
      MetricRow row;
      row.entry = f[0];
      row.repetition = std::stoi(f[1]);
      if (f[2] != "none") row.threshold = std::stod(f[2]);
      row.correctness = std::stod(f[3]);
      row.completeness = std::stod(f[4]);
      rows.push_back(std::move(row));
    } catch (const std::logic_error&) {
      throw Error(path.string() + ":" + std::to_string(line_no) + ": malformed number");
    }
  }
  return rows;
}

}  // namespace actdiag
