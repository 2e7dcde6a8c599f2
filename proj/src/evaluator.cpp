#include "actdiag/evaluator.hpp"

#include <cstdio>
#include <sstream>

namespace actdiag {
namespace {

double ratio(const Matching& m, std::size_t denominator) {
  return static_cast<double>(matched_source_nodes(m).size()) / static_cast<double>(denominator);
}

}  // namespace

double correctness(const ActivityDiagram& generated, const ActivityDiagram& truth,
                   const SimilarityProvider& provider, std::optional<double> threshold) {
  const auto gen = normalize(generated);
  return ratio(match(gen, normalize(truth), provider, threshold), gen.size());
}

double completeness(const ActivityDiagram& generated, const ActivityDiagram& truth,
                    const SimilarityProvider& provider, std::optional<double> threshold) {
  const auto gt = normalize(truth);
  return ratio(match(gt, normalize(generated), provider, threshold), gt.size());
}

MetricReport evaluate(const ActivityDiagram& generated, const ActivityDiagram& truth,
                      const SimilarityProvider& provider, std::optional<double> threshold) {
  const auto gen = normalize(generated);
  const auto gt = normalize(truth);
  MetricReport r;
  r.threshold = threshold;
  r.source_node_count = gen.size();
  r.ground_node_count = gt.size();
  r.correctness = ratio(match(gen, gt, provider, threshold), gen.size());
  r.completeness = ratio(match(gt, gen, provider, threshold), gt.size());
  return r;
}

std::vector<MetricReport> threshold_sweep(const ActivityDiagram& generated,
                                          const ActivityDiagram& truth,
                                          const SimilarityProvider& provider) {
  std::vector<MetricReport> out;
  out.reserve(kSweepThresholds.size());
  for (auto t : kSweepThresholds) out.push_back(evaluate(generated, truth, provider, t));
  return out;
}

std::vector<MetricReport> threshold_sweep_filtered(const ActivityDiagram& generated,
                                                   const ActivityDiagram& truth,
                                                   const SimilarityProvider& provider) {
  const auto gen = normalize(generated);
  const auto gt = normalize(truth);
  const Matching forward = match(gen, gt, provider);
  const Matching backward = match(gt, gen, provider);
  std::vector<MetricReport> out;
  out.reserve(kSweepThresholds.size());
  for (auto t : kSweepThresholds) {
    MetricReport r;
    r.threshold = t;
    r.source_node_count = gen.size();
    r.ground_node_count = gt.size();
    r.correctness = ratio(apply_threshold(forward, t), gen.size());
    r.completeness = ratio(apply_threshold(backward, t), gt.size());
    out.push_back(r);
  }
  return out;
}

std::string format_threshold(std::optional<double> threshold) {
  if (!threshold) return "none";
  char buf[16];
  std::snprintf(buf, sizeof buf, "%g", *threshold);
  return buf;
}

std::string format_sweep_csv(const std::vector<MetricReport>& sweep) {
  std::ostringstream out;
  out << "threshold,correctness,completeness\n";
  char buf[64];
  for (const auto& r : sweep) {
    std::snprintf(buf, sizeof buf, ",%.6f,%.6f\n", r.correctness, r.completeness);
    out << format_threshold(r.threshold) << buf;
  }
  return out.str();
}

}  // namespace actdiag
