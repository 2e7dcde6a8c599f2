#include "actdiag/matcher.hpp"

#include <algorithm>
#include <cstdio>
#include <deque>
#include <sstream>
#include <tuple>

#include "actdiag/errors.hpp"

namespace actdiag {

double sim_step(const StepView& step, const StepView& other, const SimilarityProvider& provider) {
  const double node_sim = provider.similarity(step.successor_label, other.successor_label);
  if (!step.guard && !other.guard) return node_sim;
  const double guard_sim =
      provider.similarity(step.guard.value_or(std::string_view{}), other.guard.value_or(std::string_view{}));
  return (node_sim + guard_sim) / 2.0;
}

namespace {

// Index-based adjacency so the BFS avoids string lookups.
struct Graph {
  const ActivityDiagram* ad;
  std::vector<std::vector<std::size_t>> out;  // transition indices, in successors() order

  explicit Graph(const ActivityDiagram& d) : ad(&d), out(d.size()) {
    const auto& ts = d.transitions();
    for (std::size_t i = 0; i < ts.size(); ++i) out[d.index_of(ts[i].source)].push_back(i);
    // transitions() is sorted by (source, target, label): lists are already in order.
  }
  std::size_t target_of(std::size_t t) const { return ad->index_of(ad->transitions()[t].target); }
  StepView step(std::size_t t) const {
    const auto& tr = ad->transitions()[t];
    StepView v{std::nullopt, ad->node(tr.target).label};
    if (tr.label) v.guard = std::string_view(*tr.label);
    return v;
  }
};

std::size_t single_initial(const ActivityDiagram& ad) {
  auto initials = ad.nodes_of_kind(NodeKind::Initial);
  if (initials.size() != 1) {
    throw PreconditionError("precondition: structurally sound input required (diagram has " +
                            std::to_string(initials.size()) + " initial nodes)");
  }
  return ad.index_of(initials.front()->id);
}

void collect_labels(const ActivityDiagram& ad, std::vector<std::string>& out) {
  for (const auto& n : ad.nodes()) out.push_back(n.label);
  for (const auto& t : ad.transitions()) {
    if (t.label) out.push_back(*t.label);
  }
}

}  // namespace

Matching match(const ActivityDiagram& source, const ActivityDiagram& target,
               const SimilarityProvider& provider, std::optional<double> threshold) {
  const std::size_t root = single_initial(source);
  const std::size_t root_t = single_initial(target);

  {
    std::vector<std::string> labels;
    collect_labels(source, labels);
    collect_labels(target, labels);
    provider.prefetch(labels);
  }

  const Graph g(source);
  const Graph h(target);
  const std::size_t width = target.size();

  struct Entry {
    std::size_t n, m;
    double score;
  };
  std::deque<Entry> queue;
  std::vector<char> seen(source.size() * width, 0);
  std::vector<Entry> matched;

  queue.push_back({root, root_t,
                   provider.similarity(source.nodes()[root].label, target.nodes()[root_t].label)});

  while (!queue.empty()) {
    Entry e = queue.front();
    queue.pop_front();
    char& flag = seen[e.n * width + e.m];
    if (flag) continue;
    flag = 1;
    matched.push_back(e);

    for (std::size_t t : g.out[e.n]) {
      const StepView step = g.step(t);
      std::optional<std::size_t> best;
      double best_score = 0.0;
      for (std::size_t u : h.out[e.m]) {
        const double score = sim_step(step, h.step(u), provider);
        if (score >= best_score) {
          best = h.target_of(u);
          best_score = score;
        }
      }
      if (best) queue.push_back({g.target_of(t), *best, best_score});
    }
  }

  Matching result;
  result.threshold = threshold;
  for (const auto& e : matched) {
    if (threshold && e.score < *threshold) continue;
    result.triples.push_back({source.nodes()[e.n].id, target.nodes()[e.m].id, e.score});
  }
  std::sort(result.triples.begin(), result.triples.end(),
            [](const MatchTriple& a, const MatchTriple& b) {
              return std::tie(a.source, a.target) < std::tie(b.source, b.target);
            });
  return result;
}

Matching apply_threshold(const Matching& m, std::optional<double> threshold) {
  Matching out;
  out.threshold = threshold;
  for (const auto& t : m.triples) {
    if (!threshold || t.score >= *threshold) out.triples.push_back(t);
  }
  return out;
}

std::set<std::string> matched_source_nodes(const Matching& m) {
  std::set<std::string> out;
  for (const auto& t : m.triples) out.insert(t.source);
  return out;
}

std::string format_matching(const Matching& m) {
  std::ostringstream out;
  char buf[32];
  for (const auto& t : m.triples) {
    std::snprintf(buf, sizeof buf, "%.6f", t.score);
    out << t.source << '\t' << t.target << '\t' << buf << '\n';
  }
  return out.str();
}

}  // namespace actdiag
