#pragma once

// Reference implementations written independently of the library code, used
// as test oracles. They favour obviousness over speed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "actdiag/diagram.hpp"
#include "actdiag/similarity.hpp"

namespace oracle {

struct Triple {
  std::string source;
  std::string target;
  double score;
  bool operator==(const Triple&) const = default;
};

namespace detail {

struct Edge {
  std::optional<std::string> label;
  std::string to;
};

// Outgoing edges per node, in ascending target id (then absent label, then label).
inline std::map<std::string, std::vector<Edge>> out_edges(const actdiag::ActivityDiagram& ad) {
  std::map<std::string, std::vector<Edge>> out;
  for (const auto& n : ad.nodes()) out[n.id];
  for (const auto& t : ad.transitions()) out[t.source].push_back({t.label, t.target});
  for (auto& [_, edges] : out) {
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
      if (a.to != b.to) return a.to < b.to;
      if (a.label.has_value() != b.label.has_value()) return !a.label.has_value();
      return a.label.value_or("") < b.label.value_or("");
    });
  }
  return out;
}

inline std::string label_of(const actdiag::ActivityDiagram& ad, const std::string& id) {
  for (const auto& n : ad.nodes()) {
    if (n.id == id) return n.label;
  }
  return {};
}

}  // namespace detail

/// Algorithm 1 executed statement by statement over plain containers.
inline std::vector<Triple> ad_match(const actdiag::ActivityDiagram& D, const actdiag::ActivityDiagram& Dp,
                                    const actdiag::SimilarityProvider& sim, std::optional<double> t) {
  std::string i, ip;
  for (const auto& n : D.nodes()) {
    if (n.kind == actdiag::NodeKind::Initial) i = n.id;
  }
  for (const auto& n : Dp.nodes()) {
    if (n.kind == actdiag::NodeKind::Initial) ip = n.id;
  }
  const auto succ = detail::out_edges(D);
  const auto succp = detail::out_edges(Dp);

  // Phase 1
  std::vector<Triple> matched;
  std::deque<Triple> queue;
  queue.push_back({i, ip, sim.similarity(detail::label_of(D, i), detail::label_of(Dp, ip))});

  // Phase 2
  while (!queue.empty()) {
    Triple cur = queue.front();
    queue.pop_front();
    bool already = false;
    for (const auto& m : matched) {
      if (m.source == cur.source && m.target == cur.target) already = true;
    }
    if (already) continue;
    matched.push_back(cur);
    for (const auto& [a, s] : succ.at(cur.source)) {
      std::optional<std::string> best;
      double best_score = 0.0;
      for (const auto& [b, sp] : succp.at(cur.target)) {
        double score;
        const double labels = sim.similarity(detail::label_of(D, s), detail::label_of(Dp, sp));
        if (!a && !b) {
          score = labels;
        } else {
          score = (labels + sim.similarity(a.value_or(""), b.value_or(""))) / 2.0;
        }
        if (score >= best_score) {
          best = sp;
          best_score = score;
        }
      }
      if (best) queue.push_back({s, *best, best_score});
    }
  }

  // Phase 3
  std::vector<Triple> out;
  for (const auto& m : matched) {
    if (!t || m.score >= *t) out.push_back(m);
  }
  std::sort(out.begin(), out.end(),
            [](const Triple& x, const Triple& y) { return std::tie(x.source, x.target) < std::tie(y.source, y.target); });
  return out;
}

/// Cosine of character-trigram count vectors over lowercased,
/// whitespace-collapsed text; strings shorter than three characters are a
/// single gram.
inline double trigram_cosine(const std::string& a, const std::string& b) {
  auto norm = [](const std::string& s) {
    std::string out;
    for (char c : s) {
      const bool space = c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
      if (space) {
        if (!out.empty() && out.back() != ' ') out += ' ';
      } else {
        out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      }
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
  };
  auto grams = [](const std::string& s) {
    std::vector<std::string> g;
    if (s.size() < 3) {
      if (!s.empty()) g.push_back(s);
    } else {
      for (std::size_t k = 0; k + 3 <= s.size(); ++k) g.push_back(s.substr(k, 3));
    }
    return g;
  };
  const std::string na = norm(a), nb = norm(b);
  if (na == nb) return 1.0;
  const auto ga = grams(na), gb = grams(nb);
  if (ga.empty() || gb.empty()) return 0.0;
  std::vector<std::string> all = ga;
  all.insert(all.end(), gb.begin(), gb.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  double dot = 0, qa = 0, qb = 0;
  for (const auto& g : all) {
    const double ca = static_cast<double>(std::count(ga.begin(), ga.end(), g));
    const double cb = static_cast<double>(std::count(gb.begin(), gb.end(), g));
    dot += ca * cb;
    qa += ca * ca;
    qb += cb * cb;
  }
  return dot / std::sqrt(qa * qb);
}

/// A12 as a fraction of cross pairs, counting ties as half.
inline double a12(const std::vector<double>& x, const std::vector<double>& y) {
  std::int64_t twice = 0;
  for (double a : x) {
    for (double b : y) twice += a > b ? 2 : a == b ? 1 : 0;
  }
  return static_cast<double>(twice) / static_cast<double>(2 * x.size() * y.size());
}

/// Two-sided rank-sum p-value by walking every permutation of the pooled
/// sample: each arrangement assigns the first |x| positions to group x.
inline double permutation_p(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> pooled = x;
  pooled.insert(pooled.end(), y.begin(), y.end());
  const std::size_t N = pooled.size(), m = x.size();
  // Doubled mid-ranks as integers: 2 * (#less) + #equal + 1.
  std::vector<std::int64_t> rank2(N);
  for (std::size_t k = 0; k < N; ++k) {
    std::int64_t less = 0, equal = 0;
    for (double v : pooled) {
      less += v < pooled[k];
      equal += v == pooled[k];
    }
    rank2[k] = 2 * less + equal + 1;
  }
  // Deviation of 2W from its mean, scaled to stay integral: 2W - m(N+1).
  auto dev = [&](const std::vector<std::size_t>& order) {
    std::int64_t w2 = 0;
    for (std::size_t k = 0; k < m; ++k) w2 += rank2[order[k]];
    return std::llabs(w2 - static_cast<std::int64_t>(m * (N + 1)));
  };
  std::vector<std::size_t> order(N);
  for (std::size_t k = 0; k < N; ++k) order[k] = k;
  const auto observed = dev(order);
  std::uint64_t hits = 0, total = 0;
  do {
    ++total;
    hits += dev(order) >= observed;
  } while (std::next_permutation(order.begin(), order.end()));
  return static_cast<double>(hits) / static_cast<double>(total);
}

}  // namespace oracle
