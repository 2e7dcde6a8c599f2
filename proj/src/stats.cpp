#include "actdiag/stats.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "actdiag/errors.hpp"

namespace actdiag {

std::string_view to_string(Magnitude m) {
  switch (m) {
    case Magnitude::Negligible: return "negligible";
    case Magnitude::Small: return "small";
    case Magnitude::Medium: return "medium";
    case Magnitude::Large: return "large";
  }
  return "negligible";
}

namespace {

void check_samples(std::span<const double> xs, std::span<const double> ys) {
  if (xs.empty() || ys.empty()) throw PreconditionError("rank-sum test needs two non-empty samples");
  auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(xs.begin(), xs.end(), finite) || !std::all_of(ys.begin(), ys.end(), finite)) {
    throw PreconditionError("rank-sum test samples must be finite");
  }
}

// Twice the mid-rank of each pooled value, so ties stay integral.
std::vector<std::int64_t> doubled_ranks(std::span<const double> xs, std::span<const double> ys) {
  const std::size_t n = xs.size() + ys.size();
  std::vector<double> pooled(xs.begin(), xs.end());
  pooled.insert(pooled.end(), ys.begin(), ys.end());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return pooled[a] < pooled[b]; });
  std::vector<std::int64_t> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
    // positions i..j (0-based) share rank ((i+1) + (j+1)) / 2
    const auto twice = static_cast<std::int64_t>(i + j + 2);
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = twice;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

std::vector<double> pooled_mid_ranks(std::span<const double> xs, std::span<const double> ys) {
  auto twice = doubled_ranks(xs, ys);
  std::vector<double> out(twice.size());
  for (std::size_t i = 0; i < twice.size(); ++i) out[i] = static_cast<double>(twice[i]) / 2.0;
  return out;
}

double vargha_delaney_a12(std::span<const double> xs, std::span<const double> ys) {
  check_samples(xs, ys);
  std::int64_t twice_wins = 0;
  for (double x : xs) {
    for (double y : ys) {
      if (x > y) twice_wins += 2;
      else if (x == y) twice_wins += 1;
    }
  }
  const auto pairs = static_cast<std::int64_t>(xs.size() * ys.size());
  return static_cast<double>(twice_wins) / static_cast<double>(2 * pairs);
}

EffectSize classify_a12(double a12) {
  EffectSize e;
  e.a12 = a12;
  if (a12 > 0.5) e.direction = Dominance::First;
  else if (a12 < 0.5) e.direction = Dominance::Second;

  if (a12 >= 0.71 || a12 <= 0.29) e.magnitude = Magnitude::Large;
  else if (a12 >= 0.64 || a12 <= 0.36) e.magnitude = Magnitude::Medium;
  else if (a12 >= 0.56 || a12 <= 0.44) e.magnitude = Magnitude::Small;
  else e.magnitude = Magnitude::Negligible;
  return e;
}

double rank_sum_p_exact(std::span<const double> xs, std::span<const double> ys) {
  check_samples(xs, ys);
  const std::size_t m = xs.size();
  const std::size_t n = m + ys.size();
  if (n > 24) throw PreconditionError("exact rank-sum enumeration limited to 24 pooled values");
  const auto ranks = doubled_ranks(xs, ys);

  // Work with 2W - 2E[W] = sum(doubled ranks of group x) - m(N+1); all integers.
  const auto centre = static_cast<std::int64_t>(m * (n + 1));
  std::int64_t observed = -centre;
  for (std::size_t i = 0; i < m; ++i) observed += ranks[i];
  const std::int64_t observed_dev = observed < 0 ? -observed : observed;

  std::uint64_t extreme = 0, total = 0;
  const std::uint32_t limit = 1u << n;
  for (std::uint32_t mask = 0; mask < limit; ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) != m) continue;
    std::int64_t s = -centre;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) s += ranks[i];
    }
    ++total;
    if ((s < 0 ? -s : s) >= observed_dev) ++extreme;
  }
  return static_cast<double>(extreme) / static_cast<double>(total);
}

double rank_sum_p_normal(std::span<const double> xs, std::span<const double> ys) {
  check_samples(xs, ys);
  const double m = static_cast<double>(xs.size());
  const double big_n = m + static_cast<double>(ys.size());
  const auto ranks = pooled_mid_ranks(xs, ys);
  const double w = std::accumulate(ranks.begin(), ranks.begin() + static_cast<std::ptrdiff_t>(xs.size()), 0.0);
  const double mean = m * (big_n + 1.0) / 2.0;

  std::vector<double> sorted = ranks;
  std::sort(sorted.begin(), sorted.end());
  double tie_term = 0.0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }
  const double k = big_n - m;
  double variance = m * k / 12.0 * ((big_n + 1.0) - (big_n > 1 ? tie_term / (big_n * (big_n - 1.0)) : 0.0));
  if (variance <= 0.0) return 1.0;
  const double dev = std::max(0.0, std::abs(w - mean) - 0.5);
  const double z = dev / std::sqrt(variance);
  return std::clamp(std::erfc(z / std::sqrt(2.0)), 0.0, 1.0);
}

StatTestResult wilcoxon_rank_sum(std::span<const double> xs, std::span<const double> ys) {
  check_samples(xs, ys);
  StatTestResult r;
  r.exact = xs.size() + ys.size() <= kExactLimit;
  r.p_value = r.exact ? rank_sum_p_exact(xs, ys) : rank_sum_p_normal(xs, ys);
  r.significant = r.p_value < kSignificanceLevel;
  r.effect = classify_a12(vargha_delaney_a12(xs, ys));
  return r;
}

}  // namespace actdiag
