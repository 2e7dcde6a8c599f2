#pragma once

#include <span>
#include <string_view>
#include <vector>

namespace actdiag {

enum class Magnitude { Negligible, Small, Medium, Large };
std::string_view to_string(Magnitude m);

/// Which sample tends to be larger.
enum class Dominance { First, Second, Neither };

struct EffectSize {
  double a12 = 0.5;
  Magnitude magnitude = Magnitude::Negligible;
  Dominance direction = Dominance::Neither;
};

struct StatTestResult {
  double p_value = 1.0;
  bool significant = false;  ///< p_value < kSignificanceLevel
  EffectSize effect;
  bool exact = false;  ///< p-value from full enumeration rather than the normal approximation
};

inline constexpr double kSignificanceLevel = 0.01;
/// Combined sample sizes up to this use exact enumeration.
inline constexpr std::size_t kExactLimit = 10;

/// Vargha-Delaney A12: P(X > Y) + 0.5 P(X = Y) over all cross pairs.
double vargha_delaney_a12(std::span<const double> xs, std::span<const double> ys);

/// Cutoffs 0.56 / 0.64 / 0.71 and mirrored 0.44 / 0.36 / 0.29.
EffectSize classify_a12(double a12);

/// Two-sided rank-sum p-value by enumerating every split of the pooled
/// mid-ranks. Only sensible for small samples.
double rank_sum_p_exact(std::span<const double> xs, std::span<const double> ys);

/// Two-sided rank-sum p-value from the normal approximation with tie-corrected
/// variance and continuity correction.
double rank_sum_p_normal(std::span<const double> xs, std::span<const double> ys);

/// Wilcoxon rank-sum test with Vargha-Delaney effect size. Exact p-value when
/// |xs| + |ys| <= kExactLimit. Throws PreconditionError on an empty sample or
/// non-finite values.
StatTestResult wilcoxon_rank_sum(std::span<const double> xs, std::span<const double> ys);

/// Mid-ranks (1-based) of the pooled sample xs ++ ys.
std::vector<double> pooled_mid_ranks(std::span<const double> xs, std::span<const double> ys);

}  // namespace actdiag
