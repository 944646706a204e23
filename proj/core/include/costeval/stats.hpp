#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>

#include "costeval/pricing.hpp"

namespace costeval::stats {

inline constexpr double kDefaultConfidence = 0.95;
/// Stopping tolerance of the incomplete-beta inversion.
inline constexpr double kQuantileTolerance = 1e-10;

struct Interval {
  double low = 0.0;
  double high = 0.0;

  double width() const { return high - low; }
};

/// Mean, observed extremes and (for n >= 2) a Student-t interval.
struct SummaryStat {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::optional<Interval> ci;
  std::size_t n = 0;
  double confidence = kDefaultConfidence;
};

/// Regularized incomplete beta function I_x(a, b).
double incomplete_beta(double a, double b, double x);

/// Student-t cumulative distribution with `df` degrees of freedom.
double student_t_cdf(double t, double df);

/// Inverse of student_t_cdf for p in (0, 1), via incomplete-beta inversion.
double student_t_quantile(double p, double df);

/// mean +/- t_{(1+confidence)/2, n-1} * s / sqrt(n), s with n-1 denominator.
/// Throws InsufficientData (n < 2), NonFinite, InvalidArgument (confidence).
SummaryStat t_interval(std::span<const double> values,
                       double confidence = kDefaultConfidence);

/// Like t_interval but accepts n == 1 (point values, no interval).
SummaryStat summarize_values(std::span<const double> values,
                             double confidence = kDefaultConfidence);

struct RunFigures {
  double accuracy = 0.0;
  Money cost;
};

/// Accuracy and cost summaries across runs; cost in major currency units.
/// Throws EmptyInput, CurrencyMismatch.
std::pair<SummaryStat, SummaryStat> summarize_strategy(
    std::span<const RunFigures> per_run,
    double confidence = kDefaultConfidence);

}  // namespace costeval::stats
