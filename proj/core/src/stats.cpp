#include "costeval/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "costeval/errors.hpp"

namespace costeval::stats {
namespace {

// Continued fraction for I_x(a, b), modified Lentz.
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw InvalidArgument("beta parameters must be > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double front = std::exp(a * std::log(x) + b * std::log1p(-x) - log_beta(a, b));
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double df) {
  if (!(df > 0.0)) throw InvalidArgument("degrees of freedom must be > 0");
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  const double x = df / (df + t * t);
  const double tail = 0.5 * incomplete_beta(0.5 * df, 0.5, x);
  return t > 0.0 ? 1.0 - tail : tail;
}

double student_t_quantile(double p, double df) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("quantile p must be in (0, 1)");
  if (!(df > 0.0)) throw InvalidArgument("degrees of freedom must be > 0");
  if (p == 0.5) return 0.0;
  if (p < 0.5) return -student_t_quantile(1.0 - p, df);

  // Solve I_x(df/2, 1/2) = 2(1 - p) for x, then t = sqrt(df (1 - x) / x).
  const double a = 0.5 * df;
  const double b = 0.5;
  const double target = 2.0 * (1.0 - p);
  const double lbeta = log_beta(a, b);
  double lo = 0.0;
  double hi = 1.0;
  double x = 0.5;
  for (int iter = 0; iter < 400; ++iter) {
    const double f = incomplete_beta(a, b, x) - target;
    if (f > 0.0) {
      hi = x;
    } else {
      lo = x;
    }
    const double log_density =
        (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - lbeta;
    double next = x - f / std::exp(log_density);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::fabs(next - x);
    x = next;
    if (step <= kQuantileTolerance * x) break;
  }
  return std::sqrt(df * (1.0 - x) / x);
}

SummaryStat summarize_values(std::span<const double> values, double confidence) {
  if (values.empty()) throw InsufficientData("no values to summarize");
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw InvalidArgument("confidence must be in (0, 1)");
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw NonFinite();
  }
  SummaryStat s;
  s.n = values.size();
  s.confidence = confidence;
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  s.min = *mn;
  s.max = *mx;
  // Sum in sorted order so the result does not depend on input order.
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(s.n);
  s.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / n;
  s.mean = std::clamp(s.mean, s.min, s.max);
  if (s.n < 2) return s;

  double ss = 0.0;
  for (double v : sorted) ss += (v - s.mean) * (v - s.mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  const double t = student_t_quantile(0.5 * (1.0 + confidence), n - 1.0);
  const double half = t * sd / std::sqrt(n);
  s.ci = Interval{s.mean - half, s.mean + half};
  return s;
}

SummaryStat t_interval(std::span<const double> values, double confidence) {
  if (values.size() < 2) {
    throw InsufficientData("a t interval needs at least two values");
  }
  return summarize_values(values, confidence);
}

std::pair<SummaryStat, SummaryStat> summarize_strategy(
    std::span<const RunFigures> per_run, double confidence) {
  if (per_run.empty()) throw EmptyInput("no runs to summarize");
  std::vector<double> acc;
  std::vector<double> cost;
  for (const auto& r : per_run) {
    Money::require_same_currency(per_run.front().cost, r.cost);
    acc.push_back(r.accuracy);
    cost.push_back(r.cost.to_double());
  }
  return {summarize_values(acc, confidence), summarize_values(cost, confidence)};
}

}  // namespace costeval::stats
