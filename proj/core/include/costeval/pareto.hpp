#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "costeval/pricing.hpp"
#include "costeval/stats.hpp"

namespace costeval::pareto {

/// successes / tasks, when the accuracy came from counted outcomes.
struct AccuracyRatio {
  std::uint64_t successes = 0;
  std::uint64_t tasks = 1;
};

struct ParetoPoint {
  std::string label;
  Money cost;
  double accuracy = 0.0;
  /// Exact form of `accuracy`; comparisons use it when present.
  std::optional<AccuracyRatio> accuracy_exact;
  std::optional<stats::Interval> accuracy_ci;
  std::optional<stats::Interval> cost_ci;
};

/// Vertices sorted by strictly increasing cost and accuracy, with strictly
/// decreasing slopes between consecutive vertices.
struct Frontier {
  std::vector<ParetoPoint> vertices;
};

struct MixturePolicy {
  ParetoPoint a;
  ParetoPoint b;
  double p = 1.0;  // probability of invoking a

  double expected_accuracy() const;
  /// Exact expected cost, rounded to the presentation precision.
  Money expected_cost() const;
};

/// Points not dominated by any other point (cost <=, accuracy >=, one
/// strict). Identical (cost, accuracy) duplicates are all kept. Input order
/// is preserved. Throws EmptyInput, CurrencyMismatch.
std::vector<ParetoPoint> non_dominated(std::span<const ParetoPoint> points);

/// Upper-left convex hull. Interior collinear points are dropped; among exact
/// duplicates the lexicographically smallest label is kept.
Frontier convex_frontier(std::span<const ParetoPoint> points);

/// Invokes a with probability p and b otherwise. Throws InvalidArgument for
/// p outside [0, 1], CurrencyMismatch.
ParetoPoint mixture(const ParetoPoint& a, const ParetoPoint& b, double p);

struct MaxBudget {
  Money budget;
};
struct MinAccuracy {
  double accuracy = 0.0;
};
using Constraint = std::variant<MaxBudget, MinAccuracy>;
using Recommendation = std::variant<ParetoPoint, MixturePolicy>;

/// Best frontier point or two-vertex mixture under the constraint. Throws
/// Infeasible, EmptyInput, CurrencyMismatch.
Recommendation recommend(const Frontier& frontier, const Constraint& constraint);

/// Every input point lies on or below the frontier polyline (flat beyond the
/// last vertex). Exact comparison.
bool lies_on_or_below(const Frontier& frontier, const ParetoPoint& point);

nlohmann::ordered_json to_json(const ParetoPoint& point);
nlohmann::ordered_json to_json(const Frontier& frontier);
nlohmann::ordered_json to_json(const Recommendation& rec);

}  // namespace costeval::pareto
