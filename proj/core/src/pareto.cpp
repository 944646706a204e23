#include "costeval/pareto.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include <boost/multiprecision/cpp_int.hpp>

#include "costeval/errors.hpp"

namespace costeval::pareto {
namespace {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

cpp_int to_big(Decimal::rep v) {
  const bool negative = v < 0;
  Decimal::urep mag = negative ? static_cast<Decimal::urep>(-(v + 1)) + 1
                                   : static_cast<Decimal::urep>(v);
  cpp_int out = static_cast<std::uint64_t>(mag >> 64);
  out <<= 64;
  out += static_cast<std::uint64_t>(mag);
  return negative ? cpp_int(-out) : out;
}

Decimal::rep from_big(const cpp_int& v) {
  const bool negative = v < 0;
  cpp_int mag = negative ? cpp_int(-v) : v;
  const auto lo = static_cast<std::uint64_t>(mag & cpp_int(UINT64_MAX));
  const auto hi = static_cast<std::uint64_t>(mag >> 64);
  const Decimal::rep out =
      static_cast<Decimal::rep>((static_cast<Decimal::urep>(hi) << 64) | lo);
  return negative ? -out : out;
}

// Exact value of a finite double.
cpp_rational exact(double v) {
  if (v == 0.0) return 0;
  int exponent = 0;
  const double mantissa = std::frexp(v, &exponent);  // v = mantissa * 2^exponent
  const auto scaled = static_cast<std::int64_t>(std::ldexp(mantissa, 53));
  exponent -= 53;
  cpp_int num = scaled;
  cpp_int den = 1;
  if (exponent >= 0) {
    num <<= exponent;
  } else {
    den <<= -exponent;
  }
  return cpp_rational(num, den);
}

// Value of the shortest decimal that round-trips to v, so that a threshold
// written as 0.9 means exactly 9/10.
cpp_rational shortest_decimal(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  const std::string text(buf, res.ptr);
  const auto e = text.find('e');
  const std::string mantissa = text.substr(0, e);
  int exponent = e == std::string::npos ? 0 : std::stoi(text.substr(e + 1));
  std::string digits;
  for (char c : mantissa) {
    if (c == '.') continue;
    digits += c;
  }
  const auto point = mantissa.find('.');
  if (point != std::string::npos) exponent -= static_cast<int>(mantissa.size() - point - 1);
  const bool negative = !digits.empty() && digits.front() == '-';
  if (negative) digits.erase(0, 1);
  // cpp_int reads a leading zero as an octal prefix.
  digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size()));
  cpp_rational out(cpp_int(digits.empty() ? std::string("0") : digits));
  cpp_int scale = boost::multiprecision::pow(cpp_int(10), std::abs(exponent));
  if (exponent >= 0) out *= scale;
  else out /= scale;
  return negative ? cpp_rational(-out) : out;
}

cpp_rational exact_accuracy(const ParetoPoint& p) {
  if (p.accuracy_exact) {
    return cpp_rational(cpp_int(p.accuracy_exact->successes),
                        cpp_int(p.accuracy_exact->tasks));
  }
  return exact(p.accuracy);
}

cpp_int exact_cost(const ParetoPoint& p) { return to_big(p.cost.amount().units()); }

struct Exact {
  const ParetoPoint* point;
  cpp_int cost;
  cpp_rational accuracy;
};

std::vector<Exact> exact_points(std::span<const ParetoPoint> points) {
  if (points.empty()) throw EmptyInput("no points");
  std::vector<Exact> out;
  out.reserve(points.size());
  for (const auto& p : points) {
    Money::require_same_currency(points.front().cost, p.cost);
    if (!std::isfinite(p.accuracy)) throw NonFinite();
    if (p.accuracy_exact && p.accuracy_exact->tasks == 0) {
      throw InvalidArgument("accuracy ratio with zero tasks");
    }
    out.push_back({&p, exact_cost(p), exact_accuracy(p)});
  }
  return out;
}

bool dominates(const Exact& r, const Exact& q) {
  return r.cost <= q.cost && r.accuracy >= q.accuracy &&
         (r.cost < q.cost || r.accuracy > q.accuracy);
}

// > 0: counter-clockwise turn o -> a -> b (cost on x, accuracy on y).
cpp_rational cross(const Exact& o, const Exact& a, const Exact& b) {
  return cpp_rational(a.cost - o.cost) * (b.accuracy - o.accuracy) -
         (a.accuracy - o.accuracy) * cpp_rational(b.cost - o.cost);
}

Decimal interpolate(const Decimal& a, const Decimal& b, double p) {
  const cpp_rational w = exact(p);
  const cpp_rational v = w * cpp_rational(to_big(a.units())) +
                         (cpp_rational(1) - w) * cpp_rational(to_big(b.units()));
  // Round half-even to the presentation grid.
  const Decimal::rep step =
      Decimal::kOne / static_cast<Decimal::rep>(1'000'000);  // 10^12 units
  const cpp_rational scaled = v / cpp_rational(to_big(step));
  cpp_int q = boost::multiprecision::numerator(scaled) /
              boost::multiprecision::denominator(scaled);
  cpp_rational rem = scaled - cpp_rational(q);
  if (rem < 0) {
    q -= 1;
    rem += 1;
  }
  const cpp_rational half(1, 2);
  if (rem > half || (rem == half && (q % 2 != 0))) q += 1;
  return Decimal::from_units(from_big(q) * step);
}

std::string format_probability(double p) {
  std::ostringstream ss;
  ss.precision(15);
  ss << p;
  return ss.str();
}

}  // namespace

double MixturePolicy::expected_accuracy() const {
  return p * a.accuracy + (1.0 - p) * b.accuracy;
}

Money MixturePolicy::expected_cost() const {
  Money::require_same_currency(a.cost, b.cost);
  return Money(interpolate(a.cost.amount(), b.cost.amount(), p), a.cost.currency());
}

std::vector<ParetoPoint> non_dominated(std::span<const ParetoPoint> points) {
  const auto ex = exact_points(points);
  std::vector<ParetoPoint> out;
  for (const auto& q : ex) {
    const bool dominated = std::any_of(ex.begin(), ex.end(), [&](const Exact& r) {
      return dominates(r, q);
    });
    if (!dominated) out.push_back(*q.point);
  }
  return out;
}

Frontier convex_frontier(std::span<const ParetoPoint> points) {
  auto ex = exact_points(points);
  std::vector<Exact> nd;
  for (const auto& q : ex) {
    if (std::none_of(ex.begin(), ex.end(),
                     [&](const Exact& r) { return dominates(r, q); })) {
      nd.push_back(q);
    }
  }
  // Cost ascending; exact duplicates collapse onto the smallest label.
  std::sort(nd.begin(), nd.end(), [](const Exact& x, const Exact& y) {
    if (x.cost != y.cost) return x.cost < y.cost;
    if (x.accuracy != y.accuracy) return x.accuracy > y.accuracy;
    return x.point->label < y.point->label;
  });
  nd.erase(std::unique(nd.begin(), nd.end(),
                       [](const Exact& x, const Exact& y) {
                         return x.cost == y.cost && x.accuracy == y.accuracy;
                       }),
           nd.end());

  std::vector<Exact> hull;
  for (const auto& p : nd) {
    while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), p) >= 0) {
      hull.pop_back();
    }
    hull.push_back(p);
  }
  Frontier f;
  for (const auto& h : hull) f.vertices.push_back(*h.point);
  return f;
}

ParetoPoint mixture(const ParetoPoint& a, const ParetoPoint& b, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("mixture p must be in [0, 1]");
  Money::require_same_currency(a.cost, b.cost);
  if (p == 1.0) return a;
  if (p == 0.0) return b;
  ParetoPoint out;
  out.label = "mix(" + a.label + "," + b.label + "," + format_probability(p) + ")";
  out.cost = Money(interpolate(a.cost.amount(), b.cost.amount(), p), a.cost.currency());
  out.accuracy = p * a.accuracy + (1.0 - p) * b.accuracy;
  return out;
}

Recommendation recommend(const Frontier& frontier, const Constraint& constraint) {
  const auto& v = frontier.vertices;
  if (v.empty()) throw EmptyInput("empty frontier");

  if (const auto* budget = std::get_if<MaxBudget>(&constraint)) {
    Money::require_same_currency(v.front().cost, budget->budget);
    const Decimal& b = budget->budget.amount();
    if (b < v.front().cost.amount()) {
      throw Infeasible("budget " + budget->budget.to_string() +
                       " is below the cheapest frontier point");
    }
    if (b >= v.back().cost.amount()) return v.back();
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
      const Decimal& lo = v[i].cost.amount();
      const Decimal& hi = v[i + 1].cost.amount();
      if (b == lo) return v[i];
      if (b > lo && b < hi) {
        const double p = static_cast<double>(hi.units() - b.units()) /
                         static_cast<double>(hi.units() - lo.units());
        return MixturePolicy{v[i], v[i + 1], p};
      }
    }
    return v.back();
  }

  const double floor = std::get<MinAccuracy>(constraint).accuracy;
  if (!std::isfinite(floor)) throw NonFinite();
  const cpp_rational target = shortest_decimal(floor);
  if (target <= exact_accuracy(v.front())) return v.front();
  if (target > exact_accuracy(v.back())) {
    throw Infeasible("no frontier point reaches accuracy " + format_probability(floor));
  }
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    const cpp_rational lo = exact_accuracy(v[i]);
    const cpp_rational hi = exact_accuracy(v[i + 1]);
    if (target == hi) return v[i + 1];
    if (target > lo && target < hi) {
      const cpp_rational p = (hi - target) / (hi - lo);
      return MixturePolicy{v[i], v[i + 1], static_cast<double>(p)};
    }
  }
  return v.back();
}

bool lies_on_or_below(const Frontier& frontier, const ParetoPoint& point) {
  const auto& v = frontier.vertices;
  if (v.empty()) throw EmptyInput("empty frontier");
  const Exact q{&point, exact_cost(point), exact_accuracy(point)};
  std::vector<Exact> ex;
  for (const auto& p : v) ex.push_back({&p, exact_cost(p), exact_accuracy(p)});
  if (q.cost < ex.front().cost) return false;
  if (q.cost >= ex.back().cost) return q.accuracy <= ex.back().accuracy;
  for (std::size_t i = 0; i + 1 < ex.size(); ++i) {
    if (q.cost >= ex[i].cost && q.cost <= ex[i + 1].cost) {
      return cross(ex[i], ex[i + 1], q) <= 0;
    }
  }
  return false;
}

namespace {

nlohmann::ordered_json interval_json(const std::optional<stats::Interval>& ci) {
  if (!ci) return nullptr;
  return nlohmann::ordered_json::array({ci->low, ci->high});
}

}  // namespace

nlohmann::ordered_json to_json(const ParetoPoint& point) {
  nlohmann::ordered_json j;
  j["label"] = point.label;
  j["cost"] = point.cost.to_string();
  j["currency"] = point.cost.currency();
  j["accuracy"] = point.accuracy;
  j["accuracy_ci"] = interval_json(point.accuracy_ci);
  j["cost_ci"] = interval_json(point.cost_ci);
  return j;
}

nlohmann::ordered_json to_json(const Frontier& frontier) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& v : frontier.vertices) arr.push_back(to_json(v));
  return arr;
}

nlohmann::ordered_json to_json(const Recommendation& rec) {
  if (const auto* point = std::get_if<ParetoPoint>(&rec)) {
    return {{"kind", "point"}, {"point", to_json(*point)}};
  }
  const auto& mix = std::get<MixturePolicy>(rec);
  return {{"kind", "mixture"},
          {"a", to_json(mix.a)},
          {"b", to_json(mix.b)},
          {"p", mix.p},
          {"expected_cost", mix.expected_cost().to_string()},
          {"expected_accuracy", mix.expected_accuracy()}};
}

}  // namespace costeval::pareto
