#pragma once

// Independent reference computations shared by unit and acceptance tests.
// Nothing here calls into costeval's pareto, pricing or manifest code.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <nlohmann/json.hpp>

namespace oracle {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;
__extension__ typedef __int128 i128;

inline nlohmann::json load_golden(const std::string& name) {
  std::ifstream in(std::string(COSTEVAL_GOLDEN_DIR) + "/" + name);
  if (!in) throw std::runtime_error("missing golden file " + name);
  return nlohmann::json::parse(in);
}

// ---------------------------------------------------------------- frontier

// Cost in integer minor units, accuracy as successes over a shared task count.
struct IntPoint {
  std::string label;
  std::int64_t cost = 0;
  std::int64_t hits = 0;
};

inline bool dominates(const IntPoint& r, const IntPoint& q) {
  return r.cost <= q.cost && r.hits >= q.hits && (r.cost < q.cost || r.hits > q.hits);
}

// O(n^2): labels of undominated points, input order.
inline std::vector<std::string> non_dominated_labels(const std::vector<IntPoint>& pts) {
  std::vector<std::string> out;
  for (const auto& q : pts) {
    bool dominated = false;
    for (const auto& r : pts) dominated = dominated || dominates(r, q);
    if (!dominated) out.push_back(q.label);
  }
  return out;
}

// O(n^3): a distinct undominated point is a hull vertex unless it lies on or
// below a chord between undominated points strictly to its left and right.
// Exact duplicates are represented by their smallest label. Cost ascending.
inline std::vector<std::string> hull_labels(const std::vector<IntPoint>& pts) {
  std::vector<IntPoint> nd;
  for (const auto& q : pts) {
    bool dominated = false;
    for (const auto& r : pts) dominated = dominated || dominates(r, q);
    if (dominated) continue;
    auto same = std::find_if(nd.begin(), nd.end(), [&](const IntPoint& x) {
      return x.cost == q.cost && x.hits == q.hits;
    });
    if (same == nd.end()) nd.push_back(q);
    else if (q.label < same->label) same->label = q.label;
  }
  std::vector<IntPoint> hull;
  for (const auto& p : nd) {
    bool under = false;
    for (const auto& a : nd) {
      for (const auto& b : nd) {
        if (!(a.cost < p.cost && p.cost < b.cost)) continue;
        // p on or below segment a-b  <=>  cross(a->b, a->p) <= 0
        const i128 lhs = static_cast<i128>(b.cost - a.cost) * (p.hits - a.hits);
        const i128 rhs = static_cast<i128>(b.hits - a.hits) * (p.cost - a.cost);
        if (lhs <= rhs) under = true;
      }
    }
    if (!under) hull.push_back(p);
  }
  std::sort(hull.begin(), hull.end(),
            [](const IntPoint& x, const IntPoint& y) { return x.cost < y.cost; });
  std::vector<std::string> out;
  for (const auto& h : hull) out.push_back(h.label);
  return out;
}

// HumanEval agent means (total USD, accuracy) over the 164 problems.
struct TablePoint {
  const char* label;
  const char* cost;
  const char* accuracy;
};

inline const std::vector<TablePoint>& humaneval_agents() {
  static const std::vector<TablePoint> rows = {
      {"LATS (GPT-4)", "134.50", "0.880"},
      {"LATS (GPT-3.5)", "9.49", "0.804"},
      {"LDB (GPT-4, GPT-3.5)", "2.19", "0.910"},
      {"LDB (Reflexion, GPT-4)", "7.26", "0.929"},
      {"LDB (Reflexion, GPT-3.5)", "4.19", "0.889"},
      {"LDB (GPT-4)", "6.36", "0.933"},
      {"LDB (GPT-3.5)", "0.63", "0.802"},
      {"GPT-4", "1.93", "0.896"},
      {"GPT-3.5", "0.05", "0.739"},
      {"Reflexion (GPT-4)", "3.90", "0.878"},
      {"Warming (GPT-4)", "2.45", "0.932"},
      {"Retry (GPT-4)", "2.51", "0.920"},
      {"Escalation", "0.27", "0.850"},
  };
  return rows;
}

// ---------------------------------------------------------------- money

// "[-]d[.d]" to an exact rational.
inline cpp_rational parse_decimal(const std::string& text) {
  std::string digits;
  std::size_t frac = 0;
  bool seen_point = false;
  bool negative = false;
  for (char c : text) {
    if (c == '-') negative = true;
    else if (c == '.') seen_point = true;
    else {
      digits += c;
      if (seen_point) ++frac;
    }
  }
  // cpp_int reads a leading zero as an octal prefix.
  digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size()));
  cpp_int num(digits.empty() ? std::string("0") : digits);
  cpp_int den = 1;
  for (std::size_t i = 0; i < frac; ++i) den *= 10;
  cpp_rational v(num, den);
  return negative ? cpp_rational(-v) : v;
}

// Half-even rounding to six places, printed with exactly six digits.
inline std::string format_money6(const cpp_rational& value) {
  const cpp_rational scaled = value * 1'000'000;
  cpp_int q = boost::multiprecision::numerator(scaled) / boost::multiprecision::denominator(scaled);
  cpp_rational rem = scaled - cpp_rational(q);
  if (rem < 0) {
    q -= 1;
    rem += 1;
  }
  const cpp_rational half(1, 2);
  if (rem > half || (rem == half && q % 2 != 0)) q += 1;
  const bool negative = q < 0;
  if (negative) q = -q;
  std::string s = q.str();
  while (s.size() < 7) s.insert(s.begin(), '0');
  s.insert(s.end() - 6, '.');
  return (negative ? "-" : "") + s;
}

// ---------------------------------------------------------------- holdout lint

// Rows: distribution-specific, task-specific, domain-general, fully general.
// Columns: no holdout, in-distribution samples, out-of-distribution samples,
// tasks, domains. 'P' pass, 'F' fail (a stated intent turns F into W).
inline const char* kLintGrid[4] = {
    "FPPPP",
    "FFPPP",
    "FFFPP",
    "FFFFP",
};

}  // namespace oracle
