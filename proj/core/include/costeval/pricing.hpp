#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <variant>

#include <nlohmann/json.hpp>

#include "costeval/decimal.hpp"

namespace costeval {

struct EvalLedger;

/// Presentation and aggregation precision: six places of the major unit.
inline constexpr int kMoneyDigits = 6;

struct TokenUsage {
  std::uint64_t input_tokens = 0;
  std::uint64_t output_tokens = 0;

  TokenUsage& operator+=(const TokenUsage& other) {
    input_tokens += other.input_tokens;
    output_tokens += other.output_tokens;
    return *this;
  }
  friend TokenUsage operator+(TokenUsage a, const TokenUsage& b) {
    return a += b;
  }
  friend bool operator==(const TokenUsage&, const TokenUsage&) = default;
};

/// An exact amount in a single currency. Arithmetic across currencies throws
/// CurrencyMismatch.
class Money {
 public:
  Money() = default;
  Money(Decimal amount, std::string currency)
      : amount_(amount), currency_(std::move(currency)) {}

  static Money parse(std::string_view amount, std::string currency) {
    return Money(Decimal::parse(amount), std::move(currency));
  }
  static Money zero(std::string currency) {
    return Money(Decimal{}, std::move(currency));
  }

  const Decimal& amount() const { return amount_; }
  const std::string& currency() const { return currency_; }

  /// Round half-even to the presentation precision.
  Money rounded() const { return Money(amount_.rounded(kMoneyDigits), currency_); }
  /// amount / n, rounded half-even to the presentation precision.
  Money divided_rounded(std::int64_t n) const {
    return Money(amount_.divided_rounded(n, kMoneyDigits), currency_);
  }

  /// "10.000000" (amount only, presentation precision).
  std::string to_string() const { return amount_.to_fixed(kMoneyDigits); }
  double to_double() const { return amount_.to_double(); }

  Money& operator+=(const Money& other);
  Money& operator-=(const Money& other);
  friend Money operator+(Money a, const Money& b) { return a += b; }
  friend Money operator-(Money a, const Money& b) { return a -= b; }
  friend Money operator*(const Money& a, std::uint64_t n) {
    return Money(a.amount_ * n, a.currency_);
  }

  friend bool operator==(const Money&, const Money&) = default;

  /// Throws CurrencyMismatch unless both share a currency.
  static void require_same_currency(const Money& a, const Money& b);

 private:
  Decimal amount_;
  std::string currency_;
};

/// Ordering within one currency; throws CurrencyMismatch otherwise.
bool money_less(const Money& a, const Money& b);
bool money_less_equal(const Money& a, const Money& b);

struct ModelPrice {
  Decimal input_per_token;
  Decimal output_per_token;

  friend bool operator==(const ModelPrice&, const ModelPrice&) = default;
};

/// Dated per-model token prices. The only source of dollar figures.
class PriceSheet {
 public:
  PriceSheet() = default;
  PriceSheet(std::string currency, std::string as_of);

  const std::string& currency() const { return currency_; }
  const std::string& as_of() const { return as_of_; }
  const std::map<std::string, ModelPrice>& models() const { return models_; }

  /// Adds a model; throws InvalidArgument on a duplicate id or a negative
  /// price.
  void add(const std::string& model, ModelPrice price);
  bool contains(const std::string& model) const {
    return models_.count(model) != 0;
  }
  /// Throws UnknownModel.
  const ModelPrice& price(const std::string& model) const;

  /// Every price multiplied by an exact non-negative factor.
  PriceSheet scaled(const Decimal& factor) const;

  nlohmann::ordered_json to_json() const;
  /// Throws SchemaError on a malformed document.
  static PriceSheet from_json(const nlohmann::ordered_json& doc);
  /// Parses text, rejecting duplicate keys anywhere in the document.
  static PriceSheet parse(std::string_view text);
  std::string serialize() const;

  static PriceSheet load(const std::string& path);
  void save(const std::string& path) const;

  friend bool operator==(const PriceSheet&, const PriceSheet&) = default;

 private:
  std::string currency_ = "USD";
  std::string as_of_;
  std::map<std::string, ModelPrice> models_;
};

/// input_tokens * input_price + output_tokens * output_price, exact.
Money exact_cost_of_usage(const TokenUsage& usage, const std::string& model,
                          const PriceSheet& sheet);

/// Same as exact_cost_of_usage, rounded half-even to six places.
Money cost_of_usage(const TokenUsage& usage, const std::string& model,
                    const PriceSheet& sheet);

/// Per-strategy totals: exact per-call costs are summed, then each total is
/// rounded once. Throws UnknownModel listing every unpriced model.
std::map<std::string, Money> reprice(const EvalLedger& ledger,
                                     const PriceSheet& sheet);

/// Token totals keyed by model, priced exactly and rounded once.
Money cost_of_model_usage(const std::map<std::string, TokenUsage>& by_model,
                          const PriceSheet& sheet);

/// One-time plus per-task spend of a deployed design.
struct CostBreakdown {
  Money fixed;
  Money variable_per_task;
  std::uint64_t tasks_assumed = 0;

  Money total(std::uint64_t tasks) const {
    return fixed + variable_per_task * tasks;
  }
};

struct NoBreakeven {
  friend bool operator==(NoBreakeven, NoBreakeven) { return true; }
};
using Breakeven = std::variant<std::uint64_t, NoBreakeven>;

/// Smallest n >= 0 with total_a(n) <= total_b(n), or NoBreakeven when a never
/// catches up.
Breakeven breakeven_tasks(const CostBreakdown& a, const CostBreakdown& b);

}  // namespace costeval
