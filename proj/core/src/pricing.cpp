#include "costeval/pricing.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "costeval/errors.hpp"
#include "costeval/json_util.hpp"
#include "costeval/ledger.hpp"

namespace costeval {

using nlohmann::ordered_json;

void Money::require_same_currency(const Money& a, const Money& b) {
  if (a.currency_ != b.currency_) throw CurrencyMismatch(a.currency_, b.currency_);
}

Money& Money::operator+=(const Money& other) {
  require_same_currency(*this, other);
  amount_ += other.amount_;
  return *this;
}

Money& Money::operator-=(const Money& other) {
  require_same_currency(*this, other);
  amount_ -= other.amount_;
  return *this;
}

bool money_less(const Money& a, const Money& b) {
  Money::require_same_currency(a, b);
  return a.amount() < b.amount();
}

bool money_less_equal(const Money& a, const Money& b) {
  Money::require_same_currency(a, b);
  return a.amount() <= b.amount();
}

namespace {

bool valid_date(const std::string& s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  for (std::size_t i : {0, 1, 2, 3, 5, 6, 8, 9}) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  const int month = std::stoi(s.substr(5, 2));
  const int day = std::stoi(s.substr(8, 2));
  return month >= 1 && month <= 12 && day >= 1 && day <= 31;
}

bool valid_currency(const std::string& s) {
  return s.size() == 3 &&
         std::all_of(s.begin(), s.end(), [](char c) { return c >= 'A' && c <= 'Z'; });
}

}  // namespace

PriceSheet::PriceSheet(std::string currency, std::string as_of)
    : currency_(std::move(currency)), as_of_(std::move(as_of)) {
  if (!valid_currency(currency_)) {
    throw InvalidArgument("currency must be a 3-letter ISO code: " + currency_);
  }
  if (!valid_date(as_of_)) {
    throw InvalidArgument("as_of must be YYYY-MM-DD: " + as_of_);
  }
}

void PriceSheet::add(const std::string& model, ModelPrice price) {
  if (model.empty()) throw InvalidArgument("empty model id");
  if (price.input_per_token < Decimal{} || price.output_per_token < Decimal{}) {
    throw InvalidArgument("negative price for model " + model);
  }
  if (!models_.emplace(model, price).second) {
    throw InvalidArgument("duplicate model in price sheet: " + model);
  }
}

const ModelPrice& PriceSheet::price(const std::string& model) const {
  auto it = models_.find(model);
  if (it == models_.end()) throw UnknownModel({model});
  return it->second;
}

PriceSheet PriceSheet::scaled(const Decimal& factor) const {
  if (factor < Decimal{}) throw InvalidArgument("negative price scale");
  PriceSheet out(currency_, as_of_);
  for (const auto& [model, p] : models_) {
    out.add(model, {p.input_per_token.times_exact(factor),
                    p.output_per_token.times_exact(factor)});
  }
  return out;
}

ordered_json PriceSheet::to_json() const {
  ordered_json models = ordered_json::object();
  for (const auto& [model, p] : models_) {
    models[model] = {{"input_per_token", p.input_per_token.to_string()},
                     {"output_per_token", p.output_per_token.to_string()}};
  }
  return {{"currency", currency_}, {"as_of", as_of_}, {"models", models}};
}

PriceSheet PriceSheet::from_json(const ordered_json& doc) {
  using namespace json_util;
  try {
    PriceSheet sheet(require_string(doc, "currency"), require_string(doc, "as_of"));
    const auto& models = require(doc, "models");
    if (!models.is_object()) throw SchemaError(0, "\"models\" must be an object");
    for (const auto& [model, entry] : models.items()) {
      sheet.add(model, {Decimal::parse(require_string(entry, "input_per_token")),
                        Decimal::parse(require_string(entry, "output_per_token"))});
    }
    return sheet;
  } catch (const InvalidArgument& e) {
    throw SchemaError(0, std::string("price sheet: ") + e.what());
  }
}

PriceSheet PriceSheet::parse(std::string_view text) {
  return from_json(json_util::parse_strict(text));
}

std::string PriceSheet::serialize() const { return to_json().dump(2) + "\n"; }

PriceSheet PriceSheet::load(const std::string& path) {
  return parse(json_util::read_file(path));
}

void PriceSheet::save(const std::string& path) const {
  json_util::write_file(path, serialize());
}

Money exact_cost_of_usage(const TokenUsage& usage, const std::string& model,
                          const PriceSheet& sheet) {
  const ModelPrice& p = sheet.price(model);
  return Money(p.input_per_token * usage.input_tokens +
                   p.output_per_token * usage.output_tokens,
               sheet.currency());
}

Money cost_of_usage(const TokenUsage& usage, const std::string& model,
                    const PriceSheet& sheet) {
  return exact_cost_of_usage(usage, model, sheet).rounded();
}

std::map<std::string, Money> reprice(const EvalLedger& ledger,
                                     const PriceSheet& sheet) {
  std::vector<std::string> missing;
  for (const auto& model : ledger.models()) {
    if (!sheet.contains(model)) missing.push_back(model);
  }
  if (!missing.empty()) throw UnknownModel(std::move(missing));

  std::map<std::string, Money> totals;
  for (const auto& run : ledger.runs) {
    auto [it, _] = totals.try_emplace(run.strategy_id, Money::zero(sheet.currency()));
    for (const auto& task : run.results) {
      for (const auto& call : task.calls) {
        it->second += exact_cost_of_usage(call.usage, call.model, sheet);
      }
    }
  }
  for (auto& [_, total] : totals) total = total.rounded();
  return totals;
}

Money cost_of_model_usage(const std::map<std::string, TokenUsage>& by_model,
                          const PriceSheet& sheet) {
  std::vector<std::string> missing;
  for (const auto& [model, _] : by_model) {
    if (!sheet.contains(model)) missing.push_back(model);
  }
  if (!missing.empty()) throw UnknownModel(std::move(missing));
  Money total = Money::zero(sheet.currency());
  for (const auto& [model, usage] : by_model) {
    total += exact_cost_of_usage(usage, model, sheet);
  }
  return total.rounded();
}

Breakeven breakeven_tasks(const CostBreakdown& a, const CostBreakdown& b) {
  for (const Money* m : {&a.variable_per_task, &b.fixed, &b.variable_per_task}) {
    Money::require_same_currency(a.fixed, *m);
  }
  const Decimal::rep fixed_gap = a.fixed.amount().units() - b.fixed.amount().units();
  if (fixed_gap <= 0) return std::uint64_t{0};
  const Decimal::rep slope_gap =
      b.variable_per_task.amount().units() - a.variable_per_task.amount().units();
  if (slope_gap <= 0) return NoBreakeven{};
  // ceil(fixed_gap / slope_gap) for positive operands.
  const Decimal::rep n = (fixed_gap + slope_gap - 1) / slope_gap;
  return static_cast<std::uint64_t>(n);
}

}  // namespace costeval
