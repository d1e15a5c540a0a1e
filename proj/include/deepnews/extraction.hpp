#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace deepnews {

/// A number with its unit as written, plus the normalized base unit and scale
/// used for unit-compatible comparison ("45亿元" -> 45, unit "亿元", base CNY,
/// scale 1e8).
struct QuantityValue {
  double number = 0.0;
  std::string unit;
  std::string base_unit;
  double scale = 1.0;
  std::string literal;

  double scaled() const { return number * scale; }
  bool operator==(const QuantityValue&) const = default;
};

/// month/day are 0 when the literal does not carry them.
struct DateValue {
  int year = 0;
  int month = 0;
  int day = 0;
  std::string literal;

  bool operator==(const DateValue&) const = default;
};

struct TextValue {
  std::string text;
  bool operator==(const TextValue&) const = default;
};

struct Span {
  std::size_t start = 0;
  std::size_t end = 0;
  bool operator==(const Span&) const = default;
};

enum class MentionKind { Quantity, Date };

struct NumericMention {
  MentionKind kind = MentionKind::Quantity;
  QuantityValue quantity;
  DateValue date;
  Span span;  // code points, covers the literal exactly

  const std::string& literal() const { return kind == MentionKind::Quantity ? quantity.literal : date.literal; }
};

/// Every numeric literal, percentage, currency amount and date, left to right,
/// non-overlapping. Dates claim their digits first so they never double as
/// quantities. Digits glued to Latin letters ("Q3", "5G") are identifiers and
/// are skipped.
std::vector<NumericMention> scan_numeric_mentions(std::u32string_view text);
std::vector<NumericMention> scan_numeric_mentions(std::string_view utf8);

struct QuoteMention {
  std::string speaker;
  std::string verb;
  std::string content;
  Span span;  // content only, quotes excluded
};

/// Quoted spans ("..", “..”, 「..」, 『..』) attributed to a speaker through a
/// reporting verb before the quote or after it. Unattributed quotes are
/// dropped.
std::vector<QuoteMention> scan_quotes(std::u32string_view text);

struct EntityMention {
  std::string name;
  Span span;
};

/// Organization names: runs of capitalized Latin words ending in a corporate
/// suffix (Corp, Group, Inc, ...) and CJK names ending in 公司/集团/银行/科技.
std::vector<EntityMention> scan_entities(std::u32string_view text);

}  // namespace deepnews
