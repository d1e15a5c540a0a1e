#include "deepnews/extraction.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>

#include "deepnews/text.hpp"

namespace deepnews {

namespace {

using text::is_ascii_alnum;
using text::is_ascii_alpha;
using text::is_ascii_digit;

bool match_at(std::u32string_view s, std::size_t i, std::u32string_view lit) {
  return i + lit.size() <= s.size() && s.substr(i, lit.size()) == lit;
}

char32_t lower(char32_t c) { return (c >= 'A' && c <= 'Z') ? c - 'A' + 'a' : c; }

// Case-insensitive ASCII word match at i, requiring a non-letter after it.
bool match_word_ci(std::u32string_view s, std::size_t i, std::string_view word) {
  if (i + word.size() > s.size()) return false;
  for (std::size_t k = 0; k < word.size(); ++k) {
    if (lower(s[i + k]) != static_cast<char32_t>(word[k])) return false;
  }
  const std::size_t after = i + word.size();
  return after >= s.size() || !is_ascii_alpha(s[after]);
}

struct Digits {
  long value = 0;
  std::size_t len = 0;
};

Digits read_digits(std::u32string_view s, std::size_t i, std::size_t max_len) {
  Digits d;
  while (i + d.len < s.size() && d.len < max_len && is_ascii_digit(s[i + d.len])) {
    d.value = d.value * 10 + static_cast<long>(s[i + d.len] - '0');
    ++d.len;
  }
  return d;
}

bool digit_at(std::u32string_view s, std::size_t i) { return i < s.size() && is_ascii_digit(s[i]); }

struct Suffix {
  std::u32string_view text;
  double scale;
  std::string_view base;
};

// Longest first.
constexpr std::array<Suffix, 20> kCjkUnits = {{
    {U"个百分点", 1.0, "pp"},
    {U"万亿元", 1e12, "CNY"},
    {U"百万元", 1e6, "CNY"},
    {U"亿美元", 1e8, "USD"},
    {U"万美元", 1e4, "USD"},
    {U"亿港元", 1e8, "HKD"},
    {U"亿元", 1e8, "CNY"},
    {U"万元", 1e4, "CNY"},
    {U"千元", 1e3, "CNY"},
    {U"美元", 1.0, "USD"},
    {U"港元", 1.0, "HKD"},
    {U"万亿", 1e12, ""},
    {U"百万", 1e6, ""},
    {U"元", 1.0, "CNY"},
    {U"亿", 1e8, ""},
    {U"万", 1e4, ""},
    {U"千", 1e3, ""},
    {U"吨", 1.0, "t"},
    {U"辆", 1.0, "vehicle"},
    {U"股", 1.0, "share"},
}};

struct WordUnit {
  std::string_view word;
  double scale;
  std::string_view base;
};

constexpr std::array<WordUnit, 7> kScaleWords = {{
    {"trillion", 1e12, ""},
    {"billion", 1e9, ""},
    {"million", 1e6, ""},
    {"thousand", 1e3, ""},
    {"bn", 1e9, ""},
    {"mn", 1e6, ""},
    {"m", 1e6, ""},
}};

constexpr std::array<WordUnit, 15> kMeasureWords = {{
    {"percentage points", 1.0, "pp"},
    {"percent", 1.0, "%"},
    {"yuan", 1.0, "CNY"},
    {"rmb", 1.0, "CNY"},
    {"dollars", 1.0, "USD"},
    {"usd", 1.0, "USD"},
    {"euros", 1.0, "EUR"},
    {"tonnes", 1.0, "t"},
    {"tons", 1.0, "t"},
    {"units", 1.0, "unit"},
    {"vehicles", 1.0, "vehicle"},
    {"shares", 1.0, "share"},
    {"gwh", 1.0, "GWh"},
    {"mwh", 1.0, "MWh"},
    {"kwh", 1.0, "kWh"},
}};

struct Prefix {
  std::u32string_view text;
  std::string_view base;
};

constexpr std::array<Prefix, 8> kCurrencyPrefixes = {{
    {U"US$", "USD"},
    {U"HK$", "HKD"},
    {U"RMB", "CNY"},
    {U"$", "USD"},
    {U"¥", "CNY"},
    {U"￥", "CNY"},
    {U"€", "EUR"},
    {U"£", "GBP"},
}};

constexpr std::array<std::string_view, 12> kMonths = {"january", "february", "march",     "april",
                                                     "may",     "june",     "july",      "august",
                                                     "september", "october", "november", "december"};

std::string utf8(std::u32string_view s, std::size_t b, std::size_t e) { return text::encode(s.substr(b, e - b)); }

// "March", "Mar", "Mar." at i; returns month number and end position.
std::optional<std::pair<int, std::size_t>> month_at(std::u32string_view s, std::size_t i) {
  for (std::size_t m = 0; m < kMonths.size(); ++m) {
    const auto& full = kMonths[m];
    if (match_word_ci(s, i, full)) return std::pair<int, std::size_t>{static_cast<int>(m) + 1, i + full.size()};
    std::string_view abbrev = full.substr(0, full == "september" ? 4 : 3);
    for (auto a : {abbrev, full.substr(0, 3)}) {
      if (match_word_ci(s, i, a)) {
        std::size_t end = i + a.size();
        if (end < s.size() && s[end] == '.') ++end;
        return std::pair<int, std::size_t>{static_cast<int>(m) + 1, end};
      }
    }
  }
  return std::nullopt;
}

bool valid_md(long m, long d) { return m >= 1 && m <= 12 && d >= 1 && d <= 31; }

std::optional<NumericMention> date_at_digit(std::u32string_view s, std::size_t i) {
  const auto year = read_digits(s, i, 5);
  NumericMention out;
  out.kind = MentionKind::Date;
  auto finish = [&](int y, int m, int d, std::size_t end) -> std::optional<NumericMention> {
    if (digit_at(s, end)) return std::nullopt;
    out.date = DateValue{y, m, d, utf8(s, i, end)};
    out.span = Span{i, end};
    return out;
  };
  if (year.len == 4) {
    const std::size_t p = i + 4;
    // 2024-03-12, 2024/3/12
    if (p < s.size() && (s[p] == '-' || s[p] == '/')) {
      const char32_t sep = s[p];
      const auto mo = read_digits(s, p + 1, 2);
      if (mo.len > 0 && p + 1 + mo.len < s.size() && s[p + 1 + mo.len] == sep) {
        const auto dd = read_digits(s, p + 2 + mo.len, 2);
        if (dd.len > 0 && valid_md(mo.value, dd.value)) {
          return finish(static_cast<int>(year.value), static_cast<int>(mo.value), static_cast<int>(dd.value),
                        p + 2 + mo.len + dd.len);
        }
      }
    }
    // 2024年3月12日
    if (p < s.size() && s[p] == U'年') {
      const auto mo = read_digits(s, p + 1, 2);
      if (mo.len > 0 && p + 1 + mo.len < s.size() && s[p + 1 + mo.len] == U'月' && mo.value >= 1 &&
          mo.value <= 12) {
        const std::size_t q = p + 2 + mo.len;
        const auto dd = read_digits(s, q, 2);
        if (dd.len > 0 && q + dd.len < s.size() && s[q + dd.len] == U'日' && valid_md(mo.value, dd.value)) {
          return finish(static_cast<int>(year.value), static_cast<int>(mo.value), static_cast<int>(dd.value),
                        q + dd.len + 1);
        }
        return finish(static_cast<int>(year.value), static_cast<int>(mo.value), 0, q);
      }
      return finish(static_cast<int>(year.value), 0, 0, p + 1);
    }
  }
  // 3月12日, 3月
  if (year.len >= 1 && year.len <= 2) {
    const std::size_t p = i + year.len;
    if (p < s.size() && s[p] == U'月' && year.value >= 1 && year.value <= 12) {
      const auto dd = read_digits(s, p + 1, 2);
      if (dd.len > 0 && p + 1 + dd.len < s.size() && s[p + 1 + dd.len] == U'日' && valid_md(year.value, dd.value)) {
        return finish(0, static_cast<int>(year.value), static_cast<int>(dd.value), p + 2 + dd.len);
      }
      return finish(0, static_cast<int>(year.value), 0, p + 1);
    }
    // 12 March 2024
    if (p < s.size() && s[p] == ' ' && year.value >= 1 && year.value <= 31) {
      if (auto mon = month_at(s, p + 1)) {
        const std::size_t q = mon->second;
        if (q < s.size() && s[q] == ' ') {
          const auto yy = read_digits(s, q + 1, 5);
          if (yy.len == 4) {
            return finish(static_cast<int>(yy.value), mon->first, static_cast<int>(year.value), q + 1 + yy.len);
          }
        }
      }
    }
  }
  return std::nullopt;
}

// March 12, 2024 / March 2024 at an alphabetic word start.
std::optional<NumericMention> date_at_alpha(std::u32string_view s, std::size_t i) {
  auto mon = month_at(s, i);
  if (!mon) return std::nullopt;
  std::size_t p = mon->second;
  if (p >= s.size() || s[p] != ' ') return std::nullopt;
  ++p;
  const auto first = read_digits(s, p, 5);
  NumericMention out;
  out.kind = MentionKind::Date;
  if (first.len == 4 && !digit_at(s, p + 4)) {
    out.date = DateValue{static_cast<int>(first.value), mon->first, 0, utf8(s, i, p + 4)};
    out.span = Span{i, p + 4};
    return out;
  }
  if (first.len >= 1 && first.len <= 2 && first.value >= 1 && first.value <= 31) {
    std::size_t q = p + first.len;
    for (std::string_view ord : {"st", "nd", "rd", "th"}) {
      if (match_word_ci(s, q, ord)) {
        q += 2;
        break;
      }
    }
    if (q < s.size() && s[q] == ',') ++q;
    if (q < s.size() && s[q] == ' ') {
      const auto yy = read_digits(s, q + 1, 5);
      if (yy.len == 4) {
        out.date = DateValue{static_cast<int>(yy.value), mon->first, static_cast<int>(first.value),
                             utf8(s, i, q + 1 + yy.len)};
        out.span = Span{i, q + 1 + yy.len};
        return out;
      }
    }
  }
  return std::nullopt;
}

struct NumberToken {
  double value = 0.0;
  std::size_t end = 0;
  bool plain_integer = true;  // no sign, separators or decimals
  std::size_t digits = 0;
};

std::optional<NumberToken> read_number(std::u32string_view s, std::size_t i) {
  NumberToken tok;
  std::size_t p = i;
  double sign = 1.0;
  if (p < s.size() && (s[p] == '-' || s[p] == '+')) {
    sign = s[p] == '-' ? -1.0 : 1.0;
    tok.plain_integer = false;
    ++p;
  }
  if (!digit_at(s, p)) return std::nullopt;
  std::string digits;
  const std::size_t int_start = p;
  while (digit_at(s, p)) digits.push_back(static_cast<char>(s[p++]));
  if (p - int_start <= 3) {
    while (p + 3 < s.size() + 0 && s[p] == ',' && digit_at(s, p + 1) && digit_at(s, p + 2) && digit_at(s, p + 3) &&
           !digit_at(s, p + 4)) {
      for (std::size_t k = 1; k <= 3; ++k) digits.push_back(static_cast<char>(s[p + k]));
      p += 4;
      tok.plain_integer = false;
    }
  }
  tok.digits = digits.size();
  if (p + 1 < s.size() && s[p] == '.' && digit_at(s, p + 1)) {
    digits.push_back('.');
    ++p;
    while (digit_at(s, p)) digits.push_back(static_cast<char>(s[p++]));
    tok.plain_integer = false;
  }
  tok.value = sign * std::stod(digits);
  tok.end = p;
  return tok;
}

struct UnitMatch {
  std::string text;
  double scale = 1.0;
  std::string base;
  std::size_t end = 0;
  bool matched = false;
};

UnitMatch read_suffix(std::u32string_view s, std::size_t p) {
  UnitMatch u;
  u.end = p;
  if (p < s.size() && (s[p] == '%' || s[p] == U'％')) {
    u = {utf8(s, p, p + 1), 1.0, "%", p + 1, true};
    return u;
  }
  for (const auto& cu : kCjkUnits) {
    if (match_at(s, p, cu.text)) {
      return {text::encode(cu.text), cu.scale, std::string(cu.base), p + cu.text.size(), true};
    }
  }
  // English words, glued ("4.5bn") or after one space ("4.5 billion").
  for (std::size_t gap : {std::size_t{0}, std::size_t{1}}) {
    const std::size_t q = p + gap;
    if (gap == 1 && (p >= s.size() || s[p] != ' ')) break;
    for (const auto& w : kScaleWords) {
      if (gap == 1 && w.word.size() <= 2 && w.word != "bn" && w.word != "mn") continue;
      if (!match_word_ci(s, q, w.word)) continue;
      UnitMatch m{utf8(s, q, q + w.word.size()), w.scale, std::string(w.base), q + w.word.size(), true};
      // optional currency word after the scale: "4.5 billion yuan"
      if (m.end < s.size() && s[m.end] == ' ') {
        for (const auto& cw : kMeasureWords) {
          if (cw.base == "%" || cw.base == "pp") continue;
          if (match_word_ci(s, m.end + 1, cw.word)) {
            m.base = std::string(cw.base);
            m.text = utf8(s, q, m.end + 1 + cw.word.size());
            m.end = m.end + 1 + cw.word.size();
            break;
          }
        }
      }
      return m;
    }
    if (gap == 1) {
      for (const auto& w : kMeasureWords) {
        if (match_word_ci(s, q, w.word)) {
          return {utf8(s, q, q + w.word.size()), w.scale, std::string(w.base), q + w.word.size(), true};
        }
      }
    }
  }
  return u;
}

void scan_into(std::u32string_view s, std::vector<NumericMention>& out) {
  std::size_t i = 0;
  const std::size_t n = s.size();
  while (i < n) {
    const char32_t c = s[i];
    const bool word_start = i == 0 || !is_ascii_alnum(s[i - 1]);

    std::optional<Prefix> prefix;
    std::size_t num_start = i;
    if (is_ascii_alpha(c)) {
      if (!word_start) {
        ++i;
        continue;
      }
      if (auto d = date_at_alpha(s, i)) {
        i = d->span.end;
        out.push_back(std::move(*d));
        continue;
      }
      for (const auto& pf : kCurrencyPrefixes) {
        if (is_ascii_alpha(pf.text[0]) && match_at(s, i, pf.text)) {
          std::size_t q = i + pf.text.size();
          if (q < n && s[q] == ' ') ++q;
          if (digit_at(s, q)) {
            prefix = pf;
            num_start = q;
          }
          break;
        }
      }
      if (!prefix) {
        while (i < n && (is_ascii_alnum(s[i]) || s[i] == '_')) ++i;
        continue;
      }
    } else if (!is_ascii_digit(c) && c != '-' && c != '+') {
      for (const auto& pf : kCurrencyPrefixes) {
        if (!is_ascii_alpha(pf.text[0]) && match_at(s, i, pf.text)) {
          std::size_t q = i + pf.text.size();
          if (q < n && s[q] == ' ') ++q;
          if (digit_at(s, q)) {
            prefix = pf;
            num_start = q;
          }
          break;
        }
      }
      if (!prefix) {
        ++i;
        continue;
      }
    } else {
      // digit or sign
      const bool signed_start = (c == '-' || c == '+');
      if (signed_start && (!digit_at(s, i + 1) || (i > 0 && (is_ascii_alnum(s[i - 1]) || s[i - 1] == '.')))) {
        ++i;
        continue;
      }
      if (i > 0 && (is_ascii_alpha(s[i - 1]) || s[i - 1] == '.' || s[i - 1] == '_' ||
                    (is_ascii_digit(s[i - 1])))) {
        while (i < n && (is_ascii_alnum(s[i]) || s[i] == '.')) ++i;
        continue;
      }
      if (!signed_start) {
        if (auto d = date_at_digit(s, i)) {
          i = d->span.end;
          out.push_back(std::move(*d));
          continue;
        }
      }
    }

    auto num = read_number(s, num_start);
    if (!num) {
      ++i;
      continue;
    }
    auto unit = read_suffix(s, num->end);
    std::size_t end = unit.matched ? unit.end : num->end;
    if (end < n && is_ascii_alpha(s[end])) {
      // glued to letters: an identifier such as "5G" or "3rd"
      i = end;
      while (i < n && is_ascii_alnum(s[i])) ++i;
      continue;
    }
    NumericMention m;
    m.span = Span{i, end};
    if (!prefix && !unit.matched && num->plain_integer && num->digits == 4 && num->value >= 1900 &&
        num->value <= 2100) {
      m.kind = MentionKind::Date;
      m.date = DateValue{static_cast<int>(num->value), 0, 0, utf8(s, i, end)};
    } else {
      m.kind = MentionKind::Quantity;
      QuantityValue& q = m.quantity;
      q.number = num->value;
      q.scale = unit.matched ? unit.scale : 1.0;
      q.base_unit = unit.matched ? unit.base : "";
      std::string written;
      if (prefix) {
        written = text::encode(prefix->text);
        q.base_unit = std::string(prefix->base);
      }
      if (unit.matched) {
        if (!written.empty()) written += " ";
        written += unit.text;
      }
      q.unit = written;
      q.literal = utf8(s, i, end);
    }
    out.push_back(std::move(m));
    i = end;
  }
}

constexpr std::array<std::string_view, 18> kSpeechVerbs = {
    "said",   "says",    "say",     "stated",   "told",     "noted",   "added",  "warned",  "argued",
    "explained", "remarked", "asked", "insisted", "wrote", "claimed", "admitted", "conceded", "declared"};

constexpr std::array<std::u32string_view, 9> kCjkSpeechVerbs = {U"表示", U"指出", U"强调", U"透露", U"坦言",
                                                                U"直言", U"认为", U"称", U"说"};

struct VerbHit {
  std::size_t start = 0;
  std::size_t end = 0;
  std::string verb;
};

std::vector<VerbHit> verbs_in(std::u32string_view s, std::size_t b, std::size_t e) {
  std::vector<VerbHit> hits;
  for (std::size_t i = b; i < e; ++i) {
    if (is_ascii_alpha(s[i]) && (i == 0 || !is_ascii_alpha(s[i - 1]))) {
      for (auto v : kSpeechVerbs) {
        if (i + v.size() <= e && match_word_ci(s, i, v)) {
          hits.push_back({i, i + v.size(), std::string(v)});
          break;
        }
      }
    } else if (text::is_cjk_ideograph(s[i])) {
      for (auto v : kCjkSpeechVerbs) {
        if (i + v.size() <= e && match_at(s, i, v)) {
          hits.push_back({i, i + v.size(), text::encode(v)});
          i += v.size() - 1;
          break;
        }
      }
    }
  }
  return hits;
}

bool is_boundary_char(char32_t c) {
  return c == '.' || c == '!' || c == '?' || c == U'。' || c == U'！' || c == U'？' || c == U'；' || c == '\n' ||
         c == '"' || c == U'”' || c == U'」' || c == U'』';
}

bool is_soft_punct(char32_t c) {
  return c == ',' || c == ':' || c == U'，' || c == U'：' || c == U'、' || text::is_space(c) || c == '-' ||
         c == U'—';
}

std::string strip_punct(std::u32string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_soft_punct(s[b])) ++b;
  while (e > b && is_soft_punct(s[e - 1])) --e;
  return text::encode(s.substr(b, e - b));
}

// Speaker phrase ending right before `verb_start`: up to four Latin words or
// up to twelve CJK characters, stopping at punctuation.
std::string speaker_before(std::u32string_view s, std::size_t floor, std::size_t verb_start) {
  std::size_t e = verb_start;
  while (e > floor && text::is_space(s[e - 1])) --e;
  std::size_t b = e;
  if (b > floor && text::is_cjk_ideograph(s[b - 1])) {
    while (b > floor && text::is_cjk_ideograph(s[b - 1]) && e - b < 12) --b;
  } else {
    int words = 0;
    while (b > floor && words < 4) {
      std::size_t w = b;
      while (w > floor && text::is_space(s[w - 1])) --w;
      std::size_t ws = w;
      while (ws > floor && !text::is_space(s[ws - 1]) && !is_soft_punct(s[ws - 1]) && !is_boundary_char(s[ws - 1])) {
        --ws;
      }
      if (ws == w) break;
      b = ws;
      ++words;
      if (ws > floor && is_soft_punct(s[ws - 1]) && !text::is_space(s[ws - 1])) break;
    }
  }
  return strip_punct(s.substr(b, e - b));
}

std::optional<std::pair<std::string, std::string>> attribution(std::u32string_view s, std::size_t open,
                                                               std::size_t close_end) {
  // before the quote: "... the CEO said: "
  std::size_t floor = open;
  while (floor > 0 && open - floor < 80 && !is_boundary_char(s[floor - 1])) --floor;
  auto before = verbs_in(s, floor, open);
  if (!before.empty()) {
    const auto& v = before.back();
    const auto gap = strip_punct(s.substr(v.end, open - v.end));
    if (text::char_count(gap) <= 16) {
      auto speaker = speaker_before(s, floor, v.start);
      if (!speaker.empty()) return std::pair{speaker, v.verb};
    }
  }
  // after the quote: "", the CEO said. / ", said Li.
  std::size_t ceil = close_end;
  while (ceil < s.size() && ceil - close_end < 60 && !is_boundary_char(s[ceil])) ++ceil;
  auto after = verbs_in(s, close_end, ceil);
  if (!after.empty()) {
    const auto& v = after.front();
    auto speaker = strip_punct(s.substr(close_end, v.start - close_end));
    if (speaker.empty()) speaker = strip_punct(s.substr(v.end, ceil - v.end));
    if (!speaker.empty() && text::char_count(speaker) <= 40) return std::pair{speaker, v.verb};
  }
  return std::nullopt;
}

}  // namespace

std::vector<NumericMention> scan_numeric_mentions(std::u32string_view text) {
  std::vector<NumericMention> out;
  scan_into(text, out);
  return out;
}

std::vector<NumericMention> scan_numeric_mentions(std::string_view utf8) {
  return scan_numeric_mentions(text::decode(utf8));
}

std::vector<QuoteMention> scan_quotes(std::u32string_view s) {
  std::vector<QuoteMention> out;
  std::size_t i = 0;
  while (i < s.size()) {
    char32_t close = 0;
    switch (s[i]) {
      case '"': close = '"'; break;
      case U'“': close = U'”'; break;
      case U'「': close = U'」'; break;
      case U'『': close = U'』'; break;
      default: break;
    }
    if (close == 0) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < s.size() && s[j] != close && j - i < 400) {
      if (s[j] == '\n' && j + 1 < s.size() && s[j + 1] == '\n') break;
      ++j;
    }
    if (j >= s.size() || s[j] != close) {
      ++i;
      continue;
    }
    if (j > i + 1) {
      if (auto who = attribution(s, i, j + 1)) {
        QuoteMention q;
        q.speaker = who->first;
        q.verb = who->second;
        q.content = text::encode(s.substr(i + 1, j - i - 1));
        q.span = Span{i + 1, j};
        out.push_back(std::move(q));
      }
    }
    i = j + 1;
  }
  return out;
}

namespace {

constexpr std::array<std::string_view, 14> kCorporateSuffixes = {
    "Corp", "Corporation", "Inc", "Group", "Ltd", "Co", "Holdings", "Technologies", "Motors", "Bank",
    "Industries", "Capital", "Partners", "Systems"};

constexpr std::array<std::string_view, 10> kLeadingStop = {"The", "A", "An", "On", "In", "At", "By", "For",
                                                           "And", "From"};

constexpr std::array<std::u32string_view, 4> kCjkOrgSuffixes = {U"公司", U"集团", U"银行", U"科技"};

bool is_cjk_function_char(char32_t c) {
  static constexpr std::u32string_view kChars = U"的在据与和对向从被是了称将由于及或把为";
  return kChars.find(c) != std::u32string_view::npos;
}

struct Word {
  std::size_t start;
  std::size_t end;
  std::string text;
};

}  // namespace

std::vector<EntityMention> scan_entities(std::u32string_view s) {
  std::vector<EntityMention> out;
  std::vector<Word> words;
  for (std::size_t i = 0; i < s.size();) {
    if (is_ascii_alpha(s[i]) && (i == 0 || !is_ascii_alnum(s[i - 1]))) {
      std::size_t j = i;
      while (j < s.size() && (is_ascii_alnum(s[j]) || s[j] == '&' || s[j] == '-')) ++j;
      words.push_back({i, j, utf8(s, i, j)});
      i = j;
    } else {
      ++i;
    }
  }
  auto capitalized = [](const Word& w) { return w.text[0] >= 'A' && w.text[0] <= 'Z'; };
  for (std::size_t k = 1; k < words.size(); ++k) {
    if (std::find(kCorporateSuffixes.begin(), kCorporateSuffixes.end(), words[k].text) == kCorporateSuffixes.end()) {
      continue;
    }
    std::size_t first = k;
    while (first > 0 && k - first < 4) {
      const auto& prev = words[first - 1];
      const auto& cur = words[first];
      if (!capitalized(prev) || cur.start != prev.end + 1 || s[prev.end] != ' ') break;
      --first;
    }
    while (first < k &&
           std::find(kLeadingStop.begin(), kLeadingStop.end(), words[first].text) != kLeadingStop.end()) {
      ++first;
    }
    if (first == k) continue;
    out.push_back({utf8(s, words[first].start, words[k].end), Span{words[first].start, words[k].end}});
  }
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    for (auto suf : kCjkOrgSuffixes) {
      if (!match_at(s, i, suf)) continue;
      std::size_t b = i;
      while (b > 0 && text::is_cjk_ideograph(s[b - 1]) && !is_cjk_function_char(s[b - 1]) && i - b < 8) --b;
      if (i - b >= 2) out.push_back({utf8(s, b, i + suf.size()), Span{b, i + suf.size()}});
    }
  }
  std::sort(out.begin(), out.end(), [](const EntityMention& a, const EntityMention& b) {
    return a.span.start < b.span.start;
  });
  return out;
}

}  // namespace deepnews
