#include "deepnews/sentences.hpp"

#include <algorithm>
#include <array>

#include "deepnews/text.hpp"

namespace deepnews {

namespace {

constexpr std::array<std::string_view, 27> kAbbreviations = {
    "mr",  "mrs", "ms",  "dr",  "prof", "inc", "corp", "ltd", "co",  "jr",  "sr",  "st", "vs", "no",
    "jan", "feb", "mar", "apr", "jun",  "jul", "aug",  "sep", "sept", "oct", "nov", "dec", "approx"};

constexpr std::array<std::string_view, 6> kDottedAbbreviations = {"e.g", "i.e", "u.s", "u.k", "a.m", "p.m"};

bool is_cjk_terminator(char32_t c) { return c == U'。' || c == U'！' || c == U'？' || c == U'；'; }
bool is_latin_terminator(char32_t c) { return c == '.' || c == '!' || c == '?'; }
bool is_terminator(char32_t c) { return is_cjk_terminator(c) || is_latin_terminator(c); }

bool is_closer(char32_t c) {
  return c == '"' || c == '\'' || c == U'”' || c == U'’' || c == ')' || c == U'）' || c == U'」' ||
         c == U'』' || c == ']' || c == U'】' || c == U'》';
}

// Word immediately before the dot at `dot`, lowercased, including inner dots
// ("e.g" for "e.g.").
std::string word_before(std::u32string_view s, std::size_t dot) {
  std::size_t b = dot;
  while (b > 0 && (text::is_ascii_alpha(s[b - 1]) || s[b - 1] == '.')) --b;
  std::string w;
  for (std::size_t k = b; k < dot; ++k) w.push_back(static_cast<char>(s[k]));
  return text::to_lower_ascii(w);
}

bool dot_splits(std::u32string_view s, std::size_t i) {
  const std::size_t n = s.size();
  const bool has_next = i + 1 < n;
  const char32_t next = has_next ? s[i + 1] : U' ';
  if (i > 0 && text::is_ascii_digit(s[i - 1]) && has_next && text::is_ascii_digit(next)) return false;
  if (has_next && !(text::is_space(next) || is_closer(next) || is_terminator(next) ||
                    text::is_cjk_ideograph(next))) {
    return false;
  }
  const auto w = word_before(s, i);
  if (!w.empty()) {
    if (std::find(kAbbreviations.begin(), kAbbreviations.end(), w) != kAbbreviations.end()) return false;
    if (std::find(kDottedAbbreviations.begin(), kDottedAbbreviations.end(), w) !=
        kDottedAbbreviations.end()) {
      return false;
    }
  }
  return true;
}

// Position after a blank line starting at `i` (a '\n'), or npos.
std::size_t blank_line_end(std::u32string_view s, std::size_t i) {
  std::size_t j = i + 1;
  while (j < s.size() && s[j] != '\n' && text::is_space(s[j])) ++j;
  if (j < s.size() && s[j] == '\n') return j + 1;
  return std::u32string_view::npos;
}

}  // namespace

std::vector<double> SentenceList::token_lengths() const {
  std::vector<double> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) out.push_back(static_cast<double>(s.token_len));
  return out;
}

SentenceList segment_sentences(std::string_view utf8) { return segment_sentences(text::decode(utf8)); }

SentenceList segment_sentences(std::u32string_view s) {
  SentenceList out;
  const std::size_t n = s.size();
  std::size_t start = 0;

  auto emit = [&](std::size_t text_end, std::size_t raw_end) {
    auto body = s.substr(start, text_end - start);
    std::size_t b = 0;
    std::size_t e = body.size();
    while (b < e && text::is_space(body[b])) ++b;
    while (e > b && text::is_space(body[e - 1])) --e;
    if (b == e) {
      // whitespace only: fold into the previous sentence's raw span
      if (!out.sentences.empty()) out.sentences.back().end = raw_end;
      start = raw_end;
      return;
    }
    Sentence sent;
    const auto trimmed = body.substr(b, e - b);
    sent.text = text::encode(trimmed);
    sent.start = start;
    sent.end = raw_end;
    sent.char_len = trimmed.size();
    sent.token_len = text::token_length(trimmed);
    out.sentences.push_back(std::move(sent));
    start = raw_end;
  };

  std::size_t i = 0;
  while (i < n) {
    const char32_t c = s[i];
    if (c == '\n') {
      const auto after = blank_line_end(s, i);
      if (after != std::u32string_view::npos) {
        std::size_t raw_end = after;
        while (raw_end < n && text::is_space(s[raw_end])) ++raw_end;
        emit(i, raw_end);
        i = raw_end;
        continue;
      }
    }
    if (is_terminator(c) && (c != '.' || dot_splits(s, i))) {
      std::size_t j = i + 1;
      while (j < n && (is_terminator(s[j]) || is_closer(s[j]) || s[j] == U'…')) ++j;
      std::size_t raw_end = j;
      while (raw_end < n && text::is_space(s[raw_end])) ++raw_end;
      emit(j, raw_end);
      i = raw_end;
      continue;
    }
    ++i;
  }
  if (start < n) emit(n, n);
  // leading whitespace before the first sentence belongs to it
  if (!out.sentences.empty()) out.sentences.front().start = 0;
  return out;
}

}  // namespace deepnews
