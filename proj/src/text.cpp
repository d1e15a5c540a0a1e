#include "deepnews/text.hpp"

#include <algorithm>
#include <array>
#include <charconv>

#include "deepnews/error.hpp"

namespace deepnews {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::Conflict: return "conflict";
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::Validation: return "validation error";
    case ErrorKind::NotFound: return "not found";
    case ErrorKind::Cycle: return "cycle";
    case ErrorKind::Template: return "template error";
    case ErrorKind::Planning: return "planning error";
    case ErrorKind::Config: return "config error";
    case ErrorKind::Scoping: return "scoping error";
    case ErrorKind::Decomposition: return "decomposition error";
    case ErrorKind::Transport: return "transport error";
    case ErrorKind::Generation: return "generation error";
    case ErrorKind::Assembly: return "assembly error";
    case ErrorKind::Io: return "io error";
  }
  return "error";
}

std::string_view name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse: return "Parse";
    case ErrorKind::Conflict: return "Conflict";
    case ErrorKind::Domain: return "Domain";
    case ErrorKind::Validation: return "Validation";
    case ErrorKind::NotFound: return "NotFound";
    case ErrorKind::Cycle: return "Cycle";
    case ErrorKind::Template: return "Template";
    case ErrorKind::Planning: return "Planning";
    case ErrorKind::Config: return "Config";
    case ErrorKind::Scoping: return "Scoping";
    case ErrorKind::Decomposition: return "Decomposition";
    case ErrorKind::Transport: return "Transport";
    case ErrorKind::Generation: return "Generation";
    case ErrorKind::Assembly: return "Assembly";
    case ErrorKind::Io: return "Io";
  }
  return "Error";
}

}  // namespace deepnews

namespace deepnews::text {

std::u32string decode(std::string_view utf8) {
  std::u32string out;
  out.reserve(utf8.size());
  std::size_t i = 0;
  const auto n = utf8.size();
  while (i < n) {
    const auto b0 = static_cast<unsigned char>(utf8[i]);
    char32_t cp = 0xFFFD;
    std::size_t len = 1;
    if (b0 < 0x80) {
      cp = b0;
    } else if ((b0 >> 5) == 0x6) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 >> 4) == 0xE) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 >> 3) == 0x1E) {
      len = 4;
      cp = b0 & 0x07;
    } else {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    if (i + len > n) {
      out.push_back(0xFFFD);
      break;
    }
    bool ok = true;
    for (std::size_t k = 1; k < len; ++k) {
      const auto b = static_cast<unsigned char>(utf8[i + k]);
      if ((b >> 6) != 0x2) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (b & 0x3F);
    }
    if (!ok) {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::string encode(char32_t cp) {
  std::string out;
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
  return out;
}

std::string encode(std::u32string_view code_points) {
  std::string out;
  out.reserve(code_points.size());
  for (char32_t cp : code_points) out += encode(cp);
  return out;
}

std::size_t char_count(std::string_view utf8) {
  std::size_t count = 0;
  for (char c : utf8) {
    if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++count;
  }
  return count;
}

std::string slice(std::string_view utf8, std::size_t begin, std::size_t end) {
  const auto cps = decode(utf8);
  begin = std::min(begin, cps.size());
  end = std::clamp(end, begin, cps.size());
  return encode(std::u32string_view(cps).substr(begin, end - begin));
}

bool is_cjk_ideograph(char32_t cp) {
  return (cp >= 0x4E00 && cp <= 0x9FFF) || (cp >= 0x3400 && cp <= 0x4DBF) ||
         (cp >= 0x20000 && cp <= 0x2A6DF) || (cp >= 0xF900 && cp <= 0xFAFF) ||
         (cp >= 0x3040 && cp <= 0x30FF) || (cp >= 0xAC00 && cp <= 0xD7AF);
}

bool is_cjk_punct(char32_t cp) {
  if (cp >= 0x3000 && cp <= 0x303F) return true;
  if (cp >= 0xFF01 && cp <= 0xFF0F) return true;
  if (cp >= 0xFF1A && cp <= 0xFF20) return true;
  if (cp >= 0xFF3B && cp <= 0xFF40) return true;
  if (cp >= 0xFF5B && cp <= 0xFF65) return true;
  if (cp >= 0x2018 && cp <= 0x201F) return true;  // curly quotes
  return cp == 0x2014 || cp == 0x2026 || cp == 0x00B7;
}

bool is_space(char32_t cp) {
  return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\f' || cp == '\v' ||
         cp == 0x00A0 || cp == 0x3000 || (cp >= 0x2000 && cp <= 0x200B);
}

bool is_ascii_digit(char32_t cp) { return cp >= '0' && cp <= '9'; }
bool is_ascii_alpha(char32_t cp) { return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z'); }
bool is_ascii_alnum(char32_t cp) { return is_ascii_digit(cp) || is_ascii_alpha(cp); }

std::size_t token_length(std::u32string_view s) {
  std::size_t tokens = 0;
  bool in_run = false;
  for (char32_t cp : s) {
    if (is_space(cp) || is_cjk_punct(cp)) {
      in_run = false;
    } else if (is_cjk_ideograph(cp)) {
      ++tokens;
      in_run = false;
    } else if (!in_run) {
      ++tokens;
      in_run = true;
    }
  }
  return tokens;
}

std::size_t token_length(std::string_view utf8) { return token_length(decode(utf8)); }

std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

namespace {

constexpr std::array<std::string_view, 64> kStopwords = {
    "a",     "an",    "and",   "are",   "as",    "at",    "be",    "by",    "but",   "for",
    "from",  "has",   "have",  "he",    "her",   "his",   "if",    "in",    "into",  "is",
    "it",    "its",   "of",    "on",    "or",    "our",   "she",   "so",    "than",  "that",
    "the",   "their", "them",  "then",  "there", "these", "they",  "this",  "those", "to",
    "was",   "we",    "were",  "what",  "when",  "where", "which", "while", "who",   "will",
    "with",  "would", "you",   "your",  "not",   "no",    "can",   "do",    "does",  "did",
    "been",  "being", "also",  "vs"};

bool is_stopword(std::string_view w) {
  return std::find(kStopwords.begin(), kStopwords.end(), w) != kStopwords.end();
}

}  // namespace

std::set<std::string> keyword_tokens(std::string_view utf8) {
  std::set<std::string> out;
  const auto cps = decode(utf8);
  std::string word;
  auto flush = [&] {
    if (word.size() >= 2 && !is_stopword(word)) out.insert(word);
    word.clear();
  };
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const char32_t cp = cps[i];
    if (is_ascii_alnum(cp)) {
      word.push_back(static_cast<char>(cp >= 'A' && cp <= 'Z' ? cp - 'A' + 'a' : cp));
      continue;
    }
    flush();
    if (is_cjk_ideograph(cp) && i + 1 < cps.size() && is_cjk_ideograph(cps[i + 1])) {
      out.insert(encode(std::u32string_view(cps).substr(i, 2)));
    }
  }
  flush();
  return out;
}

std::size_t overlap(const std::set<std::string>& a, const std::set<std::string>& b) {
  const auto& small = a.size() <= b.size() ? a : b;
  const auto& large = a.size() <= b.size() ? b : a;
  std::size_t n = 0;
  for (const auto& t : small) n += large.count(t);
  return n;
}

std::string trim(std::string_view s) {
  const auto cps = decode(s);
  std::size_t b = 0;
  std::size_t e = cps.size();
  while (b < e && is_space(cps[b])) ++b;
  while (e > b && is_space(cps[e - 1])) --e;
  return encode(std::u32string_view(cps).substr(b, e - b));
}

std::string humanize_identifier(std::string_view id) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : id) {
    if (c == '_') {
      if (!cur.empty()) parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) parts.push_back(cur);
  std::size_t first = 0;
  if (parts.size() > 2 && parts[0] == "Step" &&
      std::all_of(parts[1].begin(), parts[1].end(), [](char c) { return c >= '0' && c <= '9'; })) {
    first = 2;
  }
  std::string out;
  for (std::size_t i = first; i < parts.size(); ++i) {
    if (!out.empty()) out.push_back(' ');
    out += parts[i];
  }
  return out;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  // splitmix64 finalizer over the combined value
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_fixed(double v, int decimals) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, decimals);
  return std::string(buf, res.ptr);
}

}  // namespace deepnews::text
