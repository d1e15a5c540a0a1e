#include <algorithm>
#include <chrono>
#include <random>
#include <sstream>
#include <thread>

#include "deepnews/backend.hpp"
#include "deepnews/error.hpp"
#include "deepnews/sentences.hpp"
#include "deepnews/text.hpp"

namespace deepnews {

std::string_view to_string(MockMode m) {
  switch (m) {
    case MockMode::Conforming: return "conforming";
    case MockMode::Monotone: return "monotone";
    case MockMode::RecoverOnFeedback: return "recover_on_feedback";
  }
  return "conforming";
}

std::optional<MockMode> parse_mock_mode(std::string_view s) {
  for (auto m : {MockMode::Conforming, MockMode::Monotone, MockMode::RecoverOnFeedback}) {
    if (to_string(m) == s) return m;
  }
  return std::nullopt;
}

MockBackend::MockBackend(MockConfig config) : config_(std::move(config)) {}

namespace {

struct PromptFact {
  std::string id;
  std::string kind;
  std::string subject;
  std::string predicate;
  std::string literal;
};

struct ParsedPrompt {
  std::string section;
  std::size_t block_index = 1;
  std::size_t target_chars = 200;
  std::vector<PromptFact> facts;
  std::vector<std::string> gists;
  std::vector<std::string> connectors;
  bool rhythm = false;
  std::size_t theta_high = 40;
  std::size_t theta_low = 5;
  std::vector<std::string> formal;
  std::vector<std::string> colloquial;
  bool feedback = false;
};

std::string between(std::string_view line, std::string_view open, std::string_view close) {
  const auto a = line.find(open);
  if (a == std::string_view::npos) return {};
  const auto b = line.find(close, a + open.size());
  if (b == std::string_view::npos) return {};
  return std::string(line.substr(a + open.size(), b - a - open.size()));
}

std::size_t number_after(std::string_view line, std::string_view marker, std::size_t fallback) {
  const auto a = line.find(marker);
  if (a == std::string_view::npos) return fallback;
  std::size_t v = 0;
  bool any = false;
  for (auto i = a + marker.size(); i < line.size() && std::isdigit(static_cast<unsigned char>(line[i])); ++i) {
    v = v * 10 + static_cast<std::size_t>(line[i] - '0');
    any = true;
  }
  return any ? v : fallback;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    auto t = text::trim(item);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

ParsedPrompt parse_prompt(const std::string& prompt) {
  ParsedPrompt p;
  std::istringstream in(prompt);
  std::string line;
  bool in_facts = false;
  bool in_background = false;
  while (std::getline(in, line)) {
    if (in_background) {
      // referenced blocks come first; the first fact line ends them
      const auto close = line.find("] ");
      if (line.rfind("- [", 0) == 0 && close != std::string::npos && line.compare(close + 2, 1, "(") != 0) {
        p.gists.push_back(line.substr(close + 2));
        continue;
      }
      in_background = false;
    }
    if (line.rfind("Background material", 0) == 0) in_background = true;
    if (line.rfind("- Suppress explicit connectors: ", 0) == 0) {
      auto list = line.substr(std::string_view("- Suppress explicit connectors: ").size());
      if (!list.empty() && list.back() == '.') list.pop_back();
      p.connectors = split_list(list);
    }
    if (in_facts) {
      if (line.rfind("- [", 0) == 0) {
        PromptFact f;
        const auto close = line.find("] ");
        f.id = line.substr(3, close - 3);
        auto rest = line.substr(close + 2);
        if (rest.rfind("(", 0) == 0 && rest.find(") ") != std::string::npos) {
          f.kind = rest.substr(1, rest.find(") ") - 1);
          rest = rest.substr(rest.find(") ") + 2);
        }
        const auto first = rest.find(" | ");
        const auto last = rest.rfind(" | ");
        if (first == std::string::npos) continue;
        f.subject = rest.substr(0, first);
        f.literal = rest.substr(last + 3);
        if (last > first) f.predicate = rest.substr(first + 3, last - first - 3);
        p.facts.push_back(std::move(f));
        continue;
      }
      in_facts = false;
    }
    if (line.find("analyze the following Atomic Facts:") != std::string::npos) in_facts = true;
    if (line.rfind("Generate the section ", 0) == 0) p.section = between(line, "Generate the section ", " focusing on ");
    if (line.rfind("Block ", 0) == 0) p.block_index = number_after(line, "Block ", 1);
    if (line.find("characters.") != std::string::npos) p.target_chars = number_after(line, "About ", p.target_chars);
    if (line.find("After any sentence longer than") != std::string::npos) {
      p.rhythm = true;
      p.theta_high = number_after(line, "longer than ", p.theta_high);
      p.theta_low = number_after(line, "shorter than ", p.theta_low);
    }
    if (line.rfind("- Pair formal terminology (", 0) == 0) {
      p.formal = split_list(between(line, "terminology (", ")"));
      p.colloquial = split_list(between(line, "slang (", ")"));
    }
    if (line.find("The previous attempt broke these constraints") != std::string::npos) p.feedback = true;
  }
  return p;
}

constexpr std::string_view kNouns[] = {"ledger",  "contract", "margin",  "order",    "shipment", "rebate",
                                       "invoice", "warehouse", "factory", "dealer",  "channel",  "pipeline",
                                       "quota",   "supplier",  "buyer",   "forecast", "backlog", "tender"};
constexpr std::string_view kVerbs[] = {"tightened", "slipped", "stalled",  "shifted", "hardened",
                                       "loosened",  "drifted", "squeezed", "lingered", "cracked"};
constexpr std::string_view kAdverbs[] = {"quietly", "again", "late", "early", "sideways", "abruptly", "slowly"};
constexpr std::string_view kShort[] = {"Nobody blinked.", "Silence followed.", "Then nothing.",
                                       "Buyers waited.", "The ledger noticed.", "Margins broke."};
constexpr std::string_view kEntityLines[] = {"{} sits at the centre of the dispute.",
                                             "Every thread leads back to {}.",
                                             "{} holds the other end of the rope."};

class Writer {
 public:
  explicit Writer(std::uint64_t seed) : rng_(seed) {}

  std::size_t pick(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }

  template <std::size_t N>
  std::string_view pick(const std::string_view (&arr)[N]) {
    return arr[pick(N)];
  }

  // `tokens` words of filler, no digits, never opening with a connector
  std::vector<std::string> filler_words(std::size_t tokens) {
    std::vector<std::string> words;
    while (words.size() < tokens) {
      words.emplace_back(words.empty() ? "the" : (pick(3) == 0 ? "and the" : "the"));
      if (words.back() == "and the") {
        words.back() = "and";
        words.emplace_back("the");
      }
      words.emplace_back(pick(kNouns));
      words.emplace_back(pick(kVerbs));
      words.emplace_back(pick(kAdverbs));
    }
    words.resize(tokens);
    if (words.back() == "the" || words.back() == "and") words.back() = std::string(pick(kAdverbs));
    return words;
  }

  std::string filler_sentence(std::size_t tokens) {
    if (tokens < 5) return std::string(pick(kShort));
    auto words = filler_words(tokens);
    std::string s;
    for (const auto& w : words) s += (s.empty() ? "" : " ") + w;
    s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    return s + ".";
  }

  // pads a sentence body (no terminator) up to `tokens` tokens
  std::string pad(std::string body, std::size_t tokens) {
    const auto have = text::token_length(body);
    if (have + 2 < tokens) {
      body += ", while";
      for (const auto& w : filler_words(tokens - have - 1)) body += " " + w;
    }
    return body + ".";
  }

 private:
  std::mt19937_64 rng_;
};

bool has_digit(std::string_view s) {
  for (auto c : text::decode(s)) {
    if (text::is_ascii_digit(c) || (c >= U'０' && c <= U'９')) return true;
  }
  return false;
}

std::optional<std::string> fact_body(const PromptFact& f, Writer& w) {
  if (f.kind == "entity") {
    auto line = std::string(w.pick(kEntityLines));
    line.replace(line.find("{}"), 2, f.literal);
    line.pop_back();  // pad() adds the terminator back
    return line;
  }
  if (f.kind == "quote") {
    // quoted figures may be absent from this window, so such quotes are skipped
    if (has_digit(f.literal)) return std::nullopt;
    return f.subject + " " + f.predicate + ", \"" + f.literal + "\"";
  }
  std::string s = f.subject;
  if (!f.predicate.empty()) s += " " + f.predicate;
  return s + " " + f.literal;
}

bool mentions_any(const std::string& sentence, const std::vector<std::string>& terms) {
  std::string lower = " ";
  for (char c : sentence) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  for (char& c : lower) {
    if (c == ',' || c == '.' || c == ';' || c == ':') c = ' ';
  }
  lower += " ";
  for (const auto& t : terms) {
    if (lower.find(" " + t + " ") != std::string::npos) return true;
  }
  return false;
}

// digit-free sentences from referenced blocks; figures there may be outside the window
std::vector<std::string> gist_sentences(const ParsedPrompt& p) {
  std::vector<std::string> out;
  for (const auto& g : p.gists) {
    for (const auto& s : segment_sentences(g).sentences) {
      auto t = text::trim(s.text);
      if (t.empty() || has_digit(t) || mentions_any(t, p.connectors)) continue;
      if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
    }
  }
  return out;
}

}  // namespace

Completion MockBackend::complete(const std::string& prompt, const DecodeParams& params, std::uint64_t seed) {
  (void)params;
  ++calls_;
  const auto started = std::chrono::steady_clock::now();
  const auto p = parse_prompt(prompt);
  if (config_.delay_ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(config_.delay_ms));
  if (config_.fail_sections.count(p.section)) {
    fail(ErrorKind::Transport, "mock backend refuses section \"" + p.section + "\"");
  }

  Writer w(text::fnv1a64(prompt) ^ seed);
  const bool monotone = config_.mode == MockMode::Monotone || (config_.mode == MockMode::RecoverOnFeedback && !p.feedback);

  // sentence-length schedule in tokens
  static constexpr std::size_t kVaried[] = {16, 4, 24, 9, 3, 31, 12, 6, 19, 2};
  static constexpr std::size_t kSmooth[] = {18, 19, 18, 17, 18, 19, 17, 18};
  std::size_t slot = w.pick(10);
  auto next_length = [&]() -> std::size_t {
    if (monotone) return config_.monotone_tokens;
    if (p.rhythm) return kVaried[slot++ % 10];
    return kSmooth[slot++ % 8];
  };

  std::vector<std::string> sentences;
  std::vector<std::string> seen;
  for (std::size_t i = 0; i < p.facts.size(); ++i) {
    const auto body = fact_body(p.facts[i], w);
    if (!body || std::find(seen.begin(), seen.end(), *body) != seen.end()) continue;
    seen.push_back(*body);
    sentences.push_back(w.pad(*body, next_length()));
    if (i == 0 && p.block_index == 1 && config_.inject_ungrounded.count(p.section)) {
      sentences.push_back("Orders at the margin swung " + std::to_string(900 + w.pick(99)) + ".37%.");
    }
    if (!monotone) {
      if (i % 2 == 1) sentences.push_back(w.filler_sentence(next_length()));
    }
  }
  if (p.facts.empty() && p.block_index == 1 && config_.inject_ungrounded.count(p.section)) {
    sentences.push_back("Orders at the margin swung " + std::to_string(900 + w.pick(99)) + ".37%.");
  }
  if (!monotone) {
    const auto gists = gist_sentences(p);
    const std::size_t take = p.facts.empty() ? 5 : 1;
    const std::size_t start = gists.empty() ? 0 : w.pick(gists.size());
    for (std::size_t i = 0; i < gists.size() && i < take; ++i) sentences.push_back(gists[(start + i) % gists.size()]);
  }
  if (!monotone && !p.formal.empty() && !p.colloquial.empty()) {
    const auto& formal = p.formal[w.pick(p.formal.size())];
    const auto& slang = p.colloquial[w.pick(p.colloquial.size())];
    const auto pos = sentences.empty() ? 0 : 1 + w.pick(sentences.size());
    sentences.insert(sentences.begin() + static_cast<std::ptrdiff_t>(std::min(pos, sentences.size())),
                     "Desks spoke of " + formal + " while the " + slang + " paid for it.");
  }
  const std::size_t min_sentences = monotone ? 7 : 4;
  std::size_t chars = 0;
  for (const auto& s : sentences) chars += text::char_count(s) + 1;
  while ((sentences.size() < min_sentences || chars < p.target_chars) && sentences.size() < 30) {
    sentences.push_back(w.filler_sentence(next_length()));
    chars += text::char_count(sentences.back()) + 1;
  }

  // a sentence above theta_high must be followed by a short one
  if (p.rhythm && !monotone) {
    for (std::size_t i = 0; i < sentences.size(); ++i) {
      if (text::token_length(sentences[i]) <= p.theta_high) continue;
      if (i + 1 < sentences.size() && text::token_length(sentences[i + 1]) < p.theta_low) continue;
      sentences.insert(sentences.begin() + static_cast<std::ptrdiff_t>(i) + 1, std::string(w.pick(kShort)));
    }
  }

  Completion c;
  for (const auto& s : sentences) c.text += (c.text.empty() ? "" : " ") + s;
  c.usage.prompt_tokens = static_cast<long long>(text::token_length(prompt));
  c.usage.completion_tokens = static_cast<long long>(text::token_length(c.text));
  if (config_.report_logprobs) c.total_logprob = -0.5 * static_cast<double>(c.usage.completion_tokens);
  c.latency_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  return c;
}

}  // namespace deepnews
