#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "deepnews/corpus.hpp"
#include "deepnews/planner.hpp"
#include "deepnews/sentences.hpp"

namespace deepnews {

/// Term list loaded from a UTF-8 file: one term per line, '#' starts a comment.
/// Latin terms match case-insensitively at a word start (so "hedge" also
/// matches "hedged"); CJK terms match as substrings.
class Lexicon {
 public:
  Lexicon() = default;
  explicit Lexicon(std::vector<std::string> terms);

  static Lexicon parse(std::string_view content);
  static Lexicon load(const std::filesystem::path& path);

  const std::vector<std::string>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  /// Total number of term occurrences.
  std::size_t count_in(std::string_view text) const;
  bool any_in(std::string_view text) const { return count_in(text) > 0; }
  /// True when `sentence` starts with one of the terms.
  bool starts(std::string_view sentence) const;

 private:
  std::vector<std::string> terms_;
};

struct TokenUsage {
  long long prompt_tokens = 0;
  long long completion_tokens = 0;

  long long total() const { return prompt_tokens + completion_tokens; }
  TokenUsage& operator+=(const TokenUsage& o) {
    prompt_tokens += o.prompt_tokens;
    completion_tokens += o.completion_tokens;
    return *this;
  }
  bool operator==(const TokenUsage&) const = default;
};

double burstiness(const std::vector<double>& token_lengths);
double burstiness(std::string_view text);

/// Natural-log Shannon entropy over the four block types; Domain error when empty.
double structural_entropy(const std::vector<BlockType>& paragraph_types);

inline constexpr double kDefaultMarkersPerSentence = 1.0;
double subjectivity_score(std::string_view text, const Lexicon& opinion_lexicon,
                          double markers_per_sentence = kDefaultMarkersPerSentence);

struct Claim {
  std::string text;  // literal as written
  NumericMention mention;
  std::optional<std::string> grounding;  // fact id; empty means UNGROUNDED
};

struct HFRReport {
  std::vector<Claim> claims;
  std::size_t ungrounded_count = 0;
  bool hallucination_free = true;
};

inline constexpr double kDefaultGroundingTolerance = 0.005;
inline constexpr std::string_view kUngrounded = "UNGROUNDED";

/// Grounds one mention against Quantity/Date facts; returns the best fact id.
std::optional<std::string> ground_mention(const NumericMention& m, const std::vector<AtomicFact>& facts,
                                          double tolerance = kDefaultGroundingTolerance);

HFRReport hallucination_check(std::string_view text, const std::vector<AtomicFact>& facts,
                              double tolerance = kDefaultGroundingTolerance);

double hfr_rate(const std::vector<HFRReport>& reports);

/// Effective cost per acceptance; `infinite` when nothing was accepted.
struct Ecpa {
  bool infinite = false;
  double value = 0.0;

  std::string render() const;  // "infinite" or the value
};

Ecpa ecpa(double cost_per_run, double acceptance_rate);

struct MetricsReport {
  double burstiness = 0.0;
  double structural_entropy = 0.0;
  double subjectivity = 0.0;
  HFRReport hfr;
  double icr = 0.0;
  Zone zone = Zone::Noise;
  double cost = 0.0;
  TokenUsage token_usage;
};

struct MetricsConfig {
  double grounding_tolerance = kDefaultGroundingTolerance;
  double markers_per_sentence = kDefaultMarkersPerSentence;
  Lexicon opinion_lexicon;
};

struct AblationSample {
  std::string condition;
  MetricsReport report;
};

struct AblationRow {
  std::string condition;
  std::size_t samples = 0;
  double structural_entropy = 0.0;
  double burstiness = 0.0;
  double subjectivity = 0.0;
};

struct AblationTable {
  std::vector<AblationRow> rows;

  std::string to_text() const;
  nlohmann::ordered_json to_json() const;
};

/// Conditions appear in the order Human Expert, Ours (Full Model), w/o Schema,
/// w/o Tactics, then any other label in first-seen order.
AblationTable ablation_report(const std::vector<AblationSample>& samples);

nlohmann::ordered_json to_json(const HFRReport& r);
nlohmann::ordered_json to_json(const MetricsReport& r);
MetricsReport metrics_from_json(const nlohmann::json& j);

}  // namespace deepnews
