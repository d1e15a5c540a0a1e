#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "deepnews/metrics.hpp"
#include "deepnews/planner.hpp"

namespace deepnews {

enum class Tactic { RhythmBreak, LogicFog, LexicalHedge };
inline constexpr Tactic kAllTactics[] = {Tactic::RhythmBreak, Tactic::LogicFog, Tactic::LexicalHedge};

std::string_view to_string(Tactic t);
std::optional<Tactic> parse_tactic(std::string_view s);

struct ConstraintConfig {
  std::size_t theta_high = 40;
  std::size_t theta_low = 5;
  double lambda_rhythm = 0.8;
  std::size_t flatline_run = 6;
  double flatline_band = 0.2;
  Lexicon forbidden_connectors;
  Lexicon formal_lexicon;
  Lexicon colloquial_lexicon;
  double max_connector_density = 0.1;
  double lambda1 = 10.0;
  double lambda2 = 50.0;
  std::size_t max_regenerations = 3;
  double grounding_tolerance = kDefaultGroundingTolerance;
  std::vector<Tactic> tactics = {Tactic::RhythmBreak, Tactic::LogicFog, Tactic::LexicalHedge};

  bool enabled(Tactic t) const;
  /// Config error unless theta_low < theta_high, lambda_rhythm in (0, 1],
  /// weights >= 0 and every enabled tactic has its word lists.
  void validate() const;
};

struct Violation {
  std::string tactic;    // "RhythmBreak", "LogicFog", "LexicalHedge"
  std::size_t location;  // sentence index (0 for whole-text violations)
  std::string detail;

  bool operator==(const Violation&) const = default;
};

/// Rule 1: sentence t (t >= 1) violates when len[t-1] > theta_high and
/// len[t] >= theta_low. Rule 2: with ema[0] = len[0] and
/// ema[t] = lambda*ema[t-1] + (1-lambda)*len[t], sentence t is "flat" when
/// |len[t] - ema[t-1]| <= band*ema[t-1] (sentence 0 is always flat); every
/// maximal run of >= flatline_run flat sentences yields one violation at the
/// run's first index.
std::vector<Violation> validate_rhythm_lengths(const std::vector<std::size_t>& lengths, const ConstraintConfig& config);
std::vector<Violation> validate_rhythm(std::string_view text, const ConstraintConfig& config);

/// Connector-initial sentences beyond floor(density * n) are violations; the
/// earliest ones are the allowed ones.
std::vector<Violation> validate_logic_fog(std::string_view text, const ConstraintConfig& config);

std::vector<Violation> validate_lexical_hedge(std::string_view text, const ConstraintConfig& config);

/// Runs the validators of every enabled tactic, in tactic order.
std::vector<Violation> validate_all(std::string_view text, const ConstraintConfig& config);

struct CandidateScore {
  double nll = 0.0;
  std::size_t hallucination_penalty = 0;
  double burstiness = 0.0;
  double total = 0.0;

  static CandidateScore make(double nll, std::size_t h, double b, double lambda1, double lambda2);
};

/// Mean per-character surprisal (nats) of `text` under a Laplace-smoothed
/// unigram model fitted on the window's rendered facts and block gists. Used
/// as the nll term when the backend reports no logprobs.
double unigram_nll(std::string_view text, const ContextWindow& window);

CandidateScore score_candidate(std::string_view text, const ContextWindow& window,
                               std::optional<double> backend_logprob, const ConstraintConfig& config);

nlohmann::ordered_json to_json(const Violation& v);
nlohmann::ordered_json to_json(const CandidateScore& s);

}  // namespace deepnews
