#include "deepnews/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "deepnews/error.hpp"
#include "deepnews/sentences.hpp"
#include "deepnews/text.hpp"

namespace deepnews {

std::string_view to_string(Tactic t) {
  switch (t) {
    case Tactic::RhythmBreak: return "RhythmBreak";
    case Tactic::LogicFog: return "LogicFog";
    case Tactic::LexicalHedge: return "LexicalHedge";
  }
  return "RhythmBreak";
}

std::optional<Tactic> parse_tactic(std::string_view s) {
  for (auto t : kAllTactics) {
    if (to_string(t) == s) return t;
  }
  return std::nullopt;
}

bool ConstraintConfig::enabled(Tactic t) const { return std::find(tactics.begin(), tactics.end(), t) != tactics.end(); }

void ConstraintConfig::validate() const {
  if (!(theta_low < theta_high)) fail(ErrorKind::Config, "theta_low must be < theta_high");
  if (!(lambda_rhythm > 0.0 && lambda_rhythm <= 1.0)) fail(ErrorKind::Config, "lambda_rhythm must lie in (0, 1]");
  if (flatline_run < 2) fail(ErrorKind::Config, "flatline_run must be >= 2");
  if (!(flatline_band >= 0.0)) fail(ErrorKind::Config, "flatline_band must be >= 0");
  if (!(lambda1 >= 0.0) || !(lambda2 >= 0.0)) fail(ErrorKind::Config, "lambda1 and lambda2 must be >= 0");
  if (!(max_connector_density >= 0.0 && max_connector_density <= 1.0)) {
    fail(ErrorKind::Config, "max_connector_density must lie in [0, 1]");
  }
  if (!(grounding_tolerance >= 0.0)) fail(ErrorKind::Config, "grounding_tolerance must be >= 0");
  if (enabled(Tactic::LogicFog) && forbidden_connectors.empty()) {
    fail(ErrorKind::Config, "LogicFog needs a nonempty forbidden connector list");
  }
  if (enabled(Tactic::LexicalHedge) && (formal_lexicon.empty() || colloquial_lexicon.empty())) {
    fail(ErrorKind::Config, "LexicalHedge needs nonempty formal and colloquial lexicons");
  }
}

std::vector<Violation> validate_rhythm_lengths(const std::vector<std::size_t>& len, const ConstraintConfig& cfg) {
  std::vector<Violation> out;
  for (std::size_t t = 1; t < len.size(); ++t) {
    if (len[t - 1] > cfg.theta_high && len[t] >= cfg.theta_low) {
      out.push_back({"RhythmBreak", t,
                     "sentence of " + std::to_string(len[t]) + " tokens follows one of " + std::to_string(len[t - 1]) +
                         "; expected fewer than " + std::to_string(cfg.theta_low)});
    }
  }
  if (len.empty()) return out;

  std::vector<bool> flat(len.size(), false);
  flat[0] = true;
  double ema = static_cast<double>(len[0]);
  for (std::size_t t = 1; t < len.size(); ++t) {
    const double l = static_cast<double>(len[t]);
    flat[t] = std::fabs(l - ema) <= cfg.flatline_band * ema;
    ema = cfg.lambda_rhythm * ema + (1.0 - cfg.lambda_rhythm) * l;
  }
  for (std::size_t t = 0; t < len.size();) {
    if (!flat[t]) {
      ++t;
      continue;
    }
    auto end = t;
    while (end < len.size() && flat[end]) ++end;
    if (end - t >= cfg.flatline_run) {
      out.push_back({"RhythmBreak", t,
                     "flatline: " + std::to_string(end - t) + " consecutive sentences near the running average"});
    }
    t = end;
  }
  std::stable_sort(out.begin(), out.end(), [](const Violation& a, const Violation& b) { return a.location < b.location; });
  return out;
}

std::vector<Violation> validate_rhythm(std::string_view text, const ConstraintConfig& config) {
  std::vector<std::size_t> lengths;
  for (const auto& s : segment_sentences(text).sentences) lengths.push_back(s.token_len);
  return validate_rhythm_lengths(lengths, config);
}

std::vector<Violation> validate_logic_fog(std::string_view text, const ConstraintConfig& config) {
  if (config.forbidden_connectors.empty()) fail(ErrorKind::Config, "forbidden connector list is empty");
  const auto sentences = segment_sentences(text);
  const auto allowed = static_cast<std::size_t>(
      std::floor(config.max_connector_density * static_cast<double>(sentences.size()) + 1e-9));
  std::vector<Violation> out;
  std::size_t seen = 0;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    const auto& s = sentences.sentences[i].text;
    if (!config.forbidden_connectors.starts(s)) continue;
    if (++seen > allowed) {
      out.push_back({"LogicFog", i, "sentence opens with an explicit connector: " + text::slice(s, 0, 24)});
    }
  }
  return out;
}

std::vector<Violation> validate_lexical_hedge(std::string_view text, const ConstraintConfig& config) {
  if (config.formal_lexicon.empty() || config.colloquial_lexicon.empty()) {
    fail(ErrorKind::Config, "lexical hedge needs both lexicons");
  }
  std::vector<Violation> out;
  if (!config.formal_lexicon.any_in(text)) out.push_back({"LexicalHedge", 0, "missing-formal"});
  if (!config.colloquial_lexicon.any_in(text)) out.push_back({"LexicalHedge", 0, "missing-colloquial"});
  return out;
}

std::vector<Violation> validate_all(std::string_view text, const ConstraintConfig& config) {
  std::vector<Violation> out;
  auto append = [&](std::vector<Violation> v) { out.insert(out.end(), v.begin(), v.end()); };
  for (auto t : kAllTactics) {
    if (!config.enabled(t)) continue;
    switch (t) {
      case Tactic::RhythmBreak: append(validate_rhythm(text, config)); break;
      case Tactic::LogicFog: append(validate_logic_fog(text, config)); break;
      case Tactic::LexicalHedge: append(validate_lexical_hedge(text, config)); break;
    }
  }
  return out;
}

CandidateScore CandidateScore::make(double nll, std::size_t h, double b, double lambda1, double lambda2) {
  return {nll, h, b, nll + lambda1 * static_cast<double>(h) - lambda2 * b};
}

double unigram_nll(std::string_view text, const ContextWindow& window) {
  std::map<char32_t, double> counts;
  double total = 0.0;
  auto fit = [&](std::string_view s) {
    for (auto c : text::decode(s)) {
      counts[c] += 1.0;
      total += 1.0;
    }
  };
  for (const auto& f : window.facts) fit(f.render());
  for (const auto& b : window.blocks) fit(b.gist);
  const double vocab = static_cast<double>(counts.size()) + 1.0;  // one bucket for unseen characters
  const auto cps = text::decode(text);
  if (cps.empty()) return 0.0;
  double nll = 0.0;
  for (auto c : cps) {
    auto it = counts.find(c);
    const double n = it == counts.end() ? 0.0 : it->second;
    nll -= std::log((n + 1.0) / (total + vocab));
  }
  return nll / static_cast<double>(cps.size());
}

CandidateScore score_candidate(std::string_view text, const ContextWindow& window,
                               std::optional<double> backend_logprob, const ConstraintConfig& config) {
  const double nll = backend_logprob ? -*backend_logprob : unigram_nll(text, window);
  const auto h = hallucination_check(text, window.facts, config.grounding_tolerance).ungrounded_count;
  return CandidateScore::make(nll, h, burstiness(text), config.lambda1, config.lambda2);
}

nlohmann::ordered_json to_json(const Violation& v) {
  return {{"tactic", v.tactic}, {"location", v.location}, {"detail", v.detail}};
}

nlohmann::ordered_json to_json(const CandidateScore& s) {
  return {{"nll", s.nll}, {"hallucination_penalty", s.hallucination_penalty}, {"burstiness", s.burstiness},
          {"total", s.total}};
}

}  // namespace deepnews
