#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "deepnews/backend.hpp"
#include "deepnews/constraints.hpp"
#include "deepnews/corpus.hpp"
#include "deepnews/metrics.hpp"
#include "deepnews/planner.hpp"
#include "deepnews/prompt.hpp"

namespace deepnews {

struct BlockSpan {
  BlockType type = BlockType::DataAnchor;
  std::size_t start = 0;  // code points into DraftSection::text
  std::size_t end = 0;
};

struct DraftSection {
  std::size_t section = 0;
  std::string title;
  std::string text;
  std::vector<BlockSpan> blocks;
  std::vector<Violation> violations;
  CandidateScore score;
  std::size_t attempts = 0;
  std::uint64_t seed = 0;  // seed of the returned candidate
  bool flagged = false;    // true when violations remain
  TokenUsage usage;        // summed over every attempt
  std::string model_id;
};

struct WriterOptions {
  std::string style = "Cynical/Analytical";
  DecodeParams decode;
  const PromptTemplate* prompt_template = nullptr;  // defaults to the built-in section template
};

/// Renders one prompt per block spec, validates the joined section and
/// regenerates with violation feedback up to max_regenerations times. Returns
/// the lowest-total candidate; earlier attempts win ties.
DraftSection generate_section(const Outline& outline, std::size_t section_index, GenerationBackend& backend,
                              const ConstraintConfig& config, std::uint64_t seed, const WriterOptions& options = {});

/// Per-1k-token prices; defaults follow roughly 0.7 CNY per 200k tokens.
struct PriceTable {
  double prompt_per_1k = 0.0035;
  double completion_per_1k = 0.0035;
  std::string currency = "CNY";

  double cost(const TokenUsage& usage) const;
};

struct ClaimProvenance {
  std::string claim;
  Span span;              // code points into Article::text
  std::string grounding;  // fact id or "UNGROUNDED"
};

struct Article {
  std::string topic;
  std::string schema_id;
  std::vector<std::string> titles;
  std::vector<std::string> section_texts;
  std::vector<std::string> transitions;  // transitions[i] precedes section i; transitions[0] is empty
  std::string text;                      // body without headings
  std::vector<BlockType> paragraph_types;
  std::vector<ClaimProvenance> claim_provenance;
  std::string model_id;
  std::vector<std::uint64_t> seeds;
  TokenUsage usage;
  double cost = 0.0;
  std::string currency;
  std::vector<std::string> flagged_sections;

  std::string markdown() const;
};

Article assemble_article(const Outline& outline, const std::vector<DraftSection>& sections, const CorpusBundle& bundle,
                         const PriceTable& prices = {}, double grounding_tolerance = kDefaultGroundingTolerance);

/// Connector-free, digit-free bridge sentence leading into `next_title`.
std::string transition_sentence(const std::string& next_title);

nlohmann::ordered_json to_json(const DraftSection& d);
DraftSection draft_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const Article& a);
Article article_from_json(const nlohmann::json& j);

}  // namespace deepnews
