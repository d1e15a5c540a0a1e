#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "deepnews/corpus.hpp"
#include "deepnews/schema.hpp"

namespace deepnews {

enum class LedeId { ContradictionParadox, DramaticOpening, DataShock, SceneCutIn, QuestionHook, TimelineCountdown };

std::string_view to_string(LedeId id);
std::optional<LedeId> parse_lede_id(std::string_view s);

struct LedeBlueprint {
  LedeId id = LedeId::DramaticOpening;
  std::string directive;

  bool operator==(const LedeBlueprint&) const = default;
};

/// The six registered blueprints, in enum order.
const std::array<LedeBlueprint, 6>& lede_blueprints();
const LedeBlueprint& lede_blueprint(LedeId id);

enum class BlockType { DataAnchor, NarrativeCutIn, DeepInsight, Conflict };
inline constexpr std::array<BlockType, 4> kAllBlockTypes = {BlockType::DataAnchor, BlockType::NarrativeCutIn,
                                                            BlockType::DeepInsight, BlockType::Conflict};

std::string_view to_string(BlockType t);
std::optional<BlockType> parse_block_type(std::string_view s);

enum class Density { HighDensity, LowDensity };

std::string_view to_string(Density d);
std::optional<Density> parse_density(std::string_view s);

struct AtomicBlockSpec {
  BlockType type = BlockType::DataAnchor;
  std::string directive;
  std::vector<std::string> evidence_refs;
  std::size_t target_chars = 1;

  bool operator==(const AtomicBlockSpec&) const = default;
};

struct ContextWindow {
  std::size_t section = 0;
  std::vector<AtomicFact> facts;
  std::vector<ContextBlock> blocks;
  std::size_t char_budget = 0;
  std::size_t used_chars = 0;

  bool contains(std::string_view evidence_id) const;
  const AtomicFact* find_fact(std::string_view id) const;
  const ContextBlock* find_block(std::string_view id) const;
  std::vector<std::string> item_ids() const;

  bool operator==(const ContextWindow&) const = default;
};

struct Section {
  std::string title;
  std::vector<std::size_t> steps;  // schema step indices, ascending
  std::vector<std::string> slots;
  std::vector<std::string> keywords;  // sorted relevance tokens
  Density density = Density::HighDensity;
  bool coerced = false;
  std::vector<std::string> directives;  // pacing flags and other planner notes
  std::vector<AtomicBlockSpec> blocks;
  ContextWindow window;

  bool operator==(const Section&) const = default;
};

struct Outline {
  std::string topic;
  std::string schema_id;
  LedeBlueprint lede;
  std::vector<Section> sections;

  bool operator==(const Outline&) const = default;
};

struct PlanConfig {
  std::size_t min_sections = 3;
  std::size_t max_sections = 8;
  std::size_t char_budget_per_section = 6000;
  std::size_t relevance_threshold = 1;
  double data_shock_percentile = 0.95;
  /// DataShock fires when the largest magnitude exceeds this multiple of the
  /// percentile of the remaining magnitudes in its unit group.
  double data_shock_ratio = 2.0;
  std::size_t target_output_chars = 3000;

  void validate() const;
};

/// Fact-store-driven lede choice. Precedence: ContradictionParadox, DataShock,
/// TimelineCountdown, SceneCutIn, QuestionHook, DramaticOpening.
LedeBlueprint select_lede(const Outline& draft, const CorpusBundle& bundle, const PlanConfig& config = {});

/// Trend sign of a quantity fact after weighing metric valence: "profits up"
/// is +1, "layoffs up" is -1, no direction word is 0.
int trend_polarity(const AtomicFact& fact);

enum class PacingMode {
  Reorder,        // permute with the fewest swaps, coerce only when impossible
  PreserveOrder,  // never permute; coerce classes to the nearest alternation
};

struct PacingPlan {
  std::vector<std::size_t> order;      // output position -> input index
  std::vector<Density> classes;        // final class per output position
  std::vector<std::size_t> coerced;    // output positions whose class was changed
  std::size_t swaps = 0;
};

PacingPlan plan_pacing(const std::vector<Density>& classes, PacingMode mode = PacingMode::Reorder);

/// Applies plan_pacing to whole sections; coerced sections get a directive
/// flag recording the change.
std::vector<Section> enforce_pacing(std::vector<Section> sections, PacingMode mode = PacingMode::Reorder);

std::vector<AtomicBlockSpec> decompose_blocks(const Section& section, const SlotBindings& bindings,
                                              const CorpusBundle& bundle, const PlanConfig& config = {});

/// Populates every section's window. Evidence referenced by the section's own
/// block specs is always included (and must fit the budget); other facts and
/// blocks join by relevance score, highest first, while the budget allows.
Outline scope_contexts(Outline outline, const CorpusBundle& bundle, std::size_t char_budget_per_section,
                       std::size_t relevance_threshold = 1);

Outline plan_outline(const Schema& schema, const SlotBindings& bindings, const CorpusBundle& bundle,
                     const PlanConfig& config = {}, std::string_view topic = {});

/// Character cost of a window item.
std::size_t window_chars(const AtomicFact& fact);
std::size_t window_chars(const ContextBlock& block);

}  // namespace deepnews
