#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "deepnews/corpus.hpp"

namespace deepnews {

/// The five narrative categories of the financial ontology.
enum class Category { S1Blind, S2VGame, S3Single, S4HGame, S5Indus };

struct CategoryInfo {
  Category category;
  std::string_view prefix;  // "S2-VGAME"
  std::string_view title;
  int complexity;
};

const std::vector<CategoryInfo>& category_table();
const CategoryInfo& info(Category c);
std::optional<Category> category_from_id(std::string_view schema_id);

/// What a slot wants from the corpus: a fact of some kind, or a context block.
enum class EvidenceKind { Quantity, Date, Entity, Quote, Block };

std::string_view to_string(EvidenceKind k);
std::optional<EvidenceKind> parse_evidence_kind(std::string_view s);

struct Directive {
  std::string key;
  std::string label;
  std::string detail;                     // scalar value, may be empty
  std::vector<std::string> alternatives;  // "[ A | B ]" values
  std::vector<Directive> fields;          // one level of nested key/values

  bool operator==(const Directive&) const = default;
};

struct SchemaOption {
  std::string name;
  std::string label;
  std::string detail;

  bool operator==(const SchemaOption&) const = default;
};

enum class OptionStyle { None, Numbered, Inline };

struct SlotDecl {
  std::string name;
  EvidenceKind expected = EvidenceKind::Block;
  bool required = true;
  std::size_t step = 0;

  bool operator==(const SlotDecl&) const = default;
};

struct SchemaStep {
  std::string name;   // "Step_1_Profile_The_Oppressor"
  std::string label;  // "Profiling Company A"
  std::vector<Directive> directives;
  std::optional<std::vector<SchemaOption>> options;
  OptionStyle option_style = OptionStyle::None;
  std::vector<SlotDecl> slots;

  std::string title() const;
  bool operator==(const SchemaStep&) const = default;
};

struct Schema {
  std::string id;
  Category category = Category::S1Blind;
  std::string title;
  int complexity = 1;
  std::vector<SchemaStep> steps;

  const SlotDecl* find_slot(std::string_view name) const;
  std::vector<SlotDecl> all_slots() const;
  /// Relevance tokens for a slot: its name, directive text, alternatives and
  /// field values (or the step's options for an implicit step slot).
  std::set<std::string> slot_keywords(std::string_view slot) const;
  /// Title plus all directive text, for topic matching.
  std::set<std::string> keywords() const;

  bool operator==(const Schema&) const = default;
};

/// Parses the schema definition language (see docs/sdl.md). `fallback_id`
/// names the schema when the file lacks a "Target Scenario" header.
Schema parse_sdl(std::string_view text, std::string_view fallback_id = {});

/// Canonical form; parse_sdl(serialize_sdl(s)) == s.
std::string serialize_sdl(const Schema& schema);

/// Read-only after load.
class SchemaRegistry {
 public:
  SchemaRegistry() = default;
  explicit SchemaRegistry(std::vector<Schema> schemas);

  /// Loads every *.yaml / *.sdl file; the file stem must equal the schema id.
  /// An optional index.json manifest is cross-checked when present.
  static SchemaRegistry load_dir(const std::filesystem::path& dir);

  const std::vector<Schema>& schemas() const { return schemas_; }
  bool empty() const { return schemas_.empty(); }
  const Schema* find(std::string_view id) const;

 private:
  std::vector<Schema> schemas_;  // sorted by id
};

enum class Relation { Vertical, Horizontal, Single, Industry, Blindspot };

std::string_view to_string(Relation r);
std::optional<Relation> parse_relation(std::string_view s);
Category category_for(Relation r);

struct TopicProfile {
  std::set<std::string> keywords;
  Relation relation = Relation::Vertical;

  static TopicProfile from_text(std::string_view topic, Relation relation);
};

const Schema& select_schema(const SchemaRegistry& registry, const TopicProfile& profile);

struct SlotBindings {
  std::map<std::string, std::vector<std::string>> bound;  // slot -> evidence ids
  std::vector<std::string> unbound;                       // required slots with no candidate

  bool operator==(const SlotBindings&) const = default;
};

inline constexpr std::size_t kDefaultBindTopK = 3;

SlotBindings bind_slots(const Schema& schema, const CorpusBundle& bundle, std::size_t top_k = kDefaultBindTopK);

/// Keyword tokens of a fact or block, shared by slot binding and window scoping.
std::set<std::string> evidence_tokens(const AtomicFact& fact);
std::set<std::string> evidence_tokens(const ContextBlock& block);

}  // namespace deepnews
