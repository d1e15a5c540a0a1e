#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "deepnews/extraction.hpp"

namespace deepnews {

enum class Stream { Ecological, Quantitative, Narrative };

std::string_view to_string(Stream s);
std::optional<Stream> parse_stream(std::string_view s);

struct SourceDocument {
  std::string id;
  Stream stream = Stream::Narrative;
  std::string title;
  std::string body;
  std::string source_uri;
  std::string retrieved_at;  // RFC 3339, validated on ingest
  std::size_t char_count = 0;

  bool operator==(const SourceDocument&) const = default;
};

enum class FactKind { Quantity, Date, Entity, Quote };

std::string_view to_string(FactKind k);
std::optional<FactKind> parse_fact_kind(std::string_view s);

using FactValue = std::variant<QuantityValue, DateValue, TextValue>;

struct AtomicFact {
  std::string id;
  std::string doc_id;
  FactKind kind = FactKind::Quantity;
  std::string subject;
  std::string predicate;
  FactValue value;
  Span span;
  double confidence = 1.0;

  /// The text the fact was read from: the number/date literal, the quote
  /// content or the entity name.
  std::string literal() const;
  /// One-line rendering injected into prompts and used for window budgets.
  std::string render() const;

  bool operator==(const AtomicFact&) const = default;
};

struct ContextBlock {
  std::string id;
  std::vector<std::string> doc_ids;  // sorted, nonempty
  std::string gist;
  std::vector<std::string> theme_tags;  // sorted
  std::size_t char_count = 0;

  bool operator==(const ContextBlock&) const = default;
};

/// Immutable after construction; safe to share across threads.
struct CorpusBundle {
  std::vector<SourceDocument> docs;
  std::vector<AtomicFact> facts;
  std::vector<ContextBlock> blocks;
  std::size_t total_chars = 0;

  const SourceDocument* find_doc(std::string_view id) const;
  const AtomicFact* find_fact(std::string_view id) const;
  const ContextBlock* find_block(std::string_view id) const;

  bool operator==(const CorpusBundle&) const = default;
};

enum class GateMode { Block, Warn, Off };
enum class Zone { Noise, Collapse, PhaseTransition, Saturation };

std::string_view to_string(GateMode m);
std::optional<GateMode> parse_gate_mode(std::string_view s);
std::string_view to_string(Zone z);
std::optional<Zone> parse_zone(std::string_view s);

struct ZonePolicy {
  std::size_t noise_max = 10'000;
  std::size_t collapse_max = 15'000;
  std::size_t phase_min = 30'000;
  std::size_t saturation_min = 40'000;
  GateMode gate_mode = GateMode::Block;

  /// Throws Config error unless noise_max <= collapse_max <= phase_min <= saturation_min.
  void validate() const;
};

struct GateDecision {
  enum class Verdict { Pass, Warn, Fail };
  Verdict verdict = Verdict::Pass;
  std::string message;
  Zone zone = Zone::Noise;
  double icr = 0.0;
};

std::string_view to_string(GateDecision::Verdict v);

inline constexpr std::size_t kDefaultBlockChars = 1500;

/// JSON Lines, one document per line; blank lines are skipped.
CorpusBundle ingest_documents(std::istream& in);
CorpusBundle ingest_documents(std::string_view jsonl);

std::vector<AtomicFact> extract_atomic_facts(const SourceDocument& doc);

std::vector<ContextBlock> build_context_blocks(const std::vector<SourceDocument>& docs,
                                               std::size_t target_block_chars = kDefaultBlockChars);

/// ingest -> extract -> build over an ingested bundle.
CorpusBundle structure_bundle(CorpusBundle bundle, std::size_t target_block_chars = kDefaultBlockChars);

double compute_icr(long long input_chars, long long target_output_chars);

Zone classify_context_zone(std::size_t total_chars, const ZonePolicy& policy);

GateDecision mvc_gate(const CorpusBundle& bundle, long long target_output_chars, const ZonePolicy& policy);

}  // namespace deepnews
