#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "deepnews/backend.hpp"
#include "deepnews/constraints.hpp"
#include "deepnews/corpus.hpp"
#include "deepnews/error.hpp"
#include "deepnews/metrics.hpp"
#include "deepnews/planner.hpp"
#include "deepnews/schema.hpp"
#include "deepnews/writer.hpp"

namespace deepnews {

enum class BackendKind { Mock, Http };

std::string_view to_string(BackendKind k);
std::optional<BackendKind> parse_backend_kind(std::string_view s);

struct RunConfig {
  std::filesystem::path corpus;
  std::filesystem::path schema_dir;
  std::filesystem::path runs_dir = "runs";
  std::string run_id;  // empty: derived from the config snapshot
  std::string topic;
  Relation relation = Relation::Vertical;
  std::string schema_id;  // empty: chosen by select_schema
  std::uint64_t seed = 42;
  std::size_t parallelism = 0;  // 0: one worker per section
  std::size_t target_block_chars = kDefaultBlockChars;
  std::size_t bind_top_k = kDefaultBindTopK;

  ZonePolicy zone;
  PlanConfig plan;
  ConstraintConfig constraints;
  MetricsConfig metrics;

  BackendKind backend = BackendKind::Mock;
  MockConfig mock;
  HttpConfig http;

  std::string style = "Cynical/Analytical";
  DecodeParams decode;
  PriceTable prices;

  struct LexiconPaths {
    std::filesystem::path connectors;
    std::filesystem::path formal;
    std::filesystem::path colloquial;
    std::filesystem::path opinion;
  } lexicons;

  /// Unknown keys and wrong types are Config errors. Relative paths resolve
  /// against `base_dir`. Lexicons default to the shipped asset files.
  static RunConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
  static RunConfig load(const std::filesystem::path& path);

  /// Reads the four lexicon files into the constraint and metrics configs.
  void load_lexicons();
  /// Normalized snapshot; from_json(to_json()) reproduces the config.
  nlohmann::ordered_json to_json() const;
  void validate() const;
  std::size_t effective_parallelism(std::size_t sections) const;
  std::string derived_run_id() const;
};

/// Directory holding the shipped prompts, schemas and lexicons.
std::filesystem::path default_asset_dir();

std::unique_ptr<GenerationBackend> make_backend(const RunConfig& config);

enum class NodeKind { Ingest, Clean, Plan, Write, Assemble, Metrics, Report };

std::string_view to_string(NodeKind k);

struct DagNode {
  std::string id;  // "ingest", "write_3", ...
  NodeKind kind = NodeKind::Ingest;
  std::size_t section = 0;  // Write nodes only
  std::vector<std::size_t> deps;
};

struct PipelineDag {
  std::vector<DagNode> nodes;

  std::size_t write_count() const;
  std::optional<std::size_t> find(std::string_view id) const;
  /// Kahn order, lowest index first among ready nodes. Cycle error otherwise.
  std::vector<std::size_t> topological_order() const;
  /// Cycle error when cyclic; Validation error when Assemble/Write wiring is wrong.
  void check() const;
};

/// Ingest -> Clean -> Plan -> Write x N -> Assemble -> Metrics -> Report.
PipelineDag build_dag(std::size_t sections);
PipelineDag build_dag(const Outline& outline, const RunConfig& config);
/// Ingest -> Clean -> Plan, used before the outline exists.
PipelineDag build_plan_dag();

enum class NodeStatus { Pending, Running, Done, Failed };

std::string_view to_string(NodeStatus s);

struct NodeRecord {
  std::string id;
  NodeKind kind = NodeKind::Ingest;
  std::size_t section = 0;
  std::vector<std::string> deps;
  NodeStatus status = NodeStatus::Pending;
  std::string reason;       // Failed only
  std::string error_kind;   // ErrorKind name, "Gate", or "Skipped"
  double started_ms = 0.0;  // since run start
  double finished_ms = 0.0;
  std::size_t executions = 0;
  TokenUsage usage;
  double cost = 0.0;
  std::vector<std::string> artifacts;  // relative to the run directory
};

struct RunRecord {
  std::string run_id;
  nlohmann::ordered_json config;
  std::vector<NodeRecord> nodes;
  double wall_ms = 0.0;
  std::string currency;

  NodeRecord* find(std::string_view id);
  const NodeRecord* find(std::string_view id) const;
  bool complete() const;  // every node Done
  bool failed() const;
  TokenUsage usage() const;
  double cost() const;
  std::vector<std::string> artifacts() const;
};

nlohmann::ordered_json to_json(const RunRecord& r);
RunRecord record_from_json(const nlohmann::json& j);

struct NodeOutput {
  TokenUsage usage;
  double cost = 0.0;
  std::vector<std::string> artifacts;
};

/// Thrown by node bodies for the MVC gate; maps to exit code 3.
struct GateFailure : Error {
  explicit GateFailure(const std::string& msg) : Error(ErrorKind::Validation, msg) {}
};

/// `record` is a copy taken when the node was dispatched.
using NodeBody = std::function<NodeOutput(const DagNode& node, const RunRecord& record)>;
/// Called on the scheduler thread after every status change.
using RecordSink = std::function<void(const RunRecord&)>;

/// Runs every node of `dag` that is not Done in `record`, adding missing nodes
/// to the record. At most `parallelism` bodies run at once; ready nodes start
/// in index order. Only the calling thread touches `record`.
void execute(const PipelineDag& dag, const NodeBody& body, std::size_t parallelism, RunRecord& record,
             const RecordSink& sink = {});

struct RunResult {
  RunRecord record;
  std::filesystem::path run_dir;
  int exit_code = 0;
};

/// Full pipeline into runs_dir/<run_id>/. With `resume`, an existing
/// record.json is loaded and Done nodes are kept.
RunResult run_pipeline(const RunConfig& config, bool resume = false);

int exit_code_for(const RunRecord& record);

CorpusBundle load_corpus(const std::filesystem::path& jsonl, std::size_t target_block_chars = kDefaultBlockChars);

struct PlanRequest {
  std::string topic;
  Relation relation = Relation::Vertical;
  std::string schema_id;
  std::size_t bind_top_k = kDefaultBindTopK;
  PlanConfig plan;
};

Outline plan_article(const CorpusBundle& bundle, const SchemaRegistry& registry, const PlanRequest& request);

MetricsReport score_article(const Article& article, const CorpusBundle& bundle, long long target_output_chars,
                            const ZonePolicy& policy, const MetricsConfig& config);

struct RunReport {
  nlohmann::ordered_json json;
  std::string text;
};

RunReport run_report(const RunRecord& record, const MetricsReport& metrics,
                     const std::vector<DraftSection>& sections = {},
                     std::optional<double> acceptance_rate = std::nullopt);

}  // namespace deepnews
