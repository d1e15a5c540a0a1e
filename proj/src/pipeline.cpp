#include <cmath>
#include <fstream>
#include <mutex>

#include "deepnews/error.hpp"
#include "deepnews/orchestrator.hpp"
#include "deepnews/serialize.hpp"
#include "deepnews/text.hpp"

namespace deepnews {

namespace fs = std::filesystem;

CorpusBundle load_corpus(const fs::path& jsonl, std::size_t target_block_chars) {
  std::ifstream in(jsonl);
  if (!in) fail(ErrorKind::Io, "cannot read corpus " + jsonl.string());
  return structure_bundle(ingest_documents(in), target_block_chars);
}

Outline plan_article(const CorpusBundle& bundle, const SchemaRegistry& registry, const PlanRequest& request) {
  const Schema* schema = nullptr;
  if (request.schema_id.empty()) {
    schema = &select_schema(registry, TopicProfile::from_text(request.topic, request.relation));
  } else {
    schema = registry.find(request.schema_id);
    if (!schema) fail(ErrorKind::NotFound, "no schema with id " + request.schema_id);
  }
  const auto bindings = bind_slots(*schema, bundle, request.bind_top_k);
  return plan_outline(*schema, bindings, bundle, request.plan, request.topic);
}

MetricsReport score_article(const Article& article, const CorpusBundle& bundle, long long target_output_chars,
                            const ZonePolicy& policy, const MetricsConfig& config) {
  MetricsReport m;
  m.burstiness = burstiness(article.text);
  m.structural_entropy = article.paragraph_types.empty() ? 0.0 : structural_entropy(article.paragraph_types);
  m.subjectivity = subjectivity_score(article.text, config.opinion_lexicon, config.markers_per_sentence);
  m.hfr = hallucination_check(article.text, bundle.facts, config.grounding_tolerance);
  m.icr = compute_icr(static_cast<long long>(bundle.total_chars), target_output_chars);
  m.zone = classify_context_zone(bundle.total_chars, policy);
  m.cost = article.cost;
  m.token_usage = article.usage;
  return m;
}

namespace {

std::string section_file(std::size_t k) { return "sections/section_" + std::to_string(k + 1) + ".json"; }

template <class T>
class Lazy {
 public:
  template <class F>
  const T& get(F&& load) {
    std::lock_guard lock(mu_);
    if (!value_) value_ = load();
    return *value_;
  }

 private:
  std::mutex mu_;
  std::optional<T> value_;
};

class Pipeline {
 public:
  Pipeline(const RunConfig& config, fs::path dir, GenerationBackend& backend)
      : config_(config), dir_(std::move(dir)), backend_(backend) {}

  NodeOutput operator()(const DagNode& node, const RunRecord& record) {
    switch (node.kind) {
      case NodeKind::Ingest: return ingest();
      case NodeKind::Clean: return clean();
      case NodeKind::Plan: return plan();
      case NodeKind::Write: return write(node.section);
      case NodeKind::Assemble: return assemble();
      case NodeKind::Metrics: return metrics();
      case NodeKind::Report: return report(record);
    }
    return {};
  }

  const Outline& outline() {
    return outline_.get([&] { return outline_from_json(read_json_file(dir_ / "outline.json"), bundle()); });
  }

 private:
  const CorpusBundle& bundle() {
    return bundle_.get([&] { return bundle_from_json(read_json_file(dir_ / "bundle.json")); });
  }

  void put(const std::string& name, const std::string& content) { write_file_atomic(dir_ / name, content); }

  NodeOutput ingest() {
    std::ifstream in(config_.corpus);
    if (!in) fail(ErrorKind::Io, "cannot read corpus " + config_.corpus.string());
    put("ingest.json", dump(to_json(ingest_documents(in))));
    return {{}, 0.0, {"ingest.json"}};
  }

  NodeOutput clean() {
    auto bundle = structure_bundle(bundle_from_json(read_json_file(dir_ / "ingest.json")), config_.target_block_chars);
    put("bundle.json", dump(to_json(bundle)));
    const auto gate = mvc_gate(bundle, static_cast<long long>(config_.plan.target_output_chars), config_.zone);
    nlohmann::ordered_json g;
    g["verdict"] = std::string(to_string(gate.verdict));
    g["message"] = gate.message;
    g["zone"] = std::string(to_string(gate.zone));
    g["icr"] = gate.icr;
    g["total_chars"] = bundle.total_chars;
    g["gate_mode"] = std::string(to_string(config_.zone.gate_mode));
    put("gate.json", dump(g));
    if (gate.verdict == GateDecision::Verdict::Fail) throw GateFailure(gate.message);
    return {{}, 0.0, {"bundle.json", "gate.json"}};
  }

  NodeOutput plan() {
    const auto registry = SchemaRegistry::load_dir(config_.schema_dir);
    PlanRequest req{config_.topic, config_.relation, config_.schema_id, config_.bind_top_k, config_.plan};
    const auto outline = plan_article(bundle(), registry, req);
    put("outline.json", dump(to_json(outline)));
    return {{}, 0.0, {"outline.json"}};
  }

  NodeOutput write(std::size_t k) {
    WriterOptions options;
    options.style = config_.style;
    options.decode = config_.decode;
    const auto draft =
        generate_section(outline(), k, backend_, config_.constraints, text::mix_seed(config_.seed, k), options);
    put(section_file(k), dump(to_json(draft)));
    return {draft.usage, config_.prices.cost(draft.usage), {section_file(k)}};
  }

  std::vector<DraftSection> drafts() {
    std::vector<DraftSection> out;
    for (std::size_t k = 0; k < outline().sections.size(); ++k) {
      out.push_back(draft_from_json(read_json_file(dir_ / section_file(k))));
    }
    return out;
  }

  NodeOutput assemble() {
    const auto article =
        assemble_article(outline(), drafts(), bundle(), config_.prices, config_.constraints.grounding_tolerance);
    put("article.json", dump(to_json(article)));
    put("article.md", article.markdown());
    return {{}, 0.0, {"article.json", "article.md"}};
  }

  NodeOutput metrics() {
    const auto article = article_from_json(read_json_file(dir_ / "article.json"));
    const auto m = score_article(article, bundle(), static_cast<long long>(config_.plan.target_output_chars),
                                 config_.zone, config_.metrics);
    put("metrics.json", dump(to_json(m)));
    return {{}, 0.0, {"metrics.json"}};
  }

  NodeOutput report(const RunRecord& record) {
    const auto m = metrics_from_json(read_json_file(dir_ / "metrics.json"));
    const auto r = run_report(record, m, drafts());
    put("report.json", dump(r.json));
    put("report.txt", r.text);
    return {{}, 0.0, {"report.json", "report.txt"}};
  }

  const RunConfig& config_;
  fs::path dir_;
  GenerationBackend& backend_;
  Lazy<CorpusBundle> bundle_;
  Lazy<Outline> outline_;
};

}  // namespace

RunResult run_pipeline(const RunConfig& config, bool resume) {
  config.validate();
  RunResult result;
  const auto run_id = config.run_id.empty() ? config.derived_run_id() : config.run_id;
  result.run_dir = config.runs_dir / run_id;
  const auto record_path = result.run_dir / "record.json";

  auto& record = result.record;
  if (resume) {
    if (!fs::is_regular_file(record_path)) fail(ErrorKind::Config, "no run to resume at " + result.run_dir.string());
    record = record_from_json(read_json_file(record_path));
  } else {
    if (fs::exists(result.run_dir)) {
      if (!fs::is_regular_file(record_path)) {
        fail(ErrorKind::Config, result.run_dir.string() + " exists and is not a run directory");
      }
      fs::remove_all(result.run_dir);
    }
  }
  fs::create_directories(result.run_dir / "sections");
  record.run_id = run_id;
  record.config = config.to_json();
  record.currency = config.prices.currency;

  auto backend = make_backend(config);
  Pipeline pipeline(config, result.run_dir, *backend);
  const NodeBody body = [&](const DagNode& node, const RunRecord& snapshot) { return pipeline(node, snapshot); };
  const RecordSink sink = [&](const RunRecord& r) { write_file_atomic(record_path, dump(to_json(r))); };

  execute(build_plan_dag(), body, 1, record, sink);
  const auto* plan = record.find("plan");
  if (plan && plan->status == NodeStatus::Done) {
    const auto& outline = pipeline.outline();
    const auto dag = build_dag(outline, config);
    execute(dag, body, config.effective_parallelism(outline.sections.size()), record, sink);
  }
  result.exit_code = exit_code_for(record);
  return result;
}

RunReport run_report(const RunRecord& record, const MetricsReport& metrics, const std::vector<DraftSection>& sections,
                     std::optional<double> acceptance_rate) {
  const auto usage = record.usage();
  const auto cost = record.cost();
  std::string model;
  for (const auto& s : sections) {
    if (!s.model_id.empty()) {
      model = s.model_id;
      break;
    }
  }
  if (model.empty() && record.config.contains("backend")) {
    const auto& b = record.config["backend"];
    model = b.value("kind", "") == "http" ? b["http"].value("model", "") : "mock-realizer-1";
  }
  const auto grounded = metrics.hfr.claims.size() - metrics.hfr.ungrounded_count;
  // Report runs before its own completion, so the record it sees is complete
  // apart from itself.
  bool others_done = true;
  for (const auto& n : record.nodes) {
    if (n.kind != NodeKind::Report && n.status != NodeStatus::Done) others_done = false;
  }
  const char* status = record.complete() || others_done ? "complete" : "failed";

  RunReport out;
  auto& j = out.json;
  j["run_id"] = record.run_id;
  j["status"] = status;
  j["model_base"] = model;
  j["zone"] = std::string(to_string(metrics.zone));
  j["icr"] = metrics.icr;
  j["metrics"] = {{"burstiness", metrics.burstiness},
                  {"structural_entropy", metrics.structural_entropy},
                  {"subjectivity", metrics.subjectivity},
                  {"hallucination_free", metrics.hfr.hallucination_free},
                  {"claims", metrics.hfr.claims.size()},
                  {"ungrounded_claims", metrics.hfr.ungrounded_count}};
  j["sections"] = nlohmann::ordered_json::array();
  for (const auto& s : sections) {
    nlohmann::ordered_json v = nlohmann::ordered_json::array();
    for (const auto& x : s.violations) v.push_back(to_json(x));
    j["sections"].push_back(
        {{"title", s.title}, {"attempts", s.attempts}, {"flagged", s.flagged}, {"violations", std::move(v)}});
  }
  j["time_consumed_ms"] = record.wall_ms;
  j["token_usage"] = {{"prompt_tokens", usage.prompt_tokens},
                      {"completion_tokens", usage.completion_tokens},
                      {"total_tokens", usage.total()}};
  j["cost"] = cost;
  j["currency"] = record.currency;
  std::optional<Ecpa> e;
  if (acceptance_rate) {
    if (*acceptance_rate < 0.0 || *acceptance_rate > 1.0) fail(ErrorKind::Domain, "acceptance rate must be in [0, 1]");
    e = ecpa(cost, *acceptance_rate);
    j["acceptance_rate"] = *acceptance_rate;
    if (e->infinite) {
      j["ecpa"] = "infinite";
    } else {
      j["ecpa"] = e->value;
    }
  }

  auto rounded = [](double v, double scale) { return text::format_double(std::round(v * scale) / scale); };
  auto row = [&](std::string_view label, const std::string& value) {
    std::string line(label);
    line.resize(std::max<std::size_t>(line.size() + 1, 24), ' ');
    out.text += line + value + "\n";
  };
  row("Run", record.run_id + " (" + status + ")");
  row("Model Base", model);
  row("Context Zone", std::string(to_string(metrics.zone)) + ", ICR " + text::format_fixed(metrics.icr, 1) + ":1");
  row("Time Consumed", text::format_fixed(record.wall_ms / 1000.0, 1) + " s");
  row("Token Usage", std::to_string(usage.total()) + " (prompt " + std::to_string(usage.prompt_tokens) +
                         ", completion " + std::to_string(usage.completion_tokens) + ")");
  row("Avg. Cost per Article", rounded(cost, 1e6) + " " + record.currency);
  row("Burstiness", text::format_fixed(metrics.burstiness, 3));
  row("Structural Entropy", text::format_fixed(metrics.structural_entropy, 3));
  row("Subjectivity", text::format_fixed(metrics.subjectivity, 3));
  row("Hallucination Free", std::string(metrics.hfr.hallucination_free ? "yes" : "no") + " (" +
                                std::to_string(grounded) + "/" + std::to_string(metrics.hfr.claims.size()) +
                                " claims grounded)");
  if (acceptance_rate) {
    row("Acceptance Rate", rounded(*acceptance_rate * 100.0, 1e4) + "%");
    row("ECPA", e->infinite ? "infinite" : e->render() + " " + record.currency);
  }
  if (!sections.empty()) {
    out.text += "Violations per section\n";
    for (std::size_t i = 0; i < sections.size(); ++i) {
      const auto& s = sections[i];
      std::string v;
      for (const auto& x : s.violations) v += (v.empty() ? "" : "; ") + x.tactic + " @" + std::to_string(x.location);
      out.text += "  " + std::to_string(i + 1) + ". " + s.title + ": " + (v.empty() ? "none" : v) + " (attempts " +
                  std::to_string(s.attempts) + ")\n";
    }
  }
  return out;
}

}  // namespace deepnews
