#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "deepnews/error.hpp"
#include "deepnews/orchestrator.hpp"
#include "deepnews/serialize.hpp"

namespace fs = std::filesystem;
using namespace deepnews;

namespace {

int exit_code(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::Config:
    case ErrorKind::Parse:
    case ErrorKind::Io:
    case ErrorKind::NotFound:
    case ErrorKind::Validation:
    case ErrorKind::Domain:
    case ErrorKind::Conflict:
      return 2;
    default:
      return 4;
  }
}

void emit(const std::string& content, const std::string& out) {
  if (out.empty()) {
    std::cout << content;
  } else {
    write_file_atomic(out, content);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deepnews: schema-guided long-form article pipeline"};
  app.require_subcommand(1);

  std::string corpus, out_dir;
  std::size_t block_chars = kDefaultBlockChars;
  auto* ingest = app.add_subcommand("ingest", "Ingest a JSON Lines corpus into a structured bundle");
  ingest->add_option("jsonl", corpus, "Corpus file")->required();
  ingest->add_option("--out", out_dir, "Output directory for bundle.json")->required();
  ingest->add_option("--block-chars", block_chars, "Target context block size");

  std::string bundle_dir, schema_dir, topic, relation = "vertical", schema_id, plan_out;
  PlanConfig plan_config;
  auto* plan = app.add_subcommand("plan", "Plan an outline from a bundle");
  plan->add_option("--bundle", bundle_dir, "Directory holding bundle.json")->required();
  plan->add_option("--schema-dir", schema_dir, "Schema directory")->required();
  plan->add_option("--topic", topic, "Article topic")->required();
  plan->add_option("--relation", relation, "vertical|horizontal|single|industry|blindspot");
  plan->add_option("--schema-id", schema_id, "Use this schema instead of selecting one");
  plan->add_option("--min-sections", plan_config.min_sections);
  plan->add_option("--max-sections", plan_config.max_sections);
  plan->add_option("--out", plan_out, "Write outline JSON here instead of stdout");

  std::string config_path, backend, resume_id, runs_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> parallelism;
  auto* run = app.add_subcommand("run", "Run the full pipeline");
  run->add_option("--config", config_path, "Run config JSON")->required();
  run->add_option("--backend", backend, "mock|http")->check(CLI::IsMember({"mock", "http"}));
  run->add_option("--seed", seed, "Override the config seed");
  run->add_option("--resume", resume_id, "Resume this run, re-executing only unfinished nodes");
  run->add_option("--parallelism", parallelism, "Concurrent writer limit");
  run->add_option("--runs-dir", runs_dir, "Override the runs directory");

  std::string article_path, score_bundle, lexicon;
  std::size_t target_chars = 3000;
  auto* score = app.add_subcommand("score", "Compute metrics for an article");
  score->add_option("article", article_path, "article.json")->required();
  score->add_option("--bundle", score_bundle, "Directory holding bundle.json")->required();
  score->add_option("--target-chars", target_chars, "Target output size for ICR");
  score->add_option("--opinion-lexicon", lexicon, "Subjectivity marker list");

  std::string report_id;
  std::optional<double> acceptance;
  bool report_json = false;
  auto* report = app.add_subcommand("report", "Summarize a finished run");
  report->add_option("run_id", report_id, "Run id")->required();
  report->add_option("--acceptance-rate", acceptance, "Editorial acceptance rate in [0, 1]")
      ->check(CLI::Range(0.0, 1.0));
  report->add_option("--runs-dir", runs_dir, "Runs directory")->default_str("runs");
  report->add_flag("--json", report_json, "Print JSON instead of text");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*ingest) {
      const auto bundle = load_corpus(corpus, block_chars);
      fs::create_directories(out_dir);
      write_file_atomic(fs::path(out_dir) / "bundle.json", dump(to_json(bundle)));
      std::cout << "docs " << bundle.docs.size() << ", facts " << bundle.facts.size() << ", blocks "
                << bundle.blocks.size() << ", chars " << bundle.total_chars << " ("
                << to_string(classify_context_zone(bundle.total_chars, {})) << ")\n";
      return 0;
    }
    if (*plan) {
      const auto bundle = bundle_from_json(read_json_file(fs::path(bundle_dir) / "bundle.json"));
      const auto registry = SchemaRegistry::load_dir(schema_dir);
      const auto rel = parse_relation(relation);
      if (!rel) fail(ErrorKind::Config, "unknown relation " + relation);
      const auto outline = plan_article(bundle, registry, {topic, *rel, schema_id, kDefaultBindTopK, plan_config});
      emit(dump(to_json(outline)), plan_out);
      return 0;
    }
    if (*run) {
      auto config = RunConfig::load(config_path);
      if (!backend.empty()) config.backend = *parse_backend_kind(backend);
      if (seed) config.seed = *seed;
      if (parallelism) config.parallelism = *parallelism;
      if (!runs_dir.empty()) config.runs_dir = runs_dir;
      if (!resume_id.empty()) config.run_id = resume_id;
      const auto result = run_pipeline(config, !resume_id.empty());
      std::cout << result.run_dir.string() << "\n";
      for (const auto& n : result.record.nodes) {
        if (n.status == NodeStatus::Failed) std::cerr << n.id << ": " << n.reason << "\n";
      }
      if (fs::exists(result.run_dir / "report.txt")) std::cout << read_text_file(result.run_dir / "report.txt");
      return result.exit_code;
    }
    if (*score) {
      const auto article = article_from_json(read_json_file(article_path));
      const auto bundle = bundle_from_json(read_json_file(fs::path(score_bundle) / "bundle.json"));
      MetricsConfig mc;
      mc.opinion_lexicon =
          Lexicon::load(lexicon.empty() ? default_asset_dir() / "lexicons" / "opinion.txt" : fs::path(lexicon));
      const auto m = score_article(article, bundle, static_cast<long long>(target_chars), ZonePolicy{}, mc);
      std::cout << dump(to_json(m));
      return 0;
    }
    if (*report) {
      const auto dir = fs::path(runs_dir) / report_id;
      const auto record = record_from_json(read_json_file(dir / "record.json"));
      if (!fs::exists(dir / "metrics.json")) fail(ErrorKind::NotFound, "run " + report_id + " has no metrics yet");
      const auto metrics = metrics_from_json(read_json_file(dir / "metrics.json"));
      std::vector<DraftSection> sections;
      for (std::size_t k = 1; fs::exists(dir / "sections" / ("section_" + std::to_string(k) + ".json")); ++k) {
        sections.push_back(draft_from_json(read_json_file(dir / "sections" / ("section_" + std::to_string(k) + ".json"))));
      }
      const auto r = run_report(record, metrics, sections, acceptance);
      std::cout << (report_json ? dump(r.json) : r.text);
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
