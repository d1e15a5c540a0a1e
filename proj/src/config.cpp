#include <cstdio>
#include <cstdlib>
#include <set>

#include "deepnews/error.hpp"
#include "deepnews/orchestrator.hpp"
#include "deepnews/serialize.hpp"
#include "deepnews/text.hpp"

#ifndef DEEPNEWS_DEFAULT_ASSET_DIR
#define DEEPNEWS_DEFAULT_ASSET_DIR "assets"
#endif

namespace deepnews {

namespace fs = std::filesystem;

std::string_view to_string(BackendKind k) { return k == BackendKind::Mock ? "mock" : "http"; }

std::optional<BackendKind> parse_backend_kind(std::string_view s) {
  if (s == "mock") return BackendKind::Mock;
  if (s == "http") return BackendKind::Http;
  return std::nullopt;
}

fs::path default_asset_dir() {
  if (const char* env = std::getenv("DEEPNEWS_ASSET_DIR"); env && *env) return env;
  return DEEPNEWS_DEFAULT_ASSET_DIR;
}

namespace {

class Obj {
 public:
  Obj(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(ErrorKind::Config, path_ + " must be an object");
  }

  const nlohmann::json* get(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  void size(const char* key, std::size_t& out) {
    if (auto v = get(key)) {
      if (!v->is_number_unsigned()) bad(key, "a non-negative integer");
      out = v->get<std::size_t>();
    }
  }
  void u64(const char* key, std::uint64_t& out) {
    if (auto v = get(key)) {
      if (!v->is_number_unsigned()) bad(key, "a non-negative integer");
      out = v->get<std::uint64_t>();
    }
  }
  void integer(const char* key, int& out) {
    if (auto v = get(key)) {
      if (!v->is_number_integer()) bad(key, "an integer");
      out = v->get<int>();
    }
  }
  void number(const char* key, double& out) {
    if (auto v = get(key)) {
      if (!v->is_number()) bad(key, "a number");
      out = v->get<double>();
    }
  }
  void boolean(const char* key, bool& out) {
    if (auto v = get(key)) {
      if (!v->is_boolean()) bad(key, "a boolean");
      out = v->get<bool>();
    }
  }
  void string(const char* key, std::string& out) {
    if (auto v = get(key)) {
      if (!v->is_string()) bad(key, "a string");
      out = v->get<std::string>();
    }
  }
  std::optional<std::vector<std::string>> strings(const char* key) {
    auto v = get(key);
    if (!v) return std::nullopt;
    if (!v->is_array()) bad(key, "an array of strings");
    std::vector<std::string> out;
    for (const auto& e : *v) {
      if (!e.is_string()) bad(key, "an array of strings");
      out.push_back(e.get<std::string>());
    }
    return out;
  }
  void path(const char* key, fs::path& out, const fs::path& base) {
    std::string s;
    string(key, s);
    if (s.empty()) return;
    fs::path p(s);
    out = (p.is_relative() && !base.empty() ? base / p : p).lexically_normal();
  }
  std::optional<Obj> child(const char* key) {
    if (auto v = get(key)) return Obj(*v, path_ + "." + key);
    return std::nullopt;
  }

  [[noreturn]] void bad(const char* key, const char* what) const {
    fail(ErrorKind::Config, path_ + "." + key + " must be " + what);
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) fail(ErrorKind::Config, "unknown config key " + path_ + "." + key);
    }
  }

 private:
  const nlohmann::json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::set<std::string> to_set(const std::optional<std::vector<std::string>>& v) {
  return v ? std::set<std::string>(v->begin(), v->end()) : std::set<std::string>{};
}

}  // namespace

RunConfig RunConfig::from_json(const nlohmann::json& j, const fs::path& base_dir) {
  RunConfig c;
  const auto assets = default_asset_dir();
  c.lexicons = {assets / "lexicons" / "connectors.txt", assets / "lexicons" / "formal.txt",
                assets / "lexicons" / "colloquial.txt", assets / "lexicons" / "opinion.txt"};

  Obj o(j, "config");
  o.path("corpus", c.corpus, base_dir);
  o.path("schema_dir", c.schema_dir, base_dir);
  o.path("runs_dir", c.runs_dir, base_dir);
  o.string("run_id", c.run_id);
  o.string("topic", c.topic);
  std::string relation(to_string(c.relation));
  o.string("relation", relation);
  if (auto r = parse_relation(relation)) {
    c.relation = *r;
  } else {
    fail(ErrorKind::Config, "config.relation: unknown relation \"" + relation + "\"");
  }
  o.string("schema_id", c.schema_id);
  o.u64("seed", c.seed);
  o.size("parallelism", c.parallelism);
  o.size("target_output_chars", c.plan.target_output_chars);
  o.size("target_block_chars", c.target_block_chars);
  o.size("bind_top_k", c.bind_top_k);
  double tolerance = kDefaultGroundingTolerance;
  o.number("grounding_tolerance", tolerance);
  c.constraints.grounding_tolerance = tolerance;
  c.metrics.grounding_tolerance = tolerance;

  if (auto z = o.child("zone")) {
    z->size("noise_max", c.zone.noise_max);
    z->size("collapse_max", c.zone.collapse_max);
    z->size("phase_min", c.zone.phase_min);
    z->size("saturation_min", c.zone.saturation_min);
    std::string mode(to_string(c.zone.gate_mode));
    z->string("gate_mode", mode);
    if (auto m = parse_gate_mode(mode)) {
      c.zone.gate_mode = *m;
    } else {
      fail(ErrorKind::Config, "config.zone.gate_mode: unknown mode \"" + mode + "\"");
    }
    z->finish();
  }
  if (auto p = o.child("plan")) {
    p->size("min_sections", c.plan.min_sections);
    p->size("max_sections", c.plan.max_sections);
    p->size("char_budget_per_section", c.plan.char_budget_per_section);
    p->size("relevance_threshold", c.plan.relevance_threshold);
    p->number("data_shock_percentile", c.plan.data_shock_percentile);
    p->number("data_shock_ratio", c.plan.data_shock_ratio);
    p->finish();
  }
  if (auto k = o.child("constraints")) {
    auto& cc = c.constraints;
    k->size("theta_high", cc.theta_high);
    k->size("theta_low", cc.theta_low);
    k->number("lambda_rhythm", cc.lambda_rhythm);
    k->size("flatline_run", cc.flatline_run);
    k->number("flatline_band", cc.flatline_band);
    k->number("max_connector_density", cc.max_connector_density);
    k->number("lambda1", cc.lambda1);
    k->number("lambda2", cc.lambda2);
    k->size("max_regenerations", cc.max_regenerations);
    if (auto tactics = k->strings("tactics")) {
      cc.tactics.clear();
      for (const auto& t : *tactics) {
        const auto tactic = parse_tactic(t);
        if (!tactic) fail(ErrorKind::Config, "config.constraints.tactics: unknown tactic \"" + t + "\"");
        if (!cc.enabled(*tactic)) cc.tactics.push_back(*tactic);
      }
    }
    k->finish();
  }
  if (auto l = o.child("lexicons")) {
    l->path("connectors", c.lexicons.connectors, base_dir);
    l->path("formal", c.lexicons.formal, base_dir);
    l->path("colloquial", c.lexicons.colloquial, base_dir);
    l->path("opinion", c.lexicons.opinion, base_dir);
    l->finish();
  }
  if (auto m = o.child("metrics")) {
    m->number("markers_per_sentence", c.metrics.markers_per_sentence);
    m->finish();
  }
  if (auto b = o.child("backend")) {
    std::string kind(to_string(c.backend));
    b->string("kind", kind);
    if (auto k = parse_backend_kind(kind)) {
      c.backend = *k;
    } else {
      fail(ErrorKind::Config, "config.backend.kind: unknown backend \"" + kind + "\"");
    }
    if (auto m = b->child("mock")) {
      std::string mode(to_string(c.mock.mode));
      m->string("mode", mode);
      if (auto mm = parse_mock_mode(mode)) {
        c.mock.mode = *mm;
      } else {
        fail(ErrorKind::Config, "config.backend.mock.mode: unknown mode \"" + mode + "\"");
      }
      m->size("monotone_tokens", c.mock.monotone_tokens);
      c.mock.inject_ungrounded = to_set(m->strings("inject_ungrounded"));
      c.mock.fail_sections = to_set(m->strings("fail_sections"));
      m->integer("delay_ms", c.mock.delay_ms);
      m->boolean("report_logprobs", c.mock.report_logprobs);
      m->finish();
    }
    if (auto h = b->child("http")) {
      h->string("base_url", c.http.base_url);
      h->string("model", c.http.model);
      h->number("timeout_s", c.http.timeout_s);
      h->integer("retries", c.http.retries);
      h->integer("backoff_ms", c.http.backoff_ms);
      h->string("api_key_env", c.http.api_key_env);
      h->boolean("request_logprobs", c.http.request_logprobs);
      h->finish();
    }
    b->finish();
  }
  if (auto w = o.child("writer")) {
    w->string("style", c.style);
    w->number("temperature", c.decode.temperature);
    w->integer("max_tokens", c.decode.max_tokens);
    w->finish();
  }
  if (auto p = o.child("prices")) {
    p->number("prompt_per_1k", c.prices.prompt_per_1k);
    p->number("completion_per_1k", c.prices.completion_per_1k);
    p->string("currency", c.prices.currency);
    p->finish();
  }
  o.finish();
  c.load_lexicons();
  return c;
}

RunConfig RunConfig::load(const fs::path& path) {
  nlohmann::json j;
  try {
    j = read_json_file(path);
  } catch (const Error& e) {
    fail(ErrorKind::Config, std::string("cannot read config: ") + e.what());
  }
  return from_json(j, path.parent_path());
}

void RunConfig::load_lexicons() {
  auto load = [](const fs::path& p, const char* name) {
    try {
      return Lexicon::load(p);
    } catch (const Error& e) {
      fail(ErrorKind::Config, std::string("lexicon ") + name + ": " + e.what());
    }
  };
  constraints.forbidden_connectors = load(lexicons.connectors, "connectors");
  constraints.formal_lexicon = load(lexicons.formal, "formal");
  constraints.colloquial_lexicon = load(lexicons.colloquial, "colloquial");
  metrics.opinion_lexicon = load(lexicons.opinion, "opinion");
}

nlohmann::ordered_json RunConfig::to_json() const {
  using oj = nlohmann::ordered_json;
  oj j;
  j["corpus"] = corpus.generic_string();
  j["schema_dir"] = schema_dir.generic_string();
  j["runs_dir"] = runs_dir.generic_string();
  j["run_id"] = run_id;
  j["topic"] = topic;
  j["relation"] = std::string(deepnews::to_string(relation));
  j["schema_id"] = schema_id;
  j["seed"] = seed;
  j["parallelism"] = parallelism;
  j["target_output_chars"] = plan.target_output_chars;
  j["target_block_chars"] = target_block_chars;
  j["bind_top_k"] = bind_top_k;
  j["grounding_tolerance"] = constraints.grounding_tolerance;
  j["zone"] = {{"noise_max", zone.noise_max},
               {"collapse_max", zone.collapse_max},
               {"phase_min", zone.phase_min},
               {"saturation_min", zone.saturation_min},
               {"gate_mode", std::string(deepnews::to_string(zone.gate_mode))}};
  j["plan"] = {{"min_sections", plan.min_sections},
               {"max_sections", plan.max_sections},
               {"char_budget_per_section", plan.char_budget_per_section},
               {"relevance_threshold", plan.relevance_threshold},
               {"data_shock_percentile", plan.data_shock_percentile},
               {"data_shock_ratio", plan.data_shock_ratio}};
  oj tactics = oj::array();
  for (auto t : constraints.tactics) tactics.push_back(std::string(deepnews::to_string(t)));
  j["constraints"] = {{"theta_high", constraints.theta_high},
                      {"theta_low", constraints.theta_low},
                      {"lambda_rhythm", constraints.lambda_rhythm},
                      {"flatline_run", constraints.flatline_run},
                      {"flatline_band", constraints.flatline_band},
                      {"max_connector_density", constraints.max_connector_density},
                      {"lambda1", constraints.lambda1},
                      {"lambda2", constraints.lambda2},
                      {"max_regenerations", constraints.max_regenerations},
                      {"tactics", tactics}};
  j["lexicons"] = {{"connectors", lexicons.connectors.generic_string()},
                   {"formal", lexicons.formal.generic_string()},
                   {"colloquial", lexicons.colloquial.generic_string()},
                   {"opinion", lexicons.opinion.generic_string()}};
  j["metrics"] = {{"markers_per_sentence", metrics.markers_per_sentence}};
  j["backend"] = {
      {"kind", std::string(deepnews::to_string(backend))},
      {"mock",
       {{"mode", std::string(deepnews::to_string(mock.mode))},
        {"monotone_tokens", mock.monotone_tokens},
        {"inject_ungrounded", std::vector<std::string>(mock.inject_ungrounded.begin(), mock.inject_ungrounded.end())},
        {"fail_sections", std::vector<std::string>(mock.fail_sections.begin(), mock.fail_sections.end())},
        {"delay_ms", mock.delay_ms},
        {"report_logprobs", mock.report_logprobs}}},
      {"http",
       {{"base_url", http.base_url},
        {"model", http.model},
        {"timeout_s", http.timeout_s},
        {"retries", http.retries},
        {"backoff_ms", http.backoff_ms},
        {"api_key_env", http.api_key_env},
        {"request_logprobs", http.request_logprobs}}}};
  j["writer"] = {{"style", style}, {"temperature", decode.temperature}, {"max_tokens", decode.max_tokens}};
  j["prices"] = {{"prompt_per_1k", prices.prompt_per_1k},
                 {"completion_per_1k", prices.completion_per_1k},
                 {"currency", prices.currency}};
  return j;
}

void RunConfig::validate() const {
  auto check = [](bool ok, const std::string& msg) {
    if (!ok) fail(ErrorKind::Config, msg);
  };
  check(!corpus.empty(), "corpus path is required");
  check(fs::is_regular_file(corpus), "corpus file not found: " + corpus.string());
  check(!schema_dir.empty(), "schema_dir is required");
  check(fs::is_directory(schema_dir), "schema directory not found: " + schema_dir.string());
  check(!runs_dir.empty(), "runs_dir must not be empty");
  check(!text::trim(topic).empty(), "topic is required");
  check(run_id.find_first_of("/\\") == std::string::npos && run_id != "." && run_id != "..",
        "run_id must be a plain directory name");
  check(target_block_chars > 0, "target_block_chars must be > 0");
  check(bind_top_k > 0, "bind_top_k must be > 0");
  check(constraints.grounding_tolerance >= 0.0, "grounding_tolerance must be >= 0");
  check(metrics.markers_per_sentence > 0.0, "metrics.markers_per_sentence must be > 0");
  zone.validate();
  plan.validate();
  constraints.validate();
  check(mock.monotone_tokens > 0, "backend.mock.monotone_tokens must be > 0");
  check(mock.delay_ms >= 0, "backend.mock.delay_ms must be >= 0");
  if (backend == BackendKind::Http) {
    check(!http.base_url.empty(), "backend.http.base_url is required");
    check(!http.model.empty(), "backend.http.model is required");
    check(http.timeout_s > 0.0, "backend.http.timeout_s must be > 0");
    check(http.retries >= 0, "backend.http.retries must be >= 0");
    check(http.backoff_ms >= 0, "backend.http.backoff_ms must be >= 0");
  }
  check(decode.temperature >= 0.0, "writer.temperature must be >= 0");
  check(decode.max_tokens > 0, "writer.max_tokens must be > 0");
  check(!text::trim(style).empty(), "writer.style must not be empty");
  check(prices.prompt_per_1k >= 0.0 && prices.completion_per_1k >= 0.0, "prices must be >= 0");
  check(!prices.currency.empty(), "prices.currency must not be empty");
}

std::size_t RunConfig::effective_parallelism(std::size_t sections) const {
  return std::max<std::size_t>(1, parallelism == 0 ? sections : parallelism);
}

std::string RunConfig::derived_run_id() const {
  auto j = to_json();
  j.erase("run_id");
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(text::fnv1a64(j.dump())));
  return "run-" + std::string(buf, 12);
}

std::unique_ptr<GenerationBackend> make_backend(const RunConfig& config) {
  if (config.backend == BackendKind::Http) return std::make_unique<HttpBackend>(config.http);
  return std::make_unique<MockBackend>(config.mock);
}

}  // namespace deepnews
