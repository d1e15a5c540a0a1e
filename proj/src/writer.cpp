#include "deepnews/writer.hpp"

#include "deepnews/error.hpp"
#include "deepnews/text.hpp"

namespace deepnews {

namespace {

std::string feedback_text(const std::vector<Violation>& violations) {
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) out += "\n";
    out += "- " + v.tactic + " at sentence " + std::to_string(v.location + 1) + ": " + v.detail;
  }
  return out;
}

}  // namespace

DraftSection generate_section(const Outline& outline, std::size_t index, GenerationBackend& backend,
                              const ConstraintConfig& config, std::uint64_t seed, const WriterOptions& options) {
  if (index >= outline.sections.size()) fail(ErrorKind::Generation, "no section " + std::to_string(index));
  const auto& section = outline.sections[index];
  const auto& tmpl = options.prompt_template ? *options.prompt_template : default_section_template();

  std::optional<DraftSection> best;
  TokenUsage usage;
  std::string feedback;
  std::size_t attempt = 0;
  for (; attempt <= config.max_regenerations; ++attempt) {
    const auto attempt_seed = attempt == 0 ? seed : text::mix_seed(seed, attempt);
    DraftSection candidate;
    candidate.section = index;
    candidate.title = section.title;
    candidate.seed = attempt_seed;
    candidate.model_id = backend.model_id();
    std::optional<double> logprob;
    for (std::size_t k = 0; k < section.blocks.size(); ++k) {
      PromptRequest req;
      req.spec = &section.blocks[k];
      req.window = &section.window;
      req.schema_id = outline.schema_id;
      req.tactics = config.tactics;
      req.style = options.style;
      req.section_name = section.title;
      req.block_index = k + 1;
      req.block_count = section.blocks.size();
      if (index == 0 && k == 0) req.lede_directive = outline.lede.directive;
      req.feedback = feedback;
      const auto prompt = render_prompt(req, config, tmpl);

      Completion c;
      try {
        c = backend.complete(prompt, options.decode, text::mix_seed(attempt_seed, 1000 + k));
      } catch (const Error& e) {
        fail(ErrorKind::Generation, "section " + std::to_string(index + 1) + " \"" + section.title + "\", attempt " +
                                        std::to_string(attempt + 1) + ", block " + std::to_string(k + 1) + ": " +
                                        e.what() + " (" + std::to_string(attempt) + " complete attempts discarded)");
      }
      usage += c.usage;
      if (c.total_logprob) logprob = logprob.value_or(0.0) + *c.total_logprob;

      const auto body = text::trim(c.text);
      if (!candidate.text.empty()) candidate.text += "\n\n";
      const auto start = text::char_count(candidate.text);
      candidate.text += body;
      candidate.blocks.push_back({section.blocks[k].type, start, start + text::char_count(body)});
    }
    if (!backend.capabilities().returns_token_logprobs) logprob.reset();
    candidate.violations = validate_all(candidate.text, config);
    candidate.score = score_candidate(candidate.text, section.window, logprob, config);
    candidate.flagged = !candidate.violations.empty();
    const bool clean = candidate.violations.empty();
    feedback = feedback_text(candidate.violations);
    if (!best || candidate.score.total < best->score.total) best = std::move(candidate);
    if (clean) {
      ++attempt;
      break;
    }
  }
  best->attempts = attempt;
  best->usage = usage;
  return *best;
}

double PriceTable::cost(const TokenUsage& usage) const {
  return static_cast<double>(usage.prompt_tokens) / 1000.0 * prompt_per_1k +
         static_cast<double>(usage.completion_tokens) / 1000.0 * completion_per_1k;
}

std::string transition_sentence(const std::string& next_title) {
  static constexpr std::string_view kTemplates[] = {
      "The focus shifts to {}.", "Attention turns to {}.", "Next comes {}.", "The story moves on to {}.",
  };
  std::string title;
  for (auto c : text::decode(next_title)) {
    if (!text::is_ascii_digit(c)) title += text::encode(c);
  }
  title = text::trim(title);
  std::string out(kTemplates[text::fnv1a64(title) % std::size(kTemplates)]);
  out.replace(out.find("{}"), 2, title.empty() ? "the next part" : title);
  return out;
}

Article assemble_article(const Outline& outline, const std::vector<DraftSection>& sections, const CorpusBundle& bundle,
                         const PriceTable& prices, double tolerance) {
  if (sections.size() != outline.sections.size()) {
    fail(ErrorKind::Assembly, "expected " + std::to_string(outline.sections.size()) + " sections, got " +
                                  std::to_string(sections.size()));
  }
  Article a;
  a.topic = outline.topic;
  a.schema_id = outline.schema_id;
  a.currency = prices.currency;
  for (std::size_t i = 0; i < sections.size(); ++i) {
    const auto& d = sections[i];
    if (d.section != i || d.title != outline.sections[i].title) {
      fail(ErrorKind::Assembly, "missing section " + std::to_string(i + 1) + " \"" + outline.sections[i].title + "\"");
    }
    a.titles.push_back(d.title);
    a.section_texts.push_back(d.text);
    a.transitions.push_back(i == 0 ? "" : transition_sentence(d.title));
    if (i > 0) a.text += "\n\n" + a.transitions.back() + "\n\n";
    a.text += d.text;
    for (const auto& b : d.blocks) a.paragraph_types.push_back(b.type);
    a.seeds.push_back(d.seed);
    a.usage += d.usage;
    if (a.model_id.empty()) a.model_id = d.model_id;
    if (d.flagged) a.flagged_sections.push_back(d.title);
  }
  for (auto& c : hallucination_check(a.text, bundle.facts, tolerance).claims) {
    a.claim_provenance.push_back({c.text, c.mention.span, c.grounding.value_or(std::string(kUngrounded))});
  }
  a.cost = prices.cost(a.usage);
  return a;
}

std::string Article::markdown() const {
  std::string out = "# " + (topic.empty() ? schema_id : topic) + "\n";
  for (std::size_t i = 0; i < section_texts.size(); ++i) {
    out += "\n## " + titles[i] + "\n\n";
    if (!transitions[i].empty()) out += transitions[i] + "\n\n";
    out += section_texts[i] + "\n";
  }
  return out;
}

nlohmann::ordered_json to_json(const DraftSection& d) {
  nlohmann::ordered_json j;
  j["section"] = d.section;
  j["title"] = d.title;
  j["text"] = d.text;
  j["blocks"] = nlohmann::ordered_json::array();
  for (const auto& b : d.blocks) {
    j["blocks"].push_back({{"block_type", std::string(to_string(b.type))}, {"span", {b.start, b.end}}});
  }
  j["violations"] = nlohmann::ordered_json::array();
  for (const auto& v : d.violations) j["violations"].push_back(to_json(v));
  j["score"] = to_json(d.score);
  j["attempts"] = d.attempts;
  j["seed"] = d.seed;
  j["flagged"] = d.flagged;
  j["token_usage"] = {{"prompt_tokens", d.usage.prompt_tokens}, {"completion_tokens", d.usage.completion_tokens}};
  j["model_id"] = d.model_id;
  return j;
}

DraftSection draft_from_json(const nlohmann::json& j) {
  DraftSection d;
  try {
    d.section = j.at("section").get<std::size_t>();
    d.title = j.at("title").get<std::string>();
    d.text = j.at("text").get<std::string>();
    for (const auto& b : j.at("blocks")) {
      const auto type = parse_block_type(b.at("block_type").get<std::string>());
      if (!type) fail(ErrorKind::Parse, "draft section: unknown block type");
      d.blocks.push_back({*type, b.at("span").at(0).get<std::size_t>(), b.at("span").at(1).get<std::size_t>()});
    }
    for (const auto& v : j.at("violations")) {
      d.violations.push_back(
          {v.at("tactic").get<std::string>(), v.at("location").get<std::size_t>(), v.at("detail").get<std::string>()});
    }
    const auto& s = j.at("score");
    d.score = {s.at("nll").get<double>(), s.at("hallucination_penalty").get<std::size_t>(),
               s.at("burstiness").get<double>(), s.at("total").get<double>()};
    d.attempts = j.at("attempts").get<std::size_t>();
    d.seed = j.at("seed").get<std::uint64_t>();
    d.flagged = j.at("flagged").get<bool>();
    d.usage.prompt_tokens = j.at("token_usage").at("prompt_tokens").get<long long>();
    d.usage.completion_tokens = j.at("token_usage").at("completion_tokens").get<long long>();
    d.model_id = j.value("model_id", "");
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Parse, std::string("draft section: ") + e.what());
  }
  return d;
}

nlohmann::ordered_json to_json(const Article& a) {
  nlohmann::ordered_json j;
  j["topic"] = a.topic;
  j["schema_id"] = a.schema_id;
  j["sections"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < a.section_texts.size(); ++i) {
    j["sections"].push_back({{"title", a.titles[i]}, {"transition", a.transitions[i]}, {"text", a.section_texts[i]}});
  }
  j["text"] = a.text;
  j["paragraph_types"] = nlohmann::ordered_json::array();
  for (auto t : a.paragraph_types) j["paragraph_types"].push_back(std::string(to_string(t)));
  j["claim_provenance"] = nlohmann::ordered_json::array();
  for (const auto& c : a.claim_provenance) {
    j["claim_provenance"].push_back({{"claim", c.claim}, {"span", {c.span.start, c.span.end}}, {"grounding", c.grounding}});
  }
  nlohmann::ordered_json meta;
  meta["model_id"] = a.model_id;
  meta["seeds"] = a.seeds;
  meta["token_usage"] = {{"prompt_tokens", a.usage.prompt_tokens},
                         {"completion_tokens", a.usage.completion_tokens},
                         {"total_tokens", a.usage.total()}};
  meta["cost"] = a.cost;
  meta["currency"] = a.currency;
  meta["flagged_sections"] = a.flagged_sections;
  j["metadata"] = std::move(meta);
  return j;
}

Article article_from_json(const nlohmann::json& j) {
  Article a;
  try {
    a.topic = j.at("topic").get<std::string>();
    a.schema_id = j.at("schema_id").get<std::string>();
    for (const auto& s : j.at("sections")) {
      a.titles.push_back(s.at("title").get<std::string>());
      a.transitions.push_back(s.at("transition").get<std::string>());
      a.section_texts.push_back(s.at("text").get<std::string>());
    }
    a.text = j.at("text").get<std::string>();
    for (const auto& t : j.at("paragraph_types")) {
      const auto type = parse_block_type(t.get<std::string>());
      if (!type) fail(ErrorKind::Parse, "article: unknown paragraph type " + t.get<std::string>());
      a.paragraph_types.push_back(*type);
    }
    for (const auto& c : j.at("claim_provenance")) {
      a.claim_provenance.push_back({c.at("claim").get<std::string>(),
                                    {c.at("span").at(0).get<std::size_t>(), c.at("span").at(1).get<std::size_t>()},
                                    c.at("grounding").get<std::string>()});
    }
    const auto& meta = j.at("metadata");
    a.model_id = meta.at("model_id").get<std::string>();
    a.seeds = meta.at("seeds").get<std::vector<std::uint64_t>>();
    a.usage.prompt_tokens = meta.at("token_usage").at("prompt_tokens").get<long long>();
    a.usage.completion_tokens = meta.at("token_usage").at("completion_tokens").get<long long>();
    a.cost = meta.at("cost").get<double>();
    a.currency = meta.at("currency").get<std::string>();
    a.flagged_sections = meta.at("flagged_sections").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Parse, std::string("article: ") + e.what());
  }
  return a;
}

}  // namespace deepnews
