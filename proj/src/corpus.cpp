#include "deepnews/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <regex>
#include <set>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "deepnews/error.hpp"
#include "deepnews/sentences.hpp"
#include "deepnews/text.hpp"

namespace deepnews {

std::string_view to_string(Stream s) {
  switch (s) {
    case Stream::Ecological: return "ecological";
    case Stream::Quantitative: return "quantitative";
    case Stream::Narrative: return "narrative";
  }
  return "narrative";
}

std::optional<Stream> parse_stream(std::string_view s) {
  if (s == "ecological") return Stream::Ecological;
  if (s == "quantitative") return Stream::Quantitative;
  if (s == "narrative") return Stream::Narrative;
  return std::nullopt;
}

std::string_view to_string(FactKind k) {
  switch (k) {
    case FactKind::Quantity: return "quantity";
    case FactKind::Date: return "date";
    case FactKind::Entity: return "entity";
    case FactKind::Quote: return "quote";
  }
  return "quantity";
}

std::optional<FactKind> parse_fact_kind(std::string_view s) {
  if (s == "quantity") return FactKind::Quantity;
  if (s == "date") return FactKind::Date;
  if (s == "entity") return FactKind::Entity;
  if (s == "quote") return FactKind::Quote;
  return std::nullopt;
}

std::string_view to_string(GateMode m) {
  switch (m) {
    case GateMode::Block: return "block";
    case GateMode::Warn: return "warn";
    case GateMode::Off: return "off";
  }
  return "block";
}

std::optional<GateMode> parse_gate_mode(std::string_view s) {
  if (s == "block") return GateMode::Block;
  if (s == "warn") return GateMode::Warn;
  if (s == "off") return GateMode::Off;
  return std::nullopt;
}

std::string_view to_string(Zone z) {
  switch (z) {
    case Zone::Noise: return "Noise";
    case Zone::Collapse: return "Collapse";
    case Zone::PhaseTransition: return "PhaseTransition";
    case Zone::Saturation: return "Saturation";
  }
  return "Noise";
}

std::optional<Zone> parse_zone(std::string_view s) {
  for (auto z : {Zone::Noise, Zone::Collapse, Zone::PhaseTransition, Zone::Saturation}) {
    if (to_string(z) == s) return z;
  }
  return std::nullopt;
}

std::string_view to_string(GateDecision::Verdict v) {
  switch (v) {
    case GateDecision::Verdict::Pass: return "pass";
    case GateDecision::Verdict::Warn: return "warn";
    case GateDecision::Verdict::Fail: return "fail";
  }
  return "pass";
}

std::string AtomicFact::literal() const {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, TextValue>) {
          return v.text;
        } else {
          return v.literal;
        }
      },
      value);
}

std::string AtomicFact::render() const {
  std::string out = subject;
  if (!predicate.empty()) out += (out.empty() ? "" : " | ") + predicate;
  out += " | " + literal();
  return out;
}

const SourceDocument* CorpusBundle::find_doc(std::string_view id) const {
  auto it = std::find_if(docs.begin(), docs.end(), [&](const auto& d) { return d.id == id; });
  return it == docs.end() ? nullptr : &*it;
}

const AtomicFact* CorpusBundle::find_fact(std::string_view id) const {
  auto it = std::find_if(facts.begin(), facts.end(), [&](const auto& f) { return f.id == id; });
  return it == facts.end() ? nullptr : &*it;
}

const ContextBlock* CorpusBundle::find_block(std::string_view id) const {
  auto it = std::find_if(blocks.begin(), blocks.end(), [&](const auto& b) { return b.id == id; });
  return it == blocks.end() ? nullptr : &*it;
}

void ZonePolicy::validate() const {
  if (!(noise_max <= collapse_max && collapse_max <= phase_min && phase_min <= saturation_min)) {
    fail(ErrorKind::Config, "zone policy thresholds must satisfy noise_max <= collapse_max <= phase_min <= saturation_min");
  }
}

// ---------------------------------------------------------------- ingest

namespace {

const std::regex& rfc3339() {
  static const std::regex re(R"(^\d{4}-\d{2}-\d{2}[Tt ]\d{2}:\d{2}:\d{2}(\.\d+)?([Zz]|[+-]\d{2}:\d{2})$)");
  return re;
}

std::string require_string(const nlohmann::json& obj, const char* key, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    fail(ErrorKind::Parse, "line " + std::to_string(line) + ": missing field \"" + key + "\"");
  }
  if (!it->is_string()) {
    fail(ErrorKind::Parse, "line " + std::to_string(line) + ": field \"" + key + "\" must be a string");
  }
  return it->get<std::string>();
}

}  // namespace

CorpusBundle ingest_documents(std::istream& in) {
  CorpusBundle bundle;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      fail(ErrorKind::Parse, "line " + std::to_string(line_no) + ": malformed JSON: " + e.what());
    }
    if (!obj.is_object()) fail(ErrorKind::Parse, "line " + std::to_string(line_no) + ": record must be an object");

    SourceDocument doc;
    doc.id = require_string(obj, "id", line_no);
    const auto stream = require_string(obj, "stream", line_no);
    auto parsed = parse_stream(stream);
    if (!parsed) {
      fail(ErrorKind::Parse, "line " + std::to_string(line_no) + ": unknown stream \"" + stream + "\"");
    }
    doc.stream = *parsed;
    doc.title = require_string(obj, "title", line_no);
    doc.body = require_string(obj, "body", line_no);
    doc.source_uri = require_string(obj, "source_uri", line_no);
    doc.retrieved_at = require_string(obj, "retrieved_at", line_no);
    if (!std::regex_match(doc.retrieved_at, rfc3339())) {
      fail(ErrorKind::Parse, "line " + std::to_string(line_no) + ": retrieved_at is not RFC 3339: " + doc.retrieved_at);
    }
    if (doc.id.empty()) fail(ErrorKind::Parse, "line " + std::to_string(line_no) + ": empty id");
    if (!seen.insert(doc.id).second) {
      fail(ErrorKind::Conflict, "line " + std::to_string(line_no) + ": duplicate document id \"" + doc.id + "\"");
    }
    doc.char_count = text::char_count(doc.body);
    bundle.total_chars += doc.char_count;
    bundle.docs.push_back(std::move(doc));
  }
  return bundle;
}

CorpusBundle ingest_documents(std::string_view jsonl) {
  std::istringstream in{std::string(jsonl)};
  return ingest_documents(in);
}

// ---------------------------------------------------------------- facts

namespace {

bool is_clause_delim(char32_t c) {
  return c == ',' || c == U'，' || c == ';' || c == U'；' || c == ':' || c == U'：' || c == U'、' || c == '(' ||
         c == ')' || c == U'（' || c == U'）';
}

struct SentenceSpan {
  std::size_t start;
  std::size_t end;
};

std::vector<SentenceSpan> sentence_spans(std::u32string_view body) {
  std::vector<SentenceSpan> out;
  for (const auto& s : segment_sentences(body).sentences) out.push_back({s.start, s.end});
  return out;
}

SentenceSpan sentence_of(const std::vector<SentenceSpan>& spans, std::size_t pos, std::size_t len) {
  for (const auto& s : spans) {
    if (pos >= s.start && pos < s.end) return s;
  }
  return {0, len};
}

std::string clip_tail(std::u32string_view s, std::size_t max_chars) {
  if (s.size() > max_chars) s = s.substr(s.size() - max_chars);
  return text::trim(text::encode(s));
}

std::string clip_head(std::u32string_view s, std::size_t max_chars) {
  if (s.size() > max_chars) s = s.substr(0, max_chars);
  return text::trim(text::encode(s));
}

}  // namespace

std::vector<AtomicFact> extract_atomic_facts(const SourceDocument& doc) {
  std::vector<AtomicFact> facts;
  if (doc.body.empty()) return facts;
  const std::u32string body = text::decode(doc.body);
  const auto sentences = sentence_spans(body);
  const auto mentions = scan_numeric_mentions(std::u32string_view(body));
  const auto entities = scan_entities(body);
  const auto quotes = scan_quotes(body);

  std::map<std::string, std::size_t> entity_freq;
  for (const auto& e : entities) ++entity_freq[e.name];
  std::string dominant = doc.title;
  std::size_t best = 0;
  for (const auto& e : entities) {
    if (entity_freq[e.name] > best) {
      best = entity_freq[e.name];
      dominant = e.name;
    }
  }

  struct Pending {
    std::size_t start;
    int order;
    AtomicFact fact;
  };
  std::vector<Pending> pending;

  for (std::size_t m = 0; m < mentions.size(); ++m) {
    const auto& mention = mentions[m];
    const auto sent = sentence_of(sentences, mention.span.start, body.size());

    // subject: nearest entity before the number in the sentence, else after, else the dominant entity
    const EntityMention* subject_entity = nullptr;
    for (const auto& e : entities) {
      if (e.span.start >= sent.start && e.span.end <= mention.span.start) subject_entity = &e;
    }
    if (!subject_entity) {
      for (const auto& e : entities) {
        if (e.span.start >= mention.span.end && e.span.end <= sent.end) {
          subject_entity = &e;
          break;
        }
      }
    }

    // predicate: the clause text leading up to the number
    std::size_t clause_start = sent.start;
    for (std::size_t k = mention.span.start; k > sent.start; --k) {
      if (is_clause_delim(body[k - 1])) {
        clause_start = k;
        break;
      }
    }
    if (m > 0 && mentions[m - 1].span.end > clause_start && mentions[m - 1].span.end <= mention.span.start) {
      clause_start = mentions[m - 1].span.end;
    }
    if (subject_entity && subject_entity->span.end > clause_start &&
        subject_entity->span.end <= mention.span.start) {
      clause_start = subject_entity->span.end;
    }
    std::u32string_view view(body);
    std::string predicate = clip_tail(view.substr(clause_start, mention.span.start - clause_start), 60);
    if (predicate.empty()) {
      std::size_t clause_end = mention.span.end;
      while (clause_end < sent.end && !is_clause_delim(body[clause_end])) {
        if (m + 1 < mentions.size() && clause_end >= mentions[m + 1].span.start) break;
        ++clause_end;
      }
      predicate = clip_head(view.substr(mention.span.end, clause_end - mention.span.end), 60);
      while (!predicate.empty() && (predicate.back() == '.' || predicate.back() == '!' || predicate.back() == '?')) {
        predicate.pop_back();
      }
    }

    AtomicFact f;
    f.doc_id = doc.id;
    f.subject = subject_entity ? subject_entity->name : dominant;
    f.predicate = predicate;
    f.span = mention.span;
    if (mention.kind == MentionKind::Quantity) {
      f.kind = FactKind::Quantity;
      f.value = mention.quantity;
      f.confidence = mention.quantity.unit.empty() ? 0.8 : 0.95;
    } else {
      f.kind = FactKind::Date;
      f.value = mention.date;
      f.confidence = mention.date.day != 0 ? 0.95 : 0.85;
    }
    pending.push_back({mention.span.start, 0, std::move(f)});
  }

  for (const auto& q : quotes) {
    AtomicFact f;
    f.doc_id = doc.id;
    f.kind = FactKind::Quote;
    f.subject = q.speaker;
    f.predicate = q.verb;
    f.value = TextValue{q.content};
    f.span = q.span;
    f.confidence = 0.9;
    pending.push_back({q.span.start, 1, std::move(f)});
  }

  std::set<std::string> seen_entities;
  for (const auto& e : entities) {
    if (!seen_entities.insert(e.name).second) continue;
    AtomicFact f;
    f.doc_id = doc.id;
    f.kind = FactKind::Entity;
    f.subject = e.name;
    f.predicate = "mentioned";
    f.value = TextValue{e.name};
    f.span = e.span;
    f.confidence = 0.75;
    pending.push_back({e.span.start, 2, std::move(f)});
  }

  std::stable_sort(pending.begin(), pending.end(), [](const Pending& a, const Pending& b) {
    return a.start != b.start ? a.start < b.start : a.order < b.order;
  });
  facts.reserve(pending.size());
  for (std::size_t k = 0; k < pending.size(); ++k) {
    pending[k].fact.id = doc.id + "#f" + std::to_string(k + 1);
    facts.push_back(std::move(pending[k].fact));
  }
  return facts;
}

// ---------------------------------------------------------------- blocks

namespace {

std::vector<std::string> top_keywords(std::u32string_view chunk, std::size_t k) {
  std::map<std::string, std::size_t> freq;
  std::string word;
  auto flush = [&] {
    if (word.size() >= 4) {
      const auto toks = text::keyword_tokens(word);
      if (!toks.empty()) ++freq[word];
    }
    word.clear();
  };
  for (std::size_t i = 0; i < chunk.size(); ++i) {
    const char32_t c = chunk[i];
    if (text::is_ascii_alpha(c)) {
      word.push_back(static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c));
      continue;
    }
    flush();
    if (text::is_cjk_ideograph(c) && i + 1 < chunk.size() && text::is_cjk_ideograph(chunk[i + 1])) {
      ++freq[text::encode(chunk.substr(i, 2))];
    }
  }
  flush();
  std::vector<std::pair<std::string, std::size_t>> ranked(freq.begin(), freq.end());
  std::erase_if(ranked, [](const auto& p) { return p.second < 2; });
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < ranked.size() && out.size() < k; ++i) out.push_back(ranked[i].first);
  return out;
}

}  // namespace

std::vector<ContextBlock> build_context_blocks(const std::vector<SourceDocument>& docs,
                                               std::size_t target_block_chars) {
  if (target_block_chars == 0) fail(ErrorKind::Domain, "target_block_chars must be > 0");
  std::vector<ContextBlock> blocks;
  for (const auto& doc : docs) {
    const std::u32string body = text::decode(doc.body);
    std::set<std::string> doc_tags;
    doc_tags.insert(std::string(to_string(doc.stream)));
    for (const auto& e : scan_entities(text::decode(doc.title + "\n" + doc.body))) doc_tags.insert(e.name);

    std::vector<std::u32string_view> chunks;
    std::u32string fallback;
    if (body.empty()) {
      fallback = text::decode(doc.title.empty() ? doc.id : doc.title);
      chunks.push_back(fallback);
    } else {
      for (std::size_t off = 0; off < body.size(); off += target_block_chars) {
        chunks.push_back(std::u32string_view(body).substr(off, target_block_chars));
      }
    }
    for (std::size_t k = 0; k < chunks.size(); ++k) {
      ContextBlock b;
      b.id = doc.id + "#b" + std::to_string(k + 1);
      b.doc_ids = {doc.id};
      b.gist = text::encode(chunks[k]);
      auto tags = doc_tags;
      for (auto& kw : top_keywords(chunks[k], 5)) tags.insert(std::move(kw));
      b.theme_tags.assign(tags.begin(), tags.end());
      b.char_count = chunks[k].size();
      blocks.push_back(std::move(b));
    }
  }
  return blocks;
}

CorpusBundle structure_bundle(CorpusBundle bundle, std::size_t target_block_chars) {
  bundle.facts.clear();
  for (const auto& doc : bundle.docs) {
    auto facts = extract_atomic_facts(doc);
    bundle.facts.insert(bundle.facts.end(), std::make_move_iterator(facts.begin()),
                        std::make_move_iterator(facts.end()));
  }
  bundle.blocks = build_context_blocks(bundle.docs, target_block_chars);
  return bundle;
}

// ---------------------------------------------------------------- zones

double compute_icr(long long input_chars, long long target_output_chars) {
  if (target_output_chars <= 0) fail(ErrorKind::Domain, "target_output_chars must be > 0");
  if (input_chars < 0) fail(ErrorKind::Domain, "input_chars must be >= 0");
  return static_cast<double>(input_chars) / static_cast<double>(target_output_chars);
}

Zone classify_context_zone(std::size_t total_chars, const ZonePolicy& policy) {
  if (total_chars < policy.noise_max) return Zone::Noise;
  if (total_chars < policy.phase_min) return Zone::Collapse;
  if (total_chars < policy.saturation_min) return Zone::PhaseTransition;
  return Zone::Saturation;
}

GateDecision mvc_gate(const CorpusBundle& bundle, long long target_output_chars, const ZonePolicy& policy) {
  GateDecision d;
  d.zone = classify_context_zone(bundle.total_chars, policy);
  d.icr = compute_icr(static_cast<long long>(bundle.total_chars), target_output_chars);
  const bool below = d.zone < Zone::PhaseTransition;
  std::ostringstream msg;
  msg << "context " << bundle.total_chars << " chars, zone " << to_string(d.zone) << ", ICR " << d.icr;
  if (below) msg << "; below minimum viable context of " << policy.phase_min << " chars";
  d.message = msg.str();
  if (below && policy.gate_mode == GateMode::Block) {
    d.verdict = GateDecision::Verdict::Fail;
  } else if (below && policy.gate_mode == GateMode::Warn) {
    d.verdict = GateDecision::Verdict::Warn;
  } else {
    d.verdict = GateDecision::Verdict::Pass;
  }
  return d;
}

}  // namespace deepnews
