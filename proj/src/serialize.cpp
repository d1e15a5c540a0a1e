#include "deepnews/serialize.hpp"

#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include "deepnews/error.hpp"

namespace deepnews {

namespace {

template <typename F>
auto parsing(std::string_view what, F&& f) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Parse, std::string(what) + ": " + e.what());
  }
}

ojson span_json(const Span& s) { return ojson::array({s.start, s.end}); }

Span span_from(const nlohmann::json& j) { return {j.at(0).get<std::size_t>(), j.at(1).get<std::size_t>()}; }

}  // namespace

ojson to_json(const SourceDocument& d) {
  ojson j;
  j["id"] = d.id;
  j["stream"] = std::string(to_string(d.stream));
  j["title"] = d.title;
  j["body"] = d.body;
  j["source_uri"] = d.source_uri;
  j["retrieved_at"] = d.retrieved_at;
  j["char_count"] = d.char_count;
  return j;
}

ojson to_json(const AtomicFact& f) {
  ojson j;
  j["id"] = f.id;
  j["doc_id"] = f.doc_id;
  j["kind"] = std::string(to_string(f.kind));
  j["subject"] = f.subject;
  j["predicate"] = f.predicate;
  ojson v;
  if (const auto* q = std::get_if<QuantityValue>(&f.value)) {
    v["number"] = q->number;
    v["unit"] = q->unit;
    v["base_unit"] = q->base_unit;
    v["scale"] = q->scale;
    v["literal"] = q->literal;
  } else if (const auto* d = std::get_if<DateValue>(&f.value)) {
    v["year"] = d->year;
    v["month"] = d->month;
    v["day"] = d->day;
    v["literal"] = d->literal;
  } else {
    v["text"] = std::get<TextValue>(f.value).text;
  }
  j["value"] = std::move(v);
  j["span"] = span_json(f.span);
  j["confidence"] = f.confidence;
  return j;
}

ojson to_json(const ContextBlock& b) {
  ojson j;
  j["id"] = b.id;
  j["doc_ids"] = b.doc_ids;
  j["gist"] = b.gist;
  j["theme_tags"] = b.theme_tags;
  j["char_count"] = b.char_count;
  return j;
}

ojson to_json(const CorpusBundle& b) {
  ojson j;
  j["total_chars"] = b.total_chars;
  j["docs"] = ojson::array();
  for (const auto& d : b.docs) j["docs"].push_back(to_json(d));
  j["facts"] = ojson::array();
  for (const auto& f : b.facts) j["facts"].push_back(to_json(f));
  j["blocks"] = ojson::array();
  for (const auto& x : b.blocks) j["blocks"].push_back(to_json(x));
  return j;
}

ojson to_json(const SlotBindings& b) {
  ojson j;
  j["bound"] = ojson::object();
  for (const auto& [slot, refs] : b.bound) j["bound"][slot] = refs;
  j["unbound"] = b.unbound;
  return j;
}

ojson to_json(const AtomicBlockSpec& s) {
  ojson j;
  j["block_type"] = std::string(to_string(s.type));
  j["directive"] = s.directive;
  j["evidence_refs"] = s.evidence_refs;
  j["target_chars"] = s.target_chars;
  return j;
}

ojson to_json(const Outline& o) {
  ojson j;
  j["topic"] = o.topic;
  j["schema_id"] = o.schema_id;
  j["lede"] = {{"id", std::string(to_string(o.lede.id))}, {"directive", o.lede.directive}};
  j["sections"] = ojson::array();
  for (const auto& s : o.sections) {
    ojson js;
    js["title"] = s.title;
    js["density_class"] = std::string(to_string(s.density));
    js["coerced"] = s.coerced;
    js["steps"] = s.steps;
    js["slots"] = s.slots;
    js["keywords"] = s.keywords;
    js["directives"] = s.directives;
    js["blocks"] = ojson::array();
    for (const auto& b : s.blocks) js["blocks"].push_back(to_json(b));
    ojson w;
    w["section"] = s.window.section;
    w["char_budget"] = s.window.char_budget;
    w["used_chars"] = s.window.used_chars;
    w["facts"] = ojson::array();
    for (const auto& f : s.window.facts) w["facts"].push_back(f.id);
    w["blocks"] = ojson::array();
    for (const auto& b : s.window.blocks) w["blocks"].push_back(b.id);
    js["window"] = std::move(w);
    j["sections"].push_back(std::move(js));
  }
  return j;
}

AtomicFact fact_from_json(const nlohmann::json& j) {
  return parsing("fact", [&] {
    AtomicFact f;
    f.id = j.at("id").get<std::string>();
    f.doc_id = j.at("doc_id").get<std::string>();
    const auto kind = parse_fact_kind(j.at("kind").get<std::string>());
    if (!kind) fail(ErrorKind::Parse, "fact " + f.id + ": unknown kind");
    f.kind = *kind;
    f.subject = j.at("subject").get<std::string>();
    f.predicate = j.at("predicate").get<std::string>();
    const auto& v = j.at("value");
    switch (f.kind) {
      case FactKind::Quantity:
        f.value = QuantityValue{v.at("number").get<double>(), v.at("unit").get<std::string>(),
                                v.at("base_unit").get<std::string>(), v.at("scale").get<double>(),
                                v.at("literal").get<std::string>()};
        break;
      case FactKind::Date:
        f.value = DateValue{v.at("year").get<int>(), v.at("month").get<int>(), v.at("day").get<int>(),
                            v.at("literal").get<std::string>()};
        break;
      default: f.value = TextValue{v.at("text").get<std::string>()}; break;
    }
    f.span = span_from(j.at("span"));
    f.confidence = j.at("confidence").get<double>();
    return f;
  });
}

CorpusBundle bundle_from_json(const nlohmann::json& j) {
  return parsing("bundle", [&] {
    CorpusBundle b;
    b.total_chars = j.at("total_chars").get<std::size_t>();
    for (const auto& jd : j.at("docs")) {
      SourceDocument d;
      d.id = jd.at("id").get<std::string>();
      const auto stream = parse_stream(jd.at("stream").get<std::string>());
      if (!stream) fail(ErrorKind::Parse, "document " + d.id + ": unknown stream");
      d.stream = *stream;
      d.title = jd.at("title").get<std::string>();
      d.body = jd.at("body").get<std::string>();
      d.source_uri = jd.at("source_uri").get<std::string>();
      d.retrieved_at = jd.at("retrieved_at").get<std::string>();
      d.char_count = jd.at("char_count").get<std::size_t>();
      b.docs.push_back(std::move(d));
    }
    for (const auto& jf : j.at("facts")) b.facts.push_back(fact_from_json(jf));
    for (const auto& jb : j.at("blocks")) {
      ContextBlock x;
      x.id = jb.at("id").get<std::string>();
      x.doc_ids = jb.at("doc_ids").get<std::vector<std::string>>();
      x.gist = jb.at("gist").get<std::string>();
      x.theme_tags = jb.at("theme_tags").get<std::vector<std::string>>();
      x.char_count = jb.at("char_count").get<std::size_t>();
      b.blocks.push_back(std::move(x));
    }
    return b;
  });
}

SlotBindings bindings_from_json(const nlohmann::json& j) {
  return parsing("bindings", [&] {
    SlotBindings b;
    for (const auto& [slot, refs] : j.at("bound").items()) b.bound[slot] = refs.get<std::vector<std::string>>();
    b.unbound = j.at("unbound").get<std::vector<std::string>>();
    return b;
  });
}

Outline outline_from_json(const nlohmann::json& j, const CorpusBundle& bundle) {
  return parsing("outline", [&] {
    Outline o;
    o.topic = j.at("topic").get<std::string>();
    o.schema_id = j.at("schema_id").get<std::string>();
    const auto lede = parse_lede_id(j.at("lede").at("id").get<std::string>());
    if (!lede) fail(ErrorKind::Parse, "outline: unknown lede");
    o.lede = {*lede, j.at("lede").at("directive").get<std::string>()};
    for (const auto& js : j.at("sections")) {
      Section s;
      s.title = js.at("title").get<std::string>();
      const auto density = parse_density(js.at("density_class").get<std::string>());
      if (!density) fail(ErrorKind::Parse, "outline: unknown density class");
      s.density = *density;
      s.coerced = js.value("coerced", false);
      s.steps = js.value("steps", std::vector<std::size_t>{});
      s.slots = js.value("slots", std::vector<std::string>{});
      s.keywords = js.value("keywords", std::vector<std::string>{});
      s.directives = js.value("directives", std::vector<std::string>{});
      for (const auto& jb : js.at("blocks")) {
        AtomicBlockSpec spec;
        const auto type = parse_block_type(jb.at("block_type").get<std::string>());
        if (!type) fail(ErrorKind::Parse, "outline: unknown block type");
        spec.type = *type;
        spec.directive = jb.at("directive").get<std::string>();
        spec.evidence_refs = jb.at("evidence_refs").get<std::vector<std::string>>();
        spec.target_chars = jb.at("target_chars").get<std::size_t>();
        s.blocks.push_back(std::move(spec));
      }
      const auto& w = js.at("window");
      s.window.section = w.at("section").get<std::size_t>();
      s.window.char_budget = w.at("char_budget").get<std::size_t>();
      s.window.used_chars = w.at("used_chars").get<std::size_t>();
      for (const auto& id : w.at("facts")) {
        const auto* f = bundle.find_fact(id.get<std::string>());
        if (!f) fail(ErrorKind::Parse, "outline window references unknown fact " + id.get<std::string>());
        s.window.facts.push_back(*f);
      }
      for (const auto& id : w.at("blocks")) {
        const auto* b = bundle.find_block(id.get<std::string>());
        if (!b) fail(ErrorKind::Parse, "outline window references unknown block " + id.get<std::string>());
        s.window.blocks.push_back(*b);
      }
      o.sections.push_back(std::move(s));
    }
    return o;
  });
}

std::string dump(const ojson& j) { return j.dump(2) + "\n"; }

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot read " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::Parse, path.string() + ": " + e.what());
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  static std::atomic<unsigned> counter{0};
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()) % 100000) + "_" +
         std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::Io, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) fail(ErrorKind::Io, "short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    fail(ErrorKind::Io, "cannot replace " + path.string() + ": " + ec.message());
  }
}

}  // namespace deepnews
