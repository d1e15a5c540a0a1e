#include "deepnews/schema.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "deepnews/error.hpp"
#include "deepnews/text.hpp"

namespace deepnews {

const std::vector<CategoryInfo>& category_table() {
  static const std::vector<CategoryInfo> table = {
      {Category::S1Blind, "S1-BLIND", "Market Blind Spots in Major Events", 3},
      {Category::S2VGame, "S2-VGAME", "Vertical Market Game Theory", 5},
      {Category::S3Single, "S3-SINGLE", "Interpretation of Single-Entity Corporate Actions", 2},
      {Category::S4HGame, "S4-HGAME", "Horizontal Market Game Theory", 4},
      {Category::S5Indus, "S5-INDUS", "Game Theory with the Industry", 4},
  };
  return table;
}

const CategoryInfo& info(Category c) {
  for (const auto& row : category_table()) {
    if (row.category == c) return row;
  }
  return category_table().front();
}

std::optional<Category> category_from_id(std::string_view schema_id) {
  for (const auto& row : category_table()) {
    if (schema_id.rfind(row.prefix, 0) == 0 &&
        (schema_id.size() == row.prefix.size() || schema_id[row.prefix.size()] == '-')) {
      return row.category;
    }
  }
  return std::nullopt;
}

std::string_view to_string(EvidenceKind k) {
  switch (k) {
    case EvidenceKind::Quantity: return "quantity";
    case EvidenceKind::Date: return "date";
    case EvidenceKind::Entity: return "entity";
    case EvidenceKind::Quote: return "quote";
    case EvidenceKind::Block: return "block";
  }
  return "block";
}

std::optional<EvidenceKind> parse_evidence_kind(std::string_view s) {
  if (s == "quantity") return EvidenceKind::Quantity;
  if (s == "date") return EvidenceKind::Date;
  if (s == "entity") return EvidenceKind::Entity;
  if (s == "quote") return EvidenceKind::Quote;
  if (s == "block") return EvidenceKind::Block;
  return std::nullopt;
}

std::string SchemaStep::title() const { return label.empty() ? text::humanize_identifier(name) : label; }

const SlotDecl* Schema::find_slot(std::string_view name) const {
  for (const auto& step : steps) {
    for (const auto& slot : step.slots) {
      if (slot.name == name) return &slot;
    }
  }
  return nullptr;
}

std::vector<SlotDecl> Schema::all_slots() const {
  std::vector<SlotDecl> out;
  for (const auto& step : steps) out.insert(out.end(), step.slots.begin(), step.slots.end());
  return out;
}

namespace {

void add_tokens(std::set<std::string>& into, std::string_view s) {
  auto toks = text::keyword_tokens(s);
  into.insert(toks.begin(), toks.end());
}

void add_directive(std::set<std::string>& into, const Directive& d) {
  add_tokens(into, d.key);
  add_tokens(into, d.label);
  add_tokens(into, d.detail);
  for (const auto& a : d.alternatives) add_tokens(into, a);
  for (const auto& f : d.fields) {
    if (f.key == "Expects" || f.key == "Required") continue;
    add_directive(into, f);
  }
}

}  // namespace

std::set<std::string> Schema::slot_keywords(std::string_view slot) const {
  std::set<std::string> out;
  for (const auto& step : steps) {
    for (const auto& d : step.directives) {
      if (d.key == slot) add_directive(out, d);
    }
    if (step.name == slot) {
      add_tokens(out, step.name);
      add_tokens(out, step.label);
      if (step.options) {
        for (const auto& o : *step.options) {
          add_tokens(out, o.name);
          add_tokens(out, o.label);
          add_tokens(out, o.detail);
        }
      }
    }
  }
  return out;
}

std::set<std::string> Schema::keywords() const {
  std::set<std::string> out;
  add_tokens(out, title);
  for (const auto& step : steps) {
    for (const auto& d : step.directives) add_directive(out, d);
  }
  return out;
}

// ---------------------------------------------------------------- registry

SchemaRegistry::SchemaRegistry(std::vector<Schema> schemas) : schemas_(std::move(schemas)) {
  std::sort(schemas_.begin(), schemas_.end(), [](const Schema& a, const Schema& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < schemas_.size(); ++i) {
    if (schemas_[i].id == schemas_[i - 1].id) fail(ErrorKind::Conflict, "duplicate schema id " + schemas_[i].id);
  }
}

SchemaRegistry SchemaRegistry::load_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) fail(ErrorKind::Io, "schema directory not found: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const auto ext = entry.path().extension();
    if (entry.is_regular_file() && (ext == ".yaml" || ext == ".yml" || ext == ".sdl")) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<Schema> schemas;
  for (const auto& path : files) {
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    const auto stem = path.stem().string();
    Schema s;
    try {
      s = parse_sdl(buf.str(), stem);
    } catch (const Error& e) {
      throw Error(e.kind(), path.filename().string() + ": " + e.what());
    }
    if (s.id != stem) {
      fail(ErrorKind::Validation, path.filename().string() + ": file name must equal schema id " + s.id);
    }
    schemas.push_back(std::move(s));
  }
  SchemaRegistry registry(std::move(schemas));

  const auto index = dir / "index.json";
  if (std::filesystem::exists(index)) {
    std::ifstream in(index);
    nlohmann::json manifest;
    try {
      manifest = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      fail(ErrorKind::Parse, "index.json: " + std::string(e.what()));
    }
    for (const auto& entry : manifest.value("schemas", nlohmann::json::array())) {
      const auto id = entry.value("id", std::string());
      const auto* s = registry.find(id);
      if (!s) fail(ErrorKind::Validation, "index.json lists missing schema " + id);
      if (entry.value("category", std::string()) != info(s->category).prefix) {
        fail(ErrorKind::Validation, "index.json category mismatch for " + id);
      }
    }
  }
  return registry;
}

const Schema* SchemaRegistry::find(std::string_view id) const {
  for (const auto& s : schemas_) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

// ---------------------------------------------------------------- selection

std::string_view to_string(Relation r) {
  switch (r) {
    case Relation::Vertical: return "vertical";
    case Relation::Horizontal: return "horizontal";
    case Relation::Single: return "single";
    case Relation::Industry: return "industry";
    case Relation::Blindspot: return "blindspot";
  }
  return "vertical";
}

std::optional<Relation> parse_relation(std::string_view s) {
  if (s == "vertical") return Relation::Vertical;
  if (s == "horizontal") return Relation::Horizontal;
  if (s == "single") return Relation::Single;
  if (s == "industry") return Relation::Industry;
  if (s == "blindspot") return Relation::Blindspot;
  return std::nullopt;
}

Category category_for(Relation r) {
  switch (r) {
    case Relation::Vertical: return Category::S2VGame;
    case Relation::Horizontal: return Category::S4HGame;
    case Relation::Single: return Category::S3Single;
    case Relation::Industry: return Category::S5Indus;
    case Relation::Blindspot: return Category::S1Blind;
  }
  return Category::S2VGame;
}

TopicProfile TopicProfile::from_text(std::string_view topic, Relation relation) {
  return TopicProfile{text::keyword_tokens(topic), relation};
}

const Schema& select_schema(const SchemaRegistry& registry, const TopicProfile& profile) {
  const Category wanted = category_for(profile.relation);
  const Schema* best = nullptr;
  std::size_t best_score = 0;
  std::set<std::string> topic;
  for (const auto& k : profile.keywords) add_tokens(topic, k);
  for (const auto& s : registry.schemas()) {  // sorted by id, so ties keep the smaller id
    if (s.category != wanted) continue;
    const auto score = text::overlap(topic, s.keywords());
    if (!best || score > best_score) {
      best = &s;
      best_score = score;
    }
  }
  if (!best) {
    std::set<std::string> available;
    for (const auto& s : registry.schemas()) available.insert(std::string(info(s.category).prefix));
    std::string list;
    for (const auto& a : available) list += (list.empty() ? "" : ", ") + a;
    fail(ErrorKind::NotFound, "no schema in category " + std::string(info(wanted).prefix) +
                                  "; available categories: [" + list + "]");
  }
  return *best;
}

// ---------------------------------------------------------------- binding

std::set<std::string> evidence_tokens(const AtomicFact& fact) {
  std::set<std::string> out;
  add_tokens(out, fact.subject);
  add_tokens(out, fact.predicate);
  if (fact.kind == FactKind::Quote || fact.kind == FactKind::Entity) add_tokens(out, fact.literal());
  return out;
}

std::set<std::string> evidence_tokens(const ContextBlock& block) {
  std::set<std::string> out;
  add_tokens(out, block.gist);
  for (const auto& t : block.theme_tags) add_tokens(out, t);
  return out;
}

namespace {

bool kind_matches(EvidenceKind want, FactKind have) {
  switch (want) {
    case EvidenceKind::Quantity: return have == FactKind::Quantity;
    case EvidenceKind::Date: return have == FactKind::Date;
    case EvidenceKind::Entity: return have == FactKind::Entity;
    case EvidenceKind::Quote: return have == FactKind::Quote;
    case EvidenceKind::Block: return false;
  }
  return false;
}

}  // namespace

SlotBindings bind_slots(const Schema& schema, const CorpusBundle& bundle, std::size_t top_k) {
  SlotBindings out;
  struct Candidate {
    std::size_t score;
    std::size_t order;
    std::string id;
  };
  for (const auto& slot : schema.all_slots()) {
    const auto keywords = schema.slot_keywords(slot.name);
    std::vector<Candidate> candidates;
    if (slot.expected == EvidenceKind::Block) {
      for (std::size_t i = 0; i < bundle.blocks.size(); ++i) {
        const auto score = text::overlap(keywords, evidence_tokens(bundle.blocks[i]));
        if (score > 0) candidates.push_back({score, i, bundle.blocks[i].id});
      }
    } else {
      for (std::size_t i = 0; i < bundle.facts.size(); ++i) {
        const auto& f = bundle.facts[i];
        if (!kind_matches(slot.expected, f.kind)) continue;
        const auto score = text::overlap(keywords, evidence_tokens(f));
        if (score > 0) candidates.push_back({score, i, f.id});
      }
    }
    std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
      return a.score != b.score ? a.score > b.score : a.order < b.order;
    });
    if (candidates.empty()) {
      if (slot.required) out.unbound.push_back(slot.name);
      continue;
    }
    auto& refs = out.bound[slot.name];
    for (std::size_t k = 0; k < candidates.size() && k < top_k; ++k) refs.push_back(candidates[k].id);
  }
  return out;
}

}  // namespace deepnews
