#include "deepnews/planner.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>
#include <tuple>

#include "deepnews/error.hpp"
#include "deepnews/text.hpp"

namespace deepnews {

// ---------------------------------------------------------------- enums

std::string_view to_string(LedeId id) {
  switch (id) {
    case LedeId::ContradictionParadox: return "ContradictionParadox";
    case LedeId::DramaticOpening: return "DramaticOpening";
    case LedeId::DataShock: return "DataShock";
    case LedeId::SceneCutIn: return "SceneCutIn";
    case LedeId::QuestionHook: return "QuestionHook";
    case LedeId::TimelineCountdown: return "TimelineCountdown";
  }
  return "DramaticOpening";
}

std::optional<LedeId> parse_lede_id(std::string_view s) {
  for (const auto& b : lede_blueprints()) {
    if (to_string(b.id) == s) return b.id;
  }
  return std::nullopt;
}

const std::array<LedeBlueprint, 6>& lede_blueprints() {
  static const std::array<LedeBlueprint, 6> table = {{
      {LedeId::ContradictionParadox,
       "Open on the two facts that pull against each other for the same company; state both figures and let the "
       "tension stand unresolved."},
      {LedeId::DramaticOpening, "Open on the single most consequential development, stated plainly in one short "
                                "sentence before any context."},
      {LedeId::DataShock, "Open on the outlier figure exactly as sourced and set it beside the ordinary range it "
                          "breaks."},
      {LedeId::SceneCutIn, "Open inside a concrete scene built from the quoted voice; hold the numbers back until "
                           "the second paragraph."},
      {LedeId::QuestionHook, "Open with the open question a participant raised and withhold the answer."},
      {LedeId::TimelineCountdown, "Open on the sequence of dated events in order, closing on the nearest deadline."},
  }};
  return table;
}

const LedeBlueprint& lede_blueprint(LedeId id) {
  for (const auto& b : lede_blueprints()) {
    if (b.id == id) return b;
  }
  return lede_blueprints()[1];
}

std::string_view to_string(BlockType t) {
  switch (t) {
    case BlockType::DataAnchor: return "DataAnchor";
    case BlockType::NarrativeCutIn: return "NarrativeCutIn";
    case BlockType::DeepInsight: return "DeepInsight";
    case BlockType::Conflict: return "Conflict";
  }
  return "DataAnchor";
}

std::optional<BlockType> parse_block_type(std::string_view s) {
  for (auto t : kAllBlockTypes) {
    if (to_string(t) == s) return t;
  }
  return std::nullopt;
}

std::string_view to_string(Density d) { return d == Density::HighDensity ? "HighDensity" : "LowDensity"; }

std::optional<Density> parse_density(std::string_view s) {
  if (s == "HighDensity") return Density::HighDensity;
  if (s == "LowDensity") return Density::LowDensity;
  return std::nullopt;
}

void PlanConfig::validate() const {
  if (min_sections < 3) fail(ErrorKind::Config, "min_sections must be >= 3");
  if (max_sections < min_sections) fail(ErrorKind::Config, "max_sections must be >= min_sections");
  if (char_budget_per_section == 0) fail(ErrorKind::Config, "char_budget_per_section must be > 0");
  if (!(data_shock_percentile > 0.0 && data_shock_percentile <= 1.0)) {
    fail(ErrorKind::Config, "data_shock_percentile must lie in (0, 1]");
  }
  if (!(data_shock_ratio >= 1.0)) fail(ErrorKind::Config, "data_shock_ratio must be >= 1");
  if (target_output_chars == 0) fail(ErrorKind::Config, "target_output_chars must be > 0");
}

// ---------------------------------------------------------------- windows

bool ContextWindow::contains(std::string_view id) const { return find_fact(id) || find_block(id); }

const AtomicFact* ContextWindow::find_fact(std::string_view id) const {
  for (const auto& f : facts) {
    if (f.id == id) return &f;
  }
  return nullptr;
}

const ContextBlock* ContextWindow::find_block(std::string_view id) const {
  for (const auto& b : blocks) {
    if (b.id == id) return &b;
  }
  return nullptr;
}

std::vector<std::string> ContextWindow::item_ids() const {
  std::vector<std::string> out;
  for (const auto& f : facts) out.push_back(f.id);
  for (const auto& b : blocks) out.push_back(b.id);
  return out;
}

std::size_t window_chars(const AtomicFact& fact) { return text::char_count(fact.render()); }
std::size_t window_chars(const ContextBlock& block) { return block.char_count; }

// ---------------------------------------------------------------- lede

namespace {

const std::set<std::string>& rise_words() {
  static const std::set<std::string> s = {"up",     "rise",     "rises",  "rose",    "risen",   "rising",
                                          "increase", "increased", "increases", "grow", "grows", "grew",
                                          "growth", "surge",    "surged", "jump",    "jumped",  "climb",
                                          "climbed", "gain",    "gained", "soar",    "soared",  "higher",
                                          "expand", "expanded"};
  return s;
}

const std::set<std::string>& fall_words() {
  static const std::set<std::string> s = {"down",      "fall",    "falls",    "fell",   "fallen",  "decline",
                                          "declined",  "drop",    "dropped",  "decrease", "decreased", "shrink",
                                          "shrank",    "slump",   "slumped",  "plunge", "plunged", "lower",
                                          "cut",       "cuts",    "slid",     "slide",  "contract", "contracted"};
  return s;
}

// Metrics where a rise is bad news.
const std::set<std::string>& adverse_words() {
  static const std::set<std::string> s = {"layoff", "layoffs", "loss",     "losses",  "debt",   "debts",
                                          "cost",   "costs",   "default",  "defaults", "churn", "unemployment",
                                          "delay",  "delays",  "writedown", "impairment", "arrears"};
  return s;
}

constexpr std::string_view kCjkRise[] = {"增长", "上涨", "上升", "提升", "增加", "攀升", "大涨", "扩大"};
constexpr std::string_view kCjkFall[] = {"下降", "下跌", "减少", "下滑", "暴跌", "缩减", "萎缩", "收缩"};
constexpr std::string_view kCjkAdverse[] = {"裁员", "亏损", "债务", "成本", "违约", "负债", "欠款"};

std::vector<std::string> latin_words(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (std::isalpha(static_cast<unsigned char>(c))) {
      cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

double percentile(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  if (v.size() == 1) return v.front();
  const double pos = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (v[hi] - v[lo]) * (pos - static_cast<double>(lo));
}

}  // namespace

int trend_polarity(const AtomicFact& fact) {
  if (fact.kind != FactKind::Quantity) return 0;
  int direction = 0;
  bool adverse = false;
  for (const auto& w : latin_words(fact.predicate)) {
    if (rise_words().count(w)) direction = 1;
    if (fall_words().count(w)) direction = -1;
    if (adverse_words().count(w)) adverse = true;
  }
  for (auto w : kCjkRise) {
    if (fact.predicate.find(w) != std::string::npos) direction = 1;
  }
  for (auto w : kCjkFall) {
    if (fact.predicate.find(w) != std::string::npos) direction = -1;
  }
  for (auto w : kCjkAdverse) {
    if (fact.predicate.find(w) != std::string::npos) adverse = true;
  }
  const auto& q = std::get<QuantityValue>(fact.value);
  if (q.number < 0) direction = -direction;
  return adverse ? -direction : direction;
}

LedeBlueprint select_lede(const Outline& draft, const CorpusBundle& bundle, const PlanConfig& config) {
  std::map<std::string, std::set<int>> trends;
  std::map<std::string, std::vector<double>> magnitudes;
  std::set<std::tuple<int, int, int>> dates;
  for (const auto& f : bundle.facts) {
    if (f.kind == FactKind::Quantity) {
      const auto& q = std::get<QuantityValue>(f.value);
      if (const int p = trend_polarity(f); p != 0) trends[f.subject].insert(p);
      magnitudes[q.base_unit].push_back(std::fabs(q.scaled()));
    } else if (f.kind == FactKind::Date) {
      const auto& d = std::get<DateValue>(f.value);
      if (d.day != 0) dates.insert({d.year, d.month, d.day});
    }
  }
  for (const auto& [subject, signs] : trends) {
    if (signs.size() == 2) return lede_blueprint(LedeId::ContradictionParadox);
  }
  for (auto& [unit, values] : magnitudes) {
    if (values.size() < 4) continue;
    auto it = std::max_element(values.begin(), values.end());
    const double peak = *it;
    values.erase(it);
    const double threshold = percentile(values, config.data_shock_percentile);
    if (threshold > 0.0 && peak > config.data_shock_ratio * threshold) return lede_blueprint(LedeId::DataShock);
  }
  if (dates.size() >= 3) return lede_blueprint(LedeId::TimelineCountdown);
  if (!draft.sections.empty() && draft.sections.front().density == Density::LowDensity) {
    for (const auto& spec : draft.sections.front().blocks) {
      for (const auto& ref : spec.evidence_refs) {
        const auto* f = bundle.find_fact(ref);
        if (f && f->kind == FactKind::Quote) return lede_blueprint(LedeId::SceneCutIn);
      }
    }
  }
  for (const auto& f : bundle.facts) {
    if (f.kind != FactKind::Quote) continue;
    const auto t = text::trim(f.literal());
    if ((!t.empty() && t.back() == '?') || (t.size() >= 3 && t.compare(t.size() - 3, 3, "？") == 0)) {
      return lede_blueprint(LedeId::QuestionHook);
    }
  }
  return lede_blueprint(LedeId::DramaticOpening);
}

// ---------------------------------------------------------------- pacing

namespace {

Density other(Density d) { return d == Density::HighDensity ? Density::LowDensity : Density::HighDensity; }

Density pattern_at(Density first, std::size_t i) { return i % 2 == 0 ? first : other(first); }

std::size_t mismatches(const std::vector<Density>& v, Density first) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < v.size(); ++i) n += v[i] != pattern_at(first, i);
  return n;
}

// Alternating pattern closest to `v`; ties go to the one matching v[0].
Density nearest_start(const std::vector<Density>& v) {
  const auto a = mismatches(v, v.front());
  const auto b = mismatches(v, other(v.front()));
  return b < a ? other(v.front()) : v.front();
}

}  // namespace

PacingPlan plan_pacing(const std::vector<Density>& classes, PacingMode mode) {
  PacingPlan plan;
  const auto n = classes.size();
  plan.order.resize(n);
  for (std::size_t i = 0; i < n; ++i) plan.order[i] = i;
  plan.classes = classes;
  if (n == 0) return plan;

  const auto highs = static_cast<std::size_t>(std::count(classes.begin(), classes.end(), Density::HighDensity));
  const auto lows = n - highs;
  const bool feasible = (highs > lows ? highs - lows : lows - highs) <= 1;

  if (mode == PacingMode::Reorder && feasible) {
    Density first = classes.front();
    if (highs != lows) {
      first = highs > lows ? Density::HighDensity : Density::LowDensity;
    } else if (mismatches(classes, other(first)) < mismatches(classes, first)) {
      first = other(first);
    }
    std::vector<std::size_t> want_high_got_low;
    std::vector<std::size_t> want_low_got_high;
    for (std::size_t i = 0; i < n; ++i) {
      const auto want = pattern_at(first, i);
      if (want == classes[i]) continue;
      (want == Density::HighDensity ? want_high_got_low : want_low_got_high).push_back(i);
    }
    for (std::size_t k = 0; k < want_high_got_low.size(); ++k) {
      std::swap(plan.order[want_high_got_low[k]], plan.order[want_low_got_high[k]]);
      ++plan.swaps;
    }
    for (std::size_t i = 0; i < n; ++i) plan.classes[i] = classes[plan.order[i]];
    return plan;
  }

  const auto first = nearest_start(classes);
  for (std::size_t i = 0; i < n; ++i) {
    const auto want = pattern_at(first, i);
    if (classes[i] != want) {
      plan.classes[i] = want;
      plan.coerced.push_back(i);
    }
  }
  return plan;
}

std::vector<Section> enforce_pacing(std::vector<Section> sections, PacingMode mode) {
  std::vector<Density> classes;
  for (const auto& s : sections) classes.push_back(s.density);
  const auto plan = plan_pacing(classes, mode);
  std::vector<Section> out;
  out.reserve(sections.size());
  for (auto idx : plan.order) out.push_back(std::move(sections[idx]));
  for (auto pos : plan.coerced) {
    auto& s = out[pos];
    s.directives.push_back("pacing: coerced from " + std::string(to_string(s.density)) + " to " +
                           std::string(to_string(plan.classes[pos])));
    s.density = plan.classes[pos];
    s.coerced = true;
  }
  return out;
}

// ---------------------------------------------------------------- blocks

namespace {

std::string_view block_directive(BlockType t) {
  switch (t) {
    case BlockType::DataAnchor:
      return "Lay down the figures exactly as sourced, each tied to its company and period.";
    case BlockType::NarrativeCutIn:
      return "Render a concrete scene or voice from the evidence; keep figures sparse.";
    case BlockType::DeepInsight:
      return "Draw the inference the evidence supports and leave the reasoning steps implicit.";
    case BlockType::Conflict:
      return "Set the competing positions against each other without declaring a winner.";
  }
  return "";
}

struct Evidence {
  std::vector<std::string> quantities, dates, quotes, entities, blocks;
};

Evidence collect_evidence(const Section& section, const SlotBindings& bindings, const CorpusBundle& bundle) {
  Evidence ev;
  std::set<std::string> seen;
  for (const auto& slot : section.slots) {
    auto it = bindings.bound.find(slot);
    if (it == bindings.bound.end()) continue;
    for (const auto& ref : it->second) {
      if (!seen.insert(ref).second) continue;
      if (const auto* f = bundle.find_fact(ref)) {
        switch (f->kind) {
          case FactKind::Quantity: ev.quantities.push_back(ref); break;
          case FactKind::Date: ev.dates.push_back(ref); break;
          case FactKind::Quote: ev.quotes.push_back(ref); break;
          case FactKind::Entity: ev.entities.push_back(ref); break;
        }
      } else if (bundle.find_block(ref)) {
        ev.blocks.push_back(ref);
      } else {
        fail(ErrorKind::Decomposition, "slot " + slot + " references unknown evidence " + ref);
      }
    }
  }
  return ev;
}

std::vector<std::string> concat(std::initializer_list<const std::vector<std::string>*> parts) {
  std::vector<std::string> out;
  for (const auto* p : parts) out.insert(out.end(), p->begin(), p->end());
  return out;
}

}  // namespace

std::vector<AtomicBlockSpec> decompose_blocks(const Section& section, const SlotBindings& bindings,
                                              const CorpusBundle& bundle, const PlanConfig& config) {
  const auto ev = collect_evidence(section, bindings, bundle);
  const auto social = concat({&ev.quotes, &ev.entities});
  if (ev.quantities.empty() && ev.dates.empty() && social.empty() && ev.blocks.empty()) {
    fail(ErrorKind::Decomposition, "section \"" + section.title + "\" has no bound evidence");
  }

  std::vector<std::pair<BlockType, std::vector<std::string>>> plan;
  const bool has_q = !ev.quantities.empty();
  if (section.density == Density::HighDensity) {
    if (has_q) plan.push_back({BlockType::DataAnchor, concat({&ev.quantities, &ev.dates})});
    auto insight = has_q ? ev.blocks : concat({&ev.dates, &ev.blocks});
    if (!insight.empty()) plan.push_back({BlockType::DeepInsight, insight});
    if (!social.empty()) {
      // a Conflict block may only join when the high-density blocks stay the majority
      plan.push_back({plan.size() >= 2 ? BlockType::Conflict : BlockType::DeepInsight, social});
    }
  } else {
    const auto data = concat({&ev.quantities, &ev.dates});
    if (!ev.blocks.empty() && !social.empty()) {
      plan.push_back({BlockType::NarrativeCutIn, ev.blocks});
      plan.push_back({BlockType::Conflict, social});
    } else if (!ev.blocks.empty() || !social.empty()) {
      plan.push_back({BlockType::NarrativeCutIn, concat({&ev.blocks, &social})});
    }
    if (plan.empty()) {
      plan.push_back({BlockType::NarrativeCutIn, data});
    } else if (has_q) {
      plan.push_back({BlockType::DataAnchor, data});
    } else if (!data.empty()) {
      auto& scene = plan.front().second;
      scene.insert(scene.end(), data.begin(), data.end());
    }
  }

  // plan_outline rescales by the real section count
  const auto per_section = std::max<std::size_t>(1, config.target_output_chars / std::max<std::size_t>(1, config.min_sections));
  std::vector<AtomicBlockSpec> out;
  for (auto& [type, refs] : plan) {
    AtomicBlockSpec spec;
    spec.type = type;
    spec.directive = std::string(block_directive(type));
    spec.evidence_refs = std::move(refs);
    spec.target_chars = std::max<std::size_t>(1, per_section / plan.size());
    out.push_back(std::move(spec));
  }
  return out;
}

// ---------------------------------------------------------------- scoping

Outline scope_contexts(Outline outline, const CorpusBundle& bundle, std::size_t budget, std::size_t threshold) {
  if (budget == 0) fail(ErrorKind::Scoping, "char_budget_per_section must be > 0");
  for (std::size_t k = 0; k < outline.sections.size(); ++k) {
    auto& section = outline.sections[k];
    ContextWindow window;
    window.section = k;
    window.char_budget = budget;
    std::set<std::string> taken;

    auto add = [&](std::string_view id) {
      if (const auto* f = bundle.find_fact(id)) {
        window.facts.push_back(*f);
        window.used_chars += window_chars(*f);
      } else if (const auto* b = bundle.find_block(id)) {
        window.blocks.push_back(*b);
        window.used_chars += window_chars(*b);
      }
      taken.insert(std::string(id));
    };
    auto size_of = [&](std::string_view id) -> std::size_t {
      if (const auto* f = bundle.find_fact(id)) return window_chars(*f);
      if (const auto* b = bundle.find_block(id)) return window_chars(*b);
      fail(ErrorKind::Scoping, "section " + std::to_string(k + 1) + " references unknown evidence " +
                                   std::string(id));
    };

    for (const auto& spec : section.blocks) {
      for (const auto& ref : spec.evidence_refs) {
        if (taken.count(ref)) continue;
        const auto size = size_of(ref);
        if (window.used_chars + size > budget) {
          fail(ErrorKind::Scoping, "evidence " + ref + " of section " + std::to_string(k + 1) +
                                       " does not fit the window budget of " + std::to_string(budget) + " chars");
        }
        add(ref);
      }
    }

    const std::set<std::string> keys(section.keywords.begin(), section.keywords.end());
    struct Candidate {
      std::size_t score;
      std::size_t order;
      std::string id;
      std::size_t size;
    };
    std::vector<Candidate> candidates;
    std::size_t order = 0;
    for (const auto& f : bundle.facts) {
      const auto score = text::overlap(keys, evidence_tokens(f));
      if (!taken.count(f.id) && score >= threshold && score > 0) {
        candidates.push_back({score, order, f.id, window_chars(f)});
      }
      ++order;
    }
    for (const auto& b : bundle.blocks) {
      const auto score = text::overlap(keys, evidence_tokens(b));
      if (!taken.count(b.id) && score >= threshold && score > 0) {
        candidates.push_back({score, order, b.id, window_chars(b)});
      }
      ++order;
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
      return a.score != b.score ? a.score > b.score : a.order < b.order;
    });
    for (const auto& c : candidates) {
      if (window.used_chars + c.size <= budget) add(c.id);
    }
    section.window = std::move(window);
  }
  return outline;
}

// ---------------------------------------------------------------- outline

namespace {

struct Group {
  std::vector<std::size_t> steps;
  std::vector<std::string> slots;       // bound slots
  std::size_t declared_slots = 0;       // for the merge rule
};

}  // namespace

namespace {

// Keeps the section's evidence within the window budget: slots take turns by
// binding rank and an item is admitted only while it still fits.
SlotBindings cap_evidence(const std::vector<std::string>& slots, const SlotBindings& bindings,
                          const CorpusBundle& bundle, std::size_t budget) {
  SlotBindings out;
  std::set<std::string> admitted;
  std::size_t used = 0;
  std::size_t rank = 0;
  for (bool more = true; more; ++rank) {
    more = false;
    for (const auto& slot : slots) {
      const auto& refs = bindings.bound.at(slot);
      if (rank >= refs.size()) continue;
      more = true;
      const auto& ref = refs[rank];
      if (admitted.count(ref)) {
        out.bound[slot].push_back(ref);
        continue;
      }
      std::size_t cost = 0;
      if (const auto* f = bundle.find_fact(ref)) cost = window_chars(*f);
      if (const auto* b = bundle.find_block(ref)) cost = window_chars(*b);
      if (used + cost > budget) continue;
      used += cost;
      admitted.insert(ref);
      out.bound[slot].push_back(ref);
    }
  }
  for (const auto& slot : slots) {
    if (out.bound[slot].empty()) {
      fail(ErrorKind::Scoping, "no evidence for slot " + slot + " fits the window budget of " + std::to_string(budget) +
                                   " chars");
    }
  }
  return out;
}

}  // namespace

Outline plan_outline(const Schema& schema, const SlotBindings& bindings, const CorpusBundle& bundle,
                     const PlanConfig& config, std::string_view topic) {
  if (!bindings.unbound.empty()) {
    std::string names;
    for (const auto& s : bindings.unbound) names += (names.empty() ? "" : ", ") + s;
    fail(ErrorKind::Planning, "unbound required slots: " + names);
  }
  config.validate();

  std::vector<Group> groups;
  for (std::size_t i = 0; i < schema.steps.size(); ++i) {
    Group g;
    g.steps.push_back(i);
    g.declared_slots = schema.steps[i].slots.size();
    for (const auto& slot : schema.steps[i].slots) {
      auto it = bindings.bound.find(slot.name);
      if (it != bindings.bound.end() && !it->second.empty()) g.slots.push_back(slot.name);
    }
    if (!g.slots.empty()) groups.push_back(std::move(g));
  }

  while (groups.size() > config.max_sections) {
    std::size_t best = 0;
    for (std::size_t i = 1; i + 1 < groups.size(); ++i) {
      const auto cost = groups[i].declared_slots + groups[i + 1].declared_slots;
      if (cost < groups[best].declared_slots + groups[best + 1].declared_slots) best = i;
    }
    auto& a = groups[best];
    auto& b = groups[best + 1];
    a.steps.insert(a.steps.end(), b.steps.begin(), b.steps.end());
    a.slots.insert(a.slots.end(), b.slots.begin(), b.slots.end());
    a.declared_slots += b.declared_slots;
    groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(best) + 1);
  }

  while (groups.size() < config.min_sections) {
    // split the group holding the most bound slots; leftmost wins ties
    std::size_t best = groups.size();
    for (std::size_t i = 0; i < groups.size(); ++i) {
      if (groups[i].slots.size() >= 2 && (best == groups.size() || groups[i].slots.size() > groups[best].slots.size())) {
        best = i;
      }
    }
    if (best == groups.size()) break;
    Group tail;
    auto& head = groups[best];
    const auto half = head.slots.size() / 2;
    tail.steps = head.steps;
    tail.slots.assign(head.slots.begin() + static_cast<std::ptrdiff_t>(half), head.slots.end());
    head.slots.resize(half);
    tail.declared_slots = tail.slots.size();
    head.declared_slots = head.slots.size();
    groups.insert(groups.begin() + static_cast<std::ptrdiff_t>(best) + 1, std::move(tail));
  }

  if (groups.size() < config.min_sections) {
    fail(ErrorKind::Config, "only " + std::to_string(groups.size()) + " plannable sections; at least " +
                                std::to_string(config.min_sections) + " required");
  }

  Outline outline;
  outline.topic = std::string(topic);
  outline.schema_id = schema.id;

  std::map<std::string, std::size_t> title_uses;
  std::vector<SlotBindings> capped;
  for (const auto& g : groups) {
    capped.push_back(cap_evidence(g.slots, bindings, bundle, config.char_budget_per_section));
    Section s;
    s.steps = g.steps;
    s.slots = g.slots;
    for (auto i : g.steps) {
      if (!s.title.empty()) s.title += " & ";
      s.title += schema.steps[i].title();
    }
    // a split step yields two sections with the same title
    if (const auto n = ++title_uses[s.title]; n > 1) s.title += " (" + std::to_string(n) + ")";

    std::set<std::string> keys = text::keyword_tokens(s.title);
    for (const auto& slot : s.slots) {
      auto k = schema.slot_keywords(slot);
      keys.insert(k.begin(), k.end());
    }
    s.keywords.assign(keys.begin(), keys.end());

    bool quantitative = false;
    for (const auto& slot : s.slots) {
      for (const auto& ref : capped.back().bound.at(slot)) {
        const auto* f = bundle.find_fact(ref);
        quantitative = quantitative || (f && f->kind == FactKind::Quantity);
      }
    }
    s.density = quantitative ? Density::HighDensity : Density::LowDensity;
    outline.sections.push_back(std::move(s));
  }

  outline.sections = enforce_pacing(std::move(outline.sections), PacingMode::PreserveOrder);

  const auto per_section = std::max<std::size_t>(1, config.target_output_chars / outline.sections.size());
  for (std::size_t i = 0; i < outline.sections.size(); ++i) {
    auto& s = outline.sections[i];
    s.blocks = decompose_blocks(s, capped[i], bundle, config);
    const auto per_block = std::max<std::size_t>(1, per_section / s.blocks.size());
    for (auto& b : s.blocks) b.target_chars = per_block;
  }

  outline.lede = select_lede(outline, bundle, config);
  return scope_contexts(std::move(outline), bundle, config.char_budget_per_section, config.relevance_threshold);
}

}  // namespace deepnews
