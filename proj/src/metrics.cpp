#include "deepnews/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "deepnews/error.hpp"
#include "deepnews/text.hpp"

namespace deepnews {

// ---------------------------------------------------------------- lexicon

namespace {

bool has_latin(std::string_view term) {
  return std::any_of(term.begin(), term.end(), [](char c) { return std::isalpha(static_cast<unsigned char>(c)); });
}

bool word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

Lexicon::Lexicon(std::vector<std::string> terms) : terms_(std::move(terms)) {
  std::erase_if(terms_, [](const std::string& t) { return t.empty(); });
}

Lexicon Lexicon::parse(std::string_view content) {
  std::vector<std::string> terms;
  std::istringstream in{std::string(content)};
  std::string line;
  while (std::getline(in, line)) {
    auto t = text::trim(line);
    if (t.empty() || t.front() == '#') continue;
    terms.push_back(std::move(t));
  }
  return Lexicon(std::move(terms));
}

Lexicon Lexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot read lexicon " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::size_t Lexicon::count_in(std::string_view text) const {
  const auto lower = text::to_lower_ascii(text);
  std::size_t n = 0;
  for (const auto& term : terms_) {
    const bool latin = has_latin(term);
    const auto needle = latin ? text::to_lower_ascii(term) : term;
    for (auto pos = lower.find(needle); pos != std::string::npos; pos = lower.find(needle, pos + needle.size())) {
      if (latin && pos > 0 && word_char(lower[pos - 1])) continue;
      ++n;
    }
  }
  return n;
}

bool Lexicon::starts(std::string_view sentence) const {
  // skip opening quotes and brackets
  const auto cps = text::decode(sentence);
  std::size_t i = 0;
  auto opener = [](char32_t c) {
    return c == U'“' || c == U'‘' || c == U'「' || c == U'『' || c == U'（' || c == U'《';
  };
  while (i < cps.size() && (text::is_space(cps[i]) || (cps[i] < 0x80 && !text::is_ascii_alnum(cps[i])) || opener(cps[i]))) {
    ++i;
  }
  const auto lower = text::to_lower_ascii(text::encode(cps.substr(i)));
  for (const auto& term : terms_) {
    const bool latin = has_latin(term);
    const auto needle = latin ? text::to_lower_ascii(term) : term;
    if (lower.compare(0, needle.size(), needle) != 0) continue;
    if (latin && lower.size() > needle.size() && word_char(lower[needle.size()])) continue;
    return true;
  }
  return false;
}

// ---------------------------------------------------------------- style metrics

double burstiness(const std::vector<double>& lengths) {
  if (lengths.size() <= 1) return 0.0;
  double mean = 0.0;
  for (auto l : lengths) mean += l;
  mean /= static_cast<double>(lengths.size());
  if (mean == 0.0) return 0.0;
  double var = 0.0;
  for (auto l : lengths) var += (l - mean) * (l - mean);
  var /= static_cast<double>(lengths.size());
  return std::sqrt(var) / mean;
}

double burstiness(std::string_view text) { return burstiness(segment_sentences(text).token_lengths()); }

double structural_entropy(const std::vector<BlockType>& types) {
  if (types.empty()) fail(ErrorKind::Domain, "structural entropy needs at least one typed paragraph");
  std::map<BlockType, std::size_t> counts;
  for (auto t : types) ++counts[t];
  const double n = static_cast<double>(types.size());
  double h = 0.0;
  for (const auto& [type, c] : counts) {
    const double p = static_cast<double>(c) / n;
    h -= p * std::log(p);
  }
  return std::max(0.0, h);
}

double subjectivity_score(std::string_view text, const Lexicon& lexicon, double markers_per_sentence) {
  if (!(markers_per_sentence > 0.0)) fail(ErrorKind::Domain, "markers per sentence must be > 0");
  const auto sentences = segment_sentences(text).size();
  if (sentences == 0) return 0.0;
  const double markers = static_cast<double>(lexicon.count_in(text));
  return std::min(20.0, 20.0 * markers / (static_cast<double>(sentences) * markers_per_sentence));
}

// ---------------------------------------------------------------- grounding

std::optional<std::string> ground_mention(const NumericMention& m, const std::vector<AtomicFact>& facts,
                                          double tolerance) {
  if (!(tolerance >= 0.0)) fail(ErrorKind::Domain, "grounding tolerance must be >= 0");
  const AtomicFact* best = nullptr;
  double best_err = 0.0;
  for (const auto& f : facts) {
    if (m.kind == MentionKind::Quantity && f.kind == FactKind::Quantity) {
      const auto& q = std::get<QuantityValue>(f.value);
      if (q.base_unit != m.quantity.base_unit) continue;
      const double want = q.scaled();
      const double got = m.quantity.scaled();
      const double err = want == 0.0 ? std::fabs(got) : std::fabs(got - want) / std::fabs(want);
      const bool ok = want == 0.0 ? got == 0.0 : err <= tolerance * (1.0 + 1e-12);
      if (ok && (!best || err < best_err)) {
        best = &f;
        best_err = err;
      }
    } else if (m.kind == MentionKind::Date && f.kind == FactKind::Date) {
      const auto& d = std::get<DateValue>(f.value);
      // a coarser claim ("March 2024") is grounded by a finer fact
      const bool ok = d.year == m.date.year && (m.date.month == 0 || d.month == m.date.month) &&
                      (m.date.day == 0 || d.day == m.date.day);
      if (ok && !best) best = &f;
    }
  }
  if (!best) return std::nullopt;
  return best->id;
}

HFRReport hallucination_check(std::string_view text, const std::vector<AtomicFact>& facts, double tolerance) {
  if (!(tolerance >= 0.0)) fail(ErrorKind::Domain, "grounding tolerance must be >= 0");
  HFRReport report;
  for (auto& m : scan_numeric_mentions(text)) {
    Claim c;
    c.text = m.literal();
    c.grounding = ground_mention(m, facts, tolerance);
    c.mention = std::move(m);
    if (!c.grounding) ++report.ungrounded_count;
    report.claims.push_back(std::move(c));
  }
  report.hallucination_free = report.ungrounded_count == 0;
  return report;
}

double hfr_rate(const std::vector<HFRReport>& reports) {
  if (reports.empty()) fail(ErrorKind::Domain, "hfr_rate needs at least one report");
  const auto clean = std::count_if(reports.begin(), reports.end(), [](const auto& r) { return r.hallucination_free; });
  return static_cast<double>(clean) / static_cast<double>(reports.size());
}

// ---------------------------------------------------------------- cost

std::string Ecpa::render() const { return infinite ? "infinite" : text::format_double(value); }

Ecpa ecpa(double cost_per_run, double acceptance_rate) {
  if (!(cost_per_run >= 0.0)) fail(ErrorKind::Domain, "cost per run must be >= 0");
  if (!(acceptance_rate >= 0.0 && acceptance_rate <= 1.0)) {
    fail(ErrorKind::Domain, "acceptance rate must lie in [0, 1]");
  }
  if (acceptance_rate == 0.0) return {true, 0.0};
  return {false, cost_per_run / acceptance_rate};
}

// ---------------------------------------------------------------- ablation

namespace {

constexpr std::string_view kCanonicalConditions[] = {"Human Expert", "Ours (Full Model)", "w/o Schema", "w/o Tactics"};

std::string pad(std::string s, std::size_t width) {
  const auto n = text::char_count(s);
  if (n < width) s.append(width - n, ' ');
  return s;
}

}  // namespace

AblationTable ablation_report(const std::vector<AblationSample>& samples) {
  if (samples.empty()) fail(ErrorKind::Domain, "ablation report needs at least one sample");
  std::vector<std::string> order;
  for (auto c : kCanonicalConditions) {
    for (const auto& s : samples) {
      if (s.condition == c) {
        order.emplace_back(c);
        break;
      }
    }
  }
  for (const auto& s : samples) {
    if (std::find(order.begin(), order.end(), s.condition) == order.end()) order.push_back(s.condition);
  }
  AblationTable table;
  for (const auto& cond : order) {
    AblationRow row;
    row.condition = cond;
    for (const auto& s : samples) {
      if (s.condition != cond) continue;
      ++row.samples;
      row.structural_entropy += s.report.structural_entropy;
      row.burstiness += s.report.burstiness;
      row.subjectivity += s.report.subjectivity;
    }
    if (row.samples == 0) fail(ErrorKind::Domain, "empty condition group " + cond);
    const auto n = static_cast<double>(row.samples);
    row.structural_entropy /= n;
    row.burstiness /= n;
    row.subjectivity /= n;
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string AblationTable::to_text() const {
  std::size_t width = text::char_count("Condition");
  for (const auto& r : rows) width = std::max(width, text::char_count(r.condition));
  const std::string cols[] = {"Structural Entropy", "Burstiness", "Subjectivity"};
  std::string out = pad("Condition", width);
  for (const auto& c : cols) out += "  " + c;
  out += "\n";
  out += std::string(width, '-');
  for (const auto& c : cols) out += "  " + std::string(c.size(), '-');
  out += "\n";
  for (const auto& r : rows) {
    out += pad(r.condition, width);
    const double values[] = {r.structural_entropy, r.burstiness, r.subjectivity};
    for (std::size_t i = 0; i < 3; ++i) {
      auto v = text::format_fixed(values[i], 3);
      out += "  " + std::string(cols[i].size() - std::min(cols[i].size(), v.size()), ' ') + v;
    }
    out += "\n";
  }
  return out;
}

nlohmann::ordered_json AblationTable::to_json() const {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    arr.push_back({{"condition", r.condition},
                   {"samples", r.samples},
                   {"structural_entropy", r.structural_entropy},
                   {"burstiness", r.burstiness},
                   {"subjectivity", r.subjectivity}});
  }
  return {{"columns", {"structural_entropy", "burstiness", "subjectivity"}}, {"rows", arr}};
}

// ---------------------------------------------------------------- json

nlohmann::ordered_json to_json(const HFRReport& r) {
  auto claims = nlohmann::ordered_json::array();
  for (const auto& c : r.claims) {
    nlohmann::ordered_json jc;
    jc["text"] = c.text;
    const auto& m = c.mention;
    if (m.kind == MentionKind::Quantity) {
      jc["kind"] = "quantity";
      jc["value"] = m.quantity.number;
      jc["unit"] = m.quantity.unit;
      jc["base_unit"] = m.quantity.base_unit;
      jc["scale"] = m.quantity.scale;
    } else {
      jc["kind"] = "date";
      jc["year"] = m.date.year;
      jc["month"] = m.date.month;
      jc["day"] = m.date.day;
    }
    jc["span"] = {m.span.start, m.span.end};
    jc["grounding"] = c.grounding ? *c.grounding : std::string(kUngrounded);
    claims.push_back(std::move(jc));
  }
  nlohmann::ordered_json j;
  j["claims"] = std::move(claims);
  j["ungrounded_count"] = r.ungrounded_count;
  j["hallucination_free"] = r.hallucination_free;
  return j;
}

nlohmann::ordered_json to_json(const MetricsReport& r) {
  nlohmann::ordered_json j;
  j["burstiness"] = r.burstiness;
  j["structural_entropy"] = r.structural_entropy;
  j["subjectivity"] = r.subjectivity;
  j["hfr"] = to_json(r.hfr);
  j["icr"] = r.icr;
  j["zone"] = std::string(to_string(r.zone));
  j["cost"] = r.cost;
  j["token_usage"] = {{"prompt_tokens", r.token_usage.prompt_tokens},
                      {"completion_tokens", r.token_usage.completion_tokens},
                      {"total_tokens", r.token_usage.total()}};
  return j;
}

MetricsReport metrics_from_json(const nlohmann::json& j) {
  MetricsReport r;
  try {
    r.burstiness = j.at("burstiness").get<double>();
    r.structural_entropy = j.at("structural_entropy").get<double>();
    r.subjectivity = j.at("subjectivity").get<double>();
    r.icr = j.value("icr", 0.0);
    r.zone = parse_zone(j.value("zone", "Noise")).value_or(Zone::Noise);
    r.cost = j.value("cost", 0.0);
    if (j.contains("token_usage")) {
      r.token_usage.prompt_tokens = j["token_usage"].value("prompt_tokens", 0LL);
      r.token_usage.completion_tokens = j["token_usage"].value("completion_tokens", 0LL);
    }
    if (j.contains("hfr")) {
      const auto& h = j["hfr"];
      for (const auto& jc : h.value("claims", nlohmann::json::array())) {
        Claim c;
        c.text = jc.value("text", "");
        if (jc.value("kind", "quantity") == "quantity") {
          c.mention.kind = MentionKind::Quantity;
          c.mention.quantity.number = jc.value("value", 0.0);
          c.mention.quantity.unit = jc.value("unit", "");
          c.mention.quantity.base_unit = jc.value("base_unit", "");
          c.mention.quantity.scale = jc.value("scale", 1.0);
          c.mention.quantity.literal = c.text;
        } else {
          c.mention.kind = MentionKind::Date;
          c.mention.date = {jc.value("year", 0), jc.value("month", 0), jc.value("day", 0), c.text};
        }
        if (jc.contains("span") && jc["span"].size() == 2) {
          c.mention.span = {jc["span"][0].get<std::size_t>(), jc["span"][1].get<std::size_t>()};
        }
        const auto g = jc.value("grounding", std::string(kUngrounded));
        if (g != kUngrounded) c.grounding = g;
        r.hfr.claims.push_back(std::move(c));
      }
      r.hfr.ungrounded_count = h.value("ungrounded_count", std::size_t{0});
      r.hfr.hallucination_free = h.value("hallucination_free", true);
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Parse, std::string("metrics: ") + e.what());
  }
  return r;
}

}  // namespace deepnews
