// Parser and canonical writer for the schema definition language, a small
// indentation-based YAML subset. Grammar and slot-derivation rules are in
// docs/sdl.md.

#include <algorithm>
#include <cctype>
#include <optional>
#include <regex>
#include <set>
#include <sstream>

#include "deepnews/error.hpp"
#include "deepnews/schema.hpp"
#include "deepnews/text.hpp"

namespace deepnews {

namespace {

constexpr std::string_view kRootKey = "Schema_Logic_Flow";
constexpr std::string_view kBanner = "# DeepNews Schema Definition Language (SDL) v1.0";

struct Line {
  std::size_t no = 0;
  std::size_t indent = 0;
  std::string content;  // without indentation and trailing whitespace
};

[[noreturn]] void parse_error(std::size_t line, const std::string& what) {
  fail(ErrorKind::Parse, "sdl line " + std::to_string(line) + ": " + what);
}

std::string rstrip(std::string s) {
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.pop_back();
  return s;
}

// Finds the key/value colon: first ':' outside parentheses and quotes that is
// followed by a space or the end of the line.
std::optional<std::size_t> kv_colon(const std::string& s) {
  int depth = 0;
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (quoted) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        quoted = false;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
    } else if (c == '(') {
      ++depth;
    } else if (c == ')') {
      depth = std::max(0, depth - 1);
    } else if (c == ':' && depth == 0 && (i + 1 == s.size() || s[i + 1] == ' ')) {
      return i;
    }
  }
  return std::nullopt;
}

// "Name (Label)" -> {Name, Label}
std::pair<std::string, std::string> split_label(const std::string& key) {
  const auto open = key.find(" (");
  if (open != std::string::npos && !key.empty() && key.back() == ')') {
    return {text::trim(key.substr(0, open)), key.substr(open + 2, key.size() - open - 3)};
  }
  return {text::trim(key), ""};
}

struct Value {
  std::string detail;
  std::vector<std::string> alternatives;
};

Value parse_value(const std::string& raw, std::size_t line) {
  Value v;
  const std::string s = text::trim(raw);
  if (s.empty()) return v;
  if (s.front() == '"') {
    std::string out;
    std::size_t i = 1;
    bool closed = false;
    for (; i < s.size(); ++i) {
      if (s[i] == '\\' && i + 1 < s.size()) {
        out.push_back(s[++i]);
      } else if (s[i] == '"') {
        closed = true;
        ++i;
        break;
      } else {
        out.push_back(s[i]);
      }
    }
    if (!closed) parse_error(line, "unterminated quoted string");
    if (!text::trim(s.substr(i)).empty()) parse_error(line, "unexpected text after quoted string");
    v.detail = out;
    return v;
  }
  if (s.front() == '[') {
    if (s.back() != ']') parse_error(line, "unterminated option list");
    std::string inner = s.substr(1, s.size() - 2);
    std::size_t start = 0;
    while (true) {
      const auto bar = inner.find('|', start);
      auto alt = text::trim(inner.substr(start, bar == std::string::npos ? std::string::npos : bar - start));
      if (alt.empty()) parse_error(line, "empty alternative in option list");
      v.alternatives.push_back(std::move(alt));
      if (bar == std::string::npos) break;
      start = bar + 1;
    }
    return v;
  }
  v.detail = s;
  return v;
}

std::pair<std::string, std::string> key_and_rest(const Line& l, std::string_view body) {
  const std::string s(body);
  const auto colon = kv_colon(s);
  if (!colon) parse_error(l.no, "expected \"key: value\" but found \"" + s + "\"");
  auto key = text::trim(s.substr(0, *colon));
  if (key.empty()) parse_error(l.no, "empty key");
  return {key, s.substr(*colon + 1)};
}

const std::regex& numbered_re() {
  static const std::regex re(R"(^(\d+)\.\s+(.+)$)");
  return re;
}

bool key_has_cue(const std::string& key) {
  static const std::vector<std::string> cues = {"metric", "calculate", "impact", "price",
                                                "revenue", "profit", "margin", "quantity"};
  const auto lower = text::to_lower_ascii(key);
  return std::any_of(cues.begin(), cues.end(), [&](const auto& c) { return lower.find(c) != std::string::npos; });
}

const Directive* field(const Directive& d, std::string_view key) {
  for (const auto& f : d.fields) {
    if (f.key == key) return &f;
  }
  return nullptr;
}

void derive_slots(Schema& schema) {
  std::set<std::string> names;
  for (std::size_t si = 0; si < schema.steps.size(); ++si) {
    auto& step = schema.steps[si];
    step.slots.clear();
    for (const auto& d : step.directives) {
      SlotDecl slot;
      slot.name = d.key;
      slot.step = si;
      if (const auto* ex = field(d, "Expects")) {
        auto kind = parse_evidence_kind(text::to_lower_ascii(ex->detail));
        if (!kind) fail(ErrorKind::Validation, "slot " + d.key + ": unknown Expects value \"" + ex->detail + "\"");
        slot.expected = *kind;
      } else {
        bool quantitative = key_has_cue(d.key);
        for (const auto& f : d.fields) quantitative = quantitative || key_has_cue(f.key);
        slot.expected = quantitative ? EvidenceKind::Quantity : EvidenceKind::Block;
      }
      if (const auto* req = field(d, "Required")) {
        const auto v = text::to_lower_ascii(req->detail);
        if (v != "true" && v != "false") fail(ErrorKind::Validation, "slot " + d.key + ": Required must be true or false");
        slot.required = v == "true";
      }
      step.slots.push_back(slot);
    }
    if (step.slots.empty()) {
      step.slots.push_back(SlotDecl{step.name, EvidenceKind::Block, false, si});
    }
    for (const auto& s : step.slots) {
      if (!names.insert(s.name).second) fail(ErrorKind::Validation, "duplicate slot name \"" + s.name + "\"");
    }
  }
}

}  // namespace

Schema parse_sdl(std::string_view input, std::string_view fallback_id) {
  std::vector<Line> lines;
  {
    std::istringstream in{std::string(input)};
    std::string raw;
    std::size_t no = 0;
    while (std::getline(in, raw)) {
      ++no;
      raw = rstrip(raw);
      std::size_t indent = 0;
      while (indent < raw.size() && (raw[indent] == ' ' || raw[indent] == '\t')) {
        if (raw[indent] == '\t') parse_error(no, "tab in indentation");
        ++indent;
      }
      lines.push_back({no, indent, raw.substr(indent)});
    }
  }

  Schema schema;
  std::optional<int> complexity;
  std::size_t i = 0;
  bool root_seen = false;
  static const std::regex target_re(R"(^#\s*Target Scenario:\s*(\S+)\s*(?:\((.*)\))?\s*$)");
  static const std::regex complexity_re(R"(^#\s*Complexity:\s*(\d+)\s*$)");

  for (; i < lines.size(); ++i) {
    const auto& l = lines[i];
    if (l.content.empty()) continue;
    if (l.content.front() == '#') {
      std::smatch m;
      if (std::regex_match(l.content, m, target_re)) {
        schema.id = m[1].str();
        schema.title = m[2].str();
      } else if (std::regex_match(l.content, m, complexity_re)) {
        complexity = std::stoi(m[1].str());
      }
      continue;
    }
    if (l.indent != 0) parse_error(l.no, "expected top-level key");
    if (l.content != std::string(kRootKey) + ":") parse_error(l.no, "unknown top-level key \"" + l.content + "\"");
    root_seen = true;
    ++i;
    break;
  }
  if (!root_seen) fail(ErrorKind::Validation, "no steps: missing Schema_Logic_Flow");

  std::size_t step_indent = 0;
  SchemaStep* step = nullptr;
  Directive* directive = nullptr;  // current item when it is a directive
  bool in_options = false;         // current item is "- Options:"
  std::size_t item_indent = 0;

  for (; i < lines.size(); ++i) {
    const auto& l = lines[i];
    if (l.content.empty() || l.content.front() == '#') continue;
    if (l.indent == 0) parse_error(l.no, "unexpected top-level key \"" + l.content + "\"");
    if (step_indent == 0) step_indent = l.indent;

    if (l.indent == step_indent) {
      if (l.content.back() != ':' || !kv_colon(l.content)) parse_error(l.no, "expected step header \"Step_N_Name:\"");
      auto [name, label] = split_label(l.content.substr(0, l.content.size() - 1));
      schema.steps.emplace_back();
      step = &schema.steps.back();
      step->name = name;
      step->label = label;
      directive = nullptr;
      in_options = false;
      item_indent = 0;
      continue;
    }
    if (l.indent < step_indent) parse_error(l.no, "inconsistent indentation");
    if (!step) parse_error(l.no, "item outside of a step");

    const bool is_item = l.content.rfind("- ", 0) == 0 || l.content == "-";
    if (is_item && (item_indent == 0 || l.indent == item_indent)) {
      item_indent = l.indent;
      directive = nullptr;
      in_options = false;
      const std::string body = l.content.size() > 2 ? l.content.substr(2) : "";
      auto [key, rest] = key_and_rest(l, body);
      auto [name, label] = split_label(key);
      if (name == "Options" && label.empty()) {
        if (!text::trim(rest).empty()) parse_error(l.no, "Options takes a numbered list on the following lines");
        if (step->option_style == OptionStyle::Inline) parse_error(l.no, "mixed option styles in one step");
        if (step->options) parse_error(l.no, "duplicate Options list");
        step->options.emplace();
        step->option_style = OptionStyle::Numbered;
        in_options = true;
      } else if (name.rfind("Scenario_", 0) == 0) {
        if (step->option_style == OptionStyle::Numbered) parse_error(l.no, "mixed option styles in one step");
        if (!step->options) step->options.emplace();
        step->option_style = OptionStyle::Inline;
        auto v = parse_value(rest, l.no);
        if (!v.alternatives.empty()) parse_error(l.no, "scenario detail cannot be an option list");
        step->options->push_back(SchemaOption{name, label, v.detail});
      } else {
        auto v = parse_value(rest, l.no);
        step->directives.push_back(Directive{name, label, v.detail, v.alternatives, {}});
        directive = &step->directives.back();
      }
      continue;
    }
    if (item_indent == 0 || l.indent <= item_indent) parse_error(l.no, "unexpected indentation");

    // nested line under the current item
    std::smatch m;
    if (std::regex_match(l.content, m, numbered_re())) {
      if (!in_options) parse_error(l.no, "numbered option outside of an Options list");
      const std::string entry = m[2].str();
      std::string key = entry;
      std::string detail;
      if (auto colon = kv_colon(entry)) {
        key = entry.substr(0, *colon);
        auto v = parse_value(entry.substr(*colon + 1), l.no);
        detail = v.detail;
      }
      auto [name, label] = split_label(key);
      step->options->push_back(SchemaOption{name, label, detail});
      continue;
    }
    if (!directive) parse_error(l.no, "nested value outside of a directive");
    auto [key, rest] = key_and_rest(l, l.content);
    auto [name, label] = split_label(key);
    auto v = parse_value(rest, l.no);
    directive->fields.push_back(Directive{name, label, v.detail, v.alternatives, {}});
  }

  if (schema.id.empty()) schema.id = std::string(fallback_id);
  if (schema.id.empty()) fail(ErrorKind::Validation, "schema has no id");
  auto category = category_from_id(schema.id);
  if (!category) fail(ErrorKind::Validation, "schema id \"" + schema.id + "\" does not start with a known category prefix");
  schema.category = *category;
  schema.complexity = complexity.value_or(info(*category).complexity);
  if (schema.complexity < 1 || schema.complexity > 5) fail(ErrorKind::Validation, "complexity must be within 1..5");
  if (schema.title.empty()) schema.title = std::string(info(*category).title);
  if (schema.steps.empty()) fail(ErrorKind::Validation, "no steps");
  for (const auto& s : schema.steps) {
    if (s.options && s.options->empty()) fail(ErrorKind::Validation, "step " + s.name + ": options must be nonempty");
  }
  derive_slots(schema);
  return schema;
}

namespace {

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string with_label(const std::string& name, const std::string& label) {
  return label.empty() ? name : name + " (" + label + ")";
}

std::string render_value(const Directive& d) {
  if (!d.alternatives.empty()) {
    std::string out = "[ ";
    for (std::size_t i = 0; i < d.alternatives.size(); ++i) {
      if (i) out += " | ";
      out += d.alternatives[i];
    }
    return out + " ]";
  }
  if (d.detail.empty()) return "";
  return quote(d.detail);
}

std::string plain_or_quoted(const std::string& s) {
  if (s.empty() || s.front() == '"' || s.front() == '[' || s != text::trim(s)) return quote(s);
  return s;
}

}  // namespace

std::string serialize_sdl(const Schema& schema) {
  std::ostringstream out;
  out << kBanner << "\n";
  out << "# Target Scenario: " << schema.id;
  if (!schema.title.empty()) out << " (" << schema.title << ")";
  out << "\n";
  if (schema.complexity != info(schema.category).complexity) out << "# Complexity: " << schema.complexity << "\n";
  out << "\n" << kRootKey << ":\n";
  for (std::size_t si = 0; si < schema.steps.size(); ++si) {
    const auto& step = schema.steps[si];
    if (si) out << "\n";
    out << "  " << with_label(step.name, step.label) << ":\n";
    for (const auto& d : step.directives) {
      out << "    - " << with_label(d.key, d.label) << ":";
      const auto v = render_value(d);
      if (!v.empty()) out << " " << v;
      out << "\n";
      for (const auto& f : d.fields) {
        out << "        " << with_label(f.key, f.label) << ":";
        const auto fv = render_value(f);
        if (!fv.empty()) out << " " << fv;
        out << "\n";
      }
    }
    if (step.options && step.option_style == OptionStyle::Numbered) {
      out << "    - Options:\n";
      for (std::size_t k = 0; k < step.options->size(); ++k) {
        const auto& o = (*step.options)[k];
        out << "        " << (k + 1) << ". " << with_label(o.name, o.label);
        if (!o.detail.empty()) out << ": " << plain_or_quoted(o.detail);
        out << "\n";
      }
    } else if (step.options) {
      for (const auto& o : *step.options) {
        out << "    - " << with_label(o.name, o.label) << ":";
        if (!o.detail.empty()) out << " " << plain_or_quoted(o.detail);
        out << "\n";
      }
    }
  }
  return out.str();
}

}  // namespace deepnews
