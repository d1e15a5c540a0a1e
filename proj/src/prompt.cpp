#include "deepnews/prompt.hpp"

#include <algorithm>
#include <set>

#include "deepnews/error.hpp"
#include "deepnews/serialize.hpp"
#include "deepnews/text.hpp"

namespace deepnews {

namespace {

struct Token {
  enum Kind { Text, Var, Open, Close } kind;
  std::string value;
};

bool blank(std::string_view s) {
  return s.find_first_not_of(" \t\r") == std::string_view::npos;
}

std::vector<Token> tokenize(const std::string& src) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < src.size()) {
    const auto open = src.find("{{", i);
    if (open == std::string::npos) {
      out.push_back({Token::Text, src.substr(i)});
      break;
    }
    const auto close = src.find("}}", open);
    if (close == std::string::npos) fail(ErrorKind::Template, "unterminated tag at byte " + std::to_string(open));
    auto name = text::trim(std::string_view(src).substr(open + 2, close - open - 2));
    Token::Kind kind = Token::Var;
    if (!name.empty() && (name.front() == '#' || name.front() == '/')) {
      kind = name.front() == '#' ? Token::Open : Token::Close;
      name = text::trim(std::string_view(name).substr(1));
    }
    if (name.empty()) fail(ErrorKind::Template, "empty tag at byte " + std::to_string(open));

    std::size_t text_end = open;
    std::size_t next = close + 2;
    if (kind != Token::Var) {
      const auto line_start = open == 0 ? 0 : src.rfind('\n', open - 1) + 1;  // npos + 1 == 0
      auto line_end = src.find('\n', next);
      if (line_end == std::string::npos) line_end = src.size();
      if (line_start >= i && blank(std::string_view(src).substr(line_start, open - line_start)) &&
          blank(std::string_view(src).substr(next, line_end - next))) {
        text_end = line_start;
        next = line_end == src.size() ? line_end : line_end + 1;
      }
    }
    if (text_end > i) out.push_back({Token::Text, src.substr(i, text_end - i)});
    out.push_back({kind, std::move(name)});
    i = next;
  }
  return out;
}

const std::string& lookup(const std::map<std::string, std::string>& values, const std::string& name) {
  auto it = values.find(name);
  if (it == values.end()) fail(ErrorKind::Template, "missing value for template slot {{" + name + "}}");
  return it->second;
}

std::size_t render_range(const std::vector<Token>& toks, std::size_t pos, const std::string& closing,
                         const std::map<std::string, std::string>& values, bool emit, std::string& out) {
  while (pos < toks.size()) {
    const auto& t = toks[pos];
    switch (t.kind) {
      case Token::Text:
        if (emit) out += t.value;
        ++pos;
        break;
      case Token::Var:
        if (emit) {
          out += lookup(values, t.value);
        } else {
          lookup(values, t.value);  // unresolved names are errors even inside disabled sections
        }
        ++pos;
        break;
      case Token::Open: {
        const bool on = !lookup(values, t.value).empty();
        pos = render_range(toks, pos + 1, t.value, values, emit && on, out);
        break;
      }
      case Token::Close:
        if (t.value != closing) fail(ErrorKind::Template, "unexpected {{/" + t.value + "}}");
        return pos + 1;
    }
  }
  if (!closing.empty()) fail(ErrorKind::Template, "unclosed section {{#" + closing + "}}");
  return pos;
}

}  // namespace

PromptTemplate::PromptTemplate(std::string source) : source_(std::move(source)) {
  std::string scratch;
  std::map<std::string, std::string> all;
  for (const auto& n : names()) all[n] = "";
  render_range(tokenize(source_), 0, "", all, false, scratch);  // structural check
}

PromptTemplate PromptTemplate::load(const std::filesystem::path& path) { return PromptTemplate(read_text_file(path)); }

std::string PromptTemplate::render(const std::map<std::string, std::string>& values) const {
  std::string out;
  render_range(tokenize(source_), 0, "", values, true, out);
  return out;
}

std::vector<std::string> PromptTemplate::names() const {
  std::set<std::string> names;
  for (const auto& t : tokenize(source_)) {
    if (t.kind != Token::Text) names.insert(t.value);
  }
  return {names.begin(), names.end()};
}

const PromptTemplate& default_section_template() {
  static const PromptTemplate tmpl(
#include "section_template.inc"
  );
  return tmpl;
}

namespace {

std::string join(const std::vector<std::string>& items, std::string_view sep) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += sep;
    out += s;
  }
  return out;
}

std::string fact_line(const AtomicFact& f) {
  return "- [" + f.id + "] (" + std::string(to_string(f.kind)) + ") " + f.render();
}

std::vector<std::string> head_terms(const Lexicon& lex, std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < lex.terms().size() && i < n; ++i) out.push_back(lex.terms()[i]);
  return out;
}

}  // namespace

std::string render_prompt(const PromptRequest& req, const ConstraintConfig& config, const PromptTemplate& tmpl) {
  if (!req.spec || !req.window) fail(ErrorKind::Template, "prompt request needs a block spec and a window");
  const auto& spec = *req.spec;
  const auto& window = *req.window;

  std::vector<std::string> primary;
  std::vector<std::string> background;
  std::set<std::string> referenced(spec.evidence_refs.begin(), spec.evidence_refs.end());
  for (const auto& ref : spec.evidence_refs) {
    if (const auto* f = window.find_fact(ref)) {
      primary.push_back(fact_line(*f));
    } else if (const auto* b = window.find_block(ref)) {
      background.push_back("- [" + b->id + "] " + b->gist);
    } else {
      fail(ErrorKind::Template, "evidence " + ref + " is not in the section window");
    }
  }
  for (const auto& f : window.facts) {
    if (!referenced.count(f.id)) background.push_back(fact_line(f));
  }
  for (const auto& b : window.blocks) {
    if (!referenced.count(b.id)) background.push_back("- [" + b.id + "] " + b.gist);
  }

  std::map<std::string, std::string> v;
  v["Style_Parameter"] = req.style;
  v["Schema_ID"] = req.schema_id;
  v["Micro_Facts_List"] = primary.empty() ? "- (none; work from the background material)" : join(primary, "\n");
  v["Background"] = join(background, "\n");

  std::vector<std::string> tactic_ids;
  for (auto t : req.tactics) tactic_ids.emplace_back(to_string(t));
  v["Tactic_ID"] = join(tactic_ids, ", ");
  auto on = [&](Tactic t) {
    return std::find(req.tactics.begin(), req.tactics.end(), t) != req.tactics.end() ? "1" : "";
  };
  v["LogicFog"] = on(Tactic::LogicFog);
  v["RhythmBreak"] = on(Tactic::RhythmBreak);
  v["LexicalHedge"] = on(Tactic::LexicalHedge);
  v["Forbidden_Connectors_List"] = join(config.forbidden_connectors.terms(), ", ");
  v["Theta_High"] = std::to_string(config.theta_high);
  v["Theta_Low"] = std::to_string(config.theta_low);
  v["Formal_Terms"] = join(head_terms(config.formal_lexicon, 6), ", ");
  v["Colloquial_Terms"] = join(head_terms(config.colloquial_lexicon, 6), ", ");

  v["Section_Name"] = req.section_name;
  v["Atomic_Block_Type"] = std::string(to_string(spec.type));
  v["Block_Index"] = std::to_string(req.block_index);
  v["Block_Count"] = std::to_string(req.block_count);
  v["Block_Directive"] = spec.directive;
  v["Target_Chars"] = std::to_string(spec.target_chars);
  v["Lede"] = req.lede_directive;
  v["Feedback"] = req.feedback;

  for (const char* required : {"Style_Parameter", "Schema_ID", "Section_Name"}) {
    if (v[required].empty()) fail(ErrorKind::Template, std::string("missing value for template slot {{") + required + "}}");
  }
  return tmpl.render(v);
}

}  // namespace deepnews
