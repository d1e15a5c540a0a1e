#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "deepnews/constraints.hpp"
#include "deepnews/planner.hpp"

namespace deepnews {

/// Minimal template language: {{Name}} substitutes a value, and
/// {{#Name}}...{{/Name}} keeps its body only when Name maps to a nonempty
/// value. Tags alone on a line take the whole line with them. Every name used
/// must be present in the value map (an empty string disables a section);
/// anything missing is a Template error naming it.
class PromptTemplate {
 public:
  PromptTemplate() = default;
  explicit PromptTemplate(std::string source);

  static PromptTemplate load(const std::filesystem::path& path);

  std::string render(const std::map<std::string, std::string>& values) const;
  /// Every placeholder and section name, sorted.
  std::vector<std::string> names() const;
  const std::string& source() const { return source_; }

 private:
  std::string source_;
};

/// The section prompt shipped in assets/prompts/section.tmpl, compiled in so
/// the library works without the asset directory.
const PromptTemplate& default_section_template();

struct PromptRequest {
  const AtomicBlockSpec* spec = nullptr;
  const ContextWindow* window = nullptr;
  std::string schema_id;
  std::vector<Tactic> tactics;
  std::string style = "Cynical/Analytical";
  std::string section_name;
  std::size_t block_index = 1;  // 1-based
  std::size_t block_count = 1;
  std::string lede_directive;   // first section only
  std::string feedback;         // violations from the previous attempt
};

/// Fact lines are "- [id] subject | predicate | literal": first the facts the
/// spec references, then the rest of the window as background.
std::string render_prompt(const PromptRequest& request, const ConstraintConfig& config,
                          const PromptTemplate& tmpl = default_section_template());

}  // namespace deepnews
