#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "deepnews/corpus.hpp"
#include "deepnews/planner.hpp"
#include "deepnews/schema.hpp"

// Stable-key-order JSON for the persisted artifacts. Every *_from_json throws
// a Parse error on malformed input.
namespace deepnews {

using ojson = nlohmann::ordered_json;

ojson to_json(const SourceDocument& d);
ojson to_json(const AtomicFact& f);
ojson to_json(const ContextBlock& b);
ojson to_json(const CorpusBundle& b);
ojson to_json(const SlotBindings& b);
ojson to_json(const AtomicBlockSpec& s);
/// Windows are persisted as item ids; reloading resolves them against the bundle.
ojson to_json(const Outline& o);

AtomicFact fact_from_json(const nlohmann::json& j);
CorpusBundle bundle_from_json(const nlohmann::json& j);
SlotBindings bindings_from_json(const nlohmann::json& j);
Outline outline_from_json(const nlohmann::json& j, const CorpusBundle& bundle);

/// Pretty-printed with a trailing newline; identical values give identical bytes.
std::string dump(const ojson& j);

nlohmann::json read_json_file(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);

/// Writes to a sibling temp file and renames it over `path`, so readers never
/// observe a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace deepnews
