#include <doctest.h>

#include "deepnews/error.hpp"
#include "deepnews/orchestrator.hpp"
#include "support.hpp"

using namespace deepnews;

namespace {

nlohmann::json base() { return read_json_file(testsupport::fixture("vgame_config.json")); }

ErrorKind from_json_kind(const nlohmann::json& j) {
  try {
    RunConfig::from_json(j, testsupport::fixture(""));
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("accepted");
  return ErrorKind::Io;
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("sample config loads with resolved paths") {
    const auto c = RunConfig::load(testsupport::fixture("vgame_config.json"));
    CHECK(c.corpus.is_absolute());
    CHECK(std::filesystem::exists(c.corpus));
    CHECK(std::filesystem::is_directory(c.schema_dir));
    CHECK(c.seed == 42);
    CHECK(c.plan.target_output_chars == 3000);
    CHECK(c.backend == BackendKind::Mock);
    CHECK_FALSE(c.constraints.forbidden_connectors.empty());
    CHECK_FALSE(c.metrics.opinion_lexicon.empty());
    CHECK_NOTHROW(c.validate());
  }

  TEST_CASE("unknown keys and wrong types are config errors") {
    auto j = base();
    j["colour"] = "blue";
    CHECK(from_json_kind(j) == ErrorKind::Config);
    j = base();
    j["plan"]["sections"] = 4;
    CHECK(from_json_kind(j) == ErrorKind::Config);
    j = base();
    j["seed"] = "forty-two";
    CHECK(from_json_kind(j) == ErrorKind::Config);
    j = base();
    j["relation"] = "sideways";
    CHECK(from_json_kind(j) == ErrorKind::Config);
    j = base();
    j["backend"]["kind"] = "carrier-pigeon";
    CHECK(from_json_kind(j) == ErrorKind::Config);
    j = base();
    j["constraints"]["tactics"] = {"RhythmBreak", "Sarcasm"};
    CHECK(from_json_kind(j) == ErrorKind::Config);
    CHECK_THROWS_AS(RunConfig::load("/nonexistent/config.json"), Error);
  }

  TEST_CASE("validation catches bad values") {
    auto c = RunConfig::load(testsupport::fixture("vgame_config.json"));
    c.topic.clear();
    CHECK_THROWS_AS(c.validate(), Error);
    c = RunConfig::load(testsupport::fixture("vgame_config.json"));
    c.corpus = "/nonexistent.jsonl";
    CHECK_THROWS_AS(c.validate(), Error);
    c = RunConfig::load(testsupport::fixture("vgame_config.json"));
    c.run_id = "../escape";
    CHECK_THROWS_AS(c.validate(), Error);
    c = RunConfig::load(testsupport::fixture("vgame_config.json"));
    c.constraints.theta_low = 99;
    CHECK_THROWS_AS(c.validate(), Error);
  }

  TEST_CASE("snapshot round trip and derived run id") {
    const auto c = RunConfig::load(testsupport::fixture("vgame_config.json"));
    const auto again = RunConfig::from_json(nlohmann::json::parse(c.to_json().dump()));
    CHECK(again.to_json().dump() == c.to_json().dump());
    CHECK(again.derived_run_id() == c.derived_run_id());
    CHECK(c.derived_run_id().rfind("run-", 0) == 0);
    CHECK(c.derived_run_id().size() == 16);
    auto other = c;
    other.seed = 7;
    CHECK(other.derived_run_id() != c.derived_run_id());
    auto named = c;
    named.run_id = "mine";
    CHECK(named.derived_run_id() == c.derived_run_id());
  }

  TEST_CASE("grounding tolerance feeds both consumers") {
    auto j = base();
    j["grounding_tolerance"] = 0.01;
    const auto c = RunConfig::from_json(j, testsupport::fixture(""));
    CHECK(c.constraints.grounding_tolerance == 0.01);
    CHECK(c.metrics.grounding_tolerance == 0.01);
  }

  TEST_CASE("backend factory") {
    auto c = RunConfig::load(testsupport::fixture("vgame_config.json"));
    CHECK(make_backend(c)->model_id() == "mock-realizer-1");
    c.backend = BackendKind::Http;
    c.http.model = "some-model";
    CHECK(make_backend(c)->model_id() == "some-model");
    CHECK(parse_backend_kind("http") == BackendKind::Http);
    CHECK_FALSE(parse_backend_kind("ftp").has_value());
  }
}
