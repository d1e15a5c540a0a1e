#include <doctest.h>

#include <algorithm>

#include "deepnews/error.hpp"
#include "deepnews/prompt.hpp"
#include "support.hpp"

using namespace deepnews;

namespace {

struct Fixture {
  ContextWindow window;
  AtomicBlockSpec spec;
  ConstraintConfig config;

  Fixture() {
    AtomicFact f;
    f.id = "q-1#f0";
    f.doc_id = "q-1";
    f.kind = FactKind::Quantity;
    f.subject = "Borealis Motors";
    f.predicate = "gross margin fell to";
    QuantityValue q;
    q.number = 12.8;
    q.unit = "%";
    q.base_unit = "%";
    q.literal = "12.8%";
    f.value = q;
    window.facts.push_back(f);
    AtomicFact other = f;
    other.id = "q-1#f1";
    window.facts.push_back(other);
    ContextBlock b;
    b.id = "q-1#b0";
    b.doc_ids = {"q-1"};
    b.gist = "Margins are thin.";
    window.blocks.push_back(b);
    spec.type = BlockType::DataAnchor;
    spec.directive = "Anchor the section in the margin figure.";
    spec.evidence_refs = {"q-1#f0"};
    spec.target_chars = 400;
    config.forbidden_connectors = Lexicon({"however", "therefore"});
    config.formal_lexicon = Lexicon({"gross margin"});
    config.colloquial_lexicon = Lexicon({"leeks"});
  }

  PromptRequest request() const {
    PromptRequest r;
    r.spec = &spec;
    r.window = &window;
    r.schema_id = "S2-VGAME-01";
    r.tactics = {Tactic::RhythmBreak, Tactic::LogicFog};
    r.section_name = "Profiling Company B";
    return r;
  }
};

}  // namespace

TEST_SUITE("prompt") {
  TEST_CASE("substitution and sections") {
    const PromptTemplate t("A {{X}}\n{{#On}}\nshown {{Y}}\n{{/On}}\n{{#Off}}\nhidden\n{{/Off}}\nend\n");
    CHECK(t.render({{"X", "1"}, {"On", "yes"}, {"Y", "2"}, {"Off", ""}}) == "A 1\nshown 2\nend\n");
    CHECK(t.names() == std::vector<std::string>{"Off", "On", "X", "Y"});
  }

  TEST_CASE("missing values and malformed tags") {
    const PromptTemplate t("{{X}} {{Y}}");
    try {
      t.render({{"X", "1"}});
      FAIL("rendered with a missing value");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Template);
      CHECK(std::string(e.what()).find("Y") != std::string::npos);
    }
    CHECK_THROWS_AS(PromptTemplate("{{#A}} open").render({{"A", "1"}}), Error);
    CHECK_THROWS_AS(PromptTemplate("{{X").render({{"X", "1"}}), Error);
  }

  TEST_CASE("built-in template matches the shipped asset") {
    CHECK(default_section_template().source() ==
          testsupport::slurp(testsupport::asset("prompts/section.tmpl")));
  }

  TEST_CASE("section prompt lists referenced facts first") {
    Fixture fx;
    const auto p = render_prompt(fx.request(), fx.config);
    const auto primary = p.find("- [q-1#f0] (quantity) Borealis Motors | gross margin fell to | 12.8%");
    const auto background = p.find("Background material");
    const auto other = p.find("- [q-1#f1]");
    REQUIRE(primary != std::string::npos);
    REQUIRE(background != std::string::npos);
    CHECK(primary < background);
    CHECK(background < other);
    CHECK(p.find("Apply Tactic-RhythmBreak, LogicFog:") != std::string::npos);
    CHECK(p.find("Suppress explicit connectors: however, therefore.") != std::string::npos);
    CHECK(p.find("shorter than 5 tokens") != std::string::npos);
    CHECK(p.find("Pair formal terminology") == std::string::npos);
    CHECK(p.find("Generate the section Profiling Company B focusing on DataAnchor.") != std::string::npos);
    CHECK(p.find("{{") == std::string::npos);
  }

  TEST_CASE("lede and feedback appear only when given") {
    Fixture fx;
    auto r = fx.request();
    CHECK(render_prompt(r, fx.config).find("opens the article") == std::string::npos);
    r.lede_directive = "Open on the contradiction.";
    r.feedback = "- RhythmBreak at sentence 2: too long";
    const auto p = render_prompt(r, fx.config);
    CHECK(p.find("This block opens the article: Open on the contradiction.") != std::string::npos);
    CHECK(p.find("The previous attempt broke these constraints") != std::string::npos);
  }

  TEST_CASE("evidence outside the window is rejected") {
    Fixture fx;
    fx.spec.evidence_refs = {"zzz#f9"};
    CHECK_THROWS_AS(render_prompt(fx.request(), fx.config), Error);
    PromptRequest empty;
    CHECK_THROWS_AS(render_prompt(empty, fx.config), Error);
  }

  TEST_CASE("reference orchestration template renders from the same values") {
    const auto reference = PromptTemplate::load(testsupport::asset("prompts/narrative_orchestration.tmpl"));
    const auto shipped = default_section_template().names();
    for (const auto& n : reference.names()) {
      CHECK_MESSAGE(std::find(shipped.begin(), shipped.end(), n) != shipped.end(), n);
    }
    Fixture fx;
    const auto p = render_prompt(fx.request(), fx.config, reference);
    CHECK(p.find("Utilizing the Schema S2-VGAME-01") != std::string::npos);
    CHECK(p.find("- [q-1#f0] (quantity)") != std::string::npos);
    CHECK(p.find("Apply Tactic-RhythmBreak, LogicFog") != std::string::npos);
    CHECK(p.find("{{") == std::string::npos);
  }
}
