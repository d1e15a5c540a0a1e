#include <doctest.h>

#include "deepnews/error.hpp"
#include "deepnews/schema.hpp"
#include "deepnews/serialize.hpp"
#include "support.hpp"

using namespace deepnews;

TEST_SUITE("schema") {
  TEST_CASE("golden file parses into five steps") {
    const auto s = parse_sdl(testsupport::slurp(testsupport::fixture("s2_vgame_01.sdl.yaml")));
    CHECK(s.id == "S2-VGAME-01");
    CHECK(s.category == Category::S2VGame);
    CHECK(s.complexity == 5);
    REQUIRE(s.steps.size() == 5);
    CHECK(s.steps[0].name == "Step_1_Profile_The_Oppressor");
    CHECK(s.steps[0].label == "Profiling Company A");
    CHECK(s.steps[4].label == "Endgame Prediction");
    CHECK(s.steps[4].options.has_value());
    CHECK(s.find_slot("Analyze_Survival_Capability") != nullptr);
  }

  TEST_CASE("serialize is canonical and stable") {
    const auto s = parse_sdl(testsupport::slurp(testsupport::fixture("s2_vgame_01.sdl.yaml")));
    const auto once = serialize_sdl(s);
    const auto back = parse_sdl(once);
    CHECK(back == s);
    CHECK(serialize_sdl(back) == once);
  }

  TEST_CASE("malformed input") {
    CHECK_THROWS_AS(parse_sdl("# Target Scenario: S2-VGAME-09 (x)\nnothing here\n"), Error);
    try {
      parse_sdl("# Target Scenario: X9-NOPE-01 (x)\nSchema_Logic_Flow:\n  Step_1_A (A):\n");
      FAIL("unknown prefix accepted");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Validation);
    }
  }

  TEST_CASE("category table") {
    const auto& t = category_table();
    REQUIRE(t.size() == 5);
    CHECK(info(Category::S1Blind).complexity == 3);
    CHECK(info(Category::S2VGame).complexity == 5);
    CHECK(info(Category::S3Single).complexity == 2);
    CHECK(info(Category::S4HGame).complexity == 4);
    CHECK(info(Category::S5Indus).complexity == 4);
    CHECK(category_from_id("S4-HGAME-02") == Category::S4HGame);
    CHECK_FALSE(category_from_id("Z1-XX-01").has_value());
  }

  TEST_CASE("registry loads the shipped schemas") {
    const auto r = SchemaRegistry::load_dir(testsupport::asset("schemas"));
    CHECK(r.schemas().size() == 19);
    CHECK(std::is_sorted(r.schemas().begin(), r.schemas().end(),
                         [](const Schema& a, const Schema& b) { return a.id < b.id; }));
    REQUIRE(r.find("S2-VGAME-01") != nullptr);
    CHECK(r.find("S2-VGAME-01")->steps.size() == 5);
    CHECK(r.find("nope") == nullptr);
    CHECK_THROWS_AS(SchemaRegistry::load_dir("/nonexistent/schemas"), Error);
  }

  TEST_CASE("file stem must equal the schema id") {
    testsupport::TempDir dir("schema");
    testsupport::write_file(dir / "S2-VGAME-77.yaml", testsupport::slurp(testsupport::fixture("s2_vgame_01.sdl.yaml")));
    CHECK_THROWS_AS(SchemaRegistry::load_dir(dir.path()), Error);
  }

  TEST_CASE("selection follows the relation and topic") {
    const auto r = SchemaRegistry::load_dir(testsupport::asset("schemas"));
    const auto& s = select_schema(r, TopicProfile::from_text("supplier squeezes carmaker on pricing power", Relation::Vertical));
    CHECK(s.id == "S2-VGAME-01");
    const auto& h = select_schema(r, TopicProfile::from_text("two rivals", Relation::Horizontal));
    CHECK(h.category == Category::S4HGame);
    CHECK(category_for(Relation::Blindspot) == Category::S1Blind);
    CHECK_THROWS_AS(select_schema(SchemaRegistry{}, TopicProfile::from_text("x", Relation::Single)), Error);
  }

  TEST_CASE("slot binding on the sample corpus") {
    const auto s = parse_sdl(testsupport::slurp(testsupport::fixture("s2_vgame_01.sdl.yaml")));
    const auto& bundle = testsupport::vgame_bundle();
    const auto b = bind_slots(s, bundle, 3);
    CHECK(b.unbound.empty());
    for (const auto& [slot, refs] : b.bound) {
      CHECK(refs.size() <= 3);
      for (const auto& ref : refs) CHECK((bundle.find_fact(ref) || bundle.find_block(ref)));
      const auto* decl = s.find_slot(slot);
      REQUIRE(decl != nullptr);
      if (decl->expected == EvidenceKind::Quantity) {
        for (const auto& ref : refs) {
          const auto* f = bundle.find_fact(ref);
          REQUIRE(f != nullptr);
          CHECK(f->kind == FactKind::Quantity);
        }
      }
    }
    CHECK(b == bind_slots(s, bundle, 3));
  }
}
