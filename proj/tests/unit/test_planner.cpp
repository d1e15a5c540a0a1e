#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "deepnews/error.hpp"
#include "deepnews/planner.hpp"
#include "deepnews/serialize.hpp"
#include "deepnews/text.hpp"
#include "support.hpp"

using namespace deepnews;

namespace {

AtomicFact quantity(std::string id, std::string subject, std::string predicate, double number, std::string unit) {
  AtomicFact f;
  f.id = std::move(id);
  f.doc_id = "d";
  f.kind = FactKind::Quantity;
  f.subject = std::move(subject);
  f.predicate = std::move(predicate);
  QuantityValue q;
  q.number = number;
  q.unit = unit;
  q.base_unit = unit;
  q.literal = text::format_double(number) + unit;
  f.value = q;
  return f;
}

AtomicFact date(std::string id, int y, int m, int d) {
  AtomicFact f;
  f.id = std::move(id);
  f.doc_id = "d";
  f.kind = FactKind::Date;
  f.value = DateValue{y, m, d, std::to_string(y)};
  return f;
}

bool alternates(const std::vector<Density>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] == v[i - 1]) return false;
  }
  return true;
}

const Schema& golden() {
  static const auto s = parse_sdl(testsupport::slurp(testsupport::fixture("s2_vgame_01.sdl.yaml")));
  return s;
}

}  // namespace

TEST_SUITE("planner") {
  TEST_CASE("lede precedence") {
    Outline draft;
    CorpusBundle b;
    CHECK(select_lede(draft, b).id == LedeId::DramaticOpening);

    b.facts = {date("a", 2024, 1, 3), date("b", 2024, 2, 3), date("c", 2024, 3, 3)};
    CHECK(select_lede(draft, b).id == LedeId::TimelineCountdown);

    b.facts.push_back(quantity("q1", "Apex", "output", 10, "t"));
    b.facts.push_back(quantity("q2", "Apex", "output", 11, "t"));
    b.facts.push_back(quantity("q3", "Apex", "output", 12, "t"));
    b.facts.push_back(quantity("q4", "Apex", "output", 500, "t"));
    CHECK(select_lede(draft, b).id == LedeId::DataShock);

    b.facts.push_back(quantity("q5", "Borealis", "margin rose", 3, "%"));
    b.facts.push_back(quantity("q6", "Borealis", "margin fell", 2, "%"));
    CHECK(select_lede(draft, b).id == LedeId::ContradictionParadox);
  }

  TEST_CASE("trend polarity weighs adverse metrics") {
    CHECK(trend_polarity(quantity("a", "x", "profit rose", 5, "%")) == 1);
    CHECK(trend_polarity(quantity("b", "x", "losses rose", 5, "%")) == -1);
    CHECK(trend_polarity(quantity("c", "x", "margin fell", 5, "%")) == -1);
    CHECK(trend_polarity(quantity("d", "x", "shipped", 5, "units")) == 0);
  }

  TEST_CASE("lede blueprints are registered in enum order") {
    const auto& all = lede_blueprints();
    for (std::size_t i = 0; i < all.size(); ++i) {
      CHECK(static_cast<std::size_t>(all[i].id) == i);
      CHECK_FALSE(all[i].directive.empty());
      CHECK(parse_lede_id(to_string(all[i].id)) == all[i].id);
    }
  }

  TEST_CASE("pacing alternates on random class sequences") {
    testsupport::Gen g(5);
    for (int trial = 0; trial < 500; ++trial) {
      std::vector<Density> classes(g.between(1, 12));
      for (auto& c : classes) c = g.coin() ? Density::HighDensity : Density::LowDensity;
      for (auto mode : {PacingMode::Reorder, PacingMode::PreserveOrder}) {
        const auto plan = plan_pacing(classes, mode);
        REQUIRE(plan.order.size() == classes.size());
        CHECK(alternates(plan.classes));
        auto sorted = plan.order;
        std::sort(sorted.begin(), sorted.end());
        std::vector<std::size_t> iota(classes.size());
        std::iota(iota.begin(), iota.end(), 0);
        CHECK(sorted == iota);
        std::size_t changed = 0;
        for (std::size_t i = 0; i < plan.order.size(); ++i) changed += plan.classes[i] != classes[plan.order[i]];
        CHECK(changed == plan.coerced.size());
        if (mode == PacingMode::PreserveOrder) {
          CHECK(plan.order == iota);
          CHECK(plan.swaps == 0);
        }
      }
    }
  }

  TEST_CASE("reorder avoids coercion when counts allow it") {
    const std::vector<Density> v = {Density::HighDensity, Density::HighDensity, Density::LowDensity,
                                    Density::LowDensity};
    const auto plan = plan_pacing(v, PacingMode::Reorder);
    CHECK(plan.coerced.empty());
    CHECK(plan.swaps >= 1);
    const auto keep = plan_pacing(v, PacingMode::PreserveOrder);
    CHECK(keep.coerced.size() == 2);
  }

  TEST_CASE("enforce pacing flags coerced sections") {
    std::vector<Section> sections(3);
    for (auto& s : sections) s.density = Density::HighDensity;
    sections[0].title = "a";
    const auto out = enforce_pacing(sections, PacingMode::PreserveOrder);
    CHECK(out[1].density == Density::LowDensity);
    CHECK(out[1].coerced);
    CHECK_FALSE(out[1].directives.empty());
    CHECK_FALSE(out[0].coerced);
  }

  TEST_CASE("outline for the sample corpus") {
    const auto& bundle = testsupport::vgame_bundle();
    const auto bindings = bind_slots(golden(), bundle);
    PlanConfig config;
    const auto o = plan_outline(golden(), bindings, bundle, config, "Apex squeezes Borealis");
    CHECK(o.schema_id == "S2-VGAME-01");
    REQUIRE(o.sections.size() >= config.min_sections);
    CHECK(o.sections.size() <= config.max_sections);
    std::vector<Density> classes;
    for (std::size_t k = 0; k < o.sections.size(); ++k) {
      const auto& s = o.sections[k];
      classes.push_back(s.density);
      CHECK(s.window.section == k);
      CHECK(s.window.used_chars <= s.window.char_budget);
      CHECK(s.window.char_budget == config.char_budget_per_section);
      CHECK_FALSE(s.blocks.empty());
      for (const auto& spec : s.blocks) {
        CHECK(spec.target_chars >= 1);
        for (const auto& ref : spec.evidence_refs) CHECK(s.window.contains(ref));
      }
    }
    CHECK(alternates(classes));
    CHECK(o == plan_outline(golden(), bindings, bundle, config, "Apex squeezes Borealis"));
  }

  TEST_CASE("outline json round trip resolves windows against the bundle") {
    const auto& bundle = testsupport::vgame_bundle();
    const auto o = plan_outline(golden(), bind_slots(golden(), bundle), bundle, {}, "t");
    const auto back = outline_from_json(nlohmann::json::parse(dump(to_json(o))), bundle);
    CHECK(back == o);
  }

  TEST_CASE("unbound required slots stop planning") {
    CorpusBundle empty;
    SlotBindings none;
    none.unbound = {"Analyze_Survival_Capability"};
    try {
      plan_outline(golden(), none, empty);
      FAIL("planned without evidence");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Planning);
    }
  }

  TEST_CASE("plan config validation") {
    PlanConfig c;
    c.min_sections = 2;
    CHECK_THROWS_AS(c.validate(), Error);
    c = {};
    c.max_sections = 2;
    CHECK_THROWS_AS(c.validate(), Error);
    c = {};
    c.data_shock_ratio = 0.5;
    CHECK_THROWS_AS(c.validate(), Error);
  }

  TEST_CASE("scoping keeps referenced evidence and respects the budget") {
    const auto& bundle = testsupport::vgame_bundle();
    auto o = plan_outline(golden(), bind_slots(golden(), bundle), bundle, {}, "t");
    for (const std::size_t budget : {std::size_t{2500}, std::size_t{4000}}) {
      try {
        const auto scoped = scope_contexts(o, bundle, budget);
        for (const auto& s : scoped.sections) {
          CHECK(s.window.used_chars <= budget);
          for (const auto& spec : s.blocks) {
            for (const auto& ref : spec.evidence_refs) CHECK(s.window.contains(ref));
          }
        }
      } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Scoping);
      }
    }
    CHECK_THROWS_AS(scope_contexts(o, bundle, 10), Error);
  }
}
