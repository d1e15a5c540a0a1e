#include <doctest.h>

#include "deepnews/extraction.hpp"
#include "deepnews/text.hpp"

using namespace deepnews;

TEST_SUITE("extraction") {
  TEST_CASE("percentages, amounts and dates") {
    const std::string s = "Apex raised prices by 27% in March 2024 and earned 8.6 billion yuan.";
    const auto m = scan_numeric_mentions(std::string_view(s));
    REQUIRE(m.size() == 3);
    CHECK(m[0].kind == MentionKind::Quantity);
    CHECK(m[0].quantity.number == doctest::Approx(27));
    CHECK(m[0].literal() == "27%");
    CHECK(m[1].kind == MentionKind::Date);
    CHECK(m[1].date.year == 2024);
    CHECK(m[1].date.month == 3);
    CHECK(m[2].quantity.scaled() == doctest::Approx(8.6e9));
    for (const auto& x : m) CHECK(text::slice(s, x.span.start, x.span.end) == x.literal());
  }

  TEST_CASE("cjk magnitude units scale") {
    const auto m = scan_numeric_mentions(std::string_view("净利润45亿元"));
    REQUIRE(m.size() == 1);
    CHECK(m[0].quantity.number == doctest::Approx(45));
    CHECK(m[0].quantity.scale == doctest::Approx(1e8));
  }

  TEST_CASE("identifiers are not quantities") {
    CHECK(scan_numeric_mentions(std::string_view("Q3 results and 5G rollout")).empty());
  }

  TEST_CASE("attributed quotes only") {
    const auto q = scan_quotes(text::decode("\"We will build one,\" said Carl Voss. \"Floating words.\""));
    REQUIRE(q.size() == 1);
    CHECK(q[0].content == "We will build one,");
    CHECK(q[0].speaker == "Carl Voss");
  }

  TEST_CASE("organization names") {
    const auto e = scan_entities(text::decode("Analysts at Apex Materials Group and 宁德时代科技 agreed."));
    REQUIRE(e.size() == 2);
    CHECK(e[0].name == "Apex Materials Group");
    CHECK(e[1].name == "宁德时代科技");
  }
}
