#include <doctest.h>

#include "deepnews/causal_chain.hpp"
#include "deepnews/error.hpp"

using namespace deepnews;

TEST_SUITE("causal_chain") {
  TEST_CASE("impact sums over paths") {
    TransmissionGraph g({{"A", "supplier"}, {"B", "maker"}, {"C", "dealer"}, {"D", "bank"}},
                        {{"A", "B", "price", 2.0, "Information Asymmetry"},
                         {"B", "C", "volume", 0.5, std::nullopt},
                         {"A", "C", "direct", 1.0, std::nullopt}});
    const auto r = propagate_causal_chain(g, "A", 10.0);
    CHECK(r.impact.at("A") == doctest::Approx(10.0));
    CHECK(r.impact.at("B") == doctest::Approx(20.0));
    CHECK(r.impact.at("C") == doctest::Approx(10.0 * 2.0 * 0.5 + 10.0));
    CHECK(r.impact.at("D") == 0.0);
    std::size_t amplified = 0;
    for (const auto& p : r.paths) amplified += p.classification == PathClass::NonLinearAmplified;
    CHECK(amplified == 2);
    CHECK_FALSE(r.paths_truncated);
  }

  TEST_CASE("construction and propagation errors") {
    CHECK_THROWS_AS(TransmissionGraph({{"A", ""}}, {{"A", "A", "x", 1.0, std::nullopt}}), Error);
    CHECK_THROWS_AS(TransmissionGraph({{"A", ""}}, {{"A", "B", "x", 1.0, std::nullopt}}), Error);
    CHECK_THROWS_AS(TransmissionGraph({{"A", ""}, {"B", ""}}, {{"A", "B", "x", -1.0, std::nullopt}}), Error);
    TransmissionGraph cyc({{"A", ""}, {"B", ""}}, {{"A", "B", "x", 1.0, std::nullopt}, {"B", "A", "y", 1.0, std::nullopt}});
    try {
      propagate_causal_chain(cyc, "A", 1.0);
      FAIL("cycle not detected");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Cycle);
    }
    CHECK_THROWS_AS(propagate_causal_chain(cyc, "Z", 1.0), Error);
  }

  TEST_CASE("json round trip") {
    TransmissionGraph g({{"A", "s"}, {"B", "m"}}, {{"A", "B", "price", 1.5, "Lock-in"}});
    const auto back = TransmissionGraph::from_json(nlohmann::json::parse(g.to_json().dump()));
    CHECK(back.nodes() == g.nodes());
    CHECK(back.edges() == g.edges());
    CHECK_THROWS_AS(TransmissionGraph::from_json(nlohmann::json::parse("{\"nodes\": 3}")), Error);
  }
}
