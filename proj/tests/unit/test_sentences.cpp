#include <doctest.h>

#include "deepnews/sentences.hpp"
#include "deepnews/text.hpp"
#include "support.hpp"

using namespace deepnews;

TEST_SUITE("sentences") {
  TEST_CASE("decimals and abbreviations do not split") {
    const auto s = segment_sentences(std::string_view("Margins fell to 9.4% at Apex Corp. in May. Dr. Ek disagreed."));
    REQUIRE(s.size() == 2);
    CHECK(s.sentences[1].text == "Dr. Ek disagreed.");
  }

  TEST_CASE("cjk terminators and closing quotes") {
    const auto s = segment_sentences(std::string_view("利润下降了。“我们别无选择！”他说。"));
    REQUIRE(s.size() == 3);
    CHECK(s.sentences[1].text == "“我们别无选择！”");
  }

  TEST_CASE("blank line is a hard boundary") {
    const auto s = segment_sentences(std::string_view("No terminator here\n\nNext one"));
    CHECK(s.size() == 2);
  }

  TEST_CASE("spans cover the input exactly") {
    testsupport::Gen g(11);
    const std::vector<std::string> parts = {"Prices rose 3.5%. ", "然而，", "利润下降。", "\"Why?\" ", "he asked. ",
                                            "\n\n", "Dr. No ", "e.g. this ", "!", "x"};
    for (int trial = 0; trial < 300; ++trial) {
      std::string input;
      const auto n = g.between(0, 12);
      for (std::size_t i = 0; i < n; ++i) input += g.pick(parts);
      const auto list = segment_sentences(std::string_view(input));
      std::string rebuilt;
      std::size_t expect_start = 0;
      for (const auto& s : list.sentences) {
        CHECK(s.start == expect_start);
        CHECK(s.end > s.start);
        expect_start = s.end;
        rebuilt += text::slice(input, s.start, s.end);
        CHECK(s.char_len == text::char_count(s.text));
        CHECK(s.token_len == text::token_length(s.text));
      }
      if (!list.empty()) CHECK(rebuilt == input);
    }
  }
}
