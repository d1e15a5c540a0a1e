#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace deepnews {

struct Sentence {
  std::string text;       // trimmed, terminator and closing quotes included
  std::size_t start = 0;  // raw span in code points, [start, end)
  std::size_t end = 0;
  std::size_t char_len = 0;
  std::size_t token_len = 0;
};

/// Raw spans are contiguous and cover the whole input, so slicing them back
/// out and concatenating reproduces the text exactly.
struct SentenceList {
  std::vector<Sentence> sentences;

  std::size_t size() const { return sentences.size(); }
  bool empty() const { return sentences.empty(); }
  std::vector<double> token_lengths() const;
};

/// Splits on CJK terminators (。！？；) and Latin terminators (. ! ?).
/// Decimal points, common abbreviations and dots inside tokens never split;
/// closing quotes/brackets stay with their sentence; a blank line is a hard
/// boundary.
SentenceList segment_sentences(std::string_view utf8);
SentenceList segment_sentences(std::u32string_view text);

}  // namespace deepnews
