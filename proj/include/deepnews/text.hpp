#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

// UTF-8 helpers shared by every module. All "character" counts and offsets in
// this project are Unicode scalar values, never bytes.
namespace deepnews::text {

std::u32string decode(std::string_view utf8);
std::string encode(std::u32string_view code_points);
std::string encode(char32_t cp);

std::size_t char_count(std::string_view utf8);

/// Substring by code-point offsets [begin, end).
std::string slice(std::string_view utf8, std::size_t begin, std::size_t end);

bool is_cjk_ideograph(char32_t cp);
/// CJK punctuation and fullwidth forms that act as separators.
bool is_cjk_punct(char32_t cp);
bool is_space(char32_t cp);
bool is_ascii_digit(char32_t cp);
bool is_ascii_alpha(char32_t cp);
bool is_ascii_alnum(char32_t cp);

/// Token length used by the rhythm constraints and burstiness: one token per
/// CJK ideograph, one per maximal run of other non-space, non-CJK-punctuation
/// characters.
std::size_t token_length(std::u32string_view s);
std::size_t token_length(std::string_view utf8);

std::string to_lower_ascii(std::string_view s);

/// Relevance tokens: lowercase ASCII alphanumeric words (underscores split,
/// stopwords and single letters dropped) plus CJK ideograph bigrams.
std::set<std::string> keyword_tokens(std::string_view utf8);

std::size_t overlap(const std::set<std::string>& a, const std::set<std::string>& b);

std::string trim(std::string_view s);

/// Turns "Step_1_Profile_The_Oppressor" into "Profile The Oppressor".
std::string humanize_identifier(std::string_view id);

/// Shortest round-trip decimal form ("2.8", "0.0991", "1e+20").
std::string format_double(double v);

/// Fixed-point with `decimals` digits.
std::string format_fixed(double v, int decimals);

std::uint64_t fnv1a64(std::string_view bytes);
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace deepnews::text
