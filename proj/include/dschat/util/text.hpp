#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dschat::util {

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);
bool starts_with(std::string_view s, std::string_view prefix);
bool contains_ci(std::string_view haystack, std::string_view needle);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
std::string replace_all(std::string s, std::string_view from, std::string_view to);
std::vector<std::string> split_lines(std::string_view s);

// Lowercase; runs of spaces, '_' and '-' collapse to one '_'; ends trimmed.
// "Final Grade", "final_grade" and "final-grade" all become "final_grade".
std::string normalize_name(std::string_view s);

std::size_t levenshtein(std::string_view a, std::string_view b);

// Whole-string number parse (surrounding spaces allowed); rejects nan/inf.
std::optional<double> parse_number(std::string_view s);

// Shortest text that parses back to the same double; integers print without a point.
std::string format_number(double v);

bool valid_utf8(std::string_view s);

// Case-insensitive search for `word` bounded by non-alphanumerics. Returns npos if absent.
std::size_t find_word_ci(std::string_view text, std::string_view word, std::size_t from = 0);

}  // namespace dschat::util
