#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "dschat/errors.hpp"
#include "dschat/json.hpp"

namespace dschat::gateway {

class NoJsonFound : public ValidationError {
 public:
  NoJsonFound() : ValidationError("NoJsonFound", "no JSON object found in text") {}
};

// A brace region opened at `position` and never balanced.
class JsonParseError : public ValidationError {
 public:
  explicit JsonParseError(std::size_t position)
      : ValidationError("ParseError", "unbalanced '{' at offset " + std::to_string(position)),
        position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

// Half-open [begin, end) span of a balanced {...} region.
struct BraceRegion {
  std::size_t begin;
  std::size_t end;
};

// Every balanced region starting at a '{', in order of its opening brace.
// Quoted strings inside a region are skipped when counting braces.
// Openers that never balance are reported through `unbalanced` when non-null.
std::vector<BraceRegion> brace_regions(std::string_view text,
                                       std::vector<std::size_t>* unbalanced = nullptr);

// Returns the first strict-JSON object embedded in `text`; surrounding prose is ignored.
// Throws NoJsonFound, or JsonParseError when an opening brace never closes.
Json extract_json(std::string_view text);

// Parses the relaxed object notation used by PeTEL listings and chat replies:
// unquoted keys, bare scalar values, single or double quotes, None/null, trailing commas.
// Bare tokens become numbers, booleans or null when they spell one, otherwise strings.
// The whole input must be a single value. Throws ValidationError("RelaxedParseError").
Json parse_relaxed(std::string_view text);

// Strict extraction first; falls back to the first brace region that parses relaxed.
Json extract_object(std::string_view text);

}  // namespace dschat::gateway
